//! Result bundles and their on-disk form.

use crate::{Error, Result};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// A numeric table; every value is written with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// A two-column series for plotting, with an optional log-log variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
    pub loglog: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub subcommand: String,
    pub config_hash: String,
    pub version: String,
    pub parallel: bool,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultBundle {
    pub tables: Vec<Table>,
    pub series: Vec<Series>,
    pub summary: Vec<String>,
    pub metadata: Metadata,
}

pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, fs::File)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = fs::File::create(&path)?;
    Ok((path, f))
}

impl ResultBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<table>.csv`, `summary.txt` and `metadata.json`. Returns the
    /// written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let hash = &self.metadata.config_hash;
        let mut out = Vec::new();
        for t in &self.tables {
            let (path, mut f) = create(dir, &format!("{}.csv", t.name))?;
            writeln!(f, "# config_hash={hash}")?;
            let mut w = csv::Writer::from_writer(f);
            let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(&t.columns).map_err(io)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|x| format_value(*x))).map_err(io)?;
            }
            w.flush()?;
            out.push(path);
        }
        let (path, mut f) = create(dir, "summary.txt")?;
        writeln!(f, "# config_hash={hash}")?;
        for line in &self.summary {
            writeln!(f, "{line}")?;
        }
        out.push(path);
        let (path, mut f) = create(dir, "metadata.json")?;
        let json = serde_json::to_string_pretty(&self.metadata).map_err(|e| Error::Io(e.into()))?;
        writeln!(f, "{json}")?;
        out.push(path);
        Ok(out)
    }
}

/// Writes every series of the bundle as whitespace-separated `.dat` files
/// under `dir`, plus a `_loglog` variant where requested.
pub fn emit_plotdata(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    if bundle.tables.is_empty() {
        return Err(Error::EmptyBundle);
    }
    let hash = &bundle.metadata.config_hash;
    let mut out = Vec::new();
    for s in &bundle.series {
        let mut write = |name: String, x: &str, y: &str, pts: &mut dyn Iterator<Item = (f64, f64)>| -> Result<()> {
            let (path, mut f) = create(dir, &name)?;
            writeln!(f, "# config_hash={hash}")?;
            writeln!(f, "# {x} {y}")?;
            for (a, b) in pts {
                writeln!(f, "{} {}", format_value(a), format_value(b))?;
            }
            out.push(path);
            Ok(())
        };
        write(format!("{}.dat", s.name), &s.x, &s.y, &mut s.points.iter().copied())?;
        if s.loglog {
            let mut pts = s.points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln()));
            write(format!("{}_loglog.dat", s.name), &format!("log_{}", s.x), &format!("log_{}", s.y), &mut pts)?;
        }
    }
    Ok(out)
}
