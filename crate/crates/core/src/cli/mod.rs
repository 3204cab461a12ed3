//! Command line front end: `bcs2gp <subcommand> --config <path> [--out <dir>]`.

pub mod bundle;
pub mod config;
pub mod run;

pub use bundle::{emit_plotdata, ResultBundle, Series, Table};
pub use config::{FieldSpec, RunConfig, Subcommand};
pub use run::run;

use crate::Error;
use clap::Parser;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "bcs2gp", version, about = "BCS to Gross-Pitaevskii crossover computations")]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConfigParse(_) | Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::CutoffMismatch(_) => 2,
        Error::Io(_) => 4,
        _ => 3,
    }
}

/// Reads `BCS2GP_THREADS`; `None` if unset.
pub fn thread_cap() -> Result<Option<usize>, Error> {
    match std::env::var("BCS2GP_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::ConfigParse(format!("BCS2GP_THREADS = {v:?} is not a positive integer"))),
        },
    }
}

/// Runs one invocation and returns the process exit status.
pub fn main_with(args: Args) -> i32 {
    match execute(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            exit_code(&e)
        }
    }
}

fn execute(args: &Args) -> Result<(), Error> {
    if let Some(n) = thread_cap()? {
        crate::exec::set_thread_cap(n);
    }
    let mut cfg = RunConfig::load(&args.config).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", args.config.display()))),
        other => other,
    })?;
    match cfg.subcommand {
        Some(s) if s != args.subcommand => {
            return Err(Error::ConfigParse(format!(
                "config is for `{}` but `{}` was requested",
                s.name(),
                args.subcommand.name()
            )));
        }
        _ => cfg.subcommand = Some(args.subcommand),
    }
    let dir = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let bundle = run(&cfg)?;
    for line in &bundle.summary {
        println!("{line}");
    }
    bundle.write(&dir)?;
    if !bundle.series.is_empty() {
        emit_plotdata(&bundle, &dir.join("plot"))?;
    }
    Ok(())
}
