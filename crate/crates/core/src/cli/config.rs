//! TOML run configuration.

use crate::gap::GapOptions;
use crate::gp::{ExternalFields, MinimizeOptions, PeriodicField};
use crate::twobody::{GridSpec, PotentialSpec};
use crate::{Error, Execution, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    BoundState,
    Coupling,
    Gp,
    Gap,
    Semiclassical,
    Crossover,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::BoundState => "bound-state",
            Subcommand::Coupling => "coupling",
            Subcommand::Gp => "gp",
            Subcommand::Gap => "gap",
            Subcommand::Semiclassical => "semiclassical",
            Subcommand::Crossover => "crossover",
        }
    }
}

/// One Fourier coefficient `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub n: Vec<i64>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A periodic function given as `constant + Σ cos_k cos(2πkx) + sin_k sin(2πkx)`
/// (d = 1 only) plus explicit Fourier modes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSpec {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub modes: Vec<ModeSpec>,
}

impl FieldSpec {
    pub fn constant(c: f64) -> Self {
        FieldSpec { constant: c, ..Default::default() }
    }

    pub fn cutoff(&self) -> usize {
        let trig = self.cos.len().max(self.sin.len());
        let m = self.modes.iter().flat_map(|m| m.n.iter().map(|n| n.unsigned_abs() as usize)).max().unwrap_or(0);
        trig.max(m)
    }

    pub fn to_field(&self, dim: usize, cutoff: usize) -> Result<PeriodicField> {
        if dim != 1 && !(self.cos.is_empty() && self.sin.is_empty()) {
            return Err(Error::ConfigParse("cos/sin lists are only available in d = 1".into()));
        }
        let cutoff = cutoff.max(self.cutoff());
        let mut f = PeriodicField::zeros(dim, cutoff);
        let mut add = |n: Vec<i64>, c: Complex64| -> Result<()> {
            if n.len() != dim {
                return Err(Error::ConfigParse(format!("mode {n:?} does not have {dim} components")));
            }
            let v = f.get(&n) + c;
            f.set(&n, v);
            Ok(())
        };
        add(vec![0; dim], Complex64::new(self.constant, 0.0))?;
        for (k, &c) in self.cos.iter().enumerate() {
            let k = k as i64 + 1;
            add(vec![k], Complex64::new(0.5 * c, 0.0))?;
            add(vec![-k], Complex64::new(0.5 * c, 0.0))?;
        }
        for (k, &s) in self.sin.iter().enumerate() {
            let k = k as i64 + 1;
            add(vec![k], Complex64::new(0.0, -0.5 * s))?;
            add(vec![-k], Complex64::new(0.0, 0.5 * s))?;
        }
        for m in &self.modes {
            add(m.n.clone(), Complex64::new(m.re, m.im))?;
        }
        if f.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::ConfigParse("field coefficients must be finite".into()));
        }
        Ok(f)
    }

    fn to_real_field(&self, dim: usize, what: &str) -> Result<PeriodicField> {
        let mut f = self.to_field(dim, 0)?;
        if f.reality_defect() > 1e-12 {
            return Err(Error::ConfigParse(format!("{what} must be real-valued")));
        }
        f.real = true;
        Ok(f)
    }
}

/// External fields `W` and `A` (one component per dimension; missing
/// components are zero).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldsConfig {
    pub w: FieldSpec,
    pub a: Vec<FieldSpec>,
}

impl FieldsConfig {
    pub fn build(&self, dim: usize) -> Result<ExternalFields> {
        if self.a.len() > dim {
            return Err(Error::ConfigParse(format!("{} vector potential components for d = {dim}", self.a.len())));
        }
        let w = self.w.to_real_field(dim, "W")?;
        let a = (0..dim)
            .map(|j| match self.a.get(j) {
                Some(s) => s.to_real_field(dim, "A"),
                None => Ok(PeriodicField::zeros(dim, 0)),
            })
            .collect::<Result<Vec<_>>>()?;
        ExternalFields::new(w, a).map_err(|e| Error::ConfigParse(e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    /// Chemical potential for the coefficient integrals; `-E_b` if absent.
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GpConfig {
    /// Coupling constant; computed from the potential if absent.
    pub g: Option<f64>,
    pub cutoff: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Samples per unit length in the profile table.
    pub profile_points: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        let m = MinimizeOptions::default();
        GpConfig { g: None, cutoff: m.cutoff, tol: m.tol, max_iter: m.max_iter, profile_points: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapConfig {
    /// `ε/E_b` values; the solver runs at `μ = -E_b + ε`.
    pub eps_over_eb: Vec<f64>,
    #[serde(flatten)]
    pub options: GapOptions,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig { eps_over_eb: vec![0.04, 0.02, 0.01, 0.005], options: GapOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemiclassicalConfig {
    pub h: Vec<f64>,
    /// Bloch mode cutoff; `ceil(40/h)` if absent.
    pub n_modes: Option<usize>,
    pub theta_samples: usize,
    /// Chemical potential; `-E_b` if absent.
    pub mu: Option<f64>,
    /// Also evaluate the trial-state energy (requires `μ = -E_b`).
    pub trial: bool,
    pub psi: FieldSpec,
}

impl Default for SemiclassicalConfig {
    fn default() -> Self {
        SemiclassicalConfig {
            h: vec![0.2, 0.1, 0.05],
            n_modes: None,
            theta_samples: 16,
            mu: None,
            trial: false,
            psi: FieldSpec::constant(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossoverConfig {
    pub delta_mu: f64,
    pub h: Vec<f64>,
}

impl Default for CrossoverConfig {
    fn default() -> Self {
        CrossoverConfig { delta_mu: 1.0, h: vec![0.3, 0.2, 0.1, 0.05] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<Subcommand>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub execution: Execution,
    /// Output directory, overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub potential: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub fields: FieldsConfig,
    #[serde(default)]
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub gp: GpConfig,
    #[serde(default)]
    pub gap: GapConfig,
    #[serde(default)]
    pub semiclassical: SemiclassicalConfig,
    #[serde(default)]
    pub crossover: CrossoverConfig,
}

fn positive(what: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::ConfigParse(format!("{what} must be positive, got {x}")))
    }
}

fn h_list(what: &str, hs: &[f64]) -> Result<()> {
    if hs.is_empty() {
        return Err(Error::ConfigParse(format!("{what} list is empty")));
    }
    for &h in hs {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::ConfigParse(format!("{what} = {h} outside (0, 1)")));
        }
    }
    if hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::ConfigParse(format!("{what} list must be strictly decreasing")));
    }
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    /// Hex SHA-256 of the canonical re-emission, so formatting and key
    /// order of the input file do not matter.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.out = None;
        let digest = Sha256::digest(c.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate().map_err(|e| Error::ConfigParse(e.to_string()))?;
        if let Some(g) = &self.grid {
            positive("grid.spacing", g.spacing)?;
            if let Some(r) = g.radius {
                positive("grid.radius", r)?;
            }
        }
        positive("gp.tol", self.gp.tol)?;
        if let Some(g) = self.gp.g {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::ConfigParse(format!("gp.g must be non-negative, got {g}")));
            }
        }
        if self.gp.max_iter == 0 || self.gp.profile_points == 0 {
            return Err(Error::ConfigParse("gp.max_iter and gp.profile_points must be positive".into()));
        }
        positive("gap.tol", self.gap.options.tol)?;
        positive("gap.mixing", self.gap.options.mixing)?;
        if self.gap.options.mixing > 1.0 {
            return Err(Error::ConfigParse("gap.mixing must not exceed 1".into()));
        }
        if self.gap.options.grid.order == 0 || self.gap.options.max_iter == 0 {
            return Err(Error::ConfigParse("gap.order and gap.max_iter must be positive".into()));
        }
        if self.gap.eps_over_eb.is_empty() {
            return Err(Error::ConfigParse("gap.eps_over_eb is empty".into()));
        }
        for &e in &self.gap.eps_over_eb {
            positive("gap.eps_over_eb", e)?;
        }
        h_list("semiclassical.h", &self.semiclassical.h)?;
        if self.semiclassical.theta_samples == 0 {
            return Err(Error::ConfigParse("semiclassical.theta_samples must be positive".into()));
        }
        if let Some(mu) = self.semiclassical.mu {
            if !(mu < 0.0) {
                return Err(Error::ConfigParse(format!("semiclassical.mu = {mu} must be negative")));
            }
        }
        if let Some(mu) = self.coupling.mu {
            if !(mu < 0.0) {
                return Err(Error::ConfigParse(format!("coupling.mu = {mu} must be negative")));
            }
        }
        if !(self.crossover.delta_mu >= 0.0 && self.crossover.delta_mu.is_finite()) {
            return Err(Error::ConfigParse("crossover.delta_mu must be non-negative".into()));
        }
        h_list("crossover.h", &self.crossover.h)?;
        let d = self.potential.dim;
        self.fields.build(d)?;
        self.semiclassical.psi.to_field(d, 0)?;
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.unwrap_or_else(|| GridSpec::for_potential(&self.potential))
    }

    pub fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions { cutoff: self.gp.cutoff, tol: self.gp.tol, max_iter: self.gp.max_iter, seed: self.seed }
    }
}
