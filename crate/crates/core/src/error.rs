use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no bound state: lowest eigenvalue {lowest} is not negative")]
    NoBoundState { lowest: f64 },
    #[error("not converged after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cutoff mismatch: {0}")]
    CutoffMismatch(String),
    #[error("functional unbounded below: {0}")]
    Unbounded(String),
    #[error("admissibility violated: {0}")]
    AdmissibilityViolation(String),
    #[error("zero particle density")]
    ZeroDensity,
    #[error("spectral gap closed: smallest |eigenvalue| {smallest:e} at theta {theta}")]
    GapClosed { smallest: f64, theta: f64 },
    #[error("relative-coordinate window too small: alpha0 mass {outside:e} outside")]
    WindowTooSmall { outside: f64 },
    #[error("config error: {0}")]
    ConfigParse(String),
    #[error("result bundle has no tables")]
    EmptyBundle,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable name, printed by the command line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NoBoundState { .. } => "NoBoundState",
            Error::NotConverged { .. } => "NotConverged",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::CutoffMismatch(_) => "CutoffMismatch",
            Error::Unbounded(_) => "Unbounded",
            Error::AdmissibilityViolation(_) => "AdmissibilityViolation",
            Error::ZeroDensity => "ZeroDensity",
            Error::GapClosed { .. } => "GapClosed",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::ConfigParse(_) => "ConfigParseError",
            Error::EmptyBundle => "EmptyBundle",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
