use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("Fock leakage {population:e} in the top two levels exceeds {limit:e}")]
    FockLeakage { population: f64, limit: f64 },

    #[error("schedule violates commensurability: {0}")]
    Commensurability(String),

    #[error("switch is off (flux ratio 1/2): the linearized inductance is undefined")]
    SwitchOff,

    #[error("impedance pole at omega = {omega:e} rad/s")]
    ImpedancePole { omega: f64 },

    #[error("Matsubara sum did not converge to {tolerance:e} within {n_max} terms")]
    NonConvergentSum { n_max: usize, tolerance: f64 },

    #[error("trajectory sampling too coarse: dt = {dt:e} s, need dt < {limit:e} s")]
    Resolution { dt: f64, limit: f64 },

    #[error("time {t:e} s outside [0, {total:e}) s")]
    OutOfRange { t: f64, total: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("not a controlled-phase gate: {0}")]
    NotControlledPhase(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
