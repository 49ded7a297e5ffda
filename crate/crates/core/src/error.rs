use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension n = {0} is not supported (need n >= 2)")]
    InvalidDimension(usize),

    #[error("grid needs at least {min} nodes, got {count}")]
    GridTooSmall { count: usize, min: usize },

    #[error("grading strength must be positive and finite, got {0}")]
    InvalidStrength(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{what} = {value} lies outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("zero energy: cannot normalize the zero function")]
    ZeroEnergy,

    #[error("dimension mismatch: function lives in n = {function}, functional expects n = {functional}")]
    DimensionMismatch { function: usize, functional: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid does not resolve radius {radius:e}: {found} nodes below it, need {needed}")]
    UnderResolved {
        radius: f64,
        found: usize,
        needed: usize,
    },

    #[error("root finding failed on bracket [{lo}, {hi}]: {reason}")]
    RootFind { lo: f64, hi: f64, reason: String },

    #[error("no sign change of the boundary residual found for s in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("solution blew up at r = {r}")]
    BlowUp { r: f64 },

    #[error("integrator step size underflow at r = {r}")]
    StepUnderflow { r: f64 },

    #[error("no interior maximum found: {0}")]
    NoInteriorMaximum(String),
}

pub type Result<T> = std::result::Result<T, Error>;
