use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // support
    #[error("ordering violated: {0}")]
    OrderingViolation(String),
    #[error("interval {index} is half-infinite but is not the last component")]
    InfiniteNonLast { index: usize },
    #[error("b0 must be finite and positive, got {0}")]
    NonPositiveB0(f64),

    // kernel
    #[error("kernel half-width must be finite and positive, got {0}")]
    NonPositiveRho(f64),
    #[error("kernel check failed: {property}: {detail}")]
    KernelViolation {
        property: &'static str,
        detail: String,
    },

    // construct / family
    #[error("phase entry {value} at position {index} is outside 0..{n}")]
    PhaseOutOfRange { index: usize, value: i64, n: u32 },
    #[error("root order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{n}^{k} exceeds the enumeration cap of {cap}")]
    EnumerationOverflow { n: u32, k: usize, cap: u64 },
    #[error("no sample supplied for probe point {0}")]
    MissingProbe(f64),
    #[error("base function vanishes at probe point {0}")]
    ProbeAtZero(f64),
    #[error("ratio {ratio} at probe {x} is not within {tol} of an {n}-th root of unity")]
    NotARoot {
        x: f64,
        ratio: String,
        n: u32,
        tol: f64,
    },
    #[error("invalid blueprint: {0}")]
    InvalidBlueprint(String),

    // analyze
    #[error("grid abscissas are not symmetric about 0")]
    AsymmetricGrid,
    #[error("grids do not share abscissas")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid does not vanish at its ends; quadrature needs compact support")]
    UnboundedSupport,
    #[error("grid resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("|f| and |g| differ by {deviation:e} at x = {x}")]
    ModulusMismatch { x: f64, deviation: f64 },
    #[error("ratio g/f is not constant on component {component}: residual {residual:e}")]
    NonConstantRatio { component: i32, residual: f64 },

    // distribution
    #[error("tolerance {abs_tol:e} needs a window of {window:e}, above the maximum {max:e}")]
    ToleranceUnreachable { abs_tol: f64, window: f64, max: f64 },

    // io
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
