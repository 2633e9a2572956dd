use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported function constructor `{0}`")]
    UnsupportedConstructor(String),

    #[error(
        "weight factor {factor} has exponent {exponent} and is not integrable on box {bounds}"
    )]
    NonIntegrable {
        factor: usize,
        exponent: f64,
        bounds: String,
    },

    #[error("weight has zero mass on candidate box {0}")]
    ZeroMass(String),

    #[error("symbol cannot be evaluated away from grid nodes (no analytic closure)")]
    NotEvaluable,

    #[error("derivative unavailable and ladder too coarse: {points_per_decade} points per decade (need 64)")]
    LadderTooCoarse { points_per_decade: usize },

    #[error("interval [{lo}, {hi}] is not dyadic")]
    NotDyadic { lo: f64, hi: f64 },

    #[error("band overflow: truncation 2^{truncation} exceeds the grid band {limit}")]
    BandOverflow { truncation: i32, limit: f64 },

    #[error("annulus of radius {radius} exits the grid box of half-width {half_width}")]
    AnnulusOutsideBox { radius: f64, half_width: f64 },

    #[error("spectrum violation: {0}")]
    SpectrumViolation(String),

    #[error("spectrum leaks outside the decomposition: leaked mass {leaked:.3e} of {total:.3e}")]
    SpectralLeak { leaked: f64, total: f64 },

    #[error("sets E_Q of cubes {first} and {second} overlap")]
    OverlappingSets { first: usize, second: usize },

    #[error("set E_Q of cube {0} is not contained in its cube")]
    NotContained(usize),

    #[error("missing shift entry for scale {0}")]
    MissingShift(i32),

    #[error("stopping recursion exceeded depth budget {budget} at cube {cube}")]
    DepthBudget { budget: usize, cube: String },

    #[error("no cubes: {0}")]
    Empty(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("experiment `{experiment}`: {source}")]
    Experiment {
        experiment: String,
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(arg: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            arg,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
