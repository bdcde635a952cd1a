use std::path::PathBuf;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{kernel}: row {row} sums to {sum:.12} (expected 1)")]
    NonStochasticRow {
        kernel: String,
        row: usize,
        sum: f64,
    },

    #[error("{what}: entry {index} is negative ({value})")]
    NegativeProbability {
        what: String,
        index: usize,
        value: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("strategy space of size {count} exceeds the enumeration limit {limit}")]
    EnumerationLimitExceeded { count: String, limit: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("axis sets overlap on axis {0}")]
    AxisOverlap(usize),

    #[error("index {index} out of range (< {bound} required)")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("oracle would need {evaluations} evaluations (budget {budget})")]
    OracleBudgetExceeded { evaluations: f64, budget: f64 },

    #[error("codebook needs {requested} codewords (budget {budget})")]
    BudgetExceeded { requested: String, budget: u64 },

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("verification failed:\n{0}")]
    VerificationFailed(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported schema version {found:?} (expected \"1\")")]
    SchemaVersionMismatch { found: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            Error::NumericalInconsistency(_)
            | Error::OracleBudgetExceeded { .. }
            | Error::BudgetExceeded { .. } => 3,
            Error::VerificationFailed(_) => 4,
            _ => 2,
        }
    }
}
