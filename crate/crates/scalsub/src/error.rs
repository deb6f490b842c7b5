use thiserror::Error;

/// Crate-wide error type.
///
/// Every failure carries enough context to act on: block failures name the
/// block, scheme failures name the offending parameters, and tuning failures
/// name the violated bound. [`Error::exit_code`] maps each class onto the
/// process exit codes used by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid block scheme: {0}")]
    InvalidScheme(String),

    #[error("block index {index} out of range 1..={q}")]
    BlockIndexOutOfRange { index: usize, q: usize },

    #[error("scheme was built for n = {scheme_n} but the sample has n = {sample_n}")]
    SchemeSampleMismatch { scheme_n: usize, sample_n: usize },

    #[error("infeasible tuning: {0}")]
    InfeasibleTuning(String),

    #[error("variance estimation needs at least two blocks, got q = {q}")]
    InsufficientBlocks { q: usize },

    #[error(
        "blocks overlap (h = {h} < b = {b}); subagging variance theory assumes \
         disjoint blocks, pass allow_overlap to compute the point estimate anyway"
    )]
    OverlappingBlocks { b: usize, h: usize },

    #[error(
        "realized block exponent beta = {beta:.6} does not exceed the bias threshold \
         {threshold:.6}; the CLT interval is centered off target here, use the \
         two-level interval instead"
    )]
    AsymptoticBias { beta: f64, threshold: f64 },

    #[error("variance was withheld for this estimate; no standard error is available")]
    VarianceUnavailable,

    #[error("statistic failed on block {block}: {source}")]
    StatisticOnBlock {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    NonConvergence { iterations: usize, last: f64 },

    #[error("replication {rep} at n = {n} failed: {source}")]
    Replication {
        n: usize,
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    CsvParse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error class: 2 for invalid input or
    /// configuration, 3 for infeasible tuning, 4 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleTuning(_) => 3,
            Error::StatisticOnBlock { .. }
            | Error::NonConvergence { .. }
            | Error::Numerical(_) => 4,
            Error::Replication { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
