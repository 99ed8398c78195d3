use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },

    #[error("{field} must be finite and non-negative, got {value}")]
    Negative { field: &'static str, value: f64 },

    #[error("sigma must be non-negative, got {0}")]
    NegativeVolatility(f64),

    #[error("net profit condition violated: premium rate {c} <= expected claims per unit time {expected_claims}")]
    NetProfitViolation { c: f64, expected_claims: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("ensemble paths do not share one sampling scheme")]
    SchemeMismatch,

    #[error("invalid barrier grid: {0}")]
    InvalidGrid(String),

    #[error("Lundberg roots are degenerate: {0}")]
    DegenerateRoots(String),

    #[error("scale-function oracle requires sigma > 0")]
    NoDiffusion,

    #[error("no sign change of W'' found on [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("value function needs 0 <= u <= b, got u = {u}, b = {b}")]
    DomainError { u: f64, b: f64 },

    #[error("parse error{}: {field}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("replication {rep} of cell (alpha={alpha}, h={h}) failed: {source}")]
    Replication {
        alpha: usize,
        h: f64,
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
