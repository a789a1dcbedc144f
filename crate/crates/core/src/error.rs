use thiserror::Error;

/// Structural and ergodicity failures of a transition matrix.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("matrix has no rows")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) = {value} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("row {row} sums to {sum}, deviating from 1 by more than {tolerance:e}")]
    RowSum { row: usize, sum: f64, tolerance: f64 },
    #[error("chain is not irreducible")]
    NotIrreducible,
    #[error("chain is periodic")]
    NotAperiodic,
    #[error("chain violates detailed balance by {max_violation:e}")]
    NotReversible { max_violation: f64 },
    #[error("stationary linear system is singular")]
    Singular,
    #[error("stationary residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("power iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("expected {expected} reward values, got {got}")]
    RewardCount { expected: usize, got: usize },
    #[error("reward {value} at state {state} is negative or not finite")]
    BadReward { state: usize, value: f64 },
    #[error("passive matrix has dimension {got}, active matrix has {expected}")]
    PassiveDimension { expected: usize, got: usize },
}

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm {arm}: {source}")]
    Arm {
        arm: usize,
        #[source]
        source: ChainError,
    },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("i.i.d. stationary passive mode needs chain diagnostics")]
    MissingDiagnostics,
    #[error("no arms configured")]
    NoArms,
    #[error("mean gap must be positive, got {0}")]
    NonPositiveGap(f64),
    #[error("M = {m} is out of range for N = {n} arms")]
    PlaysOutOfRange { m: usize, n: usize },
    #[error("bound needs t > {min}, got {t}")]
    TimeTooSmall { t: u64, min: u64 },
    #[error("bound needs distinct means at rank {rank}")]
    TiedMeans { rank: usize },
    #[error("subepoch index {index} out of range 1..={count}")]
    Subepoch { index: usize, count: usize },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("failed to parse config: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
