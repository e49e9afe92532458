use thiserror::Error;

/// Errors raised by the solver and the estimate probes.
#[derive(Debug, Error)]
pub enum ZkError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("coefficients are not Hermitian (max defect {0:.3e})")]
    NonHermitian(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("counting window too small: {0}")]
    WindowTooSmall(String),
    #[error("row bound violated: row q={q} holds {count} points, bound {bound}")]
    UnboundedRow { q: f64, count: usize, bound: usize },
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("band {0} is empty on this grid")]
    EmptyBand(String),
    #[error("non-finite state at t={time} (step {step})")]
    NonFinite { time: f64, step: usize },
    #[error("infeasible regularity s={0}: requires s > 29/31")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, ZkError>;
