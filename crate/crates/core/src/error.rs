use thiserror::Error;

use crate::lp::LpStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported PSK order {0}: must be a power of two and at least 4")]
    InvalidOrder(usize),

    #[error("constellation index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("channel Gram matrix is singular (condition number {0:.3e})")]
    SingularChannel(f64),

    #[error("linear program did not reach optimality: {0:?}")]
    Lp(LpStatus),

    #[error("exhaustive search is capped at 8 antennas, got {0}")]
    OracleTooLarge(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
