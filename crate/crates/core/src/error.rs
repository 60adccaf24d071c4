use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    TooLarge { order: u128, bound: u128 },
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("internal verification failure: {0}")]
    Internal(String),
}
