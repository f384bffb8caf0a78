use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("n must be a positive integer")]
    ZeroArgument,
    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("k must be at least 2, got {0}")]
    InvalidK(u32),
    #[error("zeta is not evaluated at s = {0}")]
    ZetaDomain(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("cannot certify tolerance {tol:e} for {what}")]
    ToleranceUnreachable { what: String, tol: f64 },
    #[error("arithmetic function {0} carries no certified tail bound")]
    NotCertified(String),
    #[error("unknown built-in function {0:?}")]
    UnknownBuiltin(String),
    #[error("N0 must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("need at least {needed} usable points spanning {decades} decades, got {got}")]
    InsufficientPoints { needed: usize, decades: u32, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
