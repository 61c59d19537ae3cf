use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Certification failures are *not* errors: they are reported inside the
/// certificate. Errors mean a computation could not be carried out honestly.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("operands have different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),
    #[error("points are indistinguishable at the available precision")]
    IndistinguishableAtPrecision,
    #[error("enumeration budget exceeded: {needed} items requested, cap is {cap}")]
    BudgetExceeded { needed: String, cap: u64 },
    #[error("Hensel condition v(f(x0)) > 2 v(f'(x0)) not satisfied: {0}")]
    HenselConditionFailed(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("guard cannot be decided at the available precision: {0}")]
    GuardUndecidableAtPrecision(String),
    #[error("unsupported expression: {0}")]
    UnsupportedExpression(String),
    #[error("precision insufficient for image: {0}")]
    PrecisionInsufficientForImage(String),
    #[error("not a contraction: {0}")]
    NotAContraction(String),
    #[error("maximum number of iterations ({0}) exceeded")]
    MaxIterExceeded(usize),
    #[error("derivative is zero")]
    ZeroDerivative,
    #[error("not injective at scale: {0}")]
    NotInjectiveAtScale(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by the input point lying outside a function's
    /// domain (as opposed to precision or budget problems).
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::DivisionByZero | Error::OutOfDomain(_) | Error::UnsupportedExpression(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
