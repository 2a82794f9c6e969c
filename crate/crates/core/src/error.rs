use thiserror::Error;

/// Errors raised by the exact and numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An index falls outside a table that has already been built.
    #[error("out of range: {0}")]
    Range(String),

    /// A brute-force or exact computation would exceed its configured size cap.
    #[error("refusing to run: {0}")]
    CapExceeded(String),

    /// Root finding or quadrature did not converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
