//! Exact rational arithmetic and truncated power series.
//!
//! All generating functions in this crate live here: a dense univariate
//! series type for expansions in a single weight, and a bivariate series
//! type in the variables `u, v` with `u² = g`, `v² = h`, which makes the
//! half-integer powers of the two edge weights polynomial-graded.
//!
//! Coefficients are exact rationals by default; every operation is exact,
//! no floating point is ever introduced. A double-precision coefficient
//! backend is available behind the same interface for large-size law
//! tables (see [`Coeff`]).

mod bi;
mod coeff;
mod uni;

pub use bi::BiSeries;
pub use coeff::{Coeff, Rational};
pub use uni::UniSeries;

/// Errors from truncated-series operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    /// Coefficient access beyond the truncation order is an error, never
    /// silently zero.
    #[error("coefficient of total degree {degree} requested beyond truncation {truncation}")]
    BeyondTruncation { degree: usize, truncation: usize },
    /// `log` requires constant term exactly 1.
    #[error("series logarithm requires constant term 1")]
    NonUnitConstant,
    /// Reciprocal requires a nonzero constant term.
    #[error("series reciprocal requires nonzero constant term")]
    ZeroConstant,
    /// Reversion requires f(0) = 0 and f'(0) != 0.
    #[error("series reversion requires f(0) = 0 and f'(0) != 0")]
    RevertPrecondition,
    /// Composition requires the inner series to vanish at 0.
    #[error("series composition requires inner constant term 0")]
    ComposeConstant,
    /// A series was built or requested at an insufficient truncation order.
    #[error("series truncation {got} is below the required order {required}")]
    InsufficientOrder { required: usize, got: usize },
}
