//! Exact coefficient arithmetic: rationals, sparse truncated power series and
//! degree-graded polynomials.
//!
//! Every type here is immutable once built and all operations return fresh
//! values, so they can be shared freely between threads.

mod coeff;
mod graded;
mod series;

pub use coeff::Coeff;
pub use graded::{GradedPolynomial, Variable};
pub use num_rational::BigRational;
pub use series::{Series, SeriesError, EXACT};

use num_bigint::BigInt;

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
