//! Reference computations that share no code with `locus-core`.
//!
//! Each function reaches a known value by a different route than the library
//! under test: Schubert calculus, torus-fixed-point graph sums, or closed forms.

pub mod closed_forms;
pub mod localization;
pub mod schubert;

use num_bigint::BigInt;
use num_rational::BigRational;

pub(crate) fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
