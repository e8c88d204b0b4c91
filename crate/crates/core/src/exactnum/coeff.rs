use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

/// A commutative ring containing the rationals, usable as a coefficient domain
/// for [`Series`](super::Series) and [`GradedPolynomial`](super::GradedPolynomial).
///
/// Values built with [`Coeff::from_rational`] carry no variable context; they
/// combine with any value of the same type.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn from_rational(r: BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, r: &BigRational) -> Self;
    /// Multiplicative inverse, when one exists in this (possibly truncated) ring.
    fn inverse(&self) -> Option<Self>;

    fn zero() -> Self {
        Self::from_rational(<BigRational as num_traits::Zero>::zero())
    }

    fn one() -> Self {
        Self::from_rational(<BigRational as num_traits::One>::one())
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl Coeff for BigRational {
    fn from_rational(r: BigRational) -> Self {
        r
    }

    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn negated(&self) -> Self {
        -self
    }

    fn scaled(&self, r: &BigRational) -> Self {
        self * r
    }

    fn inverse(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
