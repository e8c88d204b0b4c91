use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use super::{int, Coeff};

/// Order of a series that is known exactly (a polynomial, nothing discarded).
pub const EXACT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("series must have zero constant term")]
    NonzeroConstant,
    #[error("logarithm needs constant term 1")]
    ConstantNotOne,
    #[error("linear coefficient is zero, series has no compositional inverse")]
    ZeroLinearTerm,
    #[error("result would be an infinite series; give the operand a finite order")]
    Unbounded,
}

/// A power series in one variable, known modulo `var^order`.
///
/// Storage is sparse: zero coefficients and exponents `>= order` are never
/// kept. Binary operations produce a result valid to the smaller of the two
/// orders.
#[derive(Clone, PartialEq)]
pub struct Series<C> {
    var: Arc<str>,
    order: usize,
    coeffs: BTreeMap<usize, C>,
}

fn merge_var(a: &Arc<str>, b: &Arc<str>) -> Arc<str> {
    if a.is_empty() {
        b.clone()
    } else if b.is_empty() || a == b {
        a.clone()
    } else {
        panic!("series in different variables `{a}` and `{b}` cannot be combined")
    }
}

impl<C: Coeff> Series<C> {
    /// The zero series in `var`, valid modulo `var^order`.
    pub fn zero_in(var: &str, order: usize) -> Self {
        Self {
            var: Arc::from(var),
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs<I>(var: &str, order: usize, coeffs: I) -> Self
    where
        I: IntoIterator<Item = (usize, C)>,
    {
        let mut s = Self::zero_in(var, order);
        for (e, c) in coeffs {
            if e < order && !c.is_zero() {
                let slot = s.coeffs.entry(e).or_insert_with(C::zero);
                *slot = slot.plus(&c);
                if slot.is_zero() {
                    s.coeffs.remove(&e);
                }
            }
        }
        s
    }

    /// Dense constructor: `coeffs[i]` is the coefficient of `var^i`.
    pub fn from_dense(var: &str, order: usize, coeffs: Vec<C>) -> Self {
        Self::from_coeffs(var, order, coeffs.into_iter().enumerate())
    }

    pub fn constant(var: &str, c: C, order: usize) -> Self {
        Self::from_coeffs(var, order, [(0, c)])
    }

    /// The series `var` itself.
    pub fn variable(var: &str, order: usize) -> Self {
        Self::from_coeffs(var, order, [(1, C::one())])
    }

    /// `c * var^e`.
    pub fn monomial(var: &str, c: C, e: usize, order: usize) -> Self {
        Self::from_coeffs(var, order, [(e, c)])
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    pub fn coeff(&self, e: usize) -> Option<&C> {
        self.coeffs.get(&e)
    }

    pub fn coeff_or_zero(&self, e: usize) -> C {
        self.coeffs.get(&e).cloned().unwrap_or_else(C::zero)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &C)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.keys().next().copied()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            var: self.var.clone(),
            order,
            coeffs: self
                .coeffs
                .range(..order)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn with_var(&self, var: &str) -> Self {
        Self {
            var: Arc::from(var),
            ..self.clone()
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series::from_coeffs(&self.var, self.order, self.coeffs.iter().map(|(e, c)| (*e, f(c))))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.plus(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.minus(b))
    }

    fn combine(&self, other: &Self, op: impl Fn(&C, &C) -> C) -> Self {
        let order = self.order.min(other.order);
        let var = merge_var(&self.var, &other.var);
        let zero = C::zero();
        let mut out = BTreeMap::new();
        let keys: std::collections::BTreeSet<usize> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .filter(|e| *e < order)
            .collect();
        for e in keys {
            let a = self.coeffs.get(&e).unwrap_or(&zero);
            let b = other.coeffs.get(&e).unwrap_or(&zero);
            let c = op(a, b);
            if !c.is_zero() {
                out.insert(e, c);
            }
        }
        Self {
            var,
            order,
            coeffs: out,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            var: self.var.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.negated())).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        self.map_coeffs(|c| c.scaled(r)).with_var(&self.var)
    }

    /// Multiply every coefficient by a ring element.
    pub fn scale_by(&self, c: &C) -> Self {
        self.map_coeffs(|a| a.times(c)).with_var(&self.var)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let var = merge_var(&self.var, &other.var);
        let mut out: BTreeMap<usize, C> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            if *i >= order {
                break;
            }
            for (j, b) in &other.coeffs {
                let e = match i.checked_add(*j) {
                    Some(e) if e < order => e,
                    _ => break,
                };
                let p = a.times(b);
                match out.get_mut(&e) {
                    Some(slot) => *slot = slot.plus(&p),
                    None => {
                        out.insert(e, p);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self {
            var,
            order,
            coeffs: out,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(&self.var, C::one(), self.order);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        Self::constant(&self.var, C::one(), self.order).div(self)
    }

    /// Exact quotient `self / other`, valid to the smaller order.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let b0_inv = other
            .coeff(0)
            .and_then(Coeff::inverse)
            .ok_or(SeriesError::NotInvertible)?;
        let order = self.order.min(other.order);
        let var = merge_var(&self.var, &other.var);
        if other.coeffs.len() == 1 {
            // pure constant divisor
            let q = self.scale_by(&b0_inv).truncate(order);
            return Ok(Self { var, order, coeffs: q.coeffs });
        }
        if order == EXACT {
            return Err(SeriesError::Unbounded);
        }
        let mut out: Vec<C> = Vec::with_capacity(order);
        let higher: Vec<(usize, &C)> = other.terms().filter(|(e, _)| *e > 0).collect();
        for n in 0..order {
            let mut acc = self.coeff_or_zero(n);
            for (k, bk) in &higher {
                if *k > n {
                    break;
                }
                let prev = &out[n - k];
                if !prev.is_zero() {
                    acc = acc.minus(&bk.times(prev));
                }
            }
            out.push(acc.times(&b0_inv));
        }
        Ok(Self::from_dense(&var, order, out))
    }

    /// Substitute `inner` for the variable: `self(inner(y))`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if inner.coeff(0).is_some() {
            return Err(SeriesError::NonzeroConstant);
        }
        let order = self.order.min(inner.order);
        let top = match self.coeffs.keys().next_back() {
            Some(t) => *t,
            None => return Ok(Self::zero_in(&inner.var, order)),
        };
        // Horner from the top down
        let mut acc = Self::zero_in(&inner.var, order);
        for e in (0..=top).rev() {
            acc = acc.mul(inner).truncate(order);
            if let Some(c) = self.coeffs.get(&e) {
                acc = acc.add(&Self::constant(&inner.var, c.clone(), order));
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let order = if self.order == EXACT { EXACT } else { self.order.saturating_sub(1) };
        Self::from_coeffs(
            &self.var,
            order,
            self.coeffs
                .iter()
                .filter(|(e, _)| **e > 0)
                .map(|(e, c)| (e - 1, c.scaled(&int(*e as i64)))),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let order = if self.order == EXACT { EXACT } else { self.order + 1 };
        Self::from_coeffs(
            &self.var,
            order,
            self.coeffs
                .iter()
                .map(|(e, c)| (e + 1, c.scaled(&BigRational::new(1.into(), (*e as i64 + 1).into())))),
        )
    }

    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.coeff(0).is_some() {
            return Err(SeriesError::NonzeroConstant);
        }
        if self.is_zero() {
            return Ok(Self::constant(&self.var, C::one(), self.order));
        }
        if self.order == EXACT {
            return Err(SeriesError::Unbounded);
        }
        // b' = a' b  =>  n b_n = sum_k k a_k b_{n-k}
        let n_max = self.order;
        let mut b: Vec<C> = vec![C::one()];
        let terms: Vec<(usize, &C)> = self.terms().collect();
        for n in 1..n_max {
            let mut acc = C::zero();
            for (k, ak) in &terms {
                if *k > n {
                    break;
                }
                let prev = &b[n - k];
                if !prev.is_zero() {
                    acc = acc.plus(&ak.times(prev).scaled(&int(*k as i64)));
                }
            }
            b.push(acc.scaled(&BigRational::new(1.into(), (n as i64).into())));
        }
        Ok(Self::from_dense(&self.var, n_max, b))
    }

    pub fn log(&self) -> Result<Self, SeriesError> {
        match self.coeff(0) {
            Some(c) if c.minus(&C::one()).is_zero() => {}
            _ => return Err(SeriesError::ConstantNotOne),
        }
        if self.coeffs.len() == 1 {
            return Ok(Self::zero_in(&self.var, self.order));
        }
        if self.order == EXACT {
            return Err(SeriesError::Unbounded);
        }
        let q = self.derivative().div(&self.truncate(self.order - 1))?;
        Ok(q.integral().truncate(self.order))
    }

    /// Compositional inverse `b` with `self(b(x)) = x` to the working order.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if self.coeff(0).is_some() {
            return Err(SeriesError::NonzeroConstant);
        }
        let lin = self.coeff(1).ok_or(SeriesError::ZeroLinearTerm)?;
        let lin_inv = lin.inverse().ok_or(SeriesError::ZeroLinearTerm)?;
        if self.order == EXACT && self.coeffs.len() > 1 {
            return Err(SeriesError::Unbounded);
        }
        let order = self.order;
        // a = lin * (x + h(x)); solve b = x - h(b) for the normalized series,
        // each pass fixes one more coefficient.
        let normalized = self.scale_by(&lin_inv);
        let x = Self::variable(&self.var, order);
        let h = normalized.sub(&x);
        let mut b = x.clone();
        let passes = if order == EXACT { 1 } else { order };
        for _ in 0..passes {
            let next = x.sub(&h.compose(&b)?);
            if next == b {
                break;
            }
            b = next;
        }
        // undo the normalization: a(y) = lin * n(y) = x  =>  y = b(x / lin)
        let scaled_x = Self::monomial(&self.var, lin_inv, 1, order);
        b.compose(&scaled_x)
    }
}

impl<C: Coeff> Coeff for Series<C> {
    fn from_rational(r: BigRational) -> Self {
        Self::constant("", C::from_rational(r), EXACT)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }

    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }

    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn negated(&self) -> Self {
        self.neg()
    }

    fn scaled(&self, r: &BigRational) -> Self {
        self.scale(r)
    }

    fn inverse(&self) -> Option<Self> {
        Series::inverse(self).ok()
    }
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var: &str = if self.var.is_empty() { "_" } else { &self.var };
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})*{var}^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.order != EXACT {
            write!(f, " + O({var}^{})", self.order)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    type S = Series<BigRational>;

    fn s(order: usize, c: &[i64]) -> S {
        S::from_dense("x", order, c.iter().map(|v| int(*v)).collect())
    }

    #[test]
    fn geometric_series_by_division() {
        let one = s(4, &[1]);
        let d = s(4, &[1, -1]);
        assert_eq!(one.div(&d).unwrap(), s(4, &[1, 1, 1, 1]));
    }

    #[test]
    fn self_division_is_one() {
        let a = s(6, &[1, 1]);
        assert_eq!(a.div(&a).unwrap(), s(6, &[1]));
    }

    #[test]
    fn division_rejects_zero_constant() {
        assert_eq!(s(4, &[1]).div(&s(4, &[0, 1])), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn mercator_series() {
        let l = s(4, &[1, 1]).log().unwrap();
        let expected = S::from_dense("x", 4, vec![int(0), int(1), rat(-1, 2), rat(1, 3)]);
        assert_eq!(l, expected);
    }

    #[test]
    fn exp_of_zero_and_inverse_pair() {
        assert_eq!(s(8, &[]).exp().unwrap(), s(8, &[1]));
        let a = s(8, &[1, 1]);
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
    }

    #[test]
    fn exp_log_preconditions() {
        assert_eq!(s(4, &[1, 1]).exp(), Err(SeriesError::NonzeroConstant));
        assert_eq!(s(4, &[2, 1]).log(), Err(SeriesError::ConstantNotOne));
    }

    #[test]
    fn compose_rejects_constant_term() {
        assert_eq!(s(4, &[0, 1]).compose(&s(4, &[1, 1])), Err(SeriesError::NonzeroConstant));
    }

    #[test]
    fn revert_examples() {
        assert_eq!(s(6, &[0, 1]).revert().unwrap(), s(6, &[0, 1]));
        assert_eq!(s(4, &[0, 1, 1]).revert().unwrap(), s(4, &[0, 1, -1, 2]));
        assert_eq!(s(4, &[0, 0, 1]).revert(), Err(SeriesError::ZeroLinearTerm));
    }

    #[test]
    fn revert_with_nonunit_linear_term() {
        let a = s(7, &[0, 3, 2, -1]);
        let b = a.revert().unwrap();
        assert_eq!(a.compose(&b).unwrap(), s(7, &[0, 1]));
        assert_eq!(b.compose(&a).unwrap(), s(7, &[0, 1]));
    }

    #[test]
    fn order_is_minimum_of_operands() {
        let a = s(5, &[1, 2, 3, 4, 5]);
        let b = s(3, &[1, 1]);
        assert_eq!(a.mul(&b).order(), 3);
        assert_eq!(a.add(&b).order(), 3);
        assert!(a.mul(&b).terms().all(|(e, _)| e < 3));
    }

    #[test]
    fn zeros_are_not_stored() {
        let a = s(5, &[1, 1]);
        let b = s(5, &[0, -1]);
        let c = a.add(&b);
        assert_eq!(c.terms().count(), 1);
    }

    #[test]
    fn nested_series_coefficients() {
        // (1 + q x) / (1 - q x) with q-series coefficients
        type N = Series<S>;
        let q = S::variable("q", 5);
        let one = S::one();
        let num = N::from_dense("x", 4, vec![one.clone(), q.clone()]);
        let den = N::from_dense("x", 4, vec![one, q.neg()]);
        let r = num.div(&den).unwrap();
        // 1 + 2 q x + 2 q^2 x^2 + 2 q^3 x^3
        for e in 1..4 {
            let c = r.coeff_or_zero(e);
            assert_eq!(c.coeff_or_zero(e), int(2));
            assert_eq!(c.terms().count(), 1);
        }
    }
}
