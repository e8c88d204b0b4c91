use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{int, Coeff};

/// A formal variable with a positive cohomological degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub degree: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        assert!(degree > 0, "graded variables need positive degree");
        Self {
            name: name.into(),
            degree,
        }
    }
}

/// Polynomial in graded variables, optionally truncated above a total degree.
///
/// Monomials are exponent vectors with one entry per variable. A polynomial
/// with no variables is a context-free constant and combines with any other.
#[derive(Clone, PartialEq)]
pub struct GradedPolynomial<C> {
    vars: Arc<[Variable]>,
    cap: Option<u32>,
    terms: BTreeMap<Vec<u32>, C>,
}

fn merge_cap(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coeff> GradedPolynomial<C> {
    pub fn zero(vars: &[Variable], cap: Option<u32>) -> Self {
        Self {
            vars: Arc::from(vars),
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[Variable], cap: Option<u32>, c: C) -> Self {
        Self::from_terms(vars, cap, [(vec![0; vars.len()], c)])
    }

    /// The `i`-th variable as a polynomial.
    pub fn var(vars: &[Variable], cap: Option<u32>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::from_terms(vars, cap, [(e, C::one())])
    }

    pub fn from_terms<I>(vars: &[Variable], cap: Option<u32>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut p = Self::zero(vars, cap);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
            if c.is_zero() || !p.within_cap(&e) {
                continue;
            }
            let slot = p.terms.entry(e.clone()).or_insert_with(C::zero);
            *slot = slot.plus(&c);
            if slot.is_zero() {
                p.terms.remove(&e);
            }
        }
        p
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &C)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, monomial: &[u32]) -> C {
        if self.vars.is_empty() {
            return if monomial.iter().all(|e| *e == 0) {
                self.terms.get(&Vec::new()).cloned().unwrap_or_else(C::zero)
            } else {
                C::zero()
            };
        }
        self.terms.get(monomial).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_of(&self, monomial: &[u32]) -> u32 {
        monomial
            .iter()
            .zip(self.vars.iter())
            .map(|(e, v)| e * v.degree)
            .sum()
    }

    fn within_cap(&self, monomial: &[u32]) -> bool {
        self.cap.map_or(true, |c| self.degree_of(monomial) <= c)
    }

    /// Largest total degree present.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| self.degree_of(e)).max()
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        Self {
            vars: self.vars.clone(),
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.degree_of(e) == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn with_cap(&self, cap: Option<u32>) -> Self {
        Self::from_terms(&self.vars, cap, self.terms.iter().map(|(e, c)| (e.clone(), c.clone())))
    }

    /// Re-express a context-free constant over `vars`; otherwise check agreement.
    fn aligned(&self, vars: &Arc<[Variable]>) -> std::borrow::Cow<'_, Self> {
        if Arc::ptr_eq(&self.vars, vars) || *self.vars == **vars {
            std::borrow::Cow::Borrowed(self)
        } else if self.vars.is_empty() {
            std::borrow::Cow::Owned(Self {
                vars: vars.clone(),
                cap: self.cap,
                terms: self
                    .terms
                    .values()
                    .map(|c| (vec![0; vars.len()], c.clone()))
                    .collect(),
            })
        } else {
            panic!(
                "graded polynomials over different variable sets: {:?} vs {:?}",
                self.vars, vars
            )
        }
    }

    fn common_vars(&self, other: &Self) -> Arc<[Variable]> {
        if self.vars.is_empty() {
            other.vars.clone()
        } else {
            self.vars.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.plus(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.minus(b))
    }

    fn combine(&self, other: &Self, op: impl Fn(&C, &C) -> C) -> Self {
        let vars = self.common_vars(other);
        let a = self.aligned(&vars);
        let b = other.aligned(&vars);
        let cap = merge_cap(self.cap, other.cap);
        let zero = C::zero();
        let mut out = Self::zero(&vars, cap);
        let keys: std::collections::BTreeSet<&Vec<u32>> =
            a.terms.keys().chain(b.terms.keys()).collect();
        for e in keys {
            if !out.within_cap(e) {
                continue;
            }
            let c = op(a.terms.get(e).unwrap_or(&zero), b.terms.get(e).unwrap_or(&zero));
            if !c.is_zero() {
                out.terms.insert(e.clone(), c);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            cap: self.cap,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        self.map_coeffs(|c| c.scaled(r))
    }

    pub fn scale_by(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.times(k))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> GradedPolynomial<D> {
        GradedPolynomial::from_terms(
            &self.vars,
            self.cap,
            self.terms.iter().map(|(e, c)| (e.clone(), f(c))),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let vars = self.common_vars(other);
        let a = self.aligned(&vars);
        let b = other.aligned(&vars);
        let cap = merge_cap(self.cap, other.cap);
        let mut out = Self::zero(&vars, cap);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !out.within_cap(&e) {
                    continue;
                }
                let p = ca.times(cb);
                match out.terms.get_mut(&e) {
                    Some(slot) => *slot = slot.plus(&p),
                    None => {
                        out.terms.insert(e, p);
                    }
                }
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(&self.vars, self.cap, C::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drop every monomial divisible by one of `generators`.
    pub fn reduce_monomials(&self, generators: &[Vec<u32>]) -> Self {
        let divisible = |e: &[u32]| {
            generators
                .iter()
                .any(|g| g.iter().zip(e).all(|(gi, ei)| ei >= gi))
        };
        Self {
            vars: self.vars.clone(),
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| !divisible(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// `exp` of a polynomial without constant term; the positive-degree part
    /// is nilpotent under the cap so the series terminates.
    pub fn exp(&self) -> Option<Self> {
        if !self.constant_term().is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::constant(&self.vars, self.cap, C::one()));
        }
        self.cap?;
        let mut acc = Self::constant(&self.vars, self.cap, C::one());
        let mut term = acc.clone();
        let mut n = 1i64;
        loop {
            term = term.mul(self).scale(&BigRational::new(1.into(), n.into()));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
            n += 1;
        }
        Some(acc)
    }

    /// Inverse when the constant term is a unit and the rest is nilpotent.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.constant_term();
        let c0_inv = c0.inverse()?;
        let rest = self.sub(&Self::constant(&self.vars, self.cap, c0));
        if rest.is_zero() {
            return Some(Self::constant(&self.vars, self.cap, c0_inv));
        }
        self.cap?;
        // 1/(c0 (1 + u)) = c0^{-1} sum (-u)^n
        let u = rest.scale_by(&c0_inv).neg();
        let mut acc = Self::constant(&self.vars, self.cap, C::one());
        let mut term = acc.clone();
        loop {
            term = term.mul(&u);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Some(acc.scale_by(&c0_inv))
    }

    /// Replace variable `i` by `images[i]` (all images share one variable set).
    pub fn substitute(&self, images: &[GradedPolynomial<C>]) -> GradedPolynomial<C> {
        assert_eq!(images.len(), self.vars.len());
        let mut out = match images.first() {
            Some(img) => GradedPolynomial::zero(&img.vars, img.cap),
            None => return self.clone(),
        };
        for (e, c) in &self.terms {
            let mut m = GradedPolynomial::constant(&out.vars, out.cap, c.clone());
            for (img, k) in images.iter().zip(e) {
                if *k > 0 {
                    m = m.mul(&img.pow(*k));
                }
            }
            out = out.add(&m);
        }
        out
    }

    /// Evaluate at a point of the coefficient ring.
    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, k) in point.iter().zip(e) {
                for _ in 0..*k {
                    m = m.times(x);
                }
            }
            acc = acc.plus(&m);
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        Self::from_terms(
            &self.vars,
            self.cap,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut f = e.clone();
                f[i] -= 1;
                (f, c.scaled(&int(e[i] as i64)))
            }),
        )
    }
}

impl GradedPolynomial<BigRational> {
    /// Floating-point evaluation, used for insertion polynomials in numeric sums.
    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let coeff = c.to_f64().unwrap_or(f64::NAN);
                e.iter()
                    .zip(point)
                    .fold(coeff, |acc, (k, x)| acc * x.powi(*k as i32))
            })
            .sum()
    }
}

impl<C: Coeff> Coeff for GradedPolynomial<C> {
    fn from_rational(r: BigRational) -> Self {
        Self::constant(&[], None, C::from_rational(r))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
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
        GradedPolynomial::inverse(self)
    }
}

impl<C: Coeff> fmt::Debug for GradedPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for (k, v) in e.iter().zip(self.vars.iter()) {
                if *k > 0 {
                    write!(f, "*{}^{}", v.name, k)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    type P = GradedPolynomial<BigRational>;

    fn h_ring() -> Vec<Variable> {
        vec![Variable::new("H", 2)]
    }

    #[test]
    fn cap_discards_high_degree() {
        let vars = h_ring();
        let h = P::var(&vars, Some(4), 0);
        assert!(h.pow(3).is_zero());
        assert_eq!(h.pow(2).coeff(&[2]), int(1));
    }

    #[test]
    fn nilpotent_inverse() {
        let vars = h_ring();
        let h = P::var(&vars, Some(6), 0);
        // 1 / (1 - H) = 1 + H + H^2 + H^3
        let one = P::constant(&vars, Some(6), int(1));
        let inv = one.sub(&h).inverse().unwrap();
        for k in 0..4 {
            assert_eq!(inv.coeff(&[k]), int(1));
        }
    }

    #[test]
    fn exp_is_finite_sum() {
        let vars = h_ring();
        let h = P::var(&vars, Some(6), 0);
        let e = h.exp().unwrap();
        assert_eq!(e.coeff(&[3]), rat(1, 6));
        assert_eq!(e.terms().count(), 4);
    }

    #[test]
    fn context_free_constants_combine() {
        let vars = vec![Variable::new("p1", 4), Variable::new("p2", 8)];
        let p1 = P::var(&vars, Some(8), 0);
        let two = P::from_int(2);
        let s = p1.add(&two);
        assert_eq!(s.constant_term(), int(2));
        assert_eq!(s.vars().len(), 2);
        assert_eq!(p1.mul(&two).coeff(&[1, 0]), int(2));
    }

    #[test]
    fn substitution_and_monomial_reduction() {
        let vars = vec![Variable::new("a", 2), Variable::new("b", 2)];
        let a = P::var(&vars, None, 0);
        let b = P::var(&vars, None, 1);
        let sum = a.add(&b);
        let sq = sum.pow(2);
        let r = sq.reduce_monomials(&[vec![2, 0], vec![0, 2]]);
        assert_eq!(r.terms().count(), 1);
        assert_eq!(r.coeff(&[1, 1]), int(2));
        let x = vec![Variable::new("x", 2)];
        let xs = P::var(&x, None, 0);
        let swapped = sq.substitute(&[xs.clone(), xs.neg()]);
        assert!(swapped.is_zero());
    }
}
