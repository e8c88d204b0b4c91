//! Intersection numbers on the Grassmannian `G(2, n)` of 2-planes in `Cⁿ`
//! (lines in `P^{n−1}`) via the Pieri rule.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A class in `H*(G(2,n))` as a combination of Schubert classes `σ_{a,b}`,
/// `n − 2 ≥ a ≥ b ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchubertClass {
    n: usize,
    terms: BTreeMap<(usize, usize), BigInt>,
}

impl SchubertClass {
    pub fn one(n: usize) -> Self {
        assert!(n >= 3);
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), BigInt::one());
        Self { n, terms }
    }

    fn add_term(&mut self, key: (usize, usize), c: BigInt) {
        let slot = self.terms.entry(key).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn width(&self) -> usize {
        self.n - 2
    }

    /// Product with `σ₁ = c₁(S*)`: add one box in every admissible way.
    pub fn times_sigma1(&self) -> Self {
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (&(a, b), c) in &self.terms {
            if a < self.width() {
                out.add_term((a + 1, b), c.clone());
            }
            if b < a {
                out.add_term((a, b + 1), c.clone());
            }
        }
        out
    }

    /// Product with `σ_{1,1} = c₂(S*)`: one box in each row.
    pub fn times_sigma11(&self) -> Self {
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (&(a, b), c) in &self.terms {
            if a < self.width() {
                out.add_term((a + 1, b + 1), c.clone());
            }
        }
        out
    }

    /// Coefficient of the point class `σ_{n−2,n−2}`.
    pub fn degree(&self) -> BigInt {
        self.terms.get(&(self.width(), self.width())).cloned().unwrap_or_default()
    }
}

/// `∫_{G(2,n)} σ₁^i σ_{1,1}^j`.
pub fn integrate_monomial(n: usize, i: usize, j: usize) -> BigInt {
    let mut c = SchubertClass::one(n);
    for _ in 0..i {
        c = c.times_sigma1();
    }
    for _ in 0..j {
        c = c.times_sigma11();
    }
    if i + 2 * j == 2 * (n - 2) {
        c.degree()
    } else {
        BigInt::zero()
    }
}

/// Polynomial in the Chern roots `x₁, x₂`, stored as `coeffs[(p, q)]` for `x₁^p x₂^q`.
type RootPoly = BTreeMap<(usize, usize), BigInt>;

fn mul_linear(p: &RootPoly, a: i64, b: i64) -> RootPoly {
    let mut out = RootPoly::new();
    for (&(i, j), c) in p {
        if a != 0 {
            *out.entry((i + 1, j)).or_insert_with(BigInt::zero) += c * a;
        }
        if b != 0 {
            *out.entry((i, j + 1)).or_insert_with(BigInt::zero) += c * b;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Rewrite a symmetric polynomial in `x₁, x₂` in terms of `e₁ = x₁ + x₂`, `e₂ = x₁x₂`.
fn to_elementary(mut p: RootPoly) -> BTreeMap<(usize, usize), BigInt> {
    let mut out = BTreeMap::new();
    while let Some((&(i, j), c)) = p.iter().next_back() {
        // leading term x₁^i x₂^j with i ≥ j comes from e₁^{i−j} e₂^j
        assert!(i >= j, "polynomial is not symmetric");
        let c = c.clone();
        out.insert((i - j, j), c.clone());
        let mut m = RootPoly::new();
        m.insert((0, 0), c);
        for _ in 0..(i - j) {
            m = mul_linear(&m, 1, 1);
        }
        for _ in 0..j {
            m = m.into_iter().map(|((a, b), c)| ((a + 1, b + 1), c)).collect();
        }
        for (k, v) in m {
            let slot = p.entry(k).or_insert_with(BigInt::zero);
            *slot -= v;
            if slot.is_zero() {
                p.remove(&k);
            }
        }
    }
    out
}

/// Euler number of `Sym^k S*` on `G(2, n)`, the number of lines on a general
/// hypersurface of degree `k` in `P^{n−1}` when `k + 1 = 2(n − 2)`.
pub fn euler_sym_dual_tautological(n: usize, k: usize) -> BigInt {
    assert_eq!(k + 1, 2 * (n - 2), "rank of Sym^k S* must equal dim G(2, n)");
    let mut p = RootPoly::new();
    p.insert((0, 0), BigInt::one());
    for a in 0..=k as i64 {
        p = mul_linear(&p, a, k as i64 - a);
    }
    to_elementary(p)
        .into_iter()
        .map(|((i, j), c)| c * integrate_monomial(n, i, j))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plucker_degree() {
        assert_eq!(integrate_monomial(4, 4, 0), BigInt::from(2));
        assert_eq!(integrate_monomial(5, 6, 0), BigInt::from(5));
    }

    #[test]
    fn lines_on_cubic_surface() {
        assert_eq!(euler_sym_dual_tautological(4, 3), BigInt::from(27));
    }

    #[test]
    fn lines_on_quintic() {
        assert_eq!(euler_sym_dual_tautological(5, 5), BigInt::from(2875));
    }
}
