//! Genus-0 mirror computations for toric targets.
//!
//! [`hg_series`] builds the hypergeometric series of a toric manifold twisted
//! by a split bundle. For one-parameter Calabi–Yau threefold data,
//! [`cy3_pipeline`] turns its H-expansion into the mirror map, the prepotential
//! and the genus-0 invariants `K⁰_d`, and [`toric_identity_check`] verifies the
//! integrated identity relating the series to `2Φ − Σ T_j ∂Φ/∂T_j`.

mod identity;
mod pipeline;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{int, BigRational, GradedPolynomial, Series, SeriesError, Variable};

pub use identity::{toric_identity_check, IdentityReport};
pub use pipeline::{cy3_pipeline, instanton_extract, local_conifold, quintic_pipeline, GwSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MirrorError {
    #[error("invalid toric target: {0}")]
    InvalidTarget(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("denominator at degree {degree:?} has no invertible part; check the divisor classes")]
    NilpotentDivision { degree: Vec<u32> },
    #[error("Euler class has degree {euler_degree}, but the pairing needs degree {expected}")]
    DegreeMismatch { euler_degree: u32, expected: u32 },
    #[error("bundle does not satisfy the Calabi-Yau condition c1(X) = c1(V+) - c1(V-)")]
    NotCalabiYau,
    #[error("{0}")]
    Unsupported(String),
    #[error("q-order must be at least {min}, got {got}")]
    BadOrder { got: usize, min: usize },
    #[error("series operation failed: {0}")]
    Series(#[from] SeriesError),
    #[error("unexpected structure: {0}")]
    StructureViolation(String),
}

/// Sign of the exponential prefactor and of the shifts in the factor products.
///
/// `Minus` is the general toric form `e^{−H·t} ∏(c₁(L) − k) / ∏(D − k)`;
/// `Plus` is the quintic form `e^{H·t} ∏(c₁(L) + k) / ∏(D + k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Minus,
    Plus,
}

impl Convention {
    pub fn sign(self) -> i64 {
        match self {
            Convention::Minus => -1,
            Convention::Plus => 1,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Minus => "minus",
            Convention::Plus => "plus",
        })
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "minus" | "-" => Ok(Convention::Minus),
            "plus" | "+" => Ok(Convention::Plus),
            other => Err(format!("unknown convention `{other}` (expected `minus` or `plus`)")),
        }
    }
}

/// A toric manifold presented by its Kähler classes `H₁..H_n`, toric divisors
/// as linear forms in them, monomial relations, and the top-degree pairing.
///
/// Curve degrees `d` are written in the basis dual to `H₁..H_n`, so the
/// effective classes are those with every `d_i ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricTarget {
    name: String,
    kahler_rank: usize,
    divisors: Vec<Vec<i64>>,
    relations: Vec<Vec<u32>>,
    top_degree: u32,
    pairing: BTreeMap<Vec<u32>, BigRational>,
}

impl ToricTarget {
    pub fn new(
        name: impl Into<String>,
        kahler_rank: usize,
        divisors: Vec<Vec<i64>>,
        relations: Vec<Vec<u32>>,
        top_degree: u32,
        pairing: BTreeMap<Vec<u32>, BigRational>,
    ) -> Result<Self, MirrorError> {
        if kahler_rank == 0 {
            return Err(MirrorError::InvalidTarget("Kähler rank must be positive".into()));
        }
        if divisors.is_empty() {
            return Err(MirrorError::InvalidTarget("at least one toric divisor is needed".into()));
        }
        if let Some(d) = divisors.iter().find(|d| d.len() != kahler_rank) {
            return Err(MirrorError::InvalidTarget(format!(
                "divisor {d:?} has {} entries, expected {kahler_rank}",
                d.len()
            )));
        }
        if let Some(r) = relations.iter().find(|r| r.len() != kahler_rank || r.iter().all(|e| *e == 0)) {
            return Err(MirrorError::InvalidTarget(format!("bad relation monomial {r:?}")));
        }
        if pairing.is_empty() {
            return Err(MirrorError::InvalidTarget("pairing table is empty".into()));
        }
        for m in pairing.keys() {
            if m.len() != kahler_rank || m.iter().sum::<u32>() != top_degree {
                return Err(MirrorError::InvalidTarget(format!(
                    "pairing monomial {m:?} is not of top degree {top_degree}"
                )));
            }
        }
        Ok(Self { name: name.into(), kahler_rank, divisors, relations, top_degree, pairing })
    }

    /// `Pⁿ`: `n+1` divisors equal to `H`, `H^{n+1} = 0`, `∫ Hⁿ = 1`.
    pub fn projective_space(n: u32) -> Self {
        let mut pairing = BTreeMap::new();
        pairing.insert(vec![n], BigRational::one());
        Self::new(format!("P{n}"), 1, vec![vec![1]; n as usize + 1], vec![vec![n + 1]], n, pairing)
            .expect("projective space data is valid")
    }

    /// `P¹` viewed through the total space of a rank-2 bundle over it: the
    /// ring `Q[H]/(H⁴)` with `∫ H³ = 1`, so that concave factors in the
    /// summands carry the Euler class of the fibre directions.
    pub fn local_p1() -> Self {
        let mut pairing = BTreeMap::new();
        pairing.insert(vec![3], BigRational::one());
        Self::new("local P1", 1, vec![vec![1], vec![1]], vec![vec![4]], 3, pairing)
            .expect("local P1 data is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kahler_rank(&self) -> usize {
        self.kahler_rank
    }

    pub fn divisors(&self) -> &[Vec<i64>] {
        &self.divisors
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn variables(&self) -> Vec<Variable> {
        if self.kahler_rank == 1 {
            vec![Variable::new("H", 1)]
        } else {
            (1..=self.kahler_rank).map(|i| Variable::new(format!("H{i}"), 1)).collect()
        }
    }

    /// `c₁(X) = Σ_a D_a`.
    pub fn c1(&self) -> Vec<i64> {
        (0..self.kahler_rank).map(|i| self.divisors.iter().map(|d| d[i]).sum()).collect()
    }

    /// A linear form `Σ a_i H_i` as a ring element.
    pub fn linear(&self, form: &[i64]) -> GradedPolynomial<BigRational> {
        let vars = self.variables();
        GradedPolynomial::from_terms(
            &vars,
            Some(self.top_degree),
            form.iter().enumerate().map(|(i, a)| {
                let mut e = vec![0; self.kahler_rank];
                e[i] = 1;
                (e, int(*a))
            }),
        )
    }

    pub fn one(&self) -> GradedPolynomial<BigRational> {
        GradedPolynomial::constant(&self.variables(), Some(self.top_degree), BigRational::one())
    }

    /// Apply the monomial relations.
    pub fn reduce(&self, p: &GradedPolynomial<BigRational>) -> GradedPolynomial<BigRational> {
        if self.relations.is_empty() {
            p.clone()
        } else {
            p.reduce_monomials(&self.relations)
        }
    }

    pub fn mul(
        &self,
        a: &GradedPolynomial<BigRational>,
        b: &GradedPolynomial<BigRational>,
    ) -> GradedPolynomial<BigRational> {
        self.reduce(&a.mul(b))
    }

    /// `∫_X p`: the top-degree part paired through the table; monomials not
    /// listed pair to zero.
    pub fn integrate(&self, p: &GradedPolynomial<BigRational>) -> BigRational {
        self.pairing
            .iter()
            .map(|(m, v)| p.coeff(m) * v)
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Pairing of a top-degree monomial, zero when absent from the table.
    pub fn pairing_of(&self, monomial: &[u32]) -> BigRational {
        self.pairing.get(monomial).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// A split bundle `V = ⊕ L_j ⊕ ⊕ M_k`: convex factors `L_j` with
/// `c₁(L_j) ≥ 0` on effective classes, concave factors `M_k` negative on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleSpec {
    convex: Vec<Vec<i64>>,
    concave: Vec<Vec<i64>>,
}

impl BundleSpec {
    /// Checks positivity against the generators `e_i` of the effective cone.
    pub fn new(target: &ToricTarget, convex: Vec<Vec<i64>>, concave: Vec<Vec<i64>>) -> Result<Self, MirrorError> {
        let n = target.kahler_rank();
        for c in convex.iter().chain(&concave) {
            if c.len() != n {
                return Err(MirrorError::InvalidBundle(format!("class {c:?} has {} entries, expected {n}", c.len())));
            }
        }
        if let Some(c) = convex.iter().find(|c| c.iter().any(|a| *a < 0)) {
            return Err(MirrorError::InvalidBundle(format!("{c:?} is negative on an effective class")));
        }
        if let Some(c) = concave.iter().find(|c| c.iter().any(|a| *a >= 0)) {
            return Err(MirrorError::InvalidBundle(format!("{c:?} is not negative on every effective class")));
        }
        Ok(Self { convex, concave })
    }

    /// `O(5)` on `P⁴`.
    pub fn quintic() -> Self {
        Self { convex: vec![vec![5]], concave: vec![] }
    }

    /// `O(−1) ⊕ O(−1)` on `P¹`.
    pub fn conifold() -> Self {
        Self { convex: vec![], concave: vec![vec![-1], vec![-1]] }
    }

    pub fn convex(&self) -> &[Vec<i64>] {
        &self.convex
    }

    pub fn concave(&self) -> &[Vec<i64>] {
        &self.concave
    }

    /// Euler class of the convex part, `∏_j c₁(L_j)`.
    pub fn euler_class(&self, target: &ToricTarget) -> GradedPolynomial<BigRational> {
        self.convex
            .iter()
            .fold(target.one(), |acc, c| target.mul(&acc, &target.linear(c)))
    }

    /// `c₁(X) = c₁(V₊) − c₁(V₋)`: a complete intersection cut out by the convex
    /// part inside the total space of the concave part has trivial canonical class.
    pub fn is_calabi_yau(&self, target: &ToricTarget) -> bool {
        let n = target.kahler_rank();
        let mut c = vec![0i64; n];
        for l in &self.convex {
            for i in 0..n {
                c[i] += l[i];
            }
        }
        for l in &self.concave {
            for i in 0..n {
                c[i] -= l[i];
            }
        }
        c == target.c1()
    }
}

/// Summands of the hypergeometric series, one ring element per effective degree.
#[derive(Debug, Clone, PartialEq)]
pub struct HgSeries {
    pub convention: Convention,
    pub cutoff: usize,
    target: ToricTarget,
    euler: GradedPolynomial<BigRational>,
    terms: BTreeMap<Vec<u32>, GradedPolynomial<BigRational>>,
    reduced: BTreeMap<Vec<u32>, GradedPolynomial<BigRational>>,
}

impl HgSeries {
    pub fn target(&self) -> &ToricTarget {
        &self.target
    }

    /// Euler class of the convex part (the `k = 0` convex factors).
    pub fn euler_class(&self) -> &GradedPolynomial<BigRational> {
        &self.euler
    }

    /// Full summand of `e^{d·t}`, without the exponential prefactor.
    pub fn term(&self, degree: &[u32]) -> Option<&GradedPolynomial<BigRational>> {
        self.terms.get(degree)
    }

    /// Summand with the `k = 0` convex factors left out.
    pub fn reduced_term(&self, degree: &[u32]) -> Option<&GradedPolynomial<BigRational>> {
        self.reduced.get(degree)
    }

    pub fn degrees(&self) -> impl Iterator<Item = &[u32]> {
        self.terms.keys().map(|d| d.as_slice())
    }

    /// For one Kähler class: `Σ_d [H^m](term_d) q^d` modulo `q^{cutoff+1}`.
    pub fn h_coefficient(&self, m: u32) -> Result<Series<BigRational>, MirrorError> {
        self.require_one_parameter()?;
        Ok(Series::from_coeffs(
            "q",
            self.cutoff + 1,
            self.terms.iter().map(|(d, p)| (d[0] as usize, p.coeff(&[m]))),
        ))
    }

    /// The whole series `e^{±H t} Σ_d term_d q^d` for one Kähler class, as a
    /// polynomial in `H` and `t` with `q`-series coefficients.
    pub fn expanded(&self) -> Result<GradedPolynomial<Series<BigRational>>, MirrorError> {
        self.require_one_parameter()?;
        let vars = [Variable::new("H", 1), Variable::new("t", 1)];
        let order = self.cutoff + 1;
        let top = self.target.top_degree;
        let mut body = GradedPolynomial::zero(&vars, None);
        for m in 0..=top {
            let c = self.h_coefficient(m)?;
            body = body.add(&GradedPolynomial::from_terms(&vars, None, [(vec![m, 0], c)]));
        }
        let s = self.convention.sign();
        let mut prefactor = GradedPolynomial::zero(&vars, None);
        let mut fact = BigRational::one();
        for k in 0..=top {
            if k > 0 {
                fact *= int(i64::from(k));
            }
            let coeff = int(s.pow(k)) / &fact;
            prefactor = prefactor.add(&GradedPolynomial::from_terms(
                &vars,
                None,
                [(vec![k, k], Series::constant("q", coeff, order))],
            ));
        }
        Ok(body.mul(&prefactor).reduce_monomials(&[vec![top + 1, 0]]))
    }

    fn require_one_parameter(&self) -> Result<(), MirrorError> {
        if self.target.kahler_rank != 1 {
            return Err(MirrorError::Unsupported(
                "q-expansion is implemented for one Kähler parameter".into(),
            ));
        }
        Ok(())
    }
}

fn degree_vectors(n: usize, cutoff: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, cutoff as u32, &mut cur, &mut out);
    out
}

fn pair(class: &[i64], d: &[u32]) -> i64 {
    class.iter().zip(d).map(|(a, b)| a * i64::from(*b)).sum()
}

/// `c + shift` as a ring element.
fn shifted(target: &ToricTarget, class: &[i64], shift: i64) -> GradedPolynomial<BigRational> {
    target.linear(class).add(&target.one().scale(&int(shift)))
}

/// Summand of degree `d`; returns `(reduced, full)`.
fn summand(
    target: &ToricTarget,
    bundle: &BundleSpec,
    d: &[u32],
    convention: Convention,
) -> Result<(GradedPolynomial<BigRational>, GradedPolynomial<BigRational>), MirrorError> {
    let s = convention.sign();
    let mut num = target.one();
    let mut euler = target.one();
    for c in bundle.convex() {
        let e = pair(c, d);
        for k in 1..=e {
            num = target.mul(&num, &shifted(target, c, s * k));
        }
        euler = target.mul(&euler, &target.linear(c));
    }
    for c in bundle.concave() {
        let e = -pair(c, d);
        for k in 0..e {
            num = target.mul(&num, &shifted(target, c, -s * k));
        }
    }
    let mut den = target.one();
    for dv in target.divisors() {
        let m = pair(dv, d);
        if m >= 0 {
            for k in 1..=m {
                den = target.mul(&den, &shifted(target, dv, s * k));
            }
        } else {
            for k in 0..-m {
                num = target.mul(&num, &shifted(target, dv, -s * k));
            }
        }
    }
    let inv = target
        .reduce(&den)
        .inverse()
        .ok_or_else(|| MirrorError::NilpotentDivision { degree: d.to_vec() })?;
    let reduced = target.mul(&num, &inv);
    let full = target.mul(&reduced, &euler);
    Ok((reduced, full))
}

/// Hypergeometric series of `(X, V)` up to total curve degree `cutoff`.
///
/// Each summand is the product of the bundle factors over the divisor factors,
/// computed exactly in the cohomology ring of `X`; see [`Convention`] for the
/// two sign forms. Summands are independent and built in parallel.
pub fn hg_series(
    target: &ToricTarget,
    bundle: &BundleSpec,
    cutoff: usize,
    convention: Convention,
) -> Result<HgSeries, MirrorError> {
    let degrees = degree_vectors(target.kahler_rank(), cutoff);
    let rows: Vec<_> = degrees
        .par_iter()
        .map(|d| summand(target, bundle, d, convention).map(|r| (d.clone(), r)))
        .collect::<Result<_, _>>()?;
    let mut terms = BTreeMap::new();
    let mut reduced = BTreeMap::new();
    for (d, (r, f)) in rows {
        reduced.insert(d.clone(), r);
        terms.insert(d, f);
    }
    Ok(HgSeries {
        convention,
        cutoff,
        euler: bundle.euler_class(target),
        target: target.clone(),
        terms,
        reduced,
    })
}
