//! Multiplicative sequences and genera.
//!
//! A genus is fixed by an even power series `Q(x)` with `Q(0) = 1`. Writing the
//! Pontryagin classes as elementary symmetric functions of `x_i^2`, the total
//! class `prod_i Q(x_i)` becomes a sequence of polynomials `K_j(p_1, ..., p_j)`
//! of degree `4j`. The genus of a `4k`-manifold is `K_k` paired with its
//! Pontryagin numbers.
//!
//! The Witten genus uses the same machinery with a characteristic series whose
//! coefficients are themselves power series in `q`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{int, rat, Coeff, GradedPolynomial, Series, SeriesError, Variable};

#[derive(Debug, Error, PartialEq)]
pub enum GenusError {
    #[error("characteristic series must have constant term 1")]
    ConstantTermNotOne,
    #[error("characteristic series has a nonzero odd coefficient at x^{0}")]
    OddTerm(usize),
    #[error("characteristic series known only to x^{known}, need x^{needed}")]
    InsufficientOrder { known: usize, needed: usize },
    #[error("dimension {0} is not a positive multiple of 4")]
    BadDimension(u32),
    #[error("no Pontryagin number given for partition {0:?}")]
    MissingPartition(Vec<u32>),
    #[error("the Witten genus needs a spin manifold")]
    NotSpin,
    #[error("degree k = {0} is outside the supported range 1..=3")]
    UnsupportedDegree(u32),
    #[error("cancellation system is inconsistent")]
    Inconsistent,
    #[error("cancellation system does not determine a unique solution")]
    Underdetermined,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Power series `Q(x)` defining a multiplicative genus.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSeries<C: Coeff> {
    series: Series<C>,
    even: bool,
}

impl<C: Coeff> CharacteristicSeries<C> {
    pub fn new(series: Series<C>) -> Result<Self, GenusError> {
        let c0 = series.coeff_or_zero(0);
        if !c0.minus(&C::one()).is_zero() {
            return Err(GenusError::ConstantTermNotOne);
        }
        let even = series.terms().all(|(e, _)| e % 2 == 0);
        Ok(Self { series, even })
    }

    pub fn series(&self) -> &Series<C> {
        &self.series
    }

    pub fn is_even(&self) -> bool {
        self.even
    }
}

impl CharacteristicSeries<BigRational> {
    /// `(x/2) / sinh(x/2)`, known modulo `x^order`.
    pub fn a_hat(order: usize) -> Self {
        // sinh(x/2)/(x/2) = sum (x/2)^{2n} / (2n+1)!
        let mut fact = BigInt::from(1);
        let mut dense = Vec::new();
        for e in 0..order {
            if e > 0 {
                fact *= BigInt::from(e as i64 + 1);
            }
            dense.push(if e % 2 == 0 {
                BigRational::new(1.into(), fact.clone() * BigInt::from(2).pow(e as u32))
            } else {
                int(0)
            });
        }
        let s = Series::from_dense("x", order, dense);
        Self::new(s.inverse().expect("unit constant term")).expect("Q(0) = 1")
    }

    /// `x / tanh(x)`, known modulo `x^order`.
    pub fn l_genus(order: usize) -> Self {
        // cosh(x) / (sinh(x)/x)
        let mut fact = BigInt::from(1);
        let mut cosh = Vec::new();
        let mut sinc = Vec::new();
        for e in 0..order {
            if e > 0 {
                fact *= BigInt::from(e as i64);
            }
            let even = e % 2 == 0;
            cosh.push(if even { BigRational::new(1.into(), fact.clone()) } else { int(0) });
            sinc.push(if even {
                BigRational::new(1.into(), fact.clone() * BigInt::from(e as i64 + 1))
            } else {
                int(0)
            });
        }
        let q = Series::from_dense("x", order, cosh)
            .div(&Series::from_dense("x", order, sinc))
            .expect("unit constant term");
        Self::new(q).expect("Q(0) = 1")
    }

    /// A custom genus from its coefficients `[1, q_1, q_2, ...]`.
    pub fn from_coefficients(coeffs: Vec<BigRational>) -> Result<Self, GenusError> {
        let order = coeffs.len();
        Self::new(Series::from_dense("x", order, coeffs))
    }
}

/// Pontryagin classes `p_1..p_k` as graded variables (degree `4i`).
pub fn pontryagin_vars(k: u32) -> Vec<Variable> {
    (1..=k).map(|i| Variable::new(format!("p{i}"), 4 * i)).collect()
}

fn cap_for(k: u32) -> Option<u32> {
    Some(4 * k)
}

/// Power sums `s_j = sum_i x_i^{2j}` for `j = 1..=k`, as polynomials in the
/// Pontryagin classes (Newton's identities).
pub fn power_sums(k: u32) -> Vec<GradedPolynomial<BigRational>> {
    let vars = pontryagin_vars(k);
    let cap = cap_for(k);
    let e = |i: u32| {
        if i >= 1 && i <= k {
            GradedPolynomial::var(&vars, cap, (i - 1) as usize)
        } else {
            GradedPolynomial::zero(&vars, cap)
        }
    };
    let mut s: Vec<GradedPolynomial<BigRational>> = Vec::new();
    for n in 1..=k {
        let mut acc = e(n).scale(&int(if n % 2 == 1 { n as i64 } else { -(n as i64) }));
        for i in 1..n {
            let term = e(i).mul(&s[(n - i - 1) as usize]);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        s.push(acc);
    }
    s
}

/// The multiplicative sequence `K_1..K_k` of an even characteristic series.
pub fn multiplicative_class<C: Coeff>(
    q: &CharacteristicSeries<C>,
    k: u32,
) -> Result<Vec<GradedPolynomial<C>>, GenusError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if let Some((e, _)) = q.series.terms().find(|(e, _)| e % 2 == 1) {
        return Err(GenusError::OddTerm(e));
    }
    let needed = 2 * k as usize + 1;
    if q.series.order() < needed {
        return Err(GenusError::InsufficientOrder {
            known: q.series.order(),
            needed,
        });
    }
    // Q(x) = P(x^2); log P(z) = sum b_j z^j; total class = exp(sum b_j s_j)
    let p = Series::from_coeffs(
        "z",
        k as usize + 1,
        q.series
            .terms()
            .filter(|(e, _)| *e <= 2 * k as usize)
            .map(|(e, c)| (e / 2, c.clone())),
    );
    let log_p = p.log()?;
    let vars = pontryagin_vars(k);
    let cap = cap_for(k);
    let sums = power_sums(k);
    let mut exponent = GradedPolynomial::<C>::zero(&vars, cap);
    for (j, s) in sums.iter().enumerate() {
        if let Some(b) = log_p.coeff(j + 1) {
            let s_c = s.map_coeffs(|r| C::from_rational(r.clone()));
            exponent = exponent.add(&s_c.scale_by(b));
        }
    }
    let total = exponent.exp().expect("positive-degree exponent under a cap");
    Ok((1..=k).map(|j| total.homogeneous_part(4 * j)).collect())
}

/// Partition of `k` in decreasing order, e.g. `[2, 1]` stands for `p_2 p_1`.
pub type Partition = Vec<u32>;

/// All partitions of `k`, each in decreasing order.
pub fn partitions(k: u32) -> Vec<Partition> {
    fn go(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut Vec::new(), &mut out);
    out
}

fn monomial_partition(exponents: &[u32]) -> Partition {
    let mut parts = Vec::new();
    for (i, e) in exponents.iter().enumerate().rev() {
        for _ in 0..*e {
            parts.push(i as u32 + 1);
        }
    }
    parts
}

/// Characteristic numbers of a closed oriented `4k`-manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldData {
    dimension: u32,
    pontryagin: BTreeMap<Partition, BigInt>,
    spin: bool,
}

impl ManifoldData {
    pub fn new(
        dimension: u32,
        pontryagin: BTreeMap<Partition, BigInt>,
        spin: bool,
    ) -> Result<Self, GenusError> {
        if dimension == 0 || dimension % 4 != 0 {
            return Err(GenusError::BadDimension(dimension));
        }
        let k = dimension / 4;
        let pontryagin: BTreeMap<Partition, BigInt> = pontryagin
            .into_iter()
            .map(|(mut p, v)| {
                p.sort_unstable_by(|a, b| b.cmp(a));
                (p, v)
            })
            .collect();
        if let Some(missing) = partitions(k).into_iter().find(|p| !pontryagin.contains_key(p)) {
            return Err(GenusError::MissingPartition(missing));
        }
        Ok(Self {
            dimension,
            pontryagin,
            spin,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn k(&self) -> u32 {
        self.dimension / 4
    }

    pub fn is_spin(&self) -> bool {
        self.spin
    }

    pub fn pontryagin_number(&self, partition: &[u32]) -> Option<&BigInt> {
        self.pontryagin.get(partition)
    }

    /// Pair a degree-`4k` polynomial in the Pontryagin classes with the
    /// fundamental class.
    pub fn pair<C: Coeff>(&self, class: &GradedPolynomial<C>) -> Result<C, GenusError> {
        let top = self.dimension;
        let mut acc = C::zero();
        for (e, c) in class.terms() {
            if class.degree_of(e) != top {
                continue;
            }
            let part = monomial_partition(e);
            let n = self
                .pontryagin
                .get(&part)
                .ok_or_else(|| GenusError::MissingPartition(part.clone()))?;
            acc = acc.plus(&c.scaled(&BigRational::from_integer(n.clone())));
        }
        Ok(acc)
    }
}

/// The genus defined by `q` evaluated on `m`.
pub fn genus_value<C: Coeff>(m: &ManifoldData, q: &CharacteristicSeries<C>) -> Result<C, GenusError> {
    let classes = multiplicative_class(q, m.k())?;
    m.pair(classes.last().expect("k >= 1"))
}

/// Chern character of the symmetric powers of a rank-`rank` bundle,
/// `sum_j t^j ch(S^j E) = prod_i (1 - t e^{x_i})^{-1}`, in the Chern roots
/// `x_i` (degree 2) truncated above cohomological degree `cap` and modulo
/// `t^t_order`.
pub fn symmetric_power_character(
    rank: u32,
    t_order: usize,
    cap: u32,
) -> Series<GradedPolynomial<BigRational>> {
    assert!(rank >= 1);
    let vars: Vec<Variable> = (1..=rank).map(|i| Variable::new(format!("x{i}"), 2)).collect();
    let mut acc = Series::constant("t", GradedPolynomial::constant(&vars, Some(cap), int(1)), t_order);
    for i in 0..rank as usize {
        let x = GradedPolynomial::var(&vars, Some(cap), i);
        let ex = x.exp().expect("nilpotent root");
        let factor = Series::from_dense(
            "t",
            t_order,
            vec![GradedPolynomial::constant(&vars, Some(cap), int(1)), ex.neg()],
        );
        acc = acc.div(&factor).expect("unit constant term");
    }
    acc
}

/// Which bundle the loop-space symmetric powers are taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WittenNormalization {
    /// `T_C M - dim`: the `q^0` coefficient is exactly the Â-genus.
    #[default]
    Reduced,
    /// `T_C M` itself; differs from the reduced form by `prod_n (1 - q^n)^{-dim}`.
    Unreduced,
}

/// Characteristic series of the Witten genus with `q`-series coefficients:
/// `(x/2)/sinh(x/2) * prod_{n>=1} (1-q^n)^2 / ((1 - q^n e^x)(1 - q^n e^{-x}))`.
pub fn witten_characteristic_series(
    q_order: usize,
    x_order: usize,
) -> CharacteristicSeries<Series<BigRational>> {
    type Q = Series<BigRational>;
    let a_hat = CharacteristicSeries::a_hat(x_order);
    let mut acc: Series<Q> = a_hat
        .series()
        .map_coeffs(|c| Q::constant("q", c.clone(), q_order))
        .with_var("x");
    let mut fact = BigInt::from(1);
    let mut inv_fact = Vec::new();
    for j in 0..x_order {
        if j > 0 {
            fact *= BigInt::from(j as i64);
        }
        inv_fact.push(BigRational::new(1.into(), fact.clone()));
    }
    for n in 1..q_order {
        let qn = Q::monomial("q", int(1), n, q_order);
        let one_minus = Q::constant("q", int(1), q_order).sub(&qn);
        // 1 - q^n e^{±x}
        let factor = |sign: i64| {
            let dense: Vec<Q> = (0..x_order)
                .map(|j| {
                    let c = if sign < 0 && j % 2 == 1 {
                        -inv_fact[j].clone()
                    } else {
                        inv_fact[j].clone()
                    };
                    let term = qn.scale(&c).neg();
                    if j == 0 {
                        Q::constant("q", int(1), q_order).add(&term)
                    } else {
                        term
                    }
                })
                .collect();
            Series::from_dense("x", x_order, dense)
        };
        acc = acc
            .scale_by(&one_minus.mul(&one_minus))
            .div(&factor(1))
            .and_then(|s| s.div(&factor(-1)))
            .expect("unit constant term");
    }
    CharacteristicSeries::new(acc).expect("Q(0) = 1")
}

/// Witten genus of a spin manifold as a power series in `q`, modulo `q^q_order`.
pub fn witten_genus_qexp(
    m: &ManifoldData,
    q_order: usize,
    normalization: WittenNormalization,
) -> Result<Series<BigRational>, GenusError> {
    if !m.is_spin() {
        return Err(GenusError::NotSpin);
    }
    let k = m.k();
    if !(1..=3).contains(&k) {
        return Err(GenusError::UnsupportedDegree(k));
    }
    let q = witten_characteristic_series(q_order, 2 * k as usize + 1);
    let value = genus_value(m, &q)?.with_var("q");
    match normalization {
        WittenNormalization::Reduced => Ok(value),
        WittenNormalization::Unreduced => {
            let mut euler = Series::constant("q", int(1), q_order);
            for n in 1..q_order {
                euler = euler.mul(&Series::from_coeffs("q", q_order, [(0, int(1)), (n, int(-1))]));
            }
            Ok(value.div(&euler.pow(m.dimension()))?)
        }
    }
}

/// Chern character of the complexified tangent bundle of a `4k`-manifold,
/// `sum_i 2 cosh(x_i)`, in the Pontryagin classes.
pub fn complexified_tangent_character(k: u32) -> GradedPolynomial<BigRational> {
    let vars = pontryagin_vars(k);
    let cap = cap_for(k);
    let sums = power_sums(k);
    let mut acc = GradedPolynomial::constant(&vars, cap, int(4 * k as i64));
    let mut fact = BigInt::from(1);
    for j in 1..=k {
        fact *= BigInt::from(2 * j as i64 - 1) * BigInt::from(2 * j as i64);
        acc = acc.add(&sums[(j - 1) as usize].scale(&BigRational::new(2.into(), fact.clone())));
    }
    acc
}

/// Result of solving `L = a * (Â ch(T_C)) + b * Â` in degree 12.
#[derive(Debug, Clone, PartialEq)]
pub struct Cancellation {
    pub a: BigRational,
    pub b: BigRational,
    /// `L - a (Â ch) - b Â` in degree 12; zero when the identity holds.
    pub residual: GradedPolynomial<BigRational>,
    /// Rank of the 3x2 coefficient matrix.
    pub rank: usize,
}

impl Cancellation {
    /// Both sides of the identity evaluated on Pontryagin numbers
    /// `(p1^3, p1 p2, p3)`.
    pub fn evaluate_sides(&self, m: &ManifoldData) -> Result<(BigRational, BigRational), GenusError> {
        let parts = cancellation_parts()?;
        let lhs = m.pair(&parts.l)?;
        let rhs = m.pair(&parts.twisted)? * &self.a + m.pair(&parts.a_hat)? * &self.b;
        Ok((lhs, rhs))
    }
}

struct CancellationParts {
    l: GradedPolynomial<BigRational>,
    twisted: GradedPolynomial<BigRational>,
    a_hat: GradedPolynomial<BigRational>,
}

fn cancellation_parts() -> Result<CancellationParts, GenusError> {
    let k = 3;
    let l = multiplicative_class(&CharacteristicSeries::l_genus(7), k)?;
    let a = multiplicative_class(&CharacteristicSeries::a_hat(7), k)?;
    let vars = pontryagin_vars(k);
    let one = GradedPolynomial::constant(&vars, cap_for(k), int(1));
    let a_total = a.iter().fold(one, |acc, x| acc.add(x));
    let twisted = a_total.mul(&complexified_tangent_character(k)).homogeneous_part(12);
    Ok(CancellationParts {
        l: l[2].clone(),
        twisted,
        a_hat: a[2].clone(),
    })
}

/// Find the rational constants of the twelve-dimensional cancellation
/// identity by linear algebra over the degree-12 Pontryagin monomials.
pub fn solve_cancellation_dim12() -> Result<Cancellation, GenusError> {
    let parts = cancellation_parts()?;
    let monomials = [vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]];
    let rows: Vec<Vec<BigRational>> = monomials
        .iter()
        .map(|m| vec![parts.twisted.coeff(m), parts.a_hat.coeff(m), parts.l.coeff(m)])
        .collect();
    let (solution, rank) = solve_exact(rows, 2)?;
    let residual = parts
        .l
        .sub(&parts.twisted.scale(&solution[0]))
        .sub(&parts.a_hat.scale(&solution[1]));
    Ok(Cancellation {
        a: solution[0].clone(),
        b: solution[1].clone(),
        residual,
        rank,
    })
}

/// Gauss-Jordan elimination on an augmented matrix with `n` unknowns.
fn solve_exact(mut rows: Vec<Vec<BigRational>>, n: usize) -> Result<(Vec<BigRational>, usize), GenusError> {
    let zero = int(0);
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(r) = (pivot_row..rows.len()).find(|r| rows[*r][col] != zero) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = rat(1, 1) / &rows[pivot_row][col];
        rows[pivot_row] = rows[pivot_row].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != pivot_row && rows[i][col] != zero {
                let f = rows[i][col].clone();
                let pr = rows[pivot_row].clone();
                for (x, p) in rows[i].iter_mut().zip(pr) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| r[n] != zero) {
        return Err(GenusError::Inconsistent);
    }
    if pivots.len() < n {
        return Err(GenusError::Underdetermined);
    }
    Ok(((0..n).map(|i| rows[i][n].clone()).collect(), pivots.len()))
}
