use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{hg_series, BundleSpec, Convention, HgSeries, MirrorError, ToricTarget};
use crate::exactnum::{int, BigRational, Series};

/// Polynomial in one variable with `q`-series coefficients, dense by power.
pub(crate) type SeriesPoly = Vec<Series<BigRational>>;

/// Output of the one-parameter Calabi–Yau mirror pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GwSeries {
    pub convention: Convention,
    pub q_order: usize,
    /// Classical triple intersection `∫ H³ e(V)`.
    pub kappa: BigRational,
    /// `K⁰_d` for `d = 1..=q_order`.
    pub invariants: Vec<BigRational>,
    /// Instanton numbers `n_d`, same indexing.
    pub instanton_numbers: Vec<BigRational>,
    /// `G(q)` in the mirror map `T = t + G(q)`; coefficients of `q^0..q^{q_order}`.
    pub mirror_map: Vec<BigRational>,
    /// `q(Q)` obtained by inverting `Q = q·e^{G(q)}`.
    pub inverse_mirror_map: Vec<BigRational>,
    /// The period `f₀(q)` normalized to constant term 1.
    pub f0: Vec<BigRational>,
}

impl GwSeries {
    /// Degrees whose instanton number is not an integer.
    pub fn integrality_violations(&self) -> Vec<usize> {
        self.instanton_numbers
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.is_integer())
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.integrality_violations().is_empty()
    }

    /// `Φ(Q) = Σ_d K⁰_d Q^d`.
    pub fn prepotential_series(&self) -> Series<BigRational> {
        Series::from_coeffs(
            "Q",
            self.q_order + 1,
            self.invariants.iter().enumerate().map(|(i, k)| (i + 1, k.clone())),
        )
    }
}

fn dense(s: &Series<BigRational>, len: usize) -> Vec<BigRational> {
    (0..len).map(|e| s.coeff_or_zero(e)).collect()
}

fn poly_mul(a: &SeriesPoly, b: &SeriesPoly) -> SeriesPoly {
    let order = a.iter().chain(b).map(Series::order).min().unwrap_or(1);
    let mut out = vec![Series::zero_in("q", order); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y)).truncate(order);
        }
    }
    out
}

fn poly_sub(a: &SeriesPoly, b: &SeriesPoly) -> SeriesPoly {
    let order = a.iter().chain(b).map(Series::order).min().unwrap_or(1);
    (0..a.len().max(b.len()))
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| Series::zero_in("q", order));
            let y = b.get(i).cloned().unwrap_or_else(|| Series::zero_in("q", order));
            x.sub(&y)
        })
        .collect()
}

fn poly_scale_by(a: &SeriesPoly, s: &Series<BigRational>) -> SeriesPoly {
    a.iter().map(|x| x.mul(s)).collect()
}

/// `Σ_j a_j (x + shift)^j`.
pub(crate) fn poly_shift(a: &SeriesPoly, shift: &Series<BigRational>) -> SeriesPoly {
    let order = shift.order();
    let mut out = vec![Series::zero_in("q", order); a.len()];
    for (j, aj) in a.iter().enumerate() {
        // binomial expansion of (x + shift)^j
        let mut binom = BigInt::one();
        let mut power = Series::constant("q", BigRational::one(), order);
        for i in (0..=j).rev() {
            let term = aj.mul(&power).scale(&BigRational::from_integer(binom.clone()));
            out[i] = out[i].add(&term).truncate(order);
            power = power.mul(shift).truncate(order);
            if i > 0 {
                binom = binom * BigInt::from(i) / BigInt::from(j - i + 1);
            }
        }
    }
    out
}

fn is_zero_to(s: &Series<BigRational>, order: usize) -> bool {
    (0..order).all(|e| s.coeff_or_zero(e).is_zero())
}

/// One-parameter Calabi–Yau threefold data `(X, V)`: the mirror map, the
/// prepotential and its instanton expansion to `q^{q_order}`.
///
/// Writes the `H`-expansion of the hypergeometric series as periods
/// `φ₀..φ₃`, sets `T = φ₁/φ₀`, and reads `K⁰_d` off
/// `F = κ/2 (φ₁φ₂/φ₀² − φ₃/φ₀) = κT³/6 + Σ K⁰_d Q^d` with `Q = e^T`.
/// The classical part of `F` is checked rather than assumed.
pub fn cy3_pipeline(
    target: &ToricTarget,
    bundle: &BundleSpec,
    q_order: usize,
    convention: Convention,
) -> Result<GwSeries, MirrorError> {
    if q_order == 0 {
        return Err(MirrorError::BadOrder { got: 0, min: 1 });
    }
    if target.kahler_rank() != 1 {
        return Err(MirrorError::Unsupported(
            "the mirror pipeline handles one Kähler parameter".into(),
        ));
    }
    if !bundle.is_calabi_yau(target) {
        return Err(MirrorError::NotCalabiYau);
    }
    let euler_degree = bundle.convex().len() as u32;
    if euler_degree + 3 != target.top_degree() {
        return Err(MirrorError::DegreeMismatch { euler_degree, expected: target.top_degree() - 3 });
    }
    let hg = hg_series(target, bundle, q_order, convention)?;
    let periods = periods(&hg, euler_degree)?;
    let order = q_order + 1;
    let kappa = target.integrate(&target.mul(&target.linear(&[1]).pow(3), hg.euler_class()));

    // T = φ1/φ0 = t + G
    let phi0_inv = periods[0][0].inverse()?;
    let g = periods[1][0].mul(&phi0_inv);
    if !periods[1][1].mul(&phi0_inv).sub(&Series::constant("q", BigRational::one(), order)).is_zero() {
        return Err(MirrorError::StructureViolation("φ₁/φ₀ is not t + G(q)".into()));
    }
    if !g.coeff_or_zero(0).is_zero() {
        return Err(MirrorError::StructureViolation("mirror map has a constant term".into()));
    }

    // F(t) = κ/2 (φ1 φ2 / φ0² − φ3 / φ0)
    let p1 = poly_scale_by(&periods[1], &phi0_inv);
    let p2 = poly_scale_by(&periods[2], &phi0_inv);
    let p3 = poly_scale_by(&periods[3], &phi0_inv);
    let half_kappa = &kappa / int(2);
    let f_t: SeriesPoly = poly_sub(&poly_mul(&p1, &p2), &p3)
        .iter()
        .map(|c| c.scale(&half_kappa))
        .collect();

    // Q = q e^G, then t = T − G and q = q(Q)
    let big_q = Series::variable("q", order).mul(&g.exp()?);
    let q_of_big_q = big_q.revert()?.with_var("Q");
    let f_big_t: SeriesPoly = poly_shift(&f_t, &g.neg())
        .iter()
        .map(|c| c.compose(&q_of_big_q))
        .collect::<Result<_, _>>()?;

    let cubic = Series::constant("Q", &kappa / int(6), order);
    for (j, c) in f_big_t.iter().enumerate().skip(1) {
        let ok = match j {
            3 => is_zero_to(&c.sub(&cubic), order),
            _ => is_zero_to(c, order),
        };
        if !ok {
            return Err(MirrorError::StructureViolation(format!(
                "coefficient of T^{j} in the prepotential is not classical"
            )));
        }
    }
    if !f_big_t[0].coeff_or_zero(0).is_zero() {
        return Err(MirrorError::StructureViolation("prepotential has a constant Q⁰ term".into()));
    }
    let invariants: Vec<BigRational> = (1..=q_order).map(|d| f_big_t[0].coeff_or_zero(d)).collect();
    let instanton_numbers = instanton_extract(&invariants);
    let norm = periods[0][0].coeff_or_zero(0);
    Ok(GwSeries {
        convention,
        q_order,
        kappa,
        instanton_numbers,
        invariants,
        mirror_map: dense(&g, order),
        inverse_mirror_map: dense(&q_of_big_q, order),
        f0: dense(&periods[0][0].scale(&(BigRational::one() / norm)), order),
    })
}

/// `φ_k(t) = s^k Σ_j (s t)^j / j! · c_{k−j}(q)` for `k = 0..=3`, where
/// `c_m = Σ_d [H^{v+m}] term_d q^d` and `v` is the Euler-class degree.
pub(crate) fn periods(hg: &HgSeries, v: u32) -> Result<Vec<SeriesPoly>, MirrorError> {
    let s = hg.convention.sign();
    let c: Vec<Series<BigRational>> = (0..4).map(|m| hg.h_coefficient(v + m)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(4);
    let mut fact = BigRational::one();
    let factorials: Vec<BigRational> = (0..4)
        .map(|j| {
            if j > 0 {
                fact *= int(j);
            }
            fact.clone()
        })
        .collect();
    for k in 0..4usize {
        let phi: SeriesPoly = (0..=k)
            .map(|j| c[k - j].scale(&(int(s.pow((k + j) as u32)) / &factorials[j])))
            .collect();
        out.push(phi);
    }
    if out[0][0].coeff_or_zero(0).is_zero() {
        return Err(MirrorError::StructureViolation("f₀ has zero constant term".into()));
    }
    Ok(out)
}

/// Instanton numbers from `K⁰_d = Σ_{k | d} n_{d/k} / k³`.
pub fn instanton_extract(invariants: &[BigRational]) -> Vec<BigRational> {
    let mut n: Vec<BigRational> = Vec::with_capacity(invariants.len());
    for d in 1..=invariants.len() {
        let mut v = invariants[d - 1].clone();
        for k in 2..=d {
            if d % k == 0 {
                v -= &n[d / k - 1] / int((k * k * k) as i64);
            }
        }
        n.push(v);
    }
    n
}

/// The quintic threefold: `O(5)` on `P⁴`, in the `+` convention. Needs `q_order ≥ 2`.
pub fn quintic_pipeline(q_order: usize) -> Result<GwSeries, MirrorError> {
    if q_order < 2 {
        return Err(MirrorError::BadOrder { got: q_order, min: 2 });
    }
    cy3_pipeline(&ToricTarget::projective_space(4), &BundleSpec::quintic(), q_order, Convention::Plus)
}

/// The resolved conifold: `O(−1) ⊕ O(−1)` over [`ToricTarget::local_p1`].
pub fn local_conifold(q_order: usize) -> Result<GwSeries, MirrorError> {
    cy3_pipeline(&ToricTarget::local_p1(), &BundleSpec::conifold(), q_order, Convention::Plus)
}
