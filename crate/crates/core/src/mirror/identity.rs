use num_traits::{One, Zero};

use super::pipeline::{poly_shift, SeriesPoly};
use super::{hg_series, BundleSpec, Convention, MirrorError, ToricTarget};
use crate::exactnum::{int, BigRational, Series};

/// Result of checking
/// `∫_X (e^{f} HG − e^{∓H·T} e(V)) = 2Φ − T ∂Φ/∂T`
/// under each sign convention.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub q_order: usize,
    /// The convention under which the residual vanishes, if any.
    pub passing: Option<Convention>,
    /// Per convention: the residual's `t^j` coefficients, each as `q`-coefficients.
    pub residuals: Vec<(Convention, Vec<Vec<BigRational>>)>,
}

impl IdentityReport {
    pub fn residual(&self, convention: Convention) -> Option<&Vec<Vec<BigRational>>> {
        self.residuals.iter().find(|(c, _)| *c == convention).map(|(_, r)| r)
    }

    pub fn residual_is_zero(&self, convention: Convention) -> bool {
        self.residual(convention)
            .is_some_and(|r| r.iter().flatten().all(Zero::is_zero))
    }
}

/// Verify the integrated mirror identity to `q^{q_order}`, given the
/// invariants `K⁰_1..K⁰_{q_order}` that make up `Φ`.
///
/// `HG = e(V)(A + B·H + …)` fixes `e^{f} = 1/A` and `T = ±B/A`. Both
/// conventions are tried; the report records which one balances.
pub fn toric_identity_check(
    target: &ToricTarget,
    bundle: &BundleSpec,
    invariants: &[BigRational],
    q_order: usize,
) -> Result<IdentityReport, MirrorError> {
    if q_order == 0 {
        return Err(MirrorError::BadOrder { got: 0, min: 1 });
    }
    if invariants.len() < q_order {
        return Err(MirrorError::BadOrder { got: invariants.len(), min: q_order });
    }
    if target.kahler_rank() != 1 {
        return Err(MirrorError::Unsupported("the identity check handles one Kähler parameter".into()));
    }
    let r = bundle.convex().len() as u32;
    let top = target.top_degree();
    if r + 3 != top {
        return Err(MirrorError::DegreeMismatch { euler_degree: r, expected: top.saturating_sub(3) });
    }
    if !bundle.is_calabi_yau(target) {
        return Err(MirrorError::NotCalabiYau);
    }
    let mut residuals = Vec::new();
    for convention in [Convention::Minus, Convention::Plus] {
        let res = residual(target, bundle, invariants, q_order, convention)?;
        residuals.push((convention, res));
    }
    let mut report = IdentityReport { q_order, passing: None, residuals };
    report.passing = [Convention::Minus, Convention::Plus]
        .into_iter()
        .find(|c| report.residual_is_zero(*c));
    Ok(report)
}

fn residual(
    target: &ToricTarget,
    bundle: &BundleSpec,
    invariants: &[BigRational],
    q_order: usize,
    convention: Convention,
) -> Result<Vec<Vec<BigRational>>, MirrorError> {
    let order = q_order + 1;
    let s = convention.sign();
    let r = bundle.convex().len() as u32;
    let top = target.top_degree();
    let hg = hg_series(target, bundle, q_order, convention)?;
    let expanded = hg.expanded()?;
    // f_m(t): coefficient of H^m
    let f = |m: u32| -> SeriesPoly {
        (0..=m)
            .map(|j| {
                let c = expanded.coeff(&[m, j]);
                if c.var().is_empty() {
                    Series::zero_in("q", order)
                } else {
                    c
                }
            })
            .collect()
    };
    let point = target.pairing_of(&[top]);
    let e0 = hg.euler_class().coeff(&[r]);
    if e0.is_zero() {
        return Err(MirrorError::StructureViolation("Euler class is not a multiple of H^r".into()));
    }
    let fr = f(r);
    let fr1 = f(r + 1);
    // A has no t-dependence
    if fr.iter().skip(1).any(|c| !c.is_zero()) {
        return Err(MirrorError::StructureViolation("leading coefficient A depends on t".into()));
    }
    let a = fr[0].scale(&(BigRational::one() / &e0));
    let a_inv = a.inverse()?;
    // T = s·B/A = t + G
    let g = fr1[0].scale(&(int(s) / &e0)).mul(&a_inv);

    // LHS = ∫ (HG/A − e^{sHT} e(V)) = point·(f_top/A − e0 (sT)³/3!)
    let mut lhs: SeriesPoly = f(top).iter().map(|c| c.mul(&a_inv).scale(&point)).collect();
    let cube = vec![
        Series::zero_in("q", order),
        Series::zero_in("q", order),
        Series::zero_in("q", order),
        Series::constant("q", int(s * s * s) * &e0 * &point / int(6), order),
    ];
    let cube_t = poly_shift(&cube, &g);
    for (l, c) in lhs.iter_mut().zip(&cube_t) {
        *l = l.sub(c);
    }

    // RHS = 2Φ(Q) − T Φ_T(Q), Q = q e^G
    let phi = Series::from_coeffs(
        "Q",
        order,
        invariants.iter().take(q_order).enumerate().map(|(i, k)| (i + 1, k.clone())),
    );
    let phi_t = Series::from_coeffs(
        "Q",
        order,
        invariants.iter().take(q_order).enumerate().map(|(i, k)| (i + 1, k * int(i as i64 + 1))),
    );
    let big_q = Series::variable("q", order).mul(&g.exp()?).with_var("Q");
    let phi_q = phi.compose(&big_q)?.with_var("q");
    let phi_t_q = phi_t.compose(&big_q)?.with_var("q");
    let rhs: SeriesPoly = vec![phi_q.scale(&int(2)).sub(&g.mul(&phi_t_q)), phi_t_q.neg()];

    let len = lhs.len().max(rhs.len());
    Ok((0..len)
        .map(|j| {
            let l = lhs.get(j).cloned().unwrap_or_else(|| Series::zero_in("q", order));
            let rr = rhs.get(j).cloned().unwrap_or_else(|| Series::zero_in("q", order));
            let d = l.sub(&rr);
            (0..order).map(|e| d.coeff_or_zero(e)).collect()
        })
        .collect())
}
