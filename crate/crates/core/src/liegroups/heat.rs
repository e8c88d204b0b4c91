use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dot_f64, enumerate_weights, weyl_character, LieError, RootSystemData, TorusElement};
use crate::numerics::CompensatedSum;

/// Width of the Casimir band, in units of `1/t`, summed by the tail bound.
const TAIL_BAND: f64 = 60.0;

/// Metric constants of the group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupConstants {
    pub group_volume: f64,
    pub torus_volume: f64,
    pub center_order: usize,
    pub dim_g: usize,
    pub num_positive_roots: usize,
    pub weyl_order: usize,
}

pub fn group_constants(rs: &RootSystemData) -> GroupConstants {
    GroupConstants {
        group_volume: rs.group_volume(),
        torus_volume: rs.torus_volume(),
        center_order: rs.center_order(),
        dim_g: rs.dim_g(),
        num_positive_roots: rs.num_positive_roots(),
        weyl_order: rs.weyl_group().len(),
    }
}

/// Volume of the centralizer of `c`: the torus for regular `c`, the whole
/// group for central `c`.
pub fn centralizer_volume(rs: &RootSystemData, c: &TorusElement) -> Result<f64, LieError> {
    c.check(rs)?;
    const EPS: f64 = 1e-12;
    let sines: Vec<f64> = rs
        .positive_roots_f64()
        .iter()
        .map(|a| (0.5 * dot_f64(a, c.coords())).sin().abs())
        .collect();
    if sines.iter().all(|&s| s > EPS) {
        Ok(rs.torus_volume())
    } else if sines.iter().all(|&s| s <= EPS) {
        Ok(rs.group_volume())
    } else {
        Err(LieError::NeitherRegularNorCentral)
    }
}

/// A truncated heat-kernel value together with a bound on the omitted terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelValue {
    pub value: f64,
    pub tail_bound: f64,
    pub cutoff: f64,
    pub terms: usize,
}

/// Bound on `(1/|G|) Σ_{p_c(λ) > cutoff} d_λ |χ_λ| e^{−t p_c(λ)}`.
///
/// Uses `|χ_λ| ≤ d_λ` and sums `d_λ² e^{−t p_c(λ)}` explicitly over the band
/// `cutoff < p_c ≤ cutoff + 60/t`; beyond the band the terms are smaller by
/// a factor `e^{−60}` times polynomial growth.
pub fn heat_kernel_tail_bound(rs: &RootSystemData, t: f64, cutoff: f64) -> Result<f64, LieError> {
    if !(t > 0.0) {
        return Err(LieError::NonPositiveTime(t));
    }
    let band = enumerate_weights(rs, cutoff + TAIL_BAND / t);
    let mut s = CompensatedSum::new();
    for w in band.iter().filter(|w| w.casimir() > cutoff) {
        let d = w.dimension_f64();
        s.add(d * d * (-t * w.casimir()).exp());
    }
    Ok(s.value() / rs.group_volume())
}

/// Smallest cutoff of the form `c₀ · 2^k` whose tail bound is below `tol`.
pub fn cutoff_for_tolerance(rs: &RootSystemData, t: f64, tol: f64) -> Result<f64, LieError> {
    if !(t > 0.0) {
        return Err(LieError::NonPositiveTime(t));
    }
    if !(tol > 0.0) {
        return Err(LieError::BadTolerance);
    }
    let mut cutoff = 1.0 / t;
    for _ in 0..60 {
        if heat_kernel_tail_bound(rs, t, cutoff)? < tol {
            return Ok(cutoff);
        }
        cutoff *= 2.0;
    }
    Err(LieError::CutoffInsufficient { cutoff, tail: f64::INFINITY, tol })
}

/// `H(t, x, y) = (1/|G|) Σ_{p_c(λ) ≤ cutoff} d_λ χ_λ(x y⁻¹) e^{−t p_c(λ)}`.
///
/// When `tol` is given, a tail bound above it is an error.
pub fn heat_kernel(
    rs: &RootSystemData,
    t: f64,
    x_y_inv: &TorusElement,
    cutoff: f64,
    tol: Option<f64>,
) -> Result<HeatKernelValue, LieError> {
    if !(t > 0.0) {
        return Err(LieError::NonPositiveTime(t));
    }
    x_y_inv.check(rs)?;
    let tail_bound = heat_kernel_tail_bound(rs, t, cutoff)?;
    if let Some(tol) = tol {
        if tail_bound > tol {
            return Err(LieError::CutoffInsufficient { cutoff, tail: tail_bound, tol });
        }
    }
    let weights = enumerate_weights(rs, cutoff);
    let terms: Vec<f64> = weights
        .par_iter()
        .map(|w| {
            let chi = weyl_character(rs, w, x_y_inv)?;
            Ok(w.dimension_f64() * chi.re * (-t * w.casimir()).exp())
        })
        .collect::<Result<_, LieError>>()?;
    let sum: CompensatedSum = terms.iter().copied().collect();
    Ok(HeatKernelValue {
        value: sum.value() / rs.group_volume(),
        tail_bound,
        cutoff,
        terms: weights.len(),
    })
}

/// Volume of the group from the tabulated closed form for `SU(n)` in the
/// trace metric, rescaled to the Killing metric. Used as a cross-check.
#[cfg(test)]
fn su_volume_closed_form(n: u32) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let exponent = f64::from(n * n + n - 2) / 2.0;
    let factorials: f64 = (1..n).map(|k| (1..=k).map(f64::from).product::<f64>()).product();
    let trace_volume = f64::from(n).sqrt() * two_pi.powf(exponent) / factorials;
    let dim = f64::from(n * n - 1);
    trace_volume * (2.0 * f64::from(n)).powf(dim / 2.0)
}
