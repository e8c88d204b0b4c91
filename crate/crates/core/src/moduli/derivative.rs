use serde::{Deserialize, Serialize};

use super::{
    adapted_t_grid, build_summands, half_integer_expansion, volume_prefactor,
    wall_distance, weights_for, ModuliError, ModuliQuery, RegularizedSum,
};
use crate::liegroups::{weyl_character, DominantWeight, RootType, TorusElement};
use crate::numerics::{extrapolate_best, CompensatedSum};

/// Which function of the first holonomy is differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DerivativeTarget {
    /// The damped character sum `Σ ∏χ_λ(c_j) p(λ+ρ) e^{−tp} / d^{2g−2+s}`.
    #[default]
    CharacterSum,
    /// The same sum times the volume prefactor (regular holonomies only).
    VolumeSeries,
}

const STEPS: usize = 7;
const STEP_RATIO: f64 = 0.6;
const MIN_STEP: f64 = 1e-7;
const CROSS_CHECK_TOL: f64 = 1e-6;

/// `k`-th directional derivative in `C` of the chosen target, where the first
/// holonomy is `c₁ · exp(h ξ)`, followed by the limit `t → 0`.
///
/// For A₁ the derivative is computed from exact Taylor jets of
/// `sin(m(θ+x)) / sin(θ+x)` and checked against central differences with
/// Richardson extrapolation; other groups use the numerical path only.
pub fn derivative_insertion(
    q: &ModuliQuery,
    direction: &TorusElement,
    order: u32,
    target: DerivativeTarget,
) -> Result<RegularizedSum, ModuliError> {
    if order == 0 {
        return Err(ModuliError::BadSchedule("derivative order must be at least 1".into()));
    }
    if direction.coords().len() != q.rs.ambient_dim() {
        return Err(crate::liegroups::LieError::WrongTorusDimension {
            expected: q.rs.ambient_dim(),
            got: direction.coords().len(),
        }
        .into());
    }
    if target == DerivativeTarget::VolumeSeries {
        volume_prefactor(q)?;
    }
    let reg = &q.regularization;
    let grid = adapted_t_grid(&q.rs, &reg.t_grid, &q.holonomies);
    let sqrt_var = half_integer_expansion(&q.holonomies);
    let xs: Vec<f64> = grid.iter().map(|&t| if sqrt_var { t.sqrt() } else { t }).collect();

    let numeric_vals: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|&t| numeric_derivative(q, direction, order, target, t))
        .collect::<Result<_, _>>()?;
    let nys: Vec<f64> = numeric_vals.iter().map(|v| v.0).collect();
    let (numeric, nerr) = extrapolate_best(&xs, &nys, reg.extrapolation_order);
    let h_err = numeric_vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let tail = numeric_vals.iter().map(|v| v.2).fold(0.0, f64::max);

    let is_a1 = q.rs.root_type() == RootType::A && q.rs.rank() == 1;
    let (value, error, partials, cross_check) = if is_a1 {
        let sym_vals: Vec<f64> = grid
            .iter()
            .map(|&t| symbolic_a1_derivative(q, direction, order, target, t))
            .collect::<Result<_, _>>()?;
        let (symbolic, serr) = extrapolate_best(&xs, &sym_vals, reg.extrapolation_order);
        if (symbolic - numeric).abs() > CROSS_CHECK_TOL * symbolic.abs().max(1.0) {
            return Err(ModuliError::SymbolicMismatch { symbolic, numeric });
        }
        (symbolic, serr + tail, grid.iter().copied().zip(sym_vals).collect(), Some(numeric))
    } else {
        (numeric, nerr + h_err + tail, grid.iter().copied().zip(nys).collect(), None)
    };
    Ok(RegularizedSum {
        partial_values: partials,
        inner_value: value,
        prefactor: 1.0,
        extrapolated_value: value,
        error_estimate: error,
        tail_bound: tail,
        converged: error <= reg.tol.max(CROSS_CHECK_TOL) * value.abs().max(1.0),
        limit_order_deviation: None,
        cross_check,
    })
}

fn binomial(k: u32, i: u32) -> f64 {
    (0..i).fold(1.0, |acc, j| acc * f64::from(k - j) / f64::from(j + 1))
}

/// Target value at fixed `t` with the first holonomy shifted by `h ξ`;
/// returns `(value, tail)`.
fn shifted_value(
    q: &ModuliQuery,
    weights: &[DominantWeight],
    direction: &TorusElement,
    h: f64,
    target: DerivativeTarget,
    t: f64,
) -> Result<(f64, f64), ModuliError> {
    let mut hol = q.holonomies.clone();
    hol[0] = hol[0].mul(&direction.scaled(h));
    let summands = build_summands(&q.rs, weights, q.genus, &hol, &q.insertion)?;
    let (v, tail) = summands.damped(t, q.regularization.casimir_cutoff);
    match target {
        DerivativeTarget::CharacterSum => Ok((v, tail)),
        DerivativeTarget::VolumeSeries => {
            let shifted = q.with_holonomies(hol)?;
            let p = volume_prefactor(&shifted)?;
            Ok((p * v, p * tail))
        }
    }
}

/// Central-difference derivative with Richardson extrapolation in `h²`;
/// returns `(value, extrapolation error, tail)`.
fn numeric_derivative(
    q: &ModuliQuery,
    direction: &TorusElement,
    order: u32,
    target: DerivativeTarget,
    t: f64,
) -> Result<(f64, f64, f64), ModuliError> {
    let rs = &q.rs;
    let mut h0 = (0.3 * t.sqrt()).min(0.25);
    let norm = direction.coords().iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    h0 /= norm;
    if target == DerivativeTarget::VolumeSeries {
        // stay on the same side of every wall
        let d = wall_distance(rs, &q.holonomies[0]);
        h0 = h0.min(d / (f64::from(order) + 1.0) / norm);
    }
    let h_min = h0 * STEP_RATIO.powi(STEPS as i32 - 1);
    if h_min < MIN_STEP {
        return Err(ModuliError::StepUnderflow(h_min));
    }
    let weights = weights_for(rs, t, q.regularization.casimir_cutoff);
    let mut xs = Vec::with_capacity(STEPS);
    let mut ys = Vec::with_capacity(STEPS);
    let mut tail: f64 = 0.0;
    for j in 0..STEPS {
        let h = h0 * STEP_RATIO.powi(j as i32);
        let mut acc = CompensatedSum::new();
        for i in 0..=order {
            let offset = (f64::from(order) / 2.0 - f64::from(i)) * h;
            let (v, tl) = shifted_value(q, &weights, direction, offset, target, t)?;
            tail = tail.max(tl);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * binomial(order, i) * v);
        }
        xs.push(h * h);
        ys.push(acc.value() / h.powi(order as i32));
    }
    let (v, err) = extrapolate_best(&xs, &ys, STEPS - 1);
    Ok((v, err, tail * 2f64.powi(order as i32) / h_min.powi(order as i32)))
}

/// Taylor coefficients of `a / b` given those of `a` and `b`, resolving a
/// common simple zero at the origin. The inputs carry one coefficient more
/// than the output.
fn jet_divide(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let (a, b) = if b[0].abs() < 1e-12 { (&a[1..], &b[1..]) } else { (&a[..n], &b[..n]) };
    let mut q = vec![0.0; n];
    for i in 0..n {
        let mut s = a[i];
        for j in 1..=i {
            s -= b[j] * q[i - j];
        }
        q[i] = s / b[0];
    }
    q
}

fn jet_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|i| (0..=i).map(|j| a[j] * b[i - j]).sum()).collect()
}

/// Jet of `sin(ω(θ + x))` in `x` up to `x^{n−1}`.
fn sin_jet(omega: f64, theta: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut fact = 1.0;
    for i in 0..n {
        if i > 0 {
            fact *= i as f64;
        }
        let phase = omega * theta + i as f64 * std::f64::consts::FRAC_PI_2;
        out.push(omega.powi(i as i32) * phase.sin() / fact);
    }
    out
}

fn symbolic_a1_derivative(
    q: &ModuliQuery,
    direction: &TorusElement,
    order: u32,
    target: DerivativeTarget,
    t: f64,
) -> Result<f64, ModuliError> {
    let rs = &q.rs;
    let theta = q.holonomies[0].coords()[0];
    let a = direction.coords()[0];
    let n = order as usize + 1;
    let weights = weights_for(rs, t, q.regularization.casimir_cutoff);
    let s = q.holonomies.len() as i32;
    let exponent = 2 * q.genus as i32 - 2 + s;
    let cut = q.regularization.casimir_cutoff.unwrap_or(super::DAMPING_CUTOFF / t);
    let den = sin_jet(1.0, theta, n + 1);
    let mut acc = vec![CompensatedSum::new(); n];
    for w in weights.iter().filter(|w| w.casimir() <= cut) {
        let m = w.dimension_f64();
        let mut jet = jet_divide(&sin_jet(m, theta, n + 1), &den);
        let mut scale = q.insertion.eval(&[m]) / m.powi(exponent) * (-t * w.casimir()).exp();
        for c in &q.holonomies[1..] {
            scale *= weyl_character(rs, w, c)?.re;
        }
        if target == DerivativeTarget::VolumeSeries {
            // |j(θ+x)| = 2 σ sin(θ+x) near a regular θ
            let sigma = theta.sin().signum();
            let jac: Vec<f64> = den[..n].iter().map(|x| 2.0 * sigma * x).collect();
            jet = jet_mul(&jet, &jac);
        }
        for (acc_i, j) in acc.iter_mut().zip(&jet) {
            acc_i.add(scale * j);
        }
    }
    let coeff = acc[order as usize].value();
    let factorial: f64 = (1..=order).map(f64::from).product();
    let mut value = coeff * factorial * a.powi(order as i32);
    if target == DerivativeTarget::VolumeSeries {
        // remaining prefactor without the first |j(c₁)|
        let pref = volume_prefactor(q)?;
        let j1 = 2.0 * theta.sin().abs();
        value *= pref / j1;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_division_resolves_common_zero() {
        // sin(2x)/sin(x) = 2cos(x) = 2 − x² + ...
        let q = jet_divide(&sin_jet(2.0, 0.0, 4), &sin_jet(1.0, 0.0, 4));
        assert!((q[0] - 2.0).abs() < 1e-12);
        assert!(q[1].abs() < 1e-12);
        assert!((q[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(3, 0), 1.0);
    }
}
