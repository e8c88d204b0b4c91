use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{volume_limit, ModuliError, ModuliQuery};
use crate::liegroups::TorusElement;

/// Relative prediction error that marks a wall between two grid points.
pub const WALL_JUMP_THRESHOLD: f64 = 1e-4;

/// One polynomial piece, stored in the variable `u = (x − center)/half_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPiece {
    pub start: f64,
    pub end: f64,
    pub center: f64,
    pub half_width: f64,
    pub coeffs: Vec<f64>,
    /// Highest power with a coefficient above rounding level.
    pub degree: usize,
    /// Largest absolute residual on the piece.
    pub residual: f64,
    pub points: usize,
}

impl FitPiece {
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.half_width;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// Coefficients in powers of `x` itself.
    pub fn coefficients_in_x(&self) -> Vec<f64> {
        // expand Σ c_k ((x − m)/w)^k
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            let scale = c / self.half_width.powi(k as i32);
            for j in 0..=k {
                let binom = (0..j).fold(1.0, |a, i| a * (k - i) as f64 / (i + 1) as f64);
                out[j] += scale * binom * (-self.center).powi((k - j) as i32);
            }
        }
        out
    }
}

fn least_squares(xs: &[f64], ys: &[f64], degree: usize) -> (Vec<f64>, f64, f64, f64) {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let half_width = (0.5 * (hi - lo)).max(1e-300);
    let degree = degree.min(xs.len().saturating_sub(1));
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, j| ((xs[i] - center) / half_width).powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&b, 1e-14).expect("SVD with both factors");
    let coeffs: Vec<f64> = sol.iter().copied().collect();
    let resid = (&a * &sol - &b).amax();
    (coeffs, center, half_width, resid)
}

fn eval_scaled(coeffs: &[f64], center: f64, half_width: f64, x: f64) -> f64 {
    let u = (x - center) / half_width;
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// Split sorted samples into polynomial pieces of degree at most `max_degree`.
///
/// A piece grows point by point; once it holds `max_degree + 2` points, each
/// new point is predicted from the current fit and a prediction error above
/// [`WALL_JUMP_THRESHOLD`] times the data scale starts a new piece. Every
/// piece must then fit within `tol` (absolute).
pub fn fit_piecewise(
    xs: &[f64],
    ys: &[f64],
    max_degree: usize,
    tol: f64,
) -> Result<Vec<FitPiece>, ModuliError> {
    assert_eq!(xs.len(), ys.len());
    if xs.is_empty() {
        return Ok(vec![]);
    }
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let jump = WALL_JUMP_THRESHOLD * scale.max(f64::MIN_POSITIVE);
    let mut bounds = Vec::new();
    let mut start = 0;
    let mut j = 0;
    while j < xs.len() {
        if j - start >= max_degree + 2 {
            let (c, m, w, _) = least_squares(&xs[start..j], &ys[start..j], max_degree);
            if (eval_scaled(&c, m, w, xs[j]) - ys[j]).abs() > jump {
                bounds.push((start, j));
                start = j;
            }
        }
        j += 1;
    }
    bounds.push((start, xs.len()));

    let mut pieces = Vec::with_capacity(bounds.len());
    for (s, e) in bounds {
        let (coeffs, center, half_width, residual) = least_squares(&xs[s..e], &ys[s..e], max_degree);
        if residual > tol {
            return Err(ModuliError::FitFailed { residual, tol });
        }
        let cmax = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let degree = coeffs
            .iter()
            .rposition(|c| c.abs() > 1e-7 * cmax.max(f64::MIN_POSITIVE) && cmax > 0.0)
            .unwrap_or(0);
        pieces.push(FitPiece {
            start: xs[s],
            end: xs[e - 1],
            center,
            half_width,
            coeffs,
            degree,
            residual,
            points: e - s,
        });
    }
    Ok(pieces)
}

/// Volume of the moduli space along `c(θ) = exp(θ ξ)`, sampled at `thetas`
/// and fitted by polynomials of degree at most `2g·|Δ⁺|` per piece.
///
/// Returns the pieces and the sampled values.
pub fn piecewise_poly_fit(
    q: &ModuliQuery,
    direction: &TorusElement,
    thetas: &[f64],
    tol: f64,
) -> Result<(Vec<FitPiece>, Vec<f64>), ModuliError> {
    if q.holonomies.len() != 1 {
        return Err(ModuliError::WrongBoundaryCount(q.holonomies.len()));
    }
    let values: Vec<f64> = thetas
        .par_iter()
        .map(|&theta| {
            let c = direction.scaled(theta);
            let point = q.with_holonomies(vec![c])?;
            Ok(volume_limit(&point)?.extrapolated_value)
        })
        .collect::<Result<_, ModuliError>>()?;
    let max_degree = 2 * q.genus as usize * q.rs.num_positive_roots();
    let pieces = fit_piecewise(thetas, &values, max_degree, tol)?;
    Ok((pieces, values))
}
