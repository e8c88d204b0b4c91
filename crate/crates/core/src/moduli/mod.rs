//! Volumes and intersection numbers of moduli spaces of flat connections on
//! a surface with boundary, computed from regularized character sums.
//!
//! All sums are damped by `e^{−t p_c(λ)}` and the limit `t → 0` is taken by
//! polynomial extrapolation over a decreasing t-grid. Limits `c → u` towards
//! a central element are taken along the ray `c = u · exp(εξ)` with
//! `ξ = ρ/|ρ|` unless another direction is supplied.

mod derivative;
mod fit;
mod montecarlo;

pub use derivative::{derivative_insertion, DerivativeTarget};
pub use fit::{fit_piecewise, piecewise_poly_fit, FitPiece, WALL_JUMP_THRESHOLD};
pub use montecarlo::{holonomy_integral_mc, holonomy_integral_series, HeatCentre, McEstimate};

use std::sync::Arc;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liegroups::{
    dot_f64, enumerate_weights, weyl_character, weyl_denominator, DominantWeight, LieError,
    RootSystemData, TorusElement,
};
use crate::numerics::{extrapolate_best, CompensatedSum};

/// Damping exponent `t · p_c` beyond which terms are dropped (`e^{−60} ≈ 9e−27`).
const DAMPING_CUTOFF: f64 = 60.0;

/// Ratio between the squared wall distance and the largest usable `t`.
const WALL_T_RATIO: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("genus must be at least 2, got {0}")]
    BadGenus(u32),
    #[error("at least one boundary holonomy is required")]
    NoHolonomy,
    #[error("holonomy {0} lies on an intermediate stratum (neither regular nor central)")]
    IntermediateStratum(usize),
    #[error("holonomy {0} must be regular")]
    NotRegular(usize),
    #[error("holonomy must be central")]
    NotCentral,
    #[error("operation needs exactly one boundary holonomy, got {0}")]
    WrongBoundaryCount(usize),
    #[error("invalid regularization schedule: {0}")]
    BadSchedule(String),
    #[error("insertion polynomial has {got} variables, expected {expected}")]
    InsertionArity { expected: usize, got: usize },
    #[error("extrapolation did not converge: value {value}, estimated error {error:e}")]
    NonConvergent { value: f64, error: f64 },
    #[error("finite-difference step underflow ({0:e})")]
    StepUnderflow(f64),
    #[error("symbolic derivative {symbolic} disagrees with numeric {numeric}")]
    SymbolicMismatch { symbolic: f64, numeric: f64 },
    #[error("piecewise fit failed: residual {residual:e} exceeds tolerance {tol:e}")]
    FitFailed { residual: f64, tol: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Polynomial in the Dynkin coordinates of `λ + ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionPolynomial {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl InsertionPolynomial {
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self, ModuliError> {
        for (e, _) in &terms {
            if e.len() != nvars {
                return Err(ModuliError::InsertionArity { expected: nvars, got: e.len() });
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(InsertionPolynomial { nvars, terms })
    }

    pub fn one(nvars: usize) -> Self {
        InsertionPolynomial { nvars, terms: vec![(vec![0; nvars], 1.0)] }
    }

    pub fn zero(nvars: usize) -> Self {
        InsertionPolynomial { nvars, terms: vec![] }
    }

    /// `x_i^k`.
    pub fn power(nvars: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; nvars];
        e[i] = k;
        InsertionPolynomial { nvars, terms: vec![(e, 1.0)] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = CompensatedSum::new();
        for (e, c) in &self.terms {
            s.add(c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>());
        }
        s.value()
    }
}

/// Extrapolation schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    /// Strictly decreasing positive t values.
    pub t_grid: Vec<f64>,
    /// Fixed Casimir cutoff; by default each t uses `45/t`.
    pub casimir_cutoff: Option<f64>,
    /// Strictly decreasing positive ε values for limits `c → u`.
    pub eps_grid: Vec<f64>,
    /// Maximum polynomial degree used in extrapolation.
    pub extrapolation_order: usize,
    /// Relative tolerance for declaring convergence.
    pub tol: f64,
    /// Direction of approach to central holonomies; `ρ/|ρ|` when absent.
    pub direction: Option<TorusElement>,
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization {
            t_grid: (0..8).map(|k| 0.5 * 0.5f64.powi(k)).collect(),
            casimir_cutoff: None,
            eps_grid: (0..8).map(|k| 0.4 * 0.7f64.powi(k)).collect(),
            extrapolation_order: 7,
            tol: 1e-8,
            direction: None,
        }
    }
}

impl Regularization {
    fn validate(&self) -> Result<(), ModuliError> {
        fn decreasing(name: &str, g: &[f64]) -> Result<(), ModuliError> {
            if g.len() < 2 {
                return Err(ModuliError::BadSchedule(format!("{name} needs at least two points")));
            }
            if g.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(ModuliError::BadSchedule(format!("{name} must be positive")));
            }
            if g.windows(2).any(|w| w[1] >= w[0]) {
                return Err(ModuliError::BadSchedule(format!("{name} must be strictly decreasing")));
            }
            Ok(())
        }
        decreasing("t-grid", &self.t_grid)?;
        decreasing("eps-grid", &self.eps_grid)?;
        if self.extrapolation_order == 0 {
            return Err(ModuliError::BadSchedule("extrapolation order must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ModuliError::BadSchedule("tolerance must be positive".into()));
        }
        if let Some(c) = self.casimir_cutoff {
            if !(c > 0.0) {
                return Err(ModuliError::BadSchedule("cutoff must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Input to the moduli computations.
#[derive(Debug, Clone)]
pub struct ModuliQuery {
    pub rs: Arc<RootSystemData>,
    pub genus: u32,
    pub holonomies: Vec<TorusElement>,
    pub insertion: InsertionPolynomial,
    pub regularization: Regularization,
}

impl ModuliQuery {
    pub fn new(
        rs: Arc<RootSystemData>,
        genus: u32,
        holonomies: Vec<TorusElement>,
        insertion: InsertionPolynomial,
        regularization: Regularization,
    ) -> Result<Self, ModuliError> {
        if genus < 2 {
            return Err(ModuliError::BadGenus(genus));
        }
        if holonomies.is_empty() {
            return Err(ModuliError::NoHolonomy);
        }
        for (i, c) in holonomies.iter().enumerate() {
            if c.coords().len() != rs.ambient_dim() || c.coords().iter().any(|x| !x.is_finite()) {
                return Err(LieError::WrongTorusDimension {
                    expected: rs.ambient_dim(),
                    got: c.coords().len(),
                }
                .into());
            }
            if classify(&rs, c) == Stratum::Intermediate {
                return Err(ModuliError::IntermediateStratum(i));
            }
        }
        if insertion.nvars() != rs.rank() {
            return Err(ModuliError::InsertionArity { expected: rs.rank(), got: insertion.nvars() });
        }
        regularization.validate()?;
        Ok(ModuliQuery { rs, genus, holonomies, insertion, regularization })
    }

    /// Same query with the holonomies replaced.
    pub fn with_holonomies(&self, holonomies: Vec<TorusElement>) -> Result<Self, ModuliError> {
        ModuliQuery::new(
            self.rs.clone(),
            self.genus,
            holonomies,
            self.insertion.clone(),
            self.regularization.clone(),
        )
    }

    fn direction(&self) -> TorusElement {
        self.regularization.direction.clone().unwrap_or_else(|| rho_direction(&self.rs))
    }
}

pub(crate) fn rho_direction(rs: &RootSystemData) -> TorusElement {
    let rho: Vec<f64> = rs.rho().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let n = dot_f64(&rho, &rho).sqrt();
    TorusElement::new(rho.iter().map(|x| x / n).collect())
}

/// Regular, central, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratum {
    Regular,
    Central,
    Intermediate,
}

const STRATUM_EPS: f64 = 1e-12;

pub fn classify(rs: &RootSystemData, c: &TorusElement) -> Stratum {
    let sines: Vec<f64> = rs
        .positive_roots_f64()
        .iter()
        .map(|a| (0.5 * dot_f64(a, c.coords())).sin().abs())
        .collect();
    if sines.iter().all(|&s| s > STRATUM_EPS) {
        Stratum::Regular
    } else if sines.iter().all(|&s| s <= STRATUM_EPS) {
        Stratum::Central
    } else {
        Stratum::Intermediate
    }
}

/// Distance of `⟨α, C⟩/2` to `πℤ`, minimized over positive roots.
pub fn wall_distance(rs: &RootSystemData, c: &TorusElement) -> f64 {
    rs.positive_roots()
        .iter()
        .map(|a| {
            let a: Vec<f64> = a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let half = 0.5 * dot_f64(&a, c.coords());
            let r = half.rem_euclid(std::f64::consts::PI);
            r.min(std::f64::consts::PI - r)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Complex dimension `N = ((2g−2)·dim G + Σ_j dim O_{c_j}) / 2`.
pub fn moduli_dimension(
    rs: &RootSystemData,
    genus: u32,
    holonomies: &[TorusElement],
) -> Result<usize, ModuliError> {
    if genus < 2 {
        return Err(ModuliError::BadGenus(genus));
    }
    let mut total = (2 * genus as usize - 2) * rs.dim_g();
    for (i, c) in holonomies.iter().enumerate() {
        total += match classify(rs, c) {
            Stratum::Central => 0,
            Stratum::Regular => rs.dim_g() - rs.rank(),
            Stratum::Intermediate => return Err(ModuliError::IntermediateStratum(i)),
        };
    }
    Ok(total / 2)
}

/// Values of a regularized limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSum {
    /// `(t, value)` pairs of the damped sum, prefactor excluded.
    pub partial_values: Vec<(f64, f64)>,
    /// Extrapolated sum, prefactor excluded.
    pub inner_value: f64,
    pub prefactor: f64,
    /// `prefactor · inner_value`.
    pub extrapolated_value: f64,
    pub error_estimate: f64,
    /// Largest truncation tail bound over the grid.
    pub tail_bound: f64,
    pub converged: bool,
    /// Difference between the two orders of the double limit, when one is taken.
    pub limit_order_deviation: Option<f64>,
    /// Independent evaluation of the same value (numeric vs symbolic), if any.
    pub cross_check: Option<f64>,
}

/// Precomputed summands `a_λ e^{−t p_λ}` with bounds `|a_λ| ≤ b_λ`.
pub(crate) struct Summands {
    casimir: Vec<f64>,
    coeff: Vec<f64>,
    bound: Vec<f64>,
}

impl Summands {
    pub(crate) fn damped(&self, t: f64, cutoff: Option<f64>) -> (f64, f64) {
        let cut = cutoff.unwrap_or(DAMPING_CUTOFF / t);
        let band = cut + DAMPING_CUTOFF / t;
        let mut s = CompensatedSum::new();
        let mut tail = CompensatedSum::new();
        for ((&p, &a), &b) in self.casimir.iter().zip(&self.coeff).zip(&self.bound) {
            if p <= cut {
                s.add(a * (-t * p).exp());
            } else if p <= band {
                tail.add(b * (-t * p).exp());
            }
        }
        (s.value(), tail.value())
    }
}

/// Weights needed for damped sums at parameter `t_min`.
pub(crate) fn weights_for(rs: &RootSystemData, t_min: f64, cutoff: Option<f64>) -> Vec<DominantWeight> {
    let cut = cutoff.unwrap_or(DAMPING_CUTOFF / t_min);
    enumerate_weights(rs, cut + DAMPING_CUTOFF / t_min)
}

/// Summands `∏_j χ_λ(c_j) p(λ+ρ) / d_λ^{2g−2+s}` (real part).
pub(crate) fn build_summands(
    rs: &RootSystemData,
    weights: &[DominantWeight],
    genus: u32,
    holonomies: &[TorusElement],
    insertion: &InsertionPolynomial,
) -> Result<Summands, ModuliError> {
    let s = holonomies.len() as i32;
    let exponent = 2 * genus as i32 - 2 + s;
    let rows: Vec<(f64, f64, f64)> = weights
        .par_iter()
        .map(|w| {
            let d = w.dimension_f64();
            let shifted: Vec<f64> = w.shifted_labels().iter().map(|&x| x as f64).collect();
            let p = insertion.eval(&shifted);
            let mut prod = num_complex::Complex64::new(1.0, 0.0);
            for c in holonomies {
                prod *= weyl_character(rs, w, c)?;
            }
            let scale = p / d.powi(exponent);
            Ok((w.casimir(), prod.re * scale, d.powi(s) * scale.abs()))
        })
        .collect::<Result<_, LieError>>()?;
    Ok(Summands {
        casimir: rows.iter().map(|r| r.0).collect(),
        coeff: rows.iter().map(|r| r.1).collect(),
        bound: rows.iter().map(|r| r.2).collect(),
    })
}

/// t-grid adapted to the holonomies: shrunk so that `t ≤ d²/30` for the
/// distance `d` of the regular holonomies from the walls.
pub(crate) fn adapted_t_grid(rs: &RootSystemData, base: &[f64], holonomies: &[TorusElement]) -> Vec<f64> {
    let d = holonomies
        .iter()
        .filter(|c| classify(rs, c) == Stratum::Regular)
        .map(|c| wall_distance(rs, c))
        .fold(f64::INFINITY, f64::min);
    let scale = if d.is_finite() { (d * d / WALL_T_RATIO / base[0]).min(1.0) } else { 1.0 };
    base.iter().map(|t| t * scale).collect()
}

/// Whether the damped sum has a half-integer expansion in `t` (all holonomies
/// at the identity).
fn half_integer_expansion(holonomies: &[TorusElement]) -> bool {
    holonomies.iter().all(|c| c.coords().iter().all(|x| x.abs() < STRATUM_EPS))
}

pub(crate) struct TLimit {
    pub value: f64,
    pub error: f64,
    pub tail: f64,
    pub partials: Vec<(f64, f64)>,
}

pub(crate) fn t_limit(
    summands: &Summands,
    t_grid: &[f64],
    cutoff: Option<f64>,
    order: usize,
    sqrt_variable: bool,
) -> TLimit {
    let vals: Vec<(f64, f64)> = t_grid.iter().map(|&t| summands.damped(t, cutoff)).collect();
    let xs: Vec<f64> = t_grid.iter().map(|&t| if sqrt_variable { t.sqrt() } else { t }).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let (value, error) = extrapolate_best(&xs, &ys, order);
    TLimit {
        value,
        error,
        tail: vals.iter().map(|v| v.1).fold(0.0, f64::max),
        partials: t_grid.iter().copied().zip(ys).collect(),
    }
}

/// Damped sum `Σ_λ ∏_j χ_λ(c_j) p(λ+ρ) e^{−t p_c(λ)} / d_λ^{2g−2+s}` without
/// prefactor; returns `(value, tail_bound)`.
pub fn character_series(q: &ModuliQuery, t: f64) -> Result<(f64, f64), ModuliError> {
    if !(t > 0.0) {
        return Err(LieError::NonPositiveTime(t).into());
    }
    let cutoff = q.regularization.casimir_cutoff;
    let weights = weights_for(&q.rs, t, cutoff);
    let summands = build_summands(&q.rs, &weights, q.genus, &q.holonomies, &q.insertion)?;
    Ok(summands.damped(t, cutoff))
}

/// `|Z(G)| |G|^{2g−2+s} ∏|j(c_j)| / ((2π)^{2N} ∏|Z_{c_j}|)` for regular holonomies.
pub fn volume_prefactor(q: &ModuliQuery) -> Result<f64, ModuliError> {
    let rs = &q.rs;
    let s = q.holonomies.len() as i32;
    let n = moduli_dimension(rs, q.genus, &q.holonomies)?;
    let mut pref = rs.center_order() as f64 * rs.group_volume().powi(2 * q.genus as i32 - 2 + s)
        / (2.0 * std::f64::consts::PI).powi(2 * n as i32);
    for (i, c) in q.holonomies.iter().enumerate() {
        if classify(rs, c) != Stratum::Regular {
            return Err(ModuliError::NotRegular(i));
        }
        pref *= weyl_denominator(rs, c).norm() / rs.torus_volume();
    }
    Ok(pref)
}

/// Volume formula at parameter `t`: prefactor times the damped series.
///
/// Returns `(prefactor · series, series, prefactor, tail_bound · prefactor)`.
pub fn volume_series(q: &ModuliQuery, t: f64) -> Result<(f64, f64, f64, f64), ModuliError> {
    let pref = volume_prefactor(q)?;
    let (series, tail) = character_series(q, t)?;
    if let Some(tol) = q.regularization.casimir_cutoff.map(|_| q.regularization.tol) {
        if tail > tol * series.abs().max(1.0) {
            return Err(LieError::CutoffInsufficient {
                cutoff: q.regularization.casimir_cutoff.unwrap_or(0.0),
                tail,
                tol,
            }
            .into());
        }
    }
    Ok((pref * series, series, pref, pref * tail))
}

/// `t → 0` limit of [`volume_series`] over the adapted t-grid.
pub fn volume_limit(q: &ModuliQuery) -> Result<RegularizedSum, ModuliError> {
    let pref = volume_prefactor(q)?;
    let reg = &q.regularization;
    let grid = adapted_t_grid(&q.rs, &reg.t_grid, &q.holonomies);
    let t_min = *grid.last().expect("validated grid");
    let weights = weights_for(&q.rs, t_min, reg.casimir_cutoff);
    let summands = build_summands(&q.rs, &weights, q.genus, &q.holonomies, &q.insertion)?;
    let lim = t_limit(&summands, &grid, reg.casimir_cutoff, reg.extrapolation_order, false);
    let error = lim.error + lim.tail;
    Ok(RegularizedSum {
        partial_values: lim.partials,
        inner_value: lim.value,
        prefactor: pref,
        extrapolated_value: pref * lim.value,
        error_estimate: error,
        tail_bound: lim.tail,
        converged: error <= reg.tol * lim.value.abs().max(1.0),
        limit_order_deviation: None,
        cross_check: None,
    })
}

/// Intersection pairing at a central holonomy `u`:
/// `|Z(G)| |G|^{2g−2} / (2π)^{2N_u} · lim_{c→u} lim_{t→0} Σ χ_λ(c) p(λ+ρ) e^{−t p_c} / d_λ^{2g−1}`.
///
/// For each ε the t-limit is extrapolated first, then ε → 0. The reverse
/// order is evaluated on the base t-grid and reported as a diagnostic.
pub fn intersection_number(q: &ModuliQuery) -> Result<RegularizedSum, ModuliError> {
    if q.holonomies.len() != 1 {
        return Err(ModuliError::WrongBoundaryCount(q.holonomies.len()));
    }
    let rs = &q.rs;
    let u = &q.holonomies[0];
    if classify(rs, u) != Stratum::Central {
        return Err(ModuliError::NotCentral);
    }
    let reg = &q.regularization;
    let xi = q.direction();
    let n_u = moduli_dimension(rs, q.genus, &q.holonomies)?;
    let prefactor = rs.center_order() as f64 * rs.group_volume().powi(2 * q.genus as i32 - 2)
        / (2.0 * std::f64::consts::PI).powi(2 * n_u as i32);

    let points: Vec<TorusElement> = reg.eps_grid.iter().map(|&e| u.mul(&xi.scaled(e))).collect();
    if let Some(i) = points.iter().position(|c| classify(rs, c) != Stratum::Regular) {
        return Err(ModuliError::BadSchedule(format!(
            "eps = {} does not give a regular element",
            reg.eps_grid[i]
        )));
    }
    let grids: Vec<Vec<f64>> =
        points.iter().map(|c| adapted_t_grid(rs, &reg.t_grid, std::slice::from_ref(c))).collect();
    let t_min = grids
        .iter()
        .flat_map(|g| g.iter().copied())
        .chain(reg.t_grid.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let weights = weights_for(rs, t_min, reg.casimir_cutoff);

    let mut inner_by_eps = Vec::with_capacity(points.len());
    let mut t_errors: f64 = 0.0;
    let mut tail: f64 = 0.0;
    let mut base_table: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for (c, grid) in points.iter().zip(&grids) {
        let summands = build_summands(rs, &weights, q.genus, std::slice::from_ref(c), &q.insertion)?;
        let lim = t_limit(&summands, grid, reg.casimir_cutoff, reg.extrapolation_order, false);
        inner_by_eps.push(lim.value);
        t_errors = t_errors.max(lim.error);
        tail = tail.max(lim.tail);
        base_table.push(reg.t_grid.iter().map(|&t| summands.damped(t, reg.casimir_cutoff).0).collect());
    }
    let (inner, eps_error) = extrapolate_best(&reg.eps_grid, &inner_by_eps, reg.extrapolation_order);

    // reverse order: ε → 0 at each base t, then t → 0
    let partial_values: Vec<(f64, f64)> = reg
        .t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let col: Vec<f64> = base_table.iter().map(|row| row[k]).collect();
            (t, extrapolate_best(&reg.eps_grid, &col, reg.extrapolation_order).0)
        })
        .collect();
    let xs: Vec<f64> = partial_values.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = partial_values.iter().map(|p| p.1).collect();
    let (reverse, _) = extrapolate_best(&xs, &ys, reg.extrapolation_order);

    let error = eps_error + t_errors + tail;
    let converged = error <= reg.tol * inner.abs().max(1.0);
    let result = RegularizedSum {
        partial_values,
        inner_value: inner,
        prefactor,
        extrapolated_value: prefactor * inner,
        error_estimate: error,
        tail_bound: tail,
        converged,
        limit_order_deviation: Some((inner - reverse).abs()),
        cross_check: None,
    };
    if !converged {
        return Err(ModuliError::NonConvergent { value: inner, error });
    }
    Ok(result)
}

/// The t-limit of the raw character series, for holonomies of any stratum.
pub fn character_series_limit(q: &ModuliQuery) -> Result<RegularizedSum, ModuliError> {
    let reg = &q.regularization;
    let grid = adapted_t_grid(&q.rs, &reg.t_grid, &q.holonomies);
    let t_min = *grid.last().expect("validated grid");
    let weights = weights_for(&q.rs, t_min, reg.casimir_cutoff);
    let summands = build_summands(&q.rs, &weights, q.genus, &q.holonomies, &q.insertion)?;
    let sqrt_var = half_integer_expansion(&q.holonomies);
    let lim = t_limit(&summands, &grid, reg.casimir_cutoff, reg.extrapolation_order, sqrt_var);
    let error = lim.error + lim.tail;
    Ok(RegularizedSum {
        partial_values: lim.partials,
        inner_value: lim.value,
        prefactor: 1.0,
        extrapolated_value: lim.value,
        error_estimate: error,
        tail_bound: lim.tail,
        converged: error <= reg.tol * lim.value.abs().max(1.0),
        limit_order_deviation: None,
        cross_check: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroups::{build_root_system, RootType};
    use std::f64::consts::PI;

    fn su2() -> Arc<RootSystemData> {
        Arc::new(build_root_system(RootType::A, 1).unwrap())
    }

    #[test]
    fn dimensions() {
        let rs = su2();
        let central = TorusElement::a1_angle(PI);
        let regular = TorusElement::a1_angle(1.0);
        assert_eq!(moduli_dimension(&rs, 2, &[central.clone()]).unwrap(), 3);
        assert_eq!(moduli_dimension(&rs, 2, &[regular]).unwrap(), 4);
        assert_eq!(moduli_dimension(&rs, 3, &[central]).unwrap(), 6);
        let a2 = build_root_system(RootType::A, 2).unwrap();
        let mixed = TorusElement::new(vec![0.5, 0.5, -1.0]);
        assert_eq!(moduli_dimension(&a2, 2, &[mixed]), Err(ModuliError::IntermediateStratum(0)));
    }

    #[test]
    fn query_validation() {
        let rs = su2();
        let c = vec![TorusElement::a1_angle(1.0)];
        let one = InsertionPolynomial::one(1);
        assert_eq!(
            ModuliQuery::new(rs.clone(), 1, c.clone(), one.clone(), Regularization::default()).err(),
            Some(ModuliError::BadGenus(1))
        );
        let mut bad = Regularization::default();
        bad.t_grid = vec![0.1, 0.2];
        assert!(matches!(
            ModuliQuery::new(rs.clone(), 2, c.clone(), one.clone(), bad),
            Err(ModuliError::BadSchedule(_))
        ));
        assert!(matches!(
            ModuliQuery::new(rs, 2, c, InsertionPolynomial::one(2), Regularization::default()),
            Err(ModuliError::InsertionArity { .. })
        ));
    }

    #[test]
    fn central_alternating_series() {
        let rs = su2();
        let q = ModuliQuery::new(
            rs,
            2,
            vec![TorusElement::a1_angle(PI)],
            InsertionPolynomial::one(1),
            Regularization::default(),
        )
        .unwrap();
        let lim = character_series_limit(&q).unwrap();
        assert!((lim.inner_value - PI * PI / 12.0).abs() < 1e-8, "{}", lim.inner_value);
    }

    #[test]
    fn large_t_keeps_trivial_term() {
        let rs = su2();
        let q = ModuliQuery::new(
            rs,
            2,
            vec![TorusElement::a1_angle(1.0)],
            InsertionPolynomial::one(1),
            Regularization::default(),
        )
        .unwrap();
        let (v, _) = character_series(&q, 400.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }
}
