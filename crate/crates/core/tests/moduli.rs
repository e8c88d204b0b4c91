use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use locus_core::liegroups::{build_root_system, RootSystemData, RootType, TorusElement};
use locus_core::moduli::*;

fn su2() -> Arc<RootSystemData> {
    Arc::new(build_root_system(RootType::A, 1).unwrap())
}

fn query(c: f64, insertion: InsertionPolynomial) -> ModuliQuery {
    ModuliQuery::new(su2(), 2, vec![TorusElement::a1_angle(c)], insertion, Regularization::default()).unwrap()
}

/// Abel sum of `Σ_{m≥1} (−1)^{m+1} m^k`, i.e. the Dirichlet eta function at `−k`,
/// from `η(−k) = (2^{k+1} − 1) B_{k+1} / (k+1)` with Bernoulli numbers.
fn eta_negative(k: u32) -> f64 {
    // B_0..B_5 with B_1 = +1/2, which makes the formula hold at k = 0 too
    let bernoulli = [1.0, 0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0];
    let n = (k + 1) as usize;
    (2f64.powi(n as i32) - 1.0) * bernoulli[n] / n as f64
}

#[test]
fn dimension_examples() {
    let rs = su2();
    assert_eq!(moduli_dimension(&rs, 2, &[TorusElement::a1_angle(PI)]).unwrap(), 3);
    assert_eq!(moduli_dimension(&rs, 2, &[TorusElement::a1_angle(0.7)]).unwrap(), 4);
    assert_eq!(moduli_dimension(&rs, 3, &[TorusElement::a1_angle(PI)]).unwrap(), 6);
    assert_eq!(moduli_dimension(&rs, 2, &[TorusElement::a1_angle(0.7), TorusElement::a1_angle(1.1)]).unwrap(), 5);
}

#[test]
fn intersection_constant_insertion() {
    let start = Instant::now();
    let r = intersection_number(&query(PI, InsertionPolynomial::one(1))).unwrap();
    assert!(start.elapsed().as_secs() < 60);
    assert!(r.converged);
    assert!((r.inner_value - PI * PI / 12.0).abs() < 1e-6, "{}", r.inner_value);
    // |Z| |G|^2 / (2π)^6 with |G| = 32√2 π²
    let g = 32.0 * 2f64.sqrt() * PI * PI;
    assert!((r.prefactor - 2.0 * g * g / (2.0 * PI).powi(6)).abs() < 1e-12 * r.prefactor);
    assert!(r.limit_order_deviation.unwrap() < 1e-4);
}

#[test]
fn intersection_quadratic_insertion() {
    let r = intersection_number(&query(PI, InsertionPolynomial::power(1, 0, 2))).unwrap();
    assert!((r.inner_value - 0.5).abs() < 1e-6, "{}", r.inner_value);
    assert!((r.inner_value - eta_negative(0)).abs() < 1e-6);
}

#[test]
fn intersection_quartic_insertion_vanishes() {
    let start = Instant::now();
    let r = intersection_number(&query(PI, InsertionPolynomial::power(1, 0, 4))).unwrap();
    assert!(start.elapsed().as_secs() < 60);
    assert!((r.inner_value - eta_negative(2)).abs() < 1e-6, "{}", r.inner_value);
    assert!(r.inner_value.abs() < 1e-6);
}

#[test]
fn intersection_rejects_regular_holonomy() {
    assert_eq!(
        intersection_number(&query(1.0, InsertionPolynomial::one(1))).err(),
        Some(ModuliError::NotCentral)
    );
}

/// Sum of `sin(mθ)/m³` on `(0, 2π)` as a Bernoulli polynomial.
fn clausen3(theta: f64) -> f64 {
    PI * PI * theta / 6.0 - PI * theta * theta / 4.0 + theta.powi(3) / 12.0
}

#[test]
fn regular_volume_matches_bernoulli_polynomial() {
    for &theta in &[0.6, 1.7, 2.9, 3.6, 5.0] {
        let q = query(theta, InsertionPolynomial::one(1));
        let lim = volume_limit(&q).unwrap();
        // Σ χ_{m−1}(θ)/m² = Σ sin(mθ)/(m³ sin θ)... times m
        let expected = clausen3(theta) / theta.sin();
        assert!((lim.inner_value - expected).abs() < 1e-7, "θ={theta}: {} vs {expected}", lim.inner_value);
        assert!(lim.converged);
    }
}

#[test]
fn volume_series_has_prefactor_and_large_t_limit() {
    let q = query(1.3, InsertionPolynomial::one(1));
    let (full, series, pref, tail) = volume_series(&q, 400.0).unwrap();
    assert!((series - 1.0).abs() < 1e-15);
    assert!((full - pref).abs() < 1e-12 * pref);
    assert!(tail >= 0.0);
    assert!(volume_series(&query(PI, InsertionPolynomial::one(1)), 1.0).is_err());
    assert!(volume_series(&q, 0.0).is_err());
}

#[test]
fn tail_bound_covers_cutoff_change() {
    let q = query(2.2, InsertionPolynomial::one(1));
    let t = 0.05;
    let (v0, tail0) = character_series(&q, t).unwrap();
    let mut bigger = q.clone();
    bigger.regularization.casimir_cutoff = Some(3.0 * 60.0 / t);
    let (v1, _) = character_series(&bigger, t).unwrap();
    assert!((v1 - v0).abs() <= tail0 + 1e-15, "{v0} {v1} {tail0}");
}

#[test]
fn series_monotone_in_t_at_central_point() {
    let q = query(PI, InsertionPolynomial::one(1));
    let ts = [1.0, 0.5, 0.25, 0.1, 0.05];
    let vals: Vec<f64> = ts.iter().map(|&t| character_series(&q, t).unwrap().0).collect();
    // Σ(−1)^{m+1} e^{−t(m²−1)/8}/m² falls from 1 (t = ∞) to π²/12 (t → 0)
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(vals.iter().all(|&v| v > PI * PI / 12.0 && v < 1.0));
}

#[test]
fn two_boundaries_degenerate_to_one() {
    // c₂ = exp(ε) → e: χ_λ(c₂)/d_λ → 1, so the s=2 series tends to the s=1 series,
    // and the extra prefactor |G| |j(c₂)|/|T| is tracked explicitly.
    let rs = su2();
    let c1 = TorusElement::a1_angle(1.9);
    let one = query(1.9, InsertionPolynomial::one(1));
    let v1 = volume_limit(&one).unwrap();
    let mut prev_gap = f64::INFINITY;
    for &eps in &[0.2, 0.1, 0.05] {
        let q = one.with_holonomies(vec![c1.clone(), TorusElement::a1_angle(eps)]).unwrap();
        let v2 = volume_limit(&q).unwrap();
        let extra = rs.group_volume() * (2.0 * eps.sin()).abs() / rs.torus_volume() / (2.0 * PI).powi(2);
        let ratio = v2.prefactor / (v1.prefactor * extra);
        assert!((ratio - 1.0).abs() < 1e-12);
        let gap = (v2.inner_value - v1.inner_value).abs();
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
    assert!(prev_gap < 5e-3);
}

#[test]
fn equal_boundaries_vary_continuously() {
    let base = query(1.0, InsertionPolynomial::one(1));
    let vals: Vec<f64> = (0..8)
        .map(|k| {
            let c = TorusElement::a1_angle(1.0 + 0.02 * k as f64);
            volume_limit(&base.with_holonomies(vec![c.clone(), c]).unwrap()).unwrap().extrapolated_value
        })
        .collect();
    let max_step = vals.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max_step < 0.05 * scale, "{vals:?}");
}

#[test]
fn odd_derivatives_vanish_at_central_point() {
    let q = query(PI, InsertionPolynomial::one(1));
    let dir = TorusElement::a1_angle(1.0);
    for k in [1, 3] {
        let d = derivative_insertion(&q, &dir, k, DerivativeTarget::CharacterSum).unwrap();
        assert!(d.extrapolated_value.abs() < 1e-6, "order {k}: {}", d.extrapolated_value);
    }
}

#[test]
fn symbolic_and_numeric_first_derivative_agree() {
    for &theta in &[PI, 2.0] {
        let q = query(theta, InsertionPolynomial::one(1));
        let d = derivative_insertion(&q, &TorusElement::a1_angle(1.0), 1, DerivativeTarget::CharacterSum).unwrap();
        let numeric = d.cross_check.expect("A1 has a symbolic path");
        assert!((d.extrapolated_value - numeric).abs() < 1e-6);
    }
}

#[test]
fn second_derivative_at_central_point() {
    // d²/dε² Σ (−1)^{m+1} sin(mε)/(m³ sin ε) at 0 = Σ(−1)^{m+1}(1 − m²)/(3m²)
    let q = query(PI, InsertionPolynomial::one(1));
    let d = derivative_insertion(&q, &TorusElement::a1_angle(1.0), 2, DerivativeTarget::CharacterSum).unwrap();
    let expected = (PI * PI / 12.0 - 0.5) / 3.0;
    assert!((d.extrapolated_value - expected).abs() < 1e-6, "{}", d.extrapolated_value);
}

#[test]
fn volume_derivative_is_termwise() {
    // vol(θ) = P · 2σ Σ sin(mθ)/m³ / (2 sin θ)·... reduces to P·σ·clausen3(θ)·(2/|j|)·|j|/2
    for &theta in &[1.1, 4.4] {
        let q = query(theta, InsertionPolynomial::one(1));
        let pref = volume_prefactor(&q).unwrap();
        let sigma = theta.sin().signum();
        let p_reduced = pref / (2.0 * theta.sin().abs());
        let d = derivative_insertion(&q, &TorusElement::a1_angle(1.0), 1, DerivativeTarget::VolumeSeries).unwrap();
        let expected = p_reduced * 2.0 * sigma * (PI * PI / 6.0 - PI * theta / 2.0 + theta * theta / 4.0);
        assert!((d.extrapolated_value - expected).abs() < 1e-6 * expected.abs().max(1.0), "θ={theta}");
    }
}

fn alcove_grid() -> Vec<f64> {
    (0..200).map(|k| 2.0 * PI * (k as f64 + 0.5) / 200.0).collect()
}

#[test]
fn piecewise_fit_of_genus_two_volume() {
    let q = query(1.0, InsertionPolynomial::one(1));
    let (pieces, values) = piecewise_poly_fit(&q, &TorusElement::a1_angle(1.0), &alcove_grid(), 1e-6).unwrap();
    assert_eq!(values.len(), 200);
    assert_eq!(pieces.len(), 2, "{pieces:?}");
    assert!(pieces[0].end < PI && pieces[1].start > PI);
    for p in &pieces {
        assert!(p.degree <= 4);
        assert!(p.residual < 1e-6);
    }
    // the first piece is a cubic proportional to the Bernoulli-type polynomial
    let x = pieces[0].coefficients_in_x();
    let ratio = x[1] / (PI * PI / 6.0);
    assert!((x[2] / ratio + PI / 4.0).abs() < 1e-4);
    assert!((x[3] / ratio - 1.0 / 12.0).abs() < 1e-4);
    assert!(x[0].abs() < 1e-5 * ratio.abs());
}

#[test]
fn zero_insertion_fits_zero_polynomial() {
    let q = query(1.0, InsertionPolynomial::zero(1));
    let grid: Vec<f64> = alcove_grid().into_iter().step_by(10).collect();
    let (pieces, values) = piecewise_poly_fit(&q, &TorusElement::a1_angle(1.0), &grid, 1e-12).unwrap();
    assert!(values.iter().all(|v| *v == 0.0));
    assert_eq!(pieces.len(), 1);
    assert!(pieces[0].coeffs.iter().all(|c| *c == 0.0));
}

#[test]
fn monte_carlo_matches_character_sum() {
    let rs = su2();
    let c = TorusElement::a1_angle(2.0);
    for &t in &[1.0, 0.5, 0.25] {
        let mc = holonomy_integral_mc(&rs, 2, &c, t, 100_000, 20241019, HeatCentre::Identity).unwrap();
        let series = holonomy_integral_series(&rs, 2, &c, t, HeatCentre::Identity).unwrap();
        assert!(
            (mc.estimate - series).abs() < 3.0 * mc.standard_error,
            "t={t}: mc {} ± {} vs {series}",
            mc.estimate,
            mc.standard_error
        );
    }
}

#[test]
fn monte_carlo_holonomy_centre() {
    let rs = su2();
    let c = TorusElement::a1_angle(0.8);
    let mc = holonomy_integral_mc(&rs, 2, &c, 0.5, 100_000, 5, HeatCentre::Holonomy).unwrap();
    let series = holonomy_integral_series(&rs, 2, &c, 0.5, HeatCentre::Holonomy).unwrap();
    assert!((mc.estimate - series).abs() < 3.0 * mc.standard_error);
}

#[test]
fn monte_carlo_large_t_and_scaling() {
    let rs = su2();
    let c = TorusElement::a1_angle(1.2);
    // only the trivial representation survives: I = |G|^{2g} vol(O_c) / |G|
    let big = holonomy_integral_mc(&rs, 2, &c, 200.0, 20_000, 3, HeatCentre::Identity).unwrap();
    let g = rs.group_volume();
    let orbit = g * (2.0 * 1.2f64.sin()).powi(2) / rs.torus_volume();
    assert!((big.estimate - g.powi(3) * orbit).abs() < 1e-9 * big.estimate);

    let a = holonomy_integral_mc(&rs, 2, &c, 0.5, 50_000, 11, HeatCentre::Identity).unwrap();
    let b = holonomy_integral_mc(&rs, 2, &c, 0.5, 100_000, 11, HeatCentre::Identity).unwrap();
    let ratio = a.standard_error / b.standard_error;
    assert!((ratio - 2f64.sqrt()).abs() < 0.1, "{ratio}");
}

#[test]
fn monte_carlo_is_deterministic() {
    let rs = su2();
    let c = TorusElement::a1_angle(2.5);
    let a = holonomy_integral_mc(&rs, 2, &c, 1.0, 10_000, 99, HeatCentre::Identity).unwrap();
    let b = holonomy_integral_mc(&rs, 2, &c, 1.0, 10_000, 99, HeatCentre::Identity).unwrap();
    assert_eq!(a, b);
}
