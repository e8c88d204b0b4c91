use gauss_quad::GaussLegendre;
use locus_core::liegroups::{
    build_root_system, casimir, cutoff_for_tolerance, enumerate_weights, heat_kernel,
    weyl_character, weyl_dimension, DominantWeight, RootSystemData, RootType, TorusElement,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::f64::consts::PI;

fn su2() -> RootSystemData {
    build_root_system(RootType::A, 1).unwrap()
}

/// Normalized Haar integral of a class function on SU(2) via the Weyl
/// integration formula, `(1/π) ∫_0^{2π} f(θ) sin²θ dθ`.
fn su2_haar<F: Fn(f64) -> f64>(f: F) -> f64 {
    let quad = GaussLegendre::new(120).unwrap();
    quad.integrate(0.0, 2.0 * PI, |theta| f(theta) * theta.sin().powi(2)) / PI
}

fn chi(rs: &RootSystemData, n: u32, theta: f64) -> f64 {
    let w = DominantWeight::new(rs, &[n]).unwrap();
    weyl_character(rs, &w, &TorusElement::a1_angle(theta)).unwrap().re
}

#[test]
fn su2_heat_kernel_integrates_to_one() {
    let rs = su2();
    let t = 0.5;
    let cutoff = cutoff_for_tolerance(&rs, t, 1e-11).unwrap();
    let total = rs.group_volume()
        * su2_haar(|theta| {
            heat_kernel(&rs, t, &TorusElement::a1_angle(theta), cutoff, None).unwrap().value
        });
    assert!((total - 1.0).abs() < 1e-8, "{total}");
}

#[test]
fn su2_heat_kernel_semigroup() {
    let rs = su2();
    let (t, s) = (0.5f64, 0.5f64);
    let cutoff = cutoff_for_tolerance(&rs, t.min(s), 1e-11).unwrap();
    let h = |time: f64, theta: f64| {
        heat_kernel(&rs, time, &TorusElement::a1_angle(theta), cutoff, Some(1e-11)).unwrap().value
    };
    let lhs = rs.group_volume() * su2_haar(|theta| h(t, theta) * h(s, -theta));
    let rhs = h(t + s, 0.0);
    assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
}

#[test]
fn su2_character_orthogonality() {
    let rs = su2();
    for a in 0..8u32 {
        for b in 0..8u32 {
            let ip = su2_haar(|theta| chi(&rs, a, theta) * chi(&rs, b, theta));
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((ip - expected).abs() < 1e-8, "⟨χ{a}, χ{b}⟩ = {ip}");
        }
    }
}

#[test]
fn heat_kernel_is_symmetric() {
    let rs = su2();
    for &theta in &[0.2, 1.3, 2.9] {
        let g = TorusElement::a1_angle(theta);
        let a = heat_kernel(&rs, 0.3, &g, 400.0, None).unwrap().value;
        let b = heat_kernel(&rs, 0.3, &g.inverse(), 400.0, None).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn heat_kernel_concentrates_as_time_decreases() {
    let rs = su2();
    let e = TorusElement::identity(&rs);
    let mut prev = 0.0;
    for &t in &[2.0, 1.0, 0.5, 0.25, 0.1, 0.05] {
        let cutoff = cutoff_for_tolerance(&rs, t, 1e-9).unwrap();
        let v = heat_kernel(&rs, t, &e, cutoff, None).unwrap().value;
        assert!(v > prev, "t={t}: {v} ≤ {prev}");
        prev = v;
    }
}

#[test]
fn increasing_cutoff_stays_within_tail_bound() {
    let rs = su2();
    let g = TorusElement::a1_angle(0.8);
    let coarse = heat_kernel(&rs, 0.2, &g, 60.0, None).unwrap();
    let fine = heat_kernel(&rs, 0.2, &g, 2000.0, None).unwrap();
    assert!((coarse.value - fine.value).abs() <= coarse.tail_bound);
}

#[test]
fn a2_heat_kernel_integrates_to_one() {
    // Weyl integration over the two-torus, trapezoid rule (spectrally accurate
    // for smooth periodic integrands).
    let rs = build_root_system(RootType::A, 2).unwrap();
    let t = 0.5;
    let cutoff = cutoff_for_tolerance(&rs, t, 1e-10).unwrap();
    let weights = enumerate_weights(&rs, cutoff);
    let n = 48;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            // offset grid avoids the walls
            let a = 2.0 * PI * (i as f64 + 0.37) / n as f64;
            let b = 2.0 * PI * (j as f64 + 0.61) / n as f64;
            let c = TorusElement::new(vec![a, b, -a - b]);
            let jac = locus_core::liegroups::weyl_denominator(&rs, &c).norm_sqr();
            let h: f64 = weights
                .iter()
                .map(|w| {
                    w.dimension_f64()
                        * weyl_character(&rs, w, &c).unwrap().re
                        * (-t * w.casimir()).exp()
                })
                .sum::<f64>()
                / rs.group_volume();
            total += h * jac;
        }
    }
    let haar = total / (n * n) as f64 / 6.0;
    assert!((rs.group_volume() * haar - 1.0).abs() < 1e-8, "{}", rs.group_volume() * haar);
}

#[test]
fn a1_enumeration_count() {
    let rs = su2();
    for &cutoff in &[0.1, 1.0, 7.5, 100.0, 1234.5] {
        let count = enumerate_weights(&rs, cutoff).len();
        // p_c(n) = ((n+1)² − 1)/8
        let expected = (0..).take_while(|&n: &u64| ((n + 1) * (n + 1)) as f64 <= 1.0 + 8.0 * cutoff).count();
        assert_eq!(count, expected, "cutoff {cutoff}");
    }
}

#[test]
fn a2_enumeration_matches_box_scan() {
    let rs = build_root_system(RootType::A, 2).unwrap();
    // p_c(p, q) = (p² + q² + pq + 3p + 3q)/9, d = (p+1)(q+1)(p+q+2)/2
    let cutoff = 6.0;
    let mut expected = Vec::new();
    for p in 0u32..40 {
        for q in 0u32..40 {
            let num = p * p + q * q + p * q + 3 * p + 3 * q;
            if f64::from(num) / 9.0 <= cutoff {
                expected.push((vec![p, q], BigRational::new(num.into(), 9.into()), (p + 1) * (q + 1) * (p + q + 2) / 2));
            }
        }
    }
    let got = enumerate_weights(&rs, cutoff);
    assert_eq!(got.len(), expected.len());
    for (labels, cas, dim) in expected {
        let w = got.iter().find(|w| w.labels() == labels.as_slice()).expect("missing weight");
        assert_eq!(*w.casimir_exact(), cas);
        assert_eq!(*w.dimension(), BigInt::from(dim));
    }
}

#[test]
fn adjoint_casimir_is_one() {
    // the Killing form is the trace form of the adjoint representation
    for (t, r) in [(RootType::A, 1), (RootType::A, 2), (RootType::B, 2), (RootType::C, 3), (RootType::D, 4)] {
        let rs = build_root_system(t, r).unwrap();
        let highest = rs
            .positive_roots()
            .iter()
            .filter(|a| rs.is_dominant(a))
            .max_by(|a, b| rs.inner(a, a).cmp(&rs.inner(b, b)))
            .unwrap()
            .clone();
        let w = DominantWeight::from_coordinates(&rs, &highest).unwrap();
        assert_eq!(w.casimir(), 1.0, "{t}{r}");
        assert_eq!(*w.dimension(), BigInt::from(rs.dim_g()), "{t}{r}");
    }
}

#[test]
fn enumeration_has_no_duplicates() {
    let rs = build_root_system(RootType::B, 2).unwrap();
    let ws = enumerate_weights(&rs, 5.0);
    let mut labels: Vec<_> = ws.iter().map(|w| w.labels().to_vec()).collect();
    labels.sort();
    labels.dedup();
    assert_eq!(labels.len(), ws.len());
    assert!(ws.iter().all(|w| w.casimir() <= 5.0));
}

fn root_system_strategy() -> impl Strategy<Value = (RootType, usize)> {
    prop_oneof![
        Just((RootType::A, 1)),
        Just((RootType::A, 2)),
        Just((RootType::A, 3)),
        Just((RootType::B, 2)),
        Just((RootType::C, 3)),
        Just((RootType::D, 4)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn casimir_increases_along_fundamental_rays(
        (t, r) in root_system_strategy(),
        seed in proptest::collection::vec(0u32..6, 4),
        i in 0usize..4,
    ) {
        let rs = build_root_system(t, r).unwrap();
        let labels: Vec<u32> = seed[..r].to_vec();
        let i = i % r;
        let mut bumped = labels.clone();
        bumped[i] += 1;
        let a = DominantWeight::new(&rs, &labels).unwrap();
        let b = DominantWeight::new(&rs, &bumped).unwrap();
        prop_assert!(b.casimir_exact() > a.casimir_exact());
    }

    #[test]
    fn caches_match_recomputation(
        (t, r) in root_system_strategy(),
        seed in proptest::collection::vec(0u32..8, 4),
    ) {
        let rs = build_root_system(t, r).unwrap();
        let w = DominantWeight::new(&rs, &seed[..r]).unwrap();
        prop_assert_eq!(w.casimir(), casimir(&rs, &w));
        let d = weyl_dimension(&rs, &w).unwrap();
        prop_assert_eq!(w.dimension(), &d);
        prop_assert!(d >= BigInt::from(1));
    }

    #[test]
    fn weyl_group_is_closed((t, r) in root_system_strategy(), i in 0usize..10_000, j in 0usize..10_000) {
        let rs = build_root_system(t, r).unwrap();
        let wg = rs.weyl_group();
        let prod = wg[i % wg.len()].compose(&wg[j % wg.len()]);
        prop_assert!(wg.contains(&prod));
    }

    #[test]
    fn rho_is_half_sum_of_positive_roots((t, r) in root_system_strategy()) {
        let rs = build_root_system(t, r).unwrap();
        for (k, x) in rs.rho().iter().enumerate() {
            let s: BigRational = rs.positive_roots().iter().map(|a| a[k].clone()).sum();
            prop_assert_eq!(x * BigRational::from_integer(2.into()), s);
        }
    }

    #[test]
    fn su2_character_closed_form(n in 0u32..60, theta in 0.01f64..3.13) {
        let rs = su2();
        let expected = ((f64::from(n) + 1.0) * theta).sin() / theta.sin();
        prop_assert!((chi(&rs, n, theta) - expected).abs() < 1e-9 * (f64::from(n) + 1.0));
    }
}
