use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use locus_core::exactnum::{int, rat, BigRational, Series};
use locus_core::mirror::{
    cy3_pipeline, hg_series, instanton_extract, local_conifold, quintic_pipeline, toric_identity_check,
    BundleSpec, Convention, MirrorError, ToricTarget,
};
use locus_oracles::localization::{conifold_invariant, multiple_cover_inverse, quintic_invariant};
use locus_oracles::schubert::euler_sym_dual_tautological;

fn big(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

#[test]
fn quintic_lines_agree_with_schubert_calculus() {
    let gw = quintic_pipeline(3).unwrap();
    let oracle = big(euler_sym_dual_tautological(5, 5));
    assert_eq!(gw.invariants[0], oracle);
    assert_eq!(gw.instanton_numbers[0], oracle);
}

#[test]
fn quintic_conics_agree_with_graph_sum() {
    let start = Instant::now();
    let gw = quintic_pipeline(3).unwrap();
    assert!(start.elapsed().as_secs() < 60);
    assert_eq!(gw.invariants[1], quintic_invariant(2));
    let n = multiple_cover_inverse(&[quintic_invariant(1), quintic_invariant(2)]);
    assert_eq!(gw.instanton_numbers[1], n[1]);
    assert_eq!(gw.instanton_numbers[1], int(609250));
}

#[test]
fn quintic_twisted_cubics_agree_with_graph_sum() {
    let gw = quintic_pipeline(3).unwrap();
    assert_eq!(gw.invariants[2], quintic_invariant(3));
}

#[test]
fn quintic_instanton_numbers_are_integral() {
    let gw = quintic_pipeline(6).unwrap();
    assert!(gw.is_integral(), "violations at {:?}", gw.integrality_violations());
    for (d, k) in gw.invariants.iter().enumerate() {
        let d3 = BigInt::from((d + 1).pow(3));
        assert!(
            (k * big(d3)).is_integer(),
            "K_{} = {k} has a denominator beyond d³",
            d + 1
        );
    }
}

#[test]
fn quintic_classical_coupling_and_mirror_map_start() {
    let gw = quintic_pipeline(2).unwrap();
    assert_eq!(gw.kappa, int(5));
    assert_eq!(gw.f0[0], int(1));
    // f0 = Σ (5d)!/(d!)^5 q^d once normalized
    assert_eq!(gw.f0[1], int(120));
    assert_eq!(gw.f0[2], big(factorial(10) / factorial(2).pow(5)));
    assert!(gw.mirror_map[0].is_zero());
}

#[test]
fn conventions_give_the_same_invariants() {
    let p4 = ToricTarget::projective_space(4);
    let plus = cy3_pipeline(&p4, &BundleSpec::quintic(), 4, Convention::Plus).unwrap();
    let minus = cy3_pipeline(&p4, &BundleSpec::quintic(), 4, Convention::Minus).unwrap();
    assert_eq!(plus.invariants, minus.invariants);
    let p1 = ToricTarget::local_p1();
    let plus = cy3_pipeline(&p1, &BundleSpec::conifold(), 4, Convention::Plus).unwrap();
    let minus = cy3_pipeline(&p1, &BundleSpec::conifold(), 4, Convention::Minus).unwrap();
    assert_eq!(plus.invariants, minus.invariants);
}

#[test]
fn conifold_obeys_multiple_cover_law() {
    let start = Instant::now();
    let gw = local_conifold(6).unwrap();
    assert!(start.elapsed().as_secs() < 10);
    for (i, k) in gw.invariants.iter().enumerate() {
        let d = (i + 1) as i64;
        assert_eq!(k * int(d * d * d), int(1), "degree {d}");
    }
    assert_eq!(gw.invariants[0], conifold_invariant(1));
    assert_eq!(gw.invariants[1], conifold_invariant(2));
    assert_eq!(gw.invariants[2], conifold_invariant(3));
    let mut expected = vec![int(0); 6];
    expected[0] = int(1);
    assert_eq!(gw.instanton_numbers, expected);
}

#[test]
fn quintic_bare_sum_constant_terms() {
    let p4 = ToricTarget::projective_space(4);
    for convention in [Convention::Plus, Convention::Minus] {
        let hg = hg_series(&p4, &BundleSpec::quintic(), 4, convention).unwrap();
        for d in 0..=4u64 {
            let expected = factorial(5 * d) / factorial(d).pow(5);
            assert_eq!(hg.reduced_term(&[d as u32]).unwrap().constant_term(), big(expected));
        }
    }
}

#[test]
fn cutoff_zero_leaves_the_exponential_prefactor() {
    let p4 = ToricTarget::projective_space(4);
    let hg = hg_series(&p4, &BundleSpec::quintic(), 0, Convention::Minus).unwrap();
    let p1 = ToricTarget::local_p1();
    let bare = hg_series(&p1, &BundleSpec::conifold(), 0, Convention::Minus).unwrap();
    let e = bare.expanded().unwrap();
    let mut fact = BigRational::one();
    for k in 0..=3u32 {
        if k > 0 {
            fact *= int(i64::from(k));
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        assert_eq!(e.coeff(&[k, k]).coeff_or_zero(0), int(sign) / &fact);
    }
    assert_eq!(e.terms().count(), 4);
    // the quintic d = 0 term is the Euler class 5H times the same prefactor
    assert_eq!(hg.expanded().unwrap().coeff(&[2, 1]).coeff_or_zero(0), int(-5));
}

#[test]
fn conifold_degree_one_summand_by_hand() {
    // (−H)² / (H − 1)² = H² (1 + 2H + …) in Q[H]/(H⁴)
    let p1 = ToricTarget::local_p1();
    let hg = hg_series(&p1, &BundleSpec::conifold(), 1, Convention::Minus).unwrap();
    let t = hg.term(&[1]).unwrap();
    assert_eq!(t.coeff(&[0]), int(0));
    assert_eq!(t.coeff(&[1]), int(0));
    assert_eq!(t.coeff(&[2]), int(1));
    assert_eq!(t.coeff(&[3]), int(2));
}

#[test]
fn quintic_identity_vanishes_to_order_three() {
    let gw = quintic_pipeline(3).unwrap();
    let p4 = ToricTarget::projective_space(4);
    let report = toric_identity_check(&p4, &BundleSpec::quintic(), &gw.invariants, 3).unwrap();
    assert_eq!(report.passing, Some(Convention::Minus));
    assert!(report.residual_is_zero(Convention::Minus));
    assert!(!report.residual_is_zero(Convention::Plus));
}

#[test]
fn identity_at_first_order_uses_only_lines() {
    let p4 = ToricTarget::projective_space(4);
    let k1 = big(euler_sym_dual_tautological(5, 5));
    let report = toric_identity_check(&p4, &BundleSpec::quintic(), &[k1.clone()], 1).unwrap();
    assert_eq!(report.passing, Some(Convention::Minus));
    let wrong = toric_identity_check(&p4, &BundleSpec::quintic(), &[k1 + int(1)], 1).unwrap();
    assert_eq!(wrong.passing, None);
}

#[test]
fn identity_holds_for_the_conifold() {
    let p1 = ToricTarget::local_p1();
    let k: Vec<BigRational> = (1..=4).map(|d| rat(1, d * d * d)).collect();
    let report = toric_identity_check(&p1, &BundleSpec::conifold(), &k, 4).unwrap();
    assert_eq!(report.passing, Some(Convention::Minus));
}

#[test]
fn malformed_inputs_are_rejected() {
    let p4 = ToricTarget::projective_space(4);
    let quartic = BundleSpec::new(&p4, vec![vec![4]], vec![]).unwrap();
    assert_eq!(cy3_pipeline(&p4, &quartic, 2, Convention::Plus), Err(MirrorError::NotCalabiYau));
    let p3 = ToricTarget::projective_space(3);
    let two = BundleSpec::new(&p3, vec![vec![2], vec![2]], vec![]).unwrap();
    assert!(matches!(
        toric_identity_check(&p3, &two, &[int(0)], 1),
        Err(MirrorError::DegreeMismatch { euler_degree: 2, expected: 0 })
    ));
    assert!(matches!(BundleSpec::new(&p4, vec![vec![-5]], vec![]), Err(MirrorError::InvalidBundle(_))));
    assert!(quintic_pipeline(1).is_err());
}

#[test]
fn extraction_examples() {
    let n = instanton_extract(&[int(7), int(3), int(5)]);
    assert_eq!(n[0], int(7));
    assert_eq!(n[1], int(3) - rat(7, 8));
    assert_eq!(n[2], int(5) - rat(7, 27));
}

fn series(coeffs: &[BigRational], var: &str) -> Series<BigRational> {
    Series::from_coeffs(var, coeffs.len(), coeffs.iter().cloned().enumerate())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn truncation_growth_keeps_earlier_invariants(lo in 2usize..4, extra in 1usize..3) {
        let small = quintic_pipeline(lo).unwrap();
        let large = quintic_pipeline(lo + extra).unwrap();
        prop_assert_eq!(&small.invariants[..], &large.invariants[..lo]);
        prop_assert_eq!(&small.mirror_map[..], &large.mirror_map[..=lo]);
    }

    #[test]
    fn conifold_truncation_growth(lo in 1usize..5, extra in 1usize..3) {
        let small = local_conifold(lo).unwrap();
        let large = local_conifold(lo + extra).unwrap();
        prop_assert_eq!(&small.invariants[..], &large.invariants[..lo]);
    }

    #[test]
    fn mirror_map_round_trip(order in 2usize..6) {
        let gw = quintic_pipeline(order).unwrap();
        let n = order + 1;
        let g = series(&gw.mirror_map, "q");
        let q_of_big_q = series(&gw.inverse_mirror_map, "Q");
        // Q(q) = q e^{G(q)}; Q(q(Q)) = Q
        let big_q = Series::variable("q", n).mul(&g.exp().unwrap());
        let round = big_q.compose(&q_of_big_q).unwrap();
        prop_assert_eq!(round, Series::variable("Q", n));
        prop_assert!(gw.f0[0].is_one());
    }

    #[test]
    fn cover_relation_round_trips(ns in proptest::collection::vec(-50i64..50, 1..8)) {
        let n: Vec<BigRational> = ns.iter().map(|v| int(*v)).collect();
        let k: Vec<BigRational> = (1..=n.len())
            .map(|d| {
                (1..=d)
                    .filter(|c| d % c == 0)
                    .map(|c| &n[d / c - 1] / int((c * c * c) as i64))
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect();
        prop_assert_eq!(instanton_extract(&k), n);
    }
}
