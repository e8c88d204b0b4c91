use proptest::prelude::*;

use locus_core::exactnum::{int, rat, BigRational, GradedPolynomial, Series, SeriesError, Variable};

const ORDER: usize = 7;

fn series_from(coeffs: &[(i64, i64)]) -> Series<BigRational> {
    Series::from_coeffs("x", ORDER, coeffs.iter().enumerate().map(|(e, (n, d))| (e, rat(*n, *d))))
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-9i64..10, 1i64..5), ORDER)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (series_from(&a), series_from(&b), series_from(&c));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn multiplication_distributes(a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (series_from(&a), series_from(&b), series_from(&c));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn division_undoes_multiplication(a in coeffs(), b in coeffs(), b0 in 1i64..7) {
        let a = series_from(&a);
        let mut b = b;
        b[0] = (b0, 1);
        let b = series_from(&b);
        prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a);
    }

    #[test]
    fn reversion_is_two_sided(a in coeffs(), lin in prop_oneof![-4i64..=-1, 1i64..=4]) {
        let mut a = a;
        a[0] = (0, 1);
        a[1] = (lin, 1);
        let f = series_from(&a);
        let g = f.revert().unwrap();
        let x = Series::variable("x", ORDER);
        prop_assert_eq!(f.compose(&g).unwrap(), x.clone());
        prop_assert_eq!(g.compose(&f).unwrap(), x);
    }

    #[test]
    fn exp_and_log_are_inverse(a in coeffs()) {
        let mut a = a;
        a[0] = (0, 1);
        let f = series_from(&a);
        prop_assert_eq!(f.exp().unwrap().log().unwrap(), f);
    }

    #[test]
    fn graded_products_respect_the_cap(a in -5i64..6, b in -5i64..6) {
        let vars = [Variable::new("h", 1)];
        let p = GradedPolynomial::from_terms(&vars, Some(3), [(vec![0], int(a)), (vec![1], int(1))]);
        let q = GradedPolynomial::from_terms(&vars, Some(3), [(vec![0], int(b)), (vec![2], int(1))]);
        let prod = p.mul(&q);
        prop_assert!(prod.max_degree().unwrap_or(0) <= 3);
        prop_assert_eq!(prod.coeff(&[3]), int(1));
        prop_assert_eq!(prod.coeff(&[0]), int(a * b));
    }
}

#[test]
fn truncation_order_is_the_minimum() {
    let a = Series::from_coeffs("x", 3, [(0, int(1)), (1, int(2))]);
    let b = Series::from_coeffs("x", 5, [(0, int(1)), (4, int(1))]);
    assert_eq!(a.mul(&b).order(), 3);
    assert_eq!(a.add(&b).order(), 3);
}

#[test]
fn geometric_series() {
    // 1 / (1 − x) = Σ x^n
    let one = Series::constant("x", int(1), 6);
    let den = Series::from_coeffs("x", 6, [(0, int(1)), (1, int(-1))]);
    let q = one.div(&den).unwrap();
    assert!((0..6).all(|e| q.coeff_or_zero(e) == int(1)));
}

#[test]
fn catalan_numbers_from_reversion() {
    // x − x² reverts to Σ C_{n−1} x^n
    let f = Series::from_coeffs("x", 8, [(1, int(1)), (2, int(-1))]);
    let g = f.revert().unwrap();
    let catalan = [0, 1, 1, 2, 5, 14, 42, 132];
    for (e, c) in catalan.iter().enumerate() {
        assert_eq!(g.coeff_or_zero(e), int(*c));
    }
}

#[test]
fn zero_constant_divisor_is_rejected() {
    let a = Series::from_coeffs("x", 4, [(1, int(1))]);
    assert_eq!(a.div(&a), Err(SeriesError::NotInvertible));
}
