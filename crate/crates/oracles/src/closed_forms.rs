//! Closed-form values used as test targets.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::q;

/// `η(2) = Σ (−1)^{m+1}/m² = π²/12`.
pub fn eta_two() -> f64 {
    PI * PI / 12.0
}

fn binomial(n: i64, k: i64) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * q(n - i, i + 1))
}

/// Bernoulli numbers with `B₁ = +1/2`, from `Σ_{k<n+1} C(n+1,k) B_k = n+1`.
pub fn bernoulli(n: usize) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n as i64 {
        let mut s = BigRational::from_integer(BigInt::from(m + 1));
        for (k, bk) in b.iter().enumerate() {
            s -= binomial(m + 1, k as i64) * bk;
        }
        b.push(s / q(m + 1, 1));
    }
    b.pop().unwrap_or_else(BigRational::zero)
}

/// Abel sum `η(−k) = Σ (−1)^{m+1} m^k = (2^{k+1} − 1) B_{k+1} / (k+1)`.
pub fn eta_negative(k: u32) -> BigRational {
    let n = k as i64 + 1;
    q((1i64 << n) - 1, n) * bernoulli(n as usize)
}

/// `Σ_{m≥1} sin(mθ)/m³ = π²θ/6 − πθ²/4 + θ³/12` for `0 ≤ θ ≤ 2π`.
pub fn sine_cube_sum(theta: f64) -> f64 {
    PI * PI * theta / 6.0 - PI * theta * theta / 4.0 + theta.powi(3) / 12.0
}

/// Volume of `SU(n)` for the metric `−tr(XY)`:
/// `√n (2π)^{(n²+n−2)/2} / ∏_{k<n} k!`.
pub fn su_volume_trace_metric(n: u32) -> f64 {
    let n_f = f64::from(n);
    let expo = f64::from(n * n + n - 2) / 2.0;
    let fact: f64 = (1..n).map(|k| (1..=k).map(f64::from).product::<f64>()).product();
    n_f.sqrt() * (2.0 * PI).powf(expo) / fact
}

/// Same volume for the metric `−2n·tr(XY)` (the Killing form of `su(n)`).
pub fn su_volume_killing(n: u32) -> f64 {
    let dim = f64::from(n * n - 1);
    su_volume_trace_metric(n) * (2.0 * f64::from(n)).powf(dim / 2.0)
}
