//! Floating-point helpers shared by the numeric modules.

use num_complex::Complex64;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of complex numbers, real and imaginary parts separately.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Polynomial extrapolation of samples `(x_i, y_i)` to `x = 0` (Neville).
///
/// Returns the full-table extrapolant and the difference from the
/// extrapolant that drops the last sample, which serves as an error estimate.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    // p[i] holds the extrapolant through samples i..=i+level
    let mut p = ys.to_vec();
    let mut prev_best = f64::NAN;
    let mut best = ys[0];
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
        }
        prev_best = best;
        best = p[0];
    }
    if n == 1 {
        return (best, f64::INFINITY);
    }
    (best, (best - prev_best).abs())
}

/// Repeated extrapolation: the sequence of extrapolants using the first
/// `k` samples for `k = 1..=n`.
pub fn extrapolant_sequence(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..=xs.len()).map(|k| extrapolate_to_zero(&xs[..k], &ys[..k]).0).collect()
}

/// Extrapolant of depth at most `max_depth` whose change from the previous
/// depth is smallest; returns `(value, change)`.
///
/// Guards against the loss of accuracy that very deep tables suffer from
/// rounding in the samples.
pub fn extrapolate_best(xs: &[f64], ys: &[f64], max_depth: usize) -> (f64, f64) {
    let n = xs.len().min(max_depth + 1);
    let seq = extrapolant_sequence(&xs[..n], &ys[..n]);
    if seq.len() < 2 {
        return (seq[0], f64::INFINITY);
    }
    let mut best = (seq[1], (seq[1] - seq[0]).abs());
    for k in 2..seq.len() {
        let err = (seq[k] - seq[k - 1]).abs();
        if err <= best.1 {
            best = (seq[k], err);
        }
    }
    best
}

/// Complex version of [`extrapolate_best`], error measured in modulus.
pub fn extrapolate_best_complex(xs: &[f64], zs: &[Complex64], max_depth: usize) -> (Complex64, f64) {
    let n = xs.len().min(max_depth + 1);
    let re: Vec<f64> = zs[..n].iter().map(|z| z.re).collect();
    let im: Vec<f64> = zs[..n].iter().map(|z| z.im).collect();
    let sr = extrapolant_sequence(&xs[..n], &re);
    let si = extrapolant_sequence(&xs[..n], &im);
    let seq: Vec<Complex64> = sr.iter().zip(&si).map(|(&a, &b)| Complex64::new(a, b)).collect();
    if seq.len() < 2 {
        return (seq[0], f64::INFINITY);
    }
    let mut best = (seq[1], (seq[1] - seq[0]).norm());
    for k in 2..seq.len() {
        let err = (seq[k] - seq[k - 1]).norm();
        if err <= best.1 {
            best = (seq[k], err);
        }
    }
    best
}
