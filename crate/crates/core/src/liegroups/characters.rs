use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{dot_f64, DominantWeight, LieError, RootSystemData};
use crate::numerics::{extrapolate_best_complex, ComplexSum};

/// Relative tolerance for characters evaluated at singular points.
pub const SINGULAR_TOLERANCE: f64 = 1e-9;

/// Below this value of `min_α |sin(⟨α, C⟩/2)|` the point is treated as singular.
const REGULARITY_THRESHOLD: f64 = 1e-3;

/// An element `exp C` of the maximal torus, `C` given in ε-coordinates.
///
/// For type A the coordinates should sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusElement {
    coords: Vec<f64>,
}

impl TorusElement {
    pub fn new(coords: Vec<f64>) -> Self {
        TorusElement { coords }
    }

    pub fn identity(rs: &RootSystemData) -> Self {
        TorusElement { coords: vec![0.0; rs.ambient_dim()] }
    }

    /// `diag(e^{iθ}, e^{−iθ})` in SU(2).
    pub fn a1_angle(theta: f64) -> Self {
        TorusElement { coords: vec![theta, -theta] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Product of torus elements (sum of Cartan vectors).
    pub fn mul(&self, other: &TorusElement) -> TorusElement {
        TorusElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    /// `exp(s C)`.
    pub fn scaled(&self, s: f64) -> TorusElement {
        TorusElement { coords: self.coords.iter().map(|a| a * s).collect() }
    }

    pub fn inverse(&self) -> TorusElement {
        self.scaled(-1.0)
    }

    pub(crate) fn check(&self, rs: &RootSystemData) -> Result<(), LieError> {
        if self.coords.len() != rs.ambient_dim() || self.coords.iter().any(|x| !x.is_finite()) {
            return Err(LieError::WrongTorusDimension {
                expected: rs.ambient_dim(),
                got: self.coords.len(),
            });
        }
        Ok(())
    }

    /// `min_α |sin(⟨α, C⟩/2)|`; zero exactly on the walls.
    pub fn regularity(&self, rs: &RootSystemData) -> f64 {
        rs.positive_roots_f64()
            .iter()
            .map(|a| (0.5 * dot_f64(a, &self.coords)).sin().abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Σ_w sign(w) e^{i⟨w μ, C⟩}` for a weight `μ` given in ε-coordinates.
pub fn weyl_numerator(rs: &RootSystemData, mu: &[f64], c: &TorusElement) -> Complex64 {
    let mut acc = ComplexSum::default();
    for w in rs.weyl_group() {
        let phase = dot_f64(&w.apply_f64(mu), c.coords());
        acc.add(Complex64::from_polar(f64::from(w.sign()), phase));
    }
    acc.value()
}

/// `j(exp C) = ∏_{α>0} (e^{i⟨α,C⟩/2} − e^{−i⟨α,C⟩/2})`.
pub fn weyl_denominator(rs: &RootSystemData, c: &TorusElement) -> Complex64 {
    rs.positive_roots_f64().iter().fold(Complex64::new(1.0, 0.0), |acc, a| {
        acc * Complex64::new(0.0, 2.0 * (0.5 * dot_f64(a, c.coords())).sin())
    })
}

fn character_ratio(rs: &RootSystemData, mu: &[f64], c: &TorusElement) -> Complex64 {
    weyl_numerator(rs, mu, c) / weyl_denominator(rs, c)
}

/// `χ_λ(exp C)` by the Weyl character formula.
///
/// At (or very near) singular points the removable singularity is resolved by
/// evaluating along `C ± εξ` for the regular direction `ξ = ρ/|ρ|` and
/// extrapolating the symmetric average to `ε = 0`.
pub fn weyl_character(
    rs: &RootSystemData,
    weight: &DominantWeight,
    c: &TorusElement,
) -> Result<Complex64, LieError> {
    c.check(rs)?;
    let mu = weight.shifted_coordinates();
    let regularity = c.regularity(rs);
    if regularity > 0.0 {
        let direct = character_ratio(rs, mu, c);
        if regularity > REGULARITY_THRESHOLD {
            return Ok(direct);
        }
        // rounding in the phases and the |W|-term sum, divided by |j|
        let phase_scale: f64 = dot_f64(mu, mu).sqrt() * dot_f64(c.coords(), c.coords()).sqrt() + 1.0;
        let bound = rs.weyl_group().len() as f64 * phase_scale * 4.0 * f64::EPSILON
            / weyl_denominator(rs, c).norm();
        if bound <= 0.1 * SINGULAR_TOLERANCE * direct.norm().max(1.0) {
            return Ok(direct);
        }
    }
    let rho = rs.rho_f64();
    let rho_norm = dot_f64(rho, rho).sqrt();
    let xi = TorusElement::new(rho.iter().map(|x| x / rho_norm).collect());
    let mu_norm = dot_f64(mu, mu).sqrt();
    let h0 = 0.5 / mu_norm.max(1.0);
    const SAMPLES: usize = 8;
    let mut xs = Vec::with_capacity(SAMPLES);
    let mut zs = Vec::with_capacity(SAMPLES);
    for k in 0..SAMPLES {
        let eps = h0 * 0.7f64.powi(k as i32);
        let plus = character_ratio(rs, mu, &c.mul(&xi.scaled(eps)));
        let minus = character_ratio(rs, mu, &c.mul(&xi.scaled(-eps)));
        xs.push(eps * eps);
        zs.push(0.5 * (plus + minus));
    }
    let (value, err) = extrapolate_best_complex(&xs, &zs, SAMPLES - 1);
    if err > SINGULAR_TOLERANCE * value.norm().max(1.0) {
        return Err(LieError::SingularLimit { error: err });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::super::{build_root_system, RootType};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn a1_regular_character() {
        let rs = build_root_system(RootType::A, 1).unwrap();
        for n in 0..12u32 {
            let w = DominantWeight::new(&rs, &[n]).unwrap();
            for &theta in &[0.3, 1.1, 2.5] {
                let chi = weyl_character(&rs, &w, &TorusElement::a1_angle(theta)).unwrap();
                let expected = ((f64::from(n) + 1.0) * theta).sin() / theta.sin();
                assert!((chi.re - expected).abs() < 1e-12 && chi.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn a1_denominator() {
        let rs = build_root_system(RootType::A, 1).unwrap();
        let j = weyl_denominator(&rs, &TorusElement::a1_angle(0.7));
        assert!((j - Complex64::new(0.0, 2.0 * 0.7f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn a1_singular_points() {
        let rs = build_root_system(RootType::A, 1).unwrap();
        for n in 0..40u32 {
            let w = DominantWeight::new(&rs, &[n]).unwrap();
            let d = f64::from(n + 1);
            let at_e = weyl_character(&rs, &w, &TorusElement::identity(&rs)).unwrap();
            assert!((at_e.re - d).abs() < 1e-9 * d, "n={n} {at_e}");
            let at_minus = weyl_character(&rs, &w, &TorusElement::a1_angle(PI)).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((at_minus.re - sign * d).abs() < 1e-9 * d, "n={n} {at_minus}");
        }
    }

    #[test]
    fn a2_character_at_identity_is_dimension() {
        let rs = build_root_system(RootType::A, 2).unwrap();
        for labels in [[0, 0], [1, 0], [1, 1], [3, 2], [6, 1]] {
            let w = DominantWeight::new(&rs, &labels).unwrap();
            let chi = weyl_character(&rs, &w, &TorusElement::identity(&rs)).unwrap();
            let d = w.dimension_f64();
            assert!((chi.re - d).abs() < 1e-9 * d && chi.im.abs() < 1e-9 * d, "{labels:?} {chi}");
        }
    }

    #[test]
    fn central_characters_are_scalar() {
        // at central u, χ_λ(u) = d_λ times a root of unity
        let rs = build_root_system(RootType::A, 2).unwrap();
        for u in rs.central_elements() {
            for labels in [[1, 0], [2, 1], [0, 3]] {
                let w = DominantWeight::new(&rs, &labels).unwrap();
                let chi = weyl_character(&rs, &w, &u).unwrap();
                assert!((chi.norm() - w.dimension_f64()).abs() < 1e-8 * w.dimension_f64());
            }
        }
    }
}
