use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, weights_for, ModuliError, Stratum};
use crate::liegroups::{
    weyl_character, weyl_denominator, LieError, RootSystemData, RootType, TorusElement,
};
use crate::numerics::CompensatedSum;

/// Point at which the heat kernel in the holonomy integral is centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum HeatCentre {
    /// `H(t, e, f(h))`: localizes on `f⁻¹(e)`.
    #[default]
    Identity,
    /// `H(t, c, f(h))`, with the boundary holonomy itself.
    Holonomy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: usize,
}

const CHUNK: usize = 4096;

/// Unit quaternion `w + xi + yj + zk`, identified with SU(2).
#[derive(Debug, Clone, Copy)]
struct Quat([f64; 4]);

impl Quat {
    fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    fn conj(self) -> Quat {
        let [a, b, c, d] = self.0;
        Quat([a, -b, -c, -d])
    }

    fn haar<R: Rng>(rng: &mut R) -> Quat {
        loop {
            let v: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-12 {
                return Quat([v[0] / n, v[1] / n, v[2] / n, v[3] / n]);
            }
        }
    }

    /// Half the trace, `cos θ` for an element conjugate to `diag(e^{iθ}, e^{−iθ})`.
    fn half_trace(self) -> f64 {
        self.0[0].clamp(-1.0, 1.0)
    }
}

/// SU(2) heat kernel as a function of `cos θ`, summed with Chebyshev
/// polynomials `χ_{m−1}(θ) = U_{m−1}(cos θ)`.
struct Su2Heat {
    weights: Vec<f64>,
}

impl Su2Heat {
    fn new(rs: &RootSystemData, t: f64) -> Self {
        let ws = weights_for(rs, t, None);
        let weights = ws
            .iter()
            .filter(|w| w.casimir() * t <= super::DAMPING_CUTOFF)
            .map(|w| w.dimension_f64() * (-t * w.casimir()).exp() / rs.group_volume())
            .collect();
        Su2Heat { weights }
    }

    fn eval(&self, x: f64) -> f64 {
        let mut s = CompensatedSum::new();
        let (mut u_prev, mut u) = (0.0, 1.0);
        for &w in &self.weights {
            s.add(w * u);
            let next = 2.0 * x * u - u_prev;
            u_prev = u;
            u = next;
        }
        s.value()
    }
}

fn require_su2(rs: &RootSystemData) -> Result<(), ModuliError> {
    if rs.root_type() != RootType::A || rs.rank() != 1 {
        return Err(ModuliError::Unsupported("Monte-Carlo holonomy integral requires A1".into()));
    }
    Ok(())
}

/// `vol(O_c) = |G| |j(c)|² / |T|` for regular `c`.
fn orbit_volume(rs: &RootSystemData, c: &TorusElement) -> Result<f64, ModuliError> {
    if classify(rs, c) != Stratum::Regular {
        return Err(ModuliError::NotRegular(0));
    }
    Ok(rs.group_volume() * weyl_denominator(rs, c).norm_sqr() / rs.torus_volume())
}

/// Monte-Carlo estimate of `I(t) = ∫_{G^{2g} × O_c} H(t, x₀, f(h)) dh` with
/// `f(x, y; z) = ∏[x_j, y_j] z`, uniform Haar samples and a fixed seed.
///
/// Samples are drawn in chunks with independent ChaCha streams, so the result
/// does not depend on the thread count.
pub fn holonomy_integral_mc(
    rs: &RootSystemData,
    genus: u32,
    c: &TorusElement,
    t: f64,
    samples: usize,
    seed: u64,
    centre: HeatCentre,
) -> Result<McEstimate, ModuliError> {
    require_su2(rs)?;
    if !(t > 0.0) {
        return Err(LieError::NonPositiveTime(t).into());
    }
    if samples < 2 {
        return Err(ModuliError::BadSchedule("need at least two samples".into()));
    }
    let vol_orbit = orbit_volume(rs, c)?;
    let theta = c.coords()[0];
    let cq = Quat([theta.cos(), theta.sin(), 0.0, 0.0]);
    let heat = Su2Heat::new(rs, t);
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut s = CompensatedSum::new();
            let mut s2 = CompensatedSum::new();
            for _ in 0..n {
                let mut w = Quat([1.0, 0.0, 0.0, 0.0]);
                for _ in 0..genus {
                    let x = Quat::haar(&mut rng);
                    let y = Quat::haar(&mut rng);
                    w = w.mul(x).mul(y).mul(x.conj()).mul(y.conj());
                }
                let k = Quat::haar(&mut rng);
                let z = k.mul(cq).mul(k.conj());
                w = w.mul(z);
                let arg = match centre {
                    HeatCentre::Identity => w,
                    HeatCentre::Holonomy => cq.mul(w.conj()),
                };
                let h = heat.eval(arg.half_trace());
                s.add(h);
                s2.add(h * h);
            }
            (s.value(), s2.value())
        })
        .collect();
    let mut sum = CompensatedSum::new();
    let mut sum2 = CompensatedSum::new();
    for (a, b) in partial {
        sum.add(a);
        sum2.add(b);
    }
    let n = samples as f64;
    let mean = sum.value() / n;
    let var = ((sum2.value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let factor = rs.group_volume().powi(2 * genus as i32) * vol_orbit;
    Ok(McEstimate { estimate: factor * mean, standard_error: factor * (var / n).sqrt(), samples })
}

/// Character-sum evaluation of the same integral:
/// `|G|^{2g−1} vol(O_c) Σ χ_λ(c) e^{−tp} / d^{2g−1}` (identity centre) or
/// `|G|^{2g−1} vol(O_c) Σ |χ_λ(c)|² e^{−tp} / d^{2g}` (holonomy centre).
pub fn holonomy_integral_series(
    rs: &RootSystemData,
    genus: u32,
    c: &TorusElement,
    t: f64,
    centre: HeatCentre,
) -> Result<f64, ModuliError> {
    if !(t > 0.0) {
        return Err(LieError::NonPositiveTime(t).into());
    }
    let vol_orbit = orbit_volume(rs, c)?;
    let weights = weights_for(rs, t, None);
    let mut s = CompensatedSum::new();
    for w in weights.iter().filter(|w| w.casimir() * t <= super::DAMPING_CUTOFF) {
        let d = w.dimension_f64();
        let chi = weyl_character(rs, w, c)?;
        let term = match centre {
            HeatCentre::Identity => chi.re / d.powi(2 * genus as i32 - 1),
            HeatCentre::Holonomy => chi.norm_sqr() / d.powi(2 * genus as i32),
        };
        s.add(term * (-t * w.casimir()).exp());
    }
    Ok(rs.group_volume().powi(2 * genus as i32 - 1) * vol_orbit * s.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroups::build_root_system;

    #[test]
    fn quaternion_product_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Quat::haar(&mut rng);
        let b = Quat::haar(&mut rng);
        let n: f64 = a.mul(b).0.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-12);
        let e = a.mul(a.conj());
        assert!((e.0[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_heat_matches_characters() {
        let rs = build_root_system(RootType::A, 1).unwrap();
        let t = 0.3;
        let heat = Su2Heat::new(&rs, t);
        let theta: f64 = 1.234;
        let direct = crate::liegroups::heat_kernel(&rs, t, &TorusElement::a1_angle(theta), 60.0 / t, None)
            .unwrap()
            .value;
        assert!((heat.eval(theta.cos()) - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn rejects_other_groups() {
        let rs = build_root_system(RootType::A, 2).unwrap();
        let c = TorusElement::new(vec![0.3, 0.5, -0.8]);
        assert!(matches!(
            holonomy_integral_mc(&rs, 2, &c, 1.0, 100, 1, HeatCentre::Identity),
            Err(ModuliError::Unsupported(_))
        ));
    }
}
