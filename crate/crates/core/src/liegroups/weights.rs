use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{dot, to_f64_vec, LieError, RootSystemData};

/// A dominant integral weight with its Casimir value and dimension cached.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantWeight {
    labels: Vec<u32>,
    coords: Vec<BigRational>,
    shifted: Vec<f64>,
    casimir_exact: BigRational,
    casimir: f64,
    dimension: BigInt,
    dimension_f64: f64,
}

impl DominantWeight {
    /// Weight with the given Dynkin labels (coefficients on the fundamental weights).
    pub fn new(rs: &RootSystemData, labels: &[u32]) -> Result<Self, LieError> {
        if labels.len() != rs.rank() {
            return Err(LieError::WrongLabelCount { expected: rs.rank(), got: labels.len() });
        }
        let mut coords = vec![BigRational::zero(); rs.ambient_dim()];
        for (&l, w) in labels.iter().zip(rs.fundamental_weights()) {
            if l != 0 {
                let l = BigRational::from_integer(l.into());
                for (c, x) in coords.iter_mut().zip(w) {
                    *c += &l * x;
                }
            }
        }
        Ok(Self::assemble(rs, labels.to_vec(), coords))
    }

    /// Weight given by ε-coordinates; must be integral and dominant.
    pub fn from_coordinates(rs: &RootSystemData, coords: &[BigRational]) -> Result<Self, LieError> {
        if coords.len() != rs.ambient_dim() {
            return Err(LieError::WrongLabelCount { expected: rs.ambient_dim(), got: coords.len() });
        }
        let mut labels = Vec::with_capacity(rs.rank());
        for a in rs.simple_roots() {
            let pairing = dot(coords, a) * BigRational::from_integer(2.into()) / dot(a, a);
            if !pairing.is_integer() || pairing < BigRational::zero() {
                return Err(LieError::NotDominant);
            }
            labels.push(pairing.to_integer().to_u32().ok_or(LieError::NotDominant)?);
        }
        let w = Self::new(rs, &labels)?;
        if w.coords != coords {
            // not in the span of the roots (type A off the sum-zero hyperplane)
            return Err(LieError::NotDominant);
        }
        Ok(w)
    }

    pub fn trivial(rs: &RootSystemData) -> Self {
        Self::new(rs, &vec![0; rs.rank()]).expect("label count matches rank")
    }

    fn assemble(rs: &RootSystemData, labels: Vec<u32>, coords: Vec<BigRational>) -> Self {
        let casimir_exact = casimir_of(rs, &coords);
        let dimension = dimension_of(rs, &coords);
        let shifted: Vec<BigRational> = coords.iter().zip(rs.rho()).map(|(x, r)| x + r).collect();
        DominantWeight {
            labels,
            shifted: to_f64_vec(&shifted),
            coords,
            casimir: casimir_exact.to_f64().unwrap_or(f64::NAN),
            casimir_exact,
            dimension_f64: dimension.to_f64().unwrap_or(f64::INFINITY),
            dimension,
        }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Dynkin labels of `λ + ρ`.
    pub fn shifted_labels(&self) -> Vec<u64> {
        self.labels.iter().map(|&l| u64::from(l) + 1).collect()
    }

    /// ε-coordinates of `λ`.
    pub fn coordinates(&self) -> &[BigRational] {
        &self.coords
    }

    /// ε-coordinates of `λ + ρ` in floating point.
    pub fn shifted_coordinates(&self) -> &[f64] {
        &self.shifted
    }

    /// Cached `p_c(λ)`.
    pub fn casimir(&self) -> f64 {
        self.casimir
    }

    pub fn casimir_exact(&self) -> &BigRational {
        &self.casimir_exact
    }

    /// Cached `d_λ`.
    pub fn dimension(&self) -> &BigInt {
        &self.dimension
    }

    pub fn dimension_f64(&self) -> f64 {
        self.dimension_f64
    }

    pub fn is_trivial(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }
}

fn casimir_of(rs: &RootSystemData, coords: &[BigRational]) -> BigRational {
    let shifted: Vec<BigRational> = coords.iter().zip(rs.rho()).map(|(x, r)| x + r).collect();
    rs.inner(&shifted, &shifted) - rs.inner(rs.rho(), rs.rho())
}

fn dimension_of(rs: &RootSystemData, coords: &[BigRational]) -> BigInt {
    let shifted: Vec<BigRational> = coords.iter().zip(rs.rho()).map(|(x, r)| x + r).collect();
    let mut d = BigRational::one();
    for a in rs.positive_roots() {
        d *= dot(&shifted, a) / dot(rs.rho(), a);
    }
    debug_assert!(d.is_integer());
    d.to_integer()
}

/// `d_λ = ∏_{α>0} ⟨λ+ρ, α⟩ / ⟨ρ, α⟩`, computed exactly.
pub fn weyl_dimension(rs: &RootSystemData, weight: &DominantWeight) -> Result<BigInt, LieError> {
    if !rs.is_dominant(weight.coordinates()) {
        return Err(LieError::NotDominant);
    }
    Ok(dimension_of(rs, weight.coordinates()))
}

/// `p_c(λ) = |λ+ρ|² − |ρ|²` in the Killing-dual metric.
pub fn casimir(rs: &RootSystemData, weight: &DominantWeight) -> f64 {
    casimir_of(rs, weight.coordinates()).to_f64().unwrap_or(f64::NAN)
}

/// All dominant weights with `p_c(λ) ≤ cutoff`, ordered by Casimir value and
/// then by labels.
pub fn enumerate_weights(rs: &RootSystemData, cutoff: f64) -> Vec<DominantWeight> {
    if !(cutoff >= 0.0) {
        return vec![DominantWeight::trivial(rs)];
    }
    let gram: Vec<Vec<f64>> = rs
        .killing_gram()
        .iter()
        .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let r = rs.rank();
    // p(λ) = Σ λ_i λ_j G_ij + 2 Σ λ_i G_ij ρ_j with ρ = Σ ω_j
    let approx = |l: &[u32]| -> f64 {
        let mut s = 0.0;
        for i in 0..r {
            for j in 0..r {
                s += f64::from(l[i]) * (f64::from(l[j]) + 2.0) * gram[i][j];
            }
        }
        s
    };
    let slack = 1e-9 * (1.0 + cutoff);
    let mut candidates = Vec::new();
    let mut labels = vec![0u32; r];
    // p is increasing in each label, so each coordinate can be scanned upward
    // until the cutoff is exceeded.
    fn rec(
        i: usize,
        labels: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        approx: &dyn Fn(&[u32]) -> f64,
        bound: f64,
    ) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        labels[i] = 0;
        while approx(labels) <= bound {
            rec(i + 1, labels, out, approx, bound);
            labels[i] += 1;
        }
        labels[i] = 0;
    }
    rec(0, &mut labels, &mut candidates, &approx, cutoff + slack);
    let cutoff_exact = BigRational::from_float(cutoff).unwrap_or_else(BigRational::zero);
    let mut out: Vec<DominantWeight> = candidates
        .par_iter()
        .map(|l| DominantWeight::new(rs, l).expect("label count matches rank"))
        .filter(|w| *w.casimir_exact() <= cutoff_exact)
        .collect();
    out.sort_by(|a, b| {
        a.casimir_exact().cmp(b.casimir_exact()).then_with(|| a.labels().cmp(b.labels()))
    });
    out
}
