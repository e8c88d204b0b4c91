//! Compact simply connected simple Lie groups of classical type.
//!
//! Roots and weights are stored in the standard ε-coordinates of the
//! classical construction (ambient dimension `rank + 1` for type A, `rank`
//! otherwise). The Killing-dual inner product is a rational multiple of the
//! ambient dot product, `⟨x, y⟩ = killing_scale · (x · y)`; every metric
//! quantity in this module goes through that single scalar.

mod characters;
mod heat;
mod weights;

pub use characters::{
    weyl_character, weyl_denominator, weyl_numerator, TorusElement, SINGULAR_TOLERANCE,
};
pub use heat::{
    centralizer_volume, cutoff_for_tolerance, group_constants, heat_kernel, heat_kernel_tail_bound,
    GroupConstants, HeatKernelValue,
};
pub use weights::{casimir, enumerate_weights, weyl_dimension, DominantWeight};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("unsupported root system {0}{1}")]
    Unsupported(RootType, usize),
    #[error("weight has {got} labels, expected {expected}")]
    WrongLabelCount { expected: usize, got: usize },
    #[error("torus element has {got} coordinates, expected {expected}")]
    WrongTorusDimension { expected: usize, got: usize },
    #[error("weight is not dominant")]
    NotDominant,
    #[error("singular character limit did not converge (estimated error {error:e})")]
    SingularLimit { error: f64 },
    #[error("time parameter must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("casimir cutoff {cutoff} leaves a tail bound {tail:e} above tolerance {tol:e}")]
    CutoffInsufficient { cutoff: f64, tail: f64, tol: f64 },
    #[error("element is neither regular nor central")]
    NeitherRegularNorCentral,
    #[error("tolerance must be positive")]
    BadTolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootType::A => "A",
            RootType::B => "B",
            RootType::C => "C",
            RootType::D => "D",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RootType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(RootType::A),
            "B" => Ok(RootType::B),
            "C" => Ok(RootType::C),
            "D" => Ok(RootType::D),
            other => Err(format!("unknown root type `{other}`")),
        }
    }
}

/// A signed permutation: `(w v)_i = signs[i] * v[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    perm: Vec<usize>,
    signs: Vec<i8>,
    det: i8,
}

impl WeylElement {
    fn new(perm: Vec<usize>, signs: Vec<i8>) -> Self {
        let det = permutation_sign(&perm) * signs.iter().product::<i8>();
        WeylElement { perm, signs, det }
    }

    /// Determinant, ±1.
    pub fn sign(&self) -> i8 {
        self.det
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        self.perm.iter().zip(&self.signs).map(|(&p, &s)| f64::from(s) * v[p]).collect()
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| if s < 0 { -v[p].clone() } else { v[p].clone() })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        // (a∘b v)_i = sa_i (b v)_{pa_i} = sa_i sb_{pa_i} v_{pb_{pa_i}}
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let signs = self.perm.iter().zip(&self.signs).map(|(&p, &s)| s * other.signs[p]).collect();
        WeylElement::new(perm, signs)
    }
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Root data, Weyl group and metric constants of a classical simple group.
#[derive(Debug, Clone)]
pub struct RootSystemData {
    root_type: RootType,
    rank: usize,
    ambient_dim: usize,
    positive_roots: Vec<Vec<BigRational>>,
    simple_roots: Vec<Vec<BigRational>>,
    fundamental_weights: Vec<Vec<BigRational>>,
    fundamental_coweights: Vec<Vec<BigRational>>,
    rho: Vec<BigRational>,
    killing_scale: BigRational,
    weyl_group: Vec<WeylElement>,
    center_order: usize,
    dim_g: usize,
    torus_volume: f64,
    group_volume: f64,
    positive_roots_f64: Vec<Vec<f64>>,
    rho_f64: Vec<f64>,
}

fn unit(n: usize, i: usize) -> Vec<BigRational> {
    (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()
}

fn vadd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vscale(a: &[BigRational], s: &BigRational) -> Vec<BigRational> {
    a.iter().map(|x| x * s).collect()
}

pub(crate) fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

pub(crate) fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn to_f64_vec(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Inverse of a square rational matrix by Gauss–Jordan elimination.
fn invert(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("singular gram matrix");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * p;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Determinant of a square rational matrix.
fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * p;
                }
            }
        }
    }
    det
}

/// Build the root system of type `root_type` and rank `rank`.
///
/// Supported: `A_n (n ≥ 1)`, `B_n (n ≥ 2)`, `C_n (n ≥ 2)`, `D_n (n ≥ 3)`.
pub fn build_root_system(root_type: RootType, rank: usize) -> Result<RootSystemData, LieError> {
    let ok = match root_type {
        RootType::A => rank >= 1,
        RootType::B | RootType::C => rank >= 2,
        RootType::D => rank >= 3,
    };
    if !ok || rank > 8 {
        return Err(LieError::Unsupported(root_type, rank));
    }
    let n = rank;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let ambient_dim = if root_type == RootType::A { n + 1 } else { n };
    let e = |i: usize| unit(ambient_dim, i);

    let mut positive_roots = Vec::new();
    for i in 0..ambient_dim {
        for j in i + 1..ambient_dim {
            positive_roots.push(vsub(&e(i), &e(j)));
            if root_type != RootType::A {
                positive_roots.push(vadd(&e(i), &e(j)));
            }
        }
        match root_type {
            RootType::B => positive_roots.push(e(i)),
            RootType::C => positive_roots.push(vscale(&e(i), &BigRational::from_integer(2.into()))),
            _ => {}
        }
    }

    let mut simple_roots: Vec<Vec<BigRational>> =
        (0..ambient_dim - 1).map(|i| vsub(&e(i), &e(i + 1))).collect();
    match root_type {
        RootType::A => {}
        RootType::B => simple_roots.push(e(n - 1)),
        RootType::C => simple_roots.push(vscale(&e(n - 1), &BigRational::from_integer(2.into()))),
        RootType::D => simple_roots.push(vadd(&e(n - 2), &e(n - 1))),
    }

    let prefix = |i: usize| -> Vec<BigRational> {
        (0..ambient_dim)
            .map(|j| if j < i { BigRational::one() } else { BigRational::zero() })
            .collect()
    };
    let fundamental_weights: Vec<Vec<BigRational>> = match root_type {
        RootType::A => (1..=n)
            .map(|i| {
                let shift = BigRational::new(BigInt::from(i), BigInt::from(n + 1));
                prefix(i).iter().map(|x| x - &shift).collect()
            })
            .collect(),
        RootType::B => {
            let mut w: Vec<_> = (1..n).map(prefix).collect();
            w.push(vscale(&prefix(n), &half));
            w
        }
        RootType::C => (1..=n).map(prefix).collect(),
        RootType::D => {
            let mut w: Vec<_> = (1..n - 1).map(prefix).collect();
            let mut spin_minus = vscale(&prefix(n), &half);
            spin_minus[n - 1] = -half.clone();
            w.push(spin_minus);
            w.push(vscale(&prefix(n), &half));
            w
        }
    };

    let mut rho = vec![BigRational::zero(); ambient_dim];
    for a in &positive_roots {
        rho = vadd(&rho, a);
    }
    let rho = vscale(&rho, &half);

    // Killing form on the Cartan: B(H, H) = Σ_{all roots} α(H)² = c · (H·H).
    let probe = if root_type == RootType::A { vsub(&e(0), &e(1)) } else { e(0) };
    let c = positive_roots
        .iter()
        .fold(BigRational::zero(), |acc, a| acc + dot(a, &probe) * dot(a, &probe))
        * BigRational::from_integer(2.into())
        / dot(&probe, &probe);
    let killing_scale = c.recip();

    let gram: Vec<Vec<BigRational>> = simple_roots
        .iter()
        .map(|a| simple_roots.iter().map(|b| dot(a, b)).collect())
        .collect();
    let ginv = invert(&gram);
    let fundamental_coweights: Vec<Vec<BigRational>> = ginv
        .iter()
        .map(|row| {
            row.iter()
                .zip(&simple_roots)
                .fold(vec![BigRational::zero(); ambient_dim], |acc, (m, a)| vadd(&acc, &vscale(a, m)))
        })
        .collect();

    let weyl_group = build_weyl_group(root_type, ambient_dim);

    let (center_order, dim_g) = match root_type {
        RootType::A => (n + 1, n * (n + 2)),
        RootType::B | RootType::C => (2, n * (2 * n + 1)),
        RootType::D => (4, n * (2 * n - 1)),
    };

    // Torus volume: the kernel of exp is 2π times the coroot lattice, whose
    // Gram matrix in the Killing metric on the Cartan is (1/scale)·(α∨·β∨).
    let two = BigRational::from_integer(2.into());
    let coroots: Vec<Vec<BigRational>> =
        simple_roots.iter().map(|a| vscale(a, &(&two / dot(a, a)))).collect();
    let coroot_gram: Vec<Vec<BigRational>> = coroots
        .iter()
        .map(|a| coroots.iter().map(|b| dot(a, b) * &c).collect())
        .collect();
    let gram_det = determinant(&coroot_gram).to_f64().unwrap_or(f64::NAN);
    let two_pi = 2.0 * std::f64::consts::PI;
    let torus_volume = two_pi.powi(rank as i32) * gram_det.sqrt();
    // vol(G/T) = ∏_{α>0} 2π / ⟨α, ρ⟩
    let flag_volume: f64 = positive_roots
        .iter()
        .map(|a| two_pi / (dot(a, &rho) * &killing_scale).to_f64().unwrap_or(f64::NAN))
        .product();
    let group_volume = torus_volume * flag_volume;

    let positive_roots_f64 = positive_roots.iter().map(|a| to_f64_vec(a)).collect();
    let rho_f64 = to_f64_vec(&rho);

    Ok(RootSystemData {
        root_type,
        rank,
        ambient_dim,
        positive_roots,
        simple_roots,
        fundamental_weights,
        fundamental_coweights,
        rho,
        killing_scale,
        weyl_group,
        center_order,
        dim_g,
        torus_volume,
        group_volume,
        positive_roots_f64,
        rho_f64,
    })
}

fn build_weyl_group(root_type: RootType, m: usize) -> Vec<WeylElement> {
    let perms = permutations(m);
    let mut out = Vec::new();
    match root_type {
        RootType::A => {
            for p in perms {
                out.push(WeylElement::new(p, vec![1; m]));
            }
        }
        _ => {
            for p in &perms {
                for mask in 0u32..(1 << m) {
                    let negs = mask.count_ones();
                    if root_type == RootType::D && negs % 2 == 1 {
                        continue;
                    }
                    let signs = (0..m).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                    out.push(WeylElement::new(p.clone(), signs));
                }
            }
        }
    }
    out
}

impl RootSystemData {
    pub fn root_type(&self) -> RootType {
        self.root_type
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of ε-coordinates.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn positive_roots(&self) -> &[Vec<BigRational>] {
        &self.positive_roots
    }

    pub fn simple_roots(&self) -> &[Vec<BigRational>] {
        &self.simple_roots
    }

    pub fn fundamental_weights(&self) -> &[Vec<BigRational>] {
        &self.fundamental_weights
    }

    pub fn fundamental_coweights(&self) -> &[Vec<BigRational>] {
        &self.fundamental_coweights
    }

    pub fn rho(&self) -> &[BigRational] {
        &self.rho
    }

    pub(crate) fn rho_f64(&self) -> &[f64] {
        &self.rho_f64
    }

    pub(crate) fn positive_roots_f64(&self) -> &[Vec<f64>] {
        &self.positive_roots_f64
    }

    /// Scalar `s` with `⟨x, y⟩_K = s · (x · y)` on weights.
    pub fn killing_scale(&self) -> &BigRational {
        &self.killing_scale
    }

    /// Killing-dual inner product of two weights.
    pub fn inner(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        dot(a, b) * &self.killing_scale
    }

    /// Gram matrix of the fundamental weights in the Killing-dual metric.
    pub fn killing_gram(&self) -> Vec<Vec<BigRational>> {
        self.fundamental_weights
            .iter()
            .map(|a| self.fundamental_weights.iter().map(|b| self.inner(a, b)).collect())
            .collect()
    }

    pub fn weyl_group(&self) -> &[WeylElement] {
        &self.weyl_group
    }

    pub fn center_order(&self) -> usize {
        self.center_order
    }

    pub fn dim_g(&self) -> usize {
        self.dim_g
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    /// Volume of the group in the Killing metric.
    pub fn group_volume(&self) -> f64 {
        self.group_volume
    }

    /// Volume of the maximal torus in the Killing metric.
    pub fn torus_volume(&self) -> f64 {
        self.torus_volume
    }

    /// The central elements, as torus elements `exp(2π x)` with `x` a coweight.
    pub fn central_elements(&self) -> Vec<TorusElement> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut found: Vec<(Vec<BigRational>, Vec<BigRational>)> = Vec::new();
        let r = self.rank;
        let bound = self.center_order as i64;
        let mut labels = vec![0i64; r];
        loop {
            let x = labels.iter().zip(&self.fundamental_coweights).fold(
                vec![BigRational::zero(); self.ambient_dim],
                |acc, (&k, w)| vadd(&acc, &vscale(w, &BigRational::from_integer(k.into()))),
            );
            // class of x modulo the coroot lattice, read off by pairing with
            // the fundamental weights mod 1
            let sig: Vec<BigRational> = self
                .fundamental_weights
                .iter()
                .map(|w| {
                    let v = dot(w, &x);
                    &v - v.floor()
                })
                .collect();
            if !found.iter().any(|(_, s)| *s == sig) {
                found.push((x, sig));
            }
            if found.len() == self.center_order {
                break;
            }
            let mut i = 0;
            loop {
                if i == r {
                    break;
                }
                labels[i] += 1;
                if labels[i] < bound {
                    break;
                }
                labels[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
        found
            .into_iter()
            .map(|(x, _)| TorusElement::new(to_f64_vec(&x).iter().map(|v| two_pi * v).collect()))
            .collect()
    }

    /// Checks `⟨λ, α∨⟩ ≥ 0` for all simple roots (exactly).
    pub fn is_dominant(&self, weight: &[BigRational]) -> bool {
        self.simple_roots.iter().all(|a| !dot(weight, a).is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn a1_data() {
        let rs = build_root_system(RootType::A, 1).unwrap();
        assert_eq!(rs.num_positive_roots(), 1);
        assert_eq!(rs.rho().to_vec(), vscale(&rs.positive_roots()[0], &half()));
        assert_eq!(rs.weyl_group().len(), 2);
        assert_eq!(rs.center_order(), 2);
        assert_eq!(rs.dim_g(), 3);
        assert_eq!(*rs.killing_scale(), BigRational::new(1.into(), 4.into()));
        let a = &rs.positive_roots()[0];
        assert_eq!(rs.inner(a, a), half());
    }

    #[test]
    fn weyl_group_orders() {
        for (t, r, order) in [
            (RootType::A, 2, 6),
            (RootType::A, 3, 24),
            (RootType::B, 2, 8),
            (RootType::C, 3, 48),
            (RootType::D, 4, 192),
        ] {
            let rs = build_root_system(t, r).unwrap();
            assert_eq!(rs.weyl_group().len(), order, "{t}{r}");
            assert_eq!(rs.num_positive_roots() * 2 + r, rs.dim_g(), "{t}{r}");
        }
    }

    #[test]
    fn weyl_group_permutes_roots() {
        let rs = build_root_system(RootType::B, 2).unwrap();
        let mut all: Vec<Vec<BigRational>> = rs.positive_roots().to_vec();
        all.extend(rs.positive_roots().iter().map(|a| a.iter().map(|x| -x).collect()));
        for w in rs.weyl_group() {
            for a in &all {
                assert!(all.contains(&w.apply(a)));
            }
        }
    }

    #[test]
    fn killing_scale_matches_dual_coxeter() {
        // long roots have squared length 1/h∨ in the Killing-dual metric
        for (t, r, hdual) in [(RootType::A, 2, 3), (RootType::B, 3, 5), (RootType::C, 3, 4), (RootType::D, 4, 6)] {
            let rs = build_root_system(t, r).unwrap();
            let long = rs
                .positive_roots()
                .iter()
                .map(|a| rs.inner(a, a))
                .max()
                .unwrap();
            assert_eq!(long, BigRational::new(1.into(), hdual.into()), "{t}{r}");
        }
    }

    #[test]
    fn fundamental_weights_dual_to_simple_coroots() {
        for (t, r) in [(RootType::A, 3), (RootType::B, 3), (RootType::C, 3), (RootType::D, 4)] {
            let rs = build_root_system(t, r).unwrap();
            for (i, w) in rs.fundamental_weights().iter().enumerate() {
                for (j, a) in rs.simple_roots().iter().enumerate() {
                    let pairing = dot(w, a) * BigRational::from_integer(2.into()) / dot(a, a);
                    let expected = if i == j { BigRational::one() } else { BigRational::zero() };
                    assert_eq!(pairing, expected, "{t}{r} ω{i} α{j}");
                }
            }
        }
    }

    #[test]
    fn central_element_counts() {
        for (t, r) in [(RootType::A, 1), (RootType::A, 2), (RootType::B, 2), (RootType::D, 4)] {
            let rs = build_root_system(t, r).unwrap();
            assert_eq!(rs.central_elements().len(), rs.center_order(), "{t}{r}");
        }
    }

    #[test]
    fn unsupported_ranks() {
        assert!(build_root_system(RootType::A, 0).is_err());
        assert!(build_root_system(RootType::B, 1).is_err());
        assert!(build_root_system(RootType::D, 2).is_err());
    }
}
