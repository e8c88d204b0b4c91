//! Per-subcommand TOML schemas. Every table rejects unknown keys.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use locus_core::genera::WittenNormalization;
use locus_core::mirror::Convention;
use locus_core::moduli::HeatCentre;

/// A torus element: an SU(2) angle `θ` or explicit ε-coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Holonomy {
    Angle(f64),
    Coords(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenusKind {
    AHat,
    L,
    Witten,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PontryaginNumber {
    /// Partition in decreasing order, `[2, 1]` for `p₂p₁`.
    pub partition: Vec<u32>,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenusConfig {
    pub dimension: u32,
    pub spin: bool,
    pub pontryagin: Vec<PontryaginNumber>,
    pub genus: GenusKind,
    /// Rational coefficients `[1, q₁, q₂, …]` of `Q(x)` for `genus = "custom"`.
    pub coefficients: Vec<String>,
    /// Number of `q`-coefficients of the Witten genus.
    pub q_order: usize,
    pub normalization: WittenNormalization,
}

impl Default for GenusConfig {
    fn default() -> Self {
        Self {
            dimension: 4,
            spin: true,
            pontryagin: vec![PontryaginNumber { partition: vec![1], value: -48 }],
            genus: GenusKind::AHat,
            coefficients: Vec::new(),
            q_order: 4,
            normalization: WittenNormalization::Reduced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfig {
    pub root_type: String,
    pub rank: usize,
    pub t: f64,
    /// Points `x y⁻¹` at which the kernel is evaluated.
    pub points: Vec<Holonomy>,
    /// Casimir cutoff; chosen from the tail bound when absent.
    pub cutoff: Option<f64>,
    pub tol: f64,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            root_type: "A".into(),
            rank: 1,
            t: 0.5,
            points: vec![Holonomy::Angle(0.0), Holonomy::Angle(PI / 2.0), Holonomy::Angle(PI)],
            cutoff: None,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertionTerm {
    /// Exponents of the Dynkin coordinates of `λ + ρ`.
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Direction `ξ` of the line `θ ↦ exp(θξ)`.
    pub direction: Holonomy,
    pub theta_start: f64,
    pub theta_end: f64,
    pub points: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModuliConfig {
    pub root_type: String,
    pub rank: usize,
    pub genus: u32,
    pub holonomies: Vec<Holonomy>,
    /// Empty means the constant insertion `p = 1`.
    pub insertion: Vec<InsertionTerm>,
    pub t_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub casimir_cutoff: Option<f64>,
    pub extrapolation_order: usize,
    pub tol: f64,
    pub direction: Option<Holonomy>,
    /// Piecewise-polynomial fit along a line (volume only).
    pub fit: Option<FitConfig>,
}

impl ModuliConfig {
    fn with_holonomy(theta: f64) -> Self {
        let reg = locus_core::moduli::Regularization::default();
        Self {
            root_type: "A".into(),
            rank: 1,
            genus: 2,
            holonomies: vec![Holonomy::Angle(theta)],
            insertion: Vec::new(),
            t_grid: reg.t_grid,
            eps_grid: reg.eps_grid,
            casimir_cutoff: reg.casimir_cutoff,
            extrapolation_order: reg.extrapolation_order,
            tol: reg.tol,
            direction: None,
            fit: None,
        }
    }

    pub fn volume_default() -> Self {
        Self::with_holonomy(1.0)
    }

    pub fn intersect_default() -> Self {
        Self { tol: 1e-6, ..Self::with_holonomy(PI) }
    }
}

impl Default for ModuliConfig {
    fn default() -> Self {
        Self::volume_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub genus: u32,
    pub holonomy: Holonomy,
    pub t_values: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub centre: HeatCentre,
    /// Agreement threshold in standard errors.
    pub sigmas: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            genus: 2,
            holonomy: Holonomy::Angle(2.0),
            t_values: vec![1.0, 0.5, 0.25],
            samples: 100_000,
            seed: 20241019,
            centre: HeatCentre::Identity,
            sigmas: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MirrorConfig {
    pub order: usize,
    pub convention: Convention,
    /// Also verify the integrated identity against the computed invariants.
    pub identity_check: bool,
}

impl MirrorConfig {
    pub fn quintic_default() -> Self {
        Self { order: 3, convention: Convention::Plus, identity_check: true }
    }

    pub fn local_default() -> Self {
        Self { order: 6, convention: Convention::Plus, identity_check: true }
    }
}

impl Default for MirrorConfig {
    fn default() -> Self {
        Self::quintic_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingEntry {
    pub monomial: Vec<u32>,
    /// Rational value, e.g. `"1"` or `"1/2"`.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToricConfig {
    pub name: String,
    pub kahler_rank: usize,
    pub divisors: Vec<Vec<i64>>,
    pub relations: Vec<Vec<u32>>,
    pub top_degree: u32,
    pub pairing: Vec<PairingEntry>,
    pub convex: Vec<Vec<i64>>,
    pub concave: Vec<Vec<i64>>,
    pub order: usize,
    pub convention: Convention,
    pub identity_check: bool,
}

impl Default for ToricConfig {
    fn default() -> Self {
        Self {
            name: "quintic".into(),
            kahler_rank: 1,
            divisors: vec![vec![1]; 5],
            relations: vec![vec![5]],
            top_degree: 4,
            pairing: vec![PairingEntry { monomial: vec![4], value: "1".into() }],
            convex: vec![vec![5]],
            concave: Vec::new(),
            order: 3,
            convention: Convention::Plus,
            identity_check: true,
        }
    }
}
