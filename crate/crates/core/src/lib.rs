//! Localization computations in geometry and topology.
//!
//! * [`exactnum`]: exact rationals, truncated power series, graded polynomials.
//! * [`genera`]: multiplicative sequences, the Â and L genera, the Witten genus
//!   as a q-series and the twelve-dimensional cancellation identity.
//! * [`liegroups`]: root systems, Weyl character and dimension formulas,
//!   Casimir values, group volumes and the heat kernel on compact groups.
//! * [`moduli`]: character-sum formulas for volumes and intersection numbers
//!   of moduli spaces of flat connections, with regularized limits.
//! * [`mirror`]: hypergeometric series of toric targets and the genus-0
//!   mirror pipeline ending in instanton numbers.

pub mod exactnum;
pub mod genera;
pub mod liegroups;
pub mod mirror;
pub mod moduli;
pub mod numerics;
