//! Localization machinery: mollifier, IMS partition, bad cells and decay checks.
//!
//! Everything here works in units where the ground state of the domain is 1;
//! callers rescale masks and eigenfunctions with [`rescale`] first.

mod checks;
mod cover;
mod decay;
mod ims;
mod mollifier;
mod params;
mod resolvent;

use std::sync::OnceLock;

pub use checks::{check_eq319, check_lemma31, check_lemma32, lemma32_tolerance};
pub use cover::{bad_cells, unit_cell, CellRecord, CubeCover, SetCounts, LOW_CONFIDENCE_NODES};
pub use decay::{decay_profile, fit_slope, DecayCell, DecayProfile, MASS_FLOOR};
pub use ims::{build_ims_partition, ims_constant, partition_factor, IMSPartition};
pub use mollifier::{build_mollifier, Mollifier};
pub use params::DecayParams;
pub use resolvent::{default_source, resolvent_block_norms, BlockNorm, ResolventProfile, POWER_ITERATIONS};

use crate::geometry::GridMask;

/// `m_d` of the standard mollifier.
pub fn standard_m_d(dimension: usize) -> f64 {
    static M: [OnceLock<f64>; 2] = [OnceLock::new(), OnceLock::new()];
    *M[dimension.clamp(1, 2) - 1].get_or_init(|| build_mollifier(dimension, 64).m_d)
}

/// Mask dilated by `sqrt(lambda1)` and a grid function renormalized to unit `L^2` norm on it.
pub fn rescale(mask: &GridMask, lambda1: f64, phi: &[f64]) -> (GridMask, Vec<f64>) {
    let c = lambda1.sqrt();
    let f = c.powf(-(mask.dimension as f64) / 2.0);
    (mask.scaled(c), phi.iter().map(|v| v * f).collect())
}
