//! Dirichlet-Laplacian spectra on planar and linear open sets, localization
//! of eigenfunctions, heat trace and heat content, and checks of the L¹
//! eigenfunction inequalities built on them.

pub mod bounds;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod heat;
pub mod linalg;
pub mod localization;
pub mod output;
pub mod spectral;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
