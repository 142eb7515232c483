//! Domains, their lattice rasterization, cube lattices and inscribed cubes.

mod domain;
mod grid;
mod inscribed;
mod lattice;
mod parse;
pub mod presets;

pub use domain::{DomainSpec, Point, Primitive};
pub use grid::{rasterize, GridMask, MAX_SCAN_NODES};
pub use inscribed::{largest_inscribed_cube, longest_interval, InscribedCube};
pub use lattice::{Cube, CubeLattice};
pub use parse::parse_domain;
