//! Discrete Dirichlet Laplacian, eigenpairs, closed-form interval spectra and counting.

mod eigdata;
mod exact;
mod operator;
mod solve;

pub use eigdata::{counting_function, grid_norms, EigenData, Norms, Source, COUNT_TOL};
pub use exact::{exact_box_count, exact_box_eigenvalues, exact_interval_spectrum, ExactInterval1D};
pub use operator::{
    assemble_laplacian, assemble_laplacian_with_cap, elimination_order, DiscreteOperator,
    DEFAULT_DOF_CAP,
};
pub use solve::{fix_sign, ground_state, lowest_eigenpairs, lowest_eigenpairs_with, Request, GAP_TOL};
