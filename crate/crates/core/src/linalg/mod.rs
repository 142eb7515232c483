//! Sparse symmetric matrices, envelope Cholesky and a shift-invert block Krylov eigensolver.

mod cholesky;
mod eigen;
mod sparse;

pub use cholesky::ProfileCholesky;
pub use eigen::{smallest_eigenpairs, EigenOptions, EigenPairs};
pub use sparse::{axpy, dot, norm, CsrMatrix};
