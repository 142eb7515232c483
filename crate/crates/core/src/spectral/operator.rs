use crate::error::{Error, Result};
use crate::geometry::GridMask;
use crate::linalg::CsrMatrix;

pub const DEFAULT_DOF_CAP: usize = 400_000;

/// Five-point (three-point in 1D) Dirichlet Laplacian on a mask; dof `k` is mask node `k`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub matrix: CsrMatrix,
    pub h: f64,
    pub dimension: usize,
}

impl DiscreteOperator {
    pub fn n_dof(&self) -> usize {
        self.matrix.n
    }

    /// `<u, A u>` under the `h^d`-weighted inner product.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let au = self.matrix.mul(u);
        crate::linalg::dot(u, &au) * self.h.powi(self.dimension as i32)
    }
}

pub fn assemble_laplacian(mask: &GridMask) -> Result<DiscreteOperator> {
    assemble_laplacian_with_cap(mask, DEFAULT_DOF_CAP)
}

pub fn assemble_laplacian_with_cap(mask: &GridMask, cap: usize) -> Result<DiscreteOperator> {
    let n = mask.len();
    if n > cap {
        return Err(Error::Resource { n_dof: n, cap });
    }
    let h2 = mask.h * mask.h;
    let diag = 2.0 * mask.dimension as f64 / h2;
    let off = -1.0 / h2;
    let rows = (0..n)
        .map(|k| {
            let mut row = vec![(k, diag)];
            row.extend(mask.neighbours(k).map(|nb| (nb, off)));
            row
        })
        .collect();
    Ok(DiscreteOperator {
        matrix: CsrMatrix::from_rows(rows),
        h: mask.h,
        dimension: mask.dimension,
    })
}

/// Elimination order with the shorter bounding-box axis varying fastest,
/// which keeps the Cholesky envelope near the short side length.
pub fn elimination_order(mask: &GridMask) -> Vec<usize> {
    let (lo, hi) = mask.index_box();
    let mut order: Vec<usize> = (0..mask.len()).collect();
    if mask.dimension == 2 && hi[0] - lo[0] > hi[1] - lo[1] {
        order.sort_by_key(|&k| {
            let n = mask.nodes()[k];
            (n[0], n[1])
        });
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_domain, presets, rasterize};
    use crate::linalg::ProfileCholesky;

    #[test]
    fn three_node_interval() {
        let mask = rasterize(&presets::unit_interval(), 0.25).unwrap();
        let op = assemble_laplacian(&mask).unwrap();
        let dense = op.matrix.to_dense();
        assert_eq!(
            dense,
            vec![
                vec![32.0, -16.0, 0.0],
                vec![-16.0, 32.0, -16.0],
                vec![0.0, -16.0, 32.0]
            ]
        );
    }

    #[test]
    fn single_node_square() {
        let mask = rasterize(&presets::unit_square(), 0.5).unwrap();
        let op = assemble_laplacian(&mask).unwrap();
        assert_eq!(op.matrix.to_dense(), vec![vec![16.0]]);
    }

    #[test]
    fn symmetric_and_capped() {
        let spec = presets::dumbbell(2, 0.2).unwrap();
        let mask = rasterize(&spec, 1.0 / 16.0).unwrap();
        let op = assemble_laplacian(&mask).unwrap();
        assert!(op.matrix.is_symmetric());
        let err = assemble_laplacian_with_cap(&mask, 10).unwrap_err();
        assert!(matches!(err, Error::Resource { cap: 10, .. }));
    }

    #[test]
    fn short_axis_ordering_shrinks_envelope() {
        let spec = parse_domain("dim=2; rect 0 0 8 1").unwrap();
        let mask = rasterize(&spec, 1.0 / 16.0).unwrap();
        let op = assemble_laplacian(&mask).unwrap();
        let natural: Vec<usize> = (0..mask.len()).collect();
        let good = elimination_order(&mask);
        assert!(
            ProfileCholesky::envelope_size(&op.matrix, &good) * 4
                < ProfileCholesky::envelope_size(&op.matrix, &natural)
        );
    }
}
