use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::cholesky::ProfileCholesky;
use super::sparse::{axpy, dot, norm, CsrMatrix};

#[derive(Clone, Debug)]
pub struct EigenOptions {
    pub block: usize,
    /// Residual tolerance relative to the Ritz value of the inverse operator.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Problems up to this size are solved densely.
    pub dense_cutoff: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            block: 4,
            tol: 1e-10,
            max_restarts: 200,
            seed: 0x5eed_d1c7,
            dense_cutoff: 600,
        }
    }
}

/// Eigenpairs in ascending order; vectors have unit Euclidean norm.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `||A x - lambda x|| / lambda` for each pair.
    pub residuals: Vec<f64>,
}

/// The `k` smallest eigenpairs of the symmetric positive definite matrix `a`.
///
/// `perm` is the elimination order used for the factorization (`perm[new] = old`).
pub fn smallest_eigenpairs(
    a: &CsrMatrix,
    perm: &[usize],
    k: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = a.n;
    let k = k.min(n);
    if k == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
        });
    }
    let b = opts.block.max(1);
    let basis_max = round_up((2 * k).max(k + 5 * b) + b, b);
    if n <= opts.dense_cutoff || basis_max + 2 * b >= n {
        if n > opts.dense_cutoff.max(4000) {
            return Err(Error::Solver {
                message: format!("{k} eigenpairs requested from a system of size {n}"),
                max_residual: f64::NAN,
            });
        }
        return dense(a, k);
    }
    let chol = ProfileCholesky::factor(a, perm, 1.0, 0.0)?;
    krylov(a, &chol, k, b, basis_max, opts)
}

fn round_up(x: usize, b: usize) -> usize {
    x.div_ceil(b) * b
}

fn dense(a: &CsrMatrix, k: usize) -> Result<EigenPairs> {
    let n = a.n;
    let m = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let mut out = EigenPairs {
        values: Vec::with_capacity(k),
        vectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
    };
    for &c in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let s = norm(&v);
        v.iter_mut().for_each(|x| *x /= s);
        push_pair(a, v, &mut out);
    }
    finish(out)
}

fn push_pair(a: &CsrMatrix, v: Vec<f64>, out: &mut EigenPairs) {
    let av = a.mul(&v);
    let lambda = dot(&v, &av);
    let mut r = av;
    axpy(-lambda, &v, &mut r);
    out.residuals.push(norm(&r) / lambda.abs().max(f64::MIN_POSITIVE));
    out.values.push(lambda);
    out.vectors.push(v);
}

fn finish(mut out: EigenPairs) -> Result<EigenPairs> {
    let mut order: Vec<usize> = (0..out.values.len()).collect();
    order.sort_by(|&x, &y| out.values[x].total_cmp(&out.values[y]));
    out.values = order.iter().map(|&i| out.values[i]).collect();
    out.residuals = order.iter().map(|&i| out.residuals[i]).collect();
    let mut vectors = std::mem::take(&mut out.vectors);
    out.vectors = order.iter().map(|&i| std::mem::take(&mut vectors[i])).collect();
    if let Some(&v) = out.values.first() {
        if !(v > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: 0, value: v });
        }
    }
    Ok(out)
}

struct Basis {
    vectors: Vec<Vec<f64>>,
    /// `h[i][j] = v_i^T M v_j`, dense, sized for the largest basis.
    h: Vec<Vec<f64>>,
}

impl Basis {
    /// Orthogonalize `w` against every stored vector twice; returns the coefficients.
    fn project_out(&self, w: &mut [f64]) -> Vec<f64> {
        let mut coeff = vec![0.0; self.vectors.len()];
        for _ in 0..2 {
            let c: Vec<f64> = self.vectors.iter().map(|v| dot(v, w)).collect();
            for (v, &ci) in self.vectors.iter().zip(&c) {
                axpy(-ci, v, w);
            }
            for (a, ci) in coeff.iter_mut().zip(c) {
                *a += ci;
            }
        }
        coeff
    }
}

/// Orthonormalize `block` against `basis` and itself. Returns the triangular
/// coefficients `R` (column j holds the expansion of the original j-th vector).
/// Rank-deficient directions are replaced by fresh random vectors with zero coefficient.
fn orthonormalize_block(
    basis: &Basis,
    block: &mut [Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let b = block.len();
    let mut r = vec![vec![0.0; b]; b];
    for j in 0..b {
        let original = norm(&block[j]);
        for _ in 0..2 {
            for i in 0..j {
                let c = dot(&block[i], &block[j]);
                let (lo, hi) = block.split_at_mut(j);
                axpy(-c, &lo[i], &mut hi[0]);
                r[i][j] += c;
            }
        }
        let mut s = norm(&block[j]);
        if !(s > 1e-10 * original) || original == 0.0 {
            r[j][j] = 0.0;
            loop {
                for x in block[j].iter_mut() {
                    *x = rng.gen_range(-1.0..1.0);
                }
                basis.project_out(&mut block[j]);
                for _ in 0..2 {
                    for i in 0..j {
                        let c = dot(&block[i], &block[j]);
                        let (lo, hi) = block.split_at_mut(j);
                        axpy(-c, &lo[i], &mut hi[0]);
                    }
                }
                s = norm(&block[j]);
                if s > 1e-8 {
                    break;
                }
            }
        } else {
            r[j][j] = s;
        }
        block[j].iter_mut().for_each(|x| *x /= s);
    }
    r
}

fn krylov(
    a: &CsrMatrix,
    chol: &ProfileCholesky,
    k: usize,
    b: usize,
    basis_max: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = a.n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cap = basis_max + b;
    let mut basis = Basis {
        vectors: Vec::with_capacity(cap),
        h: vec![vec![0.0; cap]; cap],
    };
    let mut pending: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize_block(&basis, &mut pending, &mut rng);
    let keep = (k + b).min(basis_max - 2 * b);
    let mut worst = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        // Expand until the basis is full.
        while basis.vectors.len() + b <= basis_max {
            let m = basis.vectors.len();
            let mut w: Vec<Vec<f64>> = pending.iter().map(|p| chol.solve(p)).collect();
            basis.vectors.append(&mut pending);
            for (c, wc) in w.iter_mut().enumerate() {
                let coeff = basis.project_out(wc);
                for (row, value) in coeff.into_iter().enumerate() {
                    basis.h[row][m + c] = value;
                }
            }
            let r = orthonormalize_block(&basis, &mut w, &mut rng);
            for (i, row) in r.iter().enumerate() {
                for (c, &value) in row.iter().enumerate() {
                    basis.h[m + b + i][m + c] = value;
                }
            }
            pending = w;
        }

        let m = basis.vectors.len();
        let t = DMatrix::from_fn(m, m, |i, j| 0.5 * (basis.h[i][j] + basis.h[j][i]));
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let residual = |c: usize| -> f64 {
            let y = eig.eigenvectors.column(c);
            let mut s = 0.0;
            for i in 0..b {
                let mut r = 0.0;
                for j in 0..m {
                    r += basis.h[m + i][j] * y[j];
                }
                s += r * r;
            }
            s.sqrt()
        };
        worst = order[..k]
            .iter()
            .map(|&c| residual(c) / eig.eigenvalues[c].abs())
            .fold(0.0, f64::max);

        let ritz = |c: usize| -> Vec<f64> {
            let y = eig.eigenvectors.column(c);
            let mut x = vec![0.0; n];
            for (j, v) in basis.vectors.iter().enumerate() {
                axpy(y[j], v, &mut x);
            }
            x
        };

        if worst <= opts.tol {
            let mut out = EigenPairs {
                values: Vec::with_capacity(k),
                vectors: Vec::with_capacity(k),
                residuals: Vec::with_capacity(k),
            };
            for &c in &order[..k] {
                let mut x = ritz(c);
                let s = norm(&x);
                x.iter_mut().for_each(|v| *v /= s);
                push_pair(a, x, &mut out);
            }
            return finish(out);
        }

        // Thick restart on the leading Ritz vectors.
        let kept: Vec<usize> = order[..keep].to_vec();
        let new_vectors: Vec<Vec<f64>> = kept.iter().map(|&c| ritz(c)).collect();
        let mut h = vec![vec![0.0; cap]; cap];
        for (i, &c) in kept.iter().enumerate() {
            h[i][i] = eig.eigenvalues[c];
            let y = eig.eigenvectors.column(c);
            for r in 0..b {
                let mut s = 0.0;
                for j in 0..m {
                    s += basis.h[m + r][j] * y[j];
                }
                h[keep + r][i] = s;
            }
        }
        basis.vectors = new_vectors;
        // Re-orthonormalize the kept vectors against each other to stop drift.
        for j in 0..basis.vectors.len() {
            let (lo, hi) = basis.vectors.split_at_mut(j);
            for v in lo.iter() {
                let c = dot(v, &hi[0]);
                axpy(-c, v, &mut hi[0]);
            }
            let s = norm(&hi[0]);
            hi[0].iter_mut().for_each(|x| *x /= s);
        }
        basis.h = h;
    }
    Err(Error::Solver {
        message: format!(
            "{k} eigenpairs not converged after {} restarts",
            opts.max_restarts
        ),
        max_residual: worst,
    })
}
