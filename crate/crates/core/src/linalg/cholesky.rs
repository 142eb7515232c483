use crate::error::{Error, Result};

use super::sparse::{dot, CsrMatrix};

/// Envelope (skyline) Cholesky factor of `P (scale*A + shift*I) P^T`.
///
/// Row `i` of `L` is stored densely from its first structural nonzero to the diagonal,
/// so fill stays inside the envelope of the permuted matrix.
#[derive(Clone, Debug)]
pub struct ProfileCholesky {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl ProfileCholesky {
    /// Number of stored entries a factorization with `perm` would need.
    pub fn envelope_size(a: &CsrMatrix, perm: &[usize]) -> usize {
        let inv = inverse(perm);
        (0..a.n)
            .map(|i| {
                let f = a.row(perm[i]).map(|(j, _)| inv[j]).min().unwrap_or(i).min(i);
                i - f + 1
            })
            .sum()
    }

    pub fn factor(a: &CsrMatrix, perm: &[usize], scale: f64, shift: f64) -> Result<Self> {
        let n = a.n;
        assert_eq!(perm.len(), n);
        let inv = inverse(perm);
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            let f = a.row(perm[i]).map(|(j, _)| inv[j]).min().unwrap_or(i).min(i);
            first.push(f);
            start.push(start[i] + (i - f + 1));
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in a.row(perm[i]) {
                let jn = inv[j];
                if jn <= i {
                    data[start[i] + jn - first[i]] += scale * v;
                }
            }
            data[start[i] + i - first[i]] += shift;
        }

        for i in 0..n {
            let fi = first[i];
            let (head, tail) = data.split_at_mut(start[i]);
            let row_i = &mut tail[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &head[start[j]..start[j] + (j - fj + 1)];
                let s = dot(&row_i[k0 - fi..j - fi], &row_j[k0 - fj..j - fj]);
                row_i[j - fi] = (row_i[j - fi] - s) / row_j[j - fj];
            }
            let off = &row_i[..i - fi];
            let d = row_i[i - fi] - dot(off, off);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    pivot: perm[i],
                    value: d,
                });
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(ProfileCholesky {
            n,
            perm: perm.to_vec(),
            first,
            start,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stored_entries(&self) -> usize {
        self.data.len()
    }

    /// Smallest diagonal entry of `L`, squared; a cheap proxy for conditioning.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[self.start[i + 1] - 1].powi(2))
            .fold(f64::INFINITY, f64::min)
    }

    /// Solve `(scale*A + shift*I) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s = dot(&row[..i - fi], &y[fi..i]);
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (yk, lk) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= lk * yi;
            }
        }
        for (k, &p) in self.perm.iter().enumerate() {
            b[p] = y[k];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        assert!(inv[p] == usize::MAX, "not a permutation");
        inv[p] = k;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        CsrMatrix::from_rows(
            (0..n)
                .map(|i| {
                    let mut row = vec![(i, 2.0)];
                    if i > 0 {
                        row.push((i - 1, -1.0));
                    }
                    if i + 1 < n {
                        row.push((i + 1, -1.0));
                    }
                    row
                })
                .collect(),
        )
    }

    #[test]
    fn solves_tridiagonal() {
        let a = laplacian_1d(50);
        let perm: Vec<usize> = (0..50).collect();
        let f = ProfileCholesky::factor(&a, &perm, 1.0, 0.0).unwrap();
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        let r = a.mul(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-10);
        }
        assert_eq!(f.stored_entries(), 99);
    }

    #[test]
    fn indefinite_shift_is_reported() {
        let a = laplacian_1d(10);
        let perm: Vec<usize> = (0..10).rev().collect();
        // lambda_1 = 2 - 2cos(pi/11) ~ 0.081
        let err = ProfileCholesky::factor(&a, &perm, 1.0, -0.5).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    proptest! {
        #[test]
        fn random_spd_with_random_ordering(
            n in 2usize..30,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng, seq::SliceRandom};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rows = vec![Vec::new(); n];
            for i in 0..n {
                for j in 0..i {
                    if rng.gen_bool(0.3) {
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        rows[i].push((j, v));
                        rows[j].push((i, v));
                    }
                }
            }
            for (i, row) in rows.iter_mut().enumerate() {
                let s: f64 = row.iter().map(|e| e.1.abs()).sum();
                row.push((i, s + 1.0));
            }
            let a = CsrMatrix::from_rows(rows);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let f = ProfileCholesky::factor(&a, &perm, 2.0, 0.5).unwrap();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = f.solve(&b);
            let ax = a.mul(&x);
            for i in 0..n {
                prop_assert!((2.0 * ax[i] + 0.5 * x[i] - b[i]).abs() < 1e-10);
            }
        }
    }
}
