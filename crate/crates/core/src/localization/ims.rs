use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::geometry::GridMask;

/// One-dimensional factor of the base bump, scaled so that it equals 1 at `|s| = 1/2`.
pub fn bump_factor(s: f64) -> f64 {
    let u = 1.0 - s * s;
    if u <= 0.0 {
        0.0
    } else {
        (4.0 / 3.0 - 1.0 / u).exp()
    }
}

fn bump_factor_derivative(s: f64) -> f64 {
    let u = 1.0 - s * s;
    if u <= 0.0 {
        0.0
    } else {
        bump_factor(s) * (-2.0 * s / (u * u))
    }
}

/// One-dimensional partition factor `P(s) = phi(s) / sqrt(sum_k phi(s - k)^2)`.
/// `Psi_j(x) = prod_i P(x_i - j_i)` and `sum_j Psi_j^2 = 1`.
pub fn partition_factor(s: f64) -> f64 {
    partition_factor_and_derivative(s).0
}

pub fn partition_factor_and_derivative(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let f = s - s.floor();
    let (a, b) = (f, f - 1.0);
    let w = bump_factor(a).powi(2) + bump_factor(b).powi(2);
    let dw = 2.0 * (bump_factor(a) * bump_factor_derivative(a) + bump_factor(b) * bump_factor_derivative(b));
    let p = bump_factor(s) / w.sqrt();
    let dp = bump_factor_derivative(s) / w.sqrt() - 0.5 * bump_factor(s) * dw / w.powf(1.5);
    (p, dp)
}

/// `Psi_j(x)` and its gradient at unit scale.
pub fn unit_weight(j: [i64; 2], x: [f64; 2], dimension: usize) -> (f64, [f64; 2]) {
    let (p0, d0) = partition_factor_and_derivative(x[0] - j[0] as f64);
    if dimension == 1 {
        return (p0, [d0, 0.0]);
    }
    let (p1, d1) = partition_factor_and_derivative(x[1] - j[1] as f64);
    (p0 * p1, [d0 * p1, p0 * d1])
}

/// `||grad Psi_0||_inf` sampled on a grid with 1024 intervals per axis over `[-1, 1]^d`.
pub fn ims_constant(dimension: usize) -> f64 {
    static C: [OnceLock<f64>; 2] = [OnceLock::new(), OnceLock::new()];
    *C[dimension.clamp(1, 2) - 1].get_or_init(|| {
        let m = 1024;
        let pts: Vec<(f64, f64)> = (0..=m)
            .map(|i| partition_factor_and_derivative(-1.0 + 2.0 * i as f64 / m as f64))
            .collect();
        if dimension == 1 {
            return pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        }
        let mut best: f64 = 0.0;
        for a in &pts {
            for b in &pts {
                best = best.max((a.1 * b.0).hypot(a.0 * b.1));
            }
        }
        best
    })
}

/// `Psi_{n,j}` sampled on the nodes of a mask.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IMSPartition {
    pub n: f64,
    pub dimension: usize,
    pub c0: f64,
    /// Per node: cell indices `j` with `Psi_{n,j} != 0` there and the weight value.
    #[serde(skip)]
    pub weights: Vec<Vec<([i64; 2], f64)>>,
}

pub fn build_ims_partition(n: f64, mask: &GridMask) -> IMSPartition {
    assert!(n >= 1.0, "IMS scale must be at least 1");
    let d = mask.dimension;
    let weights = (0..mask.len())
        .map(|k| {
            let p = mask.coord(k);
            let y = [p[0] / n, p[1] / n];
            let (lx, ly) = (y[0].floor() as i64, y[1].floor() as i64);
            let mut out = Vec::with_capacity(4);
            let ys: &[i64] = if d == 1 { &[0] } else { &[ly, ly + 1] };
            for &jy in ys {
                for jx in [lx, lx + 1] {
                    let (v, _) = unit_weight([jx, jy], y, d);
                    if v > 0.0 {
                        out.push(([jx, jy], v));
                    }
                }
            }
            out
        })
        .collect();
    IMSPartition {
        n,
        dimension: d,
        c0: ims_constant(d),
        weights,
    }
}

impl IMSPartition {
    pub fn weight(&self, j: [i64; 2], x: [f64; 2]) -> f64 {
        unit_weight(j, [x[0] / self.n, x[1] / self.n], self.dimension).0
    }

    pub fn gradient(&self, j: [i64; 2], x: [f64; 2]) -> [f64; 2] {
        let g = unit_weight(j, [x[0] / self.n, x[1] / self.n], self.dimension).1;
        [g[0] / self.n, g[1] / self.n]
    }

    /// `sum_j Psi_{n,j}^2` at mask node `k`.
    pub fn sum_of_squares(&self, k: usize) -> f64 {
        self.weights[k].iter().map(|e| e.1 * e.1).sum()
    }
}
