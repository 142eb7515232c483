use crate::bounds::BoundReport;
use crate::error::Result;
use crate::geometry::GridMask;
use crate::spectral::ground_state;

use super::cover::CubeCover;
use super::params::DecayParams;

/// `|J(n, t)| <= 3^d N_t`.
pub fn check_lemma31(cover: &CubeCover, n_t: usize) -> BoundReport {
    let d = cover.dimension as i32;
    let rhs = 3f64.powi(d) * n_t as f64;
    let mut r = BoundReport::explicit("lemma31", cover.bad.len() as f64, rhs, 1.0)
        .with_input("n", cover.n)
        .with_input("t", cover.t)
        .with_input("d", d as f64)
        .with_input("h", cover.h)
        .with_input("N_t", n_t as f64);
    if cover.bad.is_empty() {
        r.ratio = 0.0;
    }
    let low = cover.low_confidence();
    if !low.is_empty() {
        r = r.with_note(format!("{} low-confidence cells (fewer than 10 nodes)", low.len()));
    }
    r
}

/// `|Z_n| <= 2^{3d-2} 3^d n^{d-1} N_t`.
pub fn check_eq319(cover: &CubeCover, n_t: usize) -> BoundReport {
    let d = cover.dimension as i32;
    let c = 2f64.powi(3 * d - 2) * 3f64.powi(d);
    let rhs = c * cover.n.powi(d - 1) * n_t as f64;
    let mut r = BoundReport::explicit("eq319", cover.z_points.len() as f64, rhs, 1.0)
        .with_input("n", cover.n)
        .with_input("t", cover.t)
        .with_input("d", d as f64)
        .with_input("N_t", n_t as f64);
    if cover.z_points.is_empty() {
        r.ratio = 0.0;
    }
    r
}

/// Discretization allowance for the ground state of `G_n`: `0.05 s min{1, (128 h)^2}`
/// with `h` the mesh width of the unscaled problem.
pub fn lemma32_tolerance(s: f64, h: f64) -> f64 {
    0.05 * s * (128.0 * h).powi(2).min(1.0)
}

/// `lambda_1(H_{G_n}) >= s - delta_h` for `n >= n0`; stored as `s - delta_h <= lambda_1`.
pub fn check_lemma32(cover: &CubeCover, params: &DecayParams, mask: &GridMask, delta_h: f64) -> Result<BoundReport> {
    if cover.n < params.n0 {
        return Ok(BoundReport::precondition(
            "lemma32",
            &format!("n = {} is below n0 = {}", cover.n, params.n0),
        )
        .with_input("n", cover.n)
        .with_input("n0", params.n0));
    }
    let Some(g) = cover.g_mask(mask) else {
        return Ok(BoundReport::vacuous("lemma32", "G_n is empty")
            .with_input("n", cover.n)
            .with_input("s", params.s));
    };
    let lambda_g = ground_state(&g)?;
    Ok(BoundReport::explicit("lemma32", params.s - delta_h, lambda_g, 1.0)
        .with_input("n", cover.n)
        .with_input("n0", params.n0)
        .with_input("r", params.r)
        .with_input("t", params.t)
        .with_input("s", params.s)
        .with_input("delta_h", delta_h)
        .with_input("lambda1_G", lambda_g)
        .with_input("G_nodes", g.len() as f64))
}
