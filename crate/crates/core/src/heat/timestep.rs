use crate::error::{Error, Result};
use crate::geometry::GridMask;
use crate::linalg::ProfileCholesky;
use crate::spectral::{assemble_laplacian, elimination_order};

/// Largest time step used by [`default_steps`].
pub const MAX_DT: f64 = 1e-3;

/// Step count with `dt <= min(h, MAX_DT)` and at least 16 steps.
pub fn default_steps(t: f64, h: f64) -> usize {
    ((t / h.min(MAX_DT)).ceil() as usize).max(16)
}

/// `Q(t) = h^d sum u(., t)` for the heat flow started from `u = 1` with zero boundary values.
///
/// Crank-Nicolson with uniform steps; the first two steps are replaced by four
/// backward-Euler half steps so the incompatible initial data do not excite
/// undamped oscillations. Both schemes share one factorization of `I + (dt/2) A`.
pub fn heat_content_timestep(mask: &GridMask, t: f64, steps: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("time must be positive, got {t}")));
    }
    if steps < 16 {
        return Err(Error::Config(format!("need at least 16 time steps, got {steps}")));
    }
    let op = assemble_laplacian(mask)?;
    let perm = elimination_order(mask);
    let dt = t / steps as f64;
    let chol = ProfileCholesky::factor(&op.matrix, &perm, 0.5 * dt, 1.0)?;
    let mut u = vec![1.0; mask.len()];
    for _ in 0..4 {
        chol.solve_in_place(&mut u);
    }
    let mut au = vec![0.0; mask.len()];
    for _ in 2..steps {
        op.matrix.matvec(&u, &mut au);
        for (x, a) in u.iter_mut().zip(&au) {
            *x -= 0.5 * dt * a;
        }
        chol.solve_in_place(&mut u);
    }
    Ok(mask.cell_volume() * u.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_domain, presets, rasterize};

    #[test]
    fn unit_interval_matches_spectral_value() {
        let mask = rasterize(&presets::unit_interval(), 1.0 / 512.0).unwrap();
        let q = heat_content_timestep(&mask, 0.1, 256).unwrap();
        assert!((q - 0.30211809).abs() < 1e-3, "{q}");
    }

    #[test]
    fn short_time_keeps_the_volume() {
        let mask = rasterize(&presets::unit_interval(), 1.0 / 512.0).unwrap();
        let q = heat_content_timestep(&mask, 1e-6, 16).unwrap();
        assert!((q - 1.0).abs() < 1e-2);
    }

    #[test]
    fn content_decreases() {
        let mask = rasterize(&parse_domain("dim=2; rect 0 0 1 2").unwrap(), 1.0 / 16.0).unwrap();
        let a = heat_content_timestep(&mask, 0.05, 32).unwrap();
        let b = heat_content_timestep(&mask, 0.1, 32).unwrap();
        assert!(b < a);
    }

    #[test]
    fn rejects_few_steps() {
        let mask = rasterize(&presets::unit_interval(), 1.0 / 16.0).unwrap();
        assert!(heat_content_timestep(&mask, 0.1, 8).is_err());
    }
}
