use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridMask;

use super::cover::{unit_cell, CubeCover};
use super::params::DecayParams;

/// Cells with mass at or below this are left out of the rate fit.
pub const MASS_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCell {
    pub cell: [i64; 2],
    pub distance: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub cells: Vec<DecayCell>,
    /// `||(1 - xi_n) Phi||_1`
    pub total_mass: f64,
    /// Minus the slope of the least-squares line through `(distance, ln mass)`.
    pub fitted_rate: Option<f64>,
    pub alpha: f64,
    pub cells_in_fit: usize,
    /// False when fewer than 4 cells carry mass above the floor.
    pub reliable: bool,
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Per-unit-cell `L^1` masses of `(1 - xi_n) Phi` and an exponential rate fitted
/// against the distance of each cell to `Z_n`.
pub fn decay_profile(phi: &[f64], mask: &GridMask, cover: &CubeCover, params: &DecayParams) -> Result<DecayProfile> {
    if phi.len() != mask.len() || cover.xi.len() != mask.len() {
        return Err(Error::Config("eigenfunction, cover and mask sizes differ".into()));
    }
    let d = mask.dimension;
    let w = mask.cell_volume();
    let mut masses: BTreeMap<[i64; 2], f64> = BTreeMap::new();
    let mut total = 0.0;
    for k in 0..mask.len() {
        let v = w * ((1.0 - cover.xi[k]) * phi[k]).abs();
        total += v;
        *masses.entry(unit_cell(mask.coord(k), d)).or_insert(0.0) += v;
    }
    let distance = |c: [i64; 2]| {
        cover
            .z_points
            .iter()
            .map(|z| (((c[0] - z[0]).pow(2) + (c[1] - z[1]).pow(2)) as f64).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    let cells: Vec<DecayCell> = masses
        .into_iter()
        .map(|(cell, mass)| DecayCell {
            cell,
            distance: distance(cell),
            mass,
        })
        .collect();
    let points: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| c.mass > MASS_FLOOR && c.distance.is_finite())
        .map(|c| (c.distance, c.mass.ln()))
        .collect();
    let reliable = points.len() >= 4;
    Ok(DecayProfile {
        total_mass: total,
        fitted_rate: fit_slope(&points).map(|s| -s),
        alpha: params.alpha,
        cells_in_fit: points.len(),
        reliable,
        cells,
    })
}

impl DecayProfile {
    /// CSV with columns `cell_index, distance_to_Zn, l1_mass`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["cell_index", "distance_to_Zn", "l1_mass"])?;
        for c in &self.cells {
            w.write_record([
                format!("{}:{}", c.cell[0], c.cell[1]),
                crate::output::fmt_f64(c.distance),
                crate::output::fmt_f64(c.mass),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_domain, rasterize};
    use crate::localization::{bad_cells, build_mollifier};
    use crate::spectral::{lowest_eigenpairs, Request};

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        assert!((fit_slope(&pts).unwrap() + 0.5).abs() < 1e-14);
        assert!(fit_slope(&[(1.0, 2.0)]).is_none());
    }

    #[test]
    fn masses_partition_and_vanish_inside() {
        let spec = parse_domain("dim=2; rect 0 0 3.2 3.2; rect 3.2 1.3 30 1.9").unwrap();
        let mask = rasterize(&spec, 1.0 / 8.0).unwrap();
        let eig = lowest_eigenpairs(&mask, Request::Count(1)).unwrap();
        let c = eig.eigenvalues[0].sqrt();
        let scaled = mask.scaled(c);
        let phi: Vec<f64> = eig.functions[0].iter().map(|v| v / c).collect();
        let p = DecayParams::standard(2, 1.0, 2.0).unwrap();
        let cover = bad_cells(&scaled, 2.0, p.t, &build_mollifier(2, 64)).unwrap();
        let prof = decay_profile(&phi, &scaled, &cover, &p).unwrap();
        let sum: f64 = prof.cells.iter().map(|c| c.mass).sum();
        assert!((sum - prof.total_mass).abs() < 1e-10);
        // No mass on unit cells lying inside F_n.
        let lat = cover.lattice();
        for cell in &prof.cells {
            let centre = [cell.cell[0] as f64, cell.cell[1] as f64];
            let deep = cover.bad.iter().any(|&j| {
                let q = lat.cube(j);
                (centre[0] - q.centre[0]).abs() < q.half - 1.0 && (centre[1] - q.centre[1]).abs() < q.half - 1.0
            });
            if deep {
                assert_eq!(cell.mass, 0.0);
            }
        }
        assert!(prof.reliable);
        assert!(prof.fitted_rate.unwrap() >= p.alpha);
    }
}
