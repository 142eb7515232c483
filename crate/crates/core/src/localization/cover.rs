use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Cube, CubeLattice, GridMask, Point};
use crate::spectral::ground_state;

use super::mollifier::Mollifier;

/// Cells whose sub-mask has fewer nodes than this are flagged as low confidence.
pub const LOW_CONFIDENCE_NODES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub index: [i64; 2],
    pub nodes: usize,
    pub lambda1: f64,
    pub bad: bool,
    pub low_confidence: bool,
}

/// Bad cells `J(n, t)` of a mask and the sets built from them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubeCover {
    pub n: f64,
    pub t: f64,
    pub dimension: usize,
    pub h: f64,
    /// Every visited cell with a nonempty intersection, sorted by index.
    pub cells: Vec<CellRecord>,
    /// `J(n, t)`, sorted.
    pub bad: Vec<[i64; 2]>,
    /// `Z^d` points on the boundary of `F̃_n`.
    pub z_points: Vec<[i64; 2]>,
    /// Unit cells meeting the part of the mask outside `F̃̃_n`.
    pub y_cells: Vec<[i64; 2]>,
    pub counts: SetCounts,
    #[serde(skip)]
    pub in_f: Vec<bool>,
    #[serde(skip)]
    pub in_f_tilde: Vec<bool>,
    #[serde(skip)]
    pub in_f_tilde2: Vec<bool>,
    /// Nodes of `Omega` outside the closure of `F_n`.
    #[serde(skip)]
    pub in_g: Vec<bool>,
    /// Smoothed indicator `rho * 1_{F̃_n}` at the mask nodes.
    #[serde(skip)]
    pub xi: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCounts {
    pub f: usize,
    pub f_tilde: usize,
    pub f_tilde2: usize,
    pub g: usize,
}

impl CubeCover {
    pub fn lattice(&self) -> CubeLattice {
        CubeLattice::new(self.dimension, self.n)
    }

    pub fn low_confidence(&self) -> Vec<[i64; 2]> {
        self.cells.iter().filter(|c| c.low_confidence).map(|c| c.index).collect()
    }

    /// Sub-mask of `G_n`, or `None` when it has no nodes.
    pub fn g_mask(&self, mask: &GridMask) -> Option<GridMask> {
        mask.subset(|k| self.in_g[k]).map(|(m, _)| m)
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(crate::output::to_json_string(self)?)
    }
}

fn sup_distance(p: Point, c: &Cube, d: usize) -> f64 {
    (0..d).map(|k| (p[k] - c.centre[k]).abs()).fold(0.0, f64::max)
}

/// Unit cell `(l - 1/2, l + 1/2]^d` containing `p`.
pub fn unit_cell(p: Point, dimension: usize) -> [i64; 2] {
    let c = |v: f64| (v - 0.5).ceil() as i64;
    if dimension == 1 {
        [c(p[0]), 0]
    } else {
        [c(p[0]), c(p[1])]
    }
}

/// Compute `J(n, t)` by a ground-state solve on every nonempty `Omega ∩ Q_{n,j}` and
/// derive `F_n`, `F̃_n`, `F̃̃_n`, `G_n`, `Z_n`, `Y_n` and `xi_n` on the mask nodes.
pub fn bad_cells(mask: &GridMask, n: f64, t: f64, mollifier: &Mollifier) -> Result<CubeCover> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("threshold must be positive, got {t}")));
    }
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Config(format!("cube scale must be at least 1, got {n}")));
    }
    let d = mask.dimension;
    let lattice = CubeLattice::new(d, n);
    let (lo, hi) = mask.bounding_box();
    let mut candidates = lattice.indices_meeting(lo, hi, 1.0);
    candidates.sort();

    let mut cells = Vec::new();
    for j in candidates {
        let cube = lattice.cube(j);
        let Some((sub, _)) = mask.subset(|k| cube.contains(mask.coord(k), d)) else {
            continue;
        };
        let lambda1 = ground_state(&sub).map_err(|e| e.in_cell(&j[..d]))?;
        cells.push(CellRecord {
            index: j,
            nodes: sub.len(),
            lambda1,
            bad: lambda1 < t,
            low_confidence: sub.len() < LOW_CONFIDENCE_NODES,
        });
    }
    let bad: Vec<[i64; 2]> = cells.iter().filter(|c| c.bad).map(|c| c.index).collect();
    let cubes: Vec<Cube> = bad.iter().map(|&j| lattice.cube(j)).collect();
    let tilde: Vec<Cube> = bad.iter().map(|&j| lattice.enlarged(j)).collect();
    let tilde2: Vec<Cube> = bad.iter().map(|&j| lattice.doubly_enlarged(j)).collect();

    let any_open = |set: &[Cube], p: Point| set.iter().any(|c| c.contains(p, d));
    let len = mask.len();
    let mut in_f = vec![false; len];
    let mut in_f_tilde = vec![false; len];
    let mut in_f_tilde2 = vec![false; len];
    let mut in_g = vec![false; len];
    for k in 0..len {
        let p = mask.coord(k);
        in_f[k] = any_open(&cubes, p);
        in_f_tilde[k] = any_open(&tilde, p);
        in_f_tilde2[k] = any_open(&tilde2, p);
        in_g[k] = !cubes.iter().any(|c| c.contains_closed(p, d));
    }

    let z_points = boundary_lattice_points(&tilde, d);

    let mut y_cells: Vec<[i64; 2]> = (0..len)
        .filter(|&k| !in_f_tilde2[k])
        .map(|k| unit_cell(mask.coord(k), d))
        .collect();
    y_cells.sort();
    y_cells.dedup();

    let xi = smoothed_indicator(mask, &tilde, mollifier);

    let counts = SetCounts {
        f: in_f.iter().filter(|&&b| b).count(),
        f_tilde: in_f_tilde.iter().filter(|&&b| b).count(),
        f_tilde2: in_f_tilde2.iter().filter(|&&b| b).count(),
        g: in_g.iter().filter(|&&b| b).count(),
    };
    Ok(CubeCover {
        n,
        t,
        dimension: d,
        h: mask.h,
        cells,
        bad,
        z_points,
        y_cells,
        counts,
        in_f,
        in_f_tilde,
        in_f_tilde2,
        in_g,
        xi,
    })
}

/// Integer points in the closure of a union of open cubes but not in the union.
fn boundary_lattice_points(cubes: &[Cube], d: usize) -> Vec<[i64; 2]> {
    if cubes.is_empty() {
        return Vec::new();
    }
    let mut lo = [i64::MAX; 2];
    let mut hi = [i64::MIN; 2];
    for c in cubes {
        for k in 0..d {
            lo[k] = lo[k].min((c.centre[k] - c.half).floor() as i64);
            hi[k] = hi[k].max((c.centre[k] + c.half).ceil() as i64);
        }
    }
    if d == 1 {
        lo[1] = 0;
        hi[1] = 0;
    }
    let mut out = Vec::new();
    for y in lo[1]..=hi[1] {
        for x in lo[0]..=hi[0] {
            let p = [x as f64, y as f64];
            if cubes.iter().any(|c| c.contains_closed(p, d)) && !cubes.iter().any(|c| c.contains(p, d)) {
                out.push([x, y]);
            }
        }
    }
    out.sort();
    out
}

/// Discrete convolution of `1_{F̃}` with the mollifier sampled on the mask lattice.
fn smoothed_indicator(mask: &GridMask, tilde: &[Cube], mollifier: &Mollifier) -> Vec<f64> {
    let d = mask.dimension;
    let kernel = mollifier.lattice_kernel(mask.h);
    (0..mask.len())
        .map(|k| {
            let p = mask.coord(k);
            if tilde.iter().any(|c| sup_distance(p, c, d) <= c.half - 0.5) {
                return 1.0;
            }
            if tilde.iter().all(|c| sup_distance(p, c, d) >= c.half + 0.5) {
                return 0.0;
            }
            let mut inside = 0usize;
            let mut acc = 0.0;
            for &(off, w) in &kernel {
                let q = [p[0] + mask.h * off[0] as f64, p[1] + mask.h * off[1] as f64];
                if tilde.iter().any(|c| c.contains(q, d)) {
                    inside += 1;
                    acc += w;
                }
            }
            if inside == kernel.len() {
                1.0
            } else if inside == 0 {
                0.0
            } else {
                acc.clamp(0.0, 1.0)
            }
        })
        .collect()
}
