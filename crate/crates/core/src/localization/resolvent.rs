use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridMask;
use crate::linalg::{norm, ProfileCholesky};
use crate::spectral::{assemble_laplacian, elimination_order, ground_state};

use super::cover::unit_cell;
use super::decay::{fit_slope, MASS_FLOOR};
use super::params::DecayParams;

pub const POWER_ITERATIONS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNorm {
    pub source: [i64; 2],
    pub target: [i64; 2],
    pub distance: f64,
    pub norm: f64,
    /// `norm / (e^{-alpha |k - l|} / (s - r))`
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventProfile {
    pub lambda: f64,
    pub lambda1_g: f64,
    pub alpha: f64,
    pub blocks: Vec<BlockNorm>,
    /// Minus the slope of `ln norm` against `|k - l|` over off-diagonal blocks.
    pub fitted_rate: Option<f64>,
    pub blocks_in_fit: usize,
    /// Diagonal blocks within `1 / (lambda_1(G) - lambda)`.
    pub diagonal_bounded: bool,
}

/// First cell, in index order, of the largest connected component of `mask`.
pub fn default_source(mask: &GridMask) -> [i64; 2] {
    let comps = mask.components();
    let biggest = comps.iter().max_by_key(|c| c.len()).expect("mask has a node");
    biggest
        .iter()
        .map(|&k| unit_cell(mask.coord(k), mask.dimension))
        .min()
        .expect("component has a node")
}

/// Block norms `||chi_k (H_G - lambda)^{-1} chi_l||` by a power iteration on each block,
/// for every source cell `l` and every unit cell `k` of the source's component.
pub fn resolvent_block_norms(
    mask_g: &GridMask,
    lambda: f64,
    params: &DecayParams,
    sources: &[[i64; 2]],
) -> Result<ResolventProfile> {
    let lambda1_g = ground_state(mask_g)?;
    if !(lambda <= params.r && params.s <= lambda1_g) {
        return Err(Error::Precondition(format!(
            "need lambda <= r < s <= lambda_1(G); lambda = {lambda}, r = {}, s = {}, lambda_1(G) = {lambda1_g}",
            params.r, params.s
        )));
    }
    let op = assemble_laplacian(mask_g)?;
    let perm = elimination_order(mask_g);
    let chol = ProfileCholesky::factor(&op.matrix, &perm, 1.0, -lambda).map_err(|_| Error::Singular { lambda })?;
    let diag_max = op.matrix.diagonal().into_iter().fold(0.0, f64::max);
    if chol.min_pivot() < 1e-12 * diag_max {
        return Err(Error::Singular { lambda });
    }

    let d = mask_g.dimension;
    let mut by_cell: BTreeMap<[i64; 2], Vec<usize>> = BTreeMap::new();
    for k in 0..mask_g.len() {
        by_cell.entry(unit_cell(mask_g.coord(k), d)).or_default().push(k);
    }
    let comps = mask_g.components();
    let mut comp_of = vec![0usize; mask_g.len()];
    for (c, members) in comps.iter().enumerate() {
        for &k in members {
            comp_of[k] = c;
        }
    }
    let sources: Vec<[i64; 2]> = if sources.is_empty() {
        vec![default_source(mask_g)]
    } else {
        sources.to_vec()
    };

    let n = mask_g.len();
    let mut blocks = Vec::new();
    for &l in &sources {
        let Some(src) = by_cell.get(&l) else {
            return Err(Error::Config(format!("source cell {l:?} has no nodes in G")));
        };
        let comp = comp_of[src[0]];
        for (&k, tgt) in &by_cell {
            if !tgt.iter().any(|&i| comp_of[i] == comp) {
                continue;
            }
            let mut x = vec![1.0 / (src.len() as f64).sqrt(); src.len()];
            let mut sigma = 0.0;
            for _ in 0..POWER_ITERATIONS {
                let mut full = vec![0.0; n];
                for (&i, &v) in src.iter().zip(&x) {
                    full[i] = v;
                }
                chol.solve_in_place(&mut full);
                let y: Vec<f64> = tgt.iter().map(|&i| full[i]).collect();
                sigma = norm(&y);
                if sigma == 0.0 {
                    break;
                }
                let mut back = vec![0.0; n];
                for (&i, &v) in tgt.iter().zip(&y) {
                    back[i] = v;
                }
                chol.solve_in_place(&mut back);
                let z: Vec<f64> = src.iter().map(|&i| back[i]).collect();
                let nz = norm(&z);
                if nz == 0.0 {
                    break;
                }
                x = z.into_iter().map(|v| v / nz).collect();
            }
            let distance = (((k[0] - l[0]).pow(2) + (k[1] - l[1]).pow(2)) as f64).sqrt();
            let envelope = (-params.alpha * distance).exp() / (params.s - params.r);
            blocks.push(BlockNorm {
                source: l,
                target: k,
                distance,
                norm: sigma,
                ratio: sigma / envelope,
            });
        }
    }
    let bound = 1.0 / (lambda1_g - lambda);
    let diagonal_bounded = blocks
        .iter()
        .filter(|b| b.source == b.target)
        .all(|b| b.norm <= bound * (1.0 + 1e-8));
    let peak = blocks.iter().map(|b| b.norm).fold(0.0, f64::max);
    let points: Vec<(f64, f64)> = blocks
        .iter()
        .filter(|b| b.source != b.target && b.norm > MASS_FLOOR * peak)
        .map(|b| (b.distance, b.norm.ln()))
        .collect();
    Ok(ResolventProfile {
        lambda,
        lambda1_g,
        alpha: params.alpha,
        fitted_rate: fit_slope(&points).map(|s| -s),
        blocks_in_fit: points.len(),
        diagonal_bounded,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_domain, rasterize};

    #[test]
    fn corridor_decay() {
        // Corridor of width 1.5: ground state about pi^2/2.25 > s = 1.5.
        let mask = rasterize(&parse_domain("dim=2; rect 0 0 12 1.5").unwrap(), 1.0 / 16.0).unwrap();
        let p = DecayParams::standard(2, 1.0, 2.0).unwrap();
        let prof = resolvent_block_norms(&mask, 1.0, &p, &[]).unwrap();
        assert!(prof.diagonal_bounded);
        assert!(prof.fitted_rate.unwrap() >= p.alpha);
        let at = |dist: f64| {
            prof.blocks
                .iter()
                .filter(|b| (b.distance - dist).abs() < 1e-12)
                .map(|b| b.norm)
                .fold(0.0, f64::max)
        };
        assert!(at(0.0) / at(3.0) >= (3.0 * p.alpha).exp());
    }

    #[test]
    fn precondition_on_the_ground_state_of_g() {
        let mask = rasterize(&parse_domain("dim=2; rect 0 0 4 4").unwrap(), 1.0 / 8.0).unwrap();
        let p = DecayParams::standard(2, 1.0, 2.0).unwrap();
        assert!(matches!(
            resolvent_block_norms(&mask, 1.0, &p, &[]),
            Err(Error::Precondition(_))
        ));
    }
}
