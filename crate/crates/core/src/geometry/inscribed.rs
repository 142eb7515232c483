use serde::{Deserialize, Serialize};

use super::domain::{DomainSpec, Point};
use super::grid::GridMask;

/// Largest lattice-aligned open cube found inside the domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InscribedCube {
    /// Lower corner.
    pub corner: Point,
    pub side: f64,
    /// `side^d`, the lower approximation of gamma.
    pub volume: f64,
}

/// Largest cube whose corners are lattice points and whose interior lies in the domain.
///
/// Works on the doubled lattice: even sites are nodes, odd/odd sites are cells,
/// mixed sites are edges. A site is accepted only when the corresponding open
/// piece provably lies in one primitive (or is an interior node), so the result
/// never overestimates.
pub fn largest_inscribed_cube(spec: &DomainSpec, mask: &GridMask) -> InscribedCube {
    let d = spec.dimension;
    let h = mask.h;
    let tol = 1e-12 * h;
    let (lo, hi) = mask.index_box();
    let base = [lo[0] - 1, if d == 1 { 0 } else { lo[1] - 1 }];
    let nodes_x = (hi[0] - lo[0] + 3) as usize;
    let nodes_y = if d == 1 { 1 } else { (hi[1] - lo[1] + 3) as usize };
    let point = |i: i64, j: i64| {
        [
            mask.origin[0] + h * i as f64,
            mask.origin[1] + h * j as f64,
        ]
    };

    // owner[c] = bitmask of primitives whose closure contains the closed cell c.
    let cells_x = nodes_x - 1;
    let cells_y = if d == 1 { 1 } else { nodes_y - 1 };
    let mut owner = vec![0u64; cells_x * cells_y];
    for (c, slot) in owner.iter_mut().enumerate() {
        let i = base[0] + (c % cells_x) as i64;
        let j = base[1] + (c / cells_x) as i64;
        let corners: Vec<Point> = if d == 1 {
            vec![point(i, 0), point(i + 1, 0)]
        } else {
            vec![point(i, j), point(i + 1, j), point(i, j + 1), point(i + 1, j + 1)]
        };
        for (p, piece) in spec.pieces.iter().enumerate().take(64) {
            if corners.iter().all(|&q| piece.contains_closed(q, tol)) {
                *slot |= 1 << p;
            }
        }
    }
    let cell = |ci: i64, cj: i64| -> u64 {
        if ci < 0 || cj < 0 || ci as usize >= cells_x || cj as usize >= cells_y {
            0
        } else {
            owner[cj as usize * cells_x + ci as usize]
        }
    };

    let sx = 2 * nodes_x - 1;
    let sy = if d == 1 { 1 } else { 2 * nodes_y - 1 };
    let valid = |p: usize, q: usize| -> bool {
        let (pi, qi) = (p as i64, q as i64);
        match (p % 2, q % 2, d) {
            (0, _, 1) => mask.index_of([base[0] + pi / 2, 0]).is_some(),
            (1, _, 1) => cell(pi / 2, 0) != 0,
            (0, 0, _) => mask.index_of([base[0] + pi / 2, base[1] + qi / 2]).is_some(),
            (1, 1, _) => cell(pi / 2, qi / 2) != 0,
            (1, 0, _) => cell(pi / 2, qi / 2 - 1) & cell(pi / 2, qi / 2) != 0,
            _ => cell(pi / 2 - 1, qi / 2) & cell(pi / 2, qi / 2) != 0,
        }
    };

    let mut best = (0usize, 0usize, 0usize);
    let mut prev = vec![0usize; sx];
    let mut row = vec![0usize; sx];
    for q in 0..sy {
        for p in 0..sx {
            row[p] = if !valid(p, q) {
                0
            } else if d == 1 {
                if p == 0 {
                    1
                } else {
                    row[p - 1] + 1
                }
            } else if p == 0 || q == 0 {
                1
            } else {
                1 + row[p - 1].min(prev[p]).min(prev[p - 1])
            };
            let odd_corner = p % 2 == 1 && (d == 1 || q % 2 == 1);
            if odd_corner && row[p] > 0 {
                let size = if row[p] % 2 == 1 { row[p] } else { row[p] - 1 };
                if size > best.0 {
                    best = (size, p, q);
                }
            }
        }
        std::mem::swap(&mut prev, &mut row);
    }

    let (size, p, q) = best;
    if size == 0 {
        return InscribedCube {
            corner: mask.coord(0),
            side: 0.0,
            volume: 0.0,
        };
    }
    let steps = size.div_ceil(2);
    let side = steps as f64 * h;
    let start_i = base[0] + ((p + 1 - size) / 2) as i64;
    let start_j = if d == 1 { 0 } else { base[1] + ((q + 1 - size) / 2) as i64 };
    InscribedCube {
        corner: point(start_i, start_j),
        side,
        volume: side.powi(d as i32),
    }
}

/// Longest interval of a 1D interval union, merging touching or overlapping pieces.
pub fn longest_interval(spec: &DomainSpec) -> Option<f64> {
    let mut iv: Vec<(f64, f64)> = spec
        .pieces
        .iter()
        .filter_map(|p| match *p {
            super::domain::Primitive::Interval { a, b } => Some((a, b)),
            _ => None,
        })
        .collect();
    if iv.is_empty() || spec.dimension != 1 {
        return None;
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best: f64 = 0.0;
    let mut cur = iv[0];
    for &(a, b) in &iv[1..] {
        if a < cur.1 {
            cur.1 = cur.1.max(b);
        } else {
            best = best.max(cur.1 - cur.0);
            cur = (a, b);
        }
    }
    Some(best.max(cur.1 - cur.0))
}
