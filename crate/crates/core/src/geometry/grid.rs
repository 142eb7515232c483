use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::domain::{DomainSpec, Point};

/// Largest lattice box (in nodes) a rasterization may scan.
pub const MAX_SCAN_NODES: usize = 60_000_000;

/// Interior lattice nodes of a domain at mesh width `h`.
///
/// Node `k` sits at `origin + h * nodes[k]`. Nodes are sorted by `(index[1], index[0])`.
/// In 1D the second index is always 0.
#[derive(Clone, Debug)]
pub struct GridMask {
    pub dimension: usize,
    pub h: f64,
    pub origin: Point,
    nodes: Vec<[i64; 2]>,
    lo: [i64; 2],
    shape: [usize; 2],
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl GridMask {
    /// Build from an arbitrary node list; duplicates are removed.
    pub fn from_nodes(dimension: usize, h: f64, origin: Point, mut nodes: Vec<[i64; 2]>) -> Self {
        assert!(h > 0.0, "mesh width must be positive");
        assert!(!nodes.is_empty(), "a mask needs at least one node");
        assert!(nodes.len() < ABSENT as usize);
        nodes.sort_by_key(|n| (n[1], n[0]));
        nodes.dedup();
        let mut lo = [i64::MAX; 2];
        let mut hi = [i64::MIN; 2];
        for n in &nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(n[k]);
                hi[k] = hi[k].max(n[k]);
            }
        }
        let shape = [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize];
        let mut lookup = vec![ABSENT; shape[0] * shape[1]];
        for (k, n) in nodes.iter().enumerate() {
            let at = (n[1] - lo[1]) as usize * shape[0] + (n[0] - lo[0]) as usize;
            lookup[at] = k as u32;
        }
        GridMask {
            dimension,
            h,
            origin,
            nodes,
            lo,
            shape,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[i64; 2]] {
        &self.nodes
    }

    pub fn coord(&self, k: usize) -> Point {
        let n = self.nodes[k];
        [
            self.origin[0] + self.h * n[0] as f64,
            self.origin[1] + self.h * n[1] as f64,
        ]
    }

    pub fn index_of(&self, n: [i64; 2]) -> Option<usize> {
        let (dx, dy) = (n[0] - self.lo[0], n[1] - self.lo[1]);
        if dx < 0 || dy < 0 || dx as usize >= self.shape[0] || dy as usize >= self.shape[1] {
            return None;
        }
        match self.lookup[dy as usize * self.shape[0] + dx as usize] {
            ABSENT => None,
            k => Some(k as usize),
        }
    }

    /// Lattice neighbours of node `k` that are also interior.
    pub fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.nodes[k];
        let steps: &[[i64; 2]] = if self.dimension == 1 {
            &[[-1, 0], [1, 0]]
        } else {
            &[[-1, 0], [1, 0], [0, -1], [0, 1]]
        };
        steps
            .iter()
            .filter_map(move |s| self.index_of([n[0] + s[0], n[1] + s[1]]))
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dimension as i32)
    }

    /// Index bounds `(lo, hi)` of the nodes, inclusive.
    pub fn index_box(&self) -> ([i64; 2], [i64; 2]) {
        (
            self.lo,
            [
                self.lo[0] + self.shape[0] as i64 - 1,
                self.lo[1] + self.shape[1] as i64 - 1,
            ],
        )
    }

    /// Physical bounding box of the nodes.
    pub fn bounding_box(&self) -> (Point, Point) {
        let (lo, hi) = self.index_box();
        (
            [
                self.origin[0] + self.h * lo[0] as f64,
                self.origin[1] + self.h * lo[1] as f64,
            ],
            [
                self.origin[0] + self.h * hi[0] as f64,
                self.origin[1] + self.h * hi[1] as f64,
            ],
        )
    }

    /// Nodes for which `keep` holds, with their indices in `self`.
    pub fn subset(&self, mut keep: impl FnMut(usize) -> bool) -> Option<(GridMask, Vec<usize>)> {
        let parent: Vec<usize> = (0..self.len()).filter(|&k| keep(k)).collect();
        if parent.is_empty() {
            return None;
        }
        let nodes = parent.iter().map(|&k| self.nodes[k]).collect();
        let sub = GridMask::from_nodes(self.dimension, self.h, self.origin, nodes);
        // Sorting is preserved by from_nodes, so positions line up with `parent`.
        Some((sub, parent))
    }

    /// The same lattice dilated by `c`: nodes move to `c * x`, `h` becomes `c * h`.
    pub fn scaled(&self, c: f64) -> GridMask {
        let mut out = self.clone();
        out.h *= c;
        out.origin = [self.origin[0] * c, self.origin[1] * c];
        out
    }

    /// Connected components under lattice adjacency, each sorted, ordered by first node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            label[start] = id;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                for nb in self.neighbours(k) {
                    if label[nb] == usize::MAX {
                        label[nb] = id;
                        members.push(nb);
                        queue.push_back(nb);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

fn index_range(lo: f64, hi: f64, origin: f64, h: f64) -> (i64, i64) {
    (((lo - origin) / h).floor() as i64, ((hi - origin) / h).ceil() as i64)
}

/// Interior nodes of `spec` on the lattice `h * Z^d`.
pub fn rasterize(spec: &DomainSpec, h: f64) -> Result<GridMask> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("mesh width must be positive, got {h}")));
    }
    let origin = [0.0, 0.0];
    let tol = 1e-12 * h;
    let (blo, bhi) = spec.bounding_box();
    let (x0, x1) = index_range(blo[0], bhi[0], origin[0], h);
    let (y0, y1) = if spec.dimension == 1 {
        (0, 0)
    } else {
        index_range(blo[1], bhi[1], origin[1], h)
    };
    let (nx, ny) = ((x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize);
    if nx.saturating_mul(ny) > MAX_SCAN_NODES {
        return Err(Error::Resource {
            n_dof: nx.saturating_mul(ny),
            cap: MAX_SCAN_NODES,
        });
    }

    let mut inside = vec![false; nx * ny];
    for piece in &spec.pieces {
        let width = piece.min_width();
        let (plo, phi) = piece.bounding_box();
        let (i0, i1) = index_range(plo[0], phi[0], origin[0], h);
        let (j0, j1) = if spec.dimension == 1 {
            (0, 0)
        } else {
            index_range(plo[1], phi[1], origin[1], h)
        };
        let mut hits = 0usize;
        for j in j0.max(y0)..=j1.min(y1) {
            for i in i0.max(x0)..=i1.min(x1) {
                let p = [origin[0] + h * i as f64, origin[1] + h * j as f64];
                if piece.contains(p, tol) {
                    inside[(j - y0) as usize * nx + (i - x0) as usize] = true;
                    hits += 1;
                }
            }
        }
        if hits == 0 || width <= h {
            return Err(Error::UnresolvedFeature {
                piece: piece.to_statement(),
                width,
                h,
                required_h: width,
            });
        }
    }

    let nodes: Vec<[i64; 2]> = (0..nx * ny)
        .filter(|&k| inside[k])
        .map(|k| [x0 + (k % nx) as i64, y0 + (k / nx) as i64])
        .collect();
    Ok(GridMask::from_nodes(spec.dimension, h, origin, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_domain, presets};

    #[test]
    fn unit_square_quarter_spacing() {
        let mask = rasterize(&presets::unit_square(), 0.25).unwrap();
        assert_eq!(mask.len(), 9);
        assert_eq!(mask.coord(0), [0.25, 0.25]);
        assert_eq!(mask.neighbours(4).count(), 4);
        assert_eq!(mask.neighbours(0).count(), 2);
    }

    #[test]
    fn unit_interval_half_spacing() {
        let mask = rasterize(&presets::unit_interval(), 0.5).unwrap();
        assert_eq!(mask.len(), 1);
        assert_eq!(mask.coord(0)[0], 0.5);
    }

    #[test]
    fn thin_passage_is_unresolved() {
        let spec = presets::dumbbell(2, 0.01).unwrap();
        match rasterize(&spec, 0.05).unwrap_err() {
            Error::UnresolvedFeature {
                piece, required_h, ..
            } => {
                assert!(piece.starts_with("rect"));
                assert!((required_h - 0.01).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn boundary_nodes_are_excluded() {
        let spec = parse_domain("dim=1; interval 0 1; interval 1 2").unwrap();
        let mask = rasterize(&spec, 0.25).unwrap();
        assert_eq!(mask.len(), 6);
        assert_eq!(mask.components().len(), 2);
    }

    #[test]
    fn dumbbell_is_connected_and_balls_are_not() {
        let mask = rasterize(&presets::dumbbell(2, 0.2).unwrap(), 1.0 / 16.0).unwrap();
        assert_eq!(mask.components().len(), 1);
        let mask = rasterize(&presets::disjoint_balls(3).unwrap(), 1.0 / 16.0).unwrap();
        let comps = mask.components();
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == comps[0].len()));
    }

    #[test]
    fn subset_keeps_parent_order() {
        let mask = rasterize(&presets::unit_square(), 0.125).unwrap();
        let (sub, parent) = mask.subset(|k| mask.coord(k)[0] < 0.5).unwrap();
        for (k, &p) in parent.iter().enumerate() {
            assert_eq!(sub.nodes()[k], mask.nodes()[p]);
        }
    }
}
