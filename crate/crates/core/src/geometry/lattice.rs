use serde::{Deserialize, Serialize};

use super::domain::Point;

/// Open axis-aligned cube given by centre and half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub centre: Point,
    pub half: f64,
}

impl Cube {
    pub fn contains(&self, p: Point, dimension: usize) -> bool {
        (0..dimension).all(|k| (p[k] - self.centre[k]).abs() < self.half)
    }

    pub fn contains_closed(&self, p: Point, dimension: usize) -> bool {
        (0..dimension).all(|k| (p[k] - self.centre[k]).abs() <= self.half)
    }

    pub fn edge(&self) -> f64 {
        2.0 * self.half
    }
}

/// The cubes `Q_{n,j} = n(-1,1)^d + nj` and their enlargements by 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeLattice {
    pub dimension: usize,
    pub n: f64,
}

impl CubeLattice {
    pub fn new(dimension: usize, n: f64) -> Self {
        assert!(n > 0.0, "lattice scale must be positive");
        CubeLattice { dimension, n }
    }

    fn centre(&self, j: [i64; 2]) -> Point {
        let second = if self.dimension == 1 { 0.0 } else { self.n * j[1] as f64 };
        [self.n * j[0] as f64, second]
    }

    pub fn cube(&self, j: [i64; 2]) -> Cube {
        Cube {
            centre: self.centre(j),
            half: self.n,
        }
    }

    /// `Q̃_{n,j}`: same centre, edge `4n`.
    pub fn enlarged(&self, j: [i64; 2]) -> Cube {
        Cube {
            centre: self.centre(j),
            half: 2.0 * self.n,
        }
    }

    /// `Q̃̃_{n,j}`: same centre, edge `6n`.
    pub fn doubly_enlarged(&self, j: [i64; 2]) -> Cube {
        Cube {
            centre: self.centre(j),
            half: 3.0 * self.n,
        }
    }

    /// Indices `j` whose cube scaled by `factor` meets the closed box `[lo, hi]`.
    pub fn indices_meeting(&self, lo: Point, hi: Point, factor: f64) -> Vec<[i64; 2]> {
        let half = factor * self.n;
        let range = |a: f64, b: f64| {
            let first = ((a - half) / self.n).floor() as i64;
            let last = ((b + half) / self.n).ceil() as i64;
            (first..=last).filter(move |&j| {
                let c = self.n * j as f64;
                c + half > a && c - half < b
            })
        };
        let xs: Vec<i64> = range(lo[0], hi[0]).collect();
        if self.dimension == 1 {
            return xs.into_iter().map(|i| [i, 0]).collect();
        }
        let mut out = Vec::new();
        for j in range(lo[1], hi[1]) {
            for &i in &xs {
                out.push([i, j]);
            }
        }
        out
    }

    /// Indices of the cubes containing `p`.
    pub fn cubes_containing(&self, p: Point) -> Vec<[i64; 2]> {
        self.indices_meeting(p, p, 1.0)
            .into_iter()
            .filter(|&j| self.cube(j).contains(p, self.dimension))
            .collect()
    }
}
