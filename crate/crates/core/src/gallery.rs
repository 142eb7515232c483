//! Built-in example domains and the solved problem handed to the check runner.

use crate::error::{Error, Result};
use crate::geometry::{largest_inscribed_cube, longest_interval, presets, rasterize, DomainSpec, GridMask};
use crate::spectral::{exact_interval_spectrum, lowest_eigenpairs, EigenData, Request};

/// Mesh width used for localization checks on closed-form interval problems.
pub const EXACT_LOCALIZATION_H: f64 = 1.0 / 256.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Grid(f64),
}

impl Mode {
    pub fn h(&self) -> Option<f64> {
        match *self {
            Mode::Exact => None,
            Mode::Grid(h) => Some(h),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GalleryCase {
    pub name: &'static str,
    pub preset: &'static str,
    pub mode: Mode,
}

/// Domains checked by `verify --gallery`, at pinned mesh widths.
pub const GALLERY: [GalleryCase; 7] = [
    GalleryCase { name: "unit_interval", preset: "unit_interval", mode: Mode::Exact },
    GalleryCase { name: "interval_pair", preset: "interval_union(1, 1)", mode: Mode::Exact },
    GalleryCase { name: "interval_halving", preset: "interval_union(1, 0.5, 0.25)", mode: Mode::Exact },
    GalleryCase { name: "unit_square", preset: "unit_square", mode: Mode::Grid(1.0 / 32.0) },
    GalleryCase { name: "packed_cubes", preset: "packed_cubes(3)", mode: Mode::Grid(1.0 / 32.0) },
    GalleryCase { name: "disjoint_balls", preset: "disjoint_balls(2)", mode: Mode::Grid(1.0 / 32.0) },
    GalleryCase { name: "dumbbell", preset: "dumbbell(2, 0.2)", mode: Mode::Grid(1.0 / 32.0) },
];

/// A domain with its eigen data; the mask is present for grid solves.
#[derive(Clone, Debug)]
pub struct Solved {
    pub spec: Option<DomainSpec>,
    pub mode: Mode,
    pub mask: Option<GridMask>,
    pub eig: EigenData,
}

fn exact_eig(spec: &DomainSpec, request: Request) -> Result<EigenData> {
    let intervals = spec
        .disjoint_intervals()
        .ok_or_else(|| Error::Config("closed-form spectra need disjoint intervals in one dimension".into()))?;
    match request {
        Request::Threshold(t) => exact_interval_spectrum(&intervals, t),
        Request::Count(k) => {
            let shortest = intervals.iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
            let mut t = (std::f64::consts::PI / shortest).powi(2);
            loop {
                let eig = exact_interval_spectrum(&intervals, t)?;
                if eig.len() >= k {
                    return Ok(eig.truncated(k));
                }
                t *= 4.0;
            }
        }
    }
}

impl Solved {
    pub fn solve(spec: DomainSpec, mode: Mode, request: Request) -> Result<Solved> {
        let (mask, mut eig) = match mode {
            Mode::Exact => (None, exact_eig(&spec, request)?),
            Mode::Grid(h) => {
                let mask = rasterize(&spec, h)?;
                let eig = lowest_eigenpairs(&mask, request)?;
                (Some(mask), eig)
            }
        };
        eig.label = spec.label.clone();
        Ok(Solved { spec: Some(spec), mode, mask, eig })
    }

    /// Eigen data read from disk, without a domain.
    pub fn from_eig(eig: EigenData) -> Solved {
        let mode = eig.h.map_or(Mode::Exact, Mode::Grid);
        Solved { spec: None, mode, mask: eig.mask.clone(), eig }
    }

    pub fn gallery(case: &GalleryCase, request: Request) -> Result<Solved> {
        let mut s = Solved::solve(presets::preset(case.preset)?, case.mode, request)?;
        s.eig.label = case.name.into();
        Ok(s)
    }

    /// Re-solve until at least `min_count` pairs are known and the list is complete up to `level`.
    pub fn ensure(&mut self, level: f64, min_count: usize) -> Result<()> {
        let Some(spec) = self.spec.clone() else {
            return if self.eig.known_up_to() >= level && self.eig.len() >= min_count {
                Ok(())
            } else {
                Err(Error::Incomplete { requested: level, known_up_to: self.eig.known_up_to() })
            };
        };
        let label = self.eig.label.clone();
        for _ in 0..3 {
            if self.eig.len() >= min_count && self.eig.known_up_to() >= level {
                return Ok(());
            }
            let request = if self.eig.known_up_to() < level {
                Request::Threshold(level)
            } else {
                Request::Count(min_count)
            };
            self.eig = match self.mode {
                Mode::Exact => exact_eig(&spec, request)?,
                Mode::Grid(_) => lowest_eigenpairs(self.mask.as_ref().expect("grid solve has a mask"), request)?,
            };
            self.eig.label = label.clone();
        }
        Err(Error::Incomplete { requested: level, known_up_to: self.eig.known_up_to() })
    }

    pub fn lambda1(&self) -> Option<f64> {
        self.eig.eigenvalues.first().copied()
    }

    /// Lower approximation of the largest inscribed cube volume.
    pub fn gamma(&self) -> Option<f64> {
        let spec = self.spec.as_ref()?;
        match (&self.mask, spec.dimension) {
            (_, 1) => longest_interval(spec),
            (Some(mask), _) => Some(largest_inscribed_cube(spec, mask).volume),
            _ => None,
        }
    }

    /// Mask for the localization checks: the solve mask, or a rasterization of an interval union.
    pub fn localization_mask(&self) -> Result<Option<GridMask>> {
        match (&self.mask, &self.spec) {
            (Some(m), _) => Ok(Some(m.clone())),
            (None, Some(spec)) => Ok(Some(rasterize(spec, EXACT_LOCALIZATION_H)?)),
            _ => Ok(None),
        }
    }

    /// Mesh width of the localization mask.
    pub fn localization_h(&self) -> f64 {
        self.mode.h().unwrap_or(EXACT_LOCALIZATION_H)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_count_request() {
        let s = Solved::solve(presets::unit_interval(), Mode::Exact, Request::Count(20)).unwrap();
        assert!(s.eig.len() >= 20);
        assert!((s.eig.eigenvalues[19] - 400.0 * PI * PI).abs() < 1e-9);
        assert_eq!(s.gamma(), Some(1.0));
    }

    #[test]
    fn ensure_extends_a_grid_solve() {
        let mut s = Solved::solve(presets::unit_square(), Mode::Grid(1.0 / 16.0), Request::Count(2)).unwrap();
        s.ensure(6.0 * PI * PI, 5).unwrap();
        assert!(s.eig.len() >= 5 && s.eig.known_up_to() >= 6.0 * PI * PI);
        assert!(s.gamma().unwrap() > 0.8);
    }

    #[test]
    fn gallery_presets_parse() {
        for case in GALLERY {
            assert!(presets::preset(case.preset).is_ok(), "{}", case.name);
        }
    }
}
