use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridMask;
use crate::output;

use super::exact::ExactInterval1D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Grid,
    Exact1d,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Relative slack used when comparing a threshold against computed eigenvalues.
pub const COUNT_TOL: f64 = 1e-10;

/// Ordered eigenvalues with normalized eigenfunctions and their norms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenData {
    /// Mesh width; `None` for closed-form spectra.
    pub h: Option<f64>,
    #[serde(default = "one")]
    pub dimension: usize,
    pub source: Source,
    #[serde(default)]
    pub label: String,
    pub eigenvalues: Vec<f64>,
    pub norms: Vec<Norms>,
    /// Signed integrals of the eigenfunctions.
    #[serde(default)]
    pub integrals: Vec<f64>,
    /// Connected component (interval index in exact mode) carrying each eigenfunction.
    #[serde(default)]
    pub components: Vec<usize>,
    /// Every eigenvalue at or below this value is present.
    #[serde(default)]
    pub complete_up_to: Option<f64>,
    /// Measure of the domain (node count times `h^d` on a grid).
    #[serde(default)]
    pub volume: Option<f64>,
    /// Relative residuals `||A x - lambda x|| / lambda` of grid pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ExactInterval1D>,
    /// Grid eigenfunctions in mask order, `h^d`-normalized.
    #[serde(skip)]
    pub functions: Vec<Vec<f64>>,
    #[serde(skip)]
    pub mask: Option<GridMask>,
}

fn one() -> usize {
    1
}

impl EigenData {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest value up to which the eigenvalue list is known to be complete.
    pub fn known_up_to(&self) -> f64 {
        match (self.complete_up_to, self.eigenvalues.last()) {
            (Some(t), Some(&last)) => t.max(last),
            (Some(t), None) => t,
            (None, Some(&last)) => last,
            (None, None) => 0.0,
        }
    }

    /// Restrict to the first `k` pairs.
    pub fn truncated(&self, k: usize) -> EigenData {
        let k = k.min(self.len());
        let cut = |v: &Vec<f64>| v.iter().take(k).copied().collect::<Vec<_>>();
        EigenData {
            h: self.h,
            dimension: self.dimension,
            source: self.source,
            label: self.label.clone(),
            eigenvalues: cut(&self.eigenvalues),
            norms: self.norms.iter().take(k).copied().collect(),
            integrals: cut(&self.integrals),
            components: self.components.iter().take(k).copied().collect(),
            complete_up_to: None,
            volume: self.volume,
            residuals: cut(&self.residuals),
            modes: self.modes.iter().take(k).copied().collect(),
            functions: self.functions.iter().take(k).cloned().collect(),
            mask: self.mask.clone(),
        }
    }

    /// Spectral data of the dilated domain `c * Omega` with `L^2`-normalized functions.
    pub fn scaled(&self, c: f64) -> EigenData {
        let d = self.dimension as f64;
        let up = c.powf(d / 2.0);
        let c2 = c * c;
        EigenData {
            h: self.h.map(|h| h * c),
            dimension: self.dimension,
            source: self.source,
            label: self.label.clone(),
            eigenvalues: self.eigenvalues.iter().map(|l| l / c2).collect(),
            norms: self
                .norms
                .iter()
                .map(|n| Norms {
                    l1: n.l1 * up,
                    l2: n.l2,
                    linf: n.linf / up,
                })
                .collect(),
            integrals: self.integrals.iter().map(|v| v * up).collect(),
            components: self.components.clone(),
            complete_up_to: self.complete_up_to.map(|t| t / c2),
            volume: self.volume.map(|v| v * c.powf(d)),
            residuals: self.residuals.clone(),
            modes: self
                .modes
                .iter()
                .map(|m| ExactInterval1D {
                    offset: m.offset * c,
                    length: m.length * c,
                    ..*m
                })
                .collect(),
            functions: self.functions.iter().map(|f| f.iter().map(|v| v / up).collect()).collect(),
            mask: self.mask.as_ref().map(|m| m.scaled(c)),
        }
    }

    /// Value of eigenfunction `k` at mask node `node` (grid) or coordinate `x` (exact).
    pub fn value_at_node(&self, k: usize, node: usize) -> Option<f64> {
        if let Some(f) = self.functions.get(k) {
            return f.get(node).copied();
        }
        let mask = self.mask.as_ref()?;
        let mode = self.modes.get(k)?;
        Some(mode.value(mask.coord(node)[0]))
    }

    pub fn check_invariants(&self) -> Result<()> {
        let n = self.len();
        if self.norms.len() != n {
            return Err(Error::Config(format!(
                "eigen data has {n} eigenvalues but {} norm records",
                self.norms.len()
            )));
        }
        if self.eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("eigenvalues are not nondecreasing".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(output::to_json_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<EigenData> {
        let data: EigenData = serde_json::from_str(text)?;
        data.check_invariants()?;
        Ok(data)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<EigenData> {
        EigenData::from_json(&fs::read_to_string(path)?)
    }

    /// Flat little-endian f64 dump of the grid eigenfunctions (function after function,
    /// mask order inside each) plus a JSON index describing the layout and the nodes.
    pub fn write_functions(&self, bin: &Path, index: &Path) -> Result<()> {
        let mask = self
            .mask
            .as_ref()
            .ok_or_else(|| Error::Config("no grid eigenfunctions to write".into()))?;
        let mut file = std::io::BufWriter::new(fs::File::create(bin)?);
        for f in &self.functions {
            for v in f {
                file.write_all(&v.to_le_bytes())?;
            }
        }
        file.flush()?;
        let sidecar = FunctionIndex {
            dtype: "f64le".into(),
            layout: "function-major".into(),
            n_functions: self.functions.len(),
            n_nodes: mask.len(),
            dimension: mask.dimension,
            h: mask.h,
            origin: mask.origin,
            eigenvalues: self.eigenvalues.clone(),
            nodes: mask.nodes().to_vec(),
        };
        fs::write(index, output::to_json_string(&sidecar)?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionIndex {
    dtype: String,
    layout: String,
    n_functions: usize,
    n_nodes: usize,
    dimension: usize,
    h: f64,
    origin: [f64; 2],
    eigenvalues: Vec<f64>,
    nodes: Vec<[i64; 2]>,
}

/// `(h^d sum |f|, (h^d sum f^2)^(1/2), max |f|)`.
pub fn grid_norms(f: &[f64], h: f64, dimension: usize) -> Norms {
    let w = h.powi(dimension as i32);
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for &v in f {
        l1 += v.abs();
        l2 += v * v;
        linf = linf.max(v.abs());
    }
    Norms {
        l1: w * l1,
        l2: (w * l2).sqrt(),
        linf,
    }
}

/// `N_t`: number of eigenvalues at or below `t`, with multiplicity.
pub fn counting_function(eig: &EigenData, t: f64) -> Result<usize> {
    let top = t * (1.0 + COUNT_TOL);
    let known = eig.known_up_to();
    if t > known * (1.0 + COUNT_TOL) {
        return Err(Error::Incomplete {
            requested: t,
            known_up_to: known,
        });
    }
    Ok(eig.eigenvalues.iter().filter(|&&l| l <= top).count())
}
