use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridMask;
use crate::output::{self, fmt_f64};
use crate::spectral::EigenData;

use super::spectral::{heat_content_spectral, heat_trace};
use super::timestep::{default_steps, heat_content_timestep};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatSeries {
    pub times: Vec<f64>,
    pub z: Vec<f64>,
    pub q_spectral: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_timestep: Option<Vec<f64>>,
    /// Number of eigenvalues in every spectral sum.
    pub truncation_k: usize,
    /// Tail estimate of `Z` at each time.
    pub trunc_bound: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub eig_sha256: String,
}

/// Validate a time grid: nonempty, positive, strictly increasing.
pub fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Config("time grid is empty".into()));
    }
    if times.iter().any(|t| !(*t > 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("time grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Heat trace and content on a time grid, optionally with the time-stepping oracle on `oracle`.
pub fn heat_series(eig: &EigenData, times: &[f64], oracle: Option<&GridMask>) -> Result<HeatSeries> {
    check_time_grid(times)?;
    let mut series = HeatSeries {
        times: times.to_vec(),
        z: Vec::with_capacity(times.len()),
        q_spectral: Vec::with_capacity(times.len()),
        q_timestep: None,
        truncation_k: eig.len(),
        trunc_bound: Vec::with_capacity(times.len()),
        warnings: Vec::new(),
        eig_sha256: output::sha256_hex(eig.to_json()?.as_bytes()),
    };
    for &t in times {
        let z = heat_trace(eig, t)?;
        let q = heat_content_spectral(eig, t)?;
        if z.warning() || q.warning() {
            series.warnings.push(format!("t={}: truncation above 1% of the partial sum", fmt_f64(t)));
        }
        series.z.push(z.value);
        series.q_spectral.push(q.value);
        series.trunc_bound.push(z.bound);
    }
    if let Some(mask) = oracle {
        series.q_timestep = Some(
            times
                .iter()
                .map(|&t| heat_content_timestep(mask, t, default_steps(t, mask.h)))
                .collect::<Result<_>>()?,
        );
    }
    Ok(series)
}

impl HeatSeries {
    /// CSV with columns `t, Z, Q_spectral, Q_timestep, trunc_bound`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "Z", "Q_spectral", "Q_timestep", "trunc_bound"])?;
        for i in 0..self.times.len() {
            let ts = self.q_timestep.as_ref().map_or(String::new(), |q| fmt_f64(q[i]));
            w.write_record([
                fmt_f64(self.times[i]),
                fmt_f64(self.z[i]),
                fmt_f64(self.q_spectral[i]),
                ts,
                fmt_f64(self.trunc_bound[i]),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(output::to_json_string(self)?)
    }
}
