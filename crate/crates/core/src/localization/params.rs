use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decay parameters of the localization argument, in units where `lambda_1 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub dimension: usize,
    pub r: f64,
    pub t: f64,
    pub m_d: f64,
    pub c0: f64,
    /// `(t - r) / 2`
    pub beta: f64,
    /// `min{beta, 1} / (16 m_d r)`
    pub alpha: f64,
    /// `(r + t) / 2`
    pub s: f64,
    /// `2^{d/2} c0 / sqrt(t - s)`
    pub n0: f64,
}

impl DecayParams {
    pub fn new(dimension: usize, r: f64, t: f64, m_d: f64, c0: f64) -> Result<Self> {
        if !(r >= 1.0 && t > r && t.is_finite()) {
            return Err(Error::Precondition(format!("need 1 <= r < t, got r = {r}, t = {t}")));
        }
        if !(m_d >= 1.0 && c0 > 0.0) {
            return Err(Error::Config(format!("invalid constants m_d = {m_d}, c0 = {c0}")));
        }
        let beta = 0.5 * (t - r);
        let s = 0.5 * (r + t);
        Ok(DecayParams {
            dimension,
            r,
            t,
            m_d,
            c0,
            beta,
            alpha: beta.min(1.0) / (16.0 * m_d * r),
            s,
            n0: 2f64.powf(dimension as f64 / 2.0) * c0 / (t - s).sqrt(),
        })
    }

    /// Parameters with the standard mollifier and partition constants of dimension `d`.
    pub fn standard(dimension: usize, r: f64, t: f64) -> Result<Self> {
        DecayParams::new(
            dimension,
            r,
            t,
            super::standard_m_d(dimension),
            super::ims_constant(dimension),
        )
    }

    /// Smallest integer scale `n >= n0`.
    pub fn n_min(&self) -> usize {
        self.n0.ceil().max(1.0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_window() {
        assert!(DecayParams::new(2, 0.5, 2.0, 1.0, 1.0).is_err());
        assert!(DecayParams::new(2, 2.0, 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn s_is_midpoint() {
        let p = DecayParams::new(1, 1.0, 3.0, 2.0, 1.0).unwrap();
        assert_eq!(p.beta, 1.0);
        assert_eq!(p.s, 2.0);
        assert_eq!(p.alpha, 1.0 / 32.0);
        assert!((p.n0 - 2f64.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn alpha_bounds(r in 1.0f64..50.0, gap in 1e-3f64..100.0, m in 1.0f64..100.0, d in 1usize..3) {
            let p = DecayParams::new(d, r, r + gap, m, 2.2).unwrap();
            prop_assert!(p.alpha > 0.0);
            prop_assert!(p.alpha <= 1.0 / (16.0 * m) * (1.0 + 1e-15));
            prop_assert!(p.n0 > 0.0);
        }
    }
}
