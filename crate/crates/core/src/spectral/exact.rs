use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::eigdata::{EigenData, Norms, Source};

/// Mode `sqrt(2/l) sin(pi j (x - a) / l)` of one interval of an interval union.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactInterval1D {
    /// Index of the interval in left-to-right order.
    pub interval: usize,
    pub offset: f64,
    pub length: f64,
    pub j: u64,
}

impl ExactInterval1D {
    pub fn eigenvalue(&self) -> f64 {
        let j = self.j as f64;
        PI * PI * j * j / (self.length * self.length)
    }

    pub fn l1(&self) -> f64 {
        2.0 * (2.0 * self.length).sqrt() / PI
    }

    pub fn linf(&self) -> f64 {
        (2.0 / self.length).sqrt()
    }

    /// Signed integral `sqrt(2l)(1 - cos(pi j))/(pi j)`; exactly zero for even `j`.
    pub fn integral(&self) -> f64 {
        if self.j.is_multiple_of(2) {
            0.0
        } else {
            2.0 * (2.0 * self.length).sqrt() / (PI * self.j as f64)
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = (x - self.offset) / self.length;
        if s <= 0.0 || s >= 1.0 {
            0.0
        } else {
            self.linf() * (PI * self.j as f64 * s).sin()
        }
    }
}

/// All interval modes with eigenvalue at most `t_max`, sorted by eigenvalue.
pub fn exact_interval_spectrum(intervals: &[(f64, f64)], t_max: f64) -> Result<EigenData> {
    let mut iv = intervals.to_vec();
    if iv.is_empty() {
        return Err(Error::Config("no intervals given".into()));
    }
    for &(a, b) in &iv {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Validation {
                piece: format!("interval {a} {b}"),
                message: "empty interval".into(),
            });
        }
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    if iv.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(Error::Config("intervals must be disjoint".into()));
    }
    let cutoff = t_max * (1.0 + 1e-12);
    let mut modes = Vec::new();
    for (k, &(a, b)) in iv.iter().enumerate() {
        let length = b - a;
        let mut j = 1u64;
        loop {
            let m = ExactInterval1D {
                interval: k,
                offset: a,
                length,
                j,
            };
            if m.eigenvalue() > cutoff {
                break;
            }
            modes.push(m);
            j += 1;
        }
    }
    modes.sort_by(|x, y| {
        x.eigenvalue()
            .total_cmp(&y.eigenvalue())
            .then(x.interval.cmp(&y.interval))
    });
    Ok(EigenData {
        h: None,
        dimension: 1,
        source: Source::Exact1d,
        label: String::new(),
        eigenvalues: modes.iter().map(|m| m.eigenvalue()).collect(),
        norms: modes
            .iter()
            .map(|m| Norms {
                l1: m.l1(),
                l2: 1.0,
                linf: m.linf(),
            })
            .collect(),
        integrals: modes.iter().map(|m| m.integral()).collect(),
        components: modes.iter().map(|m| m.interval).collect(),
        complete_up_to: Some(t_max),
        volume: Some(iv.iter().map(|&(a, b)| b - a).sum()),
        residuals: Vec::new(),
        modes,
        functions: Vec::new(),
        mask: None,
    })
}

/// Eigenvalues `pi^2 sum (k_i/a_i)^2 <= t_max` of a box with the given sides, sorted.
/// The comparison allows a relative rounding slack of `1e-12`.
pub fn exact_box_eigenvalues(sides: &[f64], t_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let t_max = t_max * (1.0 + 1e-12);
    fn recurse(sides: &[f64], acc: f64, t_max: f64, out: &mut Vec<f64>) {
        let Some((&a, rest)) = sides.split_first() else {
            out.push(acc);
            return;
        };
        let mut k = 1.0f64;
        loop {
            let v = acc + PI * PI * k * k / (a * a);
            // Remaining axes contribute at least their ground level.
            let floor: f64 = rest.iter().map(|&b| PI * PI / (b * b)).sum();
            if v + floor > t_max {
                break;
            }
            recurse(rest, v, t_max, out);
            k += 1.0;
        }
    }
    recurse(sides, 0.0, t_max, &mut out);
    out.sort_by(f64::total_cmp);
    out
}

/// `N_t` of a box, counted by enumeration.
pub fn exact_box_count(sides: &[f64], t: f64) -> usize {
    exact_box_eigenvalues(sides, t).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_below_fifty() {
        let e = exact_interval_spectrum(&[(0.0, 1.0)], 50.0).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        assert_eq!(e.eigenvalues[0], PI * PI);
        assert_eq!(e.eigenvalues[1], 4.0 * PI * PI);
        assert!((e.norms[0].l1 - 0.900316).abs() < 1e-6);
    }

    #[test]
    fn threshold_on_an_eigenvalue_includes_it() {
        for j in 1..=40u32 {
            let t = (j * j) as f64 * PI * PI;
            assert_eq!(exact_interval_spectrum(&[(0.0, 1.0)], t).unwrap().len(), j as usize);
        }
    }

    #[test]
    fn lengths_one_and_two_below_eleven() {
        let e = exact_interval_spectrum(&[(0.0, 1.0), (2.0, 4.0)], 11.0).unwrap();
        let want = [PI * PI / 4.0, PI * PI, PI * PI];
        assert_eq!(e.eigenvalues.len(), 3);
        for (g, w) in e.eigenvalues.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
        assert_eq!(e.eigenvalues[1], e.eigenvalues[2]);
    }

    #[test]
    fn even_modes_have_zero_mean() {
        let e = exact_interval_spectrum(&[(0.0, 1.0)], 200.0).unwrap();
        for m in &e.modes {
            if m.j % 2 == 0 {
                assert_eq!(m.integral(), 0.0);
            }
        }
    }

    #[test]
    fn below_ground_state_is_empty() {
        let e = exact_interval_spectrum(&[(0.0, 1.0)], 5.0).unwrap();
        assert!(e.eigenvalues.is_empty());
        assert!(exact_interval_spectrum(&[(0.0, 1.0), (0.5, 2.0)], 5.0).is_err());
    }

    #[test]
    fn square_counts() {
        assert_eq!(exact_box_count(&[1.0, 1.0], 2.0 * PI * PI), 1);
        assert_eq!(exact_box_count(&[1.0, 1.0], 5.0 * PI * PI), 3);
        assert_eq!(exact_box_count(&[1.0, 1.0], 1.0), 0);
        // j^2 + k^2 <= 50 with j, k >= 1
        let brute = (1..8)
            .flat_map(|j| (1..8).map(move |k| j * j + k * k))
            .filter(|&s| s <= 50)
            .count();
        assert_eq!(exact_box_count(&[1.0, 1.0], 50.0 * PI * PI), brute);
    }
}
