use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::EigenData;

/// Share of the partial sum above which a truncation bound is reported as a warning.
pub const TRUNCATION_WARNING: f64 = 0.01;

/// Partial spectral sum and an estimate of the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated {
    pub value: f64,
    pub bound: f64,
    /// Number of eigenvalues summed.
    pub terms: usize,
}

impl Truncated {
    pub fn warning(&self) -> bool {
        self.bound > TRUNCATION_WARNING * self.value.abs()
    }
}

/// `max_x e^{-t x} x^a = (a/e)^a t^{-a}`.
pub fn polynomial_exponential_bound(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        (a / std::f64::consts::E).powf(a) * t.powf(-a)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("time must be positive, got {t}")))
    }
}

/// Tail estimate for `sum_{k > K} e^{-t lambda_k}`.
///
/// Counting eigenvalues against the partial trace at `T = t/2` gives
/// `lambda_k >= max{L, log(k / Z(T)) / T}` where `L` is the level up to which the list is
/// complete; summing `e^{-t lambda_k}` over that lower bound yields
/// `max(0, k* - K - 1) e^{-tL} + Z(T)^2 / (max(k*, K+1) - 1)` with `k* = Z(T) e^{TL}`.
pub fn trace_tail(eig: &EigenData, t: f64) -> f64 {
    let k = eig.len() as f64;
    let level = eig.known_up_to();
    let z_half: f64 = eig.eigenvalues.iter().map(|l| (-0.5 * t * l).exp()).sum();
    if z_half == 0.0 {
        return (-0.5 * t * level).exp();
    }
    // 1/k* without overflow
    let inv_kstar = (-0.5 * t * level).exp() / z_half;
    let e_full = (-t * level).exp();
    if inv_kstar * (k + 1.0) <= 1.0 {
        let count = z_half * (-0.5 * t * level).exp() - (k + 1.0) * e_full;
        let geometric = z_half * (-0.5 * t * level).exp() / (1.0 - inv_kstar).max(f64::MIN_POSITIVE);
        count.max(0.0) + geometric
    } else {
        z_half * z_half / k.max(1.0)
    }
}

/// `Z(t) = sum_k e^{-t lambda_k}`.
pub fn heat_trace(eig: &EigenData, t: f64) -> Result<Truncated> {
    check_time(t)?;
    Ok(Truncated {
        value: eig.eigenvalues.iter().map(|l| (-t * l).exp()).sum(),
        bound: trace_tail(eig, t),
        terms: eig.len(),
    })
}

/// `Q(t) = sum_k e^{-t lambda_k} (int Phi_k)^2`; the tail uses `(int Phi)^2 <= |Omega|`.
pub fn heat_content_spectral(eig: &EigenData, t: f64) -> Result<Truncated> {
    check_time(t)?;
    if eig.integrals.len() != eig.len() {
        return Err(Error::Config("eigenfunction integrals are missing".into()));
    }
    let value = eig
        .eigenvalues
        .iter()
        .zip(&eig.integrals)
        .map(|(l, i)| (-t * l).exp() * i * i)
        .sum();
    let volume = eig.volume.unwrap_or(f64::INFINITY);
    Ok(Truncated {
        value,
        bound: volume * trace_tail(eig, t),
        terms: eig.len(),
    })
}

/// Kernel tail: `Phi_k(x)^2 <= (e/2 pi d)^{d/2} lambda_k^{d/2}` and the polynomial-exponential
/// bound at `t/2` give `(2 pi t)^{-d/2}` times the trace tail at `t/2`.
fn kernel_tail(eig: &EigenData, t: f64) -> f64 {
    (2.0 * PI * t).powf(-(eig.dimension as f64) / 2.0) * trace_tail(eig, 0.5 * t)
}

/// `p(x, y; t) = sum_k e^{-t lambda_k} Phi_k(x) Phi_k(y)` at mask nodes.
pub fn heat_kernel_value(eig: &EigenData, x: usize, y: usize, t: f64) -> Result<Truncated> {
    check_time(t)?;
    let mut value = 0.0;
    for k in 0..eig.len() {
        let (Some(a), Some(b)) = (eig.value_at_node(k, x), eig.value_at_node(k, y)) else {
            return Err(Error::Config(format!("no eigenfunction values at nodes {x}, {y}")));
        };
        value += (-t * eig.eigenvalues[k]).exp() * a * b;
    }
    Ok(Truncated {
        value,
        bound: kernel_tail(eig, t),
        terms: eig.len(),
    })
}

/// `p(x, y; t)` at coordinates of a closed-form interval spectrum.
pub fn heat_kernel_value_1d(eig: &EigenData, x: f64, y: f64, t: f64) -> Result<Truncated> {
    check_time(t)?;
    if eig.modes.len() != eig.len() {
        return Err(Error::Config("closed-form modes are missing".into()));
    }
    let value = eig
        .modes
        .iter()
        .map(|m| (-t * m.eigenvalue()).exp() * m.value(x) * m.value(y))
        .sum();
    Ok(Truncated {
        value,
        bound: kernel_tail(eig, t),
        terms: eig.len(),
    })
}
