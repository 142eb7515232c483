use std::f64::consts::{E, PI};

use crate::bounds::BoundReport;
use crate::error::Result;
use crate::spectral::{counting_function, EigenData};

use super::spectral::{heat_content_spectral, heat_trace};

/// `max{(6d^2/e)^d, ((8d-6)/e)^{4d-3}}`
pub fn e510_factor(d: usize) -> f64 {
    let d = d as f64;
    (6.0 * d * d / E).powf(d).max(((8.0 * d - 6.0) / E).powf(4.0 * d - 3.0))
}

fn slack(eig: &EigenData) -> f64 {
    1.0 + 50.0 * eig.h.unwrap_or(0.0)
}

/// `Z(t) <= (2 pi t)^{-d/2} Q(t/2)`; the tail estimate is added to `Z`.
pub fn check_e59(eig: &EigenData, t: f64) -> Result<BoundReport> {
    let d = eig.dimension as f64;
    let z = heat_trace(eig, t)?;
    let q = heat_content_spectral(eig, 0.5 * t)?;
    let rhs = (2.0 * PI * t).powf(-d / 2.0) * q.value;
    let mut r = BoundReport::explicit("e59", z.value + z.bound, rhs, slack(eig))
        .with_case(format!("t={t}"))
        .with_input("t", t)
        .with_input("d", d)
        .with_input("Z", z.value)
        .with_input("Z_tail", z.bound)
        .with_input("Q_half", q.value)
        .with_input("h", eig.h.unwrap_or(0.0));
    if z.warning() || q.warning() {
        r = r.with_note("spectral truncation above 1% of the partial sum");
    }
    Ok(r)
}

/// `Q(t) / (c (lambda_1^{-3d/2} t^{-d} Z(t/6)^3 + lambda_1^{(6-9d)/2} t^{3-4d} Z(t/2)))` with
/// the unknown constant set to one.
pub fn check_e510_ratio(eig: &EigenData, t: f64) -> Result<BoundReport> {
    let d = eig.dimension as f64;
    let l1 = eig.eigenvalues.first().copied().unwrap_or(f64::NAN);
    let q = heat_content_spectral(eig, t)?;
    let z6 = heat_trace(eig, t / 6.0)?;
    let z2 = heat_trace(eig, t / 2.0)?;
    let c = e510_factor(eig.dimension);
    let rhs = c
        * (l1.powf(-1.5 * d) * t.powf(-d) * z6.value.powi(3)
            + l1.powf((6.0 - 9.0 * d) / 2.0) * t.powf(3.0 - 4.0 * d) * z2.value);
    let mut r = BoundReport::ratio_only("e510", q.value, rhs)
        .with_case(format!("t={t}"))
        .with_input("t", t)
        .with_input("d", d)
        .with_input("lambda1", l1)
        .with_input("factor", c)
        .with_input("Z_sixth", z6.value)
        .with_input("Z_half", z2.value);
    if q.warning() || z6.warning() || z2.warning() {
        r = r.with_note("spectral truncation above 1% of the partial sum");
    }
    Ok(r)
}

/// `N_{2 lambda_k} <= Z(T) e^{2 T lambda_k}` for the `k`-th eigenvalue (1-based).
pub fn check_lemma52(eig: &EigenData, k: usize, big_t: f64) -> Result<BoundReport> {
    let Some(&lk) = eig.eigenvalues.get(k.wrapping_sub(1)) else {
        return Ok(BoundReport::precondition("lemma52", &format!("eigenvalue {k} not available")));
    };
    let n = counting_function(eig, 2.0 * lk)?;
    let z = heat_trace(eig, big_t)?;
    Ok(BoundReport::explicit("lemma52", n as f64, z.value * (2.0 * big_t * lk).exp(), 1.0)
        .with_case(format!("k={k},T={big_t}"))
        .with_input("k", k as f64)
        .with_input("T", big_t)
        .with_input("lambda_k", lk)
        .with_input("N_2lambda_k", n as f64)
        .with_input("Z", z.value))
}
