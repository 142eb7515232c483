use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::localization::DecayParams;
use crate::spectral::{counting_function, EigenData, Norms, Source, COUNT_TOL};

use super::report::BoundReport;

pub const REMARK213_SEED: u64 = 0x213;
pub const REMARK213_SAMPLES: usize = 100;

const LOG_FLOOR_NOTE: &str = "log N replaced by max{log N, 1}";

/// Slack on the favourable side: `1 + 50 h` on grids, rounding only for closed forms.
pub fn discretization_slack(eig: &EigenData) -> f64 {
    match eig.h {
        Some(h) if eig.source == Source::Grid => 1.0 + 50.0 * h,
        _ => 1.0 + 1e-12,
    }
}

fn log_floor(n: usize) -> f64 {
    (n as f64).ln().max(1.0)
}

/// Upper bound on `||Phi||_inf`, lower bound on `||Phi||_1`, and the bridge
/// `||Phi||_2^2 <= ||Phi||_inf ||Phi||_1`, for every eigenfunction.
pub fn check_thm212(eig: &EigenData) -> Vec<BoundReport> {
    let d = eig.dimension as f64;
    let slack = discretization_slack(eig);
    let mut out = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let case = format!("k={}", k + 1);
        let Some(n) = eig.norms.get(k) else {
            out.push(BoundReport::precondition("thm212", "norms missing").with_case(case));
            continue;
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            out.push(
                BoundReport::precondition("thm212", &format!("eigenvalue {lambda} is not positive"))
                    .with_case(case)
                    .with_input("lambda", if lambda.is_finite() { lambda } else { -1.0 }),
            );
            continue;
        }
        let Norms { l1, l2, linf } = *n;
        let upper = (E / (2.0 * PI * d)).powf(d / 4.0) * lambda.powf(d / 4.0) * l2;
        let lower = (2.0 * PI * d / E).powf(d / 4.0) * lambda.powf(-d / 4.0) * l2;
        let tag = |r: BoundReport| {
            r.with_case(case.clone())
                .with_input("lambda", lambda)
                .with_input("d", d)
                .with_input("h", eig.h.unwrap_or(0.0))
        };
        out.push(tag(BoundReport::explicit("thm212_upper", linf, upper, slack)));
        // Lower bound stored as bound <= ||Phi||_1.
        out.push(tag(BoundReport::explicit("thm212_lower", lower, l1, slack)));
        out.push(tag(BoundReport::explicit("thm212_bridge", l2 * l2, linf * l1, slack)));
    }
    out
}

/// `(2 pi)^{-d} d^{-d/2} gamma t^{d/2} <= N_t` from a count.
pub fn check_e4_count(n_t: usize, lambda1: f64, gamma: f64, d: usize, t: f64, slack: f64) -> BoundReport {
    if t < lambda1 * (1.0 - COUNT_TOL) {
        return BoundReport::precondition("e4", &format!("t = {t} is below lambda_1 = {lambda1}"))
            .with_input("t", t)
            .with_input("lambda1", lambda1);
    }
    let df = d as f64;
    let bound = (2.0 * PI).powf(-df) * df.powf(-df / 2.0) * gamma * t.powf(df / 2.0);
    BoundReport::explicit("e4", bound, n_t as f64, slack)
        .with_case(format!("t={t}"))
        .with_input("t", t)
        .with_input("gamma", gamma)
        .with_input("d", df)
        .with_input("N_t", n_t as f64)
        .with_input("lambda1", lambda1)
}

/// Counting lower bound with `N_t` taken from the eigen data.
pub fn check_e4(eig: &EigenData, gamma: f64, t: f64) -> Result<BoundReport> {
    let Some(&l1) = eig.eigenvalues.first() else {
        return Ok(BoundReport::precondition("e4", "no eigenvalues"));
    };
    if t < l1 * (1.0 - COUNT_TOL) {
        return Ok(check_e4_count(0, l1, gamma, eig.dimension, t, 1.0));
    }
    let n = counting_function(eig, t)?;
    Ok(check_e4_count(n, l1, gamma, eig.dimension, t, discretization_slack(eig)).with_input("h", eig.h.unwrap_or(0.0)))
}

/// `||Phi||_1^2 <= (8/pi) lambda^{-1/2} N_lambda ||Phi||_2^2` for combinations of the
/// degenerate interval modes of each eigenvalue: the Schwarz-extremal weights and
/// 100 random unit coefficient vectors.
pub fn check_remark213(eig: &EigenData) -> Result<Vec<BoundReport>> {
    if eig.source != Source::Exact1d || eig.modes.len() != eig.len() {
        return Ok(vec![BoundReport::precondition("remark213", "needs a closed-form interval spectrum")]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(REMARK213_SEED);
    let slack = 1.0 + 1e-12;
    let mut out = Vec::new();
    let mut start = 0;
    while start < eig.len() {
        let lambda = eig.eigenvalues[start];
        let mut end = start + 1;
        while end < eig.len() && eig.eigenvalues[end] <= lambda * (1.0 + COUNT_TOL) {
            end += 1;
        }
        let l1: Vec<f64> = eig.modes[start..end].iter().map(|m| m.l1()).collect();
        let n = counting_function(eig, lambda)?;
        let rhs = 8.0 / PI * lambda.powf(-0.5) * n as f64;
        let case = format!("lambda={lambda}");
        // Disjoint supports: ||sum c_i phi_i||_1 = sum |c_i| ||phi_i||_1.
        let extremal = l1.iter().map(|v| v * v).sum::<f64>();
        out.push(
            BoundReport::explicit("remark213", extremal, rhs, slack)
                .with_case(format!("{case},extremal"))
                .with_input("lambda", lambda)
                .with_input("N_lambda", n as f64)
                .with_input("multiplicity", l1.len() as f64),
        );
        let mut worst: f64 = 0.0;
        for _ in 0..REMARK213_SAMPLES {
            let c: Vec<f64> = (0..l1.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let one: f64 = c.iter().zip(&l1).map(|(a, b)| a.abs() / norm * b).sum();
            worst = worst.max(one * one);
        }
        out.push(
            BoundReport::explicit("remark213", worst, rhs, slack)
                .with_case(format!("{case},random"))
                .with_input("lambda", lambda)
                .with_input("N_lambda", n as f64)
                .with_input("samples", REMARK213_SAMPLES as f64),
        );
        start = end;
    }
    Ok(out)
}

/// `lambda_1^{-d/2} (theta^{-d} (lk/l1)^d max{log N, 1}^d N + theta^{-4d} (lk/l1)^{4d-3})`.
pub fn thm01_rhs(l1: f64, lk: f64, n: usize, theta: f64, d: usize) -> f64 {
    let d = d as f64;
    let q = lk / l1;
    l1.powf(-d / 2.0) * (theta.powf(-d) * q.powf(d) * log_floor(n).powf(d) * n as f64 + theta.powf(-4.0 * d) * q.powf(4.0 * d - 3.0))
}

/// Ratio `||Phi_k||_1^2 / RHS` with the constant set to one (`k` is 1-based).
pub fn ratio_thm01(eig: &EigenData, k: usize, theta: f64) -> Result<BoundReport> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Config(format!("theta must lie in (0, 1], got {theta}")));
    }
    let (Some(&l1), Some(&lk)) = (eig.eigenvalues.first(), eig.eigenvalues.get(k.wrapping_sub(1))) else {
        return Ok(BoundReport::precondition("thm01", &format!("eigenvalue {k} not available")));
    };
    if !(l1 > 0.0) {
        return Ok(BoundReport::precondition("thm01", "lambda_1 is not positive"));
    }
    let n = counting_function(eig, (1.0 + theta) * lk)?;
    let l1_norm = eig.norms[k - 1].l1;
    let rhs = thm01_rhs(l1, lk, n, theta, eig.dimension);
    let mut r = BoundReport::ratio_only("thm01", l1_norm * l1_norm / eig.norms[k - 1].l2.powi(2), rhs)
        .with_case(format!("k={k},theta={theta}"))
        .with_input("lambda1", l1)
        .with_input("lambda_k", lk)
        .with_input("N", n as f64)
        .with_input("theta", theta)
        .with_input("d", eig.dimension as f64)
        .with_input("h", eig.h.unwrap_or(0.0));
    if n <= 2 {
        r = r.with_note(LOG_FLOOR_NOTE);
    }
    Ok(r)
}

/// `Lambda^{-d/2} ((S^2/(Lambda(S-r)))^d max{log N, 1}^d N + (S/Lambda)^{-3} (S^2/(Lambda(S-r)))^{4d})`.
pub fn cor26_rhs(big_lambda: f64, sigma: f64, r: f64, n: usize, d: usize) -> f64 {
    let d = d as f64;
    let g = sigma * sigma / (big_lambda * (sigma - r));
    big_lambda.powf(-d / 2.0) * (g.powf(d) * log_floor(n).powf(d) * n as f64 + (sigma / big_lambda).powi(-3) * g.powf(4.0 * d))
}

/// Ratio against the essential-spectrum corollary for a synthetic bottom `sigma`
/// of the essential spectrum (`k` is 1-based).
pub fn ratio_cor26(eig: &EigenData, k: usize, big_lambda: f64, sigma: f64, r: f64) -> Result<BoundReport> {
    let lo = big_lambda.max(sigma / 4.0);
    if !(r >= lo && r < sigma) {
        return Err(Error::Precondition(format!(
            "r = {r} must lie in [max(Lambda, Sigma/4), Sigma) = [{lo}, {sigma})"
        )));
    }
    let Some(&lk) = eig.eigenvalues.get(k.wrapping_sub(1)) else {
        return Ok(BoundReport::precondition("cor26", &format!("eigenvalue {k} not available")));
    };
    if !(lk >= big_lambda * (1.0 - COUNT_TOL) && lk <= r * (1.0 + COUNT_TOL)) {
        return Err(Error::Precondition(format!("lambda_k = {lk} is outside [Lambda, r]")));
    }
    let t_r = (r + 2.0 * sigma) / 3.0;
    let n = counting_function(eig, t_r)?;
    let norms = eig.norms[k - 1];
    let rhs = cor26_rhs(big_lambda, sigma, r, n, eig.dimension);
    Ok(BoundReport::ratio_only("cor26", norms.l1 * norms.l1 / (norms.l2 * norms.l2), rhs)
        .with_case(format!("k={k},r={r}"))
        .with_input("Lambda", big_lambda)
        .with_input("Sigma", sigma)
        .with_input("r", r)
        .with_input("t_r", t_r)
        .with_input("N", n as f64)
        .with_input("d", eig.dimension as f64)
        .with_note("synthetic essential-spectrum bottom")
        .with_note(LOG_FLOOR_NOTE))
}

/// `n^{d/2} sqrt(N_t) + (sqrt(r)/beta)(n^{2d-2}/alpha + n^{d-1}/alpha^d) e^{-alpha n} N_t`.
pub fn prop22_rhs(n: f64, n_t: usize, params: &DecayParams) -> Result<f64> {
    let floor = prop22_floor(params);
    if n < floor * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("n = {n} is below the admissible floor {floor}")));
    }
    let d = params.dimension as f64;
    let a = params.alpha;
    let nt = n_t as f64;
    Ok(n.powf(d / 2.0) * nt.sqrt()
        + params.r.sqrt() / params.beta * (n.powf(2.0 * d - 2.0) / a + n.powf(d - 1.0) / a.powf(d)) * (-a * n).exp() * nt)
}

/// `max{1, 2^{d/2} c0 / sqrt(beta)}`
pub fn prop22_floor(params: &DecayParams) -> f64 {
    (2f64.powf(params.dimension as f64 / 2.0) * params.c0 / params.beta.sqrt()).max(1.0)
}

/// Scales used in the two cases of the counting argument: the floor, and
/// `2 log N_t / alpha` when that exceeds it (`None` when `N_t <= 1` or it does not).
pub fn prop22_n_choices(params: &DecayParams, n_t: usize) -> (f64, Option<f64>) {
    let first = prop22_floor(params);
    let second = (n_t > 1).then(|| 2.0 * (n_t as f64).ln() / params.alpha).filter(|&n| n > first);
    (first, second)
}

/// Ratio `||Phi||_1 / RHS` of the localization estimate with the constant set to one.
pub fn ratio_prop22(l1_norm: f64, n: f64, n_t: usize, params: &DecayParams) -> Result<BoundReport> {
    let rhs = prop22_rhs(n, n_t, params)?;
    Ok(BoundReport::ratio_only("prop22", l1_norm, rhs)
        .with_case(format!("n={n}"))
        .with_input("n", n)
        .with_input("N_t", n_t as f64)
        .with_input("r", params.r)
        .with_input("t", params.t)
        .with_input("alpha", params.alpha)
        .with_input("beta", params.beta))
}
