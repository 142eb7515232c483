//! Check selection, the per-case check runner and the verdict file.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_e4, check_remark213, check_thm212, prop22_n_choices, ratio_cor26, ratio_prop22, ratio_thm01, BoundReport,
    ConstantMode, Verdict,
};
use crate::error::{Error, Result};
use crate::gallery::Solved;
use crate::heat::{check_e510_ratio, check_e59, check_lemma52};
use crate::localization::{
    bad_cells, build_mollifier, check_eq319, check_lemma31, check_lemma32, decay_profile, lemma32_tolerance, rescale,
    resolvent_block_norms, CubeCover, DecayParams, DecayProfile, ResolventProfile,
};
use crate::output::{fmt_f64, to_json_string};
use crate::spectral::{counting_function, Source};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Thm212,
    E4,
    Remark213,
    Thm01,
    Cor26,
    Prop22,
    Lemma31,
    Eq319,
    Lemma32,
    Decay,
    Resolvent,
    E59,
    E510,
    Lemma52,
}

impl CheckId {
    pub const ALL: [CheckId; 14] = [
        CheckId::Thm212,
        CheckId::E4,
        CheckId::Remark213,
        CheckId::Thm01,
        CheckId::Cor26,
        CheckId::Prop22,
        CheckId::Lemma31,
        CheckId::Eq319,
        CheckId::Lemma32,
        CheckId::Decay,
        CheckId::Resolvent,
        CheckId::E59,
        CheckId::E510,
        CheckId::Lemma52,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckId::Thm212 => "thm212",
            CheckId::E4 => "e4",
            CheckId::Remark213 => "remark213",
            CheckId::Thm01 => "thm01",
            CheckId::Cor26 => "cor26",
            CheckId::Prop22 => "prop22",
            CheckId::Lemma31 => "lemma31",
            CheckId::Eq319 => "eq319",
            CheckId::Lemma32 => "lemma32",
            CheckId::Decay => "decay",
            CheckId::Resolvent => "resolvent",
            CheckId::E59 => "e59",
            CheckId::E510 => "e510",
            CheckId::Lemma52 => "lemma52",
        }
    }

    /// Parse a comma-separated list; `all` expands to every check.
    pub fn parse_list(text: &str) -> Result<Vec<CheckId>> {
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                out.extend(CheckId::ALL);
            } else {
                out.push(item.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s {
            "ratio_thm01" | "cor25" => CheckId::Thm01,
            "ratio_cor26" => CheckId::Cor26,
            "ratio_e510" => CheckId::E510,
            other => *CheckId::ALL
                .iter()
                .find(|c| c.name() == other)
                .ok_or_else(|| Error::UnknownCheck(other.into()))?,
        };
        Ok(id)
    }
}

/// Knobs of a verification run. `r` and `t` are in units of `lambda_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// `None` selects every check that applies to the case, except the opt-in ones.
    pub checks: Option<Vec<CheckId>>,
    pub theta: f64,
    pub r: f64,
    pub t: f64,
    /// Cube scale for the decay and resolvent profiles; default `ceil(n0)`.
    pub n: Option<f64>,
    /// Absolute times; default `{0.5, 1, 2, 5} / lambda_1`.
    pub times: Option<Vec<f64>>,
    /// Synthetic bottom of the essential spectrum for `cor26`.
    pub sigma: Option<f64>,
    pub eig_count: usize,
    pub thm01_max_k: usize,
    pub lemma52_max_k: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            checks: None,
            theta: 1.0,
            r: 1.0,
            t: 2.0,
            n: None,
            times: None,
            sigma: None,
            eig_count: 20,
            thm01_max_k: 5,
            lemma52_max_k: 10,
        }
    }
}

impl VerifyOptions {
    fn selected(&self, solved: &Solved) -> Vec<CheckId> {
        if let Some(c) = &self.checks {
            return c.clone();
        }
        let exact = solved.eig.source == Source::Exact1d;
        let has_domain = solved.spec.is_some();
        CheckId::ALL
            .into_iter()
            .filter(|c| match c {
                CheckId::Remark213 => exact,
                CheckId::Cor26 => self.sigma.is_some(),
                CheckId::Decay | CheckId::Resolvent => false,
                CheckId::E4 | CheckId::Lemma31 | CheckId::Eq319 | CheckId::Lemma32 | CheckId::Prop22 => has_domain,
                _ => true,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: String,
    pub h: Option<f64>,
    pub source: Source,
    pub lambda1: f64,
    pub eigenpairs: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub reports: Vec<BoundReport>,
    #[serde(skip)]
    pub decay: Option<DecayProfile>,
    #[serde(skip)]
    pub resolvent: Option<ResolventProfile>,
}

impl CaseReport {
    pub fn failures(&self) -> usize {
        self.reports.iter().filter(|r| r.is_failure()).count()
    }
}

/// Convert a precondition error from an evaluator into a report.
fn soften(id: &str, r: Result<BoundReport>) -> Result<BoundReport> {
    match r {
        Err(Error::Precondition(msg)) => Ok(BoundReport::precondition(id, &msg)),
        other => other,
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

struct Localized {
    mask: crate::geometry::GridMask,
    params: DecayParams,
    n_t: usize,
    h: f64,
    lambda1: f64,
}

/// Run the selected checks on one solved case.
pub fn run_case(solved: &mut Solved, opts: &VerifyOptions) -> Result<CaseReport> {
    let checks = opts.selected(solved);
    let has = |c: CheckId| checks.contains(&c);
    if solved.spec.is_some() {
        solved.ensure(0.0, opts.eig_count)?;
    }
    let Some(l1) = solved.lambda1() else {
        return Err(Error::Config("no eigenvalues available".into()));
    };
    let d = solved.eig.dimension;
    let times = opts
        .times
        .clone()
        .unwrap_or_else(|| [0.5, 1.0, 2.0, 5.0].iter().map(|c| c / l1).collect());
    let heat_selected = has(CheckId::E59) || has(CheckId::E510) || has(CheckId::Lemma52);
    let heat_ok = opts.times.is_some() || l1 > 0.0;
    if heat_selected && heat_ok {
        crate::heat::check_time_grid(&times)?;
    }

    // Grow the spectrum once to cover every level the selected checks count at.
    if solved.spec.is_some() && l1 > 0.0 {
        let mut level: f64 = 0.0;
        let ev = &solved.eig.eigenvalues;
        if has(CheckId::Thm01) {
            let k = opts.thm01_max_k.min(ev.len());
            level = level.max((1.0 + opts.theta) * ev[k - 1]);
        }
        if has(CheckId::Lemma52) {
            let k = opts.lemma52_max_k.min(ev.len());
            level = level.max(2.0 * ev[k - 1]);
        }
        if has(CheckId::E59) || has(CheckId::E510) {
            level = level.max(16.0 / times[0].max(1e-300));
        }
        if checks.iter().any(|c| matches!(c, CheckId::Lemma31 | CheckId::Eq319 | CheckId::Lemma32 | CheckId::Prop22)) {
            level = level.max(opts.t * l1);
        }
        if let (true, Some(sigma)) = (has(CheckId::Cor26), opts.sigma) {
            level = level.max(sigma);
        }
        solved.ensure(level, opts.eig_count)?;
    }

    let eig = &solved.eig;
    let mut reports = Vec::new();
    let mut notes = solved.spec.as_ref().map(|s| s.notes.clone()).unwrap_or_default();

    if has(CheckId::Thm212) {
        reports.extend(check_thm212(&eig.truncated(opts.eig_count)));
    }
    if has(CheckId::E4) {
        match solved.gamma() {
            Some(gamma) => {
                let top = eig.known_up_to().min(*eig.eigenvalues.last().unwrap_or(&l1));
                for t in linspace(l1, top, 8) {
                    reports.push(check_e4(eig, gamma, t)?.with_input("gamma", gamma));
                }
            }
            None => reports.push(BoundReport::precondition("e4", "largest inscribed cube needs the domain")),
        }
    }
    if has(CheckId::Remark213) {
        reports.extend(check_remark213(eig)?);
    }
    if has(CheckId::Thm01) {
        for k in 1..=opts.thm01_max_k.min(eig.len()) {
            reports.push(soften("thm01", ratio_thm01(eig, k, opts.theta))?);
        }
    }
    if let (true, Some(sigma)) = (has(CheckId::Cor26), opts.sigma) {
        let lo = l1.max(sigma / 4.0);
        let r = 0.5 * (lo + sigma);
        let mut any = false;
        for k in 1..=eig.len().min(5) {
            if eig.eigenvalues[k - 1] <= r {
                any = true;
                reports.push(soften("cor26", ratio_cor26(eig, k, l1, sigma, r))?);
            }
        }
        if !any {
            reports.push(BoundReport::precondition("cor26", "no eigenvalue in [Lambda, r]"));
        }
    } else if has(CheckId::Cor26) {
        return Err(Error::Config("cor26 needs a synthetic --sigma".into()));
    }

    let wants_local = checks.iter().any(|c| {
        matches!(
            c,
            CheckId::Prop22 | CheckId::Lemma31 | CheckId::Eq319 | CheckId::Lemma32 | CheckId::Decay | CheckId::Resolvent
        )
    });
    let local = if wants_local {
        match solved.localization_mask()? {
            Some(mask) => {
                let params = match DecayParams::standard(d, opts.r, opts.t) {
                    Ok(p) => p,
                    Err(Error::Precondition(msg)) => {
                        reports.push(BoundReport::precondition("localization", &msg));
                        return Ok(finish(solved, opts, reports, notes, None, None));
                    }
                    Err(e) => return Err(e),
                };
                let n_t = counting_function(eig, opts.t * l1)?;
                Some(Localized {
                    mask,
                    params,
                    n_t,
                    h: solved.localization_h(),
                    lambda1: l1,
                })
            }
            None => {
                reports.push(BoundReport::precondition("localization", "needs the domain"));
                None
            }
        }
    } else {
        None
    };

    let (mut decay, mut resolvent) = (None, None);
    if let Some(loc) = &local {
        let scaled = loc.mask.scaled(loc.lambda1.sqrt());
        let mollifier = build_mollifier(d, 64);
        let n0 = loc.params.n_min() as f64;
        let mut cover_n0: Option<CubeCover> = None;
        if has(CheckId::Lemma31) || has(CheckId::Eq319) || has(CheckId::Lemma32) {
            for n in [n0, 2.0 * n0] {
                let cover = bad_cells(&scaled, n, loc.params.t, &mollifier)?;
                if has(CheckId::Lemma31) {
                    reports.push(check_lemma31(&cover, loc.n_t).with_case(format!("n={n}")));
                }
                if has(CheckId::Eq319) {
                    reports.push(check_eq319(&cover, loc.n_t).with_case(format!("n={n}")));
                }
                if n == n0 {
                    cover_n0 = Some(cover);
                }
            }
        }
        if has(CheckId::Lemma32) {
            let cover = cover_n0.as_ref().expect("cover at n0 computed above");
            let delta = lemma32_tolerance(loc.params.s, loc.h);
            reports.push(check_lemma32(cover, &loc.params, &scaled, delta)?.with_case(format!("n={n0}")));
        }
        if has(CheckId::Prop22) {
            let rescaled = eig.scaled(loc.lambda1.sqrt());
            let (first, second) = prop22_n_choices(&loc.params, loc.n_t);
            for (k, (&lk, norms)) in rescaled.eigenvalues.iter().zip(&rescaled.norms).enumerate() {
                if lk > loc.params.r * (1.0 + 1e-10) {
                    break;
                }
                for n in std::iter::once(first).chain(second) {
                    reports.push(
                        soften("prop22", ratio_prop22(norms.l1 / norms.l2, n, loc.n_t, &loc.params))?
                            .with_case(format!("k={},n={}", k + 1, fmt_f64(n))),
                    );
                }
            }
        }
        if has(CheckId::Decay) || has(CheckId::Resolvent) {
            let n = opts.n.unwrap_or(n0);
            let cover = if n == n0 && cover_n0.is_some() {
                cover_n0.take().expect("checked")
            } else {
                bad_cells(&scaled, n, loc.params.t, &mollifier)?
            };
            if has(CheckId::Decay) {
                match phi1_on(solved, &loc.mask) {
                    Some(phi) => {
                        let (_, phi) = rescale(&loc.mask, loc.lambda1, &phi);
                        let prof = decay_profile(&phi, &scaled, &cover, &loc.params)?;
                        reports.push(decay_report(&prof, n));
                        decay = Some(prof);
                    }
                    None => reports.push(BoundReport::precondition("decay", "ground state not sampled on the mask")),
                }
            }
            if has(CheckId::Resolvent) {
                match cover.g_mask(&scaled) {
                    None => reports.push(BoundReport::vacuous("resolvent_rate", "G_n is empty").with_case(format!("n={n}"))),
                    Some(g) => match resolvent_block_norms(&g, loc.params.r, &loc.params, &[]) {
                        Ok(prof) => {
                            reports.extend(resolvent_reports(&prof, n));
                            resolvent = Some(prof);
                        }
                        Err(Error::Precondition(msg)) => {
                            reports.push(BoundReport::precondition("resolvent_rate", &msg).with_case(format!("n={n}")))
                        }
                        Err(e) => return Err(e),
                    },
                }
            }
        }
    }

    if heat_selected && !heat_ok {
        reports.push(BoundReport::precondition("heat", "lambda_1 is not positive"));
    }
    if has(CheckId::E59) && heat_ok {
        for &t in &times {
            reports.push(check_e59(eig, t)?);
        }
    }
    if has(CheckId::E510) && heat_ok {
        for &t in &times {
            reports.push(check_e510_ratio(eig, t)?);
        }
    }
    if has(CheckId::Lemma52) && heat_ok {
        let mut big_ts: Vec<f64> = times.iter().map(|t| t / 6.0).collect();
        big_ts.push(0.1);
        for k in 1..=opts.lemma52_max_k.min(eig.len()) {
            for &bt in &big_ts {
                reports.push(check_lemma52(eig, k, bt)?);
            }
        }
    }
    if reports.iter().any(|r| r.notes.iter().any(|n| n.contains("truncation"))) {
        notes.push("some spectral sums are truncated above 1% of the partial sum".into());
    }
    Ok(finish(solved, opts, reports, notes, decay, resolvent))
}

fn finish(
    solved: &Solved,
    _opts: &VerifyOptions,
    reports: Vec<BoundReport>,
    notes: Vec<String>,
    decay: Option<DecayProfile>,
    resolvent: Option<ResolventProfile>,
) -> CaseReport {
    CaseReport {
        case: solved.eig.label.clone(),
        h: solved.eig.h,
        source: solved.eig.source,
        lambda1: solved.lambda1().unwrap_or(f64::NAN),
        eigenpairs: solved.eig.len(),
        notes,
        reports,
        decay,
        resolvent,
    }
}

/// Ground state on `mask`: the grid eigenfunction, or the closed-form mode sampled at the nodes.
fn phi1_on(solved: &Solved, mask: &crate::geometry::GridMask) -> Option<Vec<f64>> {
    match solved.eig.source {
        Source::Grid => solved.eig.functions.first().filter(|f| f.len() == mask.len()).cloned(),
        Source::Exact1d => {
            let mode = solved.eig.modes.first()?;
            Some((0..mask.len()).map(|k| mode.value(mask.coord(k)[0])).collect())
        }
    }
}

/// `alpha <= fitted rate` of the cell masses of `(1 - xi_n) Phi`.
pub fn decay_report(prof: &DecayProfile, n: f64) -> BoundReport {
    let case = format!("n={n}");
    let r = match prof.fitted_rate {
        _ if prof.cells_in_fit == 0 => {
            return BoundReport::vacuous("decay_rate", "no mass outside F̃_n").with_case(case).with_input("alpha", prof.alpha)
        }
        None => BoundReport::precondition("decay_rate", "fewer than two distinct distances to Z_n"),
        Some(rate) => BoundReport::explicit("decay_rate", prof.alpha, rate, 1.0),
    };
    let mut r = r
        .with_case(case)
        .with_input("alpha", prof.alpha)
        .with_input("cells_in_fit", prof.cells_in_fit as f64)
        .with_input("total_mass", prof.total_mass);
    if !prof.reliable {
        r = r.with_note("fewer than 4 cells above the mass floor");
    }
    r
}

/// `alpha <=` fitted rate of the block norms, and the diagonal bound `1 / (lambda_1(G) - lambda)`.
pub fn resolvent_reports(prof: &ResolventProfile, n: f64) -> Vec<BoundReport> {
    let case = format!("n={n}");
    let rate = match prof.fitted_rate {
        Some(rate) => BoundReport::explicit("resolvent_rate", prof.alpha, rate, 1.0),
        None => BoundReport::precondition("resolvent_rate", "fewer than two distinct block distances"),
    }
    .with_case(case.clone())
    .with_input("alpha", prof.alpha)
    .with_input("lambda", prof.lambda)
    .with_input("lambda1_G", prof.lambda1_g)
    .with_input("blocks_in_fit", prof.blocks_in_fit as f64);
    let diag = prof
        .blocks
        .iter()
        .filter(|b| b.source == b.target)
        .map(|b| b.norm)
        .fold(0.0, f64::max);
    let diagonal = BoundReport::explicit("resolvent_diagonal", diag, 1.0 / (prof.lambda1_g - prof.lambda), 1.0 + 1e-8)
        .with_case(case)
        .with_input("lambda", prof.lambda)
        .with_input("lambda1_G", prof.lambda1_g);
    vec![rate, diagonal]
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub explicit: usize,
    pub passed: usize,
    pub failed: usize,
    pub preconditions: usize,
    pub ratio_only: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictFile {
    /// Run metadata; the only block that varies between identical runs.
    pub metadata: serde_json::Value,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

pub fn metadata(command: &str) -> serde_json::Value {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    serde_json::json!({
        "tool": "dspec",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "generated_unix": now,
    })
}

impl VerdictFile {
    pub fn new(cases: Vec<CaseReport>, metadata: serde_json::Value) -> Self {
        let mut s = Summary::default();
        for r in cases.iter().flat_map(|c| &c.reports) {
            match (r.constant_mode, r.verdict) {
                (ConstantMode::UnitConstant, _) => s.ratio_only += 1,
                (_, Verdict::Precondition) => s.preconditions += 1,
                (_, Verdict::Fail) => {
                    s.explicit += 1;
                    s.failed += 1
                }
                _ => {
                    s.explicit += 1;
                    s.passed += 1
                }
            }
        }
        VerdictFile { metadata, cases, summary: s }
    }

    pub fn ok(&self) -> bool {
        self.summary.failed == 0 && self.summary.preconditions == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_json_string(self)?)
    }

    /// JSON without the metadata block, for byte comparisons between runs.
    pub fn body_json(&self) -> Result<String> {
        Ok(to_json_string(&(&self.cases, &self.summary))?)
    }

    /// One row per check per case.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:<20} {:<28} {:>13} {:>13} {:>11}  verdict",
            "case", "check", "detail", "lhs", "rhs", "ratio"
        );
        for c in &self.cases {
            for r in &c.reports {
                let _ = writeln!(
                    out,
                    "{:<18} {:<20} {:<28} {:>13.6e} {:>13.6e} {:>11.4e}  {}",
                    c.case,
                    r.id,
                    r.case,
                    r.lhs,
                    r.rhs,
                    r.ratio,
                    verdict_name(r.verdict)
                );
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "explicit: {} passed, {} failed, {} precondition; ratio-only: {}",
            s.passed, s.failed, s.preconditions, s.ratio_only
        );
        out
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["case", "check", "detail", "lhs", "rhs", "ratio", "constant_mode", "verdict"])?;
        for c in &self.cases {
            for r in &c.reports {
                w.write_record([
                    c.case.as_str(),
                    r.id.as_str(),
                    r.case.as_str(),
                    &fmt_f64(r.lhs),
                    &fmt_f64(r.rhs),
                    &fmt_f64(r.ratio),
                    match r.constant_mode {
                        ConstantMode::Explicit => "explicit",
                        ConstantMode::UnitConstant => "unit_constant",
                    },
                    verdict_name(r.verdict),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::RatioOnly => "ratio_only",
        Verdict::VacuousPass => "vacuous_pass",
        Verdict::Precondition => "precondition",
    }
}
