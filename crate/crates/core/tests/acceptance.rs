//! Acceptance criteria, one line each. Runs as a plain binary so the lines always reach
//! the console: `cargo test --test acceptance`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use dirichlet_spectra::bounds::{check_e4, check_e4_count, check_remark213, check_thm212, BoundReport, Verdict};
use dirichlet_spectra::gallery::{Mode, Solved, GALLERY};
use dirichlet_spectra::geometry::{presets, rasterize};
use dirichlet_spectra::heat::heat_series;
use dirichlet_spectra::localization::{lemma32_tolerance, DecayParams};
use dirichlet_spectra::spectral::{exact_box_count, exact_box_eigenvalues, exact_interval_spectrum, lowest_eigenpairs, Request};
use dirichlet_spectra::sweep::{family_members, run_sweep, Envelopes, EnvelopeStatus, SweepCheck, SweepReport};
use dirichlet_spectra::verify::{metadata, run_case, CheckId, VerdictFile, VerifyOptions};

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn solve(preset: &str, mode: Mode, request: Request) -> Solved {
    Solved::solve(presets::preset(preset).unwrap(), mode, request).unwrap()
}

fn worst_ratio(reports: &[BoundReport]) -> f64 {
    reports.iter().map(|r| r.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max)
}

fn all_pass(reports: &[BoundReport]) -> bool {
    !reports.is_empty() && reports.iter().all(|r| r.passed())
}

fn first_failure(reports: &[BoundReport]) -> String {
    reports
        .iter()
        .find(|r| !r.passed())
        .map(|r| format!("; first failure {} [{}] {:?} lhs={} rhs={}", r.id, r.case, r.verdict, r.lhs, r.rhs))
        .unwrap_or_default()
}

fn options(checks: &[CheckId]) -> VerifyOptions {
    VerifyOptions { checks: Some(checks.to_vec()), ..VerifyOptions::default() }
}

fn exact_1d() -> Outcome {
    let start = Instant::now();
    let eig = exact_interval_spectrum(&[(0.0, 1.0)], 400.0 * PI * PI).unwrap();
    let worst = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let want = (PI * (j + 1) as f64).powi(2);
            (v - want).abs() / want
        })
        .fold(0.0, f64::max);
    let l1_err = (eig.norms[0].l1 - 2.0 * 2f64.sqrt() / PI).abs();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        eig.len() == 20 && worst <= 1e-12 && l1_err <= 1e-12 && secs < 1.0,
        format!("{} eigenvalues, max rel err {worst:.1e}, |l1 - 2sqrt2/pi| = {l1_err:.1e}, {secs:.3}s", eig.len()),
    )
}

fn grid_convergence() -> Outcome {
    let start = Instant::now();
    let exact = 2.0 * PI * PI;
    let err = |h: f64| {
        let mask = rasterize(&presets::unit_square(), h).unwrap();
        let eig = lowest_eigenpairs(&mask, Request::Count(1)).unwrap();
        (eig.eigenvalues[0] - exact).abs() / exact
    };
    let (e64, e128) = (err(1.0 / 64.0), err(1.0 / 128.0));
    let order = (e64 / e128).log2();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        order >= 1.8 && e128 < 3e-3 && secs < 60.0,
        format!("rel err {e64:.3e} (1/64), {e128:.3e} (1/128), order {order:.3}, {secs:.1}s"),
    )
}

fn norm_bounds(square: &Solved, dumbbell: &Solved) -> Outcome {
    let interval = solve("unit_interval", Mode::Exact, Request::Count(20));
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, s) in [("interval", &interval), ("square", square), ("dumbbell", dumbbell)] {
        let eig = s.eig.truncated(20);
        let reports = check_thm212(&eig);
        let ok = eig.len() == 20 && all_pass(&reports);
        pass &= ok;
        parts.push(format!("{name}: {} reports, worst ratio {:.4}{}", reports.len(), worst_ratio(&reports), first_failure(&reports)));
    }
    outcome(pass, parts.join("; "))
}

fn counting_lower_bound() -> Outcome {
    let interval = solve("unit_interval", Mode::Exact, Request::Count(50));
    let (l1, l50) = (interval.eig.eigenvalues[0], interval.eig.eigenvalues[49]);
    let mut reports = Vec::new();
    for i in 0..20 {
        let t = l1 + (l50 - l1) * i as f64 / 19.0;
        reports.push(check_e4(&interval.eig, 1.0, t).unwrap());
    }
    let sides = [1.0, 1.0];
    let box_ev = exact_box_eigenvalues(&sides, 200.0 * PI * PI);
    let (s1, s50) = (box_ev[0], box_ev[49]);
    for i in 0..20 {
        let t = s1 + (s50 - s1) * i as f64 / 19.0;
        reports.push(check_e4_count(exact_box_count(&sides, t), s1, 1.0, 2, t, 1.0 + 1e-12));
    }
    outcome(
        reports.len() == 40 && all_pass(&reports),
        format!("40 points, worst ratio {:.4}{}", worst_ratio(&reports), first_failure(&reports)),
    )
}

fn equality_cases() -> Outcome {
    let mut worst_eq: f64 = 0.0;
    let mut random_ok = true;
    let mut count = 0;
    for preset in ["interval_union(1)", "interval_union(0.37)", "interval_union(1, 1)", "interval_union(0.5, 0.5)"] {
        let s = solve(preset, Mode::Exact, Request::Count(20));
        for r in check_remark213(&s.eig).unwrap() {
            count += 1;
            if r.case.ends_with("extremal") {
                worst_eq = worst_eq.max((r.lhs / r.rhs - 1.0).abs());
            } else {
                random_ok &= r.verdict == Verdict::Pass;
            }
        }
    }
    outcome(
        count > 0 && worst_eq <= 1e-10 && random_ok,
        format!("{count} reports, max |lhs/rhs - 1| at extremal weights {worst_eq:.1e}, random vectors within bound: {random_ok}"),
    )
}

fn gallery_reports(gallery: &mut [Solved], checks: &[CheckId]) -> (bool, String) {
    let mut all = Vec::new();
    for s in gallery.iter_mut() {
        let case = run_case(s, &options(checks)).unwrap();
        all.extend(case.reports);
    }
    let vacuous = all.iter().filter(|r| r.verdict == Verdict::VacuousPass).count();
    (
        all_pass(&all),
        format!("{} reports over {} cases ({vacuous} vacuous), worst ratio {:.4}{}", all.len(), gallery.len(), worst_ratio(&all), first_failure(&all)),
    )
}

fn cover_counts(gallery: &mut [Solved]) -> Outcome {
    let (pass, detail) = gallery_reports(gallery, &[CheckId::Lemma31, CheckId::Eq319]);
    outcome(pass, detail)
}

fn bad_region_gap(dumbbell: &mut Solved) -> Outcome {
    let h = 1.0 / 128.0;
    let case = run_case(dumbbell, &options(&[CheckId::Lemma32])).unwrap();
    let params = DecayParams::standard(2, 1.0, 2.0).unwrap();
    let delta = lemma32_tolerance(params.s, h);
    let verdicts: Vec<String> = case.reports.iter().map(|r| format!("{} {:?}", r.case, r.verdict)).collect();
    outcome(
        all_pass(&case.reports) && delta <= 0.05 * params.s,
        format!("n0 = {}, s = {}, delta_h = {delta:.4} (0.05 s = {:.4}); {}", params.n_min(), params.s, 0.05 * params.s, verdicts.join(", ")),
    )
}

fn decay_rates() -> Outcome {
    let opts = VerifyOptions { n: Some(2.0), ..options(&[CheckId::Decay, CheckId::Resolvent]) };
    let mut parts = Vec::new();
    let mut pass = true;
    for preset in ["dumbbell(2, 0.2)", "tadpole"] {
        let mut s = solve(preset, Mode::Grid(1.0 / 64.0), Request::Count(20));
        let case = run_case(&mut s, &opts).unwrap();
        pass &= all_pass(&case.reports);
        let rows: Vec<String> = case
            .reports
            .iter()
            .map(|r| match r.verdict {
                Verdict::VacuousPass => format!("{} vacuous ({})", r.id, r.notes.join("; ")),
                v => format!("{} {v:?} {:.4} vs {:.4}", r.id, r.lhs, r.rhs),
            })
            .collect();
        parts.push(format!("{preset}: {}", rows.join(", ")));
    }
    outcome(pass, parts.join("; "))
}

/// `Q(t)` and `Z(t)` on (0, 1) by direct summation.
fn interval_heat_oracle(t: f64) -> (f64, f64) {
    let (mut q, mut z) = (0.0, 0.0);
    for j in 1..=2000u32 {
        let lj = (PI * j as f64).powi(2);
        z += (-lj * t).exp();
        if j % 2 == 1 {
            q += 8.0 / (PI * PI * (j * j) as f64) * (-lj * t).exp();
        }
    }
    (q, z)
}

fn heat_equivalence() -> Outcome {
    let start = Instant::now();
    let times = [0.05, 0.1, 0.2, 0.5];
    let level: f64 = 24.0 / times[0];

    let interval = solve("unit_interval", Mode::Exact, Request::Threshold(level.max(200.0 * PI * PI)));
    let oracle = interval.localization_mask().unwrap().unwrap();
    let s1 = heat_series(&interval.eig, &times, Some(&oracle)).unwrap();
    let q1 = s1.q_timestep.as_ref().unwrap();
    let abs1 = s1.q_spectral.iter().zip(q1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let (q_ref, z_ref) = interval_heat_oracle(0.1);
    let ref_err = (s1.q_spectral[1] - q_ref).abs().max((s1.z[1] - z_ref).abs());

    let mut square = solve("unit_square", Mode::Grid(1.0 / 32.0), Request::Threshold(level));
    square.ensure(level, 20).unwrap();
    let mask = square.mask.clone().unwrap();
    let s2 = heat_series(&square.eig, &times, Some(&mask)).unwrap();
    let q2 = s2.q_timestep.as_ref().unwrap();
    let rel2 = s2.q_spectral.iter().zip(q2).map(|(a, b)| (a - b).abs() / a).fold(0.0, f64::max);

    let secs = start.elapsed().as_secs_f64();
    outcome(
        abs1 <= 1e-3 && rel2 <= 1e-2 && ref_err <= 1e-6 && secs < 120.0,
        format!(
            "interval max abs diff {abs1:.2e}, square max rel diff {rel2:.2e}, \
             Q(0.1) = {:.8} Z(0.1) = {:.8} (series {q_ref:.8}, {z_ref:.8}), {secs:.1}s",
            s1.q_spectral[1], s1.z[1]
        ),
    )
}

fn heat_bounds(gallery: &mut [Solved]) -> Outcome {
    let (pass, detail) = gallery_reports(gallery, &[CheckId::E59, CheckId::Lemma52]);
    outcome(pass, detail)
}

fn ratio_suite() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden/envelopes.json");
    let golden = Envelopes::load(&path).unwrap();
    let h = 1.0 / 32.0;
    let checks = [SweepCheck::Thm01, SweepCheck::E510];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut ball_pair = None;
    let mut dumbbell_l1 = Vec::new();
    for (family, members) in [
        ("disjoint_balls", family_members("disjoint_balls", &[1, 2, 4, 8], &[], &[]).unwrap()),
        ("dumbbell", family_members("dumbbell", &[2], &[0.4, 0.2, 0.1], &[]).unwrap()),
    ] {
        let rows = run_sweep(&members, h, &checks).unwrap();
        pass &= rows.iter().all(|r| r.ratio.is_finite() && r.ratio > 0.0);
        for r in rows.iter().filter(|r| r.check == SweepCheck::Thm01) {
            if family == "disjoint_balls" && r.member.contains("(2)") {
                ball_pair = Some(r.l1_sq);
            }
            if family == "dumbbell" {
                dumbbell_l1.push(r.l1_sq);
            }
        }
        let mut store = Envelopes(golden.0.clone());
        let (report, _) = SweepReport::compare(family, h, rows, &mut store, false);
        pass &= report.status.iter().all(|s| *s == EnvelopeStatus::Within);
        let worst = report.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        parts.push(format!("{family}: {} rows, max ratio {worst:.4e}, {:?}", report.rows.len(), report.status));
    }
    // Thin passages leave the ground state close to that of two separate discs.
    let target = ball_pair.unwrap_or(f64::NAN);
    let gaps: Vec<f64> = dumbbell_l1.iter().map(|v| (v - target).abs()).collect();
    let converging = gaps.len() == 3 && gaps.windows(2).all(|w| w[1] < w[0]);
    pass &= converging;
    parts.push(format!("dumbbell l1^2 {dumbbell_l1:.4?} -> two discs {target:.4}"));
    outcome(pass, parts.join("; "))
}

fn determinism() -> Outcome {
    let run = || {
        let opts = VerifyOptions::default();
        let cases = GALLERY
            .iter()
            .map(|c| {
                let mut s = Solved::gallery(c, Request::Count(opts.eig_count)).unwrap();
                run_case(&mut s, &opts).unwrap()
            })
            .collect();
        VerdictFile::new(cases, metadata("verify --gallery")).body_json().unwrap()
    };
    let (a, b) = (run(), run());
    outcome(a == b, format!("{} bytes, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let gallery: RefCell<Vec<Solved>> =
        RefCell::new(GALLERY.iter().map(|c| Solved::gallery(c, Request::Count(20)).unwrap()).collect());
    let square = solve("unit_square", Mode::Grid(1.0 / 128.0), Request::Count(20));
    let dumbbell = RefCell::new(solve("dumbbell(2, 0.2)", Mode::Grid(1.0 / 128.0), Request::Count(20)));

    let criteria: Vec<Criterion> = vec![
        ("exact 1D spectrum and norms", Box::new(exact_1d)),
        ("grid convergence on the unit square", Box::new(grid_convergence)),
        ("thm212 bounds, first 20 eigenfunctions", Box::new(|| norm_bounds(&square, &dumbbell.borrow()))),
        ("e4 counting lower bound", Box::new(counting_lower_bound)),
        ("remark213 equality and random weights", Box::new(equality_cases)),
        ("lemma31 and eq319 on the gallery", Box::new(|| cover_counts(&mut gallery.borrow_mut()))),
        ("lemma32 on dumbbell(2, 0.2) at h = 1/128", Box::new(|| bad_region_gap(&mut dumbbell.borrow_mut()))),
        ("decay and resolvent rates >= alpha", Box::new(decay_rates)),
        ("heat content: spectral vs time stepping", Box::new(heat_equivalence)),
        ("e59 and lemma52 on the gallery", Box::new(|| heat_bounds(&mut gallery.borrow_mut()))),
        ("ratio suite within golden envelopes", Box::new(ratio_suite)),
        ("verdict JSON determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} ({:.1}s): {}",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
