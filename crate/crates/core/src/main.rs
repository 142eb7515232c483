use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dirichlet_spectra::error::{Error, Result};
use dirichlet_spectra::gallery::{Mode, Solved, EXACT_LOCALIZATION_H, GALLERY};
use dirichlet_spectra::geometry::{parse_domain, presets, rasterize, DomainSpec};
use dirichlet_spectra::heat::{check_e510_ratio, check_e59, check_lemma52, heat_series, HeatSeries};
use dirichlet_spectra::output::{fmt_f64, to_json_string};
use dirichlet_spectra::spectral::{EigenData, Request};
use dirichlet_spectra::sweep::{family_members, run_sweep, Envelopes, SweepCheck, SweepReport};
use dirichlet_spectra::verify::{metadata, run_case, CaseReport, CheckId, VerdictFile, VerifyOptions};

const DEFAULT_H: f64 = 1.0 / 64.0;

#[derive(Parser)]
#[command(name = "dspec", version, about = "Dirichlet Laplacian spectra and L1 eigenfunction bound checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Domain description file.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Built-in domain, e.g. `dumbbell(2, 0.2)`.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Mesh width.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Closed-form spectrum of a union of intervals.
    #[arg(long, global = true)]
    exact: bool,
    #[arg(long, global = true, conflicts_with = "tmax")]
    count: Option<usize>,
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Output directory (default: $OUTPUT_DIR, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Comma-separated check ids.
    #[arg(long, global = true)]
    checks: Option<String>,
    /// Rewrite stored golden envelopes.
    #[arg(long, global = true)]
    update_golden: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Compute eigenpairs and write them to `eig.json`.
    Solve {
        /// Also write the eigenfunctions as little-endian f64.
        #[arg(long)]
        functions: bool,
    },
    /// Run the inequality checks and write `verdicts.json`.
    Verify {
        /// Check every built-in gallery domain.
        #[arg(long)]
        gallery: bool,
        /// Eigen data written by `solve`.
        #[arg(long)]
        eig: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        /// Localization level r in units of lambda_1.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Localization threshold t in units of lambda_1.
        #[arg(long, default_value_t = 2.0)]
        t: f64,
        /// Cube scale for the decay profiles.
        #[arg(long)]
        n: Option<f64>,
        /// Comma-separated times for the heat checks.
        #[arg(long)]
        times: Option<String>,
        /// Synthetic essential-spectrum bottom for cor26.
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Heat trace and content on a time grid, with the trace/content checks.
    Heat {
        /// Comma-separated times.
        #[arg(long, default_value = "")]
        times: String,
        /// Add the time-stepping heat content column.
        #[arg(long)]
        oracle: bool,
    },
    /// Ratio checks over a preset family, compared with the golden envelopes.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Envelope store.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Render a verdict or sweep file.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Exit codes: 0 ok, 1 check failure, 2 usage or input error, 3 computation error.
fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        "precondition" => 1,
        "resource" | "solver" | "not_positive_definite" | "singular" | "incomplete" => 3,
        _ => 2,
    }
}

fn report_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Solve { functions } => cmd_solve(g, *functions),
        Command::Verify {
            gallery,
            eig,
            theta,
            r,
            t,
            n,
            times,
            sigma,
        } => {
            let opts = VerifyOptions {
                checks: g.checks.as_deref().map(CheckId::parse_list).transpose()?,
                theta: *theta,
                r: *r,
                t: *t,
                n: *n,
                times: times.as_deref().map(parse_times).transpose()?,
                sigma: *sigma,
                ..VerifyOptions::default()
            };
            cmd_verify(g, &opts, *gallery, eig.as_deref())
        }
        Command::Heat { times, oracle } => cmd_heat(g, &parse_times(times)?, *oracle),
        Command::Sweep { family, m, eps, k, golden } => cmd_sweep(g, family, m, eps, k, golden.as_deref()),
        Command::Report { input } => cmd_report(g, input),
    }
}

fn parse_times(text: &str) -> Result<Vec<f64>> {
    let times = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::Config(format!("invalid time `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    dirichlet_spectra::heat::check_time_grid(&times)?;
    Ok(times)
}

fn out_dir(g: &Global) -> Result<PathBuf> {
    let dir = g
        .out
        .clone()
        .or_else(|| std::env::var_os("OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn domain(g: &Global) -> Result<DomainSpec> {
    match (&g.spec, &g.preset) {
        (Some(path), None) => parse_domain(&std::fs::read_to_string(path)?),
        (None, Some(expr)) => presets::preset(expr),
        (Some(_), Some(_)) => Err(Error::Config("give either --spec or --preset, not both".into())),
        (None, None) => Err(Error::Config("a domain is required (--spec or --preset)".into())),
    }
}

fn mode(g: &Global) -> Result<Mode> {
    if g.exact {
        return Ok(Mode::Exact);
    }
    let h = g.h.unwrap_or(DEFAULT_H);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("mesh width must be positive, got {h}")));
    }
    Ok(Mode::Grid(h))
}

fn request(g: &Global, default: Request) -> Result<Request> {
    Ok(match (g.count, g.tmax) {
        (Some(k), _) => Request::Count(k),
        (None, Some(t)) => Request::Threshold(t),
        (None, None) => default,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn cmd_solve(g: &Global, functions: bool) -> Result<u8> {
    let solved = Solved::solve(domain(g)?, mode(g)?, request(g, Request::Count(20))?)?;
    let dir = out_dir(g)?;
    let eig = &solved.eig;
    eig.write_json(&dir.join("eig.json"))?;
    if functions && !eig.functions.is_empty() {
        eig.write_functions(&dir.join("eig_functions.bin"), &dir.join("eig_functions.json"))?;
    }
    match g.format {
        Format::Json => print!("{}", eig.to_json()?),
        Format::Csv => print!("{}", eig_csv(eig)?),
        Format::Table => {
            println!("{}: {} eigenpairs (complete up to {})", eig.label, eig.len(), fmt_f64(eig.known_up_to()));
            println!("{:>5} {:>24} {:>14} {:>14}", "k", "lambda", "l1", "linf");
            for (k, (l, n)) in eig.eigenvalues.iter().zip(&eig.norms).enumerate() {
                println!("{:>5} {:>24.16e} {:>14.8} {:>14.8}", k + 1, l, n.l1, n.linf);
            }
        }
    }
    Ok(0)
}

fn eig_csv(eig: &EigenData) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "lambda", "l1", "l2", "linf"])?;
    for (k, (l, n)) in eig.eigenvalues.iter().zip(&eig.norms).enumerate() {
        w.write_record([(k + 1).to_string(), fmt_f64(*l), fmt_f64(n.l1), fmt_f64(n.l2), fmt_f64(n.linf)])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

fn print_verdicts(g: &Global, file: &VerdictFile) -> Result<()> {
    match g.format {
        Format::Json => print!("{}", file.to_json()?),
        Format::Csv => print!("{}", file.csv()?),
        Format::Table => print!("{}", file.table()),
    }
    Ok(())
}

fn cmd_verify(g: &Global, opts: &VerifyOptions, gallery: bool, eig: Option<&Path>) -> Result<u8> {
    let mut cases: Vec<CaseReport> = Vec::new();
    if gallery {
        for case in GALLERY {
            let mut s = Solved::gallery(&case, Request::Count(opts.eig_count))?;
            cases.push(run_case(&mut s, opts)?);
        }
    } else if let Some(path) = eig {
        let mut s = Solved::from_eig(EigenData::read_json(path)?);
        cases.push(run_case(&mut s, opts)?);
    } else {
        let mut s = Solved::solve(domain(g)?, mode(g)?, request(g, Request::Count(opts.eig_count))?)?;
        cases.push(run_case(&mut s, opts)?);
    }
    let dir = out_dir(g)?;
    for c in &cases {
        if let Some(p) = &c.decay {
            p.write_csv(&dir.join(format!("decay_{}.csv", file_stem(&c.case))))?;
        }
        if let Some(p) = &c.resolvent {
            write(&dir.join(format!("resolvent_{}.json", file_stem(&c.case))), &to_json_string(p)?)?;
        }
    }
    let file = VerdictFile::new(cases, metadata("verify"));
    write(&dir.join("verdicts.json"), &file.to_json()?)?;
    print_verdicts(g, &file)?;
    Ok(if file.ok() { 0 } else { 1 })
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

fn cmd_heat(g: &Global, times: &[f64], oracle: bool) -> Result<u8> {
    let spec = domain(g)?;
    let mode = mode(g)?;
    let mut solved = Solved::solve(spec.clone(), mode, request(g, Request::Count(10))?)?;
    let k_max = 10.min(solved.eig.len());
    let level = (24.0 / times[0]).max(2.0 * solved.eig.eigenvalues[k_max - 1]);
    solved.ensure(level, 10)?;
    let oracle_mask = match (oracle, mode) {
        (false, _) => None,
        (true, Mode::Grid(_)) => solved.mask.clone(),
        (true, Mode::Exact) => Some(rasterize(&spec, g.h.unwrap_or(EXACT_LOCALIZATION_H))?),
    };
    let series: HeatSeries = heat_series(&solved.eig, times, oracle_mask.as_ref())?;

    let eig = &solved.eig;
    let mut reports = Vec::new();
    for &t in times {
        reports.push(check_e59(eig, t)?);
    }
    for &t in times {
        reports.push(check_e510_ratio(eig, t)?);
    }
    let mut big_ts: Vec<f64> = times.iter().map(|t| t / 6.0).collect();
    big_ts.push(0.1);
    for k in 1..=k_max {
        for &bt in &big_ts {
            reports.push(check_lemma52(eig, k, bt)?);
        }
    }
    let case = CaseReport {
        case: eig.label.clone(),
        h: eig.h,
        source: eig.source,
        lambda1: eig.eigenvalues[0],
        eigenpairs: eig.len(),
        notes: series.warnings.clone(),
        reports,
        decay: None,
        resolvent: None,
    };
    let file = VerdictFile::new(vec![case], metadata("heat"));

    let dir = out_dir(g)?;
    series.write_csv(&dir.join("heat.csv"))?;
    write(&dir.join("heat.json"), &series.to_json()?)?;
    write(&dir.join("heat_checks.json"), &file.to_json()?)?;
    match g.format {
        Format::Json => print!("{}", series.to_json()?),
        Format::Csv => print!("{}", series.to_csv()?),
        Format::Table => {
            print!("{}", series.to_csv()?);
            print!("{}", file.table());
        }
    }
    Ok(if file.ok() { 0 } else { 1 })
}

fn cmd_sweep(g: &Global, family: &str, m: &[usize], eps: &[f64], k: &[usize], golden: Option<&Path>) -> Result<u8> {
    let members = family_members(family, m, eps, k)?;
    let checks = SweepCheck::parse_list(g.checks.as_deref().unwrap_or("thm01"))?;
    let h = match mode(g)? {
        Mode::Grid(h) if g.h.is_some() => h,
        Mode::Grid(_) => 1.0 / 32.0,
        Mode::Exact => return Err(Error::Config("sweeps run on grids".into())),
    };
    let store_path = golden.map(Path::to_path_buf).unwrap_or_else(default_golden);
    let mut store = Envelopes::load(&store_path)?;
    let rows = run_sweep(&members, h, &checks)?;
    let (report, changed) = SweepReport::compare(family, h, rows, &mut store, g.update_golden);
    if changed {
        store.save(&store_path)?;
    }
    let dir = out_dir(g)?;
    write(&dir.join(format!("sweep_{family}.json")), &to_json_string(&report)?)?;
    match g.format {
        Format::Json => print!("{}", to_json_string(&report)?),
        Format::Csv => print!("{}", report.csv()?),
        Format::Table => print!("{}", report.table()),
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn default_golden() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/golden/envelopes.json"))
}

fn cmd_report(g: &Global, input: &Path) -> Result<u8> {
    let text = std::fs::read_to_string(input)?;
    if let Ok(file) = serde_json::from_str::<VerdictFile>(&text) {
        print_verdicts(g, &file)?;
        return Ok(if file.ok() { 0 } else { 1 });
    }
    let report: SweepReport = serde_json::from_str(&text)?;
    match g.format {
        Format::Json => print!("{}", to_json_string(&report)?),
        Format::Csv => print!("{}", report.csv()?),
        Format::Table => print!("{}", report.table()),
    }
    Ok(if report.ok() { 0 } else { 1 })
}
