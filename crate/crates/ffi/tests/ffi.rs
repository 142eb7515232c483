use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dirichlet_spectra_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ds_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn preset(expr: &str) -> *mut DsDomain {
    let mut dom = ptr::null_mut();
    assert_eq!(unsafe { ds_domain_preset(c(expr).as_ptr(), &mut dom) }, DsStatus::Ok);
    dom
}

fn solve(dom: *const DsDomain, h: f64, count: usize, tmax: f64) -> *mut DsEigen {
    let mut eig = ptr::null_mut();
    let st = unsafe { ds_solve(dom, h, count, tmax, &mut eig) };
    assert_eq!(st, DsStatus::Ok, "{}", last_error());
    eig
}

#[test]
fn exact_interval_round_trip() {
    let dom = preset("interval_union(1)");
    let eig = solve(dom, 0.0, 5, 0.0);
    unsafe {
        assert_eq!(ds_eigen_len(eig), 5);
        let mut vals = [0.0; 8];
        assert_eq!(ds_eigen_values(eig, vals.as_mut_ptr(), vals.len()), 5);
        for (k, v) in vals[..5].iter().enumerate() {
            let want = ((k + 1) as f64 * std::f64::consts::PI).powi(2);
            assert!((v - want).abs() < 1e-9 * want);
        }
        let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0);
        assert_eq!(ds_eigen_norms(eig, 0, &mut l1, &mut l2, &mut linf), DsStatus::Ok);
        assert!((l2 - 1.0).abs() < 1e-12);
        assert!((linf - 2f64.sqrt()).abs() < 1e-12);
        assert!((l1 - 2.0 * 2f64.sqrt() / std::f64::consts::PI).abs() < 1e-12);

        let mut count = 0usize;
        assert_eq!(ds_counting(eig, 40.0, &mut count), DsStatus::Ok);
        assert_eq!(count, 2);
        ds_eigen_free(eig);
        ds_domain_free(dom);
    }
}

#[test]
fn heat_values_on_interval() {
    let dom = preset("interval_union(1)");
    let eig = solve(dom, 0.0, 0, 3000.0);
    unsafe {
        let (mut z, mut zt, mut q, mut qt) = (0.0, 0.0, 0.0, 0.0);
        assert_eq!(ds_heat_trace(eig, 0.1, &mut z, &mut zt), DsStatus::Ok, "{}", last_error());
        assert_eq!(ds_heat_content(eig, 0.1, &mut q, &mut qt), DsStatus::Ok, "{}", last_error());
        assert!((z - 0.392_143_06).abs() < 1e-6);
        assert!((q - 0.302_118_09).abs() < 1e-6);
        assert!(zt >= 0.0 && qt >= 0.0);
        ds_eigen_free(eig);
        ds_domain_free(dom);
    }
}

#[test]
fn grid_solve_from_text() {
    let mut dom = ptr::null_mut();
    unsafe {
        assert_eq!(ds_domain_parse(c("dim=2\nrect 0 0 1 1\n").as_ptr(), &mut dom), DsStatus::Ok);
    }
    let eig = solve(dom, 1.0 / 16.0, 3, 0.0);
    unsafe {
        let mut v = [0.0; 3];
        ds_eigen_values(eig, v.as_mut_ptr(), 3);
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((v[0] - exact).abs() / exact < 0.01);
        assert!((v[1] - v[2]).abs() < 1e-8 * v[1]);
        ds_eigen_free(eig);
        ds_domain_free(dom);
    }
}

#[test]
fn verify_returns_json() {
    let dom = preset("interval_union(1)");
    let eig = solve(dom, 0.0, 10, 0.0);
    unsafe {
        let mut json = ptr::null_mut();
        let st = ds_verify(eig, c("thm212,remark213").as_ptr(), &mut json);
        assert_eq!(st, DsStatus::Ok, "{}", last_error());
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ds_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["summary"]["failed"], 0);
        assert!(v["summary"]["passed"].as_u64().unwrap() > 0);

        let st = ds_verify(eig, c("nope").as_ptr(), &mut json);
        assert_eq!(st, DsStatus::InvalidArgument);
        assert!(last_error().contains("nope"));
        ds_eigen_free(eig);
        ds_domain_free(dom);
    }
}

#[test]
fn errors_and_null_handles() {
    unsafe {
        let mut dom = ptr::null_mut();
        assert_eq!(ds_domain_parse(c("dim=3").as_ptr(), &mut dom), DsStatus::Parse);
        assert!(dom.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(ds_domain_preset(c("no_such_preset(1)").as_ptr(), &mut dom), DsStatus::Parse);
        assert_eq!(ds_domain_parse(ptr::null(), &mut dom), DsStatus::InvalidArgument);

        let mut eig = ptr::null_mut();
        assert_eq!(ds_solve(ptr::null(), 0.1, 1, 0.0, &mut eig), DsStatus::InvalidArgument);
        assert_eq!(ds_eigen_len(ptr::null()), 0);
        let mut n = 0usize;
        assert_eq!(ds_counting(ptr::null(), 1.0, &mut n), DsStatus::InvalidArgument);
        ds_eigen_free(ptr::null_mut());
        ds_domain_free(ptr::null_mut());
        ds_string_free(ptr::null_mut());

        let dom = preset("interval_union(1)");
        let mut ok = ptr::null_mut();
        assert_eq!(ds_domain_parse(c("dim=1\ninterval 0 1").as_ptr(), &mut ok), DsStatus::Ok);
        assert!(ds_last_error().is_null());
        ds_domain_free(ok);
        let eig = solve(dom, 0.0, 2, 0.0);
        let (mut a, mut b, mut cc) = (0.0, 0.0, 0.0);
        assert_eq!(ds_eigen_norms(eig, 7, &mut a, &mut b, &mut cc), DsStatus::InvalidArgument);
        ds_eigen_free(eig);
        ds_domain_free(dom);
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(ds_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_exports() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/dirichlet_spectra.h")).unwrap();
    for name in [
        "ds_domain_parse", "ds_domain_preset", "ds_domain_free", "ds_solve", "ds_eigen_free",
        "ds_eigen_len", "ds_eigen_values", "ds_eigen_norms", "ds_counting", "ds_heat_trace",
        "ds_heat_content", "ds_verify", "ds_string_free", "ds_last_error", "ds_version",
        "DS_STATUS_CHECK_FAILED", "typedef struct DsDomain DsDomain",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

// Compiles and runs a C program against the shared library.
#[test]
fn c_program_links() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    if !lib_dir.join("libdirichlet_spectra_ffi.so").exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no cc or no shared library in {}", lib_dir.display());
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("c_smoke");
    let status = Command::new("cc")
        .arg(root.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-ldirichlet_spectra_ffi", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("9.869604401089"), "{stdout}");
}
