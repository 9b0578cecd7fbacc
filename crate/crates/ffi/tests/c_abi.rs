use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use padic_siegel_ffi::*;

fn last_error() -> String {
    let p = ps_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { ps_string_free(p) };
    s
}

fn character(spec: &str) -> *mut PsCharacter {
    let spec = CString::new(spec).unwrap();
    let mut chi = ptr::null_mut();
    assert_eq!(unsafe { ps_character_parse(spec.as_ptr(), &mut chi) }, PsStatus::Ok);
    chi
}

fn config(chi: *const PsCharacter) -> PsRunConfig {
    PsRunConfig {
        p: 5,
        chi,
        sigma_index: 1,
        a: 0,
        m_max: 3,
        trunc: 2,
        prec: 10,
        allow_large: false,
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(ps_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn roots_with_short_buffer() {
    let mut roots = [0u64; 1];
    let mut len = 0usize;
    let status = unsafe { ps_cyclotomic_roots(7, roots.as_mut_ptr(), roots.len(), &mut len) };
    assert_eq!(status, PsStatus::Ok);
    assert_eq!((len, roots[0]), (2, 3));
    let status = unsafe { ps_cyclotomic_roots(9, roots.as_mut_ptr(), 1, &mut len) };
    assert_eq!(status, PsStatus::InvalidArgument);
    assert!(last_error().contains("not an odd prime"));
}

#[test]
fn errors_and_null_handles() {
    let mut chi = ptr::null_mut();
    assert_eq!(unsafe { ps_character_new(4, 1, &mut chi) }, PsStatus::InvalidArgument);
    assert!(chi.is_null());
    assert_eq!(unsafe { ps_character_new(5, 1, ptr::null_mut()) }, PsStatus::NullPointer);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ps_theorem2_run(ptr::null(), &mut report) }, PsStatus::NullPointer);
    assert_eq!(unsafe { ps_report_stage_count(ptr::null()) }, 0);
    unsafe {
        ps_report_free(ptr::null_mut());
        ps_series_free(ptr::null_mut());
        ps_character_free(ptr::null_mut());
        ps_string_free(ptr::null_mut());
    }

    let chi = character("5:1");
    let mut cfg = config(chi);
    cfg.m_max = 5;
    assert_eq!(unsafe { ps_theorem2_run(&cfg, &mut report) }, PsStatus::Precondition);
    assert!(last_error().contains("allow_large"));
    unsafe { ps_character_free(chi) };
}

#[test]
fn convergence_run_through_handles() {
    let chi = character("5:1");
    assert_eq!(unsafe { ps_character_order(chi) }, 4);
    let cfg = config(chi);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ps_theorem2_run(&cfg, &mut report) }, PsStatus::Ok);
    let mut outcome = PsOutcome::Fail;
    assert_eq!(unsafe { ps_report_outcome(report, &mut outcome) }, PsStatus::Ok);
    assert_eq!(outcome, PsOutcome::Pass);
    let n = unsafe { ps_report_stage_count(report) };
    assert_eq!(n, 3);
    let mut mins = Vec::new();
    for i in 0..n {
        let (mut v, mut capped) = (0i64, true);
        assert_eq!(unsafe { ps_report_min_valuation(report, i, &mut v, &mut capped) }, PsStatus::Ok);
        assert!(!capped);
        mins.push(v);
    }
    assert_eq!(mins, vec![2, 3, 4]);
    let (mut v, mut capped) = (0i64, false);
    assert_eq!(
        unsafe { ps_report_min_valuation(report, 7, &mut v, &mut capped) },
        PsStatus::InvalidArgument
    );
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ps_report_to_json(report, &mut json) }, PsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"pass\":true"));
    unsafe {
        ps_string_free(json);
        ps_report_free(report);
        ps_character_free(chi);
    }
}

#[test]
fn product_run_and_series_round_trip() {
    let chi = character("5:1");
    let mut inverse = ptr::null_mut();
    assert_eq!(unsafe { ps_character_inverse(chi, &mut inverse) }, PsStatus::Ok);
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ps_build_g(&config(chi), 1, &mut g) }, PsStatus::Ok);

    let mut holds = false;
    assert_eq!(unsafe { ps_unit_congruence(g, 5, 1, 10, &mut holds) }, PsStatus::Ok);
    assert!(holds);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ps_series_to_json(g, &mut json) }, PsStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { ps_series_from_json(json, &mut back) }, PsStatus::Ok);

    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { ps_theorem1_run(back, &config(chi), &mut report) },
        PsStatus::InvalidArgument
    );
    assert!(last_error().contains("character"));
    assert_eq!(unsafe { ps_theorem1_run(back, &config(inverse), &mut report) }, PsStatus::Ok);
    let mut outcome = PsOutcome::Fail;
    unsafe { ps_report_outcome(report, &mut outcome) };
    assert_eq!(outcome, PsOutcome::Pass);
    unsafe {
        ps_report_free(report);
        ps_series_free(back);
        ps_string_free(json);
        ps_series_free(g);
        ps_character_free(inverse);
        ps_character_free(chi);
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        r#"#include "padic_siegel.h"
int run(void) {
    PsCharacter *chi = NULL;
    if (ps_character_new(5, 1, &chi) != PS_STATUS_OK) return 1;
    PsRunConfig cfg = {5, chi, 1, 0, 3, 2, 10, false};
    PsReport *report = NULL;
    PsStatus s = ps_theorem2_run(&cfg, &report);
    ps_report_free(report);
    ps_character_free(chi);
    return s == PS_STATUS_OK ? 0 : 1;
}
"#,
    )
    .unwrap();
    for (compiler, extra) in [("cc", vec!["-std=c11"]), ("c++", vec!["-x", "c++", "-std=c++17"])] {
        let status = Command::new(compiler)
            .args(&extra)
            .args(["-fsyntax-only", "-Wall", "-Wextra", "-Werror", "-I"])
            .arg(&include)
            .arg(&src)
            .status()
            .unwrap_or_else(|e| panic!("{compiler} not runnable: {e}"));
        assert!(status.success(), "{compiler} rejected the header");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("padic-siegel-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
