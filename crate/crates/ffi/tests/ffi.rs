use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hhverify_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn parse(src: &str) -> *mut HhvExpr {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hhv_expr_parse(c(src).as_ptr(), &mut e) }, HhvStatus::Ok);
    e
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let len = unsafe { hhv_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned();
    assert_eq!(len, s.len());
    s
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { hhv_string_free(p) };
    s
}

const UNIT: HhvRect = HhvRect { a: 0.0, b: 1.0, c: 0.0, d: 1.0 };

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn expressions_round_trip_and_evaluate() {
    let e = parse("x^2 + y");
    let mut v = 0.0;
    assert_eq!(unsafe { hhv_expr_eval(e, 3.0, 1.0, &mut v) }, HhvStatus::Ok);
    assert_eq!(v, 10.0);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { hhv_expr_to_string(e, &mut text) }, HhvStatus::Ok);
    assert_eq!(take_string(text), "x^2 + y");

    let mut mean = 0.0;
    assert_eq!(unsafe { hhv_mean2d(e, UNIT, &mut mean) }, HhvStatus::Ok);
    assert!((mean - (1.0 / 3.0 + 0.5)).abs() < 1e-13);
    unsafe { hhv_expr_free(e) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hhv_expr_parse(c("x +").as_ptr(), &mut e) }, HhvStatus::Parse);
    assert!(e.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { hhv_expr_parse(ptr::null(), &mut e) }, HhvStatus::NullPointer);
    assert!(last_error().contains("source"));

    let ln = parse("ln(x)");
    let mut v = 0.0;
    assert_eq!(unsafe { hhv_expr_eval(ln, -1.0, 0.0, &mut v) }, HhvStatus::Domain);
    let flipped = HhvRect { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };
    assert_eq!(unsafe { hhv_mean2d(ln, flipped, &mut v) }, HhvStatus::InvalidArgument);
    assert_eq!(unsafe { hhv_h_eval(ln, UNIT, 2.0, 0.5, &mut v) }, HhvStatus::InvalidArgument);
    assert_eq!(unsafe { hhv_expr_eval(ln, 1.0, 0.0, ptr::null_mut()) }, HhvStatus::NullPointer);
    unsafe { hhv_expr_free(ln) };

    assert_eq!(unsafe { hhv_expr_eval(ptr::null(), 1.0, 0.0, &mut v) }, HhvStatus::NullPointer);
    let mut s = ptr::null_mut();
    let missing = c("/nonexistent/x.scenario");
    assert_eq!(unsafe { hhv_scenario_load(missing.as_ptr(), &mut s) }, HhvStatus::Io);
    assert!(s.is_null());
}

#[test]
fn last_error_truncates_and_reports_full_length() {
    let mut e = ptr::null_mut();
    unsafe { hhv_expr_parse(c("sin(").as_ptr(), &mut e) };
    let full = unsafe { hhv_last_error_message(ptr::null_mut(), 0) };
    assert!(full > 4);
    let mut buf = [0 as c_char; 4];
    assert_eq!(unsafe { hhv_last_error_message(buf.as_mut_ptr(), 4) }, full);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len(), 3);

    let ok = parse("x");
    assert_eq!(unsafe { hhv_last_error_message(ptr::null_mut(), 0) }, 0);
    unsafe { hhv_expr_free(ok) };
}

#[test]
fn chain_and_h_map_values() {
    let f = parse("x^2 + y^2");
    let mut terms = [0.0; 5];
    let mut ordered = false;
    assert_eq!(unsafe { hhv_hadamard_chain(f, UNIT, terms.as_mut_ptr(), &mut ordered) }, HhvStatus::Ok);
    assert!(ordered);
    let want = [0.5, 7.0 / 12.0, 2.0 / 3.0, 5.0 / 6.0, 1.0];
    for (got, want) in terms.iter().zip(want) {
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }
    let mut h = 0.0;
    assert_eq!(unsafe { hhv_h_eval(f, UNIT, 0.0, 0.0, &mut h) }, HhvStatus::Ok);
    assert!((h - 0.5).abs() < 1e-15);
    assert_eq!(unsafe { hhv_h_eval(f, UNIT, 1.0, 1.0, &mut h) }, HhvStatus::Ok);
    assert!((h - 2.0 / 3.0).abs() < 1e-13);
    unsafe { hhv_expr_free(f) };
}

#[test]
fn dominance_summary() {
    let f = parse("x * y");
    let g = parse("(x^2 + y^2) / 2");
    let mut summary = HhvCheckSummary { holds: false, max_margin: f64::NAN, instances: 0 };
    assert_eq!(unsafe { hhv_check_dominated_coordinates(f, g, UNIT, 1, &mut summary) }, HhvStatus::Ok);
    assert!(summary.holds);
    assert!(summary.instances > 0);

    let sum = parse("x + y");
    assert_eq!(unsafe { hhv_check_dominated_coordinates(g, sum, UNIT, 1, &mut summary) }, HhvStatus::Ok);
    assert!(!summary.holds);
    assert!(summary.max_margin < 0.0);
    for e in [f, g, sum] {
        unsafe { hhv_expr_free(e) };
    }
}

#[test]
fn scenarios_run_through_handles() {
    let path = c(workspace().join("scenarios/coordinate_not_joint.scenario").to_str().unwrap());
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hhv_scenario_load(path.as_ptr(), &mut s) }, HhvStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { hhv_scenario_run(s, &mut report) }, HhvStatus::Ok);
    let mut overall = HhvOverall::AllHold;
    assert_eq!(unsafe { hhv_report_overall(report, &mut overall) }, HhvStatus::Ok);
    assert_eq!(overall, HhvOverall::ViolationsFound);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { hhv_report_render_json(report, &mut json) }, HhvStatus::Ok);
    let golden = std::fs::read_to_string(workspace().join("crates/core/tests/golden/coordinate_not_joint.json")).unwrap();
    assert_eq!(take_string(json), golden);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { hhv_report_render_text(report, &mut text) }, HhvStatus::Ok);
    assert!(take_string(text).contains("OVERALL: violations found in 1 check(s)"));
    unsafe {
        hhv_report_free(report);
        hhv_scenario_free(s);
    }

    let src = c("[domain]\na = 0\nb = 1\nc = 0\nd = 1\n[functions]\nf = x^2\n[checks]\nhadamard.chain\n");
    assert_eq!(unsafe { hhv_scenario_parse(src.as_ptr(), c("inline").as_ptr(), &mut s) }, HhvStatus::Ok);
    assert_eq!(unsafe { hhv_scenario_run(s, &mut report) }, HhvStatus::Ok);
    assert_eq!(unsafe { hhv_report_overall(report, &mut overall) }, HhvStatus::Ok);
    assert_eq!(overall, HhvOverall::AllHold);
    unsafe {
        hhv_report_free(report);
        hhv_scenario_free(s);
    }

    let bad = c("[domain]\na = 1\nb = 0\n");
    assert_eq!(unsafe { hhv_scenario_parse(bad.as_ptr(), c("bad").as_ptr(), &mut s) }, HhvStatus::InvalidArgument);
    assert!(s.is_null());
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        hhv_expr_free(ptr::null_mut());
        hhv_scenario_free(ptr::null_mut());
        hhv_report_free(ptr::null_mut());
        hhv_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(hhv_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hhverify.h")
}

#[test]
fn header_declares_every_entry_point() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "hhv_expr_parse",
        "hhv_expr_eval",
        "hhv_expr_to_string",
        "hhv_expr_free",
        "hhv_mean2d",
        "hhv_hadamard_chain",
        "hhv_h_eval",
        "hhv_check_dominated_coordinates",
        "hhv_scenario_load",
        "hhv_scenario_parse",
        "hhv_scenario_run",
        "hhv_scenario_free",
        "hhv_report_overall",
        "hhv_report_render_json",
        "hhv_report_render_text",
        "hhv_report_free",
        "hhv_string_free",
        "hhv_last_error_message",
        "hhv_version",
        "HHV_STATUS_DEGENERATE_WEIGHT",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "hhverify.h"

int main(int argc, char **argv) {
    HhvExpr *f = NULL;
    if (hhv_expr_parse("x^2 + y^2", &f) != HHV_STATUS_OK) return 10;
    HhvRect r = {0.0, 1.0, 0.0, 1.0};
    double terms[5];
    bool ordered = false;
    if (hhv_hadamard_chain(f, r, terms, &ordered) != HHV_STATUS_OK || !ordered) return 11;
    printf("%.6f %.6f\n", terms[0], terms[2]);
    hhv_expr_free(f);

    HhvExpr *bad = NULL;
    if (hhv_expr_parse("(", &bad) != HHV_STATUS_PARSE || bad != NULL) return 12;
    char msg[128];
    if (hhv_last_error_message(msg, sizeof msg) == 0) return 13;

    HhvScenario *s = NULL;
    if (hhv_scenario_load(argv[1], &s) != HHV_STATUS_OK) return 14;
    HhvReport *rep = NULL;
    if (hhv_scenario_run(s, &rep) != HHV_STATUS_OK) return 15;
    HhvOverall overall;
    hhv_report_overall(rep, &overall);
    char *text = NULL;
    hhv_report_render_text(rep, &text);
    printf("%d %s\n", (int)overall, strstr(text, "OVERALL") ? "ok" : "missing");
    hhv_string_free(text);
    hhv_report_free(rep);
    hhv_scenario_free(s);
    return argc == 2 ? 0 : 16;
}
"#;

fn c_compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libhhverify_ffi.a");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();

    let syntax = Command::new(&cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"]).arg(&include).arg(&src).output().unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    if !lib.exists() {
        eprintln!("{} not built; skipping link step", lib.display());
        return;
    }
    let exe = dir.path().join("main");
    let link = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));

    let scenario = workspace().join("scenarios/hadamard_squares.scenario");
    let run = Command::new(&exe).arg(&scenario).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let out = String::from_utf8(run.stdout).unwrap();
    assert_eq!(out, "0.500000 0.666667\n0 ok\n");
}
