use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use genbound_ffi::*;

fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { gb_string_free(p) };
    s
}

fn last_error() -> String {
    let p = gb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn counterexample_handle_round_trip() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { gb_setting_counterexample(2, 2, &mut h) }, GbStatus::Ok);
    let (mut z, mut n, mut w) = (0, 0, 0);
    assert_eq!(unsafe { gb_setting_sizes(h, &mut z, &mut n, &mut w) }, GbStatus::Ok);
    assert_eq!((z, n, w), (4, 2, 3));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gb_setting_to_json(h, &mut out) }, GbStatus::Ok);
    let doc = CString::new(take(out)).unwrap();
    let mut h2 = ptr::null_mut();
    assert_eq!(unsafe { gb_setting_from_json(doc.as_ptr(), &mut h2) }, GbStatus::Ok);
    let (mut gap, mut g2) = (1.0, 1.0);
    assert_eq!(unsafe { gb_gap_moments(h2, &mut gap, &mut g2) }, GbStatus::Ok);
    assert_eq!((gap, g2), (0.0, 0.0));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gb_bounds_report_json(h2, 1, 2, &mut out) }, GbStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|b| b["holds"] == true));
    unsafe {
        gb_setting_free(h);
        gb_setting_free(h2);
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { gb_setting_counterexample(2, 3, &mut h) }, GbStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { gb_setting_random(1, ptr::null_mut()) }, GbStatus::NullPointer);
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { gb_setting_from_json(bad.as_ptr(), &mut h) }, GbStatus::Parse);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { gb_setting_random(3, &mut s) }, GbStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gb_bounds_report_json(s, 0, 1, &mut out) }, GbStatus::InvalidArgument);
    assert!(out.is_null());
    unsafe { gb_setting_free(s) };
    unsafe { gb_setting_free(ptr::null_mut()) };
    unsafe { gb_string_free(ptr::null_mut()) };
}

#[test]
fn lemma_and_counterexample_json() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gb_lemma_cov_json(2, 2, 2, &mut out) }, GbStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["p_joint"], "2/3");
    assert_eq!(v["cov"], "2/9");

    assert_eq!(unsafe { gb_verify_counterexample_json(2, 2, false, 0, 0, &mut out) }, GbStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(unsafe { gb_verify_counterexample_json(3, 4, false, 0, 0, &mut out) }, GbStatus::InvalidArgument);
}

#[test]
fn header_compiles_and_links() {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let lib_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let exe = tmp.join("genbound_smoke");
    let status = Command::new("cc")
        .arg(here.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(here.join("include"))
        .arg(lib_dir.join("libgenbound_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
