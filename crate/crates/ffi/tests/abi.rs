use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ffperiods_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ffp_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn carlitz_report_round_trip() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(ffp_carlitz_report(3, 64, 2, &mut r), FfpStatus::Ok);
        let (mut num, mut den) = (7, 7);
        assert_eq!(ffp_report_total(r, &mut num, &mut den), FfpStatus::Ok);
        assert_eq!((num, den), (0, 1));
        assert_eq!(ffp_report_status(r), FfpStatus::Ok);
        let s = ffp_report_to_json(r);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(v["magnitude_exponent"], "-3/2");
        ffp_string_free(s);
        ffp_report_free(r);
    }
}

#[test]
fn curves_and_elements() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(ffp_curve_new_p1(3, &mut c), FfpStatus::Ok);
        let (mut num, mut den) = (0, 0);
        assert_eq!(ffp_zeta_logderiv(c, &mut num, &mut den), FfpStatus::Ok);
        assert_eq!((num, den), (3, 2));
        let mut total = 9;
        let elem = CString::new("(t^2+1)/t").unwrap();
        assert_eq!(ffp_product_formula(c, elem.as_ptr(), &mut total), FfpStatus::Ok);
        assert_eq!(total, 0);
        let zero = CString::new("0").unwrap();
        assert_eq!(ffp_product_formula(c, zero.as_ptr(), &mut total), FfpStatus::InvalidInput);
        assert!(last_error().contains("zero element"));
        ffp_curve_free(c);

        let a = [0i64, 0, 0, 2, 1];
        assert_eq!(ffp_curve_new_elliptic(3, a.as_ptr(), &mut c), FfpStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(ffp_genus1_report(c, 7, 3, &mut r), FfpStatus::PrecisionInsufficient);
        assert!(r.is_null());
        assert_eq!(ffp_genus1_report(c, 64, 3, &mut r), FfpStatus::Ok);
        assert_eq!(ffp_report_status(r), FfpStatus::Ok);
        ffp_report_free(r);
        ffp_curve_free(c);
    }
}

#[test]
fn bad_arguments() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(ffp_curve_new_p1(6, &mut c), FfpStatus::InvalidInput);
        assert!(last_error().contains("q = 6"));
        assert_eq!(ffp_curve_new_p1(2, ptr::null_mut()), FfpStatus::NullPointer);
        assert_eq!(ffp_curve_count_points(ptr::null(), 1, ptr::null_mut()), FfpStatus::NullPointer);
        assert_eq!(ffp_report_status(ptr::null()), FfpStatus::NullPointer);
        assert!(ffp_report_to_json(ptr::null()).is_null());
        ffp_curve_free(ptr::null_mut());
        ffp_report_free(ptr::null_mut());
        ffp_string_free(ptr::null_mut());
        assert_eq!(ffp_curve_new_p1(2, &mut c), FfpStatus::Ok);
        assert_eq!(last_error(), "");
        ffp_curve_free(c);
    }
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/ffperiods.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert_eq!(exports.len(), 14);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct FfpCurve FfpCurve;"));
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test exe>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libffperiods_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = profile_dir.join("ffperiods_c_smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is required for this test");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(out.stdout, b"ok\n");
}
