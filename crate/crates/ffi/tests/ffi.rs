use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use mvtangent_ffi::*;

fn fixture(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { mvt_string_free(s) };
    out
}

fn last_error() -> String {
    let p = mvt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn regularity_and_regularize() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(
            mvt_complex_from_json(fixture("bad-complex.json").as_ptr(), &mut k),
            MvtStatus::Ok
        );
        assert_eq!(mvt_complex_is_regular(k), MvtStatus::NegativeVerdict);
        let mut r = ptr::null_mut();
        assert_eq!(mvt_complex_regularize(k, &mut r), MvtStatus::Ok);
        assert_eq!(mvt_complex_is_regular(r), MvtStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(mvt_complex_to_json(r, &mut json), MvtStatus::Ok);
        assert!(take(json).contains("\"1\",\n      \"1\""));
        mvt_complex_free(k);
        mvt_complex_free(r);
    }
}

#[test]
fn zmap_evaluation() {
    unsafe {
        let mut z = ptr::null_mut();
        assert_eq!(
            mvt_zmap_from_json(fixture("hat.json").as_ptr(), &mut z),
            MvtStatus::Ok
        );
        let mut out = ptr::null_mut();
        let p = CString::new(r#"["3/4"]"#).unwrap();
        assert_eq!(mvt_zmap_eval(z, p.as_ptr(), &mut out), MvtStatus::Ok);
        let v: Vec<String> = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v, vec!["1/4"]);
        let outside = CString::new(r#"["2"]"#).unwrap();
        assert_eq!(
            mvt_zmap_eval(z, outside.as_ptr(), &mut out),
            MvtStatus::Precondition
        );
        assert!(last_error().contains("outside"));
        mvt_zmap_free(z);
    }
}

#[test]
fn cusp_pipeline() {
    unsafe {
        let (mut x, mut cert, mut w) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            mvt_closed_set_from_json(fixture("cusp.json").as_ptr(), &mut x),
            MvtStatus::Ok
        );
        assert_eq!(
            mvt_certificate_from_json(fixture("cusp-cert.json").as_ptr(), &mut cert),
            MvtStatus::Ok
        );
        let mut report = ptr::null_mut();
        assert_eq!(
            mvt_check_outgoing(cert, x, 1e-6, &mut report),
            MvtStatus::Ok
        );
        assert!(take(report).contains("\"verdict\": true"));
        assert_eq!(mvt_witness_build(cert, 2, &mut w), MvtStatus::Ok);
        assert_eq!(mvt_witness_verify(w, x, ptr::null_mut()), MvtStatus::Ok);
        assert_eq!(mvt_witness_refute(w, x, 8, &mut report), MvtStatus::Ok);
        assert!(take(report).contains("\"refuted_up_to_m_max\": true"));
        let mut json = ptr::null_mut();
        assert_eq!(mvt_witness_to_json(w, &mut json), MvtStatus::Ok);
        assert!(take(json).contains("\"cert\""));
        assert_eq!(mvt_witness_build(cert, 3, &mut w), MvtStatus::InvalidInput);
        mvt_witness_free(w);
        mvt_certificate_free(cert);
        mvt_closed_set_free(x);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut k = ptr::null_mut();
        let bad = CString::new("{\"cells\": [").unwrap();
        assert_eq!(
            mvt_complex_from_json(bad.as_ptr(), &mut k),
            MvtStatus::InvalidInput
        );
        assert!(last_error().contains("line 1"));
        assert_eq!(
            mvt_complex_from_json(ptr::null(), &mut k),
            MvtStatus::NullPointer
        );
        assert_eq!(mvt_complex_is_regular(ptr::null()), MvtStatus::NullPointer);
        assert_eq!(
            mvt_check_outgoing(ptr::null(), ptr::null(), 1e-6, ptr::null_mut()),
            MvtStatus::NullPointer
        );
        mvt_string_free(ptr::null_mut());
        mvt_complex_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mvtangent.h");
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
