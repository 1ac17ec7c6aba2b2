use std::ffi::{CStr, CString};
use std::ptr;

use gefp_lab_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { gefp_string_free(s) };
    out
}

fn last_error() -> String {
    let p = gefp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn exact(delta: &str, t: &str) -> *mut GefpModel {
    let (d, t) = (CString::new(delta).unwrap(), CString::new(t).unwrap());
    let mut m = ptr::null_mut();
    let st = unsafe { gefp_model_new_exact(d.as_ptr(), t.as_ptr(), false, &mut m) };
    assert_eq!(st, GefpStatus::Ok);
    m
}

#[test]
fn exact_gefp_and_engine_agreement() {
    let m = exact("1/2", "1");
    let r = [2usize, 3];
    let mut out = ptr::null_mut();
    let mut approx = 0.0;
    let st = unsafe { gefp_model_gefp(m, 3, r.as_ptr(), 2, ptr::null(), &mut out, &mut approx) };
    assert_eq!(st, GefpStatus::Ok);
    let residue = take(out);
    let oracle_name = CString::new("oracle").unwrap();
    let st = unsafe { gefp_model_gefp(m, 3, r.as_ptr(), 2, oracle_name.as_ptr(), &mut out, ptr::null_mut()) };
    assert_eq!(st, GefpStatus::Ok);
    assert_eq!(residue, take(out));
    assert_eq!(residue, "5/7");
    assert!((approx - 5.0 / 7.0).abs() < 1e-15);
    assert!(gefp_last_error().is_null());
    unsafe { gefp_model_free(m) };
}

#[test]
fn partition_and_boundary() {
    let m = exact("1/2", "1");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gefp_model_partition(m, 4, false, &mut out, ptr::null_mut()) }, GefpStatus::Ok);
    assert_eq!(take(out), "42/1");
    assert_eq!(
        unsafe { gefp_model_partition(m, 3, false, &mut out, ptr::null_mut()) },
        GefpStatus::Unsupported
    );
    assert!(last_error().starts_with("Unsupported"));
    assert_eq!(unsafe { gefp_model_partition(m, 3, true, &mut out, ptr::null_mut()) }, GefpStatus::Ok);
    assert_eq!(take(out), "7/1");
    assert_eq!(unsafe { gefp_model_boundary_h(m, 3, 2, &mut out, ptr::null_mut()) }, GefpStatus::Ok);
    assert_eq!(take(out), "3/7");
    assert_eq!(unsafe { gefp_model_boundary_h(m, 3, 4, &mut out, ptr::null_mut()) }, GefpStatus::BadIndex);
    unsafe { gefp_model_free(m) };
}

#[test]
fn float_model_matches_exact() {
    let (x, y) = (CString::new("1/3").unwrap(), CString::new("3/4").unwrap());
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { gefp_model_new_float(x.as_ptr(), y.as_ptr(), false, 128, false, &mut m) },
        GefpStatus::Ok
    );
    let e = exact("1/3", "3/4");
    let r = [1usize, 3, 4];
    let jets = CString::new("jets").unwrap();
    let (mut a, mut b) = (0.0, 0.0);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gefp_model_gefp(m, 4, r.as_ptr(), 3, jets.as_ptr(), &mut out, &mut a) }, GefpStatus::Ok);
    take(out);
    assert_eq!(unsafe { gefp_model_gefp(e, 4, r.as_ptr(), 3, ptr::null(), &mut out, &mut b) }, GefpStatus::Ok);
    take(out);
    assert!((a - b).abs() < 1e-14 * b.abs(), "{a} vs {b}");
    unsafe {
        gefp_model_free(m);
        gefp_model_free(e);
    }
}

#[test]
fn errors_are_reported() {
    let m = exact("1/2", "1");
    let r = [3usize, 1];
    let mut out = ptr::null_mut();
    let st = unsafe { gefp_model_gefp(m, 3, r.as_ptr(), 2, ptr::null(), &mut out, ptr::null_mut()) };
    assert_eq!(st, GefpStatus::InvalidProfile);
    assert!(last_error().contains("r_1 <= r_2 <= ... <= r_s"));
    assert!(out.is_null());
    let st = unsafe { gefp_model_gefp(ptr::null_mut(), 3, r.as_ptr(), 2, ptr::null(), &mut out, ptr::null_mut()) };
    assert_eq!(st, GefpStatus::NullPointer);
    let bogus = CString::new("nope").unwrap();
    let st = unsafe { gefp_model_gefp(m, 3, ptr::null(), 0, bogus.as_ptr(), &mut out, ptr::null_mut()) };
    assert_eq!(st, GefpStatus::Unsupported);
    unsafe { gefp_model_free(m) };

    let (d, t) = (CString::new("0.5").unwrap(), CString::new("1").unwrap());
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gefp_model_new_exact(d.as_ptr(), t.as_ptr(), false, &mut m) }, GefpStatus::Parse);
    let (d, t) = (CString::new("3/2").unwrap(), CString::new("1/2").unwrap());
    assert_eq!(
        unsafe { gefp_model_new_exact(d.as_ptr(), t.as_ptr(), false, &mut m) },
        GefpStatus::NonphysicalWeights
    );
    assert!(m.is_null());
    unsafe { gefp_model_free(ptr::null_mut()) };
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(gefp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gefp_lab.h")).unwrap();
    for name in [
        "gefp_model_new_exact",
        "gefp_model_new_float",
        "gefp_model_gefp",
        "gefp_model_partition",
        "gefp_model_boundary_h",
        "gefp_last_error",
        "gefp_string_free",
        "gefp_version",
        "typedef struct GefpModel GefpModel",
        "GEFP_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
