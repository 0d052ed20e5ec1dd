use std::ffi::{CStr, CString};
use std::ptr;

use expansive_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { exp_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(exp_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn build_rank_and_companions() {
    let fam = CString::new("winding-x2").unwrap();
    let params = CString::new(r#"{"n": 2}"#).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { exp_system_build(fam.as_ptr(), params.as_ptr(), &mut sys) }, ExpStatus::Ok);
    assert!(!sys.is_null());

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { exp_system_rank(sys, &mut s) }, ExpStatus::Ok);
    assert_eq!(take(s), "2");

    assert_eq!(unsafe { exp_system_params(sys, &mut s) }, ExpStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["family"], "winding-x2");
    assert_eq!(v["params"]["n"], 2);

    let bounds = ExpBounds { lo: -12, hi: 12, depth: 3, samples: 0 };
    let delta = CString::new("1/8").unwrap();
    let point = CString::new("x[2,1,3]").unwrap();
    let mut count = 0usize;
    let st = unsafe { exp_companions(sys, &bounds, 80, delta.as_ptr(), point.as_ptr(), true, &mut count, &mut s) };
    assert_eq!(st, ExpStatus::Ok, "{}", last_error());
    let r: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(count, r["members"].as_array().unwrap().len());
    assert!(count >= 1);

    unsafe { exp_system_free(sys) };
}

#[test]
fn errors_are_reported() {
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { exp_system_build(ptr::null(), ptr::null(), &mut sys) }, ExpStatus::NullPointer);
    assert!(last_error().contains("family"));

    let fam = CString::new("mystery").unwrap();
    assert_eq!(unsafe { exp_system_build(fam.as_ptr(), ptr::null(), &mut sys) }, ExpStatus::InvalidArgument);
    assert!(last_error().contains("mystery"));

    let fam = CString::new("denjoy").unwrap();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { exp_system_build(fam.as_ptr(), bad.as_ptr(), &mut sys) }, ExpStatus::Parse);

    let invalid = [0xffu8, 0];
    assert_eq!(unsafe { exp_system_build(invalid.as_ptr().cast(), ptr::null(), &mut sys) }, ExpStatus::InvalidUtf8);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { exp_system_rank(ptr::null(), &mut s) }, ExpStatus::NullPointer);

    let harmonic = CString::new("harmonic").unwrap();
    assert_eq!(unsafe { exp_system_build(harmonic.as_ptr(), ptr::null(), &mut sys) }, ExpStatus::Ok);
    assert_eq!(last_error(), "");
    let bounds = ExpBounds { lo: 1, hi: 15, depth: 0, samples: 0 };
    let delta = CString::new("1/8").unwrap();
    let nowhere = CString::new("h[1/99]").unwrap();
    let st =
        unsafe { exp_companions(sys, &bounds, 4, delta.as_ptr(), nowhere.as_ptr(), true, ptr::null_mut(), &mut s) };
    assert_ne!(st, ExpStatus::Ok);
    assert!(!last_error().is_empty());
    unsafe {
        exp_system_free(sys);
        exp_system_free(ptr::null_mut());
        exp_string_free(ptr::null_mut());
    }
}

#[test]
fn claims_through_the_abi() {
    let name = CString::new("cor4.5").unwrap();
    let (mut ok, mut s) = (false, ptr::null_mut());
    assert_eq!(unsafe { exp_verify_claim(name.as_ptr(), 0, &mut ok, &mut s) }, ExpStatus::Ok);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["claim"], "cor4.5");
    let unknown = CString::new("lemma9").unwrap();
    assert_eq!(unsafe { exp_verify_claim(unknown.as_ptr(), 0, &mut ok, &mut s) }, ExpStatus::InvalidArgument);
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/expansive.h")).unwrap();
    for sym in [
        "exp_system_build",
        "exp_system_free",
        "exp_system_rank",
        "exp_system_params",
        "exp_companions",
        "exp_verify_claim",
        "exp_string_free",
        "exp_last_error",
        "typedef struct ExpSystem ExpSystem",
        "EXP_STATUS_PANIC = 6",
    ] {
        assert!(h.contains(sym), "missing {sym}");
    }
}
