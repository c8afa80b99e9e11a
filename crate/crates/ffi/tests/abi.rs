use std::ffi::{CStr, CString};
use std::ptr;

use gptforge_ffi::*;

fn recipe(text: &str) -> *mut GfSystem {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gf_system_from_recipe(c.as_ptr(), &mut out) },
        GfStatus::GF_OK
    );
    assert!(!out.is_null());
    out
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { gf_string_free(p) };
    s
}

fn flag(
    f: unsafe extern "C" fn(*const GfSystem, *mut bool) -> GfStatus,
    sys: *const GfSystem,
) -> bool {
    let mut out = false;
    assert_eq!(unsafe { f(sys, &mut out) }, GfStatus::GF_OK);
    out
}

#[test]
fn restricted_trit_verdicts() {
    let rt = recipe("rtrit");
    unsafe {
        assert_eq!(gf_system_dim(rt), 3);
        assert_eq!(gf_system_state_count(rt), 3);
    }
    assert!(flag(gf_validate, rt));
    assert!(!flag(gf_is_unrestricted, rt));
    assert!(!flag(gf_is_classical_theory, rt));
    assert!(!flag(gf_exists_distinguishable_pair, rt));

    let mut done = ptr::null_mut();
    assert_eq!(unsafe { gf_complete(rt, &mut done) }, GfStatus::GF_OK);
    assert!(flag(gf_is_classical_theory, done));
    unsafe {
        gf_system_free(done);
        gf_system_free(rt);
    }
}

#[test]
fn distinguish_and_mid_on_square_bit() {
    let sq = recipe("sqbit");
    let idx = [0usize, 1];
    let mut yes = false;
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { gf_distinguish(sq, idx.as_ptr(), 2, &mut yes, &mut m) },
        GfStatus::GF_OK
    );
    assert!(yes);
    assert_eq!(take_string(m), r#"[["0","1/2","1/2"],["0","-1/2","1/2"]]"#);

    let mut matrix = ptr::null_mut();
    assert_eq!(
        unsafe { gf_mid(sq, idx.as_ptr(), 2, &mut matrix) },
        GfStatus::GF_OK
    );
    assert_eq!(
        take_string(matrix),
        r#"[["0","0","-1"],["0","1","0"],["0","0","1"]]"#
    );
    unsafe { gf_system_free(sq) };
}

#[test]
fn mid_refuses_non_maximal_sets() {
    let trit = recipe("trit");
    let idx = [0usize, 1];
    let mut matrix = ptr::null_mut();
    let status = unsafe { gf_mid(trit, idx.as_ptr(), 2, &mut matrix) };
    assert_eq!(status, GfStatus::GF_DOMAIN_ERROR);
    let msg = unsafe { CStr::from_ptr(gf_last_error()) }.to_str().unwrap();
    assert!(msg.contains("not maximal"), "{msg}");
    unsafe { gf_system_free(trit) };
}

#[test]
fn json_round_trip_and_compose() {
    let bit = recipe("bit");
    let sq = recipe("sqbit");
    let mut both = ptr::null_mut();
    assert_eq!(unsafe { gf_compose(sq, bit, &mut both) }, GfStatus::GF_OK);
    assert_eq!(unsafe { gf_system_state_count(both) }, 8);

    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { gf_system_to_json(both, &mut text) },
        GfStatus::GF_OK
    );
    let json = take_string(text);
    assert!(json.contains(r#""recipe":"sqbit x classical:2""#), "{json}");

    let c = CString::new(json.clone()).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(
        unsafe { gf_system_from_json(c.as_ptr(), &mut again) },
        GfStatus::GF_OK
    );
    let mut text2 = ptr::null_mut();
    assert_eq!(
        unsafe { gf_system_to_json(again, &mut text2) },
        GfStatus::GF_OK
    );
    assert_eq!(take_string(text2), json);
    unsafe {
        gf_system_free(again);
        gf_system_free(both);
        gf_system_free(sq);
        gf_system_free(bit);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("qubit").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gf_system_from_recipe(bad.as_ptr(), &mut out) },
        GfStatus::GF_PARSE_ERROR
    );
    assert!(out.is_null());
    assert!(!gf_last_error().is_null());

    let malformed = CString::new(r#"{"dim":1,"unit":["3/0"]}"#).unwrap();
    assert_eq!(
        unsafe { gf_system_from_json(malformed.as_ptr(), &mut out) },
        GfStatus::GF_PARSE_ERROR
    );

    let mut flag_out = false;
    assert_eq!(
        unsafe { gf_validate(ptr::null(), &mut flag_out) },
        GfStatus::GF_INVALID_ARGUMENT
    );
    assert_eq!(unsafe { gf_system_dim(ptr::null()) }, 0);
    unsafe {
        gf_system_free(ptr::null_mut());
        gf_string_free(ptr::null_mut());
    }

    let sys = recipe("bit");
    let idx = [0usize, 5];
    let mut yes = false;
    assert_eq!(
        unsafe { gf_distinguish(sys, idx.as_ptr(), 2, &mut yes, ptr::null_mut()) },
        GfStatus::GF_DOMAIN_ERROR
    );
    let one = [0usize];
    assert_eq!(
        unsafe { gf_distinguish(sys, one.as_ptr(), 1, &mut yes, ptr::null_mut()) },
        GfStatus::GF_DOMAIN_ERROR
    );
    // a successful call clears the previous error
    assert!(flag(gf_validate, sys));
    assert!(gf_last_error().is_null());
    unsafe { gf_system_free(sys) };
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(gf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
