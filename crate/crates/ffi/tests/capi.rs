//! End-to-end drive of the C ABI: construct, parse, check, enumerate,
//! analyze, classify, and run the oracle exactly as an external binding
//! would, including error-path probing.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use beauville_ffi::*;

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { bv_string_free(ptr) };
    s
}

#[test]
fn full_workflow_over_the_c_abi() {
    // construct a maximal-class group of order 5^5 with exponent 5
    let mut text_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { bv_construct_pquotient(5, 4, &mut text_ptr) }, BvStatus::Ok);
    let text = take_string(text_ptr);

    let ctext = CString::new(text).unwrap();
    let mut pres: *mut BvPresentation = ptr::null_mut();
    assert_eq!(unsafe { bv_presentation_parse(ctext.as_ptr(), &mut pres) }, BvStatus::Ok);
    assert_eq!(unsafe { bv_check_consistency(pres) }, BvStatus::Ok);
    assert_eq!(unsafe { bv_presentation_order(pres) }, 3125);

    let mut id_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { bv_presentation_content_id(pres, &mut id_ptr) }, BvStatus::Ok);
    let id = take_string(id_ptr);
    assert_eq!(id.len(), 32);

    let mut group: *mut BvGroup = ptr::null_mut();
    assert_eq!(unsafe { bv_group_enumerate(pres, &mut group) }, BvStatus::Ok);
    assert_eq!(unsafe { bv_group_order(group) }, 3125);
    assert_eq!(unsafe { bv_group_rank(group) }, 2);

    let mut profile_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { bv_analyze_json(group, &mut profile_ptr) }, BvStatus::Ok);
    let profile = take_string(profile_ptr);
    assert!(profile.contains("\"is_maximal_class\":true"), "{profile}");

    let mut oracle_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { bv_oracle_json(group, BvOracleMode::Socle, 0, &mut oracle_ptr) },
        BvStatus::Ok
    );
    let oracle = take_string(oracle_ptr);
    assert!(oracle.contains("BeauvilleTame"), "{oracle}");

    let mut classify_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { bv_classify_json(group, &mut classify_ptr) }, BvStatus::Ok);
    let classify = take_string(classify_ptr);
    assert!(classify.contains("\"small_order_rule\":true"), "{classify}");

    unsafe { bv_group_free(group) };
    unsafe { bv_presentation_free(pres) };
}

#[test]
fn budget_exhaustion_maps_to_indeterminate() {
    let ctext = CString::new("p 5\nn 2\n").unwrap();
    let mut pres: *mut BvPresentation = ptr::null_mut();
    assert_eq!(unsafe { bv_presentation_parse(ctext.as_ptr(), &mut pres) }, BvStatus::Ok);
    let mut group: *mut BvGroup = ptr::null_mut();
    assert_eq!(unsafe { bv_group_enumerate(pres, &mut group) }, BvStatus::Ok);
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { bv_oracle_json(group, BvOracleMode::Socle, 1, &mut out) },
        BvStatus::Indeterminate
    );
    let msg = take_string(bv_last_error_message());
    assert!(msg.contains("budget"), "{msg}");
    unsafe { bv_group_free(group) };
    unsafe { bv_presentation_free(pres) };
}

#[test]
fn generated_header_tracks_the_surface() {
    let header = include_str!("../include/beauville.h");
    for symbol in [
        "bv_version",
        "bv_presentation_parse",
        "bv_presentation_free",
        "bv_check_consistency",
        "bv_group_enumerate",
        "bv_group_free",
        "bv_analyze_json",
        "bv_oracle_json",
        "bv_classify_json",
        "bv_construct_pquotient",
        "bv_construct_abelian",
        "bv_string_free",
        "bv_last_error_message",
        "BV_STATUS_INVARIANT_VIOLATION",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
