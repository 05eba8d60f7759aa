//! C ABI over beauville-core.
//!
//! Handles are opaque pointers created and destroyed by this library;
//! every function returns a [`BvStatus`], writes results through out
//! parameters, and stores a human-readable message retrievable with
//! [`bv_last_error_message`] on failure. Strings returned through out
//! parameters are heap-allocated and must be released with
//! [`bv_string_free`]. Structured results (profiles, oracle reports) are
//! returned as JSON documents.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use beauville_core::beauville::{
    beauville_oracle, classify_fast, tame_wild, BeauvilleError, Decision, OracleConfig, OracleMode,
};
use beauville_core::group::{enumerate, ConcreteGroup};
use beauville_core::maxclass::{maximal_class_profile, BranchVerify, MaxClassOutcome};
use beauville_core::pc::{parse_presentation, Consistency, PcPresentation};

/// Status codes shared by every entry point. The numeric values mirror
/// the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BvStatus {
    /// Completed; out parameters are valid.
    Ok = 0,
    /// Malformed input (parse error, bad arguments).
    InputError = 2,
    /// A search budget or order cap was exceeded; no verdict.
    Indeterminate = 3,
    /// A consistency or invariant violation was detected.
    InvariantViolation = 4,
    /// A required pointer argument was null.
    NullArgument = 5,
    /// Unexpected internal failure; see bv_last_error_message.
    InternalError = 6,
}

/// Opaque parsed presentation.
pub struct BvPresentation {
    inner: PcPresentation,
}

/// Opaque enumerated group.
pub struct BvGroup {
    inner: ConcreteGroup,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(msg).unwrap_or_default());
    });
}

fn string_out(s: String, out: *mut *mut c_char) -> BvStatus {
    let cleaned = s.replace('\0', " ");
    match CString::new(cleaned) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            BvStatus::Ok
        }
        Err(_) => {
            set_error("string contained interior nul");
            BvStatus::InternalError
        }
    }
}

fn guard<F: FnOnce() -> BvStatus>(f: F) -> BvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in beauville-ffi".to_string());
            set_error(msg);
            BvStatus::InternalError
        }
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn bv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Last error message for this thread, or null if none. Free with
/// bv_string_free.
#[no_mangle]
pub extern "C" fn bv_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a beauville-ffi function and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn bv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse a presentation from UTF-8 text.
///
/// # Safety
/// `text` must be a valid nul-terminated C string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_parse(
    text: *const c_char,
    out: *mut *mut BvPresentation,
) -> BvStatus {
    if text.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| {
        let raw = unsafe { CStr::from_ptr(text) };
        let Ok(text) = raw.to_str() else {
            set_error("presentation text is not valid UTF-8");
            return BvStatus::InputError;
        };
        match parse_presentation(text) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(BvPresentation { inner })) };
                BvStatus::Ok
            }
            Err(e) => {
                set_error(format!("{e}"));
                BvStatus::InputError
            }
        }
    })
}

/// # Safety
/// `p` must be a live handle from bv_presentation_parse (or null).
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_free(p: *mut BvPresentation) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// # Safety
/// `p` must be a live presentation handle.
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_order(p: *const BvPresentation) -> u64 {
    if p.is_null() {
        return 0;
    }
    unsafe { &*p }.inner.order()
}

/// # Safety
/// `p` must be a live presentation handle.
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_prime(p: *const BvPresentation) -> u32 {
    if p.is_null() {
        return 0;
    }
    unsafe { &*p }.inner.prime()
}

/// # Safety
/// `p` must be a live presentation handle.
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_length(p: *const BvPresentation) -> u32 {
    if p.is_null() {
        return 0;
    }
    unsafe { &*p }.inner.length() as u32
}

/// Canonical text form of the presentation.
///
/// # Safety
/// `p` must be a live presentation handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_canonical_text(
    p: *const BvPresentation,
    out: *mut *mut c_char,
) -> BvStatus {
    if p.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| string_out(unsafe { &*p }.inner.canonical_text(), out))
}

/// Content hash of the canonical presentation text.
///
/// # Safety
/// `p` must be a live presentation handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_presentation_content_id(
    p: *const BvPresentation,
    out: *mut *mut c_char,
) -> BvStatus {
    if p.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| string_out(unsafe { &*p }.inner.content_id(), out))
}

/// Run the consistency certificate. Returns BV_OK when the presentation
/// defines a group of exactly p^n elements, BV_INVARIANT_VIOLATION with a
/// witness message otherwise.
///
/// # Safety
/// `p` must be a live presentation handle.
#[no_mangle]
pub unsafe extern "C" fn bv_check_consistency(p: *const BvPresentation) -> BvStatus {
    if p.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| match unsafe { &*p }.inner.check_consistency() {
        Ok(Consistency::Ok { .. }) => BvStatus::Ok,
        Ok(Consistency::Violation(v)) => {
            set_error(format!("{v}"));
            BvStatus::InvariantViolation
        }
        Err(e) => {
            set_error(format!("{e}"));
            BvStatus::InputError
        }
    })
}

/// Enumerate a consistent presentation into a group handle.
///
/// # Safety
/// `p` must be a live presentation handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_group_enumerate(
    p: *const BvPresentation,
    out: *mut *mut BvGroup,
) -> BvStatus {
    if p.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| match enumerate(&unsafe { &*p }.inner) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(BvGroup { inner })) };
            BvStatus::Ok
        }
        Err(e) => {
            set_error(format!("{e}"));
            BvStatus::InvariantViolation
        }
    })
}

/// # Safety
/// `g` must be a live handle from bv_group_enumerate (or null).
#[no_mangle]
pub unsafe extern "C" fn bv_group_free(g: *mut BvGroup) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be a live group handle.
#[no_mangle]
pub unsafe extern "C" fn bv_group_order(g: *const BvGroup) -> u64 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.order()
}

/// Minimal number of generators d(G).
///
/// # Safety
/// `g` must be a live group handle.
#[no_mangle]
pub unsafe extern "C" fn bv_group_rank(g: *const BvGroup) -> u32 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.rank()
}

/// Maximal-class profile (or a not-maximal-class marker) as JSON.
///
/// # Safety
/// `g` must be a live group handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_analyze_json(g: *const BvGroup, out: *mut *mut c_char) -> BvStatus {
    if g.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| {
        let group = &unsafe { &*g }.inner;
        match maximal_class_profile(group, BranchVerify::Auto) {
            Ok(MaxClassOutcome::Profile(profile)) => {
                let summary = profile.summary(true);
                match serde_json::to_string(&summary) {
                    Ok(json) => string_out(json, out),
                    Err(e) => {
                        set_error(format!("{e}"));
                        BvStatus::InternalError
                    }
                }
            }
            Ok(MaxClassOutcome::NotMaximalClass { n, class }) => {
                let json = serde_json::json!({
                    "is_maximal_class": false,
                    "n": n,
                    "class": class,
                    "order": group.order(),
                    "d": group.rank(),
                });
                string_out(json.to_string(), out)
            }
            Err(e) => {
                set_error(format!("{e}"));
                BvStatus::InternalError
            }
        }
    })
}

/// Oracle mode selector for [`bv_oracle_json`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum BvOracleMode {
    Naive = 0,
    Socle = 1,
}

/// Decide the Beauville property by definition and refine tame/wild. The
/// report is returned as JSON; `budget_pairs` = 0 means unlimited.
///
/// # Safety
/// `g` must be a live group handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_oracle_json(
    g: *const BvGroup,
    mode: BvOracleMode,
    budget_pairs: u64,
    out: *mut *mut c_char,
) -> BvStatus {
    if g.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| {
        let group = &unsafe { &*g }.inner;
        let config = OracleConfig {
            mode: match mode {
                BvOracleMode::Naive => OracleMode::Naive,
                BvOracleMode::Socle => OracleMode::Socle,
            },
            budget_pairs: if budget_pairs == 0 { u64::MAX } else { budget_pairs },
            workers: beauville_core::beauville::default_workers(),
        };
        let refined = beauville_oracle(group, &config).and_then(|r| {
            if r.decision == Decision::Beauville {
                tame_wild(group, &r)
            } else {
                Ok(r)
            }
        });
        match refined {
            Ok(report) => match serde_json::to_string(&report) {
                Ok(json) => string_out(json, out),
                Err(e) => {
                    set_error(format!("{e}"));
                    BvStatus::InternalError
                }
            },
            Err(BeauvilleError::Indeterminate { reason, .. }) => {
                set_error(reason);
                BvStatus::Indeterminate
            }
            Err(e) => {
                set_error(format!("{e}"));
                BvStatus::InputError
            }
        }
    })
}

/// Fast classifier for maximal-class groups; both readings reported as
/// JSON.
///
/// # Safety
/// `g` must be a live group handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_classify_json(g: *const BvGroup, out: *mut *mut c_char) -> BvStatus {
    if g.is_null() || out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| {
        let group = &unsafe { &*g }.inner;
        let profile = match maximal_class_profile(group, BranchVerify::Auto) {
            Ok(MaxClassOutcome::Profile(p)) => p,
            Ok(MaxClassOutcome::NotMaximalClass { n, class }) => {
                set_error(format!("not maximal class: class {class} at n = {n}"));
                return BvStatus::InputError;
            }
            Err(e) => {
                set_error(format!("{e}"));
                return BvStatus::InternalError;
            }
        };
        match classify_fast(group, &profile) {
            Ok(fast) => match serde_json::to_string(&fast) {
                Ok(json) => string_out(json, out),
                Err(e) => {
                    set_error(format!("{e}"));
                    BvStatus::InternalError
                }
            },
            Err(e) => {
                set_error(format!("{e}"));
                BvStatus::InputError
            }
        }
    })
}

/// Presentation text for a quotient of the pro-p group of maximal class.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_construct_pquotient(
    p: u32,
    m: u32,
    out: *mut *mut c_char,
) -> BvStatus {
    if out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| match beauville_core::forge::construct_pquotient(p, m) {
        Ok(q) => string_out(q.presentation.canonical_text(), out),
        Err(e) => {
            set_error(format!("{e}"));
            BvStatus::InputError
        }
    })
}

/// Presentation text for C_{n1} x C_{n2} over a common prime.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bv_construct_abelian(
    n1: u64,
    n2: u64,
    out: *mut *mut c_char,
) -> BvStatus {
    if out.is_null() {
        return BvStatus::NullArgument;
    }
    guard(|| match beauville_core::forge::construct_abelian(n1, n2) {
        Ok(pres) => string_out(pres.canonical_text(), out),
        Err(e) => {
            set_error(format!("{e}"));
            BvStatus::InputError
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
        unsafe { bv_string_free(ptr) };
        s
    }

    #[test]
    fn parse_check_enumerate_oracle() {
        let text = cstr("p 5\nn 2\n");
        let mut pres: *mut BvPresentation = ptr::null_mut();
        assert_eq!(unsafe { bv_presentation_parse(text.as_ptr(), &mut pres) }, BvStatus::Ok);
        assert_eq!(unsafe { bv_presentation_order(pres) }, 25);
        assert_eq!(unsafe { bv_presentation_prime(pres) }, 5);
        assert_eq!(unsafe { bv_check_consistency(pres) }, BvStatus::Ok);

        let mut group: *mut BvGroup = ptr::null_mut();
        assert_eq!(unsafe { bv_group_enumerate(pres, &mut group) }, BvStatus::Ok);
        assert_eq!(unsafe { bv_group_order(group) }, 25);
        assert_eq!(unsafe { bv_group_rank(group) }, 2);

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { bv_oracle_json(group, BvOracleMode::Socle, 0, &mut json) },
            BvStatus::Ok
        );
        let report = take_string(json);
        assert!(report.contains("BeauvilleTame"), "{report}");

        unsafe { bv_group_free(group) };
        unsafe { bv_presentation_free(pres) };
    }

    #[test]
    fn parse_error_reports_message() {
        let text = cstr("p 4\nn 2\n");
        let mut pres: *mut BvPresentation = ptr::null_mut();
        assert_eq!(
            unsafe { bv_presentation_parse(text.as_ptr(), &mut pres) },
            BvStatus::InputError
        );
        let msg = take_string(bv_last_error_message());
        assert!(msg.contains("not prime"), "{msg}");
    }

    #[test]
    fn inconsistent_presentation_flagged() {
        let text = cstr("p 5\nn 3\npow 1 : 2^1\ncomm 2 1 : 3^1\n");
        let mut pres: *mut BvPresentation = ptr::null_mut();
        assert_eq!(unsafe { bv_presentation_parse(text.as_ptr(), &mut pres) }, BvStatus::Ok);
        assert_eq!(unsafe { bv_check_consistency(pres) }, BvStatus::InvariantViolation);
        let msg = take_string(bv_last_error_message());
        assert!(!msg.is_empty());
        let mut group: *mut BvGroup = ptr::null_mut();
        assert_eq!(
            unsafe { bv_group_enumerate(pres, &mut group) },
            BvStatus::InvariantViolation
        );
        unsafe { bv_presentation_free(pres) };
    }

    #[test]
    fn constructors_and_analysis() {
        let mut text: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { bv_construct_pquotient(5, 4, &mut text) }, BvStatus::Ok);
        let pres_text = take_string(text);
        let ctext = cstr(&pres_text);
        let mut pres: *mut BvPresentation = ptr::null_mut();
        assert_eq!(unsafe { bv_presentation_parse(ctext.as_ptr(), &mut pres) }, BvStatus::Ok);
        assert_eq!(unsafe { bv_presentation_order(pres) }, 3125);

        let mut group: *mut BvGroup = ptr::null_mut();
        assert_eq!(unsafe { bv_group_enumerate(pres, &mut group) }, BvStatus::Ok);
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { bv_analyze_json(group, &mut json) }, BvStatus::Ok);
        let profile = take_string(json);
        assert!(profile.contains("\"mu\":5"), "{profile}");

        let mut cjson: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { bv_classify_json(group, &mut cjson) }, BvStatus::Ok);
        let fast = take_string(cjson);
        assert!(fast.contains("BeauvilleTame"), "{fast}");

        unsafe { bv_group_free(group) };
        unsafe { bv_presentation_free(pres) };

        let mut id: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { bv_construct_abelian(25, 5, &mut id) }, BvStatus::Ok);
        let ab = take_string(id);
        assert!(ab.contains("p 5"));
    }

    #[test]
    fn null_arguments_are_rejected() {
        assert_eq!(
            unsafe { bv_presentation_parse(ptr::null(), ptr::null_mut()) },
            BvStatus::NullArgument
        );
        assert_eq!(unsafe { bv_check_consistency(ptr::null()) }, BvStatus::NullArgument);
        assert_eq!(unsafe { bv_group_order(ptr::null()) }, 0);
        let version = unsafe { CStr::from_ptr(bv_version()) };
        assert!(!version.to_str().unwrap().is_empty());
    }
}
