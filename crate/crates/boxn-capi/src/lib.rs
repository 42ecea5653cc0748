//! C ABI for the boxn toolkit.
//!
//! Handles are opaque pointers owned by the library; every constructor
//! has a matching `_free`. Functions return [`BoxnStatus`]: `Ok` for
//! success or a positive verdict, `Falsified` for an exact negative
//! verdict, `Error` for anything else (inspect
//! [`boxn_last_error_message`]). Strings are NUL-terminated UTF-8 and
//! must be released with [`boxn_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::sync::Arc;

use boxn::certificates::Verification;
use boxn::gram::{spectral_gap_search, PsdOutcome, SolverConfig};
use boxn::groups::GroupModel;
use boxn::ringalg::{format_scalar, RingElement};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(msg).ok();
    });
}

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxnStatus {
    /// Success, or an exact positive verdict.
    Ok = 0,
    /// An exact negative verdict (falsified certificate, not PSD, ...).
    Falsified = 1,
    /// Invalid input, unsupported operation, or internal failure.
    Error = 2,
    /// A required pointer argument was NULL.
    NullPointer = 3,
}

/// Opaque group model handle.
pub struct BoxnGroup {
    inner: Arc<GroupModel>,
}

/// Opaque group-ring element handle.
pub struct BoxnElement {
    inner: RingElement,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, BoxnStatus> {
    if ptr.is_null() {
        set_error("NULL string argument");
        return Err(BoxnStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        BoxnStatus::Error
    })
}

fn export_string(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Returns the most recent error message on this thread, or NULL.
/// The caller owns the string and must free it with
/// `boxn_string_free`.
#[no_mangle]
pub extern "C" fn boxn_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn boxn_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe {
            drop(CString::from_raw(s));
        }
    }
}

/// Parses a group definition (the JSON group file format) into a group
/// handle written to `out`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to a valid
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn boxn_group_from_json(
    json: *const c_char,
    out: *mut *mut BoxnGroup,
) -> BoxnStatus {
    if out.is_null() {
        set_error("NULL output slot");
        return BoxnStatus::NullPointer;
    }
    let text = match unsafe { read_str(json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set_error(format!("invalid JSON: {e}"));
            return BoxnStatus::Error;
        }
    };
    match boxn::jsonio::group_from_value(&value) {
        Ok((group, _warnings)) => {
            unsafe { *out = Box::into_raw(Box::new(BoxnGroup { inner: group })) };
            BoxnStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            BoxnStatus::Error
        }
    }
}

/// Frees a group handle. NULL is ignored.
///
/// # Safety
/// `group` must have come from `boxn_group_from_json` and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn boxn_group_free(group: *mut BoxnGroup) {
    if !group.is_null() {
        unsafe {
            drop(Box::from_raw(group));
        }
    }
}

/// Number of generators in the symmetrized alphabet.
///
/// # Safety
/// `group` must be a live handle from `boxn_group_from_json`.
#[no_mangle]
pub unsafe extern "C" fn boxn_group_generator_count(group: *const BoxnGroup) -> usize {
    if group.is_null() {
        return 0;
    }
    unsafe { &*group }.inner.alphabet.len()
}

/// Parses an element (the JSON element file format). When `group` is
/// non-NULL it supplies the context and the file's own group key is
/// ignored; otherwise the JSON must inline its group.
///
/// # Safety
/// Pointers must be valid as for `boxn_group_from_json`.
#[no_mangle]
pub unsafe extern "C" fn boxn_element_from_json(
    group: *const BoxnGroup,
    json: *const c_char,
    out: *mut *mut BoxnElement,
) -> BoxnStatus {
    if out.is_null() {
        set_error("NULL output slot");
        return BoxnStatus::NullPointer;
    }
    let text = match unsafe { read_str(json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set_error(format!("invalid JSON: {e}"));
            return BoxnStatus::Error;
        }
    };
    let context = if group.is_null() {
        None
    } else {
        Some(unsafe { &*group }.inner.clone())
    };
    match boxn::jsonio::element_from_value(&value, context.as_ref(), Path::new(".")) {
        Ok(elem) => {
            unsafe { *out = Box::into_raw(Box::new(BoxnElement { inner: elem })) };
            BoxnStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            BoxnStatus::Error
        }
    }
}

/// Frees an element handle. NULL is ignored.
///
/// # Safety
/// `elem` must have come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn boxn_element_free(elem: *mut BoxnElement) {
    if !elem.is_null() {
        unsafe {
            drop(Box::from_raw(elem));
        }
    }
}

/// Serializes an element to its JSON file format (group inlined).
///
/// # Safety
/// `elem` must be a live element handle.
#[no_mangle]
pub unsafe extern "C" fn boxn_element_to_json(elem: *const BoxnElement) -> *mut c_char {
    if elem.is_null() {
        set_error("NULL element");
        return std::ptr::null_mut();
    }
    let e = unsafe { &*elem };
    export_string(boxn::jsonio::to_json_string(
        &boxn::jsonio::element_to_value(&e.inner),
    ))
}

/// Builds the n-th element of the order-unit family over the group.
///
/// # Safety
/// `group` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn boxn_box_element(
    group: *const BoxnGroup,
    n: usize,
    out: *mut *mut BoxnElement,
) -> BoxnStatus {
    if group.is_null() || out.is_null() {
        set_error("NULL argument");
        return BoxnStatus::NullPointer;
    }
    let g = unsafe { &*group };
    match boxn::family::box_element(&g.inner, n) {
        Ok(x) => {
            unsafe { *out = Box::into_raw(Box::new(BoxnElement { inner: x })) };
            BoxnStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            BoxnStatus::Error
        }
    }
}

/// Exact verification of a certificate given as the JSON certificate
/// file format. Returns `Ok` when the identity holds exactly,
/// `Falsified` when it does not, `Error` on malformed input.
///
/// # Safety
/// `json` must point to a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn boxn_certificate_verify_json(json: *const c_char) -> BoxnStatus {
    let text = match unsafe { read_str(json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set_error(format!("invalid JSON: {e}"));
            return BoxnStatus::Error;
        }
    };
    let cert = match boxn::jsonio::certificate_from_value(&value, None, Path::new(".")) {
        Ok(c) => c,
        Err(e) => {
            set_error(e.to_string());
            return BoxnStatus::Error;
        }
    };
    match cert.verify() {
        Ok(Verification::Verified) => BoxnStatus::Ok,
        Ok(Verification::Falsified { .. }) => {
            set_error("certificate identity does not hold");
            BoxnStatus::Falsified
        }
        Err(e) => {
            set_error(e.to_string());
            BoxnStatus::Error
        }
    }
}

/// Exact positivity oracle for hermitian elements of finite groups:
/// `Ok` when the regular representation is PSD, `Falsified` when not.
///
/// # Safety
/// `elem` must be a live element handle.
#[no_mangle]
pub unsafe extern "C" fn boxn_oracle_psd(elem: *const BoxnElement) -> BoxnStatus {
    if elem.is_null() {
        set_error("NULL element");
        return BoxnStatus::NullPointer;
    }
    let e = unsafe { &*elem };
    match boxn::gram::finite_positivity_oracle(&e.inner) {
        Ok(PsdOutcome::Psd(_)) => BoxnStatus::Ok,
        Ok(PsdOutcome::NotPsd { .. }) => BoxnStatus::Falsified,
        Err(err) => {
            set_error(err.to_string());
            BoxnStatus::Error
        }
    }
}

/// Spectral-gap search for the Laplacian of the group's generating
/// set. On success writes the certified lambda as a rational string
/// (caller frees) and returns `Ok`.
///
/// # Safety
/// `group` and `out_lambda` must be valid.
#[no_mangle]
pub unsafe extern "C" fn boxn_spectral_gap(
    group: *const BoxnGroup,
    out_lambda: *mut *mut c_char,
) -> BoxnStatus {
    if group.is_null() || out_lambda.is_null() {
        set_error("NULL argument");
        return BoxnStatus::NullPointer;
    }
    let g = unsafe { &*group };
    match spectral_gap_search(&g.inner, &SolverConfig::default()) {
        Ok((lambda, _cert)) => {
            unsafe { *out_lambda = export_string(format_scalar(&lambda)) };
            BoxnStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            BoxnStatus::Error
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    const Z2: &str =
        r#"{"kind":"finite","elements":["e","t"],"table":[[0,1],[1,0]],"generators":["t"]}"#;

    #[test]
    fn group_and_box_roundtrip() {
        unsafe {
            let mut group: *mut BoxnGroup = std::ptr::null_mut();
            assert_eq!(
                boxn_group_from_json(cstr(Z2).as_ptr(), &mut group),
                BoxnStatus::Ok
            );
            assert_eq!(boxn_group_generator_count(group), 1);
            let mut elem: *mut BoxnElement = std::ptr::null_mut();
            assert_eq!(boxn_box_element(group, 1, &mut elem), BoxnStatus::Ok);
            let json = boxn_element_to_json(elem);
            assert!(!json.is_null());
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            assert!(text.contains("\"c\": \"2\""));
            boxn_string_free(json);
            // reparse through the C surface with explicit group context
            let mut back: *mut BoxnElement = std::ptr::null_mut();
            assert_eq!(
                boxn_element_from_json(group, cstr(&text).as_ptr(), &mut back),
                BoxnStatus::Ok
            );
            assert_eq!((*back).inner, (*elem).inner);
            boxn_element_free(back);
            boxn_element_free(elem);
            boxn_group_free(group);
        }
    }

    #[test]
    fn certificate_verify_through_c_surface() {
        let group = boxn::groups::standard::cyclic(2);
        let t = boxn::groups::Word::parse("t", &group.alphabet).unwrap();
        let x = RingElement::one_minus(&group, &t).unwrap();
        let target = x.star().mul(&x).unwrap();
        let cert = boxn::certificates::SosCertificate::scalar(
            target,
            vec![boxn::ringalg::scalar_int(1)],
            vec![x],
        )
        .unwrap();
        let json = boxn::jsonio::to_json_string(&boxn::jsonio::certificate_to_value(&cert));
        unsafe {
            assert_eq!(
                boxn_certificate_verify_json(cstr(&json).as_ptr()),
                BoxnStatus::Ok
            );
        }
        // corrupt a coefficient: exact verification must fail
        let corrupted = json.replace("\"2\"", "\"2000000001/1000000000\"");
        assert_ne!(corrupted, json);
        unsafe {
            assert_eq!(
                boxn_certificate_verify_json(cstr(&corrupted).as_ptr()),
                BoxnStatus::Falsified
            );
        }
    }

    #[test]
    fn oracle_and_gap_through_c_surface() {
        unsafe {
            let mut group: *mut BoxnGroup = std::ptr::null_mut();
            assert_eq!(
                boxn_group_from_json(cstr(Z2).as_ptr(), &mut group),
                BoxnStatus::Ok
            );
            let mut delta: *mut BoxnElement = std::ptr::null_mut();
            assert_eq!(boxn_box_element(group, 1, &mut delta), BoxnStatus::Ok);
            assert_eq!(boxn_oracle_psd(delta), BoxnStatus::Ok);
            let mut lambda: *mut c_char = std::ptr::null_mut();
            assert_eq!(boxn_spectral_gap(group, &mut lambda), BoxnStatus::Ok);
            assert_eq!(CStr::from_ptr(lambda).to_str().unwrap(), "4");
            boxn_string_free(lambda);
            boxn_element_free(delta);
            boxn_group_free(group);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut group: *mut BoxnGroup = std::ptr::null_mut();
            assert_eq!(
                boxn_group_from_json(std::ptr::null(), &mut group),
                BoxnStatus::NullPointer
            );
            assert_eq!(
                boxn_group_from_json(cstr("not json").as_ptr(), &mut group),
                BoxnStatus::Error
            );
            let msg = boxn_last_error_message();
            assert!(!msg.is_null());
            boxn_string_free(msg);
        }
    }
}
