//! C ABI for the misect solver: opaque handles, status codes, and a
//! thread-local last-error message. The generated header lands in
//! `include/misect.h`.
//!
//! Ownership rules: every `*_parse_*` / `*_solve` call that returns
//! `MISECT_OK` transfers ownership of the written handle to the caller, who
//! must release it with the matching `*_free` function. Strings returned by
//! `misect_solution_report_json` are freed with `misect_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use misect::instance::InstanceFile;
use misect::solver::{certify_optimality, solve, SolveConfig, SolveOutput};

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum MisectStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed instance JSON; details via `misect_last_error_message`.
    ParseError = 3,
    /// The solve aborted; details via `misect_last_error_message`.
    SolveError = 4,
    /// The optimality certificate failed re-verification.
    CertificateInvalid = 5,
    BufferTooSmall = 6,
}

/// An instance handle: two matroid descriptors plus weights.
pub struct MisectInstance {
    inst: InstanceFile,
}

/// A solve result handle.
pub struct MisectSolution {
    out: SolveOutput,
}

/// Parses an instance from JSON. On success writes a heap-allocated handle
/// to `out`; release it with `misect_instance_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn misect_instance_parse_json(
    json: *const c_char,
    out: *mut *mut MisectInstance,
) -> MisectStatus {
    if json.is_null() || out.is_null() {
        return MisectStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return MisectStatus::InvalidUtf8;
    };
    match InstanceFile::from_json(text) {
        Ok(inst) => {
            *out = Box::into_raw(Box::new(MisectInstance { inst }));
            MisectStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            MisectStatus::ParseError
        }
    }
}

/// Ground-set size of a parsed instance.
///
/// # Safety
/// `inst` must be a live handle from `misect_instance_parse_json`.
#[no_mangle]
pub unsafe extern "C" fn misect_instance_ground_size(inst: *const MisectInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    (*inst).inst.weights.len()
}

/// Releases an instance handle. NULL is a no-op.
///
/// # Safety
/// `inst` must be NULL or a live handle; it is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn misect_instance_free(inst: *mut MisectInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Solves an instance exactly. When `certify` is true the optimality
/// certificate is re-verified and `MISECT_CERTIFICATE_INVALID` reported on
/// failure. On success writes a solution handle to `out`; release it with
/// `misect_solution_free`.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn misect_solve(
    inst: *const MisectInstance,
    certify: bool,
    out: *mut *mut MisectSolution,
) -> MisectStatus {
    if inst.is_null() || out.is_null() {
        return MisectStatus::NullPointer;
    }
    let inst = &(*inst).inst;
    let run = || -> misect::error::Result<SolveOutput> {
        let (m1, m2) = inst.build_oracles()?;
        solve(m1, m2, &inst.weights, &SolveConfig::default())
    };
    match run() {
        Ok(output) => {
            if certify {
                let (m1, m2) = match inst.build_oracles() {
                    Ok(o) => o,
                    Err(e) => {
                        set_last_error(e.to_string());
                        return MisectStatus::SolveError;
                    }
                };
                if let Err(reason) =
                    certify_optimality(&output.certificate, &m1, &m2, &inst.weights)
                {
                    set_last_error(format!("certificate rejected: {reason}"));
                    return MisectStatus::CertificateInvalid;
                }
            }
            *out = Box::into_raw(Box::new(MisectSolution { out: output }));
            MisectStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            MisectStatus::SolveError
        }
    }
}

/// Weight of the returned common independent set.
///
/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_weight(sol: *const MisectSolution) -> i64 {
    if sol.is_null() {
        return 0;
    }
    (*sol).out.report.solution_weight
}

/// Number of elements in the returned set.
///
/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_len(sol: *const MisectSolution) -> usize {
    if sol.is_null() {
        return 0;
    }
    (*sol).out.solution.len()
}

/// Copies the element ids (ascending) into `buf`. Writes the copied count
/// to `written` when non-NULL; fails with `MISECT_BUFFER_TOO_SMALL` if `cap`
/// is insufficient.
///
/// # Safety
/// `sol` must be a live handle and `buf` valid for `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_elements(
    sol: *const MisectSolution,
    buf: *mut u64,
    cap: usize,
    written: *mut usize,
) -> MisectStatus {
    if sol.is_null() || buf.is_null() {
        return MisectStatus::NullPointer;
    }
    let elems = &(*sol).out.solution;
    if cap < elems.len() {
        return MisectStatus::BufferTooSmall;
    }
    for (i, &e) in elems.iter().enumerate() {
        *buf.add(i) = e as u64;
    }
    if !written.is_null() {
        *written = elems.len();
    }
    MisectStatus::Ok
}

/// Total rank queries issued by the solve (all phases).
///
/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_queries_total(sol: *const MisectSolution) -> u64 {
    if sol.is_null() {
        return 0;
    }
    (*sol).out.report.queries_total
}

/// Rank queries of the algorithm proper (initialization and verification
/// excluded).
///
/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_queries_algorithm(sol: *const MisectSolution) -> u64 {
    if sol.is_null() {
        return 0;
    }
    (*sol).out.report.queries_algorithm
}

/// Serializes the full run report as JSON into a heap string; release with
/// `misect_string_free`.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_report_json(
    sol: *const MisectSolution,
    out: *mut *mut c_char,
) -> MisectStatus {
    if sol.is_null() || out.is_null() {
        return MisectStatus::NullPointer;
    }
    let json = match serde_json::to_string(&(*sol).out.report) {
        Ok(j) => j,
        Err(e) => {
            set_last_error(e.to_string());
            return MisectStatus::SolveError;
        }
    };
    match CString::new(json) {
        Ok(c) => {
            *out = c.into_raw();
            MisectStatus::Ok
        }
        Err(_) => MisectStatus::SolveError,
    }
}

/// Releases a solution handle. NULL is a no-op.
///
/// # Safety
/// `sol` must be NULL or a live handle; it is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn misect_solution_free(sol: *mut MisectSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string produced by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn misect_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last error on this thread. The pointer stays valid until
/// the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn misect_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
