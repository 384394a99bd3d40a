//! C interface to `ugk`. Graphs and full-group elements are opaque handles;
//! every fallible call returns a [`UgkStatus`] and leaves a message for
//! [`ugk_last_error`]. Strings returned through `char **` belong to the
//! caller and are released with [`ugk_string_free`].
//!
//! An element handle is only meaningful together with the graph it was
//! built from.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ugk::conditions::{check, Condition, Verdict};
use ugk::fullgroup::{self, FullGroupElement};
use ugk::script::Session;
use ugk::ultragraph::Ultragraph;
use ugk::UgkError;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UgkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidPresentation = 4,
    Precondition = 5,
    WitnessNotFound = 6,
    Undefined = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UgkVerdict {
    Holds = 0,
    Fails = 1,
    Unknown = 2,
}

/// A validated ultragraph presentation.
pub struct UgkGraph(Ultragraph);

/// An element of the topological full group.
pub struct UgkElement(FullGroupElement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &UgkError) -> UgkStatus {
    match e {
        UgkError::Parse { .. } => UgkStatus::Parse,
        UgkError::NoSink { .. } | UgkError::RfumViolation { .. } | UgkError::InvalidPresentation(_) => {
            UgkStatus::InvalidPresentation
        }
        UgkError::PreconditionViolated(_) | UgkError::NotGeneralizedVertex(_) | UgkError::NotInSource => {
            UgkStatus::Precondition
        }
        UgkError::WitnessNotFound { .. } | UgkError::InsufficientLoops { .. } => UgkStatus::WitnessNotFound,
        UgkError::Undefined(_) | UgkError::UndefinedOnLengthZero | UgkError::PrefixMismatch => {
            UgkStatus::Undefined
        }
        _ => UgkStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), UgkStatus>) -> UgkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            UgkStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            UgkStatus::Internal
        }
    }
}

fn fail(e: UgkError) -> UgkStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, UgkStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(UgkStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        UgkStatus::InvalidUtf8
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, UgkStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        UgkStatus::NullPointer
    })
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), UgkStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(UgkStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), UgkStatus> {
    let c = CString::new(s.replace('\0', " ")).map_err(|_| UgkStatus::Internal)?;
    write_out(out, c.into_raw())
}

/// Message of the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ugk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ugk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a presentation written in the ultragraph DSL.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ugk_graph_parse(text: *const c_char, out: *mut *mut UgkGraph) -> UgkStatus {
    guard(|| {
        let text = str_arg(text)?;
        let g = Ultragraph::parse(text).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(UgkGraph(g))))
    })
}

/// # Safety
/// `g` must come from [`ugk_graph_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ugk_graph_free(g: *mut UgkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of minimal infinite emitters.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_graph_mie_count(g: *const UgkGraph, out: *mut usize) -> UgkStatus {
    guard(|| write_out(out, ref_arg(g)?.0.mies().len()))
}

/// Decides one of `L`, `K`, `T`, `ND`, `INF`, `W`. When `json` is not null
/// it receives the report as a JSON string.
///
/// # Safety
/// Pointers must be valid; `json` may be null.
#[no_mangle]
pub unsafe extern "C" fn ugk_check(
    g: *const UgkGraph,
    condition: *const c_char,
    bound: usize,
    verdict: *mut UgkVerdict,
    json: *mut *mut c_char,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let name = str_arg(condition)?;
        let c = Condition::parse(name).ok_or_else(|| {
            set_error(&format!("unknown condition '{name}'"));
            UgkStatus::Precondition
        })?;
        let r = check(g, c, bound);
        let v = match r.verdict {
            Verdict::Holds => UgkVerdict::Holds,
            Verdict::Fails => UgkVerdict::Fails,
            Verdict::Unknown => UgkVerdict::Unknown,
        };
        write_out(verdict, v)?;
        if !json.is_null() {
            write_string(json, r.to_json(g).to_string())?;
        }
        Ok(())
    })
}

/// Runs a group-word script; `out` receives the query results, one per line.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_eval(
    g: *const UgkGraph,
    script: *const c_char,
    bound: usize,
    out: *mut *mut c_char,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let lines = Session::new(g, bound).run(str_arg(script)?).map_err(fail)?;
        write_string(out, lines.join("\n"))
    })
}

/// Evaluates a group word such as `[pi_hat(Z(e1; e2; mie#0)), f3(D(; mie#0))]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_parse(
    g: *const UgkGraph,
    word: *const c_char,
    bound: usize,
    out: *mut *mut UgkElement,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let word = str_arg(word)?;
        if word.contains('\n') {
            set_error("a group word spans one line");
            return Err(UgkStatus::Parse);
        }
        let mut s = Session::new(g, bound);
        s.run(&format!("it = {word}")).map_err(fail)?;
        let el = s.vars.remove("it").ok_or(UgkStatus::Internal)?;
        write_out(out, Box::into_raw(Box::new(UgkElement(el))))
    })
}

/// # Safety
/// `e` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_free(e: *mut UgkElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// `a ∘ b`, applying `b` first.
///
/// # Safety
/// Pointers must be valid and both elements must belong to `g`.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_compose(
    g: *const UgkGraph,
    a: *const UgkElement,
    b: *const UgkElement,
    out: *mut *mut UgkElement,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let c = fullgroup::compose(g, &ref_arg(a)?.0, &ref_arg(b)?.0).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(UgkElement(c))))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_inverse(a: *const UgkElement, out: *mut *mut UgkElement) -> UgkStatus {
    guard(|| {
        let inv = ref_arg(a)?.0.inverse();
        write_out(out, Box::into_raw(Box::new(UgkElement(inv))))
    })
}

/// The order of `a`, or 0 when it exceeds `max`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_order(
    g: *const UgkGraph,
    a: *const UgkElement,
    max: usize,
    out: *mut usize,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let k = fullgroup::order(g, &ref_arg(a)?.0, max).map_err(fail)?;
        write_out(out, k.unwrap_or(0))
    })
}

/// Writes 1 to `out` when the elements act identically, else 0.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_equals(
    g: *const UgkGraph,
    a: *const UgkElement,
    b: *const UgkElement,
    out: *mut i32,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let eq = fullgroup::equals(g, &ref_arg(a)?.0, &ref_arg(b)?.0).map_err(fail)?;
        write_out(out, i32::from(eq))
    })
}

/// Row table of the element, e.g. `Z(e1; e2; mie#0; {}) + ...` or `id`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_display(
    g: *const UgkGraph,
    a: *const UgkElement,
    out: *mut *mut c_char,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        write_string(out, ref_arg(a)?.0.display(g))
    })
}

/// Image of a point such as `fin(e1; mie#0)` under `a`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugk_element_apply(
    g: *const UgkGraph,
    a: *const UgkElement,
    point: *const c_char,
    out: *mut *mut c_char,
) -> UgkStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let x = ugk::script::parse_point(g, str_arg(point)?).map_err(fail)?;
        write_string(out, ref_arg(a)?.0.apply(g, &x).display(g))
    })
}
