//! C ABI for the jetsym engine.
//!
//! Models and reports are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns a
//! [`JetsymStatus`]; on anything but `JETSYM_STATUS_OK` or
//! `JETSYM_STATUS_CHECK_FAILED` a message is available from
//! [`jetsym_last_error`]. Strings handed out by the library must be released
//! with [`jetsym_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jetsym::engine::{check_conservation, check_symmetry_tuple};
use jetsym::frontend::cli::{pair_checks, run_command};
use jetsym::frontend::report::{Format, Report};
use jetsym::frontend::{builtin, parse_model, Model};
use jetsym::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum JetsymStatus {
    Ok = 0,
    /// The call succeeded and at least one check failed.
    CheckFailed = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    ParseError = 4,
    NotFound = 5,
    EngineError = 6,
    ResourceCap = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum JetsymFormat {
    Text = 0,
    Json = 1,
    Latex = 2,
}

/// Parsed model.
pub struct JetsymModel {
    inner: Model,
}

/// Result of one or more checks.
pub struct JetsymReport {
    inner: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(JetsymStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ResourceCap(_) => JetsymStatus::ResourceCap,
            _ => JetsymStatus::EngineError,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, recording any failure or panic as the last error.
fn guard(f: impl FnOnce() -> Result<JetsymStatus, Failure>) -> JetsymStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            JetsymStatus::Panic
        }
    }
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(
            JetsymStatus::NullArgument,
            format!("{what} is null"),
        ));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        Failure(
            JetsymStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("no interior NUL")
        .into_raw()
}

fn check_out<T>(out: *mut T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(
            JetsymStatus::NullArgument,
            format!("{what} is null"),
        ))
    } else {
        Ok(())
    }
}

fn model_ref<'a>(m: *const JetsymModel) -> Result<&'a Model, Failure> {
    // SAFETY: callers pass handles obtained from this library.
    unsafe { m.as_ref() }
        .map(|m| &m.inner)
        .ok_or_else(|| Failure(JetsymStatus::NullArgument, "model is null".into()))
}

fn not_found(kind: &str, name: &str) -> Failure {
    Failure(JetsymStatus::NotFound, format!("no {kind} named `{name}`"))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn jetsym_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jetsym_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses model source text.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_model_parse(
    src: *const c_char,
    out: *mut *mut JetsymModel,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        let src = read_str(src, "source")?;
        let inner =
            parse_model(src).map_err(|e| Failure(JetsymStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(JetsymModel { inner }));
        Ok(JetsymStatus::Ok)
    })
}

/// Loads a built-in model: `gardner` or `potential_burgers`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_model_builtin(
    name: *const c_char,
    out: *mut *mut JetsymModel,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        let name = read_str(name, "name")?;
        let src = builtin(name).ok_or_else(|| not_found("built-in model", name))?;
        let inner =
            parse_model(src).map_err(|e| Failure(JetsymStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(JetsymModel { inner }));
        Ok(JetsymStatus::Ok)
    })
}

/// # Safety
/// `model` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jetsym_model_free(model: *mut JetsymModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Canonical source text of the model.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_model_to_source(
    model: *const JetsymModel,
    out: *mut *mut c_char,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = to_c_string(model_ref(model)?.to_source());
        Ok(JetsymStatus::Ok)
    })
}

/// SHA-256 of the canonical source, in hex.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_model_hash(
    model: *const JetsymModel,
    out: *mut *mut c_char,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = to_c_string(model_ref(model)?.hash());
        Ok(JetsymStatus::Ok)
    })
}

fn finish(report: Report, out: *mut *mut JetsymReport) -> Result<JetsymStatus, Failure> {
    let status = if report.passed() {
        JetsymStatus::Ok
    } else {
        JetsymStatus::CheckFailed
    };
    // SAFETY: `out` was checked non-null by the caller.
    unsafe { *out = Box::into_raw(Box::new(JetsymReport { inner: report })) };
    Ok(status)
}

/// Checks that a named characteristic is a symmetry of a named system.
///
/// # Safety
/// `model` must be a live handle, the names NUL-terminated strings and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_check_symmetry(
    model: *const JetsymModel,
    characteristic: *const c_char,
    system: *const c_char,
    out: *mut *mut JetsymReport,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        let m = model_ref(model)?;
        let q_name = read_str(characteristic, "characteristic")?;
        let s_name = read_str(system, "system")?;
        let q = m
            .characteristics
            .get(q_name)
            .ok_or_else(|| not_found("characteristic", q_name))?;
        let sys = m
            .systems
            .get(s_name)
            .ok_or_else(|| not_found("system", s_name))?;
        let mut report = Report::for_model(format!("check-symmetry {q_name} {s_name}"), m);
        report
            .checks
            .push(check_symmetry_tuple(q, sys)?.named(format!("symmetry {q_name}")));
        finish(report, out)
    })
}

/// Checks that a named density is conserved by a named system.
///
/// # Safety
/// As for [`jetsym_check_symmetry`].
#[no_mangle]
pub unsafe extern "C" fn jetsym_check_conservation(
    model: *const JetsymModel,
    density: *const c_char,
    system: *const c_char,
    out: *mut *mut JetsymReport,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        let m = model_ref(model)?;
        let d_name = read_str(density, "density")?;
        let s_name = read_str(system, "system")?;
        let f = m
            .functional(d_name)
            .ok_or_else(|| not_found("density", d_name))?;
        let sys = m
            .systems
            .get(s_name)
            .ok_or_else(|| not_found("system", s_name))?;
        let mut report = Report::for_model(format!("check-claw {d_name} {s_name}"), m);
        report
            .checks
            .push(check_conservation(&f, sys)?.named(format!("conservation {d_name}")));
        finish(report, out)
    })
}

/// Checks that two named operators form a Hamiltonian pair.
///
/// # Safety
/// As for [`jetsym_check_symmetry`].
#[no_mangle]
pub unsafe extern "C" fn jetsym_check_pair(
    model: *const JetsymModel,
    op1: *const c_char,
    op2: *const c_char,
    out: *mut *mut JetsymReport,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        let m = model_ref(model)?;
        let n1 = read_str(op1, "op1")?;
        let n2 = read_str(op2, "op2")?;
        let d = m
            .operators
            .get(n1)
            .ok_or_else(|| not_found("operator", n1))?;
        let e = m
            .operators
            .get(n2)
            .ok_or_else(|| not_found("operator", n2))?;
        let mut report = Report::for_model(format!("check-pair {n1} {n2}"), m);
        report
            .checks
            .extend(pair_checks(d, e, n1, n2, false, &m.depvars)?);
        finish(report, out)
    })
}

/// Nonzero when every check in the report passed.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jetsym_report_passed(report: *const JetsymReport) -> c_int {
    report.as_ref().is_some_and(|r| r.inner.passed()) as c_int
}

/// Renders a report.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_report_render(
    report: *const JetsymReport,
    format: JetsymFormat,
    out: *mut *mut c_char,
) -> JetsymStatus {
    guard(|| {
        check_out(out, "out")?;
        let r = report
            .as_ref()
            .ok_or_else(|| Failure(JetsymStatus::NullArgument, "report is null".into()))?;
        let format = match format {
            JetsymFormat::Text => Format::Text,
            JetsymFormat::Json => Format::Json,
            JetsymFormat::Latex => Format::Latex,
        };
        *out = to_c_string(r.inner.emit(format));
        Ok(JetsymStatus::Ok)
    })
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jetsym_report_free(report: *mut JetsymReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Runs the command-line interface with `argv[0..argc]` (without the
/// program name). Writes the process exit code to `exit_code` and the
/// output streams to `out` and `err`, either of which may be null.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `exit_code` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jetsym_run(
    argc: usize,
    argv: *const *const c_char,
    exit_code: *mut c_int,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> JetsymStatus {
    guard(|| {
        check_out(exit_code, "exit_code")?;
        if argc > 0 && argv.is_null() {
            return Err(Failure(JetsymStatus::NullArgument, "argv is null".into()));
        }
        let mut args = vec!["jetsym".to_string()];
        for i in 0..argc {
            args.push(read_str(*argv.add(i), "argument")?.to_string());
        }
        let outcome = run_command(args);
        *exit_code = outcome.code;
        if !out.is_null() {
            *out = to_c_string(outcome.stdout);
        }
        if !err.is_null() {
            *err = to_c_string(outcome.stderr);
        }
        Ok(JetsymStatus::Ok)
    })
}
