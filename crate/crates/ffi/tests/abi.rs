use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use jetsym_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    jetsym_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(jetsym_last_error())
        .to_string_lossy()
        .into_owned()
}

#[test]
fn builtin_model_checks() {
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(
            jetsym_model_builtin(c("gardner").as_ptr(), &mut model),
            JetsymStatus::Ok
        );
        let mut report = ptr::null_mut();
        let status =
            jetsym_check_symmetry(model, c("Q3").as_ptr(), c("gardner").as_ptr(), &mut report);
        assert_eq!(status, JetsymStatus::Ok);
        assert_eq!(jetsym_report_passed(report), 1);
        let mut text = ptr::null_mut();
        assert_eq!(
            jetsym_report_render(report, JetsymFormat::Json, &mut text),
            JetsymStatus::Ok
        );
        let json: serde_json::Value = serde_json::from_str(&take(text)).unwrap();
        assert_eq!(json["checks"][0]["verdict"], "pass");
        assert_eq!(json["checks"][0]["residual"], "0");
        jetsym_report_free(report);

        let mut report = ptr::null_mut();
        let status = jetsym_check_pair(model, c("D").as_ptr(), c("E").as_ptr(), &mut report);
        assert_eq!(status, JetsymStatus::Ok);
        jetsym_report_free(report);

        let mut report = ptr::null_mut();
        let status =
            jetsym_check_conservation(model, c("P5").as_ptr(), c("gardner").as_ptr(), &mut report);
        assert_eq!(status, JetsymStatus::Ok);
        jetsym_report_free(report);
        jetsym_model_free(model);
    }
}

#[test]
fn failing_check_and_lookup_errors() {
    unsafe {
        let src = c("system s { rhs: u_xxx + eps*u*u_x; }\nchar q = u;\ndensity d = u*x;");
        let mut model = ptr::null_mut();
        assert_eq!(
            jetsym_model_parse(src.as_ptr(), &mut model),
            JetsymStatus::Ok
        );
        let mut report = ptr::null_mut();
        let status = jetsym_check_symmetry(model, c("q").as_ptr(), c("s").as_ptr(), &mut report);
        assert_eq!(status, JetsymStatus::CheckFailed);
        assert_eq!(jetsym_report_passed(report), 0);
        jetsym_report_free(report);

        let mut report = ptr::null_mut();
        let status = jetsym_check_symmetry(model, c("nope").as_ptr(), c("s").as_ptr(), &mut report);
        assert_eq!(status, JetsymStatus::NotFound);
        assert!(last_error().contains("nope"));
        assert!(report.is_null());

        let mut hash = ptr::null_mut();
        assert_eq!(jetsym_model_hash(model, &mut hash), JetsymStatus::Ok);
        assert_eq!(take(hash).len(), 64);
        let mut source = ptr::null_mut();
        assert_eq!(jetsym_model_to_source(model, &mut source), JetsymStatus::Ok);
        assert!(take(source).contains("system s"));
        jetsym_model_free(model);
    }
}

#[test]
fn parse_errors_and_null_arguments() {
    unsafe {
        let mut model = ptr::null_mut();
        let status = jetsym_model_parse(c("char q = (u + ;").as_ptr(), &mut model);
        assert_eq!(status, JetsymStatus::ParseError);
        assert!(last_error().starts_with("1:15:"));
        assert!(model.is_null());

        assert_eq!(
            jetsym_model_parse(ptr::null(), &mut model),
            JetsymStatus::NullArgument
        );
        assert_eq!(
            jetsym_model_parse(c("char q = u;").as_ptr(), ptr::null_mut()),
            JetsymStatus::NullArgument
        );
        let mut report = ptr::null_mut();
        assert_eq!(
            jetsym_check_symmetry(ptr::null(), c("q").as_ptr(), c("s").as_ptr(), &mut report),
            JetsymStatus::NullArgument
        );
        let bad = [0x66u8, 0xff, 0];
        assert_eq!(
            jetsym_model_parse(bad.as_ptr().cast(), &mut model),
            JetsymStatus::InvalidUtf8
        );
        jetsym_model_free(ptr::null_mut());
        jetsym_report_free(ptr::null_mut());
        jetsym_string_free(ptr::null_mut());
        assert_eq!(jetsym_report_passed(ptr::null()), 0);
    }
}

#[test]
fn run_cli() {
    unsafe {
        let args: Vec<CString> = ["check-pair", "@gardner", "--op1", "D", "--op2", "E"]
            .iter()
            .map(|a| c(a))
            .collect();
        let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
        let mut code: c_int = -1;
        let (mut out, mut err) = (ptr::null_mut(), ptr::null_mut());
        let status = jetsym_run(argv.len(), argv.as_ptr(), &mut code, &mut out, &mut err);
        assert_eq!(status, JetsymStatus::Ok);
        assert_eq!(code, 0);
        assert!(take(out).contains("[pass] compatible D E"));
        assert_eq!(take(err), "");

        let argv = [c("frobnicate")];
        let ptrs = [argv[0].as_ptr()];
        jetsym_run(
            1,
            ptrs.as_ptr(),
            &mut code,
            ptr::null_mut(),
            ptr::null_mut(),
        );
        assert_eq!(code, 2);
    }
}
