//! Exercise the C ABI the way a foreign binding would: through raw
//! pointers, status codes, and owned strings.

use std::ffi::{CStr, CString};
use std::ptr;

use holo_eikonal_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
    hek_string_free(ptr);
    s
}

#[test]
fn parse_render_round_trip() {
    unsafe {
        let mut poly: *mut HekPoly = ptr::null_mut();
        let text = cstr("z1*z2 + z3^2 + 5");
        assert_eq!(
            hek_poly_parse(text.as_ptr(), 3, &mut poly),
            HekStatus::HekOk
        );
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(hek_poly_render(poly, &mut out), HekStatus::HekOk);
        assert_eq!(take_string(out), "z1*z2 + z3^2 + 5");
        hek_poly_free(poly);
    }
}

#[test]
fn parse_error_reports_message() {
    unsafe {
        let mut poly: *mut HekPoly = ptr::null_mut();
        let text = cstr("exp(z1)");
        assert_eq!(
            hek_poly_parse(text.as_ptr(), 1, &mut poly),
            HekStatus::HekErrParse
        );
        let msg = CStr::from_ptr(hek_last_error_message()).to_str().unwrap();
        assert!(msg.contains("exp"), "message: {msg}");
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut poly: *mut HekPoly = ptr::null_mut();
        assert_eq!(
            hek_poly_parse(ptr::null(), 1, &mut poly),
            HekStatus::HekErrNullArgument
        );
        assert_eq!(
            hek_poly_render(ptr::null(), ptr::null_mut()),
            HekStatus::HekErrNullArgument
        );
    }
}

#[test]
fn solve_verify_and_serialize() {
    unsafe {
        let mut poly: *mut HekPoly = ptr::null_mut();
        let text = cstr("z1^2 + (z2 + 5*z3)^3");
        assert_eq!(
            hek_poly_parse(text.as_ptr(), 3, &mut poly),
            HekStatus::HekOk
        );

        let mut sol: *mut HekSolution = ptr::null_mut();
        assert_eq!(hek_solve(poly, &mut sol), HekStatus::HekOk);

        assert_eq!(hek_verify_symbolic(sol, poly), HekStatus::HekOk);

        let mut max_residual = f64::NAN;
        assert_eq!(
            hek_verify_numeric(sol, poly, 50, 1.0, 1e-9, 42, 256, &mut max_residual),
            HekStatus::HekOk
        );
        assert!(max_residual < 1e-9);

        let mut rendered: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(hek_solution_render(sol, &mut rendered), HekStatus::HekOk);
        let rendered = take_string(rendered);
        assert!(rendered.starts_with("u = "), "rendered: {rendered}");

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(hek_solution_json(sol, &mut json), HekStatus::HekOk);
        let json = take_string(json);
        assert!(json.contains("\"terms\""));

        hek_solution_free(sol);
        hek_poly_free(poly);
    }
}

#[test]
fn no_solution_status() {
    unsafe {
        let mut poly: *mut HekPoly = ptr::null_mut();
        let text = cstr("z1*z2");
        assert_eq!(
            hek_poly_parse(text.as_ptr(), 2, &mut poly),
            HekStatus::HekOk
        );
        let mut sol: *mut HekSolution = ptr::null_mut();
        assert_eq!(hek_solve(poly, &mut sol), HekStatus::HekErrNoSolution);
        assert!(sol.is_null());

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            hek_classify_json(poly, &mut json),
            HekStatus::HekErrNoSolution
        );
        let json = take_string(json);
        assert!(json.contains("\"case\": \"none\""));
        hek_poly_free(poly);
    }
}

#[test]
fn reduce_paths() {
    unsafe {
        let mut poly: *mut HekPoly = ptr::null_mut();
        let text = cstr("0");
        assert_eq!(
            hek_poly_parse(text.as_ptr(), 2, &mut poly),
            HekStatus::HekOk
        );

        let singular = cstr(r#"[["1","2"],["2","4"]]"#);
        let mut sol: *mut HekSolution = ptr::null_mut();
        assert_eq!(
            hek_reduce_solve(singular.as_ptr(), poly, &mut sol),
            HekStatus::HekErrSingular
        );

        let good = cstr(r#"[["1","i"],["1","-i"]]"#);
        assert_eq!(
            hek_reduce_solve(good.as_ptr(), poly, &mut sol),
            HekStatus::HekOk
        );
        let mut rendered: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(hek_solution_render(sol, &mut rendered), HekStatus::HekOk);
        let rendered = take_string(rendered);
        assert!(rendered.starts_with("u = "));
        hek_solution_free(sol);
        hek_poly_free(poly);
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/holo_eikonal.h"
    ))
    .expect("header generated at build time");
    for symbol in [
        "hek_poly_parse",
        "hek_poly_free",
        "hek_poly_render",
        "hek_classify_json",
        "hek_solve",
        "hek_reduce_solve",
        "hek_solution_free",
        "hek_solution_render",
        "hek_solution_json",
        "hek_verify_symbolic",
        "hek_verify_numeric",
        "hek_string_free",
        "hek_last_error_message",
        "HEK_ERR_NO_SOLUTION",
        "typedef struct HekPoly HekPoly",
    ] {
        assert!(header.contains(symbol), "header is missing `{symbol}`");
    }
}
