//! C ABI for the engine: opaque handles, integer status codes, and JSON
//! string outputs. Every function is panic-safe; string outputs are owned
//! by the callee and must be released with `hek_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use std::ffi::{c_char, c_double};

use holo_eikonal::multipoly::MultiPoly;
use holo_eikonal::parser::parse_poly;
use holo_eikonal::reduce::{reduce_solve_backsub, MatrixA};
use holo_eikonal::report::{emit_report, InputEcho, Report, ReportFormat};
use holo_eikonal::scalar::Precision;
use holo_eikonal::synthesize::{render_solution, synthesize, RenderFormat, SolutionForm};
use holo_eikonal::verify::{
    numeric_verify, symbolic_verify, GradientSource, RhsSource, SampleConfig, VerifyMode,
};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HekStatus {
    HekOk = 0,
    HekErrNullArgument = 1,
    HekErrUtf8 = 2,
    HekErrParse = 3,
    HekErrNoSolution = 4,
    HekErrSingular = 5,
    HekErrVerifyFailed = 6,
    HekErrInvalid = 7,
    HekErrPanic = 8,
}

/// Opaque polynomial handle.
pub struct HekPoly {
    inner: MultiPoly,
}

/// Opaque solution handle.
pub struct HekSolution {
    inner: SolutionForm,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_for(err: &holo_eikonal::Error) -> HekStatus {
    use holo_eikonal::Error as E;
    set_last_error(&err.to_string());
    match err {
        E::SyntaxError { .. } | E::UnknownVariable { .. } | E::NonPolynomial { .. } => {
            HekStatus::HekErrParse
        }
        E::SingularMatrix => HekStatus::HekErrSingular,
        _ => HekStatus::HekErrInvalid,
    }
}

fn catch<F: FnOnce() -> HekStatus>(f: F) -> HekStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            HekStatus::HekErrPanic
        }
    }
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, HekStatus> {
    if ptr.is_null() {
        set_last_error("null string argument");
        return Err(HekStatus::HekErrNullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8");
        HekStatus::HekErrUtf8
    })
}

fn give_string(out: *mut *mut c_char, s: String) -> HekStatus {
    let sanitized = s.replace('\0', " ");
    match CString::new(sanitized) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            HekStatus::HekOk
        }
        Err(_) => {
            set_last_error("output string contained an interior NUL");
            HekStatus::HekErrInvalid
        }
    }
}

/// Most recent error message for this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn hek_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a polynomial in the engine grammar into an opaque handle.
/// # Safety
///
/// `text` must be a valid NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hek_poly_parse(
    text: *const c_char,
    nvars: usize,
    out: *mut *mut HekPoly,
) -> HekStatus {
    catch(|| {
        if out.is_null() {
            set_last_error("null output pointer");
            return HekStatus::HekErrNullArgument;
        }
        let text = match read_utf8(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_poly(text, nvars) {
            Ok(poly) => {
                *out = Box::into_raw(Box::new(HekPoly { inner: poly }));
                HekStatus::HekOk
            }
            Err(e) => status_for(&e),
        }
    })
}

/// # Safety
///
/// `poly` must be null or a pointer returned by `hek_poly_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hek_poly_free(poly: *mut HekPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Canonical text rendering of a polynomial.
/// # Safety
///
/// `poly` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hek_poly_render(poly: *const HekPoly, out: *mut *mut c_char) -> HekStatus {
    catch(|| {
        if poly.is_null() || out.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        give_string(out, (*poly).inner.to_string())
    })
}

/// Classify g; writes a schema `holo-eikonal/1` JSON report.
/// # Safety
///
/// `poly` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hek_classify_json(
    poly: *const HekPoly,
    out: *mut *mut c_char,
) -> HekStatus {
    catch(|| {
        if poly.is_null() || out.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        let g = &(*poly).inner;
        match holo_eikonal::structure::classify(g) {
            Ok((part, cls)) => {
                let mut report = Report::new(InputEcho {
                    command: "classify".into(),
                    g: Some(g.to_string()),
                    nvars: g.nvars(),
                    ..InputEcho::default()
                });
                report.set_classification(&part, &cls);
                let solvable = cls.is_solvable();
                let code = give_string(out, emit_report(&report, ReportFormat::Json));
                if code != HekStatus::HekOk {
                    return code;
                }
                if solvable {
                    HekStatus::HekOk
                } else {
                    HekStatus::HekErrNoSolution
                }
            }
            Err(e) => status_for(&e),
        }
    })
}

/// Construct the canonical solution of `u_{z1}...u_{zn} = e^g`.
/// # Safety
///
/// `poly` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hek_solve(poly: *const HekPoly, out: *mut *mut HekSolution) -> HekStatus {
    catch(|| {
        if poly.is_null() || out.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        match synthesize(&(*poly).inner) {
            Ok(syn) => match syn.solution {
                Some(sol) => {
                    *out = Box::into_raw(Box::new(HekSolution { inner: sol }));
                    HekStatus::HekOk
                }
                None => {
                    set_last_error("no entire solution exists for this g");
                    HekStatus::HekErrNoSolution
                }
            },
            Err(e) => status_for(&e),
        }
    })
}

/// Run the matrix pipeline for `prod_i (row_i A . grad u) = e^g`.
/// `matrix_json` is a JSON array of arrays of scalar strings.
/// # Safety
///
/// `matrix_json` must be NUL-terminated; `poly` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hek_reduce_solve(
    matrix_json: *const c_char,
    poly: *const HekPoly,
    out: *mut *mut HekSolution,
) -> HekStatus {
    catch(|| {
        if poly.is_null() || out.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        let matrix_text = match read_utf8(matrix_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let a = match MatrixA::from_json(matrix_text) {
            Ok(a) => a,
            Err(e) => return status_for(&e),
        };
        match reduce_solve_backsub(&a, &(*poly).inner) {
            Ok(red) => match red.solution {
                Some(sol) => {
                    *out = Box::into_raw(Box::new(HekSolution { inner: sol }));
                    HekStatus::HekOk
                }
                None => {
                    set_last_error("no entire solution exists for this matrix equation");
                    HekStatus::HekErrNoSolution
                }
            },
            Err(e) => status_for(&e),
        }
    })
}

/// # Safety
///
/// `sol` must be null or a pointer returned by a solve call, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hek_solution_free(sol: *mut HekSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Human-readable rendering of a solution.
/// # Safety
///
/// `sol` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hek_solution_render(
    sol: *const HekSolution,
    out: *mut *mut c_char,
) -> HekStatus {
    catch(|| {
        if sol.is_null() || out.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        give_string(out, render_solution(&(*sol).inner, RenderFormat::Text))
    })
}

/// Structured solution JSON (round-trips through `hek_*` and the CLI).
/// # Safety
///
/// `sol` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hek_solution_json(
    sol: *const HekSolution,
    out: *mut *mut c_char,
) -> HekStatus {
    catch(|| {
        if sol.is_null() || out.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        match serde_json_string(&(*sol).inner) {
            Ok(json) => give_string(out, json),
            Err(msg) => {
                set_last_error(&msg);
                HekStatus::HekErrInvalid
            }
        }
    })
}

fn serde_json_string(sol: &SolutionForm) -> Result<String, String> {
    serde_json::to_string_pretty(sol).map_err(|e| e.to_string())
}

/// Exact symbolic verification (plain product mode; canonical solutions).
/// # Safety
///
/// `sol` and `g` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn hek_verify_symbolic(
    sol: *const HekSolution,
    g: *const HekPoly,
) -> HekStatus {
    catch(|| {
        if sol.is_null() || g.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        match symbolic_verify(&(*sol).inner, &(*g).inner, VerifyMode::Plain) {
            Ok(report) => {
                if report.passed() {
                    HekStatus::HekOk
                } else {
                    set_last_error("symbolic verification failed");
                    HekStatus::HekErrVerifyFailed
                }
            }
            Err(e) => status_for(&e),
        }
    })
}

/// Seeded numeric residual verification; writes the max relative residual.
/// # Safety
///
/// `sol` and `g` must be live handles; `max_residual_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn hek_verify_numeric(
    sol: *const HekSolution,
    g: *const HekPoly,
    samples: u32,
    radius: c_double,
    tol: c_double,
    seed: u64,
    precision_bits: u32,
    max_residual_out: *mut c_double,
) -> HekStatus {
    catch(|| {
        if sol.is_null() || g.is_null() {
            set_last_error("null argument");
            return HekStatus::HekErrNullArgument;
        }
        let precision = match Precision::from_bits(precision_bits as usize) {
            Ok(p) => p,
            Err(e) => return status_for(&e),
        };
        let cfg = SampleConfig {
            samples: samples as usize,
            radius,
            tol,
            seed,
            precision,
        };
        let sol = &(*sol).inner;
        match numeric_verify(
            GradientSource::Form(sol),
            RhsSource::Poly(&(*g).inner),
            sol.nvars,
            &cfg,
        ) {
            Ok(report) => {
                let stats = report.numeric.expect("numeric verification ran");
                if !max_residual_out.is_null() {
                    *max_residual_out = stats.max_rel_residual;
                }
                if stats.pass {
                    HekStatus::HekOk
                } else {
                    set_last_error("numeric verification exceeded tolerance");
                    HekStatus::HekErrVerifyFailed
                }
            }
            Err(e) => status_for(&e),
        }
    })
}

/// Release a string returned by any `hek_*` function.
/// # Safety
///
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hek_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
