//! C ABI over the pseudolem library.
//!
//! Handles are opaque boxes created and freed here; every call returns a
//! status code from the same family the CLI uses for exit codes (0 ok,
//! 2 bad input, 3 numerical trouble, 4 internal). Details for the most
//! recent failure on the current thread are available as a string through
//! [`pl_last_error_message`]. The `*_json` entry points accept the same
//! job documents as the CLI and hand back the full report as JSON.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use pseudolem::job::{self, Command, JobSpec};
use pseudolem::{counting, ComplexValue, Error, FunctionDef, JordanCurve, ToleranceConfig};

pub const PL_OK: c_int = 0;
pub const PL_ERR_INPUT: c_int = 2;
pub const PL_ERR_NUMERIC: c_int = 3;
pub const PL_ERR_INTERNAL: c_int = 4;

pub const PL_LOCATION_INSIDE: c_int = 0;
pub const PL_LOCATION_OUTSIDE: c_int = 1;
pub const PL_LOCATION_NEAR_BOUNDARY: c_int = 2;

/// Opaque parsed function of one complex variable.
pub struct PlFunction {
    inner: FunctionDef,
}

/// Opaque sampled Jordan curve.
pub struct PlCurve {
    inner: JordanCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let owned = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn fail(e: &Error) -> c_int {
    set_error(&e.to_string());
    e.exit_code() as c_int
}

fn null_arg(what: &str) -> c_int {
    set_error(&format!("{what} must not be null"));
    PL_ERR_INPUT
}

/// Clears the thread-local error, runs the body, and converts panics into
/// `PL_ERR_INTERNAL` instead of unwinding across the ABI.
fn guarded(body: impl FnOnce() -> c_int) -> c_int {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            PL_ERR_INTERNAL
        }
    }
}

/// Non-finite coordinates mean the point at infinity on the sphere.
fn point(re: f64, im: f64) -> ComplexValue {
    ComplexValue::clamped(Complex64::new(re, im))
}

fn write_value(value: &ComplexValue, out_re: *mut f64, out_im: *mut f64) {
    let (re, im) = match value.as_finite() {
        Some(z) => (z.re, z.im),
        None => (f64::INFINITY, f64::INFINITY),
    };
    unsafe {
        *out_re = re;
        *out_im = im;
    }
}

/// Message for the most recent failing call on this thread, or null after
/// a success. The pointer stays valid until the next call on this thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn pl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Frees a string returned by one of the `*_json` entry points.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if s.is_null() {
        return;
    }
    drop(unsafe { CString::from_raw(s) });
}

/// Parses an expression in `z` (e.g. `"z^2 * (1 - 0.25*z) / (z - 0.25)"`)
/// into a function handle. On success writes the handle to `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn pl_function_parse(
    text: *const c_char,
    out: *mut *mut PlFunction,
) -> c_int {
    guarded(|| {
        if text.is_null() {
            return null_arg("text");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("text is not valid UTF-8");
                return PL_ERR_INPUT;
            }
        };
        match FunctionDef::parse(text) {
            Ok(def) => {
                unsafe { *out = Box::into_raw(Box::new(PlFunction { inner: def })) };
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `f` must be null or an unfreed handle from [`pl_function_parse`].
#[no_mangle]
pub unsafe extern "C" fn pl_function_free(f: *mut PlFunction) {
    if f.is_null() {
        return;
    }
    drop(unsafe { Box::from_raw(f) });
}

/// Evaluates f(z). Non-finite inputs mean the point at infinity, and an
/// infinite value comes back as +inf in both output slots.
///
/// # Safety
/// `f` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_function_eval(
    f: *const PlFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> c_int {
    guarded(|| {
        if f.is_null() {
            return null_arg("f");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_arg("out_re/out_im");
        }
        match unsafe { &*f }.inner.eval(point(re, im)) {
            Ok(value) => {
                write_value(&value, out_re, out_im);
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Evaluates f'(z), with the same conventions as [`pl_function_eval`].
///
/// # Safety
/// `f` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_function_eval_derivative(
    f: *const PlFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> c_int {
    guarded(|| {
        if f.is_null() {
            return null_arg("f");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_arg("out_re/out_im");
        }
        match unsafe { &*f }.inner.eval_derivative(point(re, im)) {
            Ok(value) => {
                write_value(&value, out_re, out_im);
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

fn curve_out(result: pseudolem::Result<JordanCurve>, out: *mut *mut PlCurve) -> c_int {
    match result {
        Ok(curve) => {
            unsafe { *out = Box::into_raw(Box::new(PlCurve { inner: curve })) };
            PL_OK
        }
        Err(e) => fail(&e),
    }
}

/// Builds a circle sampled at `samples` points.
///
/// # Safety
/// `out` must be a valid destination.
#[no_mangle]
pub unsafe extern "C" fn pl_curve_circle(
    center_re: f64,
    center_im: f64,
    radius: f64,
    samples: usize,
    out: *mut *mut PlCurve,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        curve_out(
            JordanCurve::circle(Complex64::new(center_re, center_im), radius, samples),
            out,
        )
    })
}

/// Builds the outward offset of a simple polygon with circular-arc corners.
/// `vertices` holds `vertex_count` interleaved (re, im) pairs; `density` is
/// samples per unit of arc length.
///
/// # Safety
/// `vertices` must point to `2 * vertex_count` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pl_curve_rounded_polygon(
    vertices: *const f64,
    vertex_count: usize,
    fillet_radius: f64,
    density: f64,
    out: *mut *mut PlCurve,
) -> c_int {
    guarded(|| {
        if vertices.is_null() {
            return null_arg("vertices");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let flat = unsafe { std::slice::from_raw_parts(vertices, 2 * vertex_count) };
        let vs: Vec<Complex64> = flat
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        curve_out(
            JordanCurve::rounded_polygon(&vs, fillet_radius, density),
            out,
        )
    })
}

/// Builds a closed curve through the listed points (`point_count`
/// interleaved (re, im) pairs, first point not repeated).
///
/// # Safety
/// `points` must point to `2 * point_count` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pl_curve_from_samples(
    points: *const f64,
    point_count: usize,
    out: *mut *mut PlCurve,
) -> c_int {
    guarded(|| {
        if points.is_null() {
            return null_arg("points");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let flat = unsafe { std::slice::from_raw_parts(points, 2 * point_count) };
        let ps: Vec<Complex64> = flat
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        curve_out(JordanCurve::from_samples(&ps), out)
    })
}

/// # Safety
/// `curve` must be null or an unfreed handle from a `pl_curve_*` builder.
#[no_mangle]
pub unsafe extern "C" fn pl_curve_free(curve: *mut PlCurve) {
    if curve.is_null() {
        return;
    }
    drop(unsafe { Box::from_raw(curve) });
}

/// Winding number of the curve about (re, im). Fails with
/// `PL_ERR_NUMERIC` when the point is too close to the curve.
///
/// # Safety
/// `curve` must be a live handle; `out_winding` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_winding_number(
    curve: *const PlCurve,
    re: f64,
    im: f64,
    out_winding: *mut i64,
) -> c_int {
    guarded(|| {
        if curve.is_null() {
            return null_arg("curve");
        }
        if out_winding.is_null() {
            return null_arg("out_winding");
        }
        match unsafe { &*curve }.inner.winding_number(Complex64::new(re, im)) {
            Ok(w) => {
                unsafe { *out_winding = w };
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Locates (re, im) relative to the curve: `PL_LOCATION_INSIDE`,
/// `PL_LOCATION_OUTSIDE`, or `PL_LOCATION_NEAR_BOUNDARY`, plus the
/// distance to the curve. Either output may be null to skip it.
///
/// # Safety
/// `curve` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_locate_point(
    curve: *const PlCurve,
    re: f64,
    im: f64,
    out_location: *mut c_int,
    out_distance: *mut f64,
) -> c_int {
    guarded(|| {
        if curve.is_null() {
            return null_arg("curve");
        }
        let cfg = ToleranceConfig::default();
        match unsafe { &*curve }
            .inner
            .locate_point(Complex64::new(re, im), &cfg)
        {
            Ok(loc) => {
                use pseudolem::geometry::Location;
                let code = match loc.location {
                    Location::Inside => PL_LOCATION_INSIDE,
                    Location::Outside => PL_LOCATION_OUTSIDE,
                    Location::NearBoundary => PL_LOCATION_NEAR_BOUNDARY,
                };
                if !out_location.is_null() {
                    unsafe { *out_location = code };
                }
                if !out_distance.is_null() {
                    unsafe { *out_distance = loc.distance };
                }
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// N_f(w): solutions of f(z) = w strictly inside the curve, counted with
/// multiplicity, by the argument principle. Non-finite (w_re, w_im) counts
/// poles instead; a w on the image of the curve falls back to isolating
/// the solutions directly.
///
/// # Safety
/// `f` and `s` must be live handles; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_count_preimages(
    f: *const PlFunction,
    s: *const PlCurve,
    w_re: f64,
    w_im: f64,
    out_count: *mut u32,
) -> c_int {
    guarded(|| {
        if f.is_null() || s.is_null() {
            return null_arg("f/s");
        }
        if out_count.is_null() {
            return null_arg("out_count");
        }
        let cfg = ToleranceConfig::default();
        let f = unsafe { &*f };
        let s = unsafe { &*s };
        match counting::count_preimages_robust(&f.inner, &s.inner, point(w_re, w_im), &cfg) {
            Ok(report) => {
                unsafe { *out_count = report.count };
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of poles of f strictly inside the curve, with multiplicity.
///
/// # Safety
/// `f` and `s` must be live handles; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_count_poles(
    f: *const PlFunction,
    s: *const PlCurve,
    out_count: *mut u32,
) -> c_int {
    guarded(|| {
        if f.is_null() || s.is_null() {
            return null_arg("f/s");
        }
        if out_count.is_null() {
            return null_arg("out_count");
        }
        let cfg = ToleranceConfig::default();
        match counting::count_poles_in(&unsafe { &*f }.inner, &unsafe { &*s }.inner, &cfg) {
            Ok(count) => {
                unsafe { *out_count = count };
                PL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn run_job(
    command: Command,
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    if job_json.is_null() {
        return null_arg("job_json");
    }
    if out_report_json.is_null() {
        return null_arg("out_report_json");
    }
    let text = match unsafe { CStr::from_ptr(job_json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("job_json is not valid UTF-8");
            return PL_ERR_INPUT;
        }
    };
    let job: JobSpec = match serde_json::from_str(text) {
        Ok(job) => job,
        Err(e) => return fail(&Error::from(e)),
    };
    let (report, code) = job::run(command, &job, None, false);
    if code != 0 {
        let message = report.verdict["message"]
            .as_str()
            .unwrap_or("see the report verdict");
        set_error(message);
    }
    match serde_json::to_string_pretty(&report) {
        Ok(s) => {
            let owned = CString::new(s.replace('\0', " ")).unwrap_or_default();
            unsafe { *out_report_json = owned.into_raw() };
            code
        }
        Err(e) => fail(&Error::from(e)),
    }
}

/// Runs a pseudo-lemniscate classification job (same JSON schema as the
/// CLI) and writes the report JSON to `*out_report_json`. The status code
/// matches the CLI exit code; the report is produced either way and must
/// be released with [`pl_string_free`].
///
/// # Safety
/// `job_json` must be NUL-terminated; `out_report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_classify_json(
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    guarded(|| unsafe { run_job(Command::Classify, job_json, out_report_json) })
}

/// Runs a non-Jordan-image test job. See [`pl_classify_json`].
///
/// # Safety
/// `job_json` must be NUL-terminated; `out_report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_non_jordan_json(
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    guarded(|| unsafe { run_job(Command::NonJordan, job_json, out_report_json) })
}

/// Runs a preimage-curve tracing job. See [`pl_classify_json`].
///
/// # Safety
/// `job_json` must be NUL-terminated; `out_report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_trace_json(
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    guarded(|| unsafe { run_job(Command::Trace, job_json, out_report_json) })
}

/// Runs a zero/pole isolation job. See [`pl_classify_json`].
///
/// # Safety
/// `job_json` must be NUL-terminated; `out_report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_locate_json(
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    guarded(|| unsafe { run_job(Command::Locate, job_json, out_report_json) })
}

/// Runs a preimage-counting job. See [`pl_classify_json`].
///
/// # Safety
/// `job_json` must be NUL-terminated; `out_report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_count_json(
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    guarded(|| unsafe { run_job(Command::Count, job_json, out_report_json) })
}

/// Runs a Blaschke-ratio model fit job. See [`pl_classify_json`].
///
/// # Safety
/// `job_json` must be NUL-terminated; `out_report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_blaschke_model_json(
    job_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> c_int {
    guarded(|| unsafe { run_job(Command::BlaschkeModel, job_json, out_report_json) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn parse(text: &str) -> *mut PlFunction {
        let text = CString::new(text).unwrap();
        let mut handle = ptr::null_mut();
        let code = unsafe { pl_function_parse(text.as_ptr(), &mut handle) };
        assert_eq!(code, PL_OK);
        assert!(!handle.is_null());
        handle
    }

    fn unit_circle() -> *mut PlCurve {
        let mut handle = ptr::null_mut();
        let code = unsafe { pl_curve_circle(0.0, 0.0, 1.0, 256, &mut handle) };
        assert_eq!(code, PL_OK);
        handle
    }

    fn last_error() -> String {
        let ptr = pl_last_error_message();
        assert!(!ptr.is_null());
        unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_owned()
    }

    #[test]
    fn parse_eval_roundtrip() {
        let f = parse("z^2");
        let (mut re, mut im) = (0.0, 0.0);
        let code = unsafe { pl_function_eval(f, 1.0, 1.0, &mut re, &mut im) };
        assert_eq!(code, PL_OK);
        assert!((re - 0.0).abs() < 1e-12 && (im - 2.0).abs() < 1e-12);

        let code = unsafe { pl_function_eval_derivative(f, 1.0, 1.0, &mut re, &mut im) };
        assert_eq!(code, PL_OK);
        assert!((re - 2.0).abs() < 1e-12 && (im - 2.0).abs() < 1e-12);

        // Pole: 1/z at 0 comes back as the point at infinity.
        let g = parse("1/z");
        let code = unsafe { pl_function_eval(g, 0.0, 0.0, &mut re, &mut im) };
        assert_eq!(code, PL_OK);
        assert!(re.is_infinite() && im.is_infinite());

        unsafe {
            pl_function_free(f);
            pl_function_free(g);
        }
    }

    #[test]
    fn null_and_bad_input_are_input_errors() {
        let mut handle = ptr::null_mut();
        assert_eq!(
            unsafe { pl_function_parse(ptr::null(), &mut handle) },
            PL_ERR_INPUT
        );
        assert!(last_error().contains("null"));

        let text = CString::new("z + ").unwrap();
        assert_eq!(
            unsafe { pl_function_parse(text.as_ptr(), &mut handle) },
            PL_ERR_INPUT
        );
        assert!(!last_error().is_empty());

        // A successful call clears the message.
        let f = parse("z");
        assert!(pl_last_error_message().is_null());
        unsafe { pl_function_free(f) };
    }

    #[test]
    fn winding_and_location_on_the_unit_circle() {
        let curve = unit_circle();
        let mut w = 0i64;
        assert_eq!(unsafe { pl_winding_number(curve, 0.0, 0.0, &mut w) }, PL_OK);
        assert_eq!(w, 1);
        assert_eq!(unsafe { pl_winding_number(curve, 3.0, 0.0, &mut w) }, PL_OK);
        assert_eq!(w, 0);

        let (mut loc, mut dist) = (-1, -1.0);
        assert_eq!(
            unsafe { pl_locate_point(curve, 0.1, 0.0, &mut loc, &mut dist) },
            PL_OK
        );
        assert_eq!(loc, PL_LOCATION_INSIDE);
        assert!((dist - 0.9).abs() < 1e-3);
        assert_eq!(
            unsafe { pl_locate_point(curve, 2.0, 0.0, &mut loc, ptr::null_mut()) },
            PL_OK
        );
        assert_eq!(loc, PL_LOCATION_OUTSIDE);

        unsafe { pl_curve_free(curve) };
    }

    #[test]
    fn preimage_and_pole_counts() {
        let f = parse("z^2");
        let curve = unit_circle();
        let mut count = 99u32;
        assert_eq!(
            unsafe { pl_count_preimages(f, curve, 0.25, 0.0, &mut count) },
            PL_OK
        );
        assert_eq!(count, 2);
        assert_eq!(
            unsafe { pl_count_preimages(f, curve, 9.0, 0.0, &mut count) },
            PL_OK
        );
        assert_eq!(count, 0);
        // w at infinity counts poles; z^2 has none inside.
        assert_eq!(
            unsafe { pl_count_preimages(f, curve, f64::INFINITY, 0.0, &mut count) },
            PL_OK
        );
        assert_eq!(count, 0);

        let g = parse("1/z");
        assert_eq!(unsafe { pl_count_poles(g, curve, &mut count) }, PL_OK);
        assert_eq!(count, 1);

        unsafe {
            pl_function_free(f);
            pl_function_free(g);
            pl_curve_free(curve);
        }
    }

    #[test]
    fn rounded_polygon_and_samples_builders() {
        let square = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let mut curve = ptr::null_mut();
        assert_eq!(
            unsafe { pl_curve_rounded_polygon(square.as_ptr(), 4, 0.05, 24.0, &mut curve) },
            PL_OK
        );
        let mut w = 0i64;
        assert_eq!(unsafe { pl_winding_number(curve, 0.5, 0.5, &mut w) }, PL_OK);
        assert_eq!(w, 1);
        unsafe { pl_curve_free(curve) };

        // Too few vertices is an input error.
        assert_eq!(
            unsafe { pl_curve_rounded_polygon(square.as_ptr(), 2, 0.05, 24.0, &mut curve) },
            PL_ERR_INPUT
        );

        let triangle = [0.0, 0.0, 4.0, 0.0, 0.0, 4.0];
        assert_eq!(
            unsafe { pl_curve_from_samples(triangle.as_ptr(), 3, &mut curve) },
            PL_OK
        );
        assert_eq!(unsafe { pl_winding_number(curve, 1.0, 1.0, &mut w) }, PL_OK);
        assert_eq!(w, 1);
        unsafe { pl_curve_free(curve) };
    }

    fn run_json(run: unsafe extern "C" fn(*const c_char, *mut *mut c_char) -> c_int, job: &str) -> (c_int, String) {
        let job = CString::new(job).unwrap();
        let mut out = ptr::null_mut();
        let code = unsafe { run(job.as_ptr(), &mut out) };
        assert!(!out.is_null());
        let report = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
        unsafe { pl_string_free(out) };
        (code, report)
    }

    #[test]
    fn classify_json_round_trip() {
        let (code, report) = run_json(
            pl_classify_json,
            r#"{"function": "1/z", "curve_s": {"kind": "circle", "center": [0, 0], "radius": 1}}"#,
        );
        assert_eq!(code, PL_OK);
        assert!(report.contains("\"kind\": \"pseudo_lemniscate\""));
    }

    #[test]
    fn job_errors_surface_as_status_codes() {
        let job = CString::new("{not json").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { pl_classify_json(job.as_ptr(), &mut out) },
            PL_ERR_INPUT
        );
        assert!(out.is_null());

        // Well-formed job but no curve: still a report, input status.
        let (code, report) = run_json(pl_classify_json, r#"{"function": "z"}"#);
        assert_eq!(code, PL_ERR_INPUT);
        assert!(report.contains("\"kind\": \"error\""));
        assert!(!last_error().is_empty());
    }

    #[test]
    fn blaschke_model_json_identifies_a_ratio() {
        let (code, report) = run_json(
            pl_blaschke_model_json,
            r#"{"function": "z * (z - 0.5) / (1 - 0.5*z)"}"#,
        );
        assert_eq!(code, PL_OK);
        assert!(report.contains("\"kind\": \"blaschke_model\""));

        let (code, report) = run_json(pl_blaschke_model_json, r#"{"function": "z + 2"}"#);
        assert_eq!(code, PL_OK);
        assert!(report.contains("not_boundary_unimodular"));
    }

    #[test]
    fn count_json_handles_infinity() {
        let (code, report) = run_json(
            pl_count_json,
            r#"{"function": "z^2", "curve_s": {"kind": "circle", "center": [0, 0], "radius": 1},
                "points": [[0.25, 0]], "include_infinity": true}"#,
        );
        assert_eq!(code, PL_OK);
        assert!(report.contains("\"count\": 2"));
    }

    #[test]
    fn generated_header_covers_the_surface() {
        let header = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/include/pseudolem.h"
        ))
        .expect("build.rs writes the header");
        for symbol in [
            "pl_function_parse",
            "pl_function_eval",
            "pl_curve_circle",
            "pl_winding_number",
            "pl_count_preimages",
            "pl_classify_json",
            "pl_non_jordan_json",
            "pl_trace_json",
            "pl_blaschke_model_json",
            "pl_string_free",
            "pl_last_error_message",
            "PL_ERR_NUMERIC",
        ] {
            assert!(header.contains(symbol), "header is missing {symbol}");
        }
    }
}
