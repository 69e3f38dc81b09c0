//! C ABI for `hhverify`.
//!
//! Objects are opaque handles created by `*_parse` / `*_load` / `*_run`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`HhvStatus`]; on failure a message is available from
//! [`hhv_last_error_message`] on the same thread. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`hhv_string_free`].
//!
//! No call unwinds across the boundary: a panic is reported as
//! `HHV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hhverify::cli::Scenario;
use hhverify::convexity::Tolerance;
use hhverify::dominance::{self, DominancePair};
use hhverify::hmap::{self, HParams};
use hhverify::inequalities;
use hhverify::quadrature::{self, QuadSpec};
use hhverify::report::{self, Overall, ScenarioReport};
use hhverify::{Error, FunctionExpr, Rectangle, SamplePlan};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhvStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    /// A function is undefined or non-finite somewhere it was evaluated.
    Domain = 3,
    InvalidArgument = 4,
    Io = 5,
    DegenerateWeight = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhvOverall {
    AllHold = 0,
    ViolationsFound = 1,
    InputError = 2,
}

/// The rectangle `[a, b] x [c, d]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HhvRect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Outcome of a sampled check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HhvCheckSummary {
    pub holds: bool,
    /// Smallest slack seen; negative beyond tolerance means violated.
    pub max_margin: f64,
    pub instances: u64,
}

pub struct HhvExpr(FunctionExpr);
pub struct HhvScenario(Scenario);
pub struct HhvReport(ScenarioReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(HhvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => HhvStatus::Parse,
            Error::Eval(_) => HhvStatus::Domain,
            Error::DegenerateWeight { .. } => HhvStatus::DegenerateWeight,
            _ => HhvStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HhvStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(Failure(HhvStatus::Panic, message))
    });
    match outcome {
        Ok(()) => {
            set_last_error("");
            HhvStatus::Ok
        }
        Err(Failure(status, message)) => {
            set_last_error(&message);
            status
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(HhvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(HhvStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn rect(r: HhvRect) -> Result<Rectangle, Failure> {
    Ok(Rectangle::new(r.a, r.b, r.c, r.d)?)
}

/// Parses `source` into a new expression.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_expr_parse(source: *const c_char, out_expr: *mut *mut HhvExpr) -> HhvStatus {
    guard(|| {
        let slot = out(out_expr, "out_expr")?;
        *slot = ptr::null_mut();
        let expr = hhverify::parse(text(source, "source")?).map_err(|e| Failure(HhvStatus::Parse, e.to_string()))?;
        *slot = Box::into_raw(Box::new(HhvExpr(expr)));
        Ok(())
    })
}

/// # Safety
/// `expr` must come from [`hhv_expr_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hhv_expr_free(expr: *mut HhvExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// # Safety
/// `expr` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_expr_eval(expr: *const HhvExpr, x: f64, y: f64, out_value: *mut f64) -> HhvStatus {
    guard(|| {
        let value = deref(expr, "expr")?.0.eval(x, y).map_err(Error::from)?;
        *out(out_value, "out_value")? = value;
        Ok(())
    })
}

/// Canonical source text of the expression.
///
/// # Safety
/// `expr` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_expr_to_string(expr: *const HhvExpr, out_text: *mut *mut c_char) -> HhvStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = to_c_string(deref(expr, "expr")?.0.to_string());
        Ok(())
    })
}

/// Mean value of `f` over the rectangle with the default quadrature.
///
/// # Safety
/// `f` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_mean2d(f: *const HhvExpr, domain: HhvRect, out_value: *mut f64) -> HhvStatus {
    guard(|| {
        let value = quadrature::mean2d(&deref(f, "f")?.0, &rect(domain)?, &QuadSpec::default())?;
        *out(out_value, "out_value")? = value;
        Ok(())
    })
}

/// The five chain terms `f_mid, midline_mean, mean, edge_mean, corner_avg`.
///
/// # Safety
/// `f` must be a live handle; `out_terms` must point to 5 writable doubles
/// and `out_ordered` to a writable bool.
#[no_mangle]
pub unsafe extern "C" fn hhv_hadamard_chain(
    f: *const HhvExpr,
    domain: HhvRect,
    out_terms: *mut f64,
    out_ordered: *mut bool,
) -> HhvStatus {
    guard(|| {
        if out_terms.is_null() {
            return Err(null("out_terms"));
        }
        let ordered = out(out_ordered, "out_ordered")?;
        let chain =
            inequalities::hadamard_chain(&deref(f, "f")?.0, &rect(domain)?, &QuadSpec::default(), &Tolerance::default())?;
        let terms = std::slice::from_raw_parts_mut(out_terms, chain.terms.len());
        for (slot, term) in terms.iter_mut().zip(&chain.terms) {
            *slot = term.value;
        }
        *ordered = chain.all_ordered;
        Ok(())
    })
}

/// `H(t, s)` for `f` over the rectangle.
///
/// # Safety
/// `f` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_h_eval(
    f: *const HhvExpr,
    domain: HhvRect,
    t: f64,
    s: f64,
    out_value: *mut f64,
) -> HhvStatus {
    guard(|| {
        let value = hmap::h_eval(&deref(f, "f")?.0, &rect(domain)?, HParams::new(t, s)?, &QuadSpec::default())?;
        *out(out_value, "out_value")? = value;
        Ok(())
    })
}

/// Coordinate-wise dominance of `f` by `g` with the default sample plan
/// for `seed` and the default tolerance.
///
/// # Safety
/// `f` and `g` must be live handles; `out_summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_check_dominated_coordinates(
    f: *const HhvExpr,
    g: *const HhvExpr,
    domain: HhvRect,
    seed: u64,
    out_summary: *mut HhvCheckSummary,
) -> HhvStatus {
    guard(|| {
        let pair = DominancePair::new(deref(f, "f")?.0.clone(), deref(g, "g")?.0.clone());
        let plan = SamplePlan::new(9, 32, seed)?;
        let result = dominance::check_dominated_coordinates(&pair, &rect(domain)?, &plan, &Tolerance::default())?;
        *out(out_summary, "out_summary")? = HhvCheckSummary {
            holds: result.holds(),
            max_margin: result.max_margin,
            instances: result.instances,
        };
        Ok(())
    })
}

fn scenario_failure(e: hhverify::cli::LoadError) -> Failure {
    Failure(HhvStatus::InvalidArgument, e.to_string())
}

/// Loads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_scenario` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_scenario_load(path: *const c_char, out_scenario: *mut *mut HhvScenario) -> HhvStatus {
    guard(|| {
        let slot = out(out_scenario, "out_scenario")?;
        *slot = ptr::null_mut();
        let path = std::path::Path::new(text(path, "path")?);
        let source = std::fs::read_to_string(path)
            .map_err(|e| Failure(HhvStatus::Io, format!("cannot read {}: {e}", path.display())))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let scenario = Scenario::parse(&source, &name).map_err(scenario_failure)?;
        *slot = Box::into_raw(Box::new(HhvScenario(scenario)));
        Ok(())
    })
}

/// Parses scenario text; `name` is used when the text has no `name` line.
///
/// # Safety
/// `source` and `name` must be NUL-terminated strings; `out_scenario` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_scenario_parse(
    source: *const c_char,
    name: *const c_char,
    out_scenario: *mut *mut HhvScenario,
) -> HhvStatus {
    guard(|| {
        let slot = out(out_scenario, "out_scenario")?;
        *slot = ptr::null_mut();
        let scenario = Scenario::parse(text(source, "source")?, text(name, "name")?).map_err(scenario_failure)?;
        *slot = Box::into_raw(Box::new(HhvScenario(scenario)));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hhv_scenario_free(scenario: *mut HhvScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs every check of the scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_scenario_run(scenario: *const HhvScenario, out_report: *mut *mut HhvReport) -> HhvStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        *slot = ptr::null_mut();
        let report = hhverify::cli::run(&deref(scenario, "scenario")?.0);
        *slot = Box::into_raw(Box::new(HhvReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`hhv_scenario_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hhv_report_free(report: *mut HhvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out_overall` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_report_overall(report: *const HhvReport, out_overall: *mut HhvOverall) -> HhvStatus {
    guard(|| {
        let overall = match deref(report, "report")?.0.overall {
            Overall::AllHold => HhvOverall::AllHold,
            Overall::ViolationsFound => HhvOverall::ViolationsFound,
            Overall::InputError => HhvOverall::InputError,
        };
        *out(out_overall, "out_overall")? = overall;
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_report_render_json(report: *const HhvReport, out_json: *mut *mut c_char) -> HhvStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = to_c_string(report::render_json(&deref(report, "report")?.0));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhv_report_render_text(report: *const HhvReport, out_text: *mut *mut c_char) -> HhvStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = to_c_string(report::render_text(&deref(report, "report")?.0));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hhv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies the calling thread's last error message into `buffer`, truncating
/// to `capacity - 1` bytes plus NUL. Returns the full message length
/// excluding the NUL, so a caller can size a second call.
///
/// # Safety
/// `buffer` must be null or point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hhv_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hhv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
