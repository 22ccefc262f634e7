//! C ABI over the `tfdw` solver.
//!
//! Every fallible call returns a [`TfdwStatus`]. On failure the message is
//! kept per thread and can be read with [`tfdw_last_error_message`].
//! Problems and solutions are opaque handles owned by the caller and released
//! with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tfdw::analysis::{green_function, hardy_constant, solve_decay_exponent};
use tfdw::energy::energy;
use tfdw::model::{potential_from_charges, potential_v0, ChargeMeasure, ModelParams};
use tfdw::solver::{minimize, SolveConfig, SolveReport, StopReason};
use tfdw::{make_grid, Error, Field, SpectralPlan};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdwStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad grid, model parameters, solver options or charge description.
    InvalidArgument = 2,
    /// Buffer length does not match the grid.
    LengthMismatch = 3,
    /// Domain or overflow error in a special function, or a failed root solve.
    Domain = 4,
    /// The energy left its a priori bounds during a solve.
    Diverged = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdwStopReason {
    ResidualTol = 0,
    EnergyStall = 1,
    MaxIters = 2,
    StepUnderflow = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfdwSolveOptions {
    pub step_size: f64,
    pub max_step: f64,
    pub sigma: f64,
    pub residual_tol: f64,
    pub max_iters: usize,
    pub coarse_levels: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TfdwEnergy {
    pub kinetic: f64,
    pub phi_term: f64,
    pub potential_term: f64,
    pub coulomb_term: f64,
    pub total: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfdwSummary {
    pub energy: TfdwEnergy,
    pub l1_charge: f64,
    pub residual_l2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: TfdwStopReason,
}

/// Grid, model parameters and sampled external potential.
pub struct TfdwProblem {
    plan: SpectralPlan,
    params: ModelParams,
    v: Field,
}

pub struct TfdwSolution {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TfdwStatus {
    match e {
        Error::FieldLength { .. } | Error::GridMismatch { .. } => TfdwStatus::LengthMismatch,
        Error::Pole(_)
        | Error::Domain { .. }
        | Error::Overflow { .. }
        | Error::RhsNonNegative(_)
        | Error::NonFinite(_) => TfdwStatus::Domain,
        Error::Diverged { .. } => TfdwStatus::Diverged,
        Error::InvalidGridSize(_)
        | Error::NonPositiveLength(_)
        | Error::NonPositiveInput(_)
        | Error::InvalidParams(_)
        | Error::InvalidConfig(_)
        | Error::EmptyMeasure
        | Error::ChargeBelowLayer(_)
        | Error::Json(_) => TfdwStatus::InvalidArgument,
        _ => TfdwStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic and mapping it to a status.
fn guard(f: impl FnOnce() -> Result<(), (TfdwStatus, String)>) -> TfdwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfdwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside tfdw".into());
            TfdwStatus::Internal
        }
    }
}

fn lift(e: Error) -> (TfdwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TfdwStatus, String) {
    (TfdwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], (TfdwStatus, String)> {
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tfdw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of the calling thread into `buf`,
/// truncated and NUL-terminated. Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tfdw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let k = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, k);
            *buf.add(k) = 0;
        }
        msg.len()
    })
}

#[no_mangle]
pub extern "C" fn tfdw_default_solve_options() -> TfdwSolveOptions {
    let d = SolveConfig::default();
    TfdwSolveOptions {
        step_size: d.step_size,
        max_step: d.max_step,
        sigma: d.sigma,
        residual_tol: d.residual_tol,
        max_iters: d.max_iters,
        coarse_levels: d.coarse_levels,
    }
}

/// Creates a problem on an `n × n` grid of side `box_length` with the
/// potential of a unit point charge one unit above the origin.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn tfdw_problem_new(
    n: usize,
    box_length: f64,
    a: f64,
    b: f64,
    rho_bar: f64,
    out: *mut *mut TfdwProblem,
) -> TfdwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = make_grid(n, box_length).map_err(lift)?;
        let params = ModelParams::new(a, b, rho_bar).map_err(lift)?;
        let problem = TfdwProblem { plan: SpectralPlan::new(grid), params, v: potential_v0(grid) };
        *out = Box::into_raw(Box::new(problem));
        Ok(())
    })
}

/// Replaces the external potential by that of the charges in `json`, in the
/// form `{"charges": [{"c": 1.0, "y": [0, 0], "z": 0.0}]}` where `z` is the
/// height above the unit reference distance.
///
/// # Safety
/// `problem` must be a live handle and `json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tfdw_problem_set_charges_json(problem: *mut TfdwProblem, json: *const c_char) -> TfdwStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (TfdwStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let mu = ChargeMeasure::from_json_str(text).map_err(lift)?;
        p.v = potential_from_charges(*p.plan.grid(), &mu).map_err(lift)?;
        Ok(())
    })
}

/// Number of grid values (`n²`) in fields of this problem, 0 for null.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tfdw_problem_field_len(problem: *const TfdwProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.plan.grid().n().pow(2))
}

/// Energy of the field `u` (row-major, `n²` values).
///
/// # Safety
/// `problem` must be a live handle, `u` must point to `len` readable values
/// and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn tfdw_problem_energy(
    problem: *const TfdwProblem,
    u: *const f64,
    len: usize,
    out: *mut TfdwEnergy,
) -> TfdwStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let u = Field::new(*p.plan.grid(), slice(u, len, "u")?.to_vec()).map_err(lift)?;
        *out = to_energy(&energy(&u, &p.params, &p.v, &p.plan).map_err(lift)?);
        Ok(())
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfdw_problem_free(problem: *mut TfdwProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Minimizes the energy. `options` may be null for defaults. A solution is
/// returned even when the solver stops without converging; check the summary.
///
/// # Safety
/// `problem` must be a live handle, `options` null or valid, and `out` a
/// valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn tfdw_solve(
    problem: *const TfdwProblem,
    options: *const TfdwSolveOptions,
    out: *mut *mut TfdwSolution,
) -> TfdwStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = options.as_ref().copied().unwrap_or_else(|| tfdw_default_solve_options());
        let cfg = SolveConfig {
            step_size: o.step_size,
            max_step: o.max_step,
            sigma: o.sigma,
            residual_tol: o.residual_tol,
            max_iters: o.max_iters,
            coarse_levels: o.coarse_levels,
            ..SolveConfig::default()
        };
        let report = minimize(&p.params, &p.v, &p.plan, &cfg).map_err(lift)?;
        *out = Box::into_raw(Box::new(TfdwSolution { report }));
        Ok(())
    })
}

fn to_energy(b: &tfdw::energy::EnergyBreakdown) -> TfdwEnergy {
    TfdwEnergy {
        kinetic: b.kinetic,
        phi_term: b.phi_term,
        potential_term: b.potential_term,
        coulomb_term: b.coulomb_term,
        total: b.total,
    }
}

/// # Safety
/// `solution` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn tfdw_solution_summary(solution: *const TfdwSolution, out: *mut TfdwSummary) -> TfdwStatus {
    guard(|| {
        let r = &solution.as_ref().ok_or_else(|| null("solution"))?.report;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = TfdwSummary {
            energy: to_energy(&r.breakdown),
            l1_charge: r.l1_charge,
            residual_l2: r.residual_l2,
            iterations: r.iterations,
            converged: r.converged,
            stop_reason: match r.stop_reason {
                StopReason::ResidualTol => TfdwStopReason::ResidualTol,
                StopReason::EnergyStall => TfdwStopReason::EnergyStall,
                StopReason::MaxIters => TfdwStopReason::MaxIters,
                StopReason::StepUnderflow => TfdwStopReason::StepUnderflow,
            },
        };
        Ok(())
    })
}

unsafe fn copy_field(solution: *const TfdwSolution, buf: *mut f64, len: usize, pick: fn(&SolveReport) -> &Field) -> TfdwStatus {
    guard(|| {
        let r = &solution.as_ref().ok_or_else(|| null("solution"))?.report;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let values = pick(r).values();
        if values.len() != len {
            return Err((
                TfdwStatus::LengthMismatch,
                format!("buffer holds {len} values, field has {}", values.len()),
            ));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
        Ok(())
    })
}

/// Copies the minimizer `u` (row-major, `n²` values) into `buf`.
///
/// # Safety
/// `solution` must be a live handle and `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn tfdw_solution_copy_u(solution: *const TfdwSolution, buf: *mut f64, len: usize) -> TfdwStatus {
    copy_field(solution, buf, len, |r| &r.u)
}

/// Copies the density `ρ = (u + ū)²` into `buf`.
///
/// # Safety
/// As for [`tfdw_solution_copy_u`].
#[no_mangle]
pub unsafe extern "C" fn tfdw_solution_copy_rho(solution: *const TfdwSolution, buf: *mut f64, len: usize) -> TfdwStatus {
    copy_field(solution, buf, len, |r| &r.rho)
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfdw_solution_free(solution: *mut TfdwSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Critical von Weizsäcker coefficient above which the response is trivial.
#[no_mangle]
pub extern "C" fn tfdw_hardy_constant() -> f64 {
    hardy_constant()
}

/// Linear-response Green's function `G_{a,c}(r)`.
///
/// # Safety
/// `out` must be valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn tfdw_green_function(a: f64, c: f64, r: f64, out: *mut f64) -> TfdwStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = green_function(a, c, r).map_err(lift)?;
        Ok(())
    })
}

/// Predicted density decay exponent for total induced charge `l1_charge`.
///
/// # Safety
/// `out` must be valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn tfdw_decay_exponent(a: f64, b: f64, l1_charge: f64, out: *mut f64) -> TfdwStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = solve_decay_exponent(a, b, l1_charge).map_err(lift)?.rho_exponent;
        Ok(())
    })
}
