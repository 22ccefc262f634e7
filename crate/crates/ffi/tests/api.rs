use std::ffi::{c_char, CStr, CString};
use std::ptr;

use tfdw_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        tfdw_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn problem(n: usize, l: f64, a: f64) -> *mut TfdwProblem {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tfdw_problem_new(n, l, a, 1.0, 0.0, &mut p) }, TfdwStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn solve_round_trip() {
    let p = problem(64, 50.0, 1.0);
    let len = unsafe { tfdw_problem_field_len(p) };
    assert_eq!(len, 64 * 64);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tfdw_solve(p, ptr::null(), &mut s) }, TfdwStatus::Ok);
    let mut summary = std::mem::MaybeUninit::<TfdwSummary>::uninit();
    assert_eq!(unsafe { tfdw_solution_summary(s, summary.as_mut_ptr()) }, TfdwStatus::Ok);
    let summary = unsafe { summary.assume_init() };
    assert!(summary.converged);
    assert_eq!(summary.stop_reason, TfdwStopReason::ResidualTol);
    assert!(summary.l1_charge > 0.0 && summary.energy.total < 0.0);

    let mut u = vec![0.0; len];
    let mut rho = vec![0.0; len];
    assert_eq!(unsafe { tfdw_solution_copy_u(s, u.as_mut_ptr(), len) }, TfdwStatus::Ok);
    assert_eq!(unsafe { tfdw_solution_copy_rho(s, rho.as_mut_ptr(), len) }, TfdwStatus::Ok);
    assert!(u.iter().zip(&rho).all(|(u, r)| *r == u * u));

    let mut e = TfdwEnergy::default();
    assert_eq!(unsafe { tfdw_problem_energy(p, u.as_ptr(), len, &mut e) }, TfdwStatus::Ok);
    assert_eq!(e.total, summary.energy.total);

    assert_eq!(unsafe { tfdw_solution_copy_u(s, u.as_mut_ptr(), len - 1) }, TfdwStatus::LengthMismatch);
    assert!(last_error().contains("buffer"));
    unsafe {
        tfdw_solution_free(s);
        tfdw_problem_free(p);
    }
}

#[test]
fn options_are_honoured() {
    let p = problem(32, 30.0, 1.0);
    let mut opts = tfdw_default_solve_options();
    opts.max_iters = 2;
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tfdw_solve(p, &opts, &mut s) }, TfdwStatus::Ok);
    let mut summary = std::mem::MaybeUninit::<TfdwSummary>::uninit();
    unsafe { tfdw_solution_summary(s, summary.as_mut_ptr()) };
    let summary = unsafe { summary.assume_init() };
    assert!(!summary.converged);
    assert_eq!(summary.stop_reason, TfdwStopReason::MaxIters);
    assert_eq!(summary.iterations, 2);
    unsafe { tfdw_solution_free(s) };

    opts.sigma = -1.0;
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tfdw_solve(p, &opts, &mut s) }, TfdwStatus::InvalidArgument);
    assert!(s.is_null());
    assert!(last_error().contains("sigma"));
    unsafe { tfdw_problem_free(p) };
}

#[test]
fn bad_inputs_report_status() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tfdw_problem_new(100, 50.0, 1.0, 1.0, 0.0, &mut p) }, TfdwStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().contains("power of two"));
    assert_eq!(unsafe { tfdw_problem_new(64, 50.0, 1.0, 0.0, 0.0, &mut p) }, TfdwStatus::InvalidArgument);
    assert_eq!(unsafe { tfdw_problem_new(64, 50.0, 1.0, 1.0, 0.0, ptr::null_mut()) }, TfdwStatus::NullPointer);
    assert_eq!(unsafe { tfdw_solve(ptr::null(), ptr::null(), &mut ptr::null_mut()) }, TfdwStatus::NullPointer);
    let mut out = 0.0;
    assert_eq!(unsafe { tfdw_green_function(-1.0, 1.0, 1.0, &mut out) }, TfdwStatus::Domain);
    assert_eq!(unsafe { tfdw_decay_exponent(1.0, 1.0, 1.0, &mut out) }, TfdwStatus::Domain);
    assert_eq!(unsafe { tfdw_problem_field_len(ptr::null()) }, 0);
    unsafe {
        tfdw_problem_free(ptr::null_mut());
        tfdw_solution_free(ptr::null_mut());
    }
}

#[test]
fn charges_replace_the_potential() {
    let p = problem(32, 30.0, 1.0);
    let len = unsafe { tfdw_problem_field_len(p) };
    let u = vec![0.1; len];
    let mut before = TfdwEnergy::default();
    unsafe { tfdw_problem_energy(p, u.as_ptr(), len, &mut before) };
    let json = CString::new(r#"{"charges":[{"c":2.0,"y":[0,0],"z":0.0}]}"#).unwrap();
    assert_eq!(unsafe { tfdw_problem_set_charges_json(p, json.as_ptr()) }, TfdwStatus::Ok);
    let mut after = TfdwEnergy::default();
    unsafe { tfdw_problem_energy(p, u.as_ptr(), len, &mut after) };
    assert_eq!(after.kinetic, before.kinetic);
    assert!((after.potential_term / before.potential_term - 2.0).abs() < 1e-12);

    let bad = CString::new(r#"{"charges":[{"c":1.0,"y":[0,0],"z":-1.0}]}"#).unwrap();
    assert_eq!(unsafe { tfdw_problem_set_charges_json(p, bad.as_ptr()) }, TfdwStatus::InvalidArgument);
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { tfdw_problem_set_charges_json(p, junk.as_ptr()) }, TfdwStatus::InvalidArgument);
    unsafe { tfdw_problem_free(p) };
}

#[test]
fn scalar_functions() {
    assert!((tfdw_hardy_constant() - 4.3769).abs() < 1e-3);
    let mut g = 0.0;
    assert_eq!(unsafe { tfdw_green_function(1.0, 1.0, 1.0, &mut g) }, TfdwStatus::Ok);
    assert!(g > 0.0);
    let mut k = 0.0;
    assert_eq!(unsafe { tfdw_decay_exponent(1.0, 1.0, 6.95, &mut k) }, TfdwStatus::Ok);
    assert!((k - 2.2).abs() < 0.05);
    let v = unsafe { CStr::from_ptr(tfdw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn error_message_truncates() {
    let mut p = ptr::null_mut();
    unsafe { tfdw_problem_new(7, 1.0, 1.0, 1.0, 0.0, &mut p) };
    let full = unsafe { tfdw_last_error_message(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 8];
    assert_eq!(unsafe { tfdw_last_error_message(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[7], 0);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len(), 7);
}
