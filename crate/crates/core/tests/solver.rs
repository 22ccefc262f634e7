mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use common::{packets, rng};
use tfdw::energy::directional_derivative;
use tfdw::grid::inner;
use tfdw::model::{potential_v0, ModelParams};
use tfdw::solver::{
    continuation_sweep, el_residual, minimize, InitialGuess, SolveConfig, SolveReport, StopReason,
};
use tfdw::{make_grid, Error, Field, SpectralPlan};

fn plan(n: usize, l: f64) -> SpectralPlan {
    SpectralPlan::new(make_grid(n, l).unwrap())
}

fn params(a: f64, b: f64, rho_bar: f64) -> ModelParams {
    ModelParams::new(a, b, rho_bar).unwrap()
}

fn l2(f: &Field) -> f64 {
    inner(f, f).unwrap().sqrt()
}

/// The a = 1, b = 1, ū = 0 minimizer on a small box, shared across tests.
fn benchmark() -> &'static (SpectralPlan, Field, SolveReport) {
    static CELL: OnceLock<(SpectralPlan, Field, SolveReport)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = plan(128, 100.0);
        let v = potential_v0(*p.grid());
        let r = minimize(&params(1.0, 1.0, 0.0), &v, &p, &SolveConfig::default()).unwrap();
        (p, v, r)
    })
}

#[test]
fn residual_vanishes_at_trivial_points() {
    let p = plan(64, 32.0);
    let g = *p.grid();
    let zero = Field::zeros(g);
    let r = el_residual(&zero, &params(1.0, 1.0, 1.0), &zero, &p).unwrap();
    assert_eq!(r.max_abs(), 0.0);
    let r = el_residual(&zero, &params(1.0, 1.0, 0.0), &potential_v0(g), &p).unwrap();
    assert_eq!(r.max_abs(), 0.0);
    let other = Field::zeros(make_grid(32, 32.0).unwrap());
    assert!(matches!(
        el_residual(&other, &params(1.0, 1.0, 0.0), &zero, &p),
        Err(Error::GridMismatch { .. })
    ));
}

#[test]
fn benchmark_converges_with_small_residual() {
    let (p, v, r) = benchmark();
    assert!(r.converged, "{:?}", r.stop_reason);
    assert_eq!(r.stop_reason, StopReason::ResidualTol);
    assert!(r.residual_l2 < 1e-6);
    let again = el_residual(&r.u, &params(1.0, 1.0, 0.0), v, p).unwrap();
    assert!((l2(&again) - r.residual_l2).abs() < 1e-12);
    assert!(r.l1_charge > 0.0);
    assert_eq!(r.rho.values(), r.u.map(|x| x * x).values());
}

#[test]
fn energy_never_increases() {
    let (_, _, r) = benchmark();
    assert_eq!(r.energy_history.len(), r.iterations + 1);
    for w in r.energy_history.windows(2) {
        assert!(w[1] <= w[0]);
    }
    assert_eq!(*r.energy_history.last().unwrap(), r.breakdown.total);
}

#[test]
fn nontrivial_minimizer_has_negative_energy() {
    let (_, _, r) = benchmark();
    assert!(r.l1_charge > 1e-6);
    assert!(r.breakdown.total < 0.0);
}

#[test]
fn minimizer_is_positive_in_the_inner_box() {
    let (p, _, r) = benchmark();
    let g = p.grid();
    let quarter = g.box_length() / 4.0;
    let mut smallest = f64::INFINITY;
    for i in 0..g.n() {
        for j in 0..g.n() {
            let (x, y) = g.node(i, j);
            if x.abs() <= quarter && y.abs() <= quarter {
                smallest = smallest.min(r.u.get(i, j));
            }
        }
    }
    assert!(smallest > 0.0, "{smallest}");
}

#[test]
fn first_order_condition() {
    let (p, v, r) = benchmark();
    let tol = SolveConfig::default().residual_tol;
    let mut gen = rng(21);
    for _ in 0..10 {
        let h = packets(*p.grid(), &mut gen, 3, 20.0, (1.0, 4.0));
        let d = directional_derivative(&r.u, &h, &params(1.0, 1.0, 0.0), v, p).unwrap();
        assert!(d.abs() <= 10.0 * tol * l2(&h), "{d}");
    }
}

#[test]
fn strong_kinetic_term_gives_trivial_minimizer() {
    let p = plan(128, 100.0);
    let v = potential_v0(*p.grid());
    let r = minimize(&params(5.0, 1.0, 0.0), &v, &p, &SolveConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.u.max_abs() < 1e-6, "{}", r.u.max_abs());
    assert!(r.l1_charge < 1e-6);
}

#[test]
fn no_potential_keeps_the_background() {
    let p = plan(64, 32.0);
    let g = *p.grid();
    let start = packets(g, &mut rng(22), 3, 6.0, (1.0, 3.0));
    let cfg = SolveConfig {
        init: InitialGuess::Provided(start),
        ..SolveConfig::default()
    };
    let r = minimize(&params(1.0, 1.0, 1.0), &Field::zeros(g), &p, &cfg).unwrap();
    // the energy is quadratically small near ρ̄, so the stall test may fire first
    assert!(matches!(r.stop_reason, StopReason::ResidualTol | StopReason::EnergyStall));
    assert!(r.u.max_abs() < 1e-6, "{}", r.u.max_abs());
}

#[test]
fn iterates_stay_in_the_cone() {
    let p = plan(64, 40.0);
    let g = *p.grid();
    let ub = 0.3;
    let start = packets(g, &mut rng(23), 4, 8.0, (1.0, 3.0)).scaled(2.0);
    for iters in [1, 2, 5, 20] {
        let cfg = SolveConfig {
            init: InitialGuess::Provided(start.clone()),
            max_iters: iters,
            ..SolveConfig::default()
        };
        let r = minimize(&params(1.0, 1.0, ub * ub), &potential_v0(g), &p, &cfg).unwrap();
        assert!(r.u.min() >= -ub - 1e-12);
        assert!(r.rho.min() >= 0.0);
    }
}

#[test]
fn max_iters_reports_no_convergence() {
    let p = plan(64, 40.0);
    let cfg = SolveConfig {
        max_iters: 3,
        ..SolveConfig::default()
    };
    let r = minimize(&params(1.0, 1.0, 0.0), &potential_v0(*p.grid()), &p, &cfg).unwrap();
    assert!(!r.converged);
    assert_eq!(r.stop_reason, StopReason::MaxIters);
    assert_eq!(r.iterations, 3);
}

#[test]
fn multilevel_reaches_the_same_minimizer() {
    let p = plan(128, 100.0);
    let v = potential_v0(*p.grid());
    let cfg = SolveConfig {
        coarse_levels: 2,
        ..SolveConfig::default()
    };
    let r = minimize(&params(1.0, 1.0, 0.0), &v, &p, &cfg).unwrap();
    let (_, _, direct) = benchmark();
    assert!(r.converged);
    assert!((r.l1_charge - direct.l1_charge).abs() < 1e-5 * direct.l1_charge);
}

#[test]
fn invalid_configs_are_rejected() {
    let p = plan(64, 32.0);
    let v = potential_v0(*p.grid());
    let bad = [
        SolveConfig { step_size: 0.0, ..SolveConfig::default() },
        SolveConfig { sigma: -1.0, ..SolveConfig::default() },
        SolveConfig { max_iters: 0, ..SolveConfig::default() },
        SolveConfig { residual_tol: f64::NAN, ..SolveConfig::default() },
        SolveConfig { init: InitialGuess::ScaledNegV(-1.0), ..SolveConfig::default() },
    ];
    for cfg in bad {
        assert!(matches!(
            minimize(&params(1.0, 1.0, 0.0), &v, &p, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }
}

#[test]
fn sweep_across_the_threshold() {
    let p = plan(128, 100.0);
    let v = potential_v0(*p.grid());
    let list: Vec<_> = [1.0, 2.0, 3.0, 4.0, 4.3, 4.5]
        .iter()
        .map(|&a| params(a, 1.0, 0.0))
        .collect();
    let out = continuation_sweep(&list, &v, &p, &SolveConfig::default()).unwrap();
    let charges: Vec<f64> = out.iter().map(|r| r.as_ref().unwrap().l1_charge).collect();
    for w in charges.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{charges:?}");
    }
    for (a, q) in [4.3, 4.5].iter().zip(&charges[4..]) {
        if *a >= 4.3769 {
            assert!(*q < 1e-6, "{a}: {q}");
        }
    }
    assert!(charges[5] < 1e-6);
}

#[test]
fn single_entry_sweep_matches_minimize() {
    let p = plan(64, 40.0);
    let v = potential_v0(*p.grid());
    let pr = params(1.0, 1.0, 0.0);
    let cfg = SolveConfig::default();
    let swept = continuation_sweep(&[pr], &v, &p, &cfg).unwrap().pop().unwrap().unwrap();
    let direct = minimize(&pr, &v, &p, &cfg).unwrap();
    assert_eq!(swept.u.values(), direct.u.values());
    assert_eq!(swept.iterations, direct.iterations);
    assert!(matches!(continuation_sweep(&[], &v, &p, &cfg), Err(Error::Precondition(_))));
}

// In a finite box the induced charge stays well below 2π/b: the slowly
// decaying tail that carries the rest lies outside. See the acceptance notes.
#[test]
#[ignore = "the charge bound needs the full-plane tail; unattainable in a finite box"]
fn charge_exceeds_screening_bound() {
    let p = plan(512, 400.0);
    let v = potential_v0(*p.grid());
    let list: Vec<_> = [0.5, 1.0, 2.0].iter().map(|&b| params(1.0, b, 0.0)).collect();
    let cfg = SolveConfig { coarse_levels: 2, ..SolveConfig::default() };
    for (pr, r) in list.iter().zip(continuation_sweep(&list, &v, &p, &cfg).unwrap()) {
        let r = r.unwrap();
        if r.converged && r.l1_charge > 1e-6 {
            assert!(r.l1_charge > 2.0 * PI / pr.b, "b = {}: {}", pr.b, r.l1_charge);
        }
    }
}
