//! Preconditioned projected gradient descent for `E₊` on the cone `u ≥ −ū`.
//!
//! One step is `u ← |u − τ P R(u) + ū| − ū` with `P = (a(−Δ)^{1/2} + σ)^{−1}`
//! and `R` the Euler–Lagrange residual. Steps that raise the energy are
//! retried with `τ/2`; accepted steps grow `τ` by 10% up to `max_step`.
//! Optionally the problem is first solved on coarser grids of the same box
//! and the result is interpolated up as the starting point.

use serde::{Deserialize, Serialize};

use crate::energy::{evaluate, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::grid::{integrate, Field, Grid2D};
use crate::model::{phi_plus, reflect, s_plus, ModelParams};
use crate::operators::{h_half_norm_sq, prolong, shifted_inverse, SpectralPlan};

#[derive(Debug, Clone, Default)]
pub enum InitialGuess {
    Zero,
    /// `u⁰ = c·max(0, −V)`.
    ScaledNegV(f64),
    Provided(Field),
    /// `ScaledNegV(0.5)`.
    #[default]
    Default,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Initial step τ.
    pub step_size: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Preconditioner shift σ.
    pub sigma: f64,
    pub max_iters: usize,
    /// Target for `‖R(u)‖_{L²}`.
    pub residual_tol: f64,
    pub energy_stall_tol: f64,
    /// Consecutive stalled iterations before stopping.
    pub stall_window: usize,
    /// Number of coarser grids (each halving `n`) solved first.
    pub coarse_levels: usize,
    pub init: InitialGuess,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            step_size: 1.0,
            max_step: 4.0,
            min_step: 1e-8,
            sigma: 1.0,
            max_iters: 20_000,
            residual_tol: 1e-6,
            energy_stall_tol: 1e-12,
            stall_window: 20,
            coarse_levels: 0,
            init: InitialGuess::Default,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_size", self.step_size),
            ("max_step", self.max_step),
            ("min_step", self.min_step),
            ("sigma", self.sigma),
            ("residual_tol", self.residual_tol),
            ("energy_stall_tol", self.energy_stall_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.stall_window == 0 {
            return Err(Error::InvalidConfig("stall_window must be >= 1".into()));
        }
        if self.min_step > self.step_size || self.step_size > self.max_step {
            return Err(Error::InvalidConfig(format!(
                "need min_step <= step_size <= max_step, got {} {} {}",
                self.min_step, self.step_size, self.max_step
            )));
        }
        if let InitialGuess::ScaledNegV(c) = self.init {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::InvalidConfig(format!("initial scale must be >= 0, got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ResidualTol,
    EnergyStall,
    MaxIters,
    StepUnderflow,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: Field,
    /// `(u + ū)²`
    pub rho: Field,
    pub breakdown: EnergyBreakdown,
    pub residual_l2: f64,
    pub iterations: usize,
    /// `∫ (ρ − ρ̄)`
    pub l1_charge: f64,
    /// True only when the residual target was reached.
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Energies of the initial state and every accepted step on the finest grid.
    pub energy_history: Vec<f64>,
}

/// `R(u) = a(−Δ)^{1/2}u + |u+ū|(u + V + bU_{S(u)})`.
pub fn el_residual(u: &Field, params: &ModelParams, v: &Field, plan: &SpectralPlan) -> Result<Field> {
    let ev = evaluate(u, params, v, plan, s_plus, phi_plus)?;
    residual_from(u, params, v, &ev.half_lap, &ev.potential)
}

fn residual_from(u: &Field, params: &ModelParams, v: &Field, hu: &Field, pot: &Field) -> Result<Field> {
    let ub = params.ubar();
    let vals: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .zip(hu.values().iter().zip(pot.values()))
        .map(|((&ui, &vi), (&hi, &pi))| {
            params.a * hi + (ui + ub).abs() * (ui + vi + params.b * pi)
        })
        .collect();
    Field::new(*u.grid(), vals)
}

fn l2(f: &Field) -> f64 {
    integrate(&f.map(|x| x * x)).sqrt()
}

struct State {
    u: Field,
    breakdown: EnergyBreakdown,
    residual: Field,
}

fn state(u: Field, params: &ModelParams, v: &Field, plan: &SpectralPlan) -> Result<State> {
    let ev = evaluate(&u, params, v, plan, s_plus, phi_plus)?;
    let residual = residual_from(&u, params, v, &ev.half_lap, &ev.potential)?;
    Ok(State {
        u,
        breakdown: ev.breakdown,
        residual,
    })
}

fn initial_guess(config: &SolveConfig, v: &Field, ub: f64) -> Result<Field> {
    let u = match &config.init {
        InitialGuess::Zero => Field::zeros(*v.grid()),
        InitialGuess::ScaledNegV(c) => v.map(|x| c * (-x).max(0.0)),
        InitialGuess::Default => v.map(|x| 0.5 * (-x).max(0.0)),
        InitialGuess::Provided(f) => {
            v.grid().ensure_same(f.grid())?;
            f.clone()
        }
    };
    Ok(u.map(|x| reflect(x, ub)))
}

/// Coarse grid node `i` coincides with fine node `2i`.
fn inject(f: &Field, coarse: Grid2D) -> Field {
    let n = coarse.n();
    let fine_n = f.grid().n();
    let vals = (0..n * n)
        .map(|k| f.values()[(2 * (k / n)) * fine_n + 2 * (k % n)])
        .collect();
    Field::new(coarse, vals).expect("injected values are finite")
}

/// Minimizes `E₊` starting from `config.init`, after optional coarse solves.
pub fn minimize(params: &ModelParams, v: &Field, plan: &SpectralPlan, config: &SolveConfig) -> Result<SolveReport> {
    params.validate()?;
    config.validate()?;
    plan.grid().ensure_same(v.grid())?;
    let ub = params.ubar();
    let start = initial_guess(config, v, ub)?;
    let n = plan.grid().n();
    let levels = (0..config.coarse_levels)
        .take_while(|&k| n >> (k + 1) >= 16)
        .count();
    solve_levels(params, v, plan, config, start, levels)
}

fn solve_levels(
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
    config: &SolveConfig,
    start: Field,
    levels: usize,
) -> Result<SolveReport> {
    let start = if levels > 0 {
        let coarse_grid = Grid2D::new(plan.grid().n() / 2, plan.grid().box_length())?;
        let coarse_plan = SpectralPlan::new(coarse_grid);
        let coarse_cfg = SolveConfig {
            residual_tol: config.residual_tol * 10.0,
            ..config.clone()
        };
        // the coarse result only seeds the fine solve; its convergence is not required
        let coarse = solve_levels(
            params,
            &inject(v, coarse_grid),
            &coarse_plan,
            &coarse_cfg,
            inject(&start, coarse_grid),
            levels - 1,
        )?;
        prolong(&coarse.u, *plan.grid())?.map(|x| reflect(x, params.ubar()))
    } else {
        start
    };
    descend(params, v, plan, config, start)
}

fn descend(
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
    config: &SolveConfig,
    start: Field,
) -> Result<SolveReport> {
    let ub = params.ubar();
    // −‖V‖²/(2b) bounds E from below; the periodic norm runs a few percent low
    let bound = -h_half_norm_sq(plan, v)? / (2.0 * params.b);
    let floor = bound - 0.1 * bound.abs() - 1e-12;

    let mut cur = state(start, params, v, plan)?;
    let mut history = vec![cur.breakdown.total];
    let mut tau = config.step_size;
    let mut stalled = 0;
    let mut iterations = 0;
    let mut residual_l2 = l2(&cur.residual);
    let stop = loop {
        if residual_l2 <= config.residual_tol {
            break StopReason::ResidualTol;
        }
        if iterations >= config.max_iters {
            break StopReason::MaxIters;
        }
        let dir = shifted_inverse(plan, &cur.residual, params.a, config.sigma)?;
        let next = loop {
            let trial = cur.u.zip_map(&dir, |u, d| reflect(u - tau * d, ub))?;
            let s = state(trial, params, v, plan)?;
            if s.breakdown.total <= cur.breakdown.total {
                break Some(s);
            }
            tau *= 0.5;
            if tau < config.min_step {
                break None;
            }
        };
        let Some(next) = next else {
            break StopReason::StepUnderflow;
        };
        if next.breakdown.total < floor {
            return Err(Error::Diverged {
                energy: next.breakdown.total,
                bound,
            });
        }
        let de = cur.breakdown.total - next.breakdown.total;
        cur = next;
        iterations += 1;
        history.push(cur.breakdown.total);
        residual_l2 = l2(&cur.residual);
        tau = (tau * 1.1).min(config.max_step);
        stalled = if de.abs() <= config.energy_stall_tol { stalled + 1 } else { 0 };
        if stalled >= config.stall_window && residual_l2 > config.residual_tol {
            break StopReason::EnergyStall;
        }
    };
    let rho = cur.u.map(|x| (x + ub) * (x + ub));
    let l1_charge = integrate(&cur.u.map(|x| s_plus(x, ub)));
    Ok(SolveReport {
        rho,
        breakdown: cur.breakdown,
        residual_l2,
        iterations,
        l1_charge,
        converged: stop == StopReason::ResidualTol,
        stop_reason: stop,
        energy_history: history,
        u: cur.u,
    })
}

/// Solves along a parameter path, seeding each solve with the previous
/// converged minimizer.
pub fn continuation_sweep(
    params_list: &[ModelParams],
    v: &Field,
    plan: &SpectralPlan,
    config: &SolveConfig,
) -> Result<Vec<Result<SolveReport>>> {
    if params_list.is_empty() {
        return Err(Error::Precondition("parameter list is empty".into()));
    }
    let mut out = Vec::with_capacity(params_list.len());
    let mut seed: Option<(Field, f64)> = None;
    for params in params_list {
        let mut cfg = config.clone();
        if let Some((u, prev_ub)) = &seed {
            // carry the density, not u, across changes of ρ̄
            let ub = params.ubar();
            cfg.init = InitialGuess::Provided(u.map(|x| reflect(x + prev_ub - ub, ub)));
            cfg.coarse_levels = 0;
        }
        let res = minimize(params, v, plan, &cfg);
        if let Ok(r) = &res {
            if r.converged {
                seed = Some((r.u.clone(), params.ubar()));
            }
        }
        out.push(res);
    }
    Ok(out)
}
