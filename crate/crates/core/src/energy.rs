//! Total energy in the `u` variable, its positive-cone variant `E₊`, and
//! first and second variations.
//!
//! Fields are taken to vanish outside the box. The kinetic term is the
//! `Ḣ^{1/2}(ℝ²)` seminorm of that extension and the Coulomb term is
//! `(b/2)⟨S, U⟩` with `U` the free-space Riesz potential of `S(u)`; no mean
//! is removed from `S`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner, integrate, Field};
use crate::model::{
    phi_of_u, phi_plus, phi_prime, s_of_u, s_plus, s_prime, ModelParams,
};
use crate::operators::{free_half_laplacian, h_half_norm_sq, riesz_potential, SpectralPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub phi_term: f64,
    pub potential_term: f64,
    pub coulomb_term: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(kinetic: f64, phi_term: f64, potential_term: f64, coulomb_term: f64) -> Self {
        Self {
            kinetic,
            phi_term,
            potential_term,
            coulomb_term,
            total: kinetic + phi_term + potential_term + coulomb_term,
        }
    }
}

/// Energy together with the fields needed for gradients.
pub(crate) struct Evaluation {
    pub breakdown: EnergyBreakdown,
    /// `(−Δ)^{1/2} u`
    pub half_lap: Field,
    /// Riesz potential of `S(u)`
    pub potential: Field,
}

fn check_grids(u: &Field, v: &Field, plan: &SpectralPlan) -> Result<()> {
    plan.grid().ensure_same(u.grid())?;
    plan.grid().ensure_same(v.grid())
}

pub(crate) fn evaluate(
    u: &Field,
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
    s: impl Fn(f64, f64) -> f64,
    phi: impl Fn(f64, f64) -> f64,
) -> Result<Evaluation> {
    check_grids(u, v, plan)?;
    let ub = params.ubar();
    let half_lap = free_half_laplacian(plan, u)?;
    let kinetic = params.a * inner(u, &half_lap)?;
    let s_field = u.map(|x| s(x, ub));
    let phi_term = integrate(&u.map(|x| phi(x, ub)));
    let potential_term = inner(v, &s_field)?;
    let potential = riesz_potential(plan, &s_field)?;
    let coulomb_term = 0.5 * params.b * inner(&s_field, &potential)?;
    Ok(Evaluation {
        breakdown: EnergyBreakdown::new(kinetic, phi_term, potential_term, coulomb_term),
        half_lap,
        potential,
    })
}

/// `E(u) = a‖u‖²_{Ḣ^{1/2}} + ∫Φ(u) + ∫V S(u) + (b/2)⟨S(u), U_{S(u)}⟩`.
pub fn energy(u: &Field, params: &ModelParams, v: &Field, plan: &SpectralPlan) -> Result<EnergyBreakdown> {
    Ok(evaluate(u, params, v, plan, s_of_u, phi_of_u)?.breakdown)
}

/// `E₊` with `S₊(u) = 2ūu + u²` and the matching `Φ₊`.
pub fn energy_plus(
    u: &Field,
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
) -> Result<EnergyBreakdown> {
    Ok(evaluate(u, params, v, plan, s_plus, phi_plus)?.breakdown)
}

/// `dE(u)[h] = 2a⟨(−Δ)^{1/2}u, h⟩ + ∫Φ'(u)h + ∫V S'(u)h + b∫U_{S(u)} S'(u)h`.
pub fn directional_derivative(
    u: &Field,
    h: &Field,
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
) -> Result<f64> {
    plan.grid().ensure_same(h.grid())?;
    let ev = evaluate(u, params, v, plan, s_of_u, phi_of_u)?;
    let ub = params.ubar();
    let mut total = 0.0;
    for k in 0..u.values().len() {
        let ui = u.values()[k];
        let grad = 2.0 * params.a * ev.half_lap.values()[k]
            + phi_prime(ui, ub)
            + (v.values()[k] + params.b * ev.potential.values()[k]) * s_prime(ui, ub);
        total += grad * h.values()[k];
    }
    Ok(total * u.grid().cell_area())
}

/// Second variation of the kinetic part about a uniform background `ρ₀`:
/// `(C_W/4)|ρ₀|⁻¹‖δρ‖²_{Ḣ^{1/2}} + (C_TFD/4)|ρ₀|^{−1/2}‖δρ‖²_{L²}`.
pub fn second_variation_kinetic(
    delta_rho: &Field,
    rho0: f64,
    c_w: f64,
    c_tfd: f64,
    plan: &SpectralPlan,
) -> Result<f64> {
    if rho0 == 0.0 {
        return Err(Error::ZeroBackground);
    }
    let r = rho0.abs();
    let w = h_half_norm_sq(plan, delta_rho)?;
    let l2 = integrate(&delta_rho.map(|x| x * x));
    Ok(0.25 * c_w / r * w + 0.25 * c_tfd / r.sqrt() * l2)
}

/// Energy of a nonnegative density, `E(ρ) = E(√ρ − √ρ̄)`.
pub fn energy_of_density(
    rho: &Field,
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
) -> Result<EnergyBreakdown> {
    if let Some(i) = rho.values().iter().position(|&x| x < 0.0) {
        return Err(Error::NegativeDensity(i));
    }
    let ub = params.ubar();
    energy(&rho.map(|x| x.sqrt() - ub), params, v, plan)
}

/// Absolute slack of the convexity check, relative to `1 + |E|`.
pub const CONVEXITY_SLACK: f64 = 1e-9;

/// Whether `E(tρ₀ + (1−t)ρ₁) ≤ tE(ρ₀) + (1−t)E(ρ₁)` up to [`CONVEXITY_SLACK`].
pub fn energy_convexity_check(
    rho0: &Field,
    rho1: &Field,
    params: &ModelParams,
    v: &Field,
    plan: &SpectralPlan,
    t: f64,
) -> Result<bool> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition(format!("t must lie in (0, 1), got {t}")));
    }
    let e0 = energy_of_density(rho0, params, v, plan)?.total;
    let e1 = energy_of_density(rho1, params, v, plan)?.total;
    let mix = rho0.lincomb(t, rho1, 1.0 - t)?;
    let em = energy_of_density(&mix, params, v, plan)?.total;
    let rhs = t * e0 + (1.0 - t) * e1;
    Ok(em <= rhs + CONVEXITY_SLACK * (1.0 + rhs.abs()))
}
