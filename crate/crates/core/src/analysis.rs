//! Closed-form and post-processing tools: the Hardy threshold, a
//! negative-energy witness below it, the decay-exponent equation, power-law
//! tail fits and the Green's function of `a(−Δ)^{1/2} + c`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::{energy_plus, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::grid::{Field, RadialProfile};
use crate::model::{potential_v0, ModelParams};
use crate::operators::SpectralPlan;
use crate::specfun::{gamma, struve_gap};

/// `a_c = Γ²(1/4) / (2Γ²(3/4))`, the inverse of the sharp constant in
/// `∫u²/|x| ≤ C‖u‖²_{Ḣ^{1/2}}`.
pub fn hardy_constant() -> f64 {
    let g1 = gamma(0.25).expect("no pole at 1/4");
    let g3 = gamma(0.75).expect("no pole at 3/4");
    g1 * g1 / (2.0 * g3 * g3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bifurcation {
    Trivial,
    Nontrivial,
}

/// Minimizer type for `V = V₀` and `ρ̄ = 0`: trivial exactly when `a ≥ a_c`.
pub fn classify_bifurcation(a: f64) -> Bifurcation {
    if a >= hardy_constant() {
        Bifurcation::Trivial
    } else {
        Bifurcation::Nontrivial
    }
}

/// Distance below `a_c` required by [`negative_energy_witness`].
pub const WITNESS_MARGIN: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct Witness {
    /// Unscaled profile `u_λ`; the witness itself is `t·u_λ`.
    pub profile: Field,
    pub t: f64,
    /// Core radius of the profile.
    pub lambda: f64,
    pub breakdown: EnergyBreakdown,
}

/// Smooth step equal to 1 on `[0, 1/2]` and 0 on `[1, ∞)`.
fn cutoff(s: f64) -> f64 {
    if s <= 0.5 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let bump = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let x = 2.0 * (1.0 - s);
    bump(x) / (bump(x) + bump(1.0 - x))
}

/// `u_λ(x) = min(|x|, λ)^{−1/2} χ(|x|/R)`, a truncated `|x|^{−1/2}` whose core
/// grows with `λ`; `R = L/4`.
pub fn witness_profile(plan: &SpectralPlan, lambda: f64) -> Result<Field> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveInput("lambda"));
    }
    let outer = plan.grid().box_length() / 4.0;
    Field::from_fn(*plan.grid(), |x, y| {
        let r = x.hypot(y);
        r.max(lambda).powf(-0.5) * cutoff(r / outer)
    })
}

/// Finds `t > 0` and a core size `λ` with `E₊(t·u_λ) < 0` for `V = V₀`.
///
/// Core sizes double from 1 while `R/λ ≥ 8`; amplitudes are scanned on a
/// log grid. Close to `a_c` the Hardy quotient of the profile converges only
/// logarithmically in `R/λ`, so larger boxes are needed there.
pub fn negative_energy_witness(a: f64, params: &ModelParams, plan: &SpectralPlan) -> Result<Witness> {
    let ac = hardy_constant();
    if !(a < ac - WITNESS_MARGIN) {
        return Err(Error::Precondition(format!(
            "a = {a} must lie below a_c - {WITNESS_MARGIN} = {}",
            ac - WITNESS_MARGIN
        )));
    }
    let params = ModelParams { a, ..*params };
    params.validate()?;
    let v = potential_v0(*plan.grid());
    let outer = plan.grid().box_length() / 4.0;
    let mut best = f64::INFINITY;
    let mut lambda = 1.0;
    while outer / lambda >= 8.0 {
        let profile = witness_profile(plan, lambda)?;
        for k in 0..60 {
            let t = 10f64.powf(-4.0 + 0.1 * k as f64);
            let breakdown = energy_plus(&profile.scaled(t), &params, &v, plan)?;
            if breakdown.total < 0.0 {
                return Ok(Witness {
                    profile,
                    t,
                    lambda,
                    breakdown,
                });
            }
            best = best.min(breakdown.total);
        }
        lambda *= 2.0;
    }
    Err(Error::WitnessNotFound(format!(
        "smallest energy {best:e} at a = {a}; enlarge the box (L) and the grid so that L/4 \
         spans many core radii"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPrediction {
    pub s: f64,
    pub rho_exponent: f64,
    pub lhs_residual: f64,
}

/// `2aΓ((s+1)/2)Γ((2−s)/2) / (Γ((1−s)/2)Γ(s/2))`, negative on `(1, 2)`.
pub fn decay_lhs(a: f64, s: f64) -> Result<f64> {
    Ok(2.0 * a * gamma((s + 1.0) / 2.0)? * gamma((2.0 - s) / 2.0)?
        / (gamma((1.0 - s) / 2.0)? * gamma(s / 2.0)?))
}

const S_LO: f64 = 1.001;
const S_HI: f64 = 1.999;

/// Solves `LHS(s) = 1 − bQ/(2π)` for `s ∈ (1, 2)` by bisection, where `Q`
/// is the total induced charge. The density then decays like `|x|^{−2s}`.
pub fn solve_decay_exponent(a: f64, b: f64, l1_charge: f64) -> Result<DecayPrediction> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveInput("a"));
    }
    if !(b > 0.0) {
        return Err(Error::NonPositiveInput("b"));
    }
    let rhs = 1.0 - b * l1_charge / (2.0 * PI);
    if !(rhs < 0.0) {
        return Err(Error::RhsNonNegative(rhs));
    }
    let f = |s: f64| decay_lhs(a, s).map(|l| l - rhs);
    #[cfg(debug_assertions)]
    {
        let mut prev = f64::INFINITY;
        for k in 0..=200 {
            let l = decay_lhs(a, S_LO + (S_HI - S_LO) * k as f64 / 200.0)?;
            debug_assert!(l < prev, "decay LHS not decreasing near sample {k}");
            prev = l;
        }
    }
    let (mut lo, mut hi) = (S_LO, S_HI);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::Precondition(format!(
            "no sign change on [{S_LO}, {S_HI}]: f = {flo:e}, {fhi:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok(DecayPrediction {
        s,
        rho_exponent: 2.0 * s,
        lhs_residual: f(s)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
}

pub const MIN_TAIL_BINS: usize = 6;

/// Least-squares fit of `ln ρ = ln A − p ln r` over bins with
/// `r_min ≤ r ≤ r_max`.
pub fn fit_tail(profile: &RadialProfile, window: (f64, f64)) -> Result<TailFit> {
    let (r_min, r_max) = window;
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::Precondition(format!(
            "tail window needs 0 < r_min < r_max, got ({r_min}, {r_max})"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&r, &m) in profile.radii.iter().zip(&profile.means) {
        if r < r_min || r > r_max {
            continue;
        }
        if !(m > 0.0) {
            return Err(Error::NonPositiveValue(r));
        }
        xs.push(r.ln());
        ys.push(m.ln());
    }
    if xs.len() < MIN_TAIL_BINS {
        return Err(Error::InsufficientBins {
            needed: MIN_TAIL_BINS,
            found: xs.len(),
        });
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(TailFit {
        exponent: -slope,
        prefactor: intercept.exp(),
        window,
        r_squared,
    })
}

/// Radial Green's function of `a(−Δ)^{1/2} + c` on ℝ²:
/// `(c/4a²)(2a/(πcr) − H₀(cr/a) + Y₀(cr/a))`.
pub fn green_function(a: f64, c: f64, r: f64) -> Result<f64> {
    if let Some(&bad) = [a, c, r].iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain {
            func: "green_function",
            arg: bad,
        });
    }
    Ok(c / (4.0 * a * a) * struve_gap(c * r / a)?)
}

/// `(r, G(r))` on `count` log-spaced radii in `[r_min, r_max]`.
pub fn green_table(a: f64, c: f64, r_min: f64, r_max: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    if count < 2 || !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::Precondition(format!(
            "green table needs count >= 2 and 0 < r_min < r_max, got {count}, ({r_min}, {r_max})"
        )));
    }
    let step = (r_max / r_min).ln() / (count - 1) as f64;
    (0..count)
        .map(|k| {
            let r = r_min * (step * k as f64).exp();
            Ok((r, green_function(a, c, r)?))
        })
        .collect()
}
