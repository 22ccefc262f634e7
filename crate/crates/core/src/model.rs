//! Model ingredients: the nonlinearities `S` and `Φ`, external potentials,
//! and the map from physical constants to the dimensionless `(a, b)`.
//!
//! With `w = u + ū`:
//!
//! ```text
//! S(u) = |w|w − ū²              S'(u) = 2|w|
//! Φ(u) = (2/3)(|w|³ − ū³) − ū S(u)   Φ'(u) = u S'(u)
//! ```
//!
//! The positive-cone variants `S₊(u) = w² − ū²` and
//! `Φ₊(u) = (2/3)(|w|³ − ū³) − ū S₊(u)` agree with `S`, `Φ` for `u ≥ −ū`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, Field, Grid2D};

/// Dimensionless parameters of the rescaled energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub rho_bar: f64,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, rho_bar: f64) -> Result<Self> {
        let p = Self { a, b, rho_bar };
        p.validate()?;
        Ok(p)
    }

    /// Accepts a signed background. For `ρ̄ < 0` the energy is invariant under
    /// `ρ → −ρ, ρ̄ → −ρ̄, V → −V`, so the problem is mapped to `|ρ̄|`.
    /// The returned sign multiplies both `V` and the resulting density.
    pub fn from_signed(a: f64, b: f64, rho_bar: f64) -> Result<(Self, f64)> {
        let sign = if rho_bar < 0.0 { -1.0 } else { 1.0 };
        Ok((Self::new(a, b, rho_bar.abs())?, sign))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParams(format!("a must be >= 0, got {}", self.a)));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidParams(format!("b must be > 0, got {}", self.b)));
        }
        if !(self.rho_bar >= 0.0) || !self.rho_bar.is_finite() {
            return Err(Error::InvalidParams(format!(
                "rho_bar must be >= 0 here, got {}",
                self.rho_bar
            )));
        }
        Ok(())
    }

    pub fn ubar(&self) -> f64 {
        self.rho_bar.sqrt()
    }
}

#[inline]
pub fn s_of_u(u: f64, ubar: f64) -> f64 {
    let w = u + ubar;
    w.abs() * w - ubar * ubar
}

#[inline]
pub fn s_prime(u: f64, ubar: f64) -> f64 {
    2.0 * (u + ubar).abs()
}

#[inline]
pub fn phi_of_u(u: f64, ubar: f64) -> f64 {
    let w = (u + ubar).abs();
    2.0 / 3.0 * (w * w * w - ubar * ubar * ubar) - ubar * s_of_u(u, ubar)
}

#[inline]
pub fn phi_prime(u: f64, ubar: f64) -> f64 {
    u * s_prime(u, ubar)
}

#[inline]
pub fn s_plus(u: f64, ubar: f64) -> f64 {
    u * (u + 2.0 * ubar)
}

#[inline]
pub fn s_plus_prime(u: f64, ubar: f64) -> f64 {
    2.0 * (u + ubar)
}

#[inline]
pub fn phi_plus(u: f64, ubar: f64) -> f64 {
    let w = (u + ubar).abs();
    2.0 / 3.0 * (w * w * w - ubar * ubar * ubar) - ubar * s_plus(u, ubar)
}

#[inline]
pub fn phi_plus_prime(u: f64, ubar: f64) -> f64 {
    let w = u + ubar;
    2.0 * w * (w.abs() - ubar)
}

/// Reflection onto the cone `u ≥ −ū`: `u ↦ |u + ū| − ū`.
#[inline]
pub fn reflect(u: f64, ubar: f64) -> f64 {
    (u + ubar).abs() - ubar
}

/// One out-of-plane point charge of strength `c` at `(y, z)`, `z ≥ 0`
/// measured from the plane `z = −1` of the rescaled impurity distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub c: f64,
    pub y: [f64; 2],
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeMeasure {
    pub charges: Vec<Charge>,
}

impl ChargeMeasure {
    /// A unit charge at unit height above the origin; its potential is `V₀`.
    pub fn unit() -> Self {
        Self {
            charges: vec![Charge {
                c: 1.0,
                y: [0.0, 0.0],
                z: 0.0,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.charges.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for (i, q) in self.charges.iter().enumerate() {
            if !(q.c.is_finite() && q.y[0].is_finite() && q.y[1].is_finite() && q.z.is_finite()) {
                return Err(Error::InvalidParams(format!("charge {i} has a non-finite entry")));
            }
            if q.z < 0.0 {
                return Err(Error::ChargeBelowLayer(i));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let mu: Self = serde_json::from_str(s)?;
        mu.validate()?;
        Ok(mu)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Json(j) => Error::format(path, j.to_string()),
            other => other,
        })
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            charges: self
                .charges
                .iter()
                .map(|q| Charge { c: t * q.c, ..*q })
                .collect(),
        }
    }

    pub fn potential_at(&self, x: f64, y: f64) -> f64 {
        self.charges
            .iter()
            .map(|q| {
                let d = 1.0 + q.z;
                let (dx, dy) = (x - q.y[0], y - q.y[1]);
                -q.c / (d * d + dx * dx + dy * dy).sqrt()
            })
            .sum()
    }

    pub fn half_laplacian_at(&self, x: f64, y: f64) -> f64 {
        self.charges
            .iter()
            .map(|q| {
                let d = 1.0 + q.z;
                let (dx, dy) = (x - q.y[0], y - q.y[1]);
                let s = d * d + dx * dx + dy * dy;
                -q.c * d / (s * s.sqrt())
            })
            .sum()
    }
}

/// External potential specification, sampled per grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    V0,
    Charges(ChargeMeasure),
}

impl Potential {
    pub fn measure(&self) -> ChargeMeasure {
        match self {
            Potential::V0 => ChargeMeasure::unit(),
            Potential::Charges(mu) => mu.clone(),
        }
    }

    pub fn sample(&self, grid: Grid2D) -> Result<Field> {
        match self {
            Potential::V0 => Ok(potential_v0(grid)),
            Potential::Charges(mu) => potential_from_charges(grid, mu),
        }
    }
}

/// `V₀(x) = −(1 + |x|²)^{−1/2}`.
pub fn potential_v0(grid: Grid2D) -> Field {
    Field::from_fn(grid, |x, y| -1.0 / (1.0 + x * x + y * y).sqrt())
        .expect("V0 is finite everywhere")
}

/// `V(x) = −Σ cᵢ ((1+zᵢ)² + |x−yᵢ|²)^{−1/2}`.
pub fn potential_from_charges(grid: Grid2D, mu: &ChargeMeasure) -> Result<Field> {
    mu.validate()?;
    Field::from_fn(grid, |x, y| mu.potential_at(x, y))
}

/// Closed form `(−Δ)^{1/2}V = −Σ cᵢ(1+zᵢ)((1+zᵢ)² + |x−yᵢ|²)^{−3/2}`.
pub fn half_laplacian_of_v(grid: Grid2D, mu: &ChargeMeasure) -> Result<Field> {
    mu.validate()?;
    Field::from_fn(grid, |x, y| mu.half_laplacian_at(x, y))
}

/// `∫ V (−Δ)^{1/2} V` over the box from the closed forms.
pub fn v_h_half_norm_sq(grid: Grid2D, mu: &ChargeMeasure) -> Result<f64> {
    mu.validate()?;
    let f = Field::from_fn(grid, |x, y| mu.potential_at(x, y) * mu.half_laplacian_at(x, y))?;
    Ok(integrate(&f))
}

/// CGS constants for graphene on a substrate.
pub mod cgs {
    /// Elementary charge in statcoulomb.
    pub const ELEMENTARY_CHARGE: f64 = 4.803_204_712_570_263e-10;
    /// Reduced Planck constant in erg·s.
    pub const HBAR: f64 = 1.054_571_817e-27;
    /// Graphene Fermi velocity in cm/s.
    pub const FERMI_VELOCITY: f64 = 1.0e8;
}

/// Physical inputs in CGS units. No default `c_w` is provided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    /// Impurity valence `Z`.
    pub z_valence: f64,
    /// Impurity distance from the layer.
    pub d: f64,
    pub eps_d: f64,
    pub c_w: f64,
    pub c_tfd: f64,
    pub e: f64,
    /// Physical background density (signed).
    #[serde(default)]
    pub rho_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rescaled {
    pub params: ModelParams,
    /// Sign applied to `V` and the density when the background is negative.
    pub sign: f64,
    /// Density scale: `ρ̃ = κ ρ`.
    pub kappa: f64,
    /// Length scale: `x̃ = λ x`.
    pub lambda: f64,
    /// Energy scale: `Ẽ = γ E`.
    pub gamma: f64,
}

pub fn rescale_physical(setup: &PhysicalSetup) -> Result<Rescaled> {
    let checks = [
        ("Z", setup.z_valence),
        ("d", setup.d),
        ("eps_d", setup.eps_d),
        ("C_W", setup.c_w),
        ("C_TFD", setup.c_tfd),
        ("e", setup.e),
    ];
    for (name, v) in checks {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveInput(name));
        }
    }
    if setup.eps_d < 1.0 {
        return Err(Error::InvalidParams(format!(
            "eps_d must be >= 1, got {}",
            setup.eps_d
        )));
    }
    let PhysicalSetup {
        z_valence: z,
        d,
        eps_d,
        c_w,
        c_tfd,
        e,
        rho_bar,
    } = *setup;
    let e2 = e * e;
    let lambda = 1.0 / d;
    let kappa = (eps_d * c_tfd * d / (e2 * z)).powi(2);
    let gamma = eps_d.powi(3) * c_tfd * c_tfd * d / (e2 * z).powi(3);
    let a = eps_d * c_w / (z * e2);
    let b = z * e2 * e2 / (eps_d * eps_d * c_tfd * c_tfd);
    let (params, sign) = ModelParams::from_signed(a, b, kappa * rho_bar)?;
    Ok(Rescaled {
        params,
        sign,
        kappa,
        lambda,
        gamma,
    })
}
