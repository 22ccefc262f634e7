//! Thomas–Fermi–Dirac–von Weizsäcker screening model for massless fermions
//! in a two-dimensional layer.
//!
//! The energy of a density perturbation in the variable `u = √ρ − √ρ̄`
//!
//! ```text
//! E(u) = a‖u‖²_{Ḣ^{1/2}} + ∫Φ(u) + ∫V·S(u) + (b/2)⟨S(u), (−Δ)^{−1/2} S(u)⟩
//! ```
//!
//! is discretized on a periodic box with spectral operators ([`operators`]),
//! minimized by preconditioned projected gradient descent ([`solver`]) and
//! post-processed by [`analysis`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod energy;
pub mod error;
pub mod fft;
pub mod grid;
pub mod model;
pub mod operators;
pub mod quad;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
pub use grid::{integrate, make_grid, radial_profile, Field, Grid2D, RadialProfile};
pub use operators::SpectralPlan;
