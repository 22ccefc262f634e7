//! Spectral operators on a periodic grid.
//!
//! The kinetic operator `(−Δ)^{1/2}` uses the periodic symbol `|k|`. The
//! Riesz potential is a free-space convolution with `1/(2π|x|)`: sources are
//! zero-padded to a `(2n)²` grid and multiplied by the transform of the
//! kernel truncated at radius `L√2`, which covers every pair of box points.
//!
//! The truncated kernel is singular at the origin, so it is not sampled
//! directly. Its exact transform `∫₀^R J₀(kr) dr` is instead summed on a
//! four-times oversampled frequency lattice, which gives the band-limited
//! kernel seen by grid functions.
//!
//! The energy needs `(−Δ)^{1/2}` of fields that are not small at the box
//! edge, where the periodic symbol undercharges slowly varying modes (a
//! constant costs nothing). [`free_half_laplacian`] instead treats the field
//! as zero outside the box and applies the same truncation scheme to the
//! kernel `−1/(2π|x|³)`.

use std::f64::consts::PI;
use std::sync::{Mutex, MutexGuard, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fft::RealFft2;
use crate::grid::{inner, integrate, Field, Grid2D};
use crate::specfun::{bessel_j0, bessel_j0_integral, bessel_j1};

/// Relative tolerance on `|∫f| / ∫|f|` below which a field counts as mean-zero.
pub const MEAN_TOL: f64 = 1e-10;

/// What [`h_minus_half_norm_sq`] does with a nonzero mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanPolicy {
    Reject,
    Remove,
}

struct Workspace {
    fft: RealFft2,
    spec: Vec<Complex64>,
}

struct PaddedWorkspace {
    fft: RealFft2,
    spec: Vec<Complex64>,
}

/// FFT plans, symbols and the Riesz kernel transform for one grid.
///
/// Scratch buffers sit behind mutexes: concurrent calls on one plan
/// serialize, separate plans run independently. The padded transform and
/// the Riesz kernel are built on first use.
pub struct SpectralPlan {
    grid: Grid2D,
    symbol: Vec<f64>,
    multiplicity: Vec<f64>,
    riesz_hat: OnceLock<Vec<f64>>,
    kinetic_hat: OnceLock<Vec<f64>>,
    work: Mutex<Workspace>,
    padded: Mutex<Option<PaddedWorkspace>>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).finish()
    }
}

impl SpectralPlan {
    pub fn new(grid: Grid2D) -> Self {
        let n = grid.n();
        let fft = RealFft2::new(n, n);
        let hc = fft.half_cols();
        let mut symbol = vec![0.0; hc * n];
        let mut multiplicity = vec![0.0; hc * n];
        for c in 0..hc {
            let ky = 2.0 * PI * c as f64 / grid.box_length();
            let mult = if c == 0 || c == n / 2 { 1.0 } else { 2.0 };
            for r in 0..n {
                symbol[c * n + r] = grid.wavenumber(r).hypot(ky);
                multiplicity[c * n + r] = mult;
            }
        }
        let work = Workspace {
            spec: vec![Complex64::default(); fft.spectrum_len()],
            fft,
        };
        Self {
            grid,
            symbol,
            multiplicity,
            riesz_hat: OnceLock::new(),
            kinetic_hat: OnceLock::new(),
            work: Mutex::new(work),
            padded: Mutex::new(None),
        }
    }

    /// Builds both padded kernels now instead of on first use.
    pub fn prepare_riesz(&self) {
        self.riesz_hat();
        self.kinetic_hat();
    }

    fn padded(&self) -> MutexGuard<'_, Option<PaddedWorkspace>> {
        let mut guard = lock(&self.padded);
        if guard.is_none() {
            let n = self.grid.n();
            let fft = RealFft2::new(2 * n, 2 * n);
            let spec = vec![Complex64::default(); fft.spectrum_len()];
            *guard = Some(PaddedWorkspace { fft, spec });
        }
        guard
    }

    fn riesz_hat(&self) -> &[f64] {
        self.riesz_hat.get_or_init(|| {
            let radius = truncation_radius(&self.grid);
            let hat = |k: f64| {
                if k == 0.0 {
                    radius
                } else {
                    bessel_j0_integral(k * radius) / k
                }
            };
            let mut guard = self.padded();
            let w = guard.as_mut().expect("created by padded()");
            padded_kernel_transform(&self.grid, &mut w.fft, hat)
        })
    }

    fn kinetic_hat(&self) -> &[f64] {
        self.kinetic_hat.get_or_init(|| {
            let radius = truncation_radius(&self.grid);
            // |k| + ∫_R^∞ J₀(kr) r⁻² dr, the transform of the hypersingular
            // kernel −1/(2π|x|³) cut off at R
            let hat = |k: f64| {
                let z = k * radius;
                bessel_j0(z) / radius + k * (bessel_j0_integral(z) - bessel_j1(z))
            };
            let mut guard = self.padded();
            let w = guard.as_mut().expect("created by padded()");
            padded_kernel_transform(&self.grid, &mut w.fft, hat)
        })
    }

    /// Convolution of the zero-padded field with a padded kernel transform.
    fn padded_convolve(&self, f: &Field, hat: &[f64]) -> Result<Field> {
        self.check(f)?;
        let n = self.grid.n();
        let mut guard = self.padded();
        let w = guard.as_mut().expect("created by padded()");
        w.fft.forward_padded(f.values(), n, n, &mut w.spec);
        for (s, &k) in w.spec.iter_mut().zip(hat) {
            *s *= k;
        }
        let mut out = vec![0.0; n * n];
        w.fft.inverse_cropped(&mut w.spec, &mut out, n, n);
        Ok(Field::from_vec_unchecked(self.grid, out))
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// `|k|` per stored mode, in the layout of [`crate::fft::RealFft2`].
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn lock(&self) -> MutexGuard<'_, Workspace> {
        lock(&self.work)
    }

    fn check(&self, f: &Field) -> Result<()> {
        self.grid.ensure_same(f.grid())
    }

    /// Applies the Fourier multiplier `m(|k|)`.
    pub fn apply_multiplier(&self, f: &Field, m: impl Fn(f64) -> f64) -> Result<Field> {
        self.check(f)?;
        let n = self.grid.n();
        let scale = 1.0 / (n * n) as f64;
        let mut guard = self.lock();
        let w = &mut *guard;
        w.fft.forward(f.values(), &mut w.spec);
        for (s, &k) in w.spec.iter_mut().zip(&self.symbol) {
            *s *= m(k) * scale;
        }
        let mut out = vec![0.0; n * n];
        w.fft.inverse(&mut w.spec, &mut out);
        Ok(Field::from_vec_unchecked(self.grid, out))
    }

    /// `(h²/n²) Σ_k w(|k|) |f̂_k|²` over the full spectrum.
    fn spectral_quadratic(&self, f: &Field, w: impl Fn(f64) -> f64) -> Result<f64> {
        self.check(f)?;
        let n = self.grid.n();
        let mut guard = self.lock();
        let ws = &mut *guard;
        ws.fft.forward(f.values(), &mut ws.spec);
        let total: f64 = ws
            .spec
            .chunks_exact(n)
            .zip(self.symbol.chunks_exact(n))
            .zip(self.multiplicity.chunks_exact(n))
            .map(|((s, k), m)| {
                s.iter()
                    .zip(k)
                    .zip(m)
                    .map(|((s, &k), &m)| m * w(k) * s.norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        let h = self.grid.spacing();
        Ok(total * h * h / (n * n) as f64)
    }
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

/// Radius covering every pair of box points.
fn truncation_radius(grid: &Grid2D) -> f64 {
    std::f64::consts::SQRT_2 * grid.box_length()
}

/// Transform of the band-limited kernel with radial transform `khat` on the
/// padded grid, pre-scaled by `h²/(2n)²` so that one multiply and an
/// unnormalized inverse give the convolution. The kernel must vanish beyond
/// [`truncation_radius`].
fn padded_kernel_transform(grid: &Grid2D, pad: &mut RealFft2, khat: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = grid.n();
    let h = grid.spacing();
    let m_len = 4 * n;
    let dk = 2.0 * PI / (m_len as f64 * h);
    let signed = |m: usize| -> f64 {
        if m < m_len / 2 {
            m as f64
        } else {
            m as f64 - m_len as f64
        }
    };

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(m_len);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); m_len];

    // rows: A[m1][q] = Σ_{m2} K̂ e^{2πi m2 q / 4n}, for m1 in [0, 2n], q in [0, n]
    let mut rows = vec![0.0; (2 * n + 1) * (n + 1)];
    for m1 in 0..=2 * n {
        let k1 = dk * m1 as f64;
        for (m2, v) in line.iter_mut().enumerate() {
            *v = Complex64::new(khat(k1.hypot(dk * signed(m2))), 0.0);
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        for q in 0..=n {
            rows[m1 * (n + 1) + q] = line[q].re;
        }
    }
    // columns: B[p][q] = Σ_{m1} A[|m1|][q] e^{2πi m1 p / 4n}
    let period = m_len as f64 * h;
    let norm = h * h / (period * period);
    let mut kernel = vec![0.0; (n + 1) * (n + 1)];
    for q in 0..=n {
        for (m1, v) in line.iter_mut().enumerate() {
            let a = signed(m1).abs() as usize;
            *v = Complex64::new(rows[a * (n + 1) + q], 0.0);
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        for p in 0..=n {
            kernel[p * (n + 1) + q] = line[p].re * norm;
        }
    }
    drop(rows);

    let n2 = 2 * n;
    let fold = |i: usize| -> Option<usize> {
        match i {
            i if i < n => Some(i),
            i if i == n => None,
            i => Some(n2 - i),
        }
    };
    let mut padded = vec![0.0; n2 * n2];
    for i in 0..n2 {
        let Some(p) = fold(i) else { continue };
        for j in 0..n2 {
            if let Some(q) = fold(j) {
                padded[i * n2 + j] = kernel[p * (n + 1) + q];
            }
        }
    }
    let mut spec = vec![Complex64::default(); pad.spectrum_len()];
    pad.forward(&padded, &mut spec);
    let scale = 1.0 / (n2 * n2) as f64;
    spec.iter().map(|s| s.re * scale).collect()
}

/// `(−Δ)^{1/2} u` with the periodic symbol `|k|`.
pub fn half_laplacian(plan: &SpectralPlan, u: &Field) -> Result<Field> {
    plan.apply_multiplier(u, |k| k)
}

/// `(a(−Δ)^{1/2} + σ)^{−1} f`.
pub fn shifted_inverse(plan: &SpectralPlan, f: &Field, a: f64, sigma: f64) -> Result<Field> {
    if !(sigma > 0.0) || !(a >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "preconditioner needs a >= 0 and sigma > 0, got a={a}, sigma={sigma}"
        )));
    }
    plan.apply_multiplier(f, |k| 1.0 / (a * k + sigma))
}

/// Free-space potential `(1/2π) ∫ f(y)/|x−y| dy` sampled on the grid.
pub fn riesz_potential(plan: &SpectralPlan, f: &Field) -> Result<Field> {
    plan.padded_convolve(f, plan.riesz_hat())
}

/// `(−Δ)^{1/2}` of the field extended by zero outside the box, restricted
/// to the box. Unlike [`half_laplacian`] a constant field is not free:
/// `⟨u, free_half_laplacian(u)⟩` is the `Ḣ^{1/2}(ℝ²)` seminorm of the extension.
pub fn free_half_laplacian(plan: &SpectralPlan, u: &Field) -> Result<Field> {
    plan.padded_convolve(u, plan.kinetic_hat())
}

/// `‖u‖²_{Ḣ^{1/2}(ℝ²)}` of the zero extension of `u`.
pub fn free_h_half_norm_sq(plan: &SpectralPlan, u: &Field) -> Result<f64> {
    inner(u, &free_half_laplacian(plan, u)?)
}

/// `‖u‖²_{Ḣ^{1/2}} = ∫ |k| |û(k)|² dk/(2π)²`, discretized with the periodic symbol.
pub fn h_half_norm_sq(plan: &SpectralPlan, u: &Field) -> Result<f64> {
    plan.spectral_quadratic(u, |k| k)
}

/// `‖f‖²_{Ḣ^{−1/2}}` with the zero mode excluded.
pub fn h_minus_half_norm_sq(plan: &SpectralPlan, f: &Field, policy: MeanPolicy) -> Result<f64> {
    if policy == MeanPolicy::Reject {
        let total = integrate(f);
        let scale = integrate(&f.map(f64::abs));
        if total.abs() > MEAN_TOL * scale {
            let area = f.grid().box_length().powi(2);
            return Err(Error::NonzeroMean {
                mean: total / area,
                tol: MEAN_TOL * scale / area,
            });
        }
    }
    plan.spectral_quadratic(f, |k| if k > 0.0 { 1.0 / k } else { 0.0 })
}

pub fn lp_norm(u: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    let s = if p == 1.0 {
        integrate(&u.map(f64::abs))
    } else if p == 2.0 {
        integrate(&u.map(|v| v * v))
    } else {
        integrate(&u.map(|v| v.abs().powf(p)))
    };
    Ok(s.powf(1.0 / p))
}

/// Cell average of `1/|x|` over the square cell centred at the origin, times `h`.
pub const ORIGIN_CELL_INVERSE_RADIUS: f64 = 3.525_494_348_078_172; // 4 ln(1 + √2)

/// `∫ u²/|x|`, with the origin node weighted by the exact cell mean of `1/|x|`.
pub fn inverse_radius_moment(u: &Field) -> f64 {
    let grid = u.grid();
    let n = grid.n();
    let h = grid.spacing();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let r = grid.radius(i, j);
            let w = if r < 0.5 * h {
                ORIGIN_CELL_INVERSE_RADIUS / h
            } else {
                1.0 / r
            };
            let v = u.values()[i * n + j];
            row += v * v * w;
        }
        total += row;
    }
    total * grid.cell_area()
}

/// Spectral interpolation of a field onto a grid with the same box and
/// twice as many nodes per axis. Coarse node `i` coincides with fine node `2i`.
pub fn prolong(coarse: &Field, fine: Grid2D) -> Result<Field> {
    let cg = *coarse.grid();
    let nc = cg.n();
    let nf = fine.n();
    if nf != 2 * nc || fine.box_length() != cg.box_length() {
        return Err(Error::Precondition(format!(
            "prolongation maps n={nc} to n={}, got n={nf} (L {} vs {})",
            2 * nc,
            cg.box_length(),
            fine.box_length()
        )));
    }
    let mut cfft = RealFft2::new(nc, nc);
    let mut cspec = vec![Complex64::default(); cfft.spectrum_len()];
    cfft.forward(coarse.values(), &mut cspec);
    let mut ffft = RealFft2::new(nf, nf);
    let mut fspec = vec![Complex64::default(); ffft.spectrum_len()];
    let scale = 1.0 / (nc * nc) as f64;
    let half = nc / 2;
    for c in 0..=half {
        let cw = if c == half { 0.5 } else { 1.0 };
        for r in 0..nc {
            let v = cspec[c * nc + r] * (scale * cw);
            if r == half {
                fspec[c * nf + half] += 0.5 * v;
                fspec[c * nf + nf - half] += 0.5 * v;
            } else {
                let rf = if r < half { r } else { nf - (nc - r) };
                fspec[c * nf + rf] += v;
            }
        }
    }
    let mut out = vec![0.0; nf * nf];
    ffft.inverse(&mut fspec, &mut out);
    Field::new(fine, out)
}
