//! Real special functions needed by the closed-form model expressions:
//! Γ, the Bessel functions J₀/J₁/Y₀, the Struve function H₀ and the
//! modified Bessel function I₀.
//!
//! Order-zero Bessel and Struve functions switch from their power series to
//! large-argument forms at [`SERIES_CROSSOVER`]. Below it the alternating
//! series lose at most ~4 digits to cancellation; above it the Hankel
//! expansions are truncated at their smallest term, which is below
//! `exp(-2z) ≈ 4e-11` relative to the amplitude at the crossover.
//!
//! The `*_est` variants return a [`SpecFunResult`] whose error estimate is a
//! truncation/rounding heuristic, not a rigorous enclosure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument at which Y₀, J₀ and H₀ leave the power series.
pub const SERIES_CROSSOVER: f64 = 12.0;

/// Largest argument accepted by [`bessel_i0`].
pub const I0_MAX_ARG: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecFunResult {
    pub value: f64,
    pub est_error: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// sin(πx) with argument reduction so that integers give exact zeros.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round(); // r in [-1, 1]
    if r.abs() <= 0.5 {
        (PI * r).sin()
    } else {
        // sin(pi r) = sin(pi (sign(r) - r))
        (PI * (r.signum() - r)).sin()
    }
}

fn gamma_lanczos(x: f64) -> f64 {
    // valid for x >= 0.5
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut a = LANCZOS_P[0];
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        a += p / (x + i as f64);
    }
    let half_pow = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half_pow * ((-t).exp() * half_pow) * a
}

/// Γ(x) for real x; the reflection formula covers x < 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    gamma_est(x).map(|r| r.value)
}

pub fn gamma_est(x: f64) -> Result<SpecFunResult> {
    if !x.is_finite() {
        return Err(Error::Domain {
            func: "gamma",
            arg: x,
        });
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Pole(x));
    }
    let value = if x < 0.5 {
        PI / (sin_pi(x) * gamma_lanczos(1.0 - x))
    } else {
        gamma_lanczos(x)
    };
    if !value.is_finite() {
        return Err(Error::Overflow {
            func: "gamma",
            arg: x,
        });
    }
    Ok(SpecFunResult {
        value,
        est_error: value.abs() * f64::EPSILON * (8.0 + x.abs()),
    })
}

// ---------------------------------------------------------------------------
// Bessel functions of the first and second kind

/// Hankel asymptotic amplitudes (P, Q) for order `nu`, truncated at the
/// smallest term. Returns (P, Q, size of the first omitted term).
fn hankel_pq(nu: f64, z: f64) -> (f64, f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    let eight_z = 8.0 * z;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * eight_z);
        if next.abs() >= last || next.abs() < 1e-18 {
            return (p, q, next.abs().min(last));
        }
        last = next.abs();
        term = next;
        // a_k / z^k enters P (k even) or Q (k odd) with alternating signs.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    (p, q, last)
}

/// (J_ν(z), Y_ν(z)) for ν ∈ {0, 1} from the large-argument expansion.
fn bessel_jy_asymptotic(order: u8, z: f64) -> (f64, f64, f64) {
    let (s, c) = z.sin_cos();
    // chi = z - (nu/2 + 1/4) pi
    let (cos_chi, sin_chi) = match order {
        0 => ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2),
        _ => ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2),
    };
    let (p, q, tail) = hankel_pq(order as f64, z);
    let amp = (2.0 / (PI * z)).sqrt();
    let j = amp * (p * cos_chi - q * sin_chi);
    let y = amp * (p * sin_chi + q * cos_chi);
    (j, y, amp * (tail + 4.0 * f64::EPSILON))
}

/// J₀ and Y₀ by power series; only for 0 < z ≤ crossover.
fn j0_y0_series(z: f64) -> (f64, f64, f64) {
    let quarter = 0.25 * z * z;
    let mut term = 1.0; // (-1)^k q^k / (k!)^2
    let mut j = 1.0;
    let mut harmonic = 0.0;
    let mut ysum = 0.0;
    let mut max_term = 1.0f64;
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = k as f64;
        term *= -quarter / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        ysum -= harmonic * term;
        max_term = max_term.max(term.abs() * harmonic);
        if term.abs() * harmonic < 1e-18 * j.abs().max(1e-300) && kf > quarter {
            break;
        }
        if k > 300 {
            break;
        }
    }
    let y = 2.0 / PI * (((0.5 * z).ln() + EULER_GAMMA) * j + ysum);
    let err = 4.0 * f64::EPSILON * max_term * (1.0 + (0.5 * z).ln().abs());
    (j, y, err)
}

pub fn bessel_j0(z: f64) -> f64 {
    let z = z.abs();
    if z == 0.0 {
        1.0
    } else if z <= SERIES_CROSSOVER {
        j0_y0_series(z).0
    } else {
        bessel_jy_asymptotic(0, z).0
    }
}

/// J₁(z); series below the crossover, Hankel expansion above.
pub fn bessel_j1(z: f64) -> f64 {
    let sign = z.signum();
    let z = z.abs();
    if z == 0.0 {
        return 0.0;
    }
    let value = if z <= SERIES_CROSSOVER {
        let quarter = 0.25 * z * z;
        let mut term = 0.5 * z;
        let mut sum = term;
        for k in 1..200 {
            let kf = k as f64;
            term *= -quarter / (kf * (kf + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && kf > quarter {
                break;
            }
        }
        sum
    } else {
        bessel_jy_asymptotic(1, z).0
    };
    sign * value
}

/// Bessel function of the second kind Y₀(z), z > 0.
pub fn bessel_y0(z: f64) -> Result<f64> {
    bessel_y0_est(z).map(|r| r.value)
}

pub fn bessel_y0_est(z: f64) -> Result<SpecFunResult> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "bessel_y0",
            arg: z,
        });
    }
    let (value, est_error) = if z <= SERIES_CROSSOVER {
        let (_, y, e) = j0_y0_series(z);
        (y, e)
    } else {
        let (_, y, e) = bessel_jy_asymptotic(0, z);
        (y, e)
    };
    Ok(SpecFunResult { value, est_error })
}

// ---------------------------------------------------------------------------
// Struve function

fn laplace_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// (2/(πz)) ∫₀^∞ e^{-s} g(s/z) ds over [0, 48] (e^{-48} is below rounding).
fn laplace_integral(z: f64, g: impl Fn(f64) -> f64) -> f64 {
    let rule = laplace_rule();
    2.0 / (PI * z) * rule.integrate_composite(0.0, 48.0, 16, |s| (-s).exp() * g(s / z))
}

/// H₀(z) − Y₀(z) = (2/π) ∫₀^∞ e^{-zt} (1+t²)^{-1/2} dt, accurate for z ≳ 1.
pub fn struve_h0_minus_y0(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "struve_h0_minus_y0",
            arg: z,
        });
    }
    if z <= SERIES_CROSSOVER {
        return Ok(struve_h0(z)? - bessel_y0(z)?);
    }
    Ok(laplace_integral(z, |t| 1.0 / (1.0 + t * t).sqrt()))
}

/// 2/(πz) − (H₀(z) − Y₀(z)), computed without cancellation for large z.
/// It behaves like 2/(πz³) as z → ∞.
pub fn struve_gap(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "struve_gap",
            arg: z,
        });
    }
    if z <= SERIES_CROSSOVER {
        return Ok(2.0 / (PI * z) - struve_h0(z)? + bessel_y0(z)?);
    }
    Ok(laplace_integral(z, |t| {
        let root = (1.0 + t * t).sqrt();
        t * t / (root * (1.0 + root))
    }))
}

/// Struve function H₀(z), z ≥ 0.
pub fn struve_h0(z: f64) -> Result<f64> {
    struve_h0_est(z).map(|r| r.value)
}

pub fn struve_h0_est(z: f64) -> Result<SpecFunResult> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "struve_h0",
            arg: z,
        });
    }
    if z == 0.0 {
        return Ok(SpecFunResult {
            value: 0.0,
            est_error: 0.0,
        });
    }
    if z <= SERIES_CROSSOVER {
        // sum_k (-1)^k (z/2)^{2k+1} / Gamma(k+3/2)^2, Gamma(3/2)^2 = pi/4
        let half = 0.5 * z;
        let mut term = half * 4.0 / PI;
        let mut sum = term;
        let mut max_term = term.abs();
        for k in 0..300 {
            let a = k as f64 + 1.5;
            term *= -half * half / (a * a);
            sum += term;
            max_term = max_term.max(term.abs());
            if term.abs() < 1e-18 * sum.abs() && (k as f64) > half {
                break;
            }
        }
        return Ok(SpecFunResult {
            value: sum,
            est_error: 4.0 * f64::EPSILON * max_term,
        });
    }
    let y = bessel_y0_est(z)?;
    let d = laplace_integral(z, |t| 1.0 / (1.0 + t * t).sqrt());
    Ok(SpecFunResult {
        value: y.value + d,
        est_error: y.est_error + 1e-15 * d.abs(),
    })
}

// ---------------------------------------------------------------------------
// Modified Bessel function

/// e^{-z} I₀(z) for z ≥ 0; finite for every z.
pub fn bessel_i0_scaled(z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "bessel_i0",
            arg: z,
        });
    }
    if z <= 30.0 {
        let quarter = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..400 {
            let kf = k as f64;
            term *= quarter / (kf * kf);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        return Ok(sum * (-z).exp());
    }
    // e^z / sqrt(2 pi z) * sum_k ((2k-1)!!)^2 / (k! (8z)^k)
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * 8.0 * z);
        if next >= term || next < 1e-18 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    Ok(sum / (2.0 * PI * z).sqrt())
}

/// Modified Bessel function I₀(z) for 0 ≤ z ≤ [`I0_MAX_ARG`].
pub fn bessel_i0(z: f64) -> Result<f64> {
    bessel_i0_est(z).map(|r| r.value)
}

pub fn bessel_i0_est(z: f64) -> Result<SpecFunResult> {
    if z > I0_MAX_ARG {
        return Err(Error::Overflow {
            func: "bessel_i0",
            arg: z,
        });
    }
    let value = bessel_i0_scaled(z)? * z.exp();
    Ok(SpecFunResult {
        value,
        est_error: value * f64::EPSILON * (4.0 + z),
    })
}

// ---------------------------------------------------------------------------
// Integral of J0, used for the transform of the truncated Coulomb kernel.

/// ∫₀ˣ J₀(t) dt.
///
/// For x ≤ 40 this is the trapezoidal rule on (1/π)∫₀^π sin(x sin θ)/sin θ dθ,
/// whose integrand is π-periodic and analytic. Above that it uses
/// 1 + xJ₀ + (πx/2)(J₁(H₀−Y₀) − J₀(H₁−Y₁)) with asymptotic Struve remainders.
pub fn bessel_j0_integral(x: f64) -> f64 {
    let sign = x.signum();
    let x = x.abs();
    if x == 0.0 {
        return 0.0;
    }
    let value = if x <= 40.0 {
        let n = x.ceil() as usize + 48;
        let step = PI / n as f64;
        let mut sum = x; // endpoints, each x/2
        for j in 1..n {
            let s = (j as f64 * step).sin();
            sum += (x * s).sin() / s;
        }
        sum / n as f64
    } else {
        let (j0, _, _) = bessel_jy_asymptotic(0, x);
        let (j1, _, _) = bessel_jy_asymptotic(1, x);
        let (d0, d1) = struve_remainders_asymptotic(x);
        1.0 + x * j0 + 0.5 * PI * x * (j1 * d0 - j0 * d1)
    };
    sign * value
}

/// Asymptotic (H₀−Y₀, H₁−Y₁), truncated at the smallest term; x ≳ 30.
fn struve_remainders_asymptotic(x: f64) -> (f64, f64) {
    let inv_half_sq = 4.0 / (x * x);
    // H0 - Y0 = (1/pi) sum_k d_k (x/2)^{-2k-1}, d_{k+1} = -d_k (k+1/2)^2
    let mut d = 1.0f64;
    let mut pw = 2.0 / x;
    let mut s0 = pw;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        let kf = k as f64 + 0.5;
        d *= -kf * kf;
        pw *= inv_half_sq;
        let t = d * pw;
        if t.abs() >= last || t.abs() < 1e-18 * s0.abs() {
            break;
        }
        last = t.abs();
        s0 += t;
    }
    // H1 - Y1 = (1/pi) sum_k c_k (x/2)^{-2k}, c_0 = 2, c_{k+1} = c_k (k+1/2)(1/2-k)
    let mut c = 2.0f64;
    let mut pw = 1.0;
    let mut s1 = c;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        let kf = k as f64;
        c *= (kf + 0.5) * (0.5 - kf);
        pw *= inv_half_sq;
        let t = c * pw;
        if t.abs() >= last || t.abs() < 1e-18 * s1.abs() {
            break;
        }
        last = t.abs();
        s1 += t;
    }
    (s0 / PI, s1 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gamma_special_values() {
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-13);
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-13);
        // 29! = 8841761993739701954543616000000
        assert!(rel(gamma(30.0).unwrap(), 8.841_761_993_739_702e30) < 1e-12);
    }

    #[test]
    fn gamma_poles_are_errors() {
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert!(matches!(gamma(x), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn hardy_ratio_value() {
        let g14 = gamma(0.25).unwrap();
        let g34 = gamma(0.75).unwrap();
        assert!((g14 * g14 / (2.0 * g34 * g34) - 4.3769).abs() < 1e-3);
    }

    #[test]
    fn bessel_j1_is_derivative_of_minus_j0() {
        for &z in &[0.7, 3.0, 11.0, 13.0, 40.0] {
            let h = 1e-4;
            let d = (bessel_j0(z + h) - bessel_j0(z - h)) / (2.0 * h);
            assert!((d + bessel_j1(z)).abs() < 1e-8, "z={z}");
        }
    }

    #[test]
    fn j0_and_y0_continuous_across_crossover() {
        let below = j0_y0_series(SERIES_CROSSOVER);
        let (ja, ya, _) = bessel_jy_asymptotic(0, SERIES_CROSSOVER);
        assert!((below.0 - ja).abs() < 1e-10);
        assert!((below.1 - ya).abs() < 1e-10);
    }

    #[test]
    fn struve_forms_agree_at_crossover() {
        let z = SERIES_CROSSOVER;
        let series = struve_h0(z).unwrap();
        let integral = bessel_y0(z).unwrap() + laplace_integral(z, |t| 1.0 / (1.0 + t * t).sqrt());
        assert!((series - integral).abs() < 1e-10);
        let gap = struve_gap(13.0).unwrap();
        let direct = 2.0 / (PI * 13.0) - struve_h0_minus_y0(13.0).unwrap();
        assert!((gap - direct).abs() < 1e-14);
    }

    #[test]
    fn j0_integral_branches_agree() {
        // both representations at the switch point
        let x = 40.0;
        let (j0, _, _) = bessel_jy_asymptotic(0, x);
        let (j1, _, _) = bessel_jy_asymptotic(1, x);
        let (d0, d1) = struve_remainders_asymptotic(x);
        let asym = 1.0 + x * j0 + 0.5 * PI * x * (j1 * d0 - j0 * d1);
        assert!((asym - bessel_j0_integral(x)).abs() < 1e-12);
        // derivative of the integral is J0
        let x = 123.4;
        let h = 1e-4;
        let d = (bessel_j0_integral(x + h) - bessel_j0_integral(x - h)) / (2.0 * h);
        assert!((d - bessel_j0(x)).abs() < 1e-8);
        // total integral of J0 is 1
        assert!((bessel_j0_integral(1e6) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn j0_integral_small_argument_series() {
        // int_0^x J0 = sum_k (-1)^k (x/2)^{2k} x / ((k!)^2 (2k+1))
        for &x in &[0.1, 1.0, 5.0] {
            let mut exact = 0.0;
            let mut c = 1.0;
            for k in 0..60 {
                let kf = k as f64;
                if k > 0 {
                    c *= -(x * x / 4.0) / (kf * kf);
                }
                exact += c * x / (2.0 * kf + 1.0);
            }
            assert!((bessel_j0_integral(x) - exact).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn i0_limits() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!(matches!(bessel_i0(701.0), Err(Error::Overflow { .. })));
        assert!(bessel_i0(700.0).unwrap().is_finite());
        // continuity across the series/asymptotic switch
        let a = bessel_i0_scaled(30.0).unwrap();
        let b = bessel_i0_scaled(30.0 + 1e-9).unwrap();
        assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_y0(0.0).is_err());
        assert!(bessel_y0(-1.0).is_err());
        assert!(struve_h0(-0.1).is_err());
        assert!(bessel_i0(-1.0).is_err());
    }
}
