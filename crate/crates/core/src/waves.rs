//! Solitary waves `φ(x - ct)` of `∂t u = ∂xx u + (x - ū) u`.
//!
//! The centred profile is `ψ_c(x) = exp(-cx/2 + c³/12) Ai(c²/4 - x)`; it has unit mass,
//! zero mean, solves `ψ'' + cψ' + xψ = 0`, oscillates on the right of `x = c²/4`
//! and decays super-exponentially on the left. Translates `φ_{α,c}(x) = ψ_c(x - α)`
//! have mean `α`. No wave exists for `c ≤ 0`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{GridError, GridFunction};
use crate::quad::{gauss_kronrod, gauss_kronrod_split, QuadConfig, QuadError};
use crate::special::{airy_ai, AIRY_RANGE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("no solitary wave exists for speed c = {0} <= 0")]
    NoSolitaryWave(f64),
    #[error("x = {x} is beyond the supported range for c = {c}")]
    OutOfRange { c: f64, x: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn check_speed(c: f64) -> Result<(), WaveError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(WaveError::NoSolitaryWave(c))
    }
}

/// `ψ_c(x)`. Points where `c²/4 - x > 50` return 0 (the true value is below
/// `1e-100 · e^{25c}`); points with `c²/4 - x < -50` are out of range.
pub fn solitary_wave(c: f64, x: f64) -> Result<f64, WaveError> {
    check_speed(c)?;
    let z = 0.25 * c * c - x;
    if z > AIRY_RANGE {
        return Ok(0.0);
    }
    let ai = airy_ai(z).map_err(|_| WaveError::OutOfRange { c, x })?;
    if ai == 0.0 {
        return Ok(0.0);
    }
    let ln = -0.5 * c * x + c * c * c / 12.0 + ai.abs().ln();
    Ok(ai.signum() * ln.exp())
}

/// `φ_{α,c}(x) = ψ_c(x - α)`.
pub fn translated_wave(c: f64, alpha: f64, x: f64) -> Result<f64, WaveError> {
    solitary_wave(c, x - alpha)
}

/// Interval outside which `ψ_c` is negligible for moment integrals.
pub fn wave_window(c: f64) -> (f64, f64) {
    let centre = 0.25 * c * c;
    (centre - 20.0, centre + AIRY_RANGE)
}

/// `(∫ψ_c, ∫xψ_c)` by adaptive quadrature over [`wave_window`].
pub fn wave_moments(c: f64) -> Result<(f64, f64), WaveError> {
    check_speed(c)?;
    let (lo, hi) = wave_window(c);
    let breaks: Vec<f64> = (0..=70).map(|k| lo + (hi - lo) * k as f64 / 70.0).collect();
    let cfg = QuadConfig::with_rel_tol(1e-12);
    let mut failure = None;
    let mut psi = |x: f64| match solitary_wave(c, x) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let m0 = gauss_kronrod_split(&mut psi, &breaks, &cfg).into_result()?;
    let m1 = gauss_kronrod_split(|x| x * psi(x), &breaks, &cfg).into_result()?;
    match failure {
        Some(e) => Err(e),
        None => Ok((m0, m1)),
    }
}

/// Fourth-order central differences: `(f', f'')` at `x` with step `h`.
fn derivatives(
    f: &impl Fn(f64) -> Result<f64, WaveError>,
    x: f64,
    h: f64,
) -> Result<(f64, f64, f64), WaveError> {
    let (m2, m1, p0, p1, p2) = (
        f(x - 2.0 * h)?,
        f(x - h)?,
        f(x)?,
        f(x + h)?,
        f(x + 2.0 * h)?,
    );
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * p0 + 16.0 * p1 - p2) / (12.0 * h * h);
    Ok((p0, d1, d2))
}

/// `sup |φ'' + cφ' + (x - α)φ|` over the nodes of `[x_lo, x_hi]` with spacing `h`,
/// for the translate `φ = φ_{α,c}`.
pub fn translated_residual(
    c: f64,
    alpha: f64,
    x_lo: f64,
    x_hi: f64,
    h: f64,
) -> Result<f64, WaveError> {
    check_speed(c)?;
    let n = ((x_hi - x_lo) / h).round() as usize;
    let f = |x: f64| translated_wave(c, alpha, x);
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let x = x_lo + i as f64 * h;
        let (v, d1, d2) = derivatives(&f, x, h)?;
        worst = worst.max((d2 + c * d1 + (x - alpha) * v).abs());
    }
    Ok(worst)
}

/// `sup |ψ'' + cψ' + xψ|` over the nodes of `[x_lo, x_hi]` with spacing `h`.
pub fn wave_residual(c: f64, x_lo: f64, x_hi: f64, h: f64) -> Result<f64, WaveError> {
    translated_residual(c, 0.0, x_lo, x_hi, h)
}

/// `ψ_c(x)` recovered from its Fourier transform, as the Airy-type contour integral
/// `(1/2π) ∫ exp(iζ³/3 + i(c²/4 - x)(ζ - ic/2) - c³/24) ds` along `ζ = s + ic/2`,
/// where the integrand has modulus `e^{-cs²/2}`. Returns the complex value; its
/// imaginary part vanishes up to quadrature error.
pub fn wave_from_fourier(c: f64, x: f64) -> Result<Complex64, WaveError> {
    check_speed(c)?;
    let eta = 0.5 * c;
    let z = 0.25 * c * c - x;
    let integrand = |s: f64| {
        let zeta = Complex64::new(s, eta);
        let shifted = zeta - Complex64::new(0.0, eta);
        let i = Complex64::i();
        (i * zeta * zeta * zeta / 3.0 + i * z * shifted - c * c * c / 24.0).exp()
    };
    // e^{-cs²/2} < 1e-20 beyond this.
    let s_max = (2.0 * 46.0 / c).sqrt();
    let cfg = QuadConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-16,
        max_intervals: 20_000,
    };
    let re = gauss_kronrod(|s| integrand(s).re, -s_max, s_max, &cfg).into_result()?;
    let im = gauss_kronrod(|s| integrand(s).im, -s_max, s_max, &cfg).into_result()?;
    Ok(Complex64::new(re, im) / (2.0 * PI))
}

/// Number of strict sign changes of `ψ_c` sampled with spacing `1e-3` on
/// `[x_lo, x_hi]`; exact zeros are skipped.
pub fn sign_changes(c: f64, x_lo: f64, x_hi: f64) -> Result<usize, WaveError> {
    check_speed(c)?;
    let h = 1e-3;
    let n = ((x_hi - x_lo) / h).ceil() as usize;
    let mut count = 0;
    let mut last = 0.0_f64;
    for i in 0..=n {
        let x = (x_lo + i as f64 * h).min(x_hi);
        let v = solitary_wave(c, x)?;
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    Ok(count)
}

/// Sampled translate `φ_{α,c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub c: f64,
    pub alpha: f64,
    pub samples: GridFunction,
}

impl WaveProfile {
    /// Samples `φ_{α,c}` on `α + wave_window(c)` with `n` nodes.
    pub fn new(c: f64, alpha: f64, n: usize) -> Result<Self, WaveError> {
        check_speed(c)?;
        let (lo, hi) = wave_window(c);
        let mut values = Vec::with_capacity(n);
        for x in crate::grid::nodes(alpha + lo, alpha + hi, n) {
            values.push(translated_wave(c, alpha, x)?);
        }
        Ok(Self {
            c,
            alpha,
            samples: GridFunction::new(alpha + lo, alpha + hi, values)?,
        })
    }

    pub fn mass(&self) -> f64 {
        self.samples.integral()
    }

    pub fn mean(&self) -> f64 {
        self.samples.weighted_integral(|x| x)
    }

    /// CSV rows `x,psi`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,psi")?;
        for (x, v) in self.samples.points() {
            writeln!(out, "{:.16e},{:.16e}", x, v)?;
        }
        Ok(())
    }
}
