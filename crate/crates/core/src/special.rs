//! Special functions: the upper Gaussian tail integral, the Airy function Ai and the
//! heat kernel.
//!
//! `erf_upper` is **not** the textbook `erfc`: it is `∫_θ^∞ e^{-z²/2} dz`, i.e.
//! `sqrt(π/2) · erfc(θ/√2)`. Every caller goes through this module so the `√2`
//! convention lives in one place.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{function}({x}) is outside the supported range |x| <= {limit}")]
    DomainError {
        function: &'static str,
        x: f64,
        limit: f64,
    },
    #[error("invalid special-function configuration: {0}")]
    BadConfig(&'static str),
}

/// Largest `|x|` for which [`airy_ai`] is documented.
pub const AIRY_RANGE: f64 = 50.0;

const SQRT_FRAC_PI_2: f64 = 1.253_314_137_315_500_3;
const AI0: f64 = 0.355_028_053_887_817_239_26;
const AIP0: f64 = -0.258_819_403_792_806_798_41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFnConfig {
    /// `|x|` beyond which Ai switches to its asymptotic expansions.
    pub series_cutoff: f64,
    pub quad_tol: f64,
}

impl Default for SpecialFnConfig {
    fn default() -> Self {
        Self {
            series_cutoff: 8.0,
            quad_tol: 1e-12,
        }
    }
}

impl SpecialFnConfig {
    pub fn validate(&self) -> Result<(), SpecialError> {
        if !(self.series_cutoff > 0.0 && self.series_cutoff.is_finite()) {
            return Err(SpecialError::BadConfig("series_cutoff must be positive"));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            return Err(SpecialError::BadConfig("quad_tol must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// `∫_θ^∞ e^{-z²/2} dz`.
pub fn erf_upper(theta: f64) -> f64 {
    SQRT_FRAC_PI_2 * libm::erfc(theta * FRAC_1_SQRT_2)
}

/// `ln erf_upper(θ)`, finite for every finite `θ`.
pub fn ln_erf_upper(theta: f64) -> f64 {
    if theta < 5.0 {
        return erf_upper(theta).ln();
    }
    let z = theta * FRAC_1_SQRT_2;
    // erfc(z) = exp(-z²)/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + (0.5 * k as f64) / tail;
    }
    SQRT_FRAC_PI_2.ln() - z * z - 0.5 * PI.ln() - tail.ln()
}

/// Exponential integral `E₁(x) = ∫_1^∞ e^{-xs}/s ds` for `x > 0`; `+inf` at `x = 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum += term / k as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
        return -EULER_GAMMA - x.ln() - sum;
    }
    // Modified Lentz evaluation of the continued fraction.
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// `(4πt)^{-1/2} exp(-(x-y)²/(4t))`.
pub fn heat_kernel(t: f64, x: f64, y: f64) -> f64 {
    ln_heat_kernel(t, x, y).exp()
}

pub fn ln_heat_kernel(t: f64, x: f64, y: f64) -> f64 {
    let d = x - y;
    -0.5 * (4.0 * PI * t).ln() - d * d / (4.0 * t)
}

/// `Ai(x)` for `|x| <= 50`.
///
/// Relative accuracy is about `1e-13` over the whole range, measured against the
/// oscillation envelope `|x|^{-1/4}/√π` on the negative axis.
pub fn airy_ai(x: f64) -> Result<f64, SpecialError> {
    default_airy().ai(x)
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_ai_with_derivative(x: f64) -> Result<(f64, f64), SpecialError> {
    default_airy().ai_and_derivative(x)
}

fn default_airy() -> &'static Airy {
    static AIRY: OnceLock<Airy> = OnceLock::new();
    AIRY.get_or_init(|| Airy::new(SpecialFnConfig::default()).expect("default config is valid"))
}

/// Ai evaluator: Taylor continuation of the Airy ODE from tabulated nodes for
/// `|x| <= series_cutoff`, asymptotic expansions beyond.
///
/// Nodes on the negative axis are continued outward from the Maclaurin data at the
/// origin (the oscillatory side is neutrally stable). Nodes on the positive axis are
/// continued *backwards* from the asymptotic expansion just past the cutoff, the
/// direction in which Ai dominates Bi, so cancellation never builds up.
#[derive(Debug, Clone)]
pub struct Airy {
    cutoff: f64,
    step: f64,
    lo: f64,
    nodes: Vec<(f64, f64)>,
}

impl Airy {
    pub fn new(cfg: SpecialFnConfig) -> Result<Self, SpecialError> {
        cfg.validate()?;
        let step = 0.5;
        let half = (cfg.series_cutoff / step).ceil() as usize + 1;
        let lo = -(half as f64) * step;
        let mut nodes = vec![(0.0, 0.0); 2 * half + 1];
        nodes[half] = (AI0, AIP0);
        let mut state = (AI0, AIP0);
        for k in 1..=half {
            let x0 = -((k - 1) as f64) * step;
            state = taylor_step(x0, state, -step);
            nodes[half - k] = state;
        }
        let x_top = half as f64 * step;
        let mut state = asymptotic_positive(x_top);
        nodes[2 * half] = state;
        for k in (1..half).rev() {
            let x0 = (k + 1) as f64 * step;
            state = taylor_step(x0, state, -step);
            nodes[half + k] = state;
        }
        Ok(Self {
            cutoff: cfg.series_cutoff,
            step,
            lo,
            nodes,
        })
    }

    pub fn ai(&self, x: f64) -> Result<f64, SpecialError> {
        self.ai_and_derivative(x).map(|(v, _)| v)
    }

    pub fn ai_and_derivative(&self, x: f64) -> Result<(f64, f64), SpecialError> {
        if !(x.abs() <= AIRY_RANGE) {
            return Err(SpecialError::DomainError {
                function: "Ai",
                x,
                limit: AIRY_RANGE,
            });
        }
        if x > self.cutoff {
            return Ok(asymptotic_positive(x));
        }
        if x < -self.cutoff {
            return Ok(asymptotic_negative(-x));
        }
        let k = ((x - self.lo) / self.step).round() as usize;
        let k = k.min(self.nodes.len() - 1);
        let x0 = self.lo + k as f64 * self.step;
        Ok(taylor_step(x0, self.nodes[k], x - x0))
    }
}

/// Sums the Taylor series of a solution of `y'' = x y` about `x0` at offset `h`.
fn taylor_step(x0: f64, (y0, dy0): (f64, f64), h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y0, dy0);
    }
    // a_{n+2} = (x0 a_n + a_{n-1}) / ((n+2)(n+1)), stored as c_n = a_n h^n.
    let h2 = h * h;
    let (mut c_nm1, mut c_n, mut c_np1) = (0.0, y0, dy0 * h);
    let mut value = c_n + c_np1;
    let mut deriv_h = c_np1; // h · y'(x0 + h) = Σ n c_n
    let mut n = 0_usize;
    let mut quiet = 0;
    loop {
        // c_{n+2} = (x0 h² c_n + h³ c_{n-1}) / ((n+2)(n+1))
        let denom = ((n + 2) * (n + 1)) as f64;
        let next = (x0 * h2 * c_n + h2 * h * c_nm1) / denom;
        value += next;
        deriv_h += (n + 2) as f64 * next;
        (c_nm1, c_n, c_np1) = (c_n, c_np1, next);
        n += 1;
        let scale = value.abs() + deriv_h.abs() + f64::MIN_POSITIVE;
        if next.abs() * (n + 2) as f64 <= 1e-18 * scale {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if n > 400 {
            break;
        }
    }
    (value, deriv_h / h)
}

/// Coefficients `u_k` of the Ai asymptotic series; `v_k = -(6k+1)/(6k-1) u_k`.
fn asymptotic_coefficients() -> &'static [(f64, f64)] {
    static COEFFS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = vec![(1.0, 1.0)];
        let mut u = 1.0_f64;
        for k in 1..40 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
            out.push((u, v));
        }
        out
    })
}

/// Indices up to the smallest term of `Σ c_k / ζ^k`.
fn optimal_terms(zeta: f64) -> usize {
    let coeffs = asymptotic_coefficients();
    let mut best = f64::INFINITY;
    let mut n = 1;
    for (k, &(u, _)) in coeffs.iter().enumerate().skip(1) {
        let term = u / zeta.powi(k as i32);
        if term >= best {
            break;
        }
        best = term;
        n = k + 1;
    }
    n
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let coeffs = asymptotic_coefficients();
    let n = optimal_terms(zeta);
    let (mut su, mut sv) = (0.0, 0.0);
    let mut pow = 1.0;
    for &(u, v) in coeffs.iter().take(n) {
        su += u * pow;
        sv += v * pow;
        pow *= -1.0 / zeta;
    }
    let q = x.powf(0.25);
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    (pref / q * su, -pref * q * sv)
}

fn asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let coeffs = asymptotic_coefficients();
    let n = optimal_terms(zeta);
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    let mut pow = 1.0;
    for (k, &(u, v)) in coeffs.iter().take(n).enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * u * pow;
            pv += sign * v * pow;
        } else {
            qu += sign * u * pow;
            qv += sign * v * pow;
        }
        pow /= zeta;
    }
    let phase = zeta - PI / 4.0;
    let (s, c) = phase.sin_cos();
    let q = z.powf(0.25);
    let ai = (c * pu + s * qu) / (PI.sqrt() * q);
    let dai = q / PI.sqrt() * (s * pv - c * qv);
    (ai, dai)
}
