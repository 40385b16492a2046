//! Initial densities `u0` and their right-tail classification.
//!
//! A [`Profile`] is either an analytic family or a sampled grid. Sampled profiles are
//! treated as the measure whose integrals are given by the trapezoid rule on their
//! nodes, so every moment of a `CompactSampled` profile is a finite weighted sum and
//! the closed-form and quadrature routes coincide by construction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{neumaier_sum, GridError, GridFunction};
use crate::quad::{integrate_exp, Hint, QuadConfig, QuadError};
use crate::special::exp_integral_e1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("profile is not integrable or has zero mass (integral = {0})")]
    NonIntegrable(f64),
    #[error("sampled profile is negative at x = {x} (value {value})")]
    Negative { x: f64, value: f64 },
    #[error("sampled profile is nonzero at x = {x}, outside its support [{lo}, {hi}]")]
    OutsideSupport { x: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Initial density. Serialized as `{"kind": "...", <parameters>}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Profile {
    /// `sqrt(a/2π) exp(-a (y-m)²/2)`.
    Gaussian { a: f64, m: f64 },
    /// `α e^{-αy}` on `(0, ∞)`.
    ExponentialTail { alpha: f64 },
    /// `C y^{-2} e^{-αy}` on `(1, ∞)`; `normalizer` is `C` (0 until normalized).
    ModifiedExponentialTail {
        alpha: f64,
        #[serde(default)]
        normalizer: f64,
    },
    /// `C y^{-p}` on `(1, ∞)`; `normalizer` is `C` (0 until normalized).
    AlgebraicTail {
        p: f64,
        #[serde(default)]
        normalizer: f64,
    },
    /// Unit point mass at `x0`.
    Dirac { x0: f64 },
    /// Samples on a uniform grid, zero outside `support`.
    CompactSampled {
        support: [f64; 2],
        grid: GridFunction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailKind {
    VeryLight,
    Light,
    Heavy,
}

/// Right-tail class together with `T = sup{t ≥ 0 : ∫_0^∞ e^{ty} u0(y) dy < ∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailClass {
    pub class: TailKind,
    #[serde(rename = "T", with = "crate::extended")]
    pub t_crit: f64,
}

impl TailClass {
    pub fn from_critical_time(t_crit: f64) -> Self {
        let class = if t_crit == f64::INFINITY {
            TailKind::VeryLight
        } else if t_crit > 0.0 {
            TailKind::Light
        } else {
            TailKind::Heavy
        };
        Self { class, t_crit }
    }
}

/// Mean and variance of the tilted density `e^{ty} u0 / ∫ e^{ty} u0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    pub ln_mass: f64,
    pub mean: f64,
    pub variance: f64,
}

fn positive(name: &'static str, value: f64) -> Result<(), ProfileError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ProfileError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), ProfileError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ProfileError::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

/// `E₂(β) = ∫_1^∞ e^{-βs} s^{-2} ds`.
fn exp_integral_e2(beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        (-beta).exp() - beta * exp_integral_e1(beta)
    }
}

impl Profile {
    pub fn gaussian(a: f64, m: f64) -> Self {
        Profile::Gaussian { a, m }
    }

    pub fn exponential_tail(alpha: f64) -> Self {
        Profile::ExponentialTail { alpha }
    }

    pub fn modified_exponential_tail(alpha: f64) -> Self {
        Profile::ModifiedExponentialTail {
            alpha,
            normalizer: 1.0 / exp_integral_e2(alpha),
        }
    }

    pub fn algebraic_tail(p: f64) -> Self {
        Profile::AlgebraicTail {
            p,
            normalizer: p - 1.0,
        }
    }

    pub fn dirac(x0: f64) -> Self {
        Profile::Dirac { x0 }
    }

    /// Uniform density on `[lo, hi]` sampled at `n` nodes.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self, ProfileError> {
        let grid = GridFunction::from_fn(lo, hi, n, |_| 1.0 / (hi - lo))?;
        Profile::sampled(grid)
    }

    /// Raised-cosine bump of half-width `w` centred at `c`, sampled at `n` nodes.
    pub fn cosine_bump(c: f64, w: f64, n: usize) -> Result<Self, ProfileError> {
        positive("w", w)?;
        let grid = GridFunction::from_fn(c - w, c + w, n, |y| {
            (1.0 + (PI * (y - c) / w).cos()) / (2.0 * w)
        })?;
        Profile::sampled(grid)
    }

    /// Sampled profile supported on the grid's own interval, normalized.
    pub fn sampled(grid: GridFunction) -> Result<Self, ProfileError> {
        let support = [grid.x_lo(), grid.x_hi()];
        normalize(&Profile::CompactSampled { support, grid })
    }

    /// Checks parameter domains and, for sampled data, nonnegativity and support.
    pub fn validate(&self) -> Result<(), ProfileError> {
        match *self {
            Profile::Gaussian { a, m } => {
                positive("a", a)?;
                finite("m", m)
            }
            Profile::ExponentialTail { alpha } => positive("alpha", alpha),
            Profile::ModifiedExponentialTail { alpha, normalizer } => {
                positive("alpha", alpha)?;
                finite("normalizer", normalizer)
            }
            Profile::AlgebraicTail { p, normalizer } => {
                if !(p > 1.0 && p.is_finite()) {
                    return Err(ProfileError::InvalidParameter {
                        name: "p",
                        value: p,
                        reason: "must exceed 1",
                    });
                }
                finite("normalizer", normalizer)
            }
            Profile::Dirac { x0 } => finite("x0", x0),
            Profile::CompactSampled { support, ref grid } => {
                let [lo, hi] = support;
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(GridError::BadBounds { x_lo: lo, x_hi: hi }.into());
                }
                for (x, value) in grid.points() {
                    if value < 0.0 {
                        return Err(ProfileError::Negative { x, value });
                    }
                    if value != 0.0 && (x < lo || x > hi) {
                        return Err(ProfileError::OutsideSupport { x, lo, hi });
                    }
                }
                Ok(())
            }
        }
    }

    /// Closed interval outside of which `u0` vanishes (possibly infinite).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Profile::ExponentialTail { .. } => (0.0, f64::INFINITY),
            Profile::ModifiedExponentialTail { .. } | Profile::AlgebraicTail { .. } => {
                (1.0, f64::INFINITY)
            }
            Profile::Dirac { x0 } => (x0, x0),
            Profile::CompactSampled { support, .. } => (support[0], support[1]),
        }
    }

    /// `ln u0(y)`; `-inf` off the support. Dirac has no density and gives `-inf`.
    pub fn ln_density(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y < lo || y > hi {
            return f64::NEG_INFINITY;
        }
        match *self {
            Profile::Gaussian { a, m } => 0.5 * (a / (2.0 * PI)).ln() - 0.5 * a * (y - m) * (y - m),
            Profile::ExponentialTail { alpha } => alpha.ln() - alpha * y,
            Profile::ModifiedExponentialTail { alpha, normalizer } => {
                normalizer.ln() - 2.0 * y.ln() - alpha * y
            }
            Profile::AlgebraicTail { p, normalizer } => normalizer.ln() - p * y.ln(),
            Profile::Dirac { .. } => f64::NEG_INFINITY,
            Profile::CompactSampled { ref grid, .. } => grid.interpolate(y).ln(),
        }
    }

    /// `u0(y)`; the Dirac mass has no density and gives 0.
    pub fn density(&self, y: f64) -> f64 {
        self.ln_density(y).exp()
    }

    /// Nodes and trapezoid weights `(y_i, w_i u0(y_i))` of a sampled profile.
    pub fn sample_weights(&self) -> Option<Vec<(f64, f64)>> {
        let Profile::CompactSampled { grid, .. } = self else {
            return None;
        };
        let h = grid.spacing();
        let last = grid.len() - 1;
        Some(
            grid.points()
                .enumerate()
                .map(|(i, (y, v))| {
                    let end = if i == 0 || i == last { 0.5 } else { 1.0 };
                    (y, end * h * v)
                })
                .collect(),
        )
    }

    /// Location and spread of `u0`, used to size evaluation windows.
    pub fn spread(&self) -> (f64, f64) {
        match tilted_moments(self, 0.0) {
            Some(tm) if tm.variance.is_finite() => (tm.mean, tm.variance.max(0.0).sqrt()),
            Some(tm) if tm.mean.is_finite() => (tm.mean, 1.0),
            _ => {
                let (lo, _) = self.support();
                (lo.max(0.0), 1.0)
            }
        }
    }
}

/// Returns a copy with unit total integral.
pub fn normalize(p: &Profile) -> Result<Profile, ProfileError> {
    p.validate()?;
    match p {
        Profile::ModifiedExponentialTail { alpha, .. } => {
            Ok(Profile::modified_exponential_tail(*alpha))
        }
        Profile::AlgebraicTail { p, .. } => Ok(Profile::algebraic_tail(*p)),
        Profile::CompactSampled { support, grid } => {
            let mass = grid.integral();
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(ProfileError::NonIntegrable(mass));
            }
            Ok(Profile::CompactSampled {
                support: *support,
                grid: grid.scaled(1.0 / mass)?,
            })
        }
        _ => Ok(p.clone()),
    }
}

/// Critical time `T` and the resulting class.
pub fn classify_tail(p: &Profile) -> TailClass {
    let t_crit = match *p {
        Profile::Gaussian { .. } | Profile::Dirac { .. } | Profile::CompactSampled { .. } => {
            f64::INFINITY
        }
        Profile::ExponentialTail { alpha } | Profile::ModifiedExponentialTail { alpha, .. } => {
            alpha
        }
        Profile::AlgebraicTail { .. } => 0.0,
    };
    TailClass::from_critical_time(t_crit)
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + neumaier_sum(terms.map(|l| (l - max).exp())).ln()
}

/// `ln ∫ e^{ty} u0(y) dy`, `+inf` when the integral diverges.
pub fn ln_exp_moment(p: &Profile, t: f64) -> f64 {
    match *p {
        Profile::Gaussian { a, m } => m * t + t * t / (2.0 * a),
        Profile::ExponentialTail { alpha } => {
            if t < alpha {
                alpha.ln() - (alpha - t).ln()
            } else {
                f64::INFINITY
            }
        }
        Profile::ModifiedExponentialTail { alpha, normalizer } => {
            if t <= alpha {
                normalizer.ln() + exp_integral_e2(alpha - t).ln()
            } else {
                f64::INFINITY
            }
        }
        Profile::AlgebraicTail { p, normalizer } => {
            if t <= 0.0 {
                (normalizer / (p - 1.0)).ln()
            } else {
                f64::INFINITY
            }
        }
        Profile::Dirac { x0 } => t * x0,
        Profile::CompactSampled { .. } => {
            let w = p.sample_weights().unwrap_or_default();
            log_sum_exp(
                w.iter()
                    .filter(|(_, c)| *c > 0.0)
                    .map(|&(y, c)| t * y + c.ln()),
            )
        }
    }
}

/// Tilted mean and variance at time `t`; `None` when the tilted density does not
/// exist (`∫ e^{ty} u0 = ∞`). Moments that diverge are reported as `+inf`.
pub fn tilted_moments(p: &Profile, t: f64) -> Option<TiltedMoments> {
    let ln_mass = ln_exp_moment(p, t);
    if !ln_mass.is_finite() {
        return None;
    }
    let (mean, variance) = match *p {
        Profile::Gaussian { a, m } => (m + t / a, 1.0 / a),
        Profile::ExponentialTail { alpha } => {
            let beta = alpha - t;
            (1.0 / beta, 1.0 / (beta * beta))
        }
        Profile::ModifiedExponentialTail { alpha, .. } => {
            let beta = alpha - t;
            let e2 = exp_integral_e2(beta);
            if beta == 0.0 {
                (f64::INFINITY, f64::INFINITY)
            } else {
                let mean = exp_integral_e1(beta) / e2;
                let second = (-beta).exp() / beta / e2;
                (mean, second - mean * mean)
            }
        }
        Profile::AlgebraicTail { p, .. } => {
            let mean = if p > 2.0 {
                (p - 1.0) / (p - 2.0)
            } else {
                f64::INFINITY
            };
            let var = if p > 3.0 {
                (p - 1.0) / (p - 3.0) - mean * mean
            } else {
                f64::INFINITY
            };
            (mean, var)
        }
        Profile::Dirac { x0 } => (x0, 0.0),
        Profile::CompactSampled { .. } => {
            let w = p.sample_weights().unwrap_or_default();
            let probs: Vec<(f64, f64)> = w
                .iter()
                .filter(|(_, c)| *c > 0.0)
                .map(|&(y, c)| (y, (t * y + c.ln() - ln_mass).exp()))
                .collect();
            let mean = neumaier_sum(probs.iter().map(|&(y, q)| y * q));
            let var = neumaier_sum(probs.iter().map(|&(y, q)| (y - mean) * (y - mean) * q));
            (mean, var)
        }
    };
    Some(TiltedMoments {
        ln_mass,
        mean,
        variance,
    })
}

/// `∫ e^{ty} y^k u0(y) dy` for `k ∈ {0, 1, 2}` from closed forms; `+inf` on divergence.
pub fn exp_moment(p: &Profile, t: f64, k: u32) -> f64 {
    assert!(k <= 2, "exp_moment supports k in {{0, 1, 2}}");
    if let Profile::Dirac { x0 } = *p {
        return (t * x0).exp() * x0.powi(k as i32);
    }
    if let Profile::CompactSampled { .. } = p {
        let w = p.sample_weights().unwrap_or_default();
        return neumaier_sum(w.iter().map(|&(y, c)| (t * y).exp() * y.powi(k as i32) * c));
    }
    match tilted_moments(p, t) {
        None => f64::INFINITY,
        Some(tm) => {
            let m0 = tm.ln_mass.exp();
            match k {
                0 => m0,
                1 => tm.mean * m0,
                _ => (tm.variance + tm.mean * tm.mean) * m0,
            }
        }
    }
}

/// Same as [`exp_moment`] but computed by adaptive quadrature of the density, with
/// no use of the family's closed form. Divergent integrals give `+inf`.
pub fn exp_moment_quadrature(p: &Profile, t: f64, k: u32, cfg: &QuadConfig) -> f64 {
    if matches!(p, Profile::Dirac { .. } | Profile::CompactSampled { .. }) {
        return exp_moment(p, t, k);
    }
    let (lo, hi) = p.support();
    let hint = Hint::new(0.0_f64.clamp(lo, hi), 1.0);
    let g = |y: f64| t * y + p.ln_density(y);
    let w = |y: f64| y.powi(k as i32);
    match integrate_exp(g, w, lo, hi, hint, cfg) {
        Ok(v) => {
            let value = v.value();
            if value.abs() > 1e15 {
                f64::INFINITY
            } else {
                value
            }
        }
        Err(QuadError::Divergent) => f64::INFINITY,
        Err(QuadError::NotConverged { value, .. }) => value,
    }
}
