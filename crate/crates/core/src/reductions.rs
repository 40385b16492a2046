//! Transforms relating modulated equations to the heat equation.
//!
//! * [`gauge_external`]: `∂t u = ∂xx u + a(t) u` from `∂t v = ∂xx v` by `u = e^{∫a} v`.
//! * [`momentum_invert`]: a nonlocal equation `∂t u = ∂xx u + (f - ∫f u) u` from its
//!   linear version `∂t v = ∂xx v + f v` by `u = v / (1 + ∫₀ᵗ ∫ f v)`.
//! * [`avron_herbst`]: `∂t v = ∂xx v + x v` from the heat equation.
//! * [`lens_transform`] and [`mehler_solution`]: `∂t v = ∂xx v - x² v` from the heat
//!   equation, through a [`FundamentalPair`] or the Mehler kernel.
//!
//! Heat flows are evaluated through [`HeatFlow::ln_w`] so that every composition can
//! stay in log-space.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::closedform::{ClosedFormError, FrameStatus, SolutionFrame};
use crate::grid::{neumaier_sum, GridError, GridFunction};
use crate::profiles::Profile;
use crate::quad::{gauss_kronrod, integrate_exp, Hint, QuadConfig, QuadError};
use crate::special::ln_heat_kernel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("momentum denominator vanishes at t* ≈ {t_star} (bracket [{t_lo}, {t_hi}])")]
    BlowUp { t_star: f64, t_lo: f64, t_hi: f64 },
    #[error("log-space value {0} overflows f64")]
    Overflow(f64),
    #[error("Wronskian drifted by {drift:e}; reduce the step")]
    StepTooLarge { drift: f64 },
    #[error("{what} = {value} is outside {range}")]
    DomainError {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid frame sequence: {0}")]
    InvalidFrames(&'static str),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// Time-only coefficient `a(t)` with its primitives.
#[derive(Clone)]
pub struct TimeFactor {
    a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for TimeFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeFactor").finish_non_exhaustive()
    }
}

fn time_integral(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    gauss_kronrod(f, 0.0, t, &QuadConfig::default()).value
}

impl TimeFactor {
    pub fn new(a: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { a: Arc::new(a) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    pub fn a(&self, t: f64) -> f64 {
        (self.a)(t)
    }

    /// `A(t) = ∫₀ᵗ a`.
    pub fn big_a(&self, t: f64) -> f64 {
        time_integral(|s| self.a(s), t)
    }

    /// `A₂(t) = ∫₀ᵗ ∫₀ˢ a = ∫₀ᵗ (t - s) a(s) ds`.
    pub fn big_a2(&self, t: f64) -> f64 {
        time_integral(|s| (t - s) * self.a(s), t)
    }

    /// `∫₀ᵗ A(s)² ds`.
    pub fn big_a_squared_integral(&self, t: f64) -> f64 {
        time_integral(
            |s| {
                let v = self.big_a(s);
                v * v
            },
            t,
        )
    }
}

/// `u = e^{A(t)} v` applied to a field sampled at time `t`.
pub fn gauge_external(
    v: &GridFunction,
    factor: &TimeFactor,
    t: f64,
) -> Result<GridFunction, ReductionError> {
    let ln_g = factor.big_a(t);
    if ln_g > 709.0 {
        return Err(ReductionError::Overflow(ln_g));
    }
    Ok(v.scaled(ln_g.exp())?)
}

/// A solution `w` of `∂t w = ∂xx w`, evaluated in log-space.
pub trait HeatFlow {
    /// `ln w(t, x)`; `-inf` where `w = 0`.
    fn ln_w(&self, t: f64, x: f64) -> f64;

    fn w(&self, t: f64, x: f64) -> f64 {
        self.ln_w(t, x).exp()
    }

    /// Rough location and width of `w(t, ·)`, used as a quadrature hint.
    fn bulk(&self, t: f64) -> Hint;
}

/// Heat flow issued from a profile.
impl HeatFlow for Profile {
    fn ln_w(&self, t: f64, x: f64) -> f64 {
        if t == 0.0 {
            return self.ln_density(x);
        }
        match *self {
            Profile::Gaussian { a, m } => {
                let at = a / (1.0 + 2.0 * a * t);
                0.5 * (at / (2.0 * PI)).ln() - 0.5 * at * (x - m) * (x - m)
            }
            Profile::Dirac { x0 } => ln_heat_kernel(t, x, x0),
            Profile::CompactSampled { .. } => {
                let weights = self.sample_weights().unwrap_or_default();
                log_sum_exp(
                    weights
                        .iter()
                        .filter(|(_, c)| *c > 0.0)
                        .map(|&(y, c)| c.ln() + ln_heat_kernel(t, x, y)),
                )
            }
            _ => {
                let (lo, hi) = self.support();
                let yc = x.clamp(lo, hi);
                let ln_const = -(yc - x) * (yc - x) / (4.0 * t) - 0.5 * (4.0 * PI * t).ln();
                let r = integrate_exp(
                    |y| -(y - yc) * (y + yc - 2.0 * x) / (4.0 * t) + self.ln_density(y),
                    |_| 1.0,
                    lo,
                    hi,
                    Hint::new(yc, (2.0 * t).sqrt()),
                    &QuadConfig::default(),
                );
                match r {
                    Ok(v) => ln_const + v.ln_value(),
                    Err(_) => f64::NAN,
                }
            }
        }
    }

    fn bulk(&self, t: f64) -> Hint {
        let (mean, sd) = self.spread();
        Hint::new(mean, (2.0 * t).sqrt() + sd)
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + neumaier_sum(terms.iter().map(|l| (l - max).exp())).ln()
}

/// `ln v(t,x)` with `v(t,x) = w(t, x + t²) e^{tx + t³/3}`, the solution of
/// `∂t v = ∂xx v + x v` with the same initial data as `w`.
pub fn ln_avron_herbst(w: &impl HeatFlow, t: f64, x: f64) -> f64 {
    w.ln_w(t, x + t * t) + t * x + t * t * t / 3.0
}

pub fn avron_herbst(w: &impl HeatFlow, t: f64, x: f64) -> Result<f64, ReductionError> {
    finite_exp(ln_avron_herbst(w, t, x))
}

/// General shift for `∂t v = ∂xx v + a(t) x v`:
/// `v(t,x) = w(t, x + 2A₂(t)) exp(x A(t) + ∫₀ᵗ A²)`.
pub fn ln_avron_herbst_general(w: &impl HeatFlow, factor: &TimeFactor, t: f64, x: f64) -> f64 {
    w.ln_w(t, x + 2.0 * factor.big_a2(t)) + x * factor.big_a(t) + factor.big_a_squared_integral(t)
}

fn finite_exp(ln: f64) -> Result<f64, ReductionError> {
    if ln > 709.0 {
        Err(ReductionError::Overflow(ln))
    } else {
        Ok(ln.exp())
    }
}

/// Divides each frame by `1 + ∫₀ᵗ v̄`, `v̄(s) = ∫ f(s,x) v(s,x) dx`, using the trapezoid
/// rule in `x` on each frame and in time across frames. The first frame must be at
/// `t = 0`.
pub fn momentum_invert(
    v_frames: &[SolutionFrame],
    f: impl Fn(f64, f64) -> f64,
) -> Result<Vec<SolutionFrame>, ReductionError> {
    let Some(first) = v_frames.first() else {
        return Err(ReductionError::InvalidFrames("no frames"));
    };
    if first.t != 0.0 {
        return Err(ReductionError::InvalidFrames(
            "first frame must be at t = 0",
        ));
    }
    if v_frames.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(ReductionError::InvalidFrames("times must increase"));
    }
    let vbar: Vec<f64> = v_frames
        .iter()
        .map(|fr| fr.u.weighted_integral(|x| f(fr.t, x)))
        .collect();
    let mut out = Vec::with_capacity(v_frames.len());
    let mut cumulative = 0.0;
    let mut prev_den = 1.0;
    for (k, fr) in v_frames.iter().enumerate() {
        if k > 0 {
            let dt = fr.t - v_frames[k - 1].t;
            cumulative += 0.5 * dt * (vbar[k] + vbar[k - 1]);
        }
        let den = 1.0 + cumulative;
        if den <= 0.0 {
            let (t_lo, t_hi) = (v_frames[k - 1].t, fr.t);
            let t_star = t_lo + (t_hi - t_lo) * prev_den / (prev_den - den);
            return Err(ReductionError::BlowUp { t_star, t_lo, t_hi });
        }
        prev_den = den;
        let u = fr.u.scaled(1.0 / den)?;
        let mass = u.integral();
        let u_bar = u.weighted_integral(|x| x);
        out.push(SolutionFrame {
            t: fr.t,
            u,
            u_bar,
            mass,
            status: FrameStatus::Alive,
        });
    }
    Ok(out)
}

/// `1 + ∫₀ᵗ v̄(s) ds` by adaptive quadrature.
pub fn momentum_denominator(
    vbar: impl Fn(f64) -> Result<f64, ReductionError>,
    t: f64,
) -> Result<f64, ReductionError> {
    if t == 0.0 {
        return Ok(1.0);
    }
    let mut failure = None;
    let r = gauss_kronrod(
        |s| match vbar(s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        t,
        &QuadConfig::with_rel_tol(1e-12),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(1.0 + r.into_result()?)
}

/// `∫ f(x) exp(ln_v(x)) dx` over the real line.
fn weighted_mass(
    ln_v: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
    hint: Hint,
) -> Result<f64, ReductionError> {
    let r = integrate_exp(
        ln_v,
        f,
        f64::NEG_INFINITY,
        f64::INFINITY,
        hint,
        &QuadConfig::with_rel_tol(1e-12),
    )?;
    Ok(r.value())
}

/// `u(t, x)` for each `x` through the chain heat flow → Avron–Herbst shift →
/// momentum inversion with weight `x`, using quadrature for every integral.
pub fn reduction_route(w: &impl HeatFlow, t: f64, xs: &[f64]) -> Result<Vec<f64>, ReductionError> {
    gauged_reduction_route(w, &TimeFactor::constant(0.0), t, xs)
}

/// Same chain for `∂t v = ∂xx v + (x + a(t)) v`: the Avron–Herbst solution is
/// multiplied by the gauge `e^{A(t)}` and inverted with weight `x + a(t)`. The result
/// does not depend on `a`.
pub fn gauged_reduction_route(
    w: &impl HeatFlow,
    factor: &TimeFactor,
    t: f64,
    xs: &[f64],
) -> Result<Vec<f64>, ReductionError> {
    let ln_v = |s: f64, x: f64| ln_avron_herbst(w, s, x) + factor.big_a(s);
    let hint = |s: f64| {
        let h = w.bulk(s);
        Hint::new(h.center + s * s + s * h.scale * h.scale, h.scale)
    };
    let vbar = |s: f64| {
        if s == 0.0 {
            let h = w.bulk(0.0);
            return weighted_mass(|x| w.ln_w(0.0, x), |x| x + factor.a(0.0), h);
        }
        let a_s = factor.a(s);
        weighted_mass(|x| ln_v(s, x), |x| x + a_s, hint(s))
    };
    let den = momentum_denominator(vbar, t)?;
    if den <= 0.0 {
        return Err(ReductionError::BlowUp {
            t_star: t,
            t_lo: 0.0,
            t_hi: t,
        });
    }
    xs.iter()
        .map(|&x| finite_exp(ln_v(t, x) - den.ln()))
        .collect()
}

/// Drift-free flow `∂t u = ∂xx u - ū u`: `v = w` is the heat flow, inverted with
/// weight `x` on frames `0, dt, 2dt, ..., t_max`.
pub fn drift_free_flow(
    p: &Profile,
    t_max: f64,
    dt: f64,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<Vec<SolutionFrame>, ReductionError> {
    if !(dt > 0.0 && t_max > 0.0) {
        return Err(ReductionError::DomainError {
            what: "time step",
            value: dt,
            range: "dt > 0, t_max > 0",
        });
    }
    let steps = (t_max / dt).round() as usize;
    let mut frames = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let u = GridFunction::from_fn(x_lo, x_hi, n, |x| p.w(t, x))?;
        frames.push(SolutionFrame {
            t,
            mass: u.integral(),
            u_bar: u.weighted_integral(|x| x),
            u,
            status: FrameStatus::Alive,
        });
    }
    momentum_invert(&frames, |_, x| x)
}

/// Solutions `μ, ν` of `ÿ = a(t) y` with `μ(0)=0, μ̇(0)=1, ν(0)=1, ν̇(0)=0`, tabulated
/// by the classical fourth-order Runge–Kutta scheme.
#[derive(Debug, Clone)]
pub struct FundamentalPair {
    pub time_grid: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub mu_dot: Vec<f64>,
    pub nu_dot: Vec<f64>,
    factor: TimeFactor,
    dt: f64,
}

type PairState = [f64; 4];

fn rk4_step(factor: &TimeFactor, t: f64, y: PairState, h: f64) -> PairState {
    let rhs = |t: f64, y: &PairState| {
        let a = factor.a(t);
        [y[1], a * y[0], y[3], a * y[2]]
    };
    let add = |y: &PairState, k: &PairState, c: f64| {
        [
            y[0] + c * k[0],
            y[1] + c * k[1],
            y[2] + c * k[2],
            y[3] + c * k[3],
        ]
    };
    let k1 = rhs(t, &y);
    let k2 = rhs(t + 0.5 * h, &add(&y, &k1, 0.5 * h));
    let k3 = rhs(t + 0.5 * h, &add(&y, &k2, 0.5 * h));
    let k4 = rhs(t + h, &add(&y, &k3, h));
    let mut out = y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn wronskian(s: &PairState) -> f64 {
    s[1] * s[2] - s[0] * s[3]
}

/// Integrates the pair on `[0, t_max]` with step `dt`.
pub fn fundamental_pair(
    factor: &TimeFactor,
    t_max: f64,
    dt: f64,
) -> Result<FundamentalPair, ReductionError> {
    if !(dt > 0.0 && t_max >= 0.0 && t_max.is_finite()) {
        return Err(ReductionError::DomainError {
            what: "step",
            value: dt,
            range: "dt > 0 and finite t_max >= 0",
        });
    }
    let steps = (t_max / dt).ceil().max(1.0) as usize;
    let h = t_max / steps as f64;
    let h = if h > 0.0 { h } else { dt };
    let mut state: PairState = [0.0, 1.0, 1.0, 0.0];
    let mut pair = FundamentalPair {
        time_grid: Vec::with_capacity(steps + 1),
        mu: Vec::with_capacity(steps + 1),
        nu: Vec::with_capacity(steps + 1),
        mu_dot: Vec::with_capacity(steps + 1),
        nu_dot: Vec::with_capacity(steps + 1),
        factor: factor.clone(),
        dt: h,
    };
    for k in 0..=steps {
        let t = if k == steps { t_max } else { k as f64 * h };
        if k > 0 {
            state = rk4_step(factor, (k - 1) as f64 * h, state, h);
        }
        let drift = (wronskian(&state) - 1.0).abs();
        if !(drift <= 1e-6) {
            return Err(ReductionError::StepTooLarge { drift });
        }
        pair.time_grid.push(t);
        pair.mu.push(state[0]);
        pair.mu_dot.push(state[1]);
        pair.nu.push(state[2]);
        pair.nu_dot.push(state[3]);
    }
    Ok(pair)
}

/// `(μ, μ̇, ν, ν̇)` at a time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairValue {
    pub mu: f64,
    pub mu_dot: f64,
    pub nu: f64,
    pub nu_dot: f64,
}

impl FundamentalPair {
    pub fn t_max(&self) -> f64 {
        *self.time_grid.last().unwrap_or(&0.0)
    }

    /// Values at any `τ ∈ [0, t_max]`, by a partial Runge–Kutta step from the node
    /// below `τ`.
    pub fn at(&self, tau: f64) -> Result<PairValue, ReductionError> {
        let t_max = self.t_max();
        if !(tau >= 0.0 && tau <= t_max * (1.0 + 1e-14)) {
            return Err(ReductionError::DomainError {
                what: "pair time",
                value: tau,
                range: "the tabulated grid",
            });
        }
        let k = ((tau / self.dt).floor() as usize).min(self.time_grid.len() - 1);
        let t0 = self.time_grid[k];
        let y = [self.mu[k], self.mu_dot[k], self.nu[k], self.nu_dot[k]];
        let y = if tau > t0 {
            rk4_step(&self.factor, t0, y, tau - t0)
        } else {
            y
        };
        Ok(PairValue {
            mu: y[0],
            mu_dot: y[1],
            nu: y[2],
            nu_dot: y[3],
        })
    }

    /// Largest `|μ̇ν - μν̇ - 1|` over the grid.
    pub fn wronskian_drift(&self) -> f64 {
        (0..self.time_grid.len())
            .map(|k| (self.mu_dot[k] * self.nu[k] - self.mu[k] * self.nu_dot[k] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Richardson estimate of the error at `t_max`: the same run with half the step,
    /// differences divided by `2⁴ - 1`.
    pub fn richardson_error(&self) -> Result<f64, ReductionError> {
        let fine = fundamental_pair(&self.factor, self.t_max(), 0.5 * self.dt)?;
        let last = self.time_grid.len() - 1;
        let flast = fine.time_grid.len() - 1;
        let diffs = [
            self.mu[last] - fine.mu[flast],
            self.mu_dot[last] - fine.mu_dot[flast],
            self.nu[last] - fine.nu[flast],
            self.nu_dot[last] - fine.nu_dot[flast],
        ];
        Ok(diffs.iter().map(|d| d.abs()).fold(0.0, f64::max) / 15.0)
    }

    /// CSV rows `t,mu,nu,mu_dot,nu_dot`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,mu,nu,mu_dot,nu_dot")?;
        for k in 0..self.time_grid.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.time_grid[k], self.mu[k], self.nu[k], self.mu_dot[k], self.nu_dot[k]
            )?;
        }
        Ok(())
    }
}

/// `ln v(t,x)` with
/// `v(t,x) = ν(2t)^{-1/2} exp(-x² ν̇(2t) / (2ν(2t))) w(μ(2t)/(2ν(2t)), x/ν(2t))`.
///
/// With constant `a` this solves `∂t v = ∂xx v - a x² v`; for time-dependent
/// coefficients the potential is `a(2t) x²`.
pub fn ln_lens_transform(
    w: &impl HeatFlow,
    pair: &FundamentalPair,
    t: f64,
    x: f64,
) -> Result<f64, ReductionError> {
    let pv = pair.at(2.0 * t)?;
    if !(pv.nu > 0.0) {
        return Err(ReductionError::DomainError {
            what: "nu(2t)",
            value: pv.nu,
            range: "(0, inf)",
        });
    }
    let s = pv.mu / (2.0 * pv.nu);
    Ok(-0.5 * pv.nu.ln() - 0.5 * x * x * pv.nu_dot / pv.nu + w.ln_w(s, x / pv.nu))
}

pub fn lens_transform(
    w: &impl HeatFlow,
    pair: &FundamentalPair,
    t: f64,
    x: f64,
) -> Result<f64, ReductionError> {
    finite_exp(ln_lens_transform(w, pair, t, x)?)
}

/// Sign in front of the cross term `cosech(2t) x y` of the Mehler kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MehlerSign {
    Plus,
    Minus,
}

impl MehlerSign {
    fn factor(self) -> f64 {
        match self {
            MehlerSign::Plus => 1.0,
            MehlerSign::Minus => -1.0,
        }
    }
}

/// Outcome of comparing both Mehler variants against the lens transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MehlerResolution {
    pub sign: MehlerSign,
    pub plus_error: f64,
    pub minus_error: f64,
}

/// Evaluates both Mehler variants and the lens transform (constant `a = 1`) for the
/// asymmetric data `Gaussian(1, 0.7)` on `t ∈ {0.25, 1}`, `x ∈ [-5, 5]`, and keeps
/// the variant that agrees to `1e-8`. Symmetric data cannot tell the signs apart.
pub fn resolve_mehler_sign() -> Result<MehlerResolution, ReductionError> {
    let data = Profile::gaussian(1.0, 0.7);
    let pair = fundamental_pair(&TimeFactor::constant(1.0), 2.0, 1e-3)?;
    let mut errs = [0.0_f64; 2];
    for t in [0.25, 1.0] {
        for i in 0..=40 {
            let x = -5.0 + 0.25 * i as f64;
            let lens = lens_transform(&data, &pair, t, x)?;
            for (slot, sign) in [MehlerSign::Plus, MehlerSign::Minus]
                .into_iter()
                .enumerate()
            {
                let m = mehler_with_sign(&data, t, x, sign)?;
                errs[slot] = errs[slot].max((m - lens).abs());
            }
        }
    }
    let sign = match (errs[0] <= 1e-8, errs[1] <= 1e-8) {
        (true, false) => MehlerSign::Plus,
        (false, true) => MehlerSign::Minus,
        _ => {
            return Err(ReductionError::DomainError {
                what: "Mehler sign protocol, smallest error",
                value: errs[0].min(errs[1]),
                range: "exactly one variant within 1e-8",
            })
        }
    };
    Ok(MehlerResolution {
        sign,
        plus_error: errs[0],
        minus_error: errs[1],
    })
}

fn resolved_sign() -> Result<MehlerSign, ReductionError> {
    static SIGN: OnceLock<Result<MehlerSign, ReductionError>> = OnceLock::new();
    SIGN.get_or_init(|| resolve_mehler_sign().map(|r| r.sign))
        .clone()
}

/// `v(t,x) = (2π sinh 2t)^{-1/2} ∫ exp(-coth(2t)(x²+y²)/2 ± cosech(2t) x y) u0(y) dy`.
pub fn mehler_with_sign(
    p: &Profile,
    t: f64,
    x: f64,
    sign: MehlerSign,
) -> Result<f64, ReductionError> {
    if !(t > 0.0) {
        return Err(ReductionError::DomainError {
            what: "Mehler time",
            value: t,
            range: "t > 0",
        });
    }
    let (c, s) = ((2.0 * t).cosh(), (2.0 * t).sinh());
    // coth(x²+y²)/2 ∓ xy/sinh = cosh (y - y*)²/(2 sinh) + x² tanh/2 with y* = ±x/cosh.
    let y_star = sign.factor() * x / c;
    let ln_const = -0.5 * x * x * s / c - 0.5 * (2.0 * PI * s).ln();
    let kernel = |y: f64| -c * (y - y_star) * (y - y_star) / (2.0 * s);
    let ln_integral = match *p {
        Profile::Dirac { x0 } => kernel(x0),
        Profile::CompactSampled { .. } => {
            let weights = p.sample_weights().unwrap_or_default();
            log_sum_exp(
                weights
                    .iter()
                    .filter(|(_, c)| *c > 0.0)
                    .map(|&(y, w)| w.ln() + kernel(y)),
            )
        }
        _ => {
            let (lo, hi) = p.support();
            let r = integrate_exp(
                |y| kernel(y) + p.ln_density(y),
                |_| 1.0,
                lo,
                hi,
                Hint::new(y_star.clamp(lo, hi), (s / c).sqrt()),
                &QuadConfig::default(),
            )?;
            r.ln_value()
        }
    };
    finite_exp(ln_const + ln_integral)
}

/// Mehler solution of `∂t v = ∂xx v - x² v`, with the cross-term sign chosen by
/// [`resolve_mehler_sign`].
pub fn mehler_solution(p: &Profile, t: f64, x: f64) -> Result<f64, ReductionError> {
    mehler_with_sign(p, t, x, resolved_sign()?)
}

/// Gaussian solution of `∂t v = ∂xx v - x² v` from `Gaussian(a, m)` data:
/// `(ln mass, a(t), m(t))` with `a(t) = (aC + S)/(C + aS)`, `m(t) = am/(aC + S)`,
/// `C = cosh 2t`, `S = sinh 2t`.
pub fn quadratic_gaussian(a: f64, m: f64, t: f64) -> (f64, f64, f64) {
    let (c, s) = ((2.0 * t).cosh(), (2.0 * t).sinh());
    let den = a * c + s;
    let at = den / (c + a * s);
    let mt = a * m / den;
    let ln_mass = 0.5 * (a / den).ln() - a * m * m * s / (2.0 * den);
    (ln_mass, at, mt)
}

/// `∫ x² v(t,x) dx` for the Gaussian solution of [`quadratic_gaussian`].
pub fn quadratic_second_moment(a: f64, m: f64, t: f64) -> f64 {
    let (ln_mass, at, mt) = quadratic_gaussian(a, m, t);
    ln_mass.exp() * (1.0 / at + mt * mt)
}

/// Solution of `∂t u = ∂xx u - (x² - ∫x² u) u` from `Gaussian(a, m)` data, sampled on
/// `[x_lo, x_hi]`: the Gaussian `v` divided by `1 - ∫₀ᵗ ∫ x² v`, the time integral
/// being computed numerically.
pub fn quad_weight_solution(
    a: f64,
    m: f64,
    t: f64,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<SolutionFrame, ReductionError> {
    if !(a > 0.0 && t >= 0.0) {
        return Err(ReductionError::DomainError {
            what: "a",
            value: a,
            range: "a > 0, t >= 0",
        });
    }
    let den = momentum_denominator(|s| Ok(-quadratic_second_moment(a, m, s)), t)?;
    if den <= 0.0 {
        return Err(ReductionError::BlowUp {
            t_star: t,
            t_lo: 0.0,
            t_hi: t,
        });
    }
    let (ln_mass, at, mt) = quadratic_gaussian(a, m, t);
    let ln_peak = ln_mass + 0.5 * (at / (2.0 * PI)).ln() - den.ln();
    let u = GridFunction::from_fn(x_lo, x_hi, n, |x| {
        (ln_peak - 0.5 * at * (x - mt) * (x - mt)).exp()
    })?;
    let u_bar = -u.weighted_integral(|x| x * x);
    Ok(SolutionFrame {
        t,
        mass: u.integral(),
        u,
        u_bar,
        status: FrameStatus::Alive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_factor_primitives() {
        let f = TimeFactor::new(|s| s);
        assert!((f.big_a(2.0) - 2.0).abs() < 1e-14);
        assert!((f.big_a2(2.0) - 8.0 / 6.0).abs() < 1e-14);
        assert!((f.big_a_squared_integral(1.0) - 1.0 / 20.0).abs() < 1e-14);
        assert_eq!(f.big_a(0.0), 0.0);
    }

    #[test]
    fn gauge_multiplies_by_scalar() {
        let v = GridFunction::from_fn(0.0, 1.0, 3, |_| 1.0).unwrap();
        let g = gauge_external(&v, &TimeFactor::constant(1.0), 1.0).unwrap();
        assert!((g.values()[1] - std::f64::consts::E).abs() < 1e-14);
        let id = gauge_external(&v, &TimeFactor::constant(0.0), 3.0).unwrap();
        assert_eq!(id, v);
    }

    #[test]
    fn avron_herbst_identities() {
        let g = Profile::gaussian(1.0, 0.0);
        assert_eq!(avron_herbst(&g, 0.0, 0.3).unwrap(), g.density(0.3));
        let d = Profile::dirac(0.0);
        let (t, x) = (0.7, 0.4);
        let want = ln_heat_kernel(t, x + t * t, 0.0) + t * x + t * t * t / 3.0;
        assert!((ln_avron_herbst(&d, t, x) - want).abs() < 1e-14);
    }

    #[test]
    fn general_shift_matches_unit_coefficient() {
        let g = Profile::gaussian(2.0, 0.3);
        let one = TimeFactor::constant(1.0);
        for x in [-1.0, 0.0, 2.0] {
            let a = ln_avron_herbst(&g, 0.8, x);
            let b = ln_avron_herbst_general(&g, &one, 0.8, x);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_for_constant_coefficients() {
        let p = fundamental_pair(&TimeFactor::constant(1.0), 2.0, 1e-3).unwrap();
        let v = p.at(1.3).unwrap();
        assert!((v.mu - 1.3_f64.sinh()).abs() < 1e-12);
        assert!((v.nu - 1.3_f64.cosh()).abs() < 1e-12);
        assert!(p.wronskian_drift() < 1e-12);
        let free = fundamental_pair(&TimeFactor::constant(0.0), 1.0, 0.1).unwrap();
        let v = free.at(0.55).unwrap();
        assert!((v.mu - 0.55).abs() < 1e-15 && (v.nu - 1.0).abs() < 1e-15);
        assert!(p.at(2.5).is_err());
    }

    #[test]
    fn pair_rejects_coarse_steps() {
        let r = fundamental_pair(&TimeFactor::constant(400.0), 1.0, 0.5);
        assert!(matches!(r, Err(ReductionError::StepTooLarge { .. })));
    }

    #[test]
    fn pair_csv_has_header() {
        let p = fundamental_pair(&TimeFactor::constant(1.0), 0.2, 0.1).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,mu,nu,mu_dot,nu_dot\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn mehler_sign_protocol_selects_plus() {
        let r = resolve_mehler_sign().unwrap();
        assert_eq!(r.sign, MehlerSign::Plus);
        assert!(r.plus_error < 1e-8 && r.minus_error > 1e-3);
    }

    #[test]
    fn lens_solves_time_dependent_potential_at_doubled_time() {
        // ∂t v = ∂xx v - a(2t) x² v with a(t) = 1 + t, checked by finite differences.
        let factor = TimeFactor::new(|s| 1.0 + s);
        let pair = fundamental_pair(&factor, 2.0, 1e-3).unwrap();
        let w = Profile::gaussian(1.0, 0.3);
        let v = |t: f64, x: f64| lens_transform(&w, &pair, t, x).unwrap();
        let (t, h, k) = (0.4, 1e-3, 1e-4);
        for x in [-1.0, 0.2, 1.5] {
            let vt = (v(t + k, x) - v(t - k, x)) / (2.0 * k);
            let vxx = (v(t, x + h) - 2.0 * v(t, x) + v(t, x - h)) / (h * h);
            let res = vt - vxx + (1.0 + 2.0 * t) * x * x * v(t, x);
            assert!(res.abs() < 1e-5, "residual {res} at x = {x}");
        }
    }

    #[test]
    fn quadratic_ground_state_is_stationary() {
        for t in [0.5, 1.0] {
            let f = quad_weight_solution(1.0, 0.0, t, -8.0, 8.0, 161).unwrap();
            for (x, v) in f.u.points() {
                let u0 = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
                assert!((v - u0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_invert_validates_frames() {
        assert!(matches!(
            momentum_invert(&[], |_, x| x),
            Err(ReductionError::InvalidFrames(_))
        ));
    }
}
