//! Explicit solutions of `∂t u = ∂xx u + (x - ū(t)) u`.
//!
//! Everything is computed from the representation
//!
//! ```text
//! u(t,x) = ∫ K(t, x - t², y) e^{ty} u0(y) dy / ∫ e^{ty} u0(y) dy,   K = heat kernel,
//! ```
//!
//! i.e. `u(t,·)` is the tilted law `e^{ty}u0 / ∫e^{ty}u0` shifted by `t²` and smoothed
//! by a Gaussian of variance `2t`. All products of exponentials are formed in
//! log-space.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, GridFunction};
use crate::profiles::{classify_tail, ln_exp_moment, tilted_moments, Profile, TailKind};
use crate::quad::{integrate_exp, Hint, QuadConfig, QuadError};
use crate::special::{ln_erf_upper, ln_heat_kernel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("t = {t} is outside the lifespan (0, {t_crit})")]
    OutOfLifespan { t: f64, t_crit: f64 },
    #[error("the solution is defined for no t > 0 (right tail too heavy)")]
    NeverDefined,
    #[error("{what} requires {range}, got {value}")]
    DomainError {
        what: &'static str,
        range: &'static str,
        value: f64,
    },
    #[error("deviation estimate requires a compactly supported sampled profile")]
    NotCompact,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Lifecycle of a solution: `Alive` for all `t` if `T = ∞`, extinct after `T` if
/// `0 < T < ∞`, and never defined if `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Status {
    Alive,
    Extinct { after: f64 },
    NeverDefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStatus {
    #[serde(flatten)]
    pub status: Status,
    #[serde(rename = "T", with = "crate::extended")]
    pub t_crit: f64,
}

pub fn solve_status(p: &Profile) -> SolveStatus {
    let tc = classify_tail(p).t_crit;
    let status = if tc == f64::INFINITY {
        Status::Alive
    } else if tc > 0.0 {
        Status::Extinct { after: tc }
    } else {
        Status::NeverDefined
    };
    SolveStatus { status, t_crit: tc }
}

/// Value of `u` with the lifespan boundary made explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Alive(f64),
    /// `t = T` exactly; the solution is extended by zero.
    LifespanBoundary,
    /// `t > T`.
    Extinct,
}

impl Evaluation {
    pub fn value(self) -> f64 {
        match self {
            Evaluation::Alive(v) => v,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameStatus {
    Alive,
    LifespanBoundary,
    Extinct,
}

/// Snapshot of the solution at time `t`. `u_bar` is the nonlocal coefficient `∫ f u`:
/// the mean fitness `∫ x u` for the linear weight, `-∫ x² u` for the quadratic one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFrame {
    pub t: f64,
    pub u: GridFunction,
    #[serde(with = "crate::extended")]
    pub u_bar: f64,
    pub mass: f64,
    pub status: FrameStatus,
}

fn check_lifespan(p: &Profile, t: f64) -> Result<(), ClosedFormError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ClosedFormError::DomainError {
            what: "time",
            range: "t >= 0",
            value: t,
        });
    }
    let tc = classify_tail(p).t_crit;
    if tc == 0.0 {
        return Err(ClosedFormError::NeverDefined);
    }
    if t >= tc {
        return Err(ClosedFormError::OutOfLifespan { t, t_crit: tc });
    }
    Ok(())
}

/// `(a(t), m(t)) = (a/(1+2at), m + t² + t/a)`: a Gaussian with inverse variance `a`
/// and mean `m` stays Gaussian with these parameters.
pub fn gaussian_solution(a: f64, m: f64, t: f64) -> (f64, f64) {
    (a / (1.0 + 2.0 * a * t), m + t * t + t / a)
}

fn ln_gaussian(a: f64, m: f64, x: f64) -> f64 {
    0.5 * (a / (2.0 * PI)).ln() - 0.5 * a * (x - m) * (x - m)
}

/// Solution issued from a unit mass at `x0`: a heat kernel whose centre moves like
/// `x0 + t²`, in log-space.
pub fn ln_dirac_solution(x0: f64, t: f64, x: f64) -> f64 {
    ln_heat_kernel(t, x - t * t, x0)
}

/// Closed form for `u0 = α e^{-αy} 1_{y>0}` on `0 < t < α`.
pub fn extinction_profile(alpha: f64, t: f64, x: f64) -> Result<f64, ClosedFormError> {
    ln_extinction_profile(alpha, t, x).map(f64::exp)
}

pub fn ln_extinction_profile(alpha: f64, t: f64, x: f64) -> Result<f64, ClosedFormError> {
    if !(alpha > 0.0 && t > 0.0 && t < alpha) {
        return Err(ClosedFormError::DomainError {
            what: "extinction profile time",
            range: "0 < t < alpha",
            value: t,
        });
    }
    let b = alpha - t;
    let theta = -(x + t * t - 2.0 * alpha * t) / (2.0 * t).sqrt();
    Ok(b.ln() - 0.5 * (2.0 * PI).ln() - b * x - alpha * t * t
        + alpha * alpha * t
        + ln_erf_upper(theta))
}

/// `u(t, x)` using closed forms for Gaussian, exponential and Dirac data, the sample
/// sum for sampled data and adaptive quadrature otherwise.
pub fn evaluate_u(p: &Profile, t: f64, x: f64) -> Result<f64, ClosedFormError> {
    check_lifespan(p, t)?;
    if t == 0.0 {
        return initial_value(p, x);
    }
    let ln_u = match *p {
        Profile::Gaussian { a, m } => {
            let (at, mt) = gaussian_solution(a, m, t);
            ln_gaussian(at, mt, x)
        }
        Profile::ExponentialTail { alpha } => ln_extinction_profile(alpha, t, x)?,
        Profile::Dirac { x0 } => ln_dirac_solution(x0, t, x),
        Profile::CompactSampled { .. } => return Ok(sampled_value(p, t, x)),
        Profile::ModifiedExponentialTail { .. } | Profile::AlgebraicTail { .. } => {
            return evaluate_u_quadrature(p, t, x, &QuadConfig::default());
        }
    };
    Ok(ln_u.exp())
}

fn initial_value(p: &Profile, x: f64) -> Result<f64, ClosedFormError> {
    match p {
        Profile::Dirac { x0 } => Err(ClosedFormError::DomainError {
            what: "Dirac data at t = 0, position",
            range: "a density",
            value: *x0,
        }),
        _ => Ok(p.density(x)),
    }
}

fn sampled_value(p: &Profile, t: f64, x: f64) -> f64 {
    let ln_mass = ln_exp_moment(p, t);
    let shifted = x - t * t;
    let weights = p.sample_weights().unwrap_or_default();
    let terms = weights
        .iter()
        .filter(|(_, c)| *c > 0.0)
        .map(|&(y, c)| (t * y + c.ln() - ln_mass + ln_heat_kernel(t, shifted, y)).exp());
    crate::grid::neumaier_sum(terms)
}

/// `u(t, x)` by adaptive quadrature of numerator and denominator, with no family
/// specific closed form. Dirac and sampled data have no density to integrate and fall
/// back to [`evaluate_u`].
pub fn evaluate_u_quadrature(
    p: &Profile,
    t: f64,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, ClosedFormError> {
    check_lifespan(p, t)?;
    if t == 0.0 || matches!(p, Profile::Dirac { .. } | Profile::CompactSampled { .. }) {
        return evaluate_u(p, t, x);
    }
    let (lo, hi) = p.support();
    let shifted = x - t * t;
    // (y-s)² = (yc-s)² + (y-yc)(y+yc-2s): the constant part stays out of the integrand.
    let yc = shifted.clamp(lo, hi);
    let ln_const = -(yc - shifted) * (yc - shifted) / (4.0 * t) - 0.5 * (4.0 * PI * t).ln();
    let num = integrate_exp(
        |y| -(y - yc) * (y + yc - 2.0 * shifted) / (4.0 * t) + t * y + p.ln_density(y),
        |_| 1.0,
        lo,
        hi,
        Hint::new(yc, (2.0 * t).sqrt()),
        cfg,
    )?;
    let den = integrate_exp(
        |y| t * y + p.ln_density(y),
        |_| 1.0,
        lo,
        hi,
        Hint::new(0.0_f64.clamp(lo, hi), 1.0),
        cfg,
    )?;
    Ok((ln_const + num.ln_value() - den.ln_value()).exp())
}

/// [`evaluate_u`] extended by zero at and after the critical time of a light tail.
pub fn evaluate_u_extended(p: &Profile, t: f64, x: f64) -> Result<Evaluation, ClosedFormError> {
    match evaluate_u(p, t, x) {
        Ok(v) => Ok(Evaluation::Alive(v)),
        Err(ClosedFormError::OutOfLifespan { t, t_crit }) if t == t_crit => {
            Ok(Evaluation::LifespanBoundary)
        }
        Err(ClosedFormError::OutOfLifespan { .. }) => Ok(Evaluation::Extinct),
        Err(e) => Err(e),
    }
}

/// `ū(t) = t² + ∫ y e^{ty} u0 / ∫ e^{ty} u0`.
pub fn mean_fitness(p: &Profile, t: f64) -> Result<f64, ClosedFormError> {
    check_lifespan(p, t)?;
    let tm = tilted_moments(p, t).ok_or(ClosedFormError::OutOfLifespan {
        t,
        t_crit: classify_tail(p).t_crit,
    })?;
    Ok(t * t + tm.mean)
}

/// Evaluation window `(x_lo, x_hi, n)` centred on `ū(t)` with half-width 12 standard
/// deviations of `u(t,·)`, resolving the smoothing scale `√(2t)` with at least 4
/// points and using at least 4096 nodes. Light (exponential) right tails get another
/// 24 tilted standard deviations on the right.
pub fn evaluation_window(p: &Profile, t: f64) -> Result<(f64, f64, usize), ClosedFormError> {
    const MIN_POINTS: usize = 4096;
    const MAX_POINTS: usize = 1 << 20;
    check_lifespan(p, t)?;
    let tm = tilted_moments(p, t).ok_or(ClosedFormError::NeverDefined)?;
    let sd = if tm.variance.is_finite() {
        tm.variance.max(0.0).sqrt()
    } else {
        1.0
    };
    let centre = t * t + tm.mean;
    let sigma = (2.0 * t).sqrt() + sd;
    let sigma = if sigma > 0.0 { sigma } else { 1.0 };
    let extra = if classify_tail(p).class == TailKind::Light {
        24.0 * sd
    } else {
        0.0
    };
    let (lo, hi) = (centre - 12.0 * sigma, centre + 12.0 * sigma + extra);
    let n = if t > 0.0 {
        let h = (2.0 * t).sqrt() / 4.0;
        ((hi - lo) / h).ceil() as usize + 1
    } else {
        MIN_POINTS
    };
    Ok((lo, hi, n.clamp(MIN_POINTS, MAX_POINTS)))
}

/// Samples `u(t,·)` on `[x_lo, x_hi]` with `n` nodes.
pub fn frame_on(
    p: &Profile,
    t: f64,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<SolutionFrame, ClosedFormError> {
    let probe = evaluate_u_extended(p, t, 0.5 * (x_lo + x_hi))?;
    let status = match probe {
        Evaluation::Alive(_) => FrameStatus::Alive,
        Evaluation::LifespanBoundary => FrameStatus::LifespanBoundary,
        Evaluation::Extinct => FrameStatus::Extinct,
    };
    if status != FrameStatus::Alive {
        let u = GridFunction::from_fn(x_lo, x_hi, n, |_| 0.0)?;
        return Ok(SolutionFrame {
            t,
            u,
            u_bar: f64::INFINITY,
            mass: 0.0,
            status,
        });
    }
    let mut values = Vec::with_capacity(n);
    for x in crate::grid::nodes(x_lo, x_hi, n) {
        values.push(evaluate_u(p, t, x)?);
    }
    let u = GridFunction::new(x_lo, x_hi, values)?;
    let mass = u.integral();
    Ok(SolutionFrame {
        t,
        u,
        u_bar: mean_fitness(p, t)?,
        mass,
        status,
    })
}

/// Samples `u(t,·)` on its [`evaluation_window`]. At and after the critical time of
/// a light tail the frame is identically zero and flagged accordingly.
pub fn solve_frame(p: &Profile, t: f64) -> Result<SolutionFrame, ClosedFormError> {
    match evaluation_window(p, t) {
        Ok((lo, hi, n)) => frame_on(p, t, lo, hi, n),
        Err(ClosedFormError::OutOfLifespan { .. }) => frame_on(p, t, -1.0, 1.0, 2),
        Err(e) => Err(e),
    }
}

/// `sup_x |u(t,x) - (4πt)^{-1/2} e^{-(x-t²)²/(4t)}|` over the evaluation window of a
/// compactly supported profile.
pub fn deviation(p: &Profile, t: f64) -> Result<f64, ClosedFormError> {
    if !matches!(p, Profile::CompactSampled { .. }) {
        return Err(ClosedFormError::NotCompact);
    }
    if !(t > 0.0) {
        return Err(ClosedFormError::DomainError {
            what: "deviation time",
            range: "t > 0",
            value: t,
        });
    }
    let (lo, hi, n) = evaluation_window(p, t)?;
    let frame = frame_on(p, t, lo, hi, n)?;
    Ok(frame
        .u
        .points()
        .map(|(x, v)| (v - ln_dirac_solution(0.0, t, x).exp()).abs())
        .fold(0.0, f64::max))
}

/// Writes frames as CSV rows `t,x,u`.
pub fn write_frames_csv<W: Write>(mut out: W, frames: &[SolutionFrame]) -> io::Result<()> {
    writeln!(out, "t,x,u")?;
    for f in frames {
        for (x, v) in f.u.points() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", f.t, x, v)?;
        }
    }
    Ok(())
}

/// JSON sidecar `{t, u_bar, mass, status}` of a frame.
pub fn frame_summary(frame: &SolutionFrame) -> serde_json::Value {
    serde_json::json!({
        "t": frame.t,
        "u_bar": crate::extended::to_json(frame.u_bar),
        "mass": frame.mass,
        "status": frame.status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_tail_class() {
        assert_eq!(
            solve_status(&Profile::gaussian(1.0, 0.0)).status,
            Status::Alive
        );
        assert_eq!(
            solve_status(&Profile::exponential_tail(1.0)).status,
            Status::Extinct { after: 1.0 }
        );
        let s = solve_status(&Profile::algebraic_tail(2.0));
        assert_eq!(s.status, Status::NeverDefined);
        assert_eq!(
            serde_json::to_value(s).unwrap(),
            serde_json::json!({"status": "NeverDefined", "T": 0.0})
        );
    }

    #[test]
    fn heavy_tails_are_refused() {
        let p = Profile::algebraic_tail(2.0);
        assert_eq!(evaluate_u(&p, 0.1, 0.0), Err(ClosedFormError::NeverDefined));
        assert_eq!(mean_fitness(&p, 0.1), Err(ClosedFormError::NeverDefined));
    }

    #[test]
    fn lifespan_boundary_flag() {
        let p = Profile::exponential_tail(1.0);
        assert!(matches!(
            evaluate_u_extended(&p, 0.5, 0.0),
            Ok(Evaluation::Alive(_))
        ));
        assert_eq!(
            evaluate_u_extended(&p, 1.0, 0.0),
            Ok(Evaluation::LifespanBoundary)
        );
        assert_eq!(evaluate_u_extended(&p, 1.5, 0.0), Ok(Evaluation::Extinct));
        let f = solve_frame(&p, 1.0).unwrap();
        assert_eq!(f.status, FrameStatus::LifespanBoundary);
        assert_eq!(f.u.max(), 0.0);
    }

    #[test]
    fn gaussian_parameters() {
        assert_eq!(gaussian_solution(2.0, 0.5, 0.0), (2.0, 0.5));
        let (a, m) = gaussian_solution(1.0, 0.0, 1.0);
        assert!((a - 1.0 / 3.0).abs() < 1e-15 && (m - 2.0).abs() < 1e-15);
        let peak = evaluate_u(&Profile::gaussian(1.0, 0.0), 1.0, 2.0).unwrap();
        assert!((peak - 0.230_329_432_980_890_32).abs() < 1e-15);
    }

    #[test]
    fn extinction_closed_form_value() {
        let v = extinction_profile(1.0, 0.5, 0.0).unwrap();
        assert!((v - 0.145_497_640_284_273_9).abs() < 1e-15);
        assert!(extinction_profile(1.0, 1.0, 0.0).is_err());
        assert!(extinction_profile(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn frames_write_csv_with_header() {
        let f = frame_on(&Profile::gaussian(1.0, 0.0), 0.5, -1.0, 1.0, 3).unwrap();
        let mut buf = Vec::new();
        write_frames_csv(&mut buf, std::slice::from_ref(&f)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x,u");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("5.0000000000000000e-1,-1.0000000000000000e0,"));
        let j = frame_summary(&f);
        assert_eq!(j["status"], "Alive");
    }
}
