//! Direct finite-difference integration of `∂t u = ∂xx u + (f - ∫f u) u`, used as an
//! independent check of the explicit formulas.
//!
//! Each step is a Strang splitting: half a step of the reaction `∂t u = (f - ū) u`,
//! one Crank–Nicolson diffusion step with homogeneous Dirichlet data, and another
//! reaction half step. The reaction subflow is solved exactly,
//!
//! ```text
//! u(h) = u e^{fh} / E(h),   E(h) = ∫ u e^{fh} + 1 - ∫ u,
//! ```
//!
//! which is the frozen-coefficient update with `ū` equal to its exact average over
//! the substep.

use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::{evaluate_u, mean_fitness, ClosedFormError, FrameStatus, SolutionFrame};
use crate::grid::{neumaier_sum, GridError, GridFunction};
use crate::profiles::{classify_tail, Profile, TailKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("mass fraction {fraction:e} reached the boundary cells at t = {t}")]
    DomainEscape { t: f64, fraction: f64 },
    #[error("solution exceeded 1e12 (or became non-finite) at t = {t}")]
    Unstable { t: f64 },
    #[error("invalid oracle configuration: {0}")]
    BadConfig(String),
    #[error("the oracle only runs on very light tails with a density")]
    Unsupported,
    #[error("frames do not share grid and times (frame {index})")]
    GridMismatch { index: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    CrankNicolsonSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Dirichlet0,
}

/// Fitness weight `f`: `x` for the linear equation, `-x²` for the quadratic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Weight {
    #[default]
    Linear,
    Quadratic,
}

impl Weight {
    pub fn f(self, x: f64) -> f64 {
        match self {
            Weight::Linear => x,
            Weight::Quadratic => -x * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
    pub dt: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
}

fn default_scheme() -> Scheme {
    Scheme::CrankNicolsonSplit
}

fn default_boundary() -> Boundary {
    Boundary::Dirichlet0
}

impl OracleConfig {
    /// Window covering the bulk from `t = 0` to `t_end`, padded by 12 widths
    /// `√(2 t_end) + σ0` on both sides.
    pub fn for_profile(
        p: &Profile,
        t_end: f64,
        weight: Weight,
        n: usize,
        dt: f64,
    ) -> Result<Self, OracleError> {
        let (mean0, sd0) = p.spread();
        let end = match weight {
            Weight::Linear => mean_fitness(p, t_end)?,
            Weight::Quadratic => mean0,
        };
        let pad = 12.0 * ((2.0 * t_end).sqrt() + sd0);
        let cfg = Self {
            x_lo: mean0.min(end) - pad,
            x_hi: mean0.max(end) + pad,
            n,
            dt,
            scheme: Scheme::CrankNicolsonSplit,
            boundary: Boundary::Dirichlet0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.n - 1) as f64
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.x_lo < self.x_hi && self.x_lo.is_finite() && self.x_hi.is_finite()) {
            return Err(OracleError::BadConfig("x_lo < x_hi required".into()));
        }
        if self.n < 8 {
            return Err(OracleError::BadConfig("n >= 8 required".into()));
        }
        let dx = self.dx();
        if !(self.dt > 0.0 && self.dt <= dx * dx) {
            return Err(OracleError::BadConfig(format!(
                "dt = {} must lie in (0, dx²] with dx² = {}",
                self.dt,
                dx * dx
            )));
        }
        Ok(())
    }
}

/// Per-frame discrepancies between two frame sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameError {
    pub t: f64,
    pub sup_u: f64,
    pub u_bar: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub frames: Vec<FrameError>,
    pub max_sup_u: f64,
    pub max_u_bar: f64,
    pub max_mass: f64,
}

/// Solves `(I - r L/2) u⁺ = (I + r L/2) u` on interior nodes, `r = dt/dx²`, with
/// zero boundary values.
struct CrankNicolson {
    r: f64,
    c_prime: Vec<f64>,
    denom: Vec<f64>,
    rhs: Vec<f64>,
}

impl CrankNicolson {
    fn new(n: usize, r: f64) -> Self {
        let m = n - 2;
        let (a, b) = (-0.5 * r, 1.0 + r);
        let mut c_prime = vec![0.0; m];
        let mut denom = vec![0.0; m];
        for i in 0..m {
            let d = if i == 0 { b } else { b - a * c_prime[i - 1] };
            denom[i] = d;
            c_prime[i] = a / d;
        }
        Self {
            r,
            c_prime,
            denom,
            rhs: vec![0.0; m],
        }
    }

    fn step(&mut self, u: &mut [f64]) {
        let n = u.len();
        let (half, a) = (0.5 * self.r, -0.5 * self.r);
        for i in 1..n - 1 {
            self.rhs[i - 1] = u[i] + half * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        }
        let m = n - 2;
        let mut prev = 0.0;
        for i in 0..m {
            prev = (self.rhs[i] - a * prev) / self.denom[i];
            self.rhs[i] = prev;
        }
        for i in (0..m.saturating_sub(1)).rev() {
            self.rhs[i] -= self.c_prime[i] * self.rhs[i + 1];
        }
        u[1..n - 1].copy_from_slice(&self.rhs);
        u[0] = 0.0;
        u[n - 1] = 0.0;
    }
}

fn trapezoid(h: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let last = values.len() - 1;
    h * neumaier_sum(
        values
            .enumerate()
            .map(|(i, v)| if i == 0 || i == last { 0.5 * v } else { v }),
    )
}

fn reaction(u: &mut [f64], growth: &[f64], h: f64) {
    let mass = trapezoid(h, u.iter().copied());
    for (v, g) in u.iter_mut().zip(growth) {
        *v *= g;
    }
    let grown = trapezoid(h, u.iter().copied());
    let e = grown + 1.0 - mass;
    for v in u.iter_mut() {
        *v /= e;
    }
}

/// Integrates from `u0 = p` to `t_end`, recording frames at each time of `record`
/// (rounded to the nearest step; `0` records the initial data).
pub fn integrate(
    p: &Profile,
    cfg: &OracleConfig,
    t_end: f64,
    weight: Weight,
    record: &[f64],
) -> Result<Vec<SolutionFrame>, OracleError> {
    cfg.validate()?;
    if classify_tail(p).class != TailKind::VeryLight || matches!(p, Profile::Dirac { .. }) {
        return Err(OracleError::Unsupported);
    }
    let n = cfg.n;
    let dx = cfg.dx();
    let steps = (t_end / cfg.dt).round() as usize;
    let mut wanted: Vec<usize> = record
        .iter()
        .map(|&t| (t / cfg.dt).round() as usize)
        .filter(|&k| k <= steps)
        .collect();
    wanted.sort_unstable();
    wanted.dedup();

    let xs: Vec<f64> = crate::grid::nodes(cfg.x_lo, cfg.x_hi, n).collect();
    let mut u: Vec<f64> = xs.iter().map(|&x| p.density(x)).collect();
    u[0] = 0.0;
    u[n - 1] = 0.0;
    let half = 0.5 * cfg.dt;
    let growth: Vec<f64> = xs.iter().map(|&x| (weight.f(x) * half).exp()).collect();
    let mut cn = CrankNicolson::new(n, cfg.dt / (dx * dx));
    let edge = (n / 64).max(2);

    let frame = |k: usize, u: &[f64]| -> Result<SolutionFrame, OracleError> {
        let g = GridFunction::new(cfg.x_lo, cfg.x_hi, u.to_vec())?;
        Ok(SolutionFrame {
            t: k as f64 * cfg.dt,
            mass: g.integral(),
            u_bar: g.weighted_integral(|x| weight.f(x)),
            u: g,
            status: FrameStatus::Alive,
        })
    };

    let mut frames = Vec::with_capacity(wanted.len());
    let mut next = wanted.iter().peekable();
    for k in 0..=steps {
        if k > 0 {
            reaction(&mut u, &growth, dx);
            cn.step(&mut u);
            reaction(&mut u, &growth, dx);
            let t = k as f64 * cfg.dt;
            if u.iter().any(|v| !(v.abs() <= 1e12)) {
                return Err(OracleError::Unstable { t });
            }
            let total = trapezoid(dx, u.iter().copied());
            let rim = neumaier_sum(u[..edge].iter().chain(&u[n - edge..]).map(|v| v.abs())) * dx;
            if rim > 1e-6 * total.abs() {
                return Err(OracleError::DomainEscape {
                    t,
                    fraction: rim / total.abs(),
                });
            }
        }
        if next.peek() == Some(&&k) {
            frames.push(frame(k, &u)?);
            next.next();
        }
    }
    Ok(frames)
}

/// Compares frame sequences sharing grids and times.
pub fn compare_frames(
    reference: &[SolutionFrame],
    frames: &[SolutionFrame],
) -> Result<ComparisonReport, OracleError> {
    if reference.len() != frames.len() {
        return Err(OracleError::GridMismatch {
            index: reference.len().min(frames.len()),
        });
    }
    let mut rows = Vec::with_capacity(frames.len());
    for (index, (r, f)) in reference.iter().zip(frames).enumerate() {
        if !r.u.same_nodes(&f.u) || (r.t - f.t).abs() > 1e-12 * r.t.abs().max(1.0) {
            return Err(OracleError::GridMismatch { index });
        }
        let sup_u =
            r.u.values()
                .iter()
                .zip(f.u.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        rows.push(FrameError {
            t: f.t,
            sup_u,
            u_bar: (r.u_bar - f.u_bar).abs(),
            mass: (r.mass - f.mass).abs(),
        });
    }
    Ok(report_from(rows))
}

fn report_from(rows: Vec<FrameError>) -> ComparisonReport {
    let max = |sel: fn(&FrameError) -> f64| rows.iter().map(sel).fold(0.0, f64::max);
    ComparisonReport {
        max_sup_u: max(|r| r.sup_u),
        max_u_bar: max(|r| r.u_bar),
        max_mass: max(|r| r.mass),
        frames: rows,
    }
}

/// Compares oracle frames of the linear equation with the explicit solution of `p`
/// evaluated on the same nodes. Mass is compared with 1.
pub fn compare(p: &Profile, frames: &[SolutionFrame]) -> Result<ComparisonReport, OracleError> {
    let mut rows = Vec::with_capacity(frames.len());
    for f in frames {
        let mut sup_u: f64 = 0.0;
        for (x, v) in f.u.points() {
            sup_u = sup_u.max((evaluate_u(p, f.t, x)? - v).abs());
        }
        rows.push(FrameError {
            t: f.t,
            sup_u,
            u_bar: (mean_fitness(p, f.t)? - f.u_bar).abs(),
            mass: (1.0 - f.mass).abs(),
        });
    }
    Ok(report_from(rows))
}

/// Errors against the explicit solution at `t_end` for `cfg` and for the refined run
/// (half the step, twice the intervals), with their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
}

pub fn self_convergence(
    p: &Profile,
    cfg: &OracleConfig,
    t_end: f64,
) -> Result<ConvergenceStudy, OracleError> {
    let refined = OracleConfig {
        n: 2 * (cfg.n - 1) + 1,
        dt: 0.5 * cfg.dt,
        ..*cfg
    };
    let err = |c: &OracleConfig| -> Result<f64, OracleError> {
        let frames = integrate(p, c, t_end, Weight::Linear, &[t_end])?;
        Ok(compare(p, &frames)?.max_sup_u)
    };
    let coarse = err(cfg)?;
    let fine = err(&refined)?;
    Ok(ConvergenceStudy {
        coarse,
        fine,
        ratio: coarse / fine,
    })
}

/// JSON manifest of an oracle run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: OracleConfig,
    pub weight: Weight,
    pub t_end: f64,
    pub report: Option<ComparisonReport>,
    pub wall_seconds: f64,
    pub steps: usize,
}

/// Runs [`integrate`] and [`compare`] (linear weight only) and records timings.
pub fn run_with_manifest(
    p: &Profile,
    cfg: &OracleConfig,
    t_end: f64,
    weight: Weight,
    record: &[f64],
) -> Result<(Vec<SolutionFrame>, RunManifest), OracleError> {
    let start = Instant::now();
    let frames = integrate(p, cfg, t_end, weight, record)?;
    let report = match weight {
        Weight::Linear => Some(compare(p, &frames)?),
        Weight::Quadratic => None,
    };
    let manifest = RunManifest {
        config: *cfg,
        weight,
        t_end,
        report,
        wall_seconds: start.elapsed().as_secs_f64(),
        steps: (t_end / cfg.dt).round() as usize,
    };
    Ok((frames, manifest))
}

pub fn write_manifest<W: Write>(out: W, manifest: &RunManifest) -> io::Result<()> {
    serde_json::to_writer_pretty(out, manifest).map_err(io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unstable_steps() {
        let cfg = OracleConfig {
            x_lo: -1.0,
            x_hi: 1.0,
            n: 101,
            dt: 1e-2,
            scheme: Scheme::CrankNicolsonSplit,
            boundary: Boundary::Dirichlet0,
        };
        assert!(matches!(cfg.validate(), Err(OracleError::BadConfig(_))));
    }

    #[test]
    fn window_for_unit_gaussian() {
        let cfg = OracleConfig::for_profile(
            &Profile::gaussian(1.0, 0.0),
            0.5,
            Weight::Linear,
            2048,
            1e-4,
        )
        .unwrap();
        assert!((cfg.x_lo + 24.0).abs() < 1e-12 && (cfg.x_hi - 24.75).abs() < 1e-12);
    }

    #[test]
    fn crank_nicolson_keeps_constants_inside() {
        let mut cn = CrankNicolson::new(11, 0.5);
        let mut u = vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0];
        cn.step(&mut u);
        assert!(u[5] > 0.99 && u[5] <= 1.0);
        assert!(u.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn refuses_light_tails_and_dirac() {
        let cfg = OracleConfig {
            x_lo: -5.0,
            x_hi: 5.0,
            n: 101,
            dt: 1e-3,
            scheme: Scheme::CrankNicolsonSplit,
            boundary: Boundary::Dirichlet0,
        };
        for p in [Profile::exponential_tail(1.0), Profile::dirac(0.0)] {
            assert_eq!(
                integrate(&p, &cfg, 0.1, Weight::Linear, &[0.1]),
                Err(OracleError::Unsupported)
            );
        }
    }

    #[test]
    fn small_window_escapes() {
        let cfg = OracleConfig {
            x_lo: -3.0,
            x_hi: 3.0,
            n: 301,
            dt: 1e-4,
            scheme: Scheme::CrankNicolsonSplit,
            boundary: Boundary::Dirichlet0,
        };
        let r = integrate(
            &Profile::gaussian(1.0, 0.0),
            &cfg,
            2.0,
            Weight::Linear,
            &[2.0],
        );
        assert!(matches!(r, Err(OracleError::DomainEscape { .. })));
    }

    #[test]
    fn mismatched_frames_are_rejected() {
        let cfg = OracleConfig {
            x_lo: -8.0,
            x_hi: 8.0,
            n: 161,
            dt: 1e-2,
            scheme: Scheme::CrankNicolsonSplit,
            boundary: Boundary::Dirichlet0,
        };
        let p = Profile::gaussian(1.0, 0.0);
        let a = integrate(&p, &cfg, 0.1, Weight::Linear, &[0.1]).unwrap();
        let b = integrate(
            &p,
            &OracleConfig { n: 81, ..cfg },
            0.1,
            Weight::Linear,
            &[0.1],
        )
        .unwrap();
        assert!(matches!(
            compare_frames(&a, &b),
            Err(OracleError::GridMismatch { .. })
        ));
        let zero = compare_frames(&a, &a).unwrap();
        assert_eq!(zero.max_sup_u, 0.0);
    }
}
