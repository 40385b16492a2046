//! Scenario files: a JSON document naming a profile, the times to report, the
//! weight, the artifacts to write and an optional direct-integration cross-check.
//!
//! ```json
//! {
//!   "name": "extinction",
//!   "profile": {"kind": "ExponentialTail", "alpha": 1.0},
//!   "times": [0.5, 0.9, 0.99],
//!   "outputs": ["frames.csv", "summary.json"]
//! }
//! ```
//!
//! All artifacts are deterministic: CSV floats use `{:.16e}` and JSON objects have
//! sorted keys.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::closedform::{
    evaluation_window, frame_on, frame_summary, solve_frame, solve_status, write_frames_csv,
    ClosedFormError, SolutionFrame, Status,
};
use crate::oracle::{
    compare, compare_frames, integrate, Boundary, OracleConfig, OracleError, Scheme, Weight,
};
use crate::profiles::Profile;
use crate::reductions::{quad_weight_solution, quadratic_gaussian, ReductionError};
use crate::waves::{wave_residual, WaveError, WaveProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NEVER_DEFINED: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario: {0}")]
    Malformed(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("no solitary wave exists for speed c = {0} <= 0")]
    NoSolitaryWave(f64),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Malformed(_) => EXIT_USAGE,
            ScenarioError::Numeric(_) => EXIT_NUMERIC,
            ScenarioError::NoSolitaryWave(_) | ScenarioError::Io { .. } => EXIT_FAILURE,
        }
    }
}

impl From<ClosedFormError> for ScenarioError {
    fn from(e: ClosedFormError) -> Self {
        match e {
            ClosedFormError::DomainError { .. } | ClosedFormError::NotCompact => {
                ScenarioError::Malformed(e.to_string())
            }
            _ => ScenarioError::Numeric(e.to_string()),
        }
    }
}

impl From<OracleError> for ScenarioError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BadConfig(_) | OracleError::Unsupported => {
                ScenarioError::Malformed(e.to_string())
            }
            OracleError::ClosedForm(inner) => inner.into(),
            _ => ScenarioError::Numeric(e.to_string()),
        }
    }
}

impl From<ReductionError> for ScenarioError {
    fn from(e: ReductionError) -> Self {
        ScenarioError::Numeric(e.to_string())
    }
}

impl From<WaveError> for ScenarioError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::NoSolitaryWave(c) => ScenarioError::NoSolitaryWave(c),
            _ => ScenarioError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Output {
    #[serde(rename = "frames.csv")]
    FramesCsv,
    #[serde(rename = "summary.json")]
    SummaryJson,
    #[serde(rename = "wave.csv")]
    WaveCsv,
}

impl Output {
    pub fn file_name(self) -> &'static str {
        match self {
            Output::FramesCsv => "frames.csv",
            Output::SummaryJson => "summary.json",
            Output::WaveCsv => "wave.csv",
        }
    }
}

fn default_outputs() -> BTreeSet<Output> {
    [Output::FramesCsv, Output::SummaryJson]
        .into_iter()
        .collect()
}

/// Direct-integration settings. Without an explicit window the grid covers the
/// bulk from `t = 0` to the last scenario time (see [`OracleConfig::for_profile`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    #[serde(default = "default_oracle_n")]
    pub n: usize,
    #[serde(default = "default_oracle_dt")]
    pub dt: f64,
    #[serde(default)]
    pub x_lo: Option<f64>,
    #[serde(default)]
    pub x_hi: Option<f64>,
}

fn default_oracle_n() -> usize {
    2048
}

fn default_oracle_dt() -> f64 {
    1e-4
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            n: default_oracle_n(),
            dt: default_oracle_dt(),
            x_lo: None,
            x_hi: None,
        }
    }
}

/// Solitary wave written to `wave.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSettings {
    pub c: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_wave_n")]
    pub n: usize,
}

fn default_wave_n() -> usize {
    7001
}

impl Default for WaveSettings {
    fn default() -> Self {
        Self {
            c: 1.0,
            alpha: 0.0,
            n: default_wave_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub profile: Profile,
    pub times: Vec<f64>,
    #[serde(default)]
    pub weight: Weight,
    #[serde(default = "default_outputs")]
    pub outputs: BTreeSet<Output>,
    #[serde(default)]
    pub oracle: Option<OracleSettings>,
    #[serde(default)]
    pub wave: Option<WaveSettings>,
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ScenarioError::Malformed(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: &str| Err(ScenarioError::Malformed(m.to_string()));
        if self.name.trim().is_empty() {
            return bad("name must be nonempty");
        }
        if self.times.is_empty() {
            return bad("times must be nonempty");
        }
        if !self.times.iter().all(|t| t.is_finite() && *t >= 0.0) {
            return bad("times must be finite and nonnegative");
        }
        if !self.times.windows(2).all(|w| w[0] < w[1]) {
            return bad("times must be strictly increasing");
        }
        self.profile
            .validate()
            .map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        if self.weight == Weight::Quadratic && !matches!(self.profile, Profile::Gaussian { .. }) {
            return bad("quadratic-weight scenarios need a Gaussian profile");
        }
        Ok(())
    }

    /// Drops times beyond `t_end` and appends `t_end` if missing.
    pub fn truncate_at(&mut self, t_end: f64) -> Result<(), ScenarioError> {
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(ScenarioError::Malformed(format!("t_end = {t_end}")));
        }
        self.times.retain(|t| *t <= t_end);
        if self.times.last() != Some(&t_end) {
            self.times.push(t_end);
        }
        Ok(())
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Nodes per frame (closed form) or oracle grid size.
    pub grid_n: Option<usize>,
    pub dt: Option<f64>,
}

/// Result of a finished scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Value,
    pub written: Vec<PathBuf>,
}

/// Runs `spec` and writes the requested artifacts into `out_dir`.
///
/// A profile whose solution is never defined is refused without evaluating anything:
/// the summary records the refusal and the exit code is [`EXIT_NEVER_DEFINED`].
pub fn run(
    spec: &ScenarioSpec,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<Outcome, ScenarioError> {
    spec.validate()?;
    let status = solve_status(&spec.profile);
    let mut summary = Map::new();
    summary.insert("name".into(), json!(spec.name));
    summary.insert("weight".into(), json!(spec.weight));
    if let Value::Object(fields) = json!(status) {
        summary.extend(fields);
    }
    if status.status == Status::NeverDefined {
        let summary = Value::Object(summary);
        let written = write_outputs(spec, out_dir, &[], &summary, false)?;
        return Ok(Outcome {
            exit_code: EXIT_NEVER_DEFINED,
            summary,
            written,
        });
    }

    let frames = match spec.weight {
        Weight::Linear => linear_frames(spec, opts)?,
        Weight::Quadratic => quadratic_frames(spec, opts, None)?,
    };
    summary.insert(
        "frames".into(),
        Value::Array(frames.iter().map(frame_summary).collect()),
    );
    if let Some(settings) = spec.oracle {
        summary.insert("oracle".into(), oracle_report(spec, settings, opts)?);
    }
    if spec.outputs.contains(&Output::WaveCsv) {
        let w = spec.wave.unwrap_or_default();
        let residual = wave_residual(w.c, -15.0, 10.0, 1e-3)?;
        summary.insert(
            "wave".into(),
            json!({"c": w.c, "alpha": w.alpha, "residual": residual}),
        );
    }
    let summary = Value::Object(summary);
    let written = write_outputs(spec, out_dir, &frames, &summary, true)?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary,
        written,
    })
}

fn linear_frames(
    spec: &ScenarioSpec,
    opts: RunOptions,
) -> Result<Vec<SolutionFrame>, ScenarioError> {
    spec.times
        .iter()
        .map(|&t| {
            let frame = match (opts.grid_n, evaluation_window(&spec.profile, t)) {
                (Some(n), Ok((lo, hi, _))) => frame_on(&spec.profile, t, lo, hi, n)?,
                _ => solve_frame(&spec.profile, t)?,
            };
            Ok(frame)
        })
        .collect()
}

/// Closed-form frames of the quadratic-weight equation, either on a per-time window
/// or on the supplied grid `(x_lo, x_hi, n)`.
fn quadratic_frames(
    spec: &ScenarioSpec,
    opts: RunOptions,
    grid: Option<(f64, f64, usize)>,
) -> Result<Vec<SolutionFrame>, ScenarioError> {
    let Profile::Gaussian { a, m } = spec.profile else {
        return Err(ScenarioError::Malformed(
            "quadratic-weight scenarios need a Gaussian profile".into(),
        ));
    };
    spec.times
        .iter()
        .map(|&t| {
            let (lo, hi, n) = grid.unwrap_or_else(|| {
                let (_, at, mt) = quadratic_gaussian(a, m, t);
                let half = 12.0 / at.sqrt();
                (mt - half, mt + half, opts.grid_n.unwrap_or(4097))
            });
            Ok(quad_weight_solution(a, m, t, lo, hi, n)?)
        })
        .collect()
}

/// Oracle configuration for `spec` with command-line overrides applied.
pub fn oracle_config(
    spec: &ScenarioSpec,
    settings: OracleSettings,
    opts: RunOptions,
) -> Result<OracleConfig, ScenarioError> {
    let t_end = *spec.times.last().expect("validated");
    let n = opts.grid_n.unwrap_or(settings.n);
    let dt = opts.dt.unwrap_or(settings.dt);
    let cfg = match (settings.x_lo, settings.x_hi) {
        (Some(x_lo), Some(x_hi)) => OracleConfig {
            x_lo,
            x_hi,
            n,
            dt,
            scheme: Scheme::CrankNicolsonSplit,
            boundary: Boundary::Dirichlet0,
        },
        (None, None) => OracleConfig::for_profile(&spec.profile, t_end, spec.weight, n, dt)?,
        _ => {
            return Err(ScenarioError::Malformed(
                "oracle window needs both x_lo and x_hi".into(),
            ))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn oracle_report(
    spec: &ScenarioSpec,
    settings: OracleSettings,
    opts: RunOptions,
) -> Result<Value, ScenarioError> {
    let cfg = oracle_config(spec, settings, opts)?;
    let t_end = *spec.times.last().expect("validated");
    let frames = integrate(&spec.profile, &cfg, t_end, spec.weight, &spec.times)?;
    let report = match spec.weight {
        Weight::Linear => compare(&spec.profile, &frames)?,
        Weight::Quadratic => {
            let reference = quadratic_frames(spec, opts, Some((cfg.x_lo, cfg.x_hi, cfg.n)))?;
            compare_frames(&reference, &frames)?
        }
    };
    Ok(json!({
        "config": cfg,
        "report": report,
        "steps": (t_end / cfg.dt).round() as usize,
    }))
}

fn write_outputs(
    spec: &ScenarioSpec,
    out_dir: &Path,
    frames: &[SolutionFrame],
    summary: &Value,
    numeric: bool,
) -> Result<Vec<PathBuf>, ScenarioError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ScenarioError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    for output in &spec.outputs {
        if !numeric && *output != Output::SummaryJson {
            continue;
        }
        let path = out_dir.join(output.file_name());
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut out = BufWriter::new(file);
        match output {
            Output::FramesCsv => write_frames_csv(&mut out, frames),
            Output::SummaryJson => write_json(&mut out, summary),
            Output::WaveCsv => {
                let w = spec.wave.unwrap_or_default();
                WaveProfile::new(w.c, w.alpha, w.n)?.write_csv(&mut out)
            }
        }
        .and_then(|_| out.flush())
        .map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write>(mut out: W, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::other)?;
    writeln!(out)
}
