//! Command-line front end: `solve`, `classify`, `oracle`, `wave`, `quadratic` and
//! `selftest`.
//!
//! Exit codes: 0 success, 1 generic failure (including `wave --c` with `c <= 0`),
//! 2 for a profile whose solution is never defined, 3 for a numeric failure and 64
//! for usage errors or malformed scenarios.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::oracle::Weight;
use crate::profiles::{classify_tail, Profile};
use crate::scenario::{
    oracle_config, run, write_json, RunOptions, ScenarioError, ScenarioSpec, EXIT_FAILURE, EXIT_OK,
    EXIT_USAGE,
};
use crate::selftest::run_selftest;
use crate::waves::{sign_changes, wave_residual, WaveProfile};

#[derive(Debug, Parser)]
#[command(
    name = "rml",
    version,
    about = "Replicator-mutator solutions, reductions and checks"
)]
struct Cli {
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Nodes per frame, or oracle grid size.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Oracle time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Last reported time; later scenario times are dropped.
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form frames of a scenario.
    Solve(RunArgs),
    /// Tail class of a profile document (or of a scenario's profile) as JSON.
    Classify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Direct integration of a scenario compared with the closed form.
    Oracle(RunArgs),
    /// Solitary-wave profile CSV and residual report.
    Wave {
        /// Wave speed.
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Centre of mass of the profile.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 7001)]
        grid_n: usize,
    },
    /// Scenario under the quadratic weight `-x²`.
    Quadratic(RunArgs),
    /// Runs the invariant suite.
    Selftest,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let quiet = cli.quiet;
    match execute(cli.command, quiet) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rml: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, quiet: bool) -> Result<i32, ScenarioError> {
    match command {
        Command::Solve(args) => run_scenario(args, None, false, quiet),
        Command::Quadratic(args) => run_scenario(args, Some(Weight::Quadratic), false, quiet),
        Command::Oracle(args) => run_scenario(args, None, true, quiet),
        Command::Classify { spec } => classify(&spec),
        Command::Wave {
            c,
            alpha,
            out,
            grid_n,
        } => wave(c, alpha, &out, grid_n, quiet),
        Command::Selftest => Ok(selftest(quiet)),
    }
}

fn run_scenario(
    args: RunArgs,
    weight: Option<Weight>,
    force_oracle: bool,
    quiet: bool,
) -> Result<i32, ScenarioError> {
    let mut spec = ScenarioSpec::from_path(&args.spec)?;
    if let Some(w) = weight {
        spec.weight = w;
    }
    if force_oracle && spec.oracle.is_none() {
        spec.oracle = Some(Default::default());
    }
    if let Some(t_end) = args.t_end {
        spec.truncate_at(t_end)?;
    }
    spec.validate()?;
    let opts = RunOptions {
        grid_n: args.grid_n,
        dt: args.dt,
    };
    if force_oracle && !quiet {
        let cfg = oracle_config(&spec, spec.oracle.unwrap_or_default(), opts)?;
        eprintln!(
            "rml: oracle grid [{}, {}] with {} nodes, dt = {}",
            cfg.x_lo, cfg.x_hi, cfg.n, cfg.dt
        );
    }
    let outcome = run(&spec, &args.out, opts)?;
    if !quiet {
        for path in &outcome.written {
            eprintln!("rml: wrote {}", path.display());
        }
        if outcome.exit_code != EXIT_OK {
            eprintln!(
                "rml: the solution of '{}' is defined for no t > 0",
                spec.name
            );
        }
    }
    Ok(outcome.exit_code)
}

fn classify(path: &Path) -> Result<i32, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Malformed(format!("{}: {e}", path.display())))?;
    let profile = match serde_json::from_str::<Profile>(&text) {
        Ok(p) => p,
        Err(_) => ScenarioSpec::from_json(&text)?.profile,
    };
    profile
        .validate()
        .map_err(|e| ScenarioError::Malformed(e.to_string()))?;
    let class = serde_json::to_string(&classify_tail(&profile))
        .map_err(|e| ScenarioError::Malformed(e.to_string()))?;
    println!("{class}");
    Ok(EXIT_OK)
}

fn wave(c: f64, alpha: f64, out: &Path, n: usize, quiet: bool) -> Result<i32, ScenarioError> {
    let profile = WaveProfile::new(c, alpha, n)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ScenarioError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let path = out.join("wave.csv");
    let mut file = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    profile
        .write_csv(&mut file)
        .and_then(|_| file.flush())
        .map_err(io_err(&path))?;
    let report = json!({
        "c": c,
        "alpha": alpha,
        "mass": profile.mass(),
        "mean": profile.mean(),
        "residual": wave_residual(c, -15.0, 10.0, 1e-3)?,
        "sign_changes": sign_changes(c, -15.0, 10.0)?,
    });
    write_json(io::stdout().lock(), &report).map_err(io_err(Path::new("<stdout>")))?;
    if !quiet {
        eprintln!("rml: wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

fn selftest(quiet: bool) -> i32 {
    let checks = run_selftest();
    let mut failed = 0;
    for c in &checks {
        if !c.passed {
            failed += 1;
        }
        if !quiet || !c.passed {
            println!(
                "{} {} ({})",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            );
        }
    }
    if !quiet {
        println!("{} checks, {} failed", checks.len(), failed);
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}
