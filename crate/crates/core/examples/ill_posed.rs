// Algebraic right tails have no solution for any `t > 0`; scenarios refuse them
// with exit code 2 and write only the summary.
//
// ```text
// cargo run --example ill_posed
// ```

use std::error::Error;

use rml::closedform::{evaluate_u, mean_fitness, ClosedFormError};
use rml::profiles::Profile;
use rml::scenario::{run, RunOptions, ScenarioSpec, EXIT_NEVER_DEFINED};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = Profile::algebraic_tail(2.0);
    for t in [1e-6, 0.5] {
        match evaluate_u(&p, t, 0.0) {
            Err(ClosedFormError::NeverDefined) => println!("t = {t}: never defined"),
            other => return Err(format!("expected NeverDefined, got {other:?}").into()),
        }
    }
    if mean_fitness(&p, 0.1).is_ok() {
        return Err("mean fitness of a heavy tail must be refused".into());
    }

    let spec = ScenarioSpec::from_json(
        r#"{"name": "heavy", "profile": {"kind": "AlgebraicTail", "p": 2.0}, "times": [0.5]}"#,
    )?;
    let out = tempfile::tempdir()?;
    let outcome = run(&spec, out.path(), RunOptions::default())?;
    println!(
        "exit code {}  summary {}",
        outcome.exit_code, outcome.summary
    );
    if outcome.exit_code != EXIT_NEVER_DEFINED || outcome.written.len() != 1 {
        return Err("heavy tail should exit 2 with only summary.json".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("ill_posed: {e}");
        std::process::exit(1);
    }
}
