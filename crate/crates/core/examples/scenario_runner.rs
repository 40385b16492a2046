// Running scenario documents from code: closed-form frames, an oracle
// cross-check, a quadratic-weight run and a wave export, each in its own
// output directory. The `rml` binary does the same from the command line.
//
// ```text
// cargo run --release --example scenario_runner
// ```

use std::error::Error;
use std::fs;

use rml::scenario::{run, RunOptions, ScenarioSpec, EXIT_OK};

const SCENARIOS: [&str; 3] = [
    r#"{
        "name": "extinction",
        "profile": {"kind": "ExponentialTail", "alpha": 1.0},
        "times": [0.5, 0.9, 0.99]
    }"#,
    r#"{
        "name": "gaussian-oracle",
        "profile": {"kind": "Gaussian", "a": 1.0, "m": 0.0},
        "times": [0.25, 0.5],
        "oracle": {"n": 1024, "dt": 1e-4}
    }"#,
    r#"{
        "name": "ground-state",
        "profile": {"kind": "Gaussian", "a": 1.0, "m": 0.0},
        "times": [0.5, 1.0],
        "weight": "Quadratic",
        "outputs": ["frames.csv", "summary.json", "wave.csv"],
        "wave": {"c": 2.0, "alpha": 0.0}
    }"#,
];

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let root = tempfile::tempdir()?;
    for text in SCENARIOS {
        let spec = ScenarioSpec::from_json(text)?;
        let dir = root.path().join(&spec.name);
        let outcome = run(&spec, &dir, RunOptions::default())?;
        println!("{}: exit {}", spec.name, outcome.exit_code);
        for path in &outcome.written {
            let bytes = fs::metadata(path)?.len();
            println!(
                "  {} ({bytes} bytes)",
                path.file_name().unwrap_or_default().to_string_lossy()
            );
        }
        if let Some(report) = outcome.summary.get("oracle") {
            println!("  oracle max sup error {}", report["report"]["max_sup_u"]);
        }
        if outcome.exit_code != EXIT_OK {
            return Err(format!("{} failed", spec.name).into());
        }
        // Same spec, same bytes.
        let again = root.path().join(format!("{}-again", spec.name));
        run(&spec, &again, RunOptions::default())?;
        for path in &outcome.written {
            let twin = again.join(path.file_name().unwrap_or_default());
            if fs::read(path)? != fs::read(&twin)? {
                return Err(format!("{} is not reproducible", path.display()).into());
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("scenario_runner: {e}");
        std::process::exit(1);
    }
}
