// Right-tail classification of initial data and the resulting fate of the solution:
// global, extinct after `T`, or never defined.
//
// ```text
// cargo run --example tail_classification
// ```

use std::error::Error;

use rml::closedform::solve_status;
use rml::profiles::{classify_tail, exp_moment, Profile};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let profiles = [
        ("Gaussian(1, 0)", Profile::gaussian(1.0, 0.0)),
        ("Dirac(0)", Profile::dirac(0.0)),
        ("uniform[-1, 1]", Profile::uniform(-1.0, 1.0, 201)?),
        ("ExponentialTail(1)", Profile::exponential_tail(1.0)),
        (
            "ModifiedExponentialTail(0.5)",
            Profile::modified_exponential_tail(0.5),
        ),
        ("AlgebraicTail(2)", Profile::algebraic_tail(2.0)),
    ];
    for (name, p) in &profiles {
        p.validate()?;
        let class = classify_tail(p);
        let status = solve_status(p);
        println!(
            "{name:<30} {}  ∫e^(y/2)u0 = {:.6}",
            serde_json::to_string(&status)?,
            exp_moment(p, 0.5, 0)
        );
        if status.t_crit != class.t_crit {
            return Err(format!("{name}: status and class disagree").into());
        }
    }

    // The exponential moment blows up exactly at the critical time.
    let exp = Profile::exponential_tail(1.0);
    for t in [0.5, 0.9, 0.99, 1.0] {
        println!(
            "ExponentialTail(1): ∫e^(ty)u0 at t = {t:<4} = {:e}",
            exp_moment(&exp, t, 0)
        );
    }
    if exp_moment(&exp, 1.0, 0).is_finite() {
        return Err("moment should diverge at t = alpha".into());
    }

    let doc = r#"{"kind": "Gaussian", "a": 2.0, "m": -1.0}"#;
    let parsed: Profile = serde_json::from_str(doc)?;
    println!(
        "{doc} -> {}",
        serde_json::to_string(&classify_tail(&parsed))?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("tail_classification: {e}");
        std::process::exit(1);
    }
}
