// Quadratic fitness `-x²`: the fundamental pair, the lens transform, the Mehler
// kernel and the stationary ground state.
//
// ```text
// cargo run --release --example quadratic_weight
// ```

use std::error::Error;

use rml::profiles::Profile;
use rml::reductions::{
    fundamental_pair, lens_transform, mehler_solution, quad_weight_solution,
    quadratic_second_moment, resolve_mehler_sign, TimeFactor,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let pair = fundamental_pair(&TimeFactor::new(|t| 1.0 + t), 1.0, 1e-3)?;
    let at1 = pair.at(1.0)?;
    println!(
        "a = 1 + t, t = 1: mu = {:.12}, nu = {:.12}, Wronskian drift {:.1e}",
        at1.mu,
        at1.nu,
        pair.wronskian_drift()
    );

    let resolution = resolve_mehler_sign()?;
    println!(
        "Mehler sign {:?} (errors: plus {:.1e}, minus {:.1e})",
        resolution.sign, resolution.plus_error, resolution.minus_error
    );

    let data = Profile::gaussian(2.0, 0.5);
    let unit = fundamental_pair(&TimeFactor::constant(1.0), 2.0, 1e-3)?;
    let mut worst: f64 = 0.0;
    for t in [0.25, 0.5, 1.0] {
        for k in 0..=20 {
            let x = -4.0 + 0.4 * k as f64;
            worst = worst
                .max((mehler_solution(&data, t, x)? - lens_transform(&data, &unit, t, x)?).abs());
        }
    }
    println!("Mehler vs lens for Gaussian(2, 0.5): {worst:.1e}");
    if worst > 1e-8 {
        return Err("Mehler and lens disagree".into());
    }

    let ground = Profile::gaussian(1.0, 0.0);
    for t in [0.5, 1.0] {
        let frame = quad_weight_solution(1.0, 0.0, t, -10.0, 10.0, 2001)?;
        let drift = frame
            .u
            .points()
            .map(|(x, v)| (v - ground.density(x)).abs())
            .fold(0.0, f64::max);
        let m2 = quadratic_second_moment(1.0, 0.0, t);
        println!(
            "ground state t = {t}: |u - u0| = {drift:.1e}, ∫x²v = {m2:.12} (e^-t = {:.12})",
            (-t).exp()
        );
        if drift > 1e-8 || (m2 - (-t).exp()).abs() > 1e-8 {
            return Err("ground state is not stationary".into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("quadratic_weight: {e}");
        std::process::exit(1);
    }
}
