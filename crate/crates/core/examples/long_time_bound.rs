// Compactly supported data approach a heat kernel centred at `t²`: the deviation
// from `(4πt)^{-1/2} e^{-(x-t²)²/4t}` decays like `1/t`.
//
// ```text
// cargo run --release --example long_time_bound
// ```

use std::error::Error;

use rml::closedform::deviation;
use rml::profiles::Profile;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = Profile::uniform(-1.0, 1.0, 2001)?;
    let bound = 1.0 / (2.0 * std::f64::consts::E).sqrt();
    println!("bound M/√(2e) = {bound:.4}");
    for t in [1.0, 2.0, 5.0, 10.0, 50.0] {
        let d = deviation(&p, t)?;
        println!("t = {t:<4} sup deviation = {d:.4e}  t·dev = {:.4}", t * d);
        if t * d > 0.43 {
            return Err(format!("bound violated at t = {t}").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("long_time_bound: {e}");
        std::process::exit(1);
    }
}
