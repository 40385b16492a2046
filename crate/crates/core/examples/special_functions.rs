// Airy function, Gaussian tail integral, exponential integral and heat kernel.
//
// ```text
// cargo run --example special_functions
// ```

use std::error::Error;

use rml::special::{
    airy_ai, airy_ai_with_derivative, erf_upper, exp_integral_e1, heat_kernel, ln_erf_upper, Airy,
    SpecialFnConfig,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("{:>8} {:>24} {:>24}", "x", "Ai(x)", "Ai'(x)");
    for x in [-10.0, -5.0, -2.338_107_410_459_767, 0.0, 2.0, 10.0, 40.0] {
        let (ai, aip) = airy_ai_with_derivative(x)?;
        println!("{x:>8.3} {ai:>24.16e} {aip:>24.16e}");
    }
    if (airy_ai(0.0)? - 0.355_028_053_887_817_2).abs() > 1e-14 {
        return Err("Ai(0) off its tabulated value".into());
    }
    if airy_ai(60.0).is_ok() {
        return Err("Ai is only supported on |x| <= 50".into());
    }

    // A tighter Taylor region gives the same values.
    let narrow = Airy::new(SpecialFnConfig {
        series_cutoff: 6.0,
        ..SpecialFnConfig::default()
    })?;
    let gap = (narrow.ai(-3.0)? - airy_ai(-3.0)?).abs();
    println!("Ai(-3) with cutoff 6 vs 8: {gap:.1e}");

    for theta in [-2.0, 0.0, 1.0, 10.0, 40.0] {
        println!(
            "erf_upper({theta:>5}) = {:.16e}   ln = {:.16e}",
            erf_upper(theta),
            ln_erf_upper(theta)
        );
    }
    println!("E1(1) = {:.16e}", exp_integral_e1(1.0));
    println!(
        "heat_kernel(0.25, 1, 0) = {:.16e}",
        heat_kernel(0.25, 1.0, 0.0)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("special_functions: {e}");
        std::process::exit(1);
    }
}
