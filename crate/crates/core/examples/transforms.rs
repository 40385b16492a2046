// The chain heat flow → Avron–Herbst shift → momentum inversion reproduces the
// explicit solution; the same inversion without the drift blows up when the
// denominator `1 + ∫ v̄` reaches zero.
//
// ```text
// cargo run --release --example transforms
// ```

use std::error::Error;

use rml::closedform::evaluate_u;
use rml::profiles::Profile;
use rml::reductions::{
    avron_herbst, drift_free_flow, gauged_reduction_route, reduction_route, HeatFlow,
    ReductionError, TimeFactor,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let xs: Vec<f64> = (0..=24).map(|k| -3.0 + 0.5 * k as f64).collect();
    let profiles = [
        ("Gaussian(1, 0)", Profile::gaussian(1.0, 0.0)),
        ("cosine bump", Profile::cosine_bump(0.3, 1.0, 201)?),
    ];
    for (name, p) in &profiles {
        for t in [0.1, 0.5, 1.0] {
            let routed = reduction_route(p, t, &xs)?;
            let mut worst: f64 = 0.0;
            for (x, v) in xs.iter().zip(&routed) {
                worst = worst.max((v - evaluate_u(p, t, *x)?).abs());
            }
            println!("{name:<15} t = {t:<4} |route - explicit| = {worst:.2e}");
            if worst > 1e-7 {
                return Err("transform chain disagrees".into());
            }
        }
    }

    // An external gauge e^{A(t)} changes v but not u.
    let g = Profile::gaussian(1.0, 0.0);
    let factor = TimeFactor::new(|t| t);
    let gauged = gauged_reduction_route(&g, &factor, 0.5, &xs)?;
    let plain = reduction_route(&g, 0.5, &xs)?;
    let gap = gauged
        .iter()
        .zip(&plain)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("gauge a(t) = t: max change {gap:.1e}");
    println!(
        "w(0.5, 0.25) = {:.6}, v(0.5, 0) = {:.6}",
        g.w(0.5, 0.25),
        avron_herbst(&g, 0.5, 0.0)?
    );

    // Gaussian(1, -1) without drift: ∫₀ᵗ v̄ = -t, so the denominator vanishes at 1.
    let start = Profile::gaussian(1.0, -1.0);
    match drift_free_flow(&start, 1.5, 1e-3, -12.0, 10.0, 2001) {
        Err(ReductionError::BlowUp { t_star, t_lo, t_hi }) => {
            println!("blow-up at T* = {t_star:.6} in [{t_lo:.3}, {t_hi:.3}]");
            if (t_star - 1.0).abs() > 1e-3 {
                return Err("blow-up time off".into());
            }
        }
        other => return Err(format!("expected BlowUp, got {other:?}").into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("transforms: {e}");
        std::process::exit(1);
    }
}
