// Direct integration of the nonlocal equation (Strang splitting, Crank–Nicolson
// diffusion) checked against the explicit solution, with a self-convergence study.
//
// ```text
// cargo run --release --example oracle_equivalence
// ```

use std::error::Error;

use rml::oracle::{compare, integrate, self_convergence, OracleConfig, Weight};
use rml::profiles::Profile;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = Profile::gaussian(1.0, 0.0);
    let t_end = 0.5;
    let cfg = OracleConfig::for_profile(&p, t_end, Weight::Linear, 2048, 1e-4)?;
    println!(
        "grid [{:.3}, {:.3}], n = {}, dx = {:.4}, dt = {}",
        cfg.x_lo,
        cfg.x_hi,
        cfg.n,
        cfg.dx(),
        cfg.dt
    );
    let times = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let frames = integrate(&p, &cfg, t_end, Weight::Linear, &times)?;
    let report = compare(&p, &frames)?;
    for row in &report.frames {
        println!(
            "t = {:.1}  sup|u - u*| = {:.2e}  |ū - ū*| = {:.2e}  |mass - 1| = {:.2e}",
            row.t, row.sup_u, row.u_bar, row.mass
        );
    }
    if report.max_sup_u > 1e-3 || report.max_mass > 1e-4 {
        return Err("oracle disagrees with the explicit solution".into());
    }
    if frames.iter().any(|f| f.u.min() < 0.0) {
        return Err("oracle produced negative densities".into());
    }

    let study = self_convergence(&p, &cfg, t_end)?;
    println!(
        "self-convergence: coarse {:.3e}, fine {:.3e}, ratio {:.3}",
        study.coarse, study.fine, study.ratio
    );
    if !(3.0..=5.0).contains(&study.ratio) {
        return Err("expected second-order convergence".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("oracle_equivalence: {e}");
        std::process::exit(1);
    }
}
