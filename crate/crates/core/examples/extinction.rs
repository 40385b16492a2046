// Exponential right tail `α e^{-αy}`: the mean fitness `t² + 1/(α - t)` explodes
// and the solution vanishes at `t = α`.
//
// ```text
// cargo run --example extinction
// ```

use std::error::Error;

use rml::closedform::{
    evaluate_u, evaluate_u_extended, evaluate_u_quadrature, extinction_profile, mean_fitness,
    solve_frame, Evaluation,
};
use rml::profiles::Profile;
use rml::quad::QuadConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = Profile::exponential_tail(1.0);
    for t in [0.25, 0.5, 0.9] {
        let ubar = mean_fitness(&p, t)?;
        println!(
            "ū({t}) = {ubar:.12}  (t² + 1/(1-t) = {:.12})",
            t * t + 1.0 / (1.0 - t)
        );
    }

    let mut last = f64::INFINITY;
    for t in [0.9, 0.99, 0.999] {
        let frame = solve_frame(&p, t)?;
        let sup = frame.u.max();
        let mut rel: f64 = 0.0;
        for x in [-1.0, 0.0, 1.0, 2.0, t * t + 1.0 / (1.0 - t)] {
            let closed = extinction_profile(1.0, t, x)?;
            let quad = evaluate_u_quadrature(&p, t, x, &QuadConfig::default())?;
            rel = rel.max((closed - quad).abs() / closed.abs());
        }
        println!("t = {t:<6} sup u = {sup:.6e}  closed vs quadrature {rel:.1e}");
        if sup >= last {
            return Err("sup u should decrease toward extinction".into());
        }
        last = sup;
    }

    // At and after T the solution is extended by zero.
    for t in [1.0, 1.5] {
        match evaluate_u_extended(&p, t, 0.0)? {
            Evaluation::LifespanBoundary => println!("t = {t}: lifespan boundary, u ≡ 0"),
            Evaluation::Extinct => println!("t = {t}: extinct, u ≡ 0"),
            Evaluation::Alive(v) => return Err(format!("alive past T: {v}").into()),
        }
    }
    if evaluate_u(&p, 1.0, 0.0).is_ok() {
        return Err("evaluate_u must refuse t >= T".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("extinction: {e}");
        std::process::exit(1);
    }
}
