// Gaussian data stay Gaussian: inverse variance `1/(1+2t)`, centre `t² + t`.
// Frames are sampled on an adaptive window and written as CSV.
//
// ```text
// cargo run --example gaussian_self_similarity
// ```

use std::error::Error;
use std::f64::consts::PI;

use rml::closedform::{evaluate_u, frame_summary, solve_frame, write_frames_csv};
use rml::profiles::Profile;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = Profile::gaussian(1.0, 0.0);
    for t in [0.1, 1.0, 5.0] {
        let (a, m) = (1.0 / (1.0 + 2.0 * t), t * t + t);
        let mut worst: f64 = 0.0;
        for i in 0..=600 {
            let x = -20.0 + 0.1 * i as f64;
            let want = (a / (2.0 * PI)).sqrt() * (-0.5 * a * (x - m) * (x - m)).exp();
            worst = worst.max((evaluate_u(&p, t, x)? - want).abs());
        }
        let frame = solve_frame(&p, t)?;
        println!(
            "t = {t:<4} sup error {worst:.2e}  window [{:.1}, {:.1}]  {}",
            frame.u.x_lo(),
            frame.u.x_hi(),
            frame_summary(&frame)
        );
        if worst > 1e-8 {
            return Err(format!("self-similar form violated at t = {t}").into());
        }
    }

    let frames = [solve_frame(&p, 0.5)?];
    let mut csv = Vec::new();
    write_frames_csv(&mut csv, &frames)?;
    let text = String::from_utf8(csv)?;
    println!(
        "{} CSV rows, first: {}",
        text.lines().count() - 1,
        text.lines().nth(1).unwrap_or("")
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("gaussian_self_similarity: {e}");
        std::process::exit(1);
    }
}
