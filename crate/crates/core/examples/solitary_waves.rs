// Airy solitary waves `ψ_c(x) = e^{-cx/2 + c³/12} Ai(c²/4 - x)` for `c > 0`.
//
// ```text
// cargo run --release --example solitary_waves
// ```

use std::error::Error;

use rml::waves::{
    sign_changes, solitary_wave, translated_residual, wave_from_fourier, wave_moments,
    wave_residual, WaveError, WaveProfile,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for c in [1.0, 2.0, 3.0] {
        let (m0, m1) = wave_moments(c)?;
        let residual = wave_residual(c, -15.0, 10.0, 1e-3)?;
        let mut fourier: f64 = 0.0;
        for x in [-10.0, -2.0, 0.0, 2.0, 10.0] {
            let z = wave_from_fourier(c, x)?;
            fourier = fourier
                .max((z.re - solitary_wave(c, x)?).abs())
                .max(z.im.abs());
        }
        println!(
            "c = {c}: ∫ψ - 1 = {:.1e}, ∫xψ = {m1:.1e}, residual {residual:.1e}, \
             Fourier gap {fourier:.1e}, sign changes on [-15, 10]: {}",
            m0 - 1.0,
            sign_changes(c, -15.0, 10.0)?
        );
    }

    let w = WaveProfile::new(1.0, 3.0, 7001)?;
    println!(
        "translate α = 3: mass {:.8}, mean {:.8}, residual {:.1e}, min {:.3e}",
        w.mass(),
        w.mean(),
        translated_residual(1.0, 3.0, -12.0, 13.0, 1e-3)?,
        w.samples.min()
    );
    let mut csv = Vec::new();
    w.write_csv(&mut csv)?;
    println!("{} CSV bytes", csv.len());

    match solitary_wave(0.0, 0.0) {
        Err(WaveError::NoSolitaryWave(c)) => println!("c = {c}: no solitary wave"),
        other => return Err(format!("c = 0 accepted: {other:?}").into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("solitary_waves: {e}");
        std::process::exit(1);
    }
}
