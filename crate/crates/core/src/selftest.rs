//! Quick invariant suite behind `rml selftest`: one check per module, each a few
//! milliseconds to a second.

use crate::closedform::{
    evaluate_u, gaussian_solution, mean_fitness, solve_frame, solve_status, Status,
};
use crate::oracle::{compare, integrate, OracleConfig, Weight};
use crate::profiles::{classify_tail, Profile, TailKind};
use crate::reductions::{fundamental_pair, quad_weight_solution, reduction_route, TimeFactor};
use crate::special::{airy_ai, erf_upper};
use crate::waves::{sign_changes, solitary_wave, wave_from_fourier, wave_moments, wave_residual};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, measured: Result<f64, String>, limit: f64) -> Check {
    match measured {
        Ok(v) => Check {
            name,
            passed: v <= limit,
            detail: format!("{v:.3e} <= {limit:.0e}"),
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e,
        },
    }
}

fn flag(name: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed: ok,
        detail: detail.into(),
    }
}

pub fn run_selftest() -> Vec<Check> {
    let s = |e: &dyn std::fmt::Display| e.to_string();
    let gauss = Profile::gaussian(1.0, 0.0);
    let mut out = Vec::new();

    out.push(check(
        "special: Ai(0) and the Gaussian tail integral",
        airy_ai(0.0).map_err(|e| s(&e)).map(|ai| {
            (ai - 0.355_028_053_887_817_2).abs()
                + (erf_upper(0.0) - std::f64::consts::FRAC_PI_2.sqrt()).abs()
        }),
        1e-14,
    ));

    let tails = [
        (Profile::gaussian(1.0, 0.0), TailKind::VeryLight),
        (Profile::exponential_tail(1.0), TailKind::Light),
        (Profile::algebraic_tail(2.0), TailKind::Heavy),
    ];
    let ok = tails.iter().all(|(p, k)| classify_tail(p).class == *k);
    out.push(flag(
        "profiles: tail classes",
        ok,
        "Gaussian, Exp, Algebraic",
    ));

    out.push(check(
        "closedform: Gaussian self-similarity",
        (|| {
            let (at, mt) = gaussian_solution(1.0, 0.0, 1.0);
            let mut worst: f64 = 0.0;
            for x in [-2.0, 0.0, 2.0, 4.0] {
                let want = (at / (2.0 * std::f64::consts::PI)).sqrt()
                    * (-0.5 * at * (x - mt) * (x - mt)).exp();
                worst = worst.max((evaluate_u(&gauss, 1.0, x).map_err(|e| s(&e))? - want).abs());
            }
            Ok(worst)
        })(),
        1e-12,
    ));

    out.push(check(
        "closedform: mean fitness before extinction",
        mean_fitness(&Profile::exponential_tail(1.0), 0.5)
            .map(|v| (v - 2.25).abs())
            .map_err(|e| s(&e)),
        1e-10,
    ));

    out.push(check(
        "closedform: mass of a sampled frame",
        solve_frame(&gauss, 1.0)
            .map(|f| (f.mass - 1.0).abs())
            .map_err(|e| s(&e)),
        1e-8,
    ));

    out.push(flag(
        "closedform: heavy tails are never defined",
        solve_status(&Profile::algebraic_tail(3.0)).status == Status::NeverDefined,
        "AlgebraicTail(3)",
    ));

    out.push(check(
        "reductions: momentum inversion of Avron-Herbst",
        (|| {
            let xs: Vec<f64> = (0..=8).map(|k| -2.0 + 0.75 * k as f64).collect();
            let routed = reduction_route(&gauss, 0.5, &xs).map_err(|e| s(&e))?;
            let mut worst: f64 = 0.0;
            for (x, v) in xs.iter().zip(routed) {
                worst = worst.max((v - evaluate_u(&gauss, 0.5, *x).map_err(|e| s(&e))?).abs());
            }
            Ok(worst)
        })(),
        1e-7,
    ));

    out.push(check(
        "reductions: Wronskian of the fundamental pair",
        fundamental_pair(&TimeFactor::new(|t| 1.0 + t), 1.0, 1e-3)
            .map(|p| p.wronskian_drift())
            .map_err(|e| s(&e)),
        1e-9,
    ));

    out.push(check(
        "reductions: quadratic ground state is stationary",
        quad_weight_solution(1.0, 0.0, 1.0, -8.0, 8.0, 801)
            .map(|f| {
                f.u.points()
                    .map(|(x, v)| (v - Profile::gaussian(1.0, 0.0).density(x)).abs())
                    .fold(0.0, f64::max)
            })
            .map_err(|e| s(&e)),
        1e-8,
    ));

    out.push(check(
        "oracle: direct integration of a Gaussian",
        (|| {
            let cfg = OracleConfig::for_profile(&gauss, 0.2, Weight::Linear, 513, 1e-3)
                .map_err(|e| s(&e))?;
            let frames = integrate(&gauss, &cfg, 0.2, Weight::Linear, &[0.2]).map_err(|e| s(&e))?;
            Ok(compare(&gauss, &frames).map_err(|e| s(&e))?.max_sup_u)
        })(),
        1e-2,
    ));

    out.push(check(
        "waves: unit mass, zero mean",
        wave_moments(1.0)
            .map(|(m0, m1)| (m0 - 1.0).abs().max(m1.abs()))
            .map_err(|e| s(&e)),
        1e-6,
    ));

    out.push(check(
        "waves: ODE residual",
        wave_residual(1.0, -15.0, 10.0, 1e-3).map_err(|e| s(&e)),
        1e-5,
    ));

    out.push(check(
        "waves: Fourier route",
        (|| {
            let z = wave_from_fourier(1.0, 0.0).map_err(|e| s(&e))?;
            let v = solitary_wave(1.0, 0.0).map_err(|e| s(&e))?;
            Ok((z.re - v).abs().max(z.im.abs()))
        })(),
        1e-7,
    ));

    out.push(flag(
        "waves: profiles change sign",
        [0.5, 1.0, 2.0, 3.0]
            .iter()
            .all(|&c| sign_changes(c, -15.0, 10.0).is_ok_and(|k| k >= 1)),
        "c in {0.5, 1, 2, 3}",
    ));

    out.push(flag(
        "waves: c <= 0 rejected",
        solitary_wave(0.0, 0.0).is_err(),
        "c = 0",
    ));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
