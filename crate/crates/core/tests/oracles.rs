//! Library values against high-precision references and against slow independent
//! routes (Simpson quadrature, contour integrals, finite differences).
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::{E, PI};

use common::{airy_contour, exp_moment_simpson, heat, reference, simpson, tilted_convolution};
use rml::closedform::{
    deviation, evaluate_u, evaluate_u_quadrature, extinction_profile, gaussian_solution,
    mean_fitness,
};
use rml::grid::GridFunction;
use rml::oracle::{compare, compare_frames, integrate, OracleConfig, Weight};
use rml::profiles::{exp_moment, normalize, Profile};
use rml::quad::{Hint, QuadConfig};
use rml::reductions::{
    avron_herbst, drift_free_flow, fundamental_pair, gauge_external, lens_transform,
    mehler_solution, momentum_invert, quadratic_second_moment, reduction_route, HeatFlow,
    TimeFactor,
};
use rml::special::{airy_ai, erf_upper, heat_kernel, ln_erf_upper};
use rml::waves::{sign_changes, solitary_wave, wave_from_fourier, wave_moments, WaveProfile};

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got:.17e}, want {want:.17e}, |diff| = {:.3e} > {tol:e}",
        (got - want).abs()
    );
}

// ---------------------------------------------------------------- special

#[test]
fn contour_oracle_reproduces_reference_airy_values() {
    close(airy_contour(0.0), reference::AI_0, 1e-12, "contour Ai(0)");
    close(
        airy_contour(-5.0),
        reference::AI_M5,
        1e-12,
        "contour Ai(-5)",
    );
}

#[test]
fn airy_matches_contour_oracle() {
    for k in 0..=40 {
        let x = -10.0 + 0.5 * k as f64;
        close(
            airy_ai(x).unwrap(),
            airy_contour(x),
            1e-11,
            &format!("Ai({x})"),
        );
    }
    close(airy_ai(0.0).unwrap(), reference::AI_0, 1e-14, "Ai(0)");
    close(airy_ai(-5.0).unwrap(), reference::AI_M5, 1e-13, "Ai(-5)");
}

#[test]
fn airy_vanishes_at_its_zeros() {
    for z in reference::AI_ZEROS {
        assert!(airy_ai(z).unwrap().abs() < 1e-13, "Ai({z})");
    }
}

#[test]
fn airy_satisfies_its_ode() {
    let h = 1e-2;
    for x in [-2.0, 0.0, 2.0] {
        let ai = |x: f64| airy_ai(x).unwrap();
        let d2 = (-ai(x + 2.0 * h) + 16.0 * ai(x + h) - 30.0 * ai(x) + 16.0 * ai(x - h)
            - ai(x - 2.0 * h))
            / (12.0 * h * h);
        assert!((d2 - x * ai(x)).abs() < 1e-7, "Ai'' - x Ai at {x}");
    }
}

#[test]
fn gaussian_tail_integral_values() {
    close(
        erf_upper(0.0),
        (2.0 * PI).sqrt() / 2.0,
        1e-15,
        "erf_upper(0)",
    );
    close(
        erf_upper(1.0),
        reference::ERF_UPPER_1,
        1e-15,
        "erf_upper(1)",
    );
    let by_simpson = simpson(|z| (-0.5 * z * z).exp(), 1.0, 40.0, 200_000);
    close(erf_upper(1.0), by_simpson, 1e-13, "erf_upper(1) by Simpson");
    // θ e^{θ²/2} erf_upper(θ) → 1, with correction -1/θ².
    for theta in [20.0, 40.0, 100.0] {
        let ratio = (ln_erf_upper(theta) + 0.5 * theta * theta + f64::ln(theta)).exp();
        assert!(
            (ratio - 1.0).abs() < 1.5 / (theta * theta),
            "θ = {theta}: {ratio}"
        );
    }
}

#[test]
fn heat_kernel_values_and_normalization() {
    close(
        heat_kernel(1.0, 0.3, 0.3),
        (4.0 * PI).powf(-0.5),
        1e-16,
        "diagonal",
    );
    close(
        heat_kernel(0.25, 1.0, 0.0),
        reference::HEAT_KERNEL_QUARTER_1_0,
        1e-16,
        "(0.25, 1, 0)",
    );
    for t in [0.1, 1.0] {
        let mass = simpson(|y| heat_kernel(t, 0.7, y), -30.0, 30.0, 100_000);
        close(mass, 1.0, 1e-10, "kernel mass");
    }
}

// ---------------------------------------------------------------- profiles

#[test]
fn normalization_examples() {
    assert_eq!(
        normalize(&Profile::gaussian(1.0, 0.0)).unwrap(),
        Profile::gaussian(1.0, 0.0)
    );

    let grid = GridFunction::new(0.0, 1.0, vec![2.0; 11]).unwrap();
    let raw = Profile::CompactSampled {
        support: [0.0, 1.0],
        grid,
    };
    match normalize(&raw).unwrap() {
        Profile::CompactSampled { grid, .. } => {
            assert!(grid.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
        }
        other => panic!("unexpected {other:?}"),
    }

    // ∫_1^∞ C y^{-p} dy with y = 1/s.
    for pw in [2.0, 3.5] {
        let p = normalize(&Profile::AlgebraicTail {
            p: pw,
            normalizer: 0.0,
        })
        .unwrap();
        // Endpoints nudged into the open support (1, ∞).
        let tail = |s: f64| {
            let s = s.clamp(1e-12, 1.0 - f64::EPSILON);
            p.density(1.0 / s) / (s * s)
        };
        let mass = simpson(tail, 0.0, 1.0, 20_000);
        close(mass, 1.0, 1e-9, "algebraic mass");
    }

    for (alpha, c) in reference::MODEXP_NORMALIZER {
        match Profile::modified_exponential_tail(alpha) {
            Profile::ModifiedExponentialTail { normalizer, .. } => {
                close(normalizer, c, 1e-13 * c, "modified exponential normalizer");
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn exponential_moments() {
    close(
        exp_moment(&Profile::exponential_tail(2.0), 1.0, 0),
        2.0,
        1e-15,
        "α/(α-t)",
    );
    close(
        exp_moment(&Profile::gaussian(1.0, 0.0), 1.0, 0),
        reference::GAUSS_MGF_1,
        1e-15,
        "e^{1/2}",
    );
    let g = |y: f64| (-0.5 * y * y).exp() / (2.0 * PI).sqrt();
    close(
        exp_moment_simpson(g, -30.0, 30.0, 1.0),
        reference::GAUSS_MGF_1,
        1e-12,
        "Simpson e^{1/2}",
    );
    for p in [
        Profile::gaussian(2.0, -1.0),
        Profile::exponential_tail(0.7),
        Profile::modified_exponential_tail(1.0),
        Profile::algebraic_tail(3.0),
        Profile::uniform(-1.0, 1.0, 101).unwrap(),
        Profile::dirac(4.0),
    ] {
        close(exp_moment(&p, 0.0, 0), 1.0, 1e-13, "unit mass");
    }
}

// ---------------------------------------------------------------- closed form

#[test]
fn gaussian_and_dirac_solutions() {
    let g = Profile::gaussian(1.0, 0.0);
    close(
        evaluate_u(&g, 1.0, 2.0).unwrap(),
        reference::GAUSS_PEAK_T1_X2,
        1e-16,
        "peak",
    );
    close(
        reference::GAUSS_PEAK_T1_X2,
        (1.0 / (6.0 * PI)).sqrt(),
        1e-16,
        "√(1/6π)",
    );
    let d = Profile::dirac(0.0);
    for (t, x) in [(0.5, 0.0), (1.0, 1.0), (2.0, 3.5)] {
        let want = heat(t, x - t * t);
        close(evaluate_u(&d, t, x).unwrap(), want, 1e-15, "Dirac solution");
    }
    assert_eq!(gaussian_solution(1.0, 0.0, 0.0), (1.0, 0.0));
    let (a1, m1) = gaussian_solution(1.0, 0.0, 1.0);
    close(a1, 1.0 / 3.0, 1e-16, "a(1)");
    close(m1, 2.0, 1e-16, "m(1)");
    let (a, m) = gaussian_solution(1.0, 0.0, 1e4);
    assert!((m / 1e8 - 1.0).abs() < 1e-3 && (a * 2e4 - 1.0).abs() < 1e-3);
}

#[test]
fn sampled_profile_tends_to_initial_data() {
    let p = Profile::cosine_bump(0.0, 1.0, 2001).unwrap();
    for x in [-0.5, 0.0, 0.3, 0.8] {
        let u0 = (1.0 + (PI * x).cos()) / 2.0;
        let u = evaluate_u(&p, 1e-4, x).unwrap();
        assert!((u - u0).abs() < 1e-3, "x = {x}: {u} vs {u0}");
    }
}

#[test]
fn extinction_profile_value_by_three_routes() {
    let p = Profile::exponential_tail(1.0);
    let want = reference::EXTINCTION_A1_T05_X0;
    close(
        extinction_profile(1.0, 0.5, 0.0).unwrap(),
        want,
        1e-15,
        "closed form",
    );
    close(
        evaluate_u_quadrature(&p, 0.5, 0.0, &QuadConfig::default()).unwrap(),
        want,
        1e-13,
        "quadrature route",
    );
    let u0 = |y: f64| if y >= 0.0 { (-y).exp() } else { 0.0 };
    close(
        tilted_convolution(u0, 0.0, 80.0, 0.5, 0.0),
        want,
        1e-9,
        "Simpson route",
    );
}

#[test]
fn extinction_profile_mean_is_mean_fitness() {
    let f = |x: f64| extinction_profile(1.0, 0.5, x).unwrap();
    let mass = simpson(f, -30.0, 80.0, 200_000);
    let mean = simpson(|x| x * f(x), -30.0, 80.0, 200_000);
    close(mass, 1.0, 1e-10, "mass");
    close(mean / mass, 2.25, 1e-9, "mean");
    close(
        mean_fitness(&Profile::exponential_tail(1.0), 0.5).unwrap(),
        2.25,
        1e-12,
        "ū(0.5)",
    );
}

#[test]
fn modified_exponential_tail_by_simpson() {
    let p = Profile::modified_exponential_tail(1.0);
    let u0 = |y: f64| if y >= 1.0 { (-y).exp() / (y * y) } else { 0.0 };
    for x in [-1.0, 1.0, 3.0] {
        let want = tilted_convolution(u0, 1.0, 90.0, 0.5, x);
        let got = evaluate_u(&p, 0.5, x).unwrap();
        assert!(
            (got - want).abs() <= 1e-8 * want,
            "x = {x}: {got} vs {want}"
        );
    }
}

#[test]
fn mean_fitness_families() {
    for t in [0.0, 0.3, 1.7] {
        assert_eq!(mean_fitness(&Profile::dirac(0.0), t).unwrap(), t * t);
        let (a, m) = (2.0, -0.5);
        close(
            mean_fitness(&Profile::gaussian(a, m), t).unwrap(),
            t * t + m + t / a,
            1e-13,
            "Gaussian ū",
        );
    }
    close(
        mean_fitness(&Profile::exponential_tail(2.0), 1.5).unwrap(),
        2.25 + 2.0,
        1e-12,
        "t² + 1/(α-t)",
    );
}

#[test]
fn deviation_bounds_for_narrow_data() {
    let narrow = Profile::uniform(-0.01, 0.01, 201).unwrap();
    for t in [1.0, 2.0, 5.0] {
        let d = deviation(&narrow, t).unwrap();
        assert!(d <= 0.0043 / t, "t = {t}: {d}");
    }
    let wide = Profile::uniform(-1.0, 1.0, 2001).unwrap();
    let devs: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&t| deviation(&wide, t).unwrap())
        .collect();
    assert!(devs.windows(2).all(|w| w[1] <= w[0]), "{devs:?}");
}

// ---------------------------------------------------------------- reductions

#[test]
fn gauge_factors() {
    let v = GridFunction::from_fn(-1.0, 1.0, 5, |x| 1.0 + x * x).unwrap();
    assert_eq!(
        gauge_external(&v, &TimeFactor::constant(0.0), 3.0).unwrap(),
        v
    );
    let g = gauge_external(&v, &TimeFactor::constant(1.0), 1.0).unwrap();
    for (a, b) in g.values().iter().zip(v.values()) {
        close(a / b, E, 1e-15, "factor e");
    }
    let g = gauge_external(&v, &TimeFactor::new(|s| s), 2.0).unwrap();
    for (a, b) in g.values().iter().zip(v.values()) {
        close(a / b, E * E, 1e-14, "factor e²");
    }
}

struct Constant;

impl HeatFlow for Constant {
    fn ln_w(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
    fn bulk(&self, _t: f64) -> Hint {
        Hint::new(0.0, 1.0)
    }
}

#[test]
fn avron_herbst_pointwise() {
    for (t, x) in [(0.0, 1.0), (0.5, -1.0), (1.0, 2.0)] {
        close(
            avron_herbst(&Constant, t, x).unwrap(),
            (t * x + t * t * t / 3.0).exp(),
            1e-14,
            "constant w",
        );
    }
    let d = Profile::dirac(0.0);
    for (t, x) in [(0.5, -1.0), (1.0, 0.5)] {
        let want = heat(t, x + t * t) * (t * x + t * t * t / 3.0).exp();
        close(avron_herbst(&d, t, x).unwrap(), want, 1e-15, "Dirac v");
    }
    // Inverting the Dirac heat flow recovers the Dirac solution.
    let xs = [-1.0, 0.0, 0.5, 2.0];
    for t in [0.3, 1.0] {
        for (x, u) in xs.iter().zip(reduction_route(&d, t, &xs).unwrap()) {
            close(u, heat(t, x - t * t), 1e-12, "Dirac route");
        }
    }
}

fn heat_frames(
    p: &Profile,
    times: &[f64],
    lo: f64,
    hi: f64,
    n: usize,
) -> Vec<rml::closedform::SolutionFrame> {
    times
        .iter()
        .map(|&t| {
            let u = GridFunction::from_fn(lo, hi, n, |x| p.w(t, x)).unwrap();
            rml::closedform::SolutionFrame {
                t,
                mass: u.integral(),
                u_bar: u.weighted_integral(|x| x),
                u,
                status: rml::closedform::FrameStatus::Alive,
            }
        })
        .collect()
}

#[test]
fn momentum_inversion_identities() {
    let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    // Symmetric data: v̄ = 0, nothing changes.
    let sym = heat_frames(&Profile::gaussian(1.0, 0.0), &times, -15.0, 15.0, 1501);
    for (a, b) in momentum_invert(&sym, |_, x| x).unwrap().iter().zip(&sym) {
        let gap =
            a.u.values()
                .iter()
                .zip(b.u.values())
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
        assert!(gap < 1e-15, "t = {}", a.t);
    }
    // Drift-free flow: u = w / (1 + t ∫ y u0).
    let p = Profile::gaussian(1.0, 0.5);
    let frames = drift_free_flow(&p, 1.0, 0.01, -15.0, 15.0, 1501).unwrap();
    for f in frames.iter().step_by(25) {
        for (x, u) in f.u.points().step_by(100) {
            close(u, p.w(f.t, x) / (1.0 + 0.5 * f.t), 1e-9, "drift-free");
        }
    }
}

#[test]
fn fundamental_pair_references() {
    let p = fundamental_pair(&TimeFactor::constant(1.0), 2.0, 1e-3).unwrap();
    let q = fundamental_pair(&TimeFactor::constant(0.0), 2.0, 1e-3).unwrap();
    for t in [0.0, 0.5, 1.3, 2.0] {
        let v = p.at(t).unwrap();
        close(v.mu, f64::sinh(t), 1e-12, "sinh");
        close(v.nu, f64::cosh(t), 1e-12, "cosh");
        let w = q.at(t).unwrap();
        close(w.mu, t, 1e-12, "t");
        close(w.nu, 1.0, 1e-12, "1");
    }
    let factor = TimeFactor::new(|t| 1.0 + t);
    let coarse = fundamental_pair(&factor, 1.0, 1e-3)
        .unwrap()
        .at(1.0)
        .unwrap();
    let fine = fundamental_pair(&factor, 1.0, 1e-3 / 16.0)
        .unwrap()
        .at(1.0)
        .unwrap();
    let [mu, mu_dot, nu, nu_dot] = reference::PAIR_1_PLUS_T;
    for (got, want, hi) in [
        (coarse.mu, mu, fine.mu),
        (coarse.mu_dot, mu_dot, fine.mu_dot),
        (coarse.nu, nu, fine.nu),
        (coarse.nu_dot, nu_dot, fine.nu_dot),
    ] {
        close(got, hi, 1e-8, "dt vs dt/16");
        close(got, want, 1e-10, "reference pair");
    }
}

#[test]
fn lens_transform_limits() {
    let data = Profile::gaussian(1.0, 0.3);
    let unit = fundamental_pair(&TimeFactor::constant(1.0), 2.0, 1e-3).unwrap();
    let free = fundamental_pair(&TimeFactor::constant(0.0), 2.0, 1e-3).unwrap();
    for x in [-2.0, 0.0, 1.5] {
        close(
            lens_transform(&data, &unit, 0.0, x).unwrap(),
            data.density(x),
            1e-15,
            "t = 0",
        );
        close(
            lens_transform(&data, &free, 0.7, x).unwrap(),
            data.w(0.7, x),
            1e-13,
            "a = 0",
        );
    }
    let g = Profile::gaussian(1.0, 0.0);
    for t in [0.25, 1.0] {
        for k in 0..=20 {
            let x = -5.0 + 0.5 * k as f64;
            close(
                lens_transform(&g, &unit, t, x).unwrap(),
                mehler_solution(&g, t, x).unwrap(),
                1e-8,
                "lens vs Mehler",
            );
        }
    }
}

#[test]
fn mehler_ground_state_and_moments() {
    let g = Profile::gaussian(1.0, 0.0);
    for t in [0.3, 1.0] {
        for x in [-2.0, 0.0, 1.0] {
            close(
                mehler_solution(&g, t, x).unwrap(),
                (-t).exp() * g.density(x),
                1e-14,
                "ground state",
            );
        }
        close(
            quadratic_second_moment(1.0, 0.0, t),
            (-t).exp(),
            1e-15,
            "∫x²v = e^-t",
        );
    }
    let bump = Profile::gaussian(3.0, 0.4);
    for x in [-0.5, 0.4, 1.0] {
        assert!((mehler_solution(&bump, 1e-4, x).unwrap() - bump.density(x)).abs() < 1e-3);
    }
    for (a, m, t, want) in reference::QUADRATIC_M2 {
        close(quadratic_second_moment(a, m, t), want, 1e-14, "closed ∫x²v");
        let p = Profile::gaussian(a, m);
        let numeric = simpson(
            |x| x * x * mehler_solution(&p, t, x).unwrap(),
            -12.0,
            12.0,
            4000,
        );
        close(numeric, want, 1e-10, "Simpson ∫x²v");
    }
}

#[test]
fn harmonic_ground_state_eigenfunction() {
    let h = 1e-3;
    let phi = |x: f64| (-0.5 * x * x).exp();
    for k in 0..=20 {
        let x = -4.0 + 0.4 * k as f64;
        let d2 = (-phi(x + 2.0 * h) + 16.0 * phi(x + h) - 30.0 * phi(x) + 16.0 * phi(x - h)
            - phi(x - 2.0 * h))
            / (12.0 * h * h);
        assert!((-d2 + x * x * phi(x) - phi(x)).abs() < 1e-6);
    }
}

// ---------------------------------------------------------------- oracle

#[test]
fn comparison_report_smoke() {
    let g = Profile::gaussian(1.0, 0.0);
    let cfg = OracleConfig::for_profile(&g, 0.1, Weight::Linear, 513, 1e-3).unwrap();
    let frames = integrate(&g, &cfg, 0.1, Weight::Linear, &[0.05, 0.1]).unwrap();
    let same = compare_frames(&frames, &frames).unwrap();
    assert_eq!(
        (same.max_sup_u, same.max_u_bar, same.max_mass),
        (0.0, 0.0, 0.0)
    );
    let off = compare(&Profile::dirac(1.0), &frames).unwrap();
    assert!(off.max_sup_u > 0.1 && off.max_u_bar > 0.5);
}

// ---------------------------------------------------------------- waves

#[test]
fn wave_reference_values() {
    for (c, at0, at1) in reference::WAVE_VALUES {
        close(solitary_wave(c, 0.0).unwrap(), at0, 1e-13, "ψ(0)");
        close(solitary_wave(c, 1.0).unwrap(), at1, 1e-13, "ψ(1)");
        close(
            wave_from_fourier(c, 1.0).unwrap().re,
            at1,
            1e-10,
            "Fourier ψ(1)",
        );
    }
}

#[test]
fn wave_moments_by_simpson() {
    for c in [1.0, 2.0] {
        let psi = |x: f64| solitary_wave(c, x).unwrap();
        let lo = c * c / 4.0 - 20.0;
        let hi = c * c / 4.0 + 50.0;
        let m0 = simpson(psi, lo, hi, 140_000);
        let m1 = simpson(|x| x * psi(x), lo, hi, 140_000);
        close(m0, 1.0, 1e-9, "∫ψ");
        close(m1, 0.0, 1e-8, "∫xψ");
        let (q0, q1) = wave_moments(c).unwrap();
        close(q0, m0, 1e-9, "adaptive vs Simpson mass");
        close(q1, m1, 1e-8, "adaptive vs Simpson mean");
    }
}

#[test]
fn wave_fourier_route_is_real() {
    for c in [1.0, 2.0] {
        for x in [-2.0, 0.0, 2.0] {
            assert!(wave_from_fourier(c, x).unwrap().im.abs() <= 1e-9);
        }
    }
    for k in 0..=20 {
        let x = -10.0 + k as f64;
        let z = wave_from_fourier(1.0, x).unwrap();
        close(z.re, solitary_wave(1.0, x).unwrap(), 1e-7, "Fourier route");
    }
}

#[test]
fn wave_translation_and_decay() {
    for alpha in [-2.0, 0.0, 3.0] {
        let w = WaveProfile::new(1.5, alpha, 14_001).unwrap();
        close(w.mass(), 1.0, 1e-6, "translated mass");
        close(w.mean(), alpha, 1e-6, "translated mean");
        assert!(w.samples.min() < 0.0);
        for (x, v) in w.samples.points().step_by(997) {
            close(
                v,
                solitary_wave(1.5, x - alpha).unwrap(),
                0.0,
                "φ(x) = ψ(x - α)",
            );
        }
    }
    for c in [0.5, 1.0, 2.0] {
        let bound = (0..=300)
            .map(|k| {
                let x = 0.1 * k as f64;
                (solitary_wave(c, x).unwrap() * (0.5 * c * x).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(bound < 10.0 * (c * c * c / 12.0).exp(), "c = {c}: {bound}");
    }
}

#[test]
fn waves_are_positive_left_of_the_turning_point() {
    // Ai > 0 on [0, ∞) means ψ_c > 0 for x <= c²/4.
    for c in [0.5, 1.0, 2.0, 3.0] {
        assert_eq!(sign_changes(c, -15.0, c * c / 4.0).unwrap(), 0, "c = {c}");
        assert!(sign_changes(c, -15.0, 10.0).unwrap() >= 1, "c = {c}");
    }
    // The oscillating side has every Airy zero mapped through x = c²/4 - a_k.
    let inside = reference::AI_ZEROS
        .iter()
        .filter(|a| (5.0..=10.0).contains(&(0.25 - **a)))
        .count();
    assert_eq!(sign_changes(1.0, 5.0, 10.0).unwrap(), inside);
}
