//! Reference values and slow, independent routes used to cross-check the library.
//! Nothing here calls into the library's own quadrature or special functions.
#![allow(dead_code)]

use std::f64::consts::PI;

/// High-precision reference values (30-digit arithmetic, rounded to f64).
pub mod reference {
    pub const AI_0: f64 = 0.355_028_053_887_817_239;
    pub const AI_M5: f64 = 0.350_761_009_024_114_320;
    pub const AI_ZEROS: [f64; 7] = [
        -2.338_107_410_459_767,
        -4.087_949_444_130_971,
        -5.520_559_828_095_551,
        -6.786_708_090_071_759,
        -7.944_133_587_120_853,
        -9.022_650_853_340_980,
        -10.040_174_341_558_086,
    ];
    pub const ERF_UPPER_1: f64 = 0.397_689_745_423_351_448;
    pub const HEAT_KERNEL_QUARTER_1_0: f64 = 0.207_553_748_710_297_352;
    pub const GAUSS_MGF_1: f64 = 1.648_721_270_700_128_147;
    pub const GAUSS_PEAK_T1_X2: f64 = 0.230_329_432_980_890_320;
    pub const EXTINCTION_A1_T05_X0: f64 = 0.145_497_640_284_273_905;
    pub const MODEXP_NORMALIZER: [(f64, f64); 2] = [
        (1.0, 6.734_210_493_715_396_36),
        (0.5, 3.061_438_206_380_259_46),
    ];
    /// `(c, ψ_c(0), ψ_c(1))`.
    pub const WAVE_VALUES: [(f64, f64, f64); 3] = [
        (1.0, 0.316_467_281_056_048_006, 0.341_336_718_743_436_600),
        (2.0, 0.263_513_644_749_140_069, 0.254_388_716_742_699_560),
        (3.0, 0.224_429_151_695_165_324, 0.210_947_502_905_754_998),
    ];
    /// `(a, m, t, ∫x² v)` for the quadratic-weight Gaussian solution.
    pub const QUADRATIC_M2: [(f64, f64, f64, f64); 2] = [
        (2.0, 0.0, 0.5, 0.625_936_920_721_390_282),
        (2.0, 0.5, 0.5, 0.619_448_529_861_726_816),
    ];
    /// `(μ, μ̇, ν, ν̇)` at `t = 1` for `ÿ = (1 + t) y`.
    pub const PAIR_1_PLUS_T: [f64; 4] = [
        1.269_326_025_384_339,
        1.944_312_108_293_256,
        1.751_274_210_275_609,
        1.894_724_920_063_276,
    ];
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `Ai(x)` from `(1/2π) ∫ exp(i(ζ³/3 + xζ)) ds` along `ζ = s + iη`, by Simpson.
pub fn airy_contour(x: f64) -> f64 {
    let eta = if x > 0.25 { x.sqrt() } else { 0.5 };
    // Integrand modulus exp(-η s² + η³/3 - xη).
    let s_max = (45.0 / eta).sqrt();
    let integrand = |s: f64| {
        // ζ³/3 + xζ with ζ = s + iη, split into real and imaginary parts.
        let re = (s * s * s - 3.0 * s * eta * eta) / 3.0 + x * s;
        let im = (3.0 * s * s * eta - eta * eta * eta) / 3.0 + x * eta;
        // exp(i(re + i im)) = exp(-im) (cos re + i sin re); the sine part is odd.
        (-im).exp() * re.cos()
    };
    simpson(integrand, -s_max, s_max, 200_000) / (2.0 * PI)
}

/// `(4πt)^{-1/2} e^{-(x-y)²/4t}`.
pub fn heat(t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `u(t, x)` from `u0` supported in `[lo, hi]` as
/// `∫ e^{ty} u0(y) G(t, x - t² - y) dy / ∫ e^{ty} u0(y) dy`, by Simpson.
pub fn tilted_convolution(u0: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64, t: f64, x: f64) -> f64 {
    let n = 400_000;
    let num = simpson(
        |y| (t * y).exp() * u0(y) * heat(t, x - t * t - y),
        lo,
        hi,
        n,
    );
    let den = simpson(|y| (t * y).exp() * u0(y), lo, hi, n);
    num / den
}

/// `∫ e^{ty} u0(y) dy` on `[lo, hi]`.
pub fn exp_moment_simpson(u0: impl Fn(f64) -> f64, lo: f64, hi: f64, t: f64) -> f64 {
    simpson(|y| (t * y).exp() * u0(y), lo, hi, 400_000)
}

/// Writes a line on the real stderr, bypassing the test harness capture.
pub fn report(line: &str) {
    use std::io::Write;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}
