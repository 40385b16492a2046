//! Adaptive Gauss–Kronrod quadrature and log-space integration over (semi-)infinite lines.
//!
//! Most integrals in this crate have the shape `∫ w(y) exp(g(y)) dy` where `g` is a
//! log-density plus a Gaussian kernel exponent, and where `exp(g)` alone would over-
//! or underflow. [`integrate_exp`] locates the peak of `g`, integrates
//! `w · exp(g - g_peak)` and hands back the shift separately.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::grid::neumaier_sum;

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_602,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integral diverges or its tail could not be bounded")]
    Divergent,
    #[error("adaptive quadrature stopped at {value:e} with error estimate {error:e}")]
    NotConverged { value: f64, error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Target error relative to `∫|f|`.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    /// Kronrod estimate of `∫|f|`.
    pub abs_value: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn into_result(self) -> Result<f64, QuadError> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(QuadError::NotConverged {
                value: self.value,
                error: self.error,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod21(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = f_center.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let abs_value = res_abs * scale;
    let error = rescale_error((res_k - res_g) * half, abs_value, res_asc * scale);
    Segment {
        a,
        b,
        value,
        error,
        abs_value,
    }
}

/// Adaptive Gauss–Kronrod (10/21) quadrature of `f` over the finite interval `[a, b]`.
pub fn gauss_kronrod(f: impl FnMut(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    gauss_kronrod_split(f, &[a, b], cfg)
}

/// Adaptive quadrature starting from the given increasing breakpoints.
pub fn gauss_kronrod_split(
    mut f: impl FnMut(f64) -> f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&mut f, w[0], w[1]));
        }
    }
    let totals = |heap: &BinaryHeap<Segment>| {
        let mut segs: Vec<&Segment> = heap.iter().collect();
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
        (
            neumaier_sum(segs.iter().map(|s| s.value)),
            segs.iter().map(|s| s.error).sum::<f64>(),
            neumaier_sum(segs.iter().map(|s| s.abs_value)),
        )
    };
    // Each Kronrod error estimate is floored at 50ε of the segment's |f| integral.
    let rel_tol = cfg.rel_tol.max(100.0 * f64::EPSILON);
    let (_, mut error, mut abs_value) = totals(&heap);
    let mut iterations = 0_usize;
    loop {
        iterations += 1;
        if iterations.is_multiple_of(64) {
            let (_, e, a) = totals(&heap);
            error = e;
            abs_value = a;
        }
        let target = cfg.abs_tol.max(rel_tol * abs_value);
        let Some(&worst) = heap.peek() else {
            return QuadResult {
                value: 0.0,
                error: 0.0,
                abs_value: 0.0,
                intervals: 0,
                converged: true,
            };
        };
        let mid = 0.5 * (worst.a + worst.b);
        let too_small = !(worst.a < mid && mid < worst.b)
            || (worst.b - worst.a) <= 1e3 * f64::EPSILON * worst.a.abs().max(worst.b.abs());
        if error <= target || heap.len() >= cfg.max_intervals || too_small {
            let (value, error, abs_value) = totals(&heap);
            let target = cfg.abs_tol.max(rel_tol * abs_value);
            return QuadResult {
                value,
                error,
                abs_value,
                intervals: heap.len(),
                converged: error <= target || (too_small && error <= 1e3 * target),
            };
        }
        heap.pop();
        let left = kronrod21(&mut f, worst.a, mid);
        let right = kronrod21(&mut f, mid, worst.b);
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }
}

/// Where the bulk of an integrand is expected: a location and a length scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hint {
    pub center: f64,
    pub scale: f64,
}

impl Hint {
    pub fn new(center: f64, scale: f64) -> Self {
        Self {
            center,
            scale: if scale.is_finite() && scale > 0.0 {
                scale
            } else {
                1.0
            },
        }
    }
}

/// `scaled · exp(shift)`, kept apart so that the product never has to be formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpIntegral {
    pub shift: f64,
    pub scaled: f64,
    pub scaled_abs: f64,
}

impl ExpIntegral {
    pub const ZERO: ExpIntegral = ExpIntegral {
        shift: 0.0,
        scaled: 0.0,
        scaled_abs: 0.0,
    };

    pub fn value(&self) -> f64 {
        if self.scaled == 0.0 {
            0.0
        } else {
            self.scaled * self.shift.exp()
        }
    }

    /// Natural log of a positive integral; `-inf` for zero.
    pub fn ln_value(&self) -> f64 {
        if self.scaled <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.shift + self.scaled.ln()
        }
    }
}

const TRUNCATION_REL: f64 = 1e-14;
const MAX_DOUBLINGS: usize = 160;

/// Integrates `∫_lo^hi w(y) exp(g(y)) dy` where `exp(g)` may be far outside the
/// floating point range. Bounds may be infinite.
///
/// Infinite tails are truncated once the log-concave tail bound
/// `exp(G(b)) / |G'(b)|` (with `G = g + ln(1 + |w|)`) drops below `1e-14` of the
/// mass accumulated near the peak. A tail that never satisfies the bound is reported
/// as [`QuadError::Divergent`].
pub fn integrate_exp(
    g: impl Fn(f64) -> f64,
    w: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    hint: Hint,
    cfg: &QuadConfig,
) -> Result<ExpIntegral, QuadError> {
    if !(lo < hi) {
        return Ok(ExpIntegral::ZERO);
    }
    let eval = |y: f64| {
        let v = g(y);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let s = hint.scale;
    let Some((y_peak, g_peak, near_mass)) = locate_peak(&eval, lo, hi, hint) else {
        return Ok(ExpIntegral::ZERO);
    };
    if g_peak == f64::INFINITY {
        return Err(QuadError::Divergent);
    }
    let tail_log = |y: f64| eval(y) + (1.0 + w(y).abs()).ln() - g_peak;
    let accumulated = near_mass.max(f64::MIN_POSITIVE);

    let mut breaks = vec![y_peak];
    for dir in [-1.0_f64, 1.0] {
        let bound = if dir < 0.0 { lo } else { hi };
        let mut step = s;
        let mut prev_y = y_peak;
        let mut prev_g = tail_log(y_peak);
        let mut reached = None;
        for _ in 0..MAX_DOUBLINGS {
            let y = y_peak + dir * step;
            if ((dir < 0.0 && y <= lo) || (dir > 0.0 && y >= hi)) && bound.is_finite() {
                reached = Some(bound);
                break;
            }
            let gy = tail_log(y);
            let slope = (prev_g - gy) / (y - prev_y).abs();
            if gy == f64::NEG_INFINITY
                || (gy < -36.0
                    && slope > 0.0
                    && gy - slope.ln() < (TRUNCATION_REL * accumulated).ln())
            {
                reached = Some(y);
                break;
            }
            breaks.push(y);
            prev_y = y;
            prev_g = gy;
            step *= 2.0;
        }
        match reached {
            Some(b) => breaks.push(b),
            None => return Err(QuadError::Divergent),
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let res = gauss_kronrod_split(|y| w(y) * (eval(y) - g_peak).exp(), &breaks, cfg);
    let scaled = res.into_result()?;
    Ok(ExpIntegral {
        shift: g_peak,
        scaled,
        scaled_abs: res.abs_value,
    })
}

/// Scans for the maximum of `g`, moving the scan window when the maximum sits on
/// an open edge. Returns `(argmax, max, rough ∫ exp(g - max))`.
fn locate_peak(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, hint: Hint) -> Option<(f64, f64, f64)> {
    const POINTS: usize = 161;
    const HALF_WIDTH: f64 = 40.0;
    let mut s = hint.scale;
    let mut center = hint.center.clamp(lo, hi);
    if !center.is_finite() {
        center = if lo.is_finite() { lo } else { hi };
    }
    for _ in 0..200 {
        let a = lo.max(center - HALF_WIDTH * s);
        let b = hi.min(center + HALF_WIDTH * s);
        let h = (b - a) / (POINTS - 1) as f64;
        let samples: Vec<(f64, f64)> = (0..POINTS)
            .map(|i| {
                let y = if i + 1 == POINTS { b } else { a + h * i as f64 };
                (y, g(y))
            })
            .collect();
        let (imax, &(_, gmax)) = samples
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))?;
        if gmax == f64::NEG_INFINITY {
            if (a <= lo && b >= hi) || s > 1e12 * hint.scale {
                return None;
            }
            // Nothing visible: widen around the same center.
            s *= 16.0;
            continue;
        }
        if imax == 0 && a > lo {
            center = a;
            continue;
        }
        if imax + 1 == POINTS && b < hi {
            center = b;
            continue;
        }
        let left = samples[imax.saturating_sub(1)].0;
        let right = samples[(imax + 1).min(POINTS - 1)].0;
        let (y_ref, g_ref) = golden_max(g, left, right);
        let (y_peak, g_peak) = if g_ref > gmax {
            (y_ref, g_ref)
        } else {
            samples[imax]
        };
        let mass = h * neumaier_sum(samples.iter().map(|&(_, v)| (v - g_peak).exp()));
        return Some((y_peak, g_peak, mass));
    }
    None
}

fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..80 {
        if (b - a) <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}
