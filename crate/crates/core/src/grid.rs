//! Uniformly sampled functions on a bounded interval.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid bounds must satisfy x_lo < x_hi (got {x_lo} .. {x_hi})")]
    BadBounds { x_lo: f64, x_hi: f64 },
    #[error("a grid needs at least 2 points (got {0})")]
    TooFewPoints(usize),
    #[error("grid value at index {index} is not finite")]
    NonFinite { index: usize },
}

/// Real values sampled at `n` equispaced nodes `x_lo, ..., x_hi` (both ends included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridFunction {
    x_lo: f64,
    x_hi: f64,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGrid {
    x_lo: f64,
    x_hi: f64,
    values: Vec<f64>,
}

impl TryFrom<RawGrid> for GridFunction {
    type Error = GridError;

    fn try_from(raw: RawGrid) -> Result<Self, Self::Error> {
        GridFunction::new(raw.x_lo, raw.x_hi, raw.values)
    }
}

impl GridFunction {
    pub fn new(x_lo: f64, x_hi: f64, values: Vec<f64>) -> Result<Self, GridError> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(GridError::BadBounds { x_lo, x_hi });
        }
        if values.len() < 2 {
            return Err(GridError::TooFewPoints(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { x_lo, x_hi, values })
    }

    /// Samples `f` at `n` nodes. Non-finite samples are rejected.
    pub fn from_fn(
        x_lo: f64,
        x_hi: f64,
        n: usize,
        f: impl FnMut(f64) -> f64,
    ) -> Result<Self, GridError> {
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        let values = nodes(x_lo, x_hi, n).map(f).collect();
        Self::new(x_lo, x_hi, values)
    }

    /// Same nodes as `self`, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != self.values.len() {
            return Err(GridError::TooFewPoints(values.len()));
        }
        Self::new(self.x_lo, self.x_hi, values)
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.values.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        node(self.x_lo, self.x_hi, self.values.len(), i)
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        nodes(self.x_lo, self.x_hi, self.values.len())
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs().zip(self.values.iter().copied())
    }

    /// True when both grids share bounds and node count exactly.
    pub fn same_nodes(&self, other: &GridFunction) -> bool {
        self.x_lo == other.x_lo && self.x_hi == other.x_hi && self.len() == other.len()
    }

    /// Trapezoid rule over the grid.
    pub fn integral(&self) -> f64 {
        self.weighted_integral(|_| 1.0)
    }

    /// Trapezoid rule for `∫ w(x) f(x) dx`.
    pub fn weighted_integral(&self, mut w: impl FnMut(f64) -> f64) -> f64 {
        let h = self.spacing();
        let last = self.len() - 1;
        let terms = self.points().enumerate().map(|(i, (x, v))| {
            let end = if i == 0 || i == last { 0.5 } else { 1.0 };
            end * w(x) * v
        });
        h * neumaier_sum(terms)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Piecewise-linear interpolant, zero outside `[x_lo, x_hi]`.
    pub fn interpolate(&self, x: f64) -> f64 {
        if x < self.x_lo || x > self.x_hi {
            return 0.0;
        }
        let s = (x - self.x_lo) / self.spacing();
        let i = (s.floor() as usize).min(self.len() - 2);
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GridError> {
        self.with_values(self.values.iter().map(|v| v * factor).collect())
    }
}

pub(crate) fn node(x_lo: f64, x_hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        x_hi
    } else {
        x_lo + (x_hi - x_lo) * (i as f64) / ((n - 1) as f64)
    }
}

pub(crate) fn nodes(x_lo: f64, x_hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| node(x_lo, x_hi, n, i))
}

/// Compensated (Neumaier) summation in iteration order.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            GridFunction::new(1.0, 1.0, vec![0.0, 0.0]),
            Err(GridError::BadBounds { .. })
        ));
        assert!(matches!(
            GridFunction::new(0.0, 1.0, vec![0.0]),
            Err(GridError::TooFewPoints(1))
        ));
        assert!(matches!(
            GridFunction::new(0.0, 1.0, vec![0.0, f64::NAN]),
            Err(GridError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn trapezoid_is_exact_for_linear_functions() {
        let g = GridFunction::from_fn(-1.0, 3.0, 9, |x| 2.0 * x + 1.0).unwrap();
        assert!((g.integral() - 12.0).abs() < 1e-14);
        assert_eq!(g.x(8), 3.0);
    }

    #[test]
    fn interpolation_vanishes_outside() {
        let g = GridFunction::from_fn(0.0, 1.0, 11, |x| x).unwrap();
        assert_eq!(g.interpolate(-0.1), 0.0);
        assert_eq!(g.interpolate(1.1), 0.0);
        assert!((g.interpolate(0.55) - 0.55).abs() < 1e-15);
        assert_eq!(g.interpolate(1.0), 1.0);
    }

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let s = neumaier_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn serde_validates() {
        let bad = r#"{"x_lo": 1.0, "x_hi": 0.0, "values": [0.0, 1.0]}"#;
        assert!(serde_json::from_str::<GridFunction>(bad).is_err());
        let good = r#"{"x_lo": 0.0, "x_hi": 1.0, "values": [0.0, 1.0]}"#;
        let g: GridFunction = serde_json::from_str(good).unwrap();
        assert_eq!(g.len(), 2);
    }
}
