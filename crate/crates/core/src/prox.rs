//! Scaled proximal operators `prox_R^{A^{-1}}` for diagonal metrics
//! `A = Diag(u)`.
//!
//! Only separable regularizers are supported, so the prox is closed-form per
//! coordinate. Ties at the shrinkage threshold resolve to exactly 0 so l1
//! sparsity diagnostics see true zeros.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

use crate::model::Regularizer;

/// Positive diagonal metric with its box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMetric {
    u: Vec<f64>,
    lower: f64,
    upper: f64,
}

/// Invalid metric construction.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricError {
    /// A stepsize is zero, negative, or non-finite.
    NonPositiveStep { index: usize },
    /// A stepsize escapes `[lower, upper]`.
    OutOfBounds { index: usize },
    /// The bounds themselves are not `0 < lower <= upper < inf`.
    BadBounds,
    /// Zero-dimensional metric.
    Empty,
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::NonPositiveStep { index } => {
                write!(f, "stepsize at coordinate {index} is not strictly positive")
            }
            MetricError::OutOfBounds { index } => {
                write!(f, "stepsize at coordinate {index} violates the box bounds")
            }
            MetricError::BadBounds => write!(f, "bounds must satisfy 0 < lower <= upper"),
            MetricError::Empty => write!(f, "metric has no coordinates"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricError {}

impl DiagonalMetric {
    /// Validates `0 < lower <= u_i <= upper` and finiteness.
    pub fn new(u: Vec<f64>, lower: f64, upper: f64) -> Result<Self, MetricError> {
        if u.is_empty() {
            return Err(MetricError::Empty);
        }
        if !(lower > 0.0 && lower <= upper && upper.is_finite()) {
            return Err(MetricError::BadBounds);
        }
        for (index, &ui) in u.iter().enumerate() {
            if !(ui > 0.0) || !ui.is_finite() {
                return Err(MetricError::NonPositiveStep { index });
            }
            if ui < lower || ui > upper {
                return Err(MetricError::OutOfBounds { index });
            }
        }
        Ok(DiagonalMetric { u, lower, upper })
    }

    /// Scalar metric `eta * I` in dimension `d`.
    pub fn scalar(eta: f64, d: usize) -> Result<Self, MetricError> {
        Self::new(alloc::vec![eta; d], eta, eta)
    }

    pub fn stepsizes(&self) -> &[f64] {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Smallest actual stepsize.
    pub fn u_min(&self) -> f64 {
        self.u.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest actual stepsize.
    pub fn u_max(&self) -> f64 {
        self.u.iter().cloned().fold(0.0, f64::max)
    }
}

/// Soft threshold with exact zeros at ties: `sign(z) * max(|z| - t, 0)`.
fn soft_threshold(z: f64, t: f64) -> f64 {
    let mag = z.abs() - t;
    if mag <= 0.0 {
        0.0
    } else {
        mag * z.signum()
    }
}

/// Per-coordinate scaled prox of `R` at `z` with stepsize `u`.
pub fn prox_1d(reg: &Regularizer, u: f64, z: f64) -> f64 {
    match *reg {
        Regularizer::Zero => z,
        Regularizer::L1(l1) => soft_threshold(z, l1 * u),
        Regularizer::L2(l2) => z / (1.0 + l2 * u),
        Regularizer::ElasticNet { l1, l2 } => soft_threshold(z, l1 * u) / (1.0 + l2 * u),
    }
}

/// `argmin_y { 1/2 ||y - w||^2_{U^{-1}} + R(y) }`, coordinate-wise.
pub fn scaled_prox(reg: &Regularizer, metric: &DiagonalMetric, w: &[f64]) -> Vec<f64> {
    debug_assert_eq!(w.len(), metric.dim());
    w.iter()
        .zip(metric.stepsizes())
        .map(|(&wi, &ui)| prox_1d(reg, ui, wi))
        .collect()
}

/// Distance from `U^{-1}(w - y)` to the subdifferential of `R` at `y`
/// (Euclidean over coordinates). Zero exactly when `y = scaled_prox(w)`.
pub fn prox_optimality_residual(
    reg: &Regularizer,
    metric: &DiagonalMetric,
    w: &[f64],
    y: &[f64],
) -> f64 {
    debug_assert_eq!(w.len(), metric.dim());
    debug_assert_eq!(y.len(), metric.dim());
    let mut sq = 0.0;
    for ((&wi, &yi), &ui) in w.iter().zip(y).zip(metric.stepsizes()) {
        let g = (wi - yi) / ui;
        let dist = match *reg {
            Regularizer::Zero => g.abs(),
            Regularizer::L1(l1) => l1_subdiff_dist(g, yi, l1),
            Regularizer::L2(l2) => (g - l2 * yi).abs(),
            Regularizer::ElasticNet { l1, l2 } => l1_subdiff_dist(g - l2 * yi, yi, l1),
        };
        sq += dist * dist;
    }
    sq.sqrt()
}

/// Distance of `g` to the subdifferential of `l1 * |.|` at `y`.
fn l1_subdiff_dist(g: f64, y: f64, l1: f64) -> f64 {
    if y > 0.0 {
        (g - l1).abs()
    } else if y < 0.0 {
        (g + l1).abs()
    } else {
        (g.abs() - l1).max(0.0)
    }
}
