//! Diagonal Barzilai-Borwein metric: BB-style box bounds and the closed-form
//! solution of the box-constrained regularized secant problem
//! `min_u ||s - Diag(u) y||^2 + omega ||Diag(u) - Diag(u_prev)||_F^2`.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

use crate::prox::DiagonalMetric;
use crate::vecmath::{dot, norm, norm_sq};

/// Secant pair `s = w_new - w_old`, `y = grad F(w_new) - grad F(w_old)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecantPair {
    pub s: Vec<f64>,
    pub y: Vec<f64>,
}

impl SecantPair {
    pub fn new(s: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(s.len(), y.len(), "secant vectors must share a dimension");
        SecantPair { s, y }
    }

    pub fn from_iterates(w_new: &[f64], w_old: &[f64], g_new: &[f64], g_old: &[f64]) -> Self {
        SecantPair::new(
            crate::vecmath::sub(w_new, w_old),
            crate::vecmath::sub(g_new, g_old),
        )
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn curvature(&self) -> f64 {
        dot(&self.s, &self.y)
    }
}

/// Hyperparameters of the metric update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    /// Closeness weight of the secant problem, > 0.
    pub omega: f64,
    /// Inner-loop cap, used for the 1/m scaling of the BB bounds.
    pub m: usize,
    /// Minimal admissible stepsize, keeps the inverse metric finite.
    pub eps_floor: f64,
}

impl MetricConfig {
    pub fn new(omega: f64, m: usize) -> Self {
        assert!(omega > 0.0 && m >= 1);
        MetricConfig {
            omega,
            m,
            eps_floor: 1e-12,
        }
    }
}

/// Degenerate secant pairs that admit no BB bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecantError {
    /// `||y|| = 0`.
    DegeneratePair,
    /// `s^T y <= 0`.
    NonpositiveCurvature,
}

impl fmt::Display for SecantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecantError::DegeneratePair => write!(f, "secant pair has ||y|| = 0"),
            SecantError::NonpositiveCurvature => write!(f, "secant pair has s^T y <= 0"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SecantError {}

/// BB-style bounds scaled by the inner-loop cap:
/// `alpha1 = (2/m) ||s|| / ||y||`, `alpha2 = (1/m) s^T y / ||y||^2`.
///
/// By Cauchy-Schwarz `alpha2 <= alpha1` whenever `s^T y > 0`.
pub fn bb_bounds(pair: &SecantPair, m: usize) -> Result<(f64, f64), SecantError> {
    assert!(m >= 1);
    let y_norm_sq = norm_sq(&pair.y);
    if y_norm_sq == 0.0 {
        return Err(SecantError::DegeneratePair);
    }
    let curvature = pair.curvature();
    if curvature <= 0.0 {
        return Err(SecantError::NonpositiveCurvature);
    }
    let m = m as f64;
    let alpha1 = 2.0 / m * norm(&pair.s) / y_norm_sq.sqrt();
    let alpha2 = curvature / (m * y_norm_sq);
    Ok((alpha1, alpha2))
}

/// Scalar BB stepsize for the scalar-BB baselines: the `alpha2` formula
/// `(1/m) s^T y / ||y||^2`.
pub fn scalar_bb_step(pair: &SecantPair, m: usize) -> Result<f64, SecantError> {
    bb_bounds(pair, m).map(|(_, alpha2)| alpha2)
}

/// Closed-form solution of the regularized secant problem over the box
/// `[alpha2, alpha1]`: per coordinate,
/// `u_i = clip( (s_i y_i + omega u_prev_i) / (y_i^2 + omega), alpha2, alpha1 )`.
///
/// Coordinates with `y_i = 0` reduce to `u_prev_i` automatically since the
/// numerator collapses to `omega * u_prev_i`.
pub fn diagonal_bb_update(
    pair: &SecantPair,
    u_prev: &[f64],
    cfg: &MetricConfig,
    alpha1: f64,
    alpha2: f64,
) -> DiagonalMetric {
    assert!(0.0 < alpha2 && alpha2 <= alpha1);
    assert_eq!(pair.dim(), u_prev.len());
    let u: Vec<f64> = pair
        .s
        .iter()
        .zip(&pair.y)
        .zip(u_prev)
        .map(|((&si, &yi), &upi)| {
            let raw = (si * yi + cfg.omega * upi) / (yi * yi + cfg.omega);
            raw.clamp(alpha2, alpha1)
        })
        .collect();
    DiagonalMetric::new(u, alpha2, alpha1).expect("clipped update stays inside the box")
}

/// Full metric update with the hold-previous fallback: on a degenerate pair
/// or nonpositive curvature the previous metric is returned unchanged;
/// otherwise the BB bounds (floored at `eps_floor`) box the closed-form
/// update.
pub fn update_metric(
    pair: &SecantPair,
    prev: &DiagonalMetric,
    cfg: &MetricConfig,
) -> DiagonalMetric {
    match bb_bounds(pair, cfg.m) {
        Err(_) => prev.clone(),
        Ok((alpha1, alpha2)) => {
            let lo = alpha2.max(cfg.eps_floor);
            let hi = alpha1.max(lo);
            diagonal_bb_update(pair, prev.stepsizes(), cfg, hi, lo)
        }
    }
}
