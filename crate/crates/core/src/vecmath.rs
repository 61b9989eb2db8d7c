//! Small dense vector helpers shared by the solver and diagnostics.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

/// Dot product of two equally sized slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Element-wise difference `a - b`.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Squared norm in the metric `Diag(u)`: `sum_i u_i x_i^2`.
pub fn metric_norm_sq(x: &[f64], u: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), u.len());
    x.iter().zip(u).map(|(xi, ui)| ui * xi * xi).sum()
}

/// Squared norm in the inverse metric `Diag(u)^-1`: `sum_i x_i^2 / u_i`.
pub fn inv_metric_norm_sq(x: &[f64], u: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), u.len());
    x.iter().zip(u).map(|(xi, ui)| xi * xi / ui).sum()
}

/// True if every entry is finite.
pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}
