//! Composite objective `P(w) = F(w) + R(w)` for logistic-plus-ridge smooth
//! parts and separable proxable regularizers.
//!
//! The ridge term is folded into the smooth part (each component is
//! `f_i(w) = log(1 + exp(-b_i a_i^T w)) + (lambda2/2) ||w||^2`) and the
//! nonsmooth piece stays in `R`, matching the experimental split used
//! throughout. All operations are pure and reentrant.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::dataset::Dataset;

/// `sigma(-z) = 1 / (1 + e^z)`, evaluated without overflow for any `z`.
fn sigmoid_neg(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// `log(1 + e^{-z})` without overflow for any `z`.
fn log1p_exp_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Smooth part `F(w) = (1/n) sum_i f_i(w)` with the ridge folded in.
#[derive(Debug, Clone, Copy)]
pub struct SmoothPart<'a> {
    ds: &'a Dataset,
    lambda2: f64,
}

impl<'a> SmoothPart<'a> {
    pub fn new(ds: &'a Dataset, lambda2: f64) -> Self {
        assert!(lambda2 >= 0.0, "ridge weight must be nonnegative");
        SmoothPart { ds, lambda2 }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.ds
    }

    pub fn n(&self) -> usize {
        self.ds.n()
    }

    pub fn dim(&self) -> usize {
        self.ds.dim()
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Gradient coefficient of the logistic term of component `i` at `w`:
    /// `-b_i * sigma(-b_i a_i^T w)`. The component gradient is this scalar
    /// times `a_i`, plus `lambda2 * w`.
    fn logistic_coeff(&self, i: usize, w: &[f64]) -> f64 {
        let z = self.ds.label(i) * self.ds.row_dot(i, w);
        -self.ds.label(i) * sigmoid_neg(z)
    }

    /// `f_i(w) = log(1 + exp(-b_i a_i^T w)) + (lambda2/2) ||w||^2`.
    pub fn component_value(&self, i: usize, w: &[f64]) -> f64 {
        let z = self.ds.label(i) * self.ds.row_dot(i, w);
        log1p_exp_neg(z) + 0.5 * self.lambda2 * crate::vecmath::norm_sq(w)
    }

    /// `grad f_i(w)` as a dense vector.
    pub fn component_grad(&self, i: usize, w: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim()];
        self.component_grad_into(i, w, &mut out);
        out
    }

    /// Writes `grad f_i(w)` into `out`.
    pub fn component_grad_into(&self, i: usize, w: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        let coeff = self.logistic_coeff(i, w);
        for (o, &wi) in out.iter_mut().zip(w) {
            *o = self.lambda2 * wi;
        }
        let (cols, vals) = self.ds.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            out[c] += coeff * v;
        }
    }

    /// Accumulates `acc += scale * (grad f_i(w_a) - grad f_i(w_b))`.
    ///
    /// The hot path of the variance-reduced estimators: the logistic parts
    /// differ only on the sparse support of `a_i`, the ridge parts on the
    /// dense difference `w_a - w_b`.
    pub fn grad_diff_scaled_add(
        &self,
        i: usize,
        w_a: &[f64],
        w_b: &[f64],
        scale: f64,
        acc: &mut [f64],
    ) {
        let coeff = self.logistic_coeff(i, w_a) - self.logistic_coeff(i, w_b);
        let (cols, vals) = self.ds.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            acc[c] += scale * coeff * v;
        }
        if self.lambda2 != 0.0 {
            for ((a, &xa), &xb) in acc.iter_mut().zip(w_a).zip(w_b) {
                *a += scale * self.lambda2 * (xa - xb);
            }
        }
    }

    /// Full gradient `(1/n) sum_i grad f_i(w)`, single-threaded fixed-order
    /// summation so results are deterministic.
    pub fn full_gradient(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n() as f64;
        let mut out = alloc::vec![0.0; self.dim()];
        for i in 0..self.n() {
            let coeff = self.logistic_coeff(i, w) / n;
            let (cols, vals) = self.ds.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += coeff * v;
            }
        }
        // The ridge contribution is identical across components.
        if self.lambda2 != 0.0 {
            for (o, &wi) in out.iter_mut().zip(w) {
                *o += self.lambda2 * wi;
            }
        }
        out
    }

    /// `F(w) = (1/n) sum_i f_i(w)`.
    pub fn value(&self, w: &[f64]) -> f64 {
        let n = self.n() as f64;
        let logistic: f64 = (0..self.n())
            .map(|i| {
                let z = self.ds.label(i) * self.ds.row_dot(i, w);
                log1p_exp_neg(z)
            })
            .sum();
        logistic / n + 0.5 * self.lambda2 * crate::vecmath::norm_sq(w)
    }
}

/// Separable proxable regularizer kinds. All weights must be nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    Zero,
    L1(f64),
    L2(f64),
    ElasticNet { l1: f64, l2: f64 },
}

impl Regularizer {
    /// True when every weight is nonnegative (R proper, closed, convex).
    pub fn is_valid(&self) -> bool {
        match *self {
            Regularizer::Zero => true,
            Regularizer::L1(l1) => l1 >= 0.0,
            Regularizer::L2(l2) => l2 >= 0.0,
            Regularizer::ElasticNet { l1, l2 } => l1 >= 0.0 && l2 >= 0.0,
        }
    }

    /// l1 weight (0 when absent).
    pub fn l1_weight(&self) -> f64 {
        match *self {
            Regularizer::L1(l1) | Regularizer::ElasticNet { l1, .. } => l1,
            _ => 0.0,
        }
    }

    /// l2 weight carried by the regularizer itself (0 when absent).
    pub fn l2_weight(&self) -> f64 {
        match *self {
            Regularizer::L2(l2) | Regularizer::ElasticNet { l2, .. } => l2,
            _ => 0.0,
        }
    }

    /// `R` at a single coordinate.
    pub fn value_1d(&self, y: f64) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1(l1) => l1 * y.abs(),
            Regularizer::L2(l2) => 0.5 * l2 * y * y,
            Regularizer::ElasticNet { l1, l2 } => l1 * y.abs() + 0.5 * l2 * y * y,
        }
    }

    /// `R(w)` for separable kinds.
    pub fn value(&self, w: &[f64]) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            _ => w.iter().map(|&y| self.value_1d(y)).sum(),
        }
    }
}

/// The full objective `P(w) = F(w) + R(w)`.
#[derive(Debug, Clone, Copy)]
pub struct CompositeObjective<'a> {
    pub smooth: SmoothPart<'a>,
    pub reg: Regularizer,
}

impl<'a> CompositeObjective<'a> {
    pub fn new(smooth: SmoothPart<'a>, reg: Regularizer) -> Self {
        assert!(reg.is_valid(), "regularizer weights must be nonnegative");
        CompositeObjective { smooth, reg }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.smooth.value(w) + self.reg.value(w)
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }
}
