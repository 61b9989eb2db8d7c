//! Variance-reduced proximal stochastic optimization with a diagonal
//! Barzilai-Borwein metric.
//!
//! The crate solves composite problems `P(w) = F(w) + R(w)` where `F` is an
//! average of smooth convex component losses (logistic plus ridge over a
//! sparse dataset) and `R` is a separable proxable regularizer. The main
//! solver keeps a per-coordinate stepsize vector that solves a box-constrained
//! regularized secant problem in closed form each epoch; the box is given by
//! two Barzilai-Borwein stepsizes scaled by the inner-loop cap. Classic
//! variance-reduced baselines (Prox-SVRG and friends, with scalar or scalar-BB
//! stepsizes) share the same inner-loop machinery.
//!
//! The crate is `no_std`-compatible (with `alloc`); all IO, file formats and
//! the command-line driver live in the companion `vmprox` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dataset;
pub mod diagnostics;
pub mod metric;
pub mod model;
pub mod oracle;
pub mod prox;
pub mod sampling;
pub mod solver;
pub mod vecmath;
pub mod verify;

pub use dataset::{Dataset, DatasetError, SmoothnessProfile};
pub use metric::{MetricConfig, SecantError, SecantPair};
pub use model::{CompositeObjective, Regularizer, SmoothPart};
pub use prox::{DiagonalMetric, MetricError};
pub use sampling::{RngStream, SamplingDistribution, Scheme};
pub use solver::{Algorithm, InnerLengthRule, RunTrace, Solver, SolverConfig, SolverError};
