//! The variable-metric mini-batch proximal stochastic recursive gradient
//! solver and its variance-reduced baselines.
//!
//! Every algorithm tag shares one epoch loop: a full gradient anchors the
//! epoch, the inner loop applies an estimator step followed by a scaled
//! proximal step, and the next outer iterate is the last inner iterate. Tags
//! differ only in three knobs: the estimator (recursive vs anchor-based), the
//! metric rule (fixed scalar, scalar-BB, diagonal-BB) and the inner-length
//! rule (random vs fixed).
//!
//! The metric used inside epoch `k >= 1` is built at epoch start from the
//! secant pair of the two latest outer iterates and their full gradients;
//! epoch 0 runs with `U_0 = eta0 * I`.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{component_lipschitz, DatasetError};
use crate::metric::{scalar_bb_step, update_metric, MetricConfig, SecantPair};
use crate::model::CompositeObjective;
use crate::model::SmoothPart;
use crate::prox::{scaled_prox, DiagonalMetric};
use crate::sampling::{
    build_distribution, sample_inner_length, sample_minibatch, RngStream, SamplingDistribution,
    Scheme,
};
use crate::vecmath::all_finite;

/// Solver families from the experimental comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    VmMsrgbb,
    ProxSvrg,
    ProxSvrgBb,
    MS2gd,
    MS2gdBb,
    MSarah,
    MSarahBb,
}

/// Gradient estimator used in the inner loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorRule {
    /// `v_t = (1/b) sum [(grad f_i(w_t) - grad f_i(w_{t-1})) / (q_i n)] + v_{t-1}`.
    Recursive,
    /// `v_t = (1/b) sum [(grad f_i(w_t) - grad f_i(w_anchor)) / (q_i n)] + grad F(w_anchor)`.
    Svrg,
}

/// How the per-epoch metric is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricRule {
    FixedScalar,
    ScalarBb,
    DiagonalBb,
}

/// How the inner-loop length is chosen each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerLengthRule {
    /// `t_k` uniform on `{1, ..., m}`.
    RandomUniform,
    /// `t_k = m` every epoch.
    Fixed,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::VmMsrgbb,
        Algorithm::ProxSvrg,
        Algorithm::ProxSvrgBb,
        Algorithm::MS2gd,
        Algorithm::MS2gdBb,
        Algorithm::MSarah,
        Algorithm::MSarahBb,
    ];

    pub fn estimator(&self) -> EstimatorRule {
        match self {
            Algorithm::VmMsrgbb | Algorithm::MSarah | Algorithm::MSarahBb => {
                EstimatorRule::Recursive
            }
            _ => EstimatorRule::Svrg,
        }
    }

    pub fn metric_rule(&self) -> MetricRule {
        match self {
            Algorithm::VmMsrgbb => MetricRule::DiagonalBb,
            Algorithm::ProxSvrgBb | Algorithm::MS2gdBb | Algorithm::MSarahBb => {
                MetricRule::ScalarBb
            }
            _ => MetricRule::FixedScalar,
        }
    }

    /// Canonical inner-length rule of the family the tag comes from.
    pub fn default_inner_rule(&self) -> InnerLengthRule {
        match self {
            Algorithm::VmMsrgbb | Algorithm::MS2gd | Algorithm::MS2gdBb => {
                InnerLengthRule::RandomUniform
            }
            _ => InnerLengthRule::Fixed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::VmMsrgbb => "VM-mSRGBB",
            Algorithm::ProxSvrg => "Prox-SVRG",
            Algorithm::ProxSvrgBb => "Prox-SVRG-BB",
            Algorithm::MS2gd => "mS2GD",
            Algorithm::MS2gdBb => "mS2GD-BB",
            Algorithm::MSarah => "mSARAH",
            Algorithm::MSarahBb => "mSARAH-BB",
        }
    }

    /// Case-insensitive parse of the canonical names.
    pub fn from_name(name: &str) -> Option<Algorithm> {
        Algorithm::ALL
            .iter()
            .find(|a| a.name().eq_ignore_ascii_case(name))
            .copied()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validated solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Inner-loop cap `m`.
    pub m: usize,
    /// Mini-batch size `b`.
    pub batch: usize,
    /// Number of outer epochs `K`.
    pub epochs: usize,
    /// Initial scalar stepsize (`U_0 = eta0 * I`).
    pub eta0: f64,
    /// Closeness weight of the diagonal metric update.
    pub omega: f64,
    /// Stepsize floor.
    pub eps_floor: f64,
    pub scheme: Scheme,
    pub seed: u64,
    pub inner_rule: InnerLengthRule,
}

impl SolverConfig {
    /// Config with the tag's canonical inner-length rule and default
    /// `omega = 1`, uniform sampling, seed 0.
    pub fn new(algorithm: Algorithm, m: usize, batch: usize, epochs: usize, eta0: f64) -> Self {
        SolverConfig {
            algorithm,
            m,
            batch,
            epochs,
            eta0,
            omega: 1.0,
            eps_floor: 1e-12,
            scheme: Scheme::Uniform,
            seed: 0,
            inner_rule: algorithm.default_inner_rule(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ConfigError> {
        if self.m < 1 {
            return Err(ConfigError::InvalidInnerCap);
        }
        if self.batch < 1 || self.batch > n {
            return Err(ConfigError::InvalidBatch { b: self.batch, n });
        }
        if self.epochs < 1 {
            return Err(ConfigError::InvalidEpochs);
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(ConfigError::InvalidStepsize);
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(ConfigError::InvalidOmega);
        }
        if !(self.eps_floor > 0.0) {
            return Err(ConfigError::InvalidFloor);
        }
        Ok(())
    }

    fn metric_config(&self) -> MetricConfig {
        MetricConfig {
            omega: self.omega,
            m: self.m,
            eps_floor: self.eps_floor,
        }
    }
}

/// Rejected configurations (and degenerate instances).
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    InvalidInnerCap,
    InvalidBatch { b: usize, n: usize },
    InvalidEpochs,
    InvalidStepsize,
    InvalidOmega,
    InvalidFloor,
    DimensionMismatch,
    Degenerate(DatasetError),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::InvalidInnerCap => write!(f, "inner cap m must be >= 1"),
            ConfigError::InvalidBatch { b, n } => {
                write!(f, "batch size {b} must satisfy 1 <= b <= n = {n}")
            }
            ConfigError::InvalidEpochs => write!(f, "epoch count K must be >= 1"),
            ConfigError::InvalidStepsize => write!(f, "eta0 must be positive and finite"),
            ConfigError::InvalidOmega => write!(f, "omega must be positive and finite"),
            ConfigError::InvalidFloor => write!(f, "eps floor must be positive"),
            ConfigError::DimensionMismatch => write!(f, "initial point dimension mismatch"),
            ConfigError::Degenerate(e) => write!(f, "degenerate instance: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

/// Runtime failures of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    /// The objective exceeded 1000x its initial value or went non-finite.
    Divergence { epoch: usize },
    /// `step_epoch` called after the configured epochs completed.
    Finished,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Divergence { epoch } => {
                write!(f, "divergence detected at epoch {epoch}")
            }
            SolverError::Finished => write!(f, "all configured epochs already ran"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}

/// One row of the convergence trace, written after the epoch completes.
/// `objective`, `gap` and `grad_map_norm` describe the new outer iterate;
/// the metric statistics describe the metric used during the epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub passes: f64,
    pub seconds: f64,
    pub objective: f64,
    /// `max(objective - p_star, 1e-16)`; NaN when no reference was supplied.
    pub gap: f64,
    /// `||G_{U^-1}(w)||_U` at the new outer iterate.
    pub grad_map_norm: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub t_k: usize,
}

/// Uniformly sampled inner iterate (reservoir over the whole run) together
/// with the stepsizes of its epoch's metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledIterate {
    pub w: Vec<f64>,
    pub metric_u: Vec<f64>,
    pub epoch: usize,
    pub t: usize,
}

/// Full result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<EpochRecord>,
    sampled: Option<SampledIterate>,
    final_iterate: Vec<f64>,
    pub p0: f64,
    pub p_star: Option<f64>,
    /// `T = sum_k t_k`.
    pub total_inner_steps: u64,
}

impl RunTrace {
    /// The output iterate `w_a`, chosen uniformly at random from all inner
    /// iterates of the run (maintained online by reservoir sampling).
    pub fn select_output(&self) -> Option<&SampledIterate> {
        self.sampled.as_ref()
    }

    /// The last outer iterate, the practical result of the run.
    pub fn last_iterate(&self) -> &[f64] {
        &self.final_iterate
    }
}

/// Per-inner-step hook for tests and diagnostics.
pub trait InnerObserver {
    fn on_step(&mut self, event: &StepEvent<'_>);
}

impl InnerObserver for () {
    fn on_step(&mut self, _event: &StepEvent<'_>) {}
}

impl<F: FnMut(&StepEvent<'_>)> InnerObserver for F {
    fn on_step(&mut self, event: &StepEvent<'_>) {
        self(event)
    }
}

/// Snapshot of one inner step, before the iterate shift.
pub struct StepEvent<'a> {
    pub epoch: usize,
    pub t: usize,
    pub w_prev: &'a [f64],
    pub w_cur: &'a [f64],
    pub w_next: &'a [f64],
    pub v: &'a [f64],
    pub metric: &'a DiagonalMetric,
}

/// One recursive estimator step: exactly
/// `v = v_prev + (1/b) sum_{i in batch} (grad f_i(w_t) - grad f_i(w_prev)) / (q_i n)`.
pub fn srg_estimator_step(
    sp: &SmoothPart<'_>,
    dist: &SamplingDistribution,
    v_prev: &[f64],
    w_t: &[f64],
    w_prev: &[f64],
    batch: &[usize],
) -> Vec<f64> {
    let mut v = v_prev.to_vec();
    let n = sp.n() as f64;
    let b = batch.len() as f64;
    for &i in batch {
        let scale = 1.0 / (b * dist.q()[i] * n);
        sp.grad_diff_scaled_add(i, w_t, w_prev, scale, &mut v);
    }
    v
}

/// One anchor-based (SVRG-style) estimator step:
/// `v = grad F(w_anchor) + (1/b) sum (grad f_i(w_t) - grad f_i(w_anchor)) / (q_i n)`.
pub fn svrg_estimator_step(
    sp: &SmoothPart<'_>,
    dist: &SamplingDistribution,
    v_anchor: &[f64],
    w_anchor: &[f64],
    w_t: &[f64],
    batch: &[usize],
) -> Vec<f64> {
    let mut v = v_anchor.to_vec();
    let n = sp.n() as f64;
    let b = batch.len() as f64;
    for &i in batch {
        let scale = 1.0 / (b * dist.q()[i] * n);
        sp.grad_diff_scaled_add(i, w_t, w_anchor, scale, &mut v);
    }
    v
}

#[derive(Debug, Clone)]
struct Reservoir {
    seen: u64,
    sample: Option<SampledIterate>,
}

impl Reservoir {
    fn offer(
        &mut self,
        w: &[f64],
        metric: &DiagonalMetric,
        epoch: usize,
        t: usize,
        rng: &mut RngStream,
    ) {
        self.seen += 1;
        if rng.index(self.seen as usize) == 0 {
            self.sample = Some(SampledIterate {
                w: w.to_vec(),
                metric_u: metric.stepsizes().to_vec(),
                epoch,
                t,
            });
        }
    }
}

/// Epoch-stepping solver. Construct, call [`Solver::step_epoch`] until done
/// (or [`Solver::run`] for the whole budget), then take the trace.
pub struct Solver<'a> {
    config: SolverConfig,
    objective: CompositeObjective<'a>,
    dist: SamplingDistribution,
    rng: RngStream,
    w_tilde: Vec<f64>,
    prev_tilde: Vec<f64>,
    prev_full_grad: Vec<f64>,
    cached_full_grad: Option<Vec<f64>>,
    metric: DiagonalMetric,
    scalar_eta: f64,
    epoch: usize,
    component_evals: u64,
    inner_steps: u64,
    p0: f64,
    p_star: Option<f64>,
    reservoir: Reservoir,
    records: Vec<EpochRecord>,
}

impl<'a> Solver<'a> {
    /// Validates the config against the instance and prepares epoch 0 with
    /// `U_0 = eta0 * I`.
    pub fn new(
        config: SolverConfig,
        objective: CompositeObjective<'a>,
        w0: Vec<f64>,
        p_star: Option<f64>,
    ) -> Result<Self, ConfigError> {
        let ds = objective.smooth.dataset();
        config.validate(ds.n())?;
        if w0.len() != ds.dim() {
            return Err(ConfigError::DimensionMismatch);
        }
        let profile =
            component_lipschitz(ds, objective.smooth.lambda2()).map_err(ConfigError::Degenerate)?;
        let dist = build_distribution(&profile, config.scheme);
        let metric = DiagonalMetric::scalar(config.eta0, ds.dim())
            .map_err(|_| ConfigError::InvalidStepsize)?;
        let p0 = objective.value(&w0);
        Ok(Solver {
            rng: RngStream::new(config.seed),
            prev_tilde: w0.clone(),
            prev_full_grad: alloc::vec![0.0; ds.dim()],
            cached_full_grad: None,
            scalar_eta: config.eta0,
            epoch: 0,
            component_evals: 0,
            inner_steps: 0,
            p_star,
            reservoir: Reservoir {
                seen: 0,
                sample: None,
            },
            records: Vec::with_capacity(config.epochs),
            w_tilde: w0,
            metric,
            dist,
            config,
            objective,
            p0,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn l_omega(&self) -> f64 {
        self.dist.l_omega()
    }

    pub fn epochs_done(&self) -> usize {
        self.epoch
    }

    pub fn is_finished(&self) -> bool {
        self.epoch >= self.config.epochs
    }

    /// Component-gradient evaluations charged so far.
    pub fn component_evals(&self) -> u64 {
        self.component_evals
    }

    /// The current outer iterate.
    pub fn current_iterate(&self) -> &[f64] {
        &self.w_tilde
    }

    /// Stamps wall time onto the most recent record (the epoch loop itself
    /// never reads a clock, so traces stay deterministic by default).
    pub fn set_last_seconds(&mut self, seconds: f64) {
        if let Some(r) = self.records.last_mut() {
            r.seconds = seconds;
        }
    }

    pub fn step_epoch(&mut self) -> Result<&EpochRecord, SolverError> {
        self.step_epoch_observed(&mut ())
    }

    /// Runs one outer epoch, invoking the observer on every inner step.
    pub fn step_epoch_observed<O: InnerObserver>(
        &mut self,
        observer: &mut O,
    ) -> Result<&EpochRecord, SolverError> {
        if self.is_finished() {
            return Err(SolverError::Finished);
        }
        let k = self.epoch;
        let n = self.objective.smooth.n();
        let d = self.objective.dim();
        let b = self.config.batch;

        // v_0^k = grad F(w_tilde^k); reuse the gradient computed for the
        // previous epoch's diagnostics, charging it now as algorithmic work.
        let full_g = match self.cached_full_grad.take() {
            Some(g) => g,
            None => self.objective.smooth.full_gradient(&self.w_tilde),
        };
        self.component_evals += n as u64;

        // Metric for this epoch from the secant pair available at its start.
        if k >= 1 {
            let pair = SecantPair::from_iterates(
                &self.w_tilde,
                &self.prev_tilde,
                &full_g,
                &self.prev_full_grad,
            );
            match self.config.algorithm.metric_rule() {
                MetricRule::FixedScalar => {}
                MetricRule::ScalarBb => {
                    // Hold the previous stepsize on degenerate pairs.
                    if let Ok(eta) = scalar_bb_step(&pair, self.config.m) {
                        self.scalar_eta = eta.max(self.config.eps_floor);
                        self.metric = DiagonalMetric::scalar(self.scalar_eta, d)
                            .expect("floored scalar stepsize is positive");
                    }
                }
                MetricRule::DiagonalBb => {
                    self.metric = update_metric(&pair, &self.metric, &self.config.metric_config());
                }
            }
        }
        self.prev_tilde.clone_from(&self.w_tilde);
        self.prev_full_grad.clone_from(&full_g);

        let t_k = match self.config.inner_rule {
            InnerLengthRule::Fixed => self.config.m,
            InnerLengthRule::RandomUniform => sample_inner_length(self.config.m, &mut self.rng),
        };

        let mut w_prev = self.w_tilde.clone();
        let mut w_t = self.w_tilde.clone();
        let mut v = full_g.clone();
        let anchor_w = &self.w_tilde;
        let anchor_v = &full_g;
        let mut z = alloc::vec![0.0; d];
        for t in 1..=t_k {
            self.reservoir
                .offer(&w_t, &self.metric, k, t, &mut self.rng);
            let batch = sample_minibatch(&self.dist, b, &mut self.rng);
            v = match self.config.algorithm.estimator() {
                EstimatorRule::Recursive => srg_estimator_step(
                    &self.objective.smooth,
                    &self.dist,
                    &v,
                    &w_t,
                    &w_prev,
                    &batch,
                ),
                EstimatorRule::Svrg => svrg_estimator_step(
                    &self.objective.smooth,
                    &self.dist,
                    anchor_v,
                    anchor_w,
                    &w_t,
                    &batch,
                ),
            };
            self.component_evals += 2 * b as u64;
            self.inner_steps += 1;
            for ((zi, &wi), (&ui, &vi)) in z
                .iter_mut()
                .zip(&w_t)
                .zip(self.metric.stepsizes().iter().zip(&v))
            {
                *zi = wi - ui * vi;
            }
            let w_next = scaled_prox(&self.objective.reg, &self.metric, &z);
            observer.on_step(&StepEvent {
                epoch: k,
                t,
                w_prev: &w_prev,
                w_cur: &w_t,
                w_next: &w_next,
                v: &v,
                metric: &self.metric,
            });
            w_prev = core::mem::replace(&mut w_t, w_next);
        }
        self.w_tilde = w_t;

        let objective = self.objective.value(&self.w_tilde);
        if !objective.is_finite() || !all_finite(&self.w_tilde) || objective > 1e3 * self.p0 {
            return Err(SolverError::Divergence { epoch: k });
        }

        // Diagnostics gradient, cached for reuse as the next epoch's v_0 (and
        // not charged until then).
        let next_g = self.objective.smooth.full_gradient(&self.w_tilde);
        let grad_map_norm = crate::diagnostics::gradient_mapping_norm_with_grad(
            &self.w_tilde,
            &next_g,
            &self.metric,
            &self.objective.reg,
        );
        self.cached_full_grad = Some(next_g);

        let gap = self
            .p_star
            .map(|ps| (objective - ps).max(1e-16))
            .unwrap_or(f64::NAN);
        self.records.push(EpochRecord {
            epoch: k,
            passes: self.component_evals as f64 / n as f64,
            seconds: 0.0,
            objective,
            gap,
            grad_map_norm,
            u_min: self.metric.u_min(),
            u_max: self.metric.u_max(),
            alpha1: self.metric.upper(),
            alpha2: self.metric.lower(),
            t_k,
        });
        self.epoch += 1;
        Ok(self.records.last().unwrap())
    }

    /// Runs all remaining epochs and returns the trace.
    pub fn run(mut self) -> Result<RunTrace, SolverError> {
        while !self.is_finished() {
            self.step_epoch()?;
        }
        Ok(self.into_trace())
    }

    /// Like [`Solver::run`] with a per-inner-step observer.
    pub fn run_observed<O: InnerObserver>(
        mut self,
        observer: &mut O,
    ) -> Result<RunTrace, SolverError> {
        while !self.is_finished() {
            self.step_epoch_observed(observer)?;
        }
        Ok(self.into_trace())
    }

    pub fn into_trace(self) -> RunTrace {
        RunTrace {
            records: self.records,
            sampled: self.reservoir.sample,
            final_iterate: self.w_tilde,
            p0: self.p0,
            p_star: self.p_star,
            total_inner_steps: self.inner_steps,
        }
    }
}

/// Convenience: build and run in one call.
pub fn run(
    config: SolverConfig,
    objective: CompositeObjective<'_>,
    w0: Vec<f64>,
    p_star: Option<f64>,
) -> Result<RunTrace, RunError> {
    let solver = Solver::new(config, objective, w0, p_star).map_err(RunError::Config)?;
    solver.run().map_err(RunError::Solver)
}

/// Either kind of run failure.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Solver(SolverError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Solver(e) => e.fmt(f),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RunError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::model::Regularizer;
    use crate::oracle::{enumerate_single_step, LossKind, TinyInstance};
    use alloc::vec;
    use alloc::vec::Vec;

    fn tiny_objective(ds: &Dataset, lambda2: f64, reg: Regularizer) -> CompositeObjective<'_> {
        CompositeObjective::new(SmoothPart::new(ds, lambda2), reg)
    }

    #[test]
    fn estimator_steps_trivial_cases() {
        let ds = Dataset::from_dense(
            &[vec![0.5, -0.3], vec![-0.2, 0.8], vec![0.9, 0.4]],
            &[1.0, -1.0, 1.0],
        )
        .unwrap();
        let sp = SmoothPart::new(&ds, 0.1);
        let profile = component_lipschitz(&ds, 0.1).unwrap();
        let dist = build_distribution(&profile, Scheme::Uniform);
        let w = [0.3, -0.6];
        let v_prev = [0.7, 0.2];
        // w_t = w_prev: differences vanish.
        let v = srg_estimator_step(&sp, &dist, &v_prev, &w, &w, &[0, 2, 1]);
        assert_eq!(v, v_prev.to_vec());
        // Anchored estimator at the anchor returns the anchor gradient.
        let g = sp.full_gradient(&w);
        let v = svrg_estimator_step(&sp, &dist, &g, &w, &w, &[1, 1]);
        assert_eq!(v, g);
    }

    #[test]
    fn full_batch_enumeration_telescopes() {
        let ds = Dataset::from_dense(
            &[vec![0.5, -0.3], vec![-0.2, 0.8], vec![0.9, 0.4]],
            &[1.0, -1.0, 1.0],
        )
        .unwrap();
        let sp = SmoothPart::new(&ds, 0.05);
        let profile = component_lipschitz(&ds, 0.05).unwrap();
        let dist = build_distribution(&profile, Scheme::Uniform);
        let w_t = [0.3, -0.6];
        let w_prev = [-0.1, 0.2];
        let v_prev = [0.7, 0.2];
        // b = n with every index once under uniform q is the full-batch case:
        // v = grad F(w_t) - grad F(w_prev) + v_prev.
        let v = srg_estimator_step(&sp, &dist, &v_prev, &w_t, &w_prev, &[0, 1, 2]);
        let gt = sp.full_gradient(&w_t);
        let gp = sp.full_gradient(&w_prev);
        for j in 0..2 {
            assert!((v[j] - (gt[j] - gp[j] + v_prev[j])).abs() < 1e-14);
        }
        // Same for the anchored estimator: exact gradient at w_t.
        let v = svrg_estimator_step(&sp, &dist, &gp, &w_prev, &w_t, &[0, 1, 2]);
        for j in 0..2 {
            assert!((v[j] - gt[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn conditional_means_match_enumeration_oracle() {
        let inst = TinyInstance::new(
            vec![vec![0.5, -0.3], vec![-0.2, 0.8], vec![0.9, 0.4]],
            vec![1.0, -1.0, 1.0],
            LossKind::Logistic,
            0.1,
            Regularizer::Zero,
        );
        let ds = inst.to_dataset();
        let sp = SmoothPart::new(&ds, 0.1);
        let profile = component_lipschitz(&ds, 0.1).unwrap();
        let dist = build_distribution(&profile, Scheme::Uniform);
        let w_t = [0.3, -0.6];
        let w_prev = [-0.1, 0.2];
        let v_prev = [0.7, 0.2];
        // Implementation mean over all b = 1 batches.
        let mut mean = [0.0; 2];
        for i in 0..3 {
            let v = srg_estimator_step(&sp, &dist, &v_prev, &w_t, &w_prev, &[i]);
            for j in 0..2 {
                mean[j] += dist.q()[i] * v[j];
            }
        }
        // Biasedness signature: E[v_t | state] = grad F(w_t) - grad F(w_prev) + v_prev.
        let gt = sp.full_gradient(&w_t);
        let gp = sp.full_gradient(&w_prev);
        for j in 0..2 {
            assert!((mean[j] - (gt[j] - gp[j] + v_prev[j])).abs() < 1e-14);
        }
        // Independent oracle agrees.
        let oracle_mean = enumerate_single_step(&inst, &w_t, &w_prev, &v_prev, 1, dist.q());
        for j in 0..2 {
            assert!((mean[j] - oracle_mean[j]).abs() < 1e-12);
        }
        // The anchored estimator's conditional mean is grad F(w_t) exactly.
        let mut mean = [0.0; 2];
        for i in 0..3 {
            let v = svrg_estimator_step(&sp, &dist, &gp, &w_prev, &w_t, &[i]);
            for j in 0..2 {
                mean[j] += dist.q()[i] * v[j];
            }
        }
        for j in 0..2 {
            assert!((mean[j] - gt[j]).abs() < 1e-14);
        }
    }

    fn small_instance() -> Dataset {
        Dataset::from_dense(
            &[
                vec![0.8, -0.5, 0.2],
                vec![-0.3, 0.9, 0.1],
                vec![0.4, 0.4, -0.7],
                vec![-0.6, 0.1, 0.5],
            ],
            &[1.0, -1.0, 1.0, -1.0],
        )
        .unwrap()
    }

    #[test]
    fn single_inner_step_is_one_proximal_gradient_step() {
        let ds = small_instance();
        let obj = tiny_objective(&ds, 0.1, Regularizer::L1(0.05));
        let mut config = SolverConfig::new(Algorithm::VmMsrgbb, 1, 1, 1, 0.4);
        config.inner_rule = InnerLengthRule::Fixed;
        let w0 = vec![0.2, -0.1, 0.3];
        let trace = run(config, obj, w0.clone(), None).unwrap();
        // With t_k = 1 forced, v_1 = v_0 = grad F(w0), so the new outer
        // iterate is one scaled proximal gradient step.
        let sp = SmoothPart::new(&ds, 0.1);
        let g = sp.full_gradient(&w0);
        let metric = DiagonalMetric::scalar(0.4, 3).unwrap();
        let z: Vec<f64> = w0.iter().zip(&g).map(|(w, gi)| w - 0.4 * gi).collect();
        let expect = scaled_prox(&Regularizer::L1(0.05), &metric, &z);
        assert_eq!(trace.last_iterate(), &expect[..]);
        assert_eq!(trace.records.len(), 1);
    }

    #[test]
    fn hand_rolled_iteration_oracle_single_component() {
        // n = 1, b = 1: the recursive estimator telescopes to the exact
        // gradient, so with R = Zero the run is plain gradient descent with
        // per-coordinate stepsizes. Five steps against an independently
        // computed iteration on the oracle's own gradients.
        let inst = TinyInstance::new(
            vec![vec![0.7, -0.4]],
            vec![1.0],
            LossKind::Logistic,
            0.3,
            Regularizer::Zero,
        );
        let ds = inst.to_dataset();
        let obj = tiny_objective(&ds, 0.3, Regularizer::Zero);
        let mut config = SolverConfig::new(Algorithm::VmMsrgbb, 5, 1, 1, 0.5);
        config.inner_rule = InnerLengthRule::Fixed;
        let trace = run(config, obj, vec![0.4, 0.2], None).unwrap();

        let mut w = vec![0.4, 0.2];
        for _ in 0..5 {
            let g = inst.full_grad(&w);
            for (wi, gi) in w.iter_mut().zip(&g) {
                *wi -= 0.5 * gi;
            }
        }
        for (a, b) in trace.last_iterate().iter().zip(&w) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let ds = small_instance();
        let obj = tiny_objective(&ds, 0.05, Regularizer::L1(0.02));
        let mut config = SolverConfig::new(Algorithm::VmMsrgbb, 6, 2, 4, 0.3);
        config.seed = 77;
        // A reference value keeps the gap column a number, so the full-trace
        // equality below is meaningful (NaN gaps never compare equal).
        let t1 = run(config, obj, vec![0.0; 3], Some(0.0)).unwrap();
        let t2 = run(config, obj, vec![0.0; 3], Some(0.0)).unwrap();
        assert_eq!(t1, t2, "same seed must give bit-identical traces");
        let mut config2 = config;
        config2.seed = 78;
        let t3 = run(config2, obj, vec![0.0; 3], Some(0.0)).unwrap();
        assert_ne!(t1.records, t3.records, "different seed should diverge");
    }

    #[test]
    fn effective_pass_accounting_is_exact() {
        let ds = small_instance();
        let obj = tiny_objective(&ds, 0.05, Regularizer::Zero);
        let mut config = SolverConfig::new(Algorithm::MS2gd, 5, 2, 3, 0.2);
        config.seed = 9;
        let mut solver = Solver::new(config, obj, vec![0.0; 3], None).unwrap();
        let n = 4u64;
        let b = 2u64;
        let mut expect = 0u64;
        for _ in 0..3 {
            let record = solver.step_epoch().unwrap();
            let t_k = record.t_k as u64;
            expect += n + 2 * b * t_k;
            let passes = record.passes;
            assert_eq!(solver.component_evals(), expect);
            assert_eq!(passes, expect as f64 / n as f64);
        }
    }

    #[test]
    fn gradient_mapping_identity_on_every_step() {
        // Reconstructing w_{t+1} from g_t = U^{-1}(w_t - w_{t+1}) reproduces
        // the prox step exactly: w_{t+1} = w_t - U g_t.
        let ds = small_instance();
        let obj = tiny_objective(&ds, 0.1, Regularizer::L1(0.03));
        let mut config = SolverConfig::new(Algorithm::VmMsrgbb, 6, 1, 3, 0.3);
        config.seed = 5;
        let solver = Solver::new(config, obj, vec![0.0; 3], None).unwrap();
        let mut checked = 0usize;
        let mut obs = |ev: &StepEvent<'_>| {
            let u = ev.metric.stepsizes();
            for j in 0..u.len() {
                let g = (ev.w_cur[j] - ev.w_next[j]) / u[j];
                let rebuilt = ev.w_cur[j] - u[j] * g;
                assert!((rebuilt - ev.w_next[j]).abs() <= 1e-15 * (1.0 + ev.w_next[j].abs()));
            }
            checked += 1;
        };
        solver.run_observed(&mut obs).unwrap();
        assert!(checked > 0);
    }

    #[test]
    fn reservoir_support_and_single_step_case() {
        let ds = small_instance();
        let obj = tiny_objective(&ds, 0.1, Regularizer::Zero);
        // T = 1: the sampled iterate is the single candidate w_1 = w0.
        let mut config = SolverConfig::new(Algorithm::MSarah, 1, 1, 1, 0.2);
        config.seed = 3;
        let w0 = vec![0.1, 0.2, -0.3];
        let trace = run(config, obj, w0.clone(), None).unwrap();
        let sampled = trace.select_output().unwrap();
        assert_eq!(sampled.w, w0);
        assert_eq!((sampled.epoch, sampled.t), (0, 1));

        // K = 1, t_k = 3: w_a is one of the three inner candidates.
        let mut config = SolverConfig::new(Algorithm::MSarah, 3, 1, 1, 0.2);
        config.seed = 3;
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        let solver = Solver::new(config, obj, w0.clone(), None).unwrap();
        let mut obs = |ev: &StepEvent<'_>| candidates.push(ev.w_cur.to_vec());
        let trace = solver.run_observed(&mut obs).unwrap();
        let sampled = trace.select_output().unwrap();
        assert_eq!(candidates.len(), 3);
        assert!(candidates.iter().any(|c| c == &sampled.w));
    }

    #[test]
    fn reservoir_is_uniform_over_the_stream() {
        // Feed T candidates through the reservoir many times and check the
        // selected index is uniform within 4 sigma.
        let t_len = 100usize;
        let reps = 100_000usize;
        let mut counts = vec![0usize; t_len];
        let metric = DiagonalMetric::scalar(1.0, 1).unwrap();
        let mut rng = RngStream::new(2024);
        for _ in 0..reps {
            let mut res = Reservoir {
                seen: 0,
                sample: None,
            };
            for t in 0..t_len {
                res.offer(&[t as f64], &metric, 0, t + 1, &mut rng);
            }
            counts[res.sample.unwrap().t - 1] += 1;
        }
        let p = 1.0 / t_len as f64;
        let sigma = (reps as f64 * p * (1.0 - p)).sqrt();
        for (t, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - reps as f64 * p).abs();
            assert!(
                dev <= 4.0 * sigma,
                "index {t}: deviation {dev} > {}",
                4.0 * sigma
            );
        }
    }

    #[test]
    fn divergence_guard_trips_on_huge_stepsize() {
        let ds = small_instance();
        let obj = tiny_objective(&ds, 1.0, Regularizer::Zero);
        let mut config = SolverConfig::new(Algorithm::ProxSvrg, 20, 1, 5, 1e8);
        config.seed = 1;
        let err = run(config, obj, vec![0.5, 0.5, 0.5], None).unwrap_err();
        assert!(matches!(
            err,
            RunError::Solver(SolverError::Divergence { .. })
        ));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_name(a.name()), Some(a));
            assert_eq!(Algorithm::from_name("VM-MSRGBB"), Some(Algorithm::VmMsrgbb));
        }
        assert_eq!(Algorithm::from_name("nope"), None);
    }

    #[test]
    fn config_validation_errors() {
        let ds = small_instance();
        let obj = tiny_objective(&ds, 0.1, Regularizer::Zero);
        let bad_batch = SolverConfig::new(Algorithm::VmMsrgbb, 5, 9, 2, 0.1);
        assert!(matches!(
            Solver::new(bad_batch, obj, vec![0.0; 3], None),
            Err(ConfigError::InvalidBatch { b: 9, n: 4 })
        ));
        let bad_eta = SolverConfig::new(Algorithm::VmMsrgbb, 5, 1, 2, -0.5);
        assert!(matches!(
            Solver::new(bad_eta, obj, vec![0.0; 3], None),
            Err(ConfigError::InvalidStepsize)
        ));
        let ok = SolverConfig::new(Algorithm::VmMsrgbb, 5, 1, 2, 0.5);
        assert!(matches!(
            Solver::new(ok, obj, vec![0.0; 2], None),
            Err(ConfigError::DimensionMismatch)
        ));
    }
}
