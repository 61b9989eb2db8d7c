//! Convergence metrics and validators: the scaled gradient mapping,
//! high-accuracy reference solutions, theoretical rate constants, and
//! bound checks driven by exact enumeration or Monte-Carlo runs.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::component_lipschitz;
use crate::model::{CompositeObjective, Regularizer, SmoothPart};
use crate::prox::{prox_1d, scaled_prox, DiagonalMetric};
use crate::solver::{Algorithm, InnerLengthRule, Solver, SolverConfig};
use crate::vecmath::{metric_norm_sq, norm};

/// Scaled gradient mapping `G_{U^-1}(w) = U^-1 (w - prox_R^{U^-1}(w - U g))`
/// with `g` supplied by the caller.
pub fn gradient_mapping_with_grad(
    w: &[f64],
    grad: &[f64],
    metric: &DiagonalMetric,
    reg: &Regularizer,
) -> Vec<f64> {
    debug_assert_eq!(w.len(), metric.dim());
    w.iter()
        .zip(grad)
        .zip(metric.stepsizes())
        .map(|((&wi, &gi), &ui)| (wi - prox_1d(reg, ui, wi - ui * gi)) / ui)
        .collect()
}

/// `||G_{U^-1}(w)||_U` with a precomputed gradient.
pub fn gradient_mapping_norm_with_grad(
    w: &[f64],
    grad: &[f64],
    metric: &DiagonalMetric,
    reg: &Regularizer,
) -> f64 {
    let g = gradient_mapping_with_grad(w, grad, metric, reg);
    metric_norm_sq(&g, metric.stepsizes()).sqrt()
}

/// Scaled gradient mapping of the composite objective at `w`. Zero exactly
/// at solutions; reduces to `grad F(w)` when `R` is zero.
pub fn gradient_mapping(
    w: &[f64],
    metric: &DiagonalMetric,
    sp: &SmoothPart<'_>,
    reg: &Regularizer,
) -> Vec<f64> {
    let grad = sp.full_gradient(w);
    gradient_mapping_with_grad(w, &grad, metric, reg)
}

/// High-accuracy solution used as the optimality-gap anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub w_star: Vec<f64>,
    pub p_star: f64,
    /// `||G||_2` certified at `w_star` with the `1/L_Omega` scalar metric.
    pub residual: f64,
    pub tol: f64,
    /// Proximal-gradient iterations spent before the stochastic polish.
    pub pg_iterations: usize,
}

/// Reference computation ran out of its iteration budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxIterations {
    pub budget: usize,
}

impl fmt::Display for MaxIterations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tolerance not reached within {} iterations", self.budget)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MaxIterations {}

/// Deterministic proximal gradient descent with the scalar metric `1/l`:
/// iterates `w <- prox_R^{(1/l) I}(w - (1/l) grad(w))` until the gradient
/// mapping's Euclidean norm drops to `tol`.
///
/// Generic over the gradient so oracle instances can drive it; returns
/// `(w_star, residual, iterations)`.
pub fn prox_gradient_descent<G: Fn(&[f64]) -> Vec<f64>>(
    grad: G,
    l: f64,
    reg: &Regularizer,
    w0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, f64, usize), MaxIterations> {
    assert!(l > 0.0 && tol > 0.0);
    let u = 1.0 / l;
    let metric = DiagonalMetric::scalar(u, w0.len()).expect("positive stepsize");
    let mut w = w0.to_vec();
    for iter in 0..=max_iters {
        let g = grad(&w);
        let z: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - u * gi).collect();
        let w_next = scaled_prox(reg, &metric, &z);
        let mapping: Vec<f64> = w.iter().zip(&w_next).map(|(a, b)| (a - b) * l).collect();
        let residual = norm(&mapping);
        if residual <= tol {
            return Ok((w, residual, iter));
        }
        w = w_next;
    }
    Err(MaxIterations { budget: max_iters })
}

/// Computes the reference solution: deterministic proximal gradient with the
/// `1/L_Omega` scalar metric down to `tol` on the gradient-mapping norm, then
/// one long seeded Prox-SVRG polish. The polish result is adopted only when
/// it both lowers the objective and re-certifies the residual.
pub fn compute_reference(
    sp: &SmoothPart<'_>,
    reg: &Regularizer,
    tol: f64,
) -> Result<ReferenceSolution, MaxIterations> {
    compute_reference_with_budget(sp, reg, tol, 2_000_000)
}

pub fn compute_reference_with_budget(
    sp: &SmoothPart<'_>,
    reg: &Regularizer,
    tol: f64,
    max_iters: usize,
) -> Result<ReferenceSolution, MaxIterations> {
    assert!(tol > 0.0);
    let profile = component_lipschitz(sp.dataset(), sp.lambda2()).expect("positive smoothness");
    let l_omega = profile.max();
    let w0 = alloc::vec![0.0; sp.dim()];
    let (w_pg, res_pg, pg_iterations) =
        prox_gradient_descent(|w| sp.full_gradient(w), l_omega, reg, &w0, tol, max_iters)?;
    let objective = CompositeObjective::new(*sp, *reg);
    let mut best_w = w_pg;
    let mut best_p = objective.value(&best_w);
    let mut best_res = res_pg;

    // Stochastic polish with a conservative stepsize and a fixed seed; adopt
    // its best epoch only when the objective drops and the residual still
    // certifies.
    let mut config = SolverConfig::new(
        Algorithm::ProxSvrg,
        (2 * sp.n()).max(1),
        1,
        10,
        1.0 / (4.0 * l_omega),
    );
    config.seed = 0x5EED;
    config.inner_rule = InnerLengthRule::Fixed;
    if let Ok(mut solver) = Solver::new(config, objective, best_w.clone(), None) {
        let mut candidate: Option<Vec<f64>> = None;
        let mut candidate_p = best_p;
        while !solver.is_finished() {
            match solver.step_epoch() {
                Ok(record) => {
                    if record.objective < candidate_p {
                        candidate_p = record.objective;
                        candidate = Some(solver.current_iterate().to_vec());
                    }
                }
                Err(_) => break,
            }
        }
        if let Some(w) = candidate {
            let p = objective.value(&w);
            let metric = DiagonalMetric::scalar(1.0 / l_omega, sp.dim()).unwrap();
            let res = norm(&gradient_mapping(&w, &metric, sp, reg));
            if p < best_p && res <= tol {
                best_p = p;
                best_w = w;
                best_res = res;
            }
        }
    }

    Ok(ReferenceSolution {
        p_star: best_p,
        w_star: best_w,
        residual: best_res,
        tol,
        pg_iterations,
    })
}

/// Inputs of the outer-loop rate constant. `modulus` is the strong-convexity
/// modulus of `P` or the quadratic-growth modulus, depending on the mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    pub modulus: f64,
    pub l_omega: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub m: usize,
    pub b: usize,
}

/// Which convergence regime the modulus describes. The rate formula is the
/// same; only the interpretation of the modulus changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    StronglyConvex,
    QuadraticGrowth,
}

/// The hypothesis `8 L_Omega u_max / b < 1` fails.
#[derive(Debug, Clone, PartialEq)]
pub struct RateHypothesisError {
    pub ratio: f64,
}

impl fmt::Display for RateHypothesisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rate hypothesis violated: 8 L_Omega u_max / b = {} >= 1",
            self.ratio
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RateHypothesisError {}

/// Outer-loop contraction factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub rho: f64,
    /// True when `rho < 1`, i.e. the epoch recursion contracts.
    pub contraction: bool,
}

/// Per-epoch rate constant
/// `rho = 1 / (m mu u_min (1 - 8 L u_max / b)) + 4 L u_max / (m b (1 - 8 L u_max / b))`.
pub fn theoretical_rate(
    inputs: &RateInputs,
    _mode: RateMode,
) -> Result<RateEstimate, RateHypothesisError> {
    assert!(
        inputs.modulus > 0.0
            && inputs.l_omega > 0.0
            && inputs.u_min > 0.0
            && inputs.u_max >= inputs.u_min
            && inputs.m >= 1
            && inputs.b >= 1
    );
    let ratio = 8.0 * inputs.l_omega * inputs.u_max / inputs.b as f64;
    if ratio >= 1.0 {
        return Err(RateHypothesisError { ratio });
    }
    let m = inputs.m as f64;
    let b = inputs.b as f64;
    let denom = 1.0 - ratio;
    let rho = 1.0 / (m * inputs.modulus * inputs.u_min * denom)
        + 4.0 * inputs.l_omega * inputs.u_max / (m * b * denom);
    Ok(RateEstimate {
        rho,
        contraction: rho < 1.0,
    })
}

/// Inner-loop contraction factor under strong convexity of `F`:
/// `1 - mu_F^2 u_min (2/L_Omega - u_max)`.
pub fn inner_loop_rate(mu_f: f64, l_omega: f64, u_min: f64, u_max: f64) -> f64 {
    assert!(mu_f > 0.0 && l_omega > 0.0 && u_min > 0.0 && u_max >= u_min);
    1.0 - mu_f * mu_f * u_min * (2.0 / l_omega - u_max)
}

/// The only modulus certifiable without eigen-analysis: the ridge weight of
/// the smooth part plus any l2 weight carried by the regularizer.
pub fn certifiable_modulus(lambda2: f64, reg: &Regularizer) -> f64 {
    lambda2 + reg.l2_weight()
}

/// One seeded run's contribution to the convex bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    /// `||G_{U^-1}(w_a)||_U^2` at that run's sampled output iterate.
    pub grad_map_sq: f64,
    /// `T`, the run's total inner steps.
    pub total_inner_steps: u64,
    /// Largest stepsize the run ever used.
    pub u_max: f64,
}

/// Outcome of the convex bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub empirical_mean: f64,
    pub std_error: f64,
    /// Mean over runs of `6 (P(w0) - P_*) / T`.
    pub bound: f64,
    /// All runs satisfied `u_max <= 1/(3 L_Omega)`.
    pub hypothesis_ok: bool,
    /// `empirical_mean <= bound + 2 std errors`.
    pub pass: bool,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mean ||G||_U^2 = {:.6e} (se {:.2e}) vs bound {:.6e}: {}{}",
            self.empirical_mean,
            self.std_error,
            self.bound,
            if self.pass { "pass" } else { "FAIL" },
            if self.hypothesis_ok {
                ""
            } else {
                " (hypothesis violated)"
            },
        )
    }
}

/// Checks the sampled-output gradient-mapping bound
/// `E[||G(w_a)||_U^2] <= 6 (P(w0) - P_*) / T` over seeded runs.
pub fn convex_bound_check(samples: &[BoundSample], p0_gap: f64, l_omega: f64) -> BoundReport {
    assert!(!samples.is_empty());
    let nf = samples.len() as f64;
    let mean = samples.iter().map(|s| s.grad_map_sq).sum::<f64>() / nf;
    let var = samples
        .iter()
        .map(|s| (s.grad_map_sq - mean) * (s.grad_map_sq - mean))
        .sum::<f64>()
        / nf;
    let std_error = (var / nf).sqrt();
    let bound = samples
        .iter()
        .map(|s| 6.0 * p0_gap / s.total_inner_steps as f64)
        .sum::<f64>()
        / nf;
    let cap = 1.0 / (3.0 * l_omega);
    let hypothesis_ok = samples.iter().all(|s| s.u_max <= cap * (1.0 + 1e-12));
    BoundReport {
        empirical_mean: mean,
        std_error,
        bound,
        hypothesis_ok,
        pass: mean <= bound + 2.0 * std_error,
    }
}

/// Estimator variance check against the one-step step-size bound
/// `E||v_t - grad F(w_t)||^2 <= (L_Omega^2 / b) E||w_t - w_{t-1}||^2`
/// and, when an optimal value is supplied, the objective-gap bound
/// `<= (4 L_Omega / b) E[P(w_t) - P_* + P(w_{t-1}) - P_*]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub lhs: f64,
    pub rhs_step_bound: f64,
    pub margin_step: f64,
    pub rhs_gap_bound: Option<f64>,
    pub margin_gap: Option<f64>,
}

impl fmt::Display for VarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "E||v - grad F||^2 = {:.6e} <= {:.6e} (margin {:.3e})",
            self.lhs, self.rhs_step_bound, self.margin_step
        )?;
        if let (Some(rhs), Some(margin)) = (self.rhs_gap_bound, self.margin_gap) {
            write!(f, "; gap bound {rhs:.6e} (margin {margin:.3e})")?;
        }
        Ok(())
    }
}

/// Exact-enumeration variance check on a tiny instance (`n^(b t)` paths).
pub fn estimator_variance_check(
    inst: &crate::oracle::TinyInstance,
    b: usize,
    depth: usize,
    q: &[f64],
    u: &[f64],
    w0: &[f64],
    p_star: Option<f64>,
) -> Result<VarianceReport, crate::oracle::PathExplosion> {
    let moments = crate::oracle::enumerate_expectation(
        inst,
        crate::oracle::EstimatorKind::Recursive,
        depth,
        b,
        q,
        u,
        w0,
    )?;
    let n = inst.n() as f64;
    let l_omega = inst
        .lipschitz()
        .iter()
        .zip(q)
        .map(|(li, qi)| li / (n * qi))
        .fold(0.0f64, f64::max);
    let rhs_step = l_omega * l_omega / b as f64 * moments.mean_step_sq;
    let rhs_gap = p_star
        .map(|ps| 4.0 * l_omega / b as f64 * (moments.mean_obj - ps + moments.mean_obj_prev - ps));
    Ok(VarianceReport {
        lhs: moments.mean_dev_sq,
        rhs_step_bound: rhs_step,
        margin_step: rhs_step - moments.mean_dev_sq,
        rhs_gap_bound: rhs_gap,
        margin_gap: rhs_gap.map(|r| r - moments.mean_dev_sq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::oracle::TinyInstance;
    use alloc::vec;

    fn logistic_instance() -> Dataset {
        Dataset::from_dense(
            &[
                vec![0.6, -0.2],
                vec![-0.4, 0.9],
                vec![0.3, 0.5],
                vec![-0.7, -0.1],
            ],
            &[1.0, -1.0, 1.0, -1.0],
        )
        .unwrap()
    }

    #[test]
    fn zero_regularizer_mapping_is_the_gradient() {
        let ds = logistic_instance();
        let sp = SmoothPart::new(&ds, 0.1);
        let metric = DiagonalMetric::new(vec![0.3, 0.7], 0.3, 0.7).unwrap();
        let w = [0.4, -0.2];
        let mapping = gradient_mapping(&w, &metric, &sp, &Regularizer::Zero);
        let grad = sp.full_gradient(&w);
        for (m, g) in mapping.iter().zip(&grad) {
            assert!((m - g).abs() <= 1e-15 * (1.0 + g.abs()));
        }
    }

    #[test]
    fn mapping_reconstruction_identity() {
        let ds = logistic_instance();
        let sp = SmoothPart::new(&ds, 0.05);
        let reg = Regularizer::L1(0.1);
        let metric = DiagonalMetric::new(vec![0.5, 0.2], 0.2, 0.5).unwrap();
        let w = [0.8, -0.6];
        let grad = sp.full_gradient(&w);
        let mapping = gradient_mapping(&w, &metric, &sp, &reg);
        // prox(w - U grad) = w - U G, to machine precision.
        let z: Vec<f64> = w
            .iter()
            .zip(&grad)
            .zip(metric.stepsizes())
            .map(|((wi, gi), ui)| wi - ui * gi)
            .collect();
        let p = scaled_prox(&reg, &metric, &z);
        for j in 0..2 {
            let rebuilt = w[j] - metric.stepsizes()[j] * mapping[j];
            assert!((rebuilt - p[j]).abs() <= 1e-15 * (1.0 + p[j].abs()));
        }
    }

    #[test]
    fn mapping_vanishes_at_analytic_l1_quadratic_fixed_point() {
        // F(w) = (h/2)(w - c)^2 with R = l1 |w|: the minimizer is
        // soft(c, l1/h), derived by subgradient case analysis.
        let (h, c, l1) = (2.0, 1.2, 0.8);
        let inst = TinyInstance::quadratic_1d(h, c, Regularizer::L1(l1));
        let w_star = if c > l1 / h {
            c - l1 / h
        } else if c < -l1 / h {
            c + l1 / h
        } else {
            0.0
        };
        let metric = DiagonalMetric::scalar(0.31, 1).unwrap();
        let grad = inst.full_grad(&[w_star]);
        let mapping = gradient_mapping_with_grad(&[w_star], &grad, &metric, &Regularizer::L1(l1));
        assert!(mapping[0].abs() <= 1e-12);
    }

    #[test]
    fn prox_gradient_matches_analytic_minimizer() {
        let (h, c, l1) = (3.0, -2.0, 0.6);
        let inst = TinyInstance::quadratic_1d(h, c, Regularizer::L1(l1));
        let expect = if c > l1 / h {
            c - l1 / h
        } else if c < -l1 / h {
            c + l1 / h
        } else {
            0.0
        };
        let (w, residual, iters) = prox_gradient_descent(
            |w| inst.full_grad(w),
            h,
            &Regularizer::L1(l1),
            &[0.0],
            1e-13,
            100_000,
        )
        .unwrap();
        assert!((w[0] - expect).abs() <= 1e-10, "{} vs {expect}", w[0]);
        assert!(residual <= 1e-13);
        assert!(iters > 0);
    }

    #[test]
    fn huge_tolerance_returns_immediately() {
        let ds = logistic_instance();
        let sp = SmoothPart::new(&ds, 0.1);
        let reference = compute_reference(&sp, &Regularizer::L1(0.01), 1.0).unwrap();
        assert!(reference.pg_iterations <= 1);
        assert!(reference.residual <= 1.0);
    }

    #[test]
    fn reference_is_deterministic_and_certified() {
        let ds = logistic_instance();
        let sp = SmoothPart::new(&ds, 0.05);
        let reg = Regularizer::L1(0.02);
        let a = compute_reference(&sp, &reg, 1e-12).unwrap();
        let b = compute_reference(&sp, &reg, 1e-12).unwrap();
        assert_eq!(a, b);
        assert!(a.residual <= 1e-12);
        // P_* is a valid lower anchor for a solver run.
        let obj = CompositeObjective::new(sp, reg);
        let config = SolverConfig::new(Algorithm::VmMsrgbb, 8, 1, 6, 0.5);
        let trace = crate::solver::run(config, obj, vec![0.0; 2], Some(a.p_star)).unwrap();
        for r in &trace.records {
            assert!(r.objective >= a.p_star - 1e-11);
        }
    }

    #[test]
    fn rate_constant_hand_value() {
        let inputs = RateInputs {
            modulus: 1.0,
            l_omega: 1.0,
            u_min: 0.1,
            u_max: 0.1,
            m: 100,
            b: 1,
        };
        let est = theoretical_rate(&inputs, RateMode::StronglyConvex).unwrap();
        assert!((est.rho - 0.52).abs() <= 1e-12);
        assert!(est.contraction);
    }

    #[test]
    fn rate_hypothesis_boundary() {
        let inputs = RateInputs {
            modulus: 1.0,
            l_omega: 1.0,
            u_min: 0.125,
            u_max: 0.125,
            m: 100,
            b: 1,
        };
        // 8 * 1 * 0.125 / 1 = 1 exactly: hypothesis fails.
        assert!(theoretical_rate(&inputs, RateMode::StronglyConvex).is_err());
    }

    #[test]
    fn rate_limits_and_monotonicity() {
        let mut inputs = RateInputs {
            modulus: 0.5,
            l_omega: 2.0,
            u_min: 0.02,
            u_max: 0.05,
            m: 1_000_000_000,
            b: 4,
        };
        let est = theoretical_rate(&inputs, RateMode::QuadraticGrowth).unwrap();
        assert!(est.rho < 1e-6, "rho -> 0 as m -> infinity");
        // Monotone decreasing in m.
        inputs.m = 100;
        let r100 = theoretical_rate(&inputs, RateMode::QuadraticGrowth)
            .unwrap()
            .rho;
        inputs.m = 200;
        let r200 = theoretical_rate(&inputs, RateMode::QuadraticGrowth)
            .unwrap()
            .rho;
        assert!(r200 < r100);
        // Monotone increasing in u_max within the valid region.
        let mut hi = inputs;
        hi.u_max = 0.1;
        assert!(
            theoretical_rate(&hi, RateMode::QuadraticGrowth)
                .unwrap()
                .rho
                > r200
        );
    }

    #[test]
    fn inner_rate_constant_arithmetic() {
        // 1 - mu^2 u_min (2/L - u_max) with mu=0.5, L=1, u_min=u_max=0.5.
        let r = inner_loop_rate(0.5, 1.0, 0.5, 0.5);
        assert!((r - (1.0 - 0.25 * 0.5 * 1.5)).abs() < 1e-15);
        assert!(r > 0.0 && r < 1.0);
    }

    #[test]
    fn certifiable_modulus_prefers_explicit_l2() {
        assert_eq!(certifiable_modulus(0.01, &Regularizer::L1(0.1)), 0.01);
        let en = certifiable_modulus(0.01, &Regularizer::ElasticNet { l1: 0.1, l2: 0.05 });
        assert!((en - 0.06).abs() < 1e-15);
    }

    #[test]
    fn bound_check_single_sample_arithmetic() {
        let samples = [BoundSample {
            grad_map_sq: 0.01,
            total_inner_steps: 1,
            u_max: 0.1,
        }];
        let report = convex_bound_check(&samples, 0.5, 1.0);
        assert_eq!(report.empirical_mean, 0.01);
        assert_eq!(report.bound, 3.0);
        assert!(report.pass && report.hypothesis_ok);
        // Hypothesis flag trips when u_max exceeds 1/(3 L).
        let samples = [BoundSample {
            grad_map_sq: 0.01,
            total_inner_steps: 1,
            u_max: 0.5,
        }];
        assert!(!convex_bound_check(&samples, 0.5, 1.0).hypothesis_ok);
    }

    #[test]
    fn variance_check_depth_one_is_zero() {
        let inst = TinyInstance::new(
            vec![vec![0.5, -0.3], vec![-0.2, 0.8], vec![0.9, 0.4]],
            vec![1.0, -1.0, 1.0],
            crate::oracle::LossKind::Logistic,
            0.1,
            Regularizer::Zero,
        );
        let q = vec![1.0 / 3.0; 3];
        let u = vec![0.2, 0.2];
        let report = estimator_variance_check(&inst, 1, 1, &q, &u, &[0.1, -0.2], None).unwrap();
        assert!(report.lhs <= 1e-28, "v_1 = v_0 exactly");
        assert!(report.margin_step >= 0.0);
    }

    #[test]
    fn variance_check_depth_two_bound_holds() {
        let inst = TinyInstance::new(
            vec![vec![0.5, -0.3], vec![-0.2, 0.8], vec![0.9, 0.4]],
            vec![1.0, -1.0, 1.0],
            crate::oracle::LossKind::Logistic,
            0.1,
            Regularizer::L1(0.05),
        );
        let q = vec![1.0 / 3.0; 3];
        let u = vec![0.25, 0.25];
        let report = estimator_variance_check(&inst, 1, 2, &q, &u, &[0.4, -0.5], None).unwrap();
        assert!(report.lhs > 0.0);
        assert!(report.margin_step >= 0.0, "step bound must hold: {report}");
    }
}
