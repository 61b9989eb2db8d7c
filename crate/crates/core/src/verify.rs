//! Self-contained re-certification suite: runs the oracle checks on the
//! current platform and reports one pass/fail line per invariant. Driven by
//! `vmprox verify`.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::component_lipschitz;
use crate::diagnostics::{estimator_variance_check, theoretical_rate, RateInputs, RateMode};
use crate::metric::{bb_bounds, diagonal_bb_update, MetricConfig, SecantPair};
use crate::model::{Regularizer, SmoothPart};
use crate::oracle::{
    enumerate_expectation, finite_diff_grad, metric_1d_oracle, monte_carlo_moments, prox_1d_oracle,
    EstimatorKind, TinyInstance,
};
use crate::prox::{scaled_prox, DiagonalMetric};
use crate::sampling::{build_distribution, RngStream, Scheme};
use crate::vecmath::{inv_metric_norm_sq, norm, sub};

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Deliberate corruption hooks for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    None,
    /// Perturbs the prox inside the nonexpansiveness check.
    ProxShift,
}

fn random_l1_instance(rng: &mut RngStream) -> (Vec<f64>, DiagonalMetric, Regularizer) {
    let d = 1 + rng.index(5);
    let u: Vec<f64> = (0..d).map(|_| 0.05 + rng.u01() * 2.0).collect();
    let metric = DiagonalMetric::new(u, 0.05, 2.05).unwrap();
    let w: Vec<f64> = (0..d).map(|_| 4.0 * rng.u01() - 2.0).collect();
    (w, metric, Regularizer::L1(0.1 + rng.u01()))
}

fn check_prox_oracle(rng: &mut RngStream) -> CheckResult {
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let u = 10f64.powf(3.0 * (2.0 * rng.u01() - 1.0));
        let l1 = 10f64.powf(2.0 * rng.u01() - 3.0);
        let w = 6.0 * rng.u01() - 3.0;
        let reg = Regularizer::L1(l1);
        let m = DiagonalMetric::scalar(u, 1).unwrap();
        let fast = scaled_prox(&reg, &m, &[w])[0];
        let slow = prox_1d_oracle(w, u, &reg);
        worst = worst.max((fast - slow).abs());
    }
    CheckResult {
        name: "prox 1-d oracle equivalence",
        pass: worst <= 1e-8,
        detail: format!("max |closed form - golden section| = {worst:.2e}"),
    }
}

fn check_metric_oracle(rng: &mut RngStream) -> CheckResult {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = 8;
        let s: Vec<f64> = (0..d).map(|_| 4.0 * rng.u01() - 2.0).collect();
        let y: Vec<f64> = (0..d).map(|_| 4.0 * rng.u01() - 2.0).collect();
        let u_prev: Vec<f64> = (0..d).map(|_| 0.05 + 2.0 * rng.u01()).collect();
        let omega = 0.1 + 2.0 * rng.u01();
        let lo = 0.01 + 0.2 * rng.u01();
        let hi = lo + 0.1 + 2.0 * rng.u01();
        let cfg = MetricConfig {
            omega,
            m: 1,
            eps_floor: 1e-12,
        };
        let pair = SecantPair::new(s.clone(), y.clone());
        let metric = diagonal_bb_update(&pair, &u_prev, &cfg, hi, lo);
        for i in 0..d {
            let grid = metric_1d_oracle(s[i], y[i], u_prev[i], omega, lo, hi);
            worst = worst.max((metric.stepsizes()[i] - grid).abs());
        }
    }
    CheckResult {
        name: "metric oracle equivalence",
        pass: worst <= 1e-6,
        detail: format!("max |closed form - grid search| = {worst:.2e}"),
    }
}

fn check_gradient_fd(rng: &mut RngStream) -> CheckResult {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = 2 + rng.index(4);
        let d = 1 + rng.index(4);
        let lambda2 = 0.1 * rng.u01();
        let inst = TinyInstance::random_logistic(n, d, lambda2, Regularizer::Zero, rng);
        let ds = inst.to_dataset();
        let sp = SmoothPart::new(&ds, lambda2);
        let w: Vec<f64> = (0..ds.dim()).map(|_| 2.0 * rng.u01() - 1.0).collect();
        let i = rng.index(n);
        let analytic = sp.component_grad(i, &w);
        let fd = finite_diff_grad(|x| sp.component_value(i, x), &w, 1e-5);
        let rel = norm(&sub(&fd, &analytic)) / norm(&analytic).max(1e-8);
        worst = worst.max(rel);
    }
    CheckResult {
        name: "gradient finite difference",
        pass: worst <= 1e-6,
        detail: format!("max relative error = {worst:.2e}"),
    }
}

fn check_nonexpansiveness(rng: &mut RngStream, fault: FaultInjection) -> CheckResult {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let (w, metric, reg) = random_l1_instance(rng);
        let d = w.len();
        let w2: Vec<f64> = (0..d).map(|_| 4.0 * rng.u01() - 2.0).collect();
        let mut p1 = scaled_prox(&reg, &metric, &w);
        let p2 = scaled_prox(&reg, &metric, &w2);
        if fault == FaultInjection::ProxShift {
            p1[0] += 0.05 * (1.0 + p1[0].abs());
        }
        let dp = sub(&p1, &p2);
        let dw = sub(&w, &w2);
        let u = metric.stepsizes();
        let violation = inv_metric_norm_sq(&dp, u) - inv_metric_norm_sq(&dw, u);
        worst = worst.max(violation);
    }
    CheckResult {
        name: "firm nonexpansiveness",
        pass: worst <= 1e-12,
        detail: format!("max ||dp||^2 - ||dw||^2 in U^-1 norm = {worst:.2e}"),
    }
}

fn check_three_point(rng: &mut RngStream) -> CheckResult {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..300 {
        let (w, metric, reg) = random_l1_instance(rng);
        let d = w.len();
        let z: Vec<f64> = (0..d).map(|_| 4.0 * rng.u01() - 2.0).collect();
        let wp = scaled_prox(&reg, &metric, &w);
        let u = metric.stepsizes();
        let lhs = reg.value(&wp) + 0.5 * inv_metric_norm_sq(&sub(&wp, &w), u);
        let rhs = reg.value(&z) + 0.5 * inv_metric_norm_sq(&sub(&z, &w), u)
            - 0.5 * inv_metric_norm_sq(&sub(&wp, &z), u);
        worst = worst.max(lhs - rhs);
    }
    CheckResult {
        name: "three point property",
        pass: worst <= 1e-10,
        detail: format!("max lhs - rhs = {worst:.2e}"),
    }
}

fn check_total_expectation(rng: &mut RngStream) -> CheckResult {
    let mut worst = 0.0f64;
    for scheme in [Scheme::Uniform, Scheme::Importance] {
        let inst = TinyInstance::random_logistic(3, 2, 0.05, Regularizer::L1(0.02), rng);
        let ds = inst.to_dataset();
        let profile = component_lipschitz(&ds, 0.05).unwrap();
        let dist = build_distribution(&profile, scheme);
        let u = alloc::vec![0.3; 2];
        let w0 = alloc::vec![0.2, -0.4];
        for kind in [EstimatorKind::Recursive, EstimatorKind::Svrg] {
            let m = enumerate_expectation(&inst, kind, 2, 1, dist.q(), &u, &w0).unwrap();
            for (a, b) in m.mean_v.iter().zip(&m.mean_grad) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    CheckResult {
        name: "estimator total expectation",
        pass: worst <= 1e-12,
        detail: format!("max |E[v_t] - E[grad F(w_t)]| = {worst:.2e}"),
    }
}

fn check_variance_bound(rng: &mut RngStream) -> CheckResult {
    let mut worst_margin = f64::INFINITY;
    for b in [1usize, 2] {
        let inst = TinyInstance::random_logistic(3, 2, 0.1, Regularizer::L1(0.03), rng);
        let q = alloc::vec![1.0 / 3.0; 3];
        let u = alloc::vec![0.25; 2];
        let report = estimator_variance_check(&inst, b, 2, &q, &u, &[0.3, -0.2], None).unwrap();
        worst_margin = worst_margin.min(report.margin_step);
    }
    CheckResult {
        name: "estimator variance bound",
        pass: worst_margin >= 0.0,
        detail: format!("min margin = {worst_margin:.2e}"),
    }
}

fn check_monte_carlo_agreement(rng: &mut RngStream) -> CheckResult {
    let inst = TinyInstance::random_logistic(3, 2, 0.05, Regularizer::L1(0.02), rng);
    let q = alloc::vec![1.0 / 3.0; 3];
    let u = alloc::vec![0.3; 2];
    let w0 = alloc::vec![0.25, -0.15];
    let exact = enumerate_expectation(&inst, EstimatorKind::Recursive, 2, 1, &q, &u, &w0).unwrap();
    let mc = monte_carlo_moments(
        &inst,
        EstimatorKind::Recursive,
        2,
        1,
        &q,
        &u,
        &w0,
        100_000,
        rng,
    );
    let mut worst_sigmas = 0.0f64;
    for j in 0..2 {
        let sigmas = (mc.mean_v[j] - exact.mean_v[j]).abs() / mc.se_v[j].max(1e-12);
        worst_sigmas = worst_sigmas.max(sigmas);
    }
    let sigmas = (mc.mean_dev_sq - exact.mean_dev_sq).abs() / mc.se_dev_sq.max(1e-12);
    worst_sigmas = worst_sigmas.max(sigmas);
    CheckResult {
        name: "enumeration monte carlo agreement",
        pass: worst_sigmas <= 4.0,
        detail: format!("max deviation = {worst_sigmas:.2} sigma"),
    }
}

fn check_sampling_identity(rng: &mut RngStream) -> CheckResult {
    // E[grad f_i(w) / (n q_i)] over i ~ q equals grad F(w), by enumeration.
    let mut worst = 0.0f64;
    for scheme in [Scheme::Uniform, Scheme::Importance] {
        let n = 5;
        let inst = TinyInstance::random_logistic(n, 3, 0.05, Regularizer::Zero, rng);
        let ds = inst.to_dataset();
        let sp = SmoothPart::new(&ds, 0.05);
        let profile = component_lipschitz(&ds, 0.05).unwrap();
        let dist = build_distribution(&profile, scheme);
        let w: Vec<f64> = (0..3).map(|_| rng.u01() - 0.5).collect();
        let full = sp.full_gradient(&w);
        let mut mean = alloc::vec![0.0; 3];
        for i in 0..n {
            let g = sp.component_grad(i, &w);
            for (m, gj) in mean.iter_mut().zip(&g) {
                *m += dist.q()[i] * gj / (n as f64 * dist.q()[i]);
            }
        }
        for (a, b) in mean.iter().zip(&full) {
            worst = worst.max((a - b).abs());
        }
    }
    CheckResult {
        name: "sampling expectation identity",
        pass: worst <= 1e-14,
        detail: format!("max deviation = {worst:.2e}"),
    }
}

fn check_bb_ordering(rng: &mut RngStream) -> CheckResult {
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0usize;
    while checked < 500 {
        let d = 1 + rng.index(8);
        let s: Vec<f64> = (0..d).map(|_| 2.0 * rng.u01() - 1.0).collect();
        let y: Vec<f64> = (0..d).map(|_| 2.0 * rng.u01() - 1.0).collect();
        let pair = SecantPair::new(s, y);
        let m = 1 + rng.index(64);
        if let Ok((a1, a2)) = bb_bounds(&pair, m) {
            worst = worst.max(a2 - a1);
            checked += 1;
        }
    }
    CheckResult {
        name: "bb bound ordering",
        pass: worst <= 1e-15,
        detail: format!("max alpha2 - alpha1 = {worst:.2e}"),
    }
}

fn check_rate_constant() -> CheckResult {
    let inputs = RateInputs {
        modulus: 1.0,
        l_omega: 1.0,
        u_min: 0.1,
        u_max: 0.1,
        m: 100,
        b: 1,
    };
    let value = theoretical_rate(&inputs, RateMode::StronglyConvex)
        .map(|e| e.rho)
        .unwrap_or(f64::NAN);
    CheckResult {
        name: "rate constant hand value",
        pass: (value - 0.52).abs() <= 1e-12,
        detail: format!("rho = {value}"),
    }
}

/// Runs the whole suite with a deterministic seed. The fault hook corrupts
/// the prox used by the nonexpansiveness check, for exercising failures.
pub fn run_all(seed: u64, fault: FaultInjection) -> Vec<CheckResult> {
    let mut rng = RngStream::new(seed);
    alloc::vec![
        check_prox_oracle(&mut rng),
        check_metric_oracle(&mut rng),
        check_gradient_fd(&mut rng),
        check_nonexpansiveness(&mut rng, fault),
        check_three_point(&mut rng),
        check_total_expectation(&mut rng),
        check_variance_bound(&mut rng),
        check_monte_carlo_agreement(&mut rng),
        check_sampling_identity(&mut rng),
        check_bb_ordering(&mut rng),
        check_rate_constant(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_suite_passes() {
        let results = run_all(7, FaultInjection::None);
        for r in &results {
            assert!(r.pass, "{}: {}", r.name, r.detail);
        }
        assert_eq!(results.len(), 11);
    }

    #[test]
    fn fault_injection_names_the_broken_invariant() {
        let results = run_all(7, FaultInjection::ProxShift);
        let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
        assert_eq!(failed, ["firm nonexpansiveness"]);
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_all(3, FaultInjection::None);
        let b = run_all(3, FaultInjection::None);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.detail, y.detail);
            assert_eq!(x.pass, y.pass);
        }
    }
}
