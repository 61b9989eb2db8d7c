//! Exact-enumeration checks of the estimator laws on tiny instances: the
//! total-expectation identity and the variance bounds, under both sampling
//! schemes.

use vmprox_core::dataset::component_lipschitz;
use vmprox_core::diagnostics::estimator_variance_check;
use vmprox_core::model::{Regularizer, SmoothPart};
use vmprox_core::oracle::{enumerate_expectation, EstimatorKind, LossKind, TinyInstance};
use vmprox_core::sampling::{build_distribution, Scheme};

fn three_point_instance(reg: Regularizer) -> TinyInstance {
    TinyInstance::new(
        vec![vec![0.6, -0.3], vec![-0.4, 0.8], vec![0.2, 0.5]],
        vec![1.0, -1.0, 1.0],
        LossKind::Logistic,
        0.1,
        reg,
    )
}

fn q_for(inst: &TinyInstance, scheme: Scheme) -> Vec<f64> {
    let ds = inst.to_dataset();
    let profile = component_lipschitz(&ds, inst.lambda2()).unwrap();
    build_distribution(&profile, scheme).q().to_vec()
}

#[test]
fn total_expectation_identity_both_schemes_and_estimators() {
    let inst = three_point_instance(Regularizer::L1(0.02));
    let u = vec![0.3, 0.3];
    let w0 = vec![0.25, -0.4];
    for scheme in [Scheme::Uniform, Scheme::Importance] {
        let q = q_for(&inst, scheme);
        for kind in [EstimatorKind::Recursive, EstimatorKind::Svrg] {
            for depth in 1..=2 {
                let m = enumerate_expectation(&inst, kind, depth, 1, &q, &u, &w0).unwrap();
                for (a, b) in m.mean_v.iter().zip(&m.mean_grad) {
                    assert!(
                        (a - b).abs() <= 1e-12,
                        "{kind:?} depth {depth} {scheme:?}: E[v] != E[grad F]"
                    );
                }
            }
        }
    }
}

#[test]
fn recursive_variance_bound_exact_enumeration() {
    // E||v_t - grad F(w_t)||^2 <= (L_Omega^2 / b) E||w_t - w_{t-1}||^2 at
    // t = 2 on n <= 4 instances, b in {1, 2}, both schemes.
    for scheme in [Scheme::Uniform, Scheme::Importance] {
        for b in [1usize, 2] {
            let inst = TinyInstance::new(
                vec![
                    vec![0.6, -0.3],
                    vec![-0.4, 0.8],
                    vec![0.2, 0.5],
                    vec![-0.7, 0.1],
                ],
                vec![1.0, -1.0, 1.0, -1.0],
                LossKind::Logistic,
                0.05,
                Regularizer::L1(0.03),
            );
            let q = q_for(&inst, scheme);
            let u = vec![0.25, 0.25];
            let report = estimator_variance_check(&inst, b, 2, &q, &u, &[0.4, -0.5], None).unwrap();
            assert!(
                report.margin_step >= 0.0,
                "{scheme:?} b={b}: bound violated, {report}"
            );
            assert!(report.lhs > 0.0, "depth-2 deviation should be nonzero");
        }
    }
}

#[test]
fn objective_gap_variance_bound_with_reference() {
    // The looser objective-gap bound needs P_*; a tight proximal-gradient
    // solve on the tiny instance provides it.
    let inst = three_point_instance(Regularizer::L1(0.02));
    let ds = inst.to_dataset();
    let sp = SmoothPart::new(&ds, inst.lambda2());
    let reference = vmprox_core::diagnostics::compute_reference(&sp, &inst.reg, 1e-12).unwrap();
    let q = q_for(&inst, Scheme::Uniform);
    let u = vec![0.25, 0.25];
    let report =
        estimator_variance_check(&inst, 1, 2, &q, &u, &[0.4, -0.5], Some(reference.p_star))
            .unwrap();
    assert!(report.rhs_gap_bound.is_some());
    assert!(
        report.margin_gap.unwrap() >= 0.0,
        "objective-gap bound violated: {report}"
    );
}

#[test]
fn depth_one_paths_have_exact_zero_deviation() {
    let inst = three_point_instance(Regularizer::Zero);
    let q = q_for(&inst, Scheme::Uniform);
    let u = vec![0.3, 0.3];
    let m =
        enumerate_expectation(&inst, EstimatorKind::Recursive, 1, 2, &q, &u, &[0.2, -0.1]).unwrap();
    assert!(m.mean_dev_sq <= 1e-28);
    assert_eq!(m.mean_step_sq, 0.0);
}
