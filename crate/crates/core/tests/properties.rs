//! Property tests for the prox, metric and model layers against their
//! brute-force oracles.

use proptest::prelude::*;

use vmprox_core::dataset::{component_lipschitz, Dataset};
use vmprox_core::metric::{bb_bounds, diagonal_bb_update, MetricConfig, SecantPair};
use vmprox_core::model::{Regularizer, SmoothPart};
use vmprox_core::oracle::{metric_1d_oracle, prox_1d_oracle};
use vmprox_core::prox::{prox_optimality_residual, scaled_prox, DiagonalMetric};
use vmprox_core::vecmath::{dot, inv_metric_norm_sq, norm, sub};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scaled_prox_matches_golden_section_oracle(
        w in -10.0f64..10.0,
        log_u in -3.0f64..3.0,
        log_l1 in -4.0f64..1.0,
        l2 in 0.0f64..2.0,
    ) {
        let u = 10f64.powf(log_u);
        let l1 = 10f64.powf(log_l1);
        let metric = DiagonalMetric::scalar(u, 1).unwrap();
        for reg in [Regularizer::L1(l1), Regularizer::ElasticNet { l1, l2 }] {
            let fast = scaled_prox(&reg, &metric, &[w])[0];
            let slow = prox_1d_oracle(w, u, &reg);
            prop_assert!((fast - slow).abs() <= 1e-8, "{fast} vs {slow}");
        }
    }

    #[test]
    fn prox_is_firmly_nonexpansive_and_residual_vanishes(
        w in prop::collection::vec(-5.0f64..5.0, 1..6),
        shift in prop::collection::vec(-5.0f64..5.0, 1..6),
        l1 in 0.0f64..2.0,
        log_u in -2.0f64..2.0,
    ) {
        let d = w.len().min(shift.len());
        let w = &w[..d];
        let w2: Vec<f64> = (0..d).map(|j| w[j] + shift[j]).collect();
        let u = vec![10f64.powf(log_u); d];
        let metric = DiagonalMetric::new(u.clone(), u[0], u[0]).unwrap();
        let reg = Regularizer::L1(l1);
        let p1 = scaled_prox(&reg, &metric, w);
        let p2 = scaled_prox(&reg, &metric, &w2);
        prop_assert!(
            inv_metric_norm_sq(&sub(&p1, &p2), &u)
                <= inv_metric_norm_sq(&sub(w, &w2), &u) * (1.0 + 1e-12) + 1e-15
        );
        prop_assert!(prox_optimality_residual(&reg, &metric, w, &p1) <= 1e-10);
    }

    #[test]
    fn metric_update_respects_box_and_beats_grid(
        s in prop::collection::vec(-3.0f64..3.0, 4),
        y in prop::collection::vec(-3.0f64..3.0, 4),
        u_prev in prop::collection::vec(0.05f64..2.0, 4),
        omega in 0.05f64..3.0,
        lo in 0.01f64..0.5,
        width in 0.05f64..2.0,
    ) {
        let hi = lo + width;
        let cfg = MetricConfig { omega, m: 1, eps_floor: 1e-12 };
        let pair = SecantPair::new(s.clone(), y.clone());
        let metric = diagonal_bb_update(&pair, &u_prev, &cfg, hi, lo);
        for i in 0..4 {
            let ui = metric.stepsizes()[i];
            prop_assert!(ui >= lo && ui <= hi, "box violated: {ui} not in [{lo}, {hi}]");
            let grid = metric_1d_oracle(s[i], y[i], u_prev[i], omega, lo, hi);
            prop_assert!((ui - grid).abs() <= 1e-6, "coordinate {i}: {ui} vs {grid}");
        }
    }

    #[test]
    fn bb_bounds_are_ordered(
        s in prop::collection::vec(-2.0f64..2.0, 1..8),
        y in prop::collection::vec(-2.0f64..2.0, 1..8),
        m in 1usize..128,
    ) {
        let d = s.len().min(y.len());
        let pair = SecantPair::new(s[..d].to_vec(), y[..d].to_vec());
        if let Ok((a1, a2)) = bb_bounds(&pair, m) {
            prop_assert!(a2 > 0.0 && a2 <= a1 * (1.0 + 1e-15));
        }
    }
}

fn random_dataset(seed: u64, n: usize, d: usize) -> Dataset {
    let mut rng = vmprox_core::sampling::RngStream::new(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| 2.0 * rng.u01() - 1.0).collect())
        .collect();
    let labels: Vec<f64> = (0..n)
        .map(|_| if rng.u01() < 0.5 { -1.0 } else { 1.0 })
        .collect();
    Dataset::from_dense(&rows, &labels).unwrap()
}

/// Smoothness and convexity of the components: over random pairs,
/// `||grad f_i(w) - grad f_i(w')|| <= L_i ||w - w'||` and the cocoercivity
/// inequality `(grad diff)^T (w - w') >= ||grad diff||^2 / L_i`.
#[test]
fn component_gradients_are_smooth_and_cocoercive() {
    let ds = random_dataset(99, 6, 3);
    let lambda2 = 0.05;
    let sp = SmoothPart::new(&ds, lambda2);
    let profile = component_lipschitz(&ds, lambda2).unwrap();
    let mut rng = vmprox_core::sampling::RngStream::new(100);
    for _ in 0..1000 {
        let i = rng.index(ds.n());
        let w: Vec<f64> = (0..3).map(|_| 4.0 * rng.u01() - 2.0).collect();
        let w2: Vec<f64> = (0..3).map(|_| 4.0 * rng.u01() - 2.0).collect();
        let g = sp.component_grad(i, &w);
        let g2 = sp.component_grad(i, &w2);
        let dg = sub(&g, &g2);
        let dw = sub(&w, &w2);
        let li = profile.per_component()[i];
        assert!(norm(&dg) <= li * norm(&dw) * (1.0 + 1e-12) + 1e-15);
        assert!(dot(&dg, &dw) >= dot(&dg, &dg) / li - 1e-12);
    }
}
