//! Independent brute-force verifiers backing the test suite and the
//! `vmprox verify` subcommand: central finite differences, golden-section
//! 1-D prox minimization, staged grid search for the metric subproblem,
//! exact expectation enumeration over mini-batch sample paths, and tiny
//! analytic problem generators.
//!
//! Everything here evaluates objectives and gradients through its own dense
//! code paths so the checks stay independent of the implementations they
//! certify.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

use crate::model::Regularizer;
use crate::sampling::RngStream;

/// Central finite differences `(f(w + h e_i) - f(w - h e_i)) / (2h)`.
pub fn finite_diff_grad<F: Fn(&[f64]) -> f64>(f: F, w: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0);
    let mut probe = w.to_vec();
    let mut grad = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        probe[i] = w[i] + h;
        let fp = f(&probe);
        probe[i] = w[i] - h;
        let fm = f(&probe);
        probe[i] = w[i];
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // The floor keeps the stop condition reachable when the bracket sits at
    // magnitudes where the requested tolerance is below one ULP.
    for _ in 0..500 {
        if b - a <= tol.max(1e-14 * a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Brute-force minimizer of `(y - w)^2 / (2u) + R(y)` in one dimension.
///
/// Golden-section search over `[w - 10(1+|w|), w + 10(1+|w|)]`, then an exact
/// polish: the stationary point of each smooth half-line piece (the pieces
/// are quadratic for every supported regularizer) and the kink `y = 0` are
/// evaluated as candidates, and the best wins.
pub fn prox_1d_oracle(w: f64, u: f64, reg: &Regularizer) -> f64 {
    assert!(u > 0.0);
    let obj = |y: f64| (y - w) * (y - w) / (2.0 * u) + reg.value_1d(y);
    let range = 10.0 * (1.0 + w.abs());
    let golden = golden_min(&obj, w - range, w + range, 1e-11);
    let l1 = reg.l1_weight();
    let l2 = reg.l2_weight();
    // Stationary points of the y > 0 and y < 0 pieces: solve
    // (y - w)/u + l2*y +/- l1 = 0. Together with the kink these are the only
    // possible minimizers of the piecewise quadratic.
    let denom = 1.0 / u + l2;
    let candidates = [(w / u - l1) / denom, (w / u + l1) / denom, 0.0];
    let mut best = 0.0;
    let mut best_val = obj(0.0);
    for (idx, &cand) in candidates.iter().enumerate() {
        let sign_ok = match idx {
            0 => cand > 0.0,
            1 => cand < 0.0,
            _ => true,
        };
        if sign_ok {
            let val = obj(cand);
            if val < best_val {
                best = cand;
                best_val = val;
            }
        }
    }
    // The golden-section point only wins when it beats every analytic
    // candidate by more than objective rounding noise, which would signal an
    // uncovered regularizer piece.
    let golden_val = obj(golden);
    if golden_val + 1e-12 * (1.0 + golden_val.abs()) < best_val {
        golden
    } else {
        best
    }
}

/// Brute-force minimizer of `(s - v*y)^2 + omega*(v - u_prev)^2` over
/// `[lo, hi]` by three stages of dense grid search.
pub fn metric_1d_oracle(s: f64, y: f64, u_prev: f64, omega: f64, lo: f64, hi: f64) -> f64 {
    assert!(lo <= hi && omega > 0.0);
    let obj = |v: f64| {
        let r = s - v * y;
        let d = v - u_prev;
        r * r + omega * d * d
    };
    let points = 2000usize;
    let (mut a, mut b) = (lo, hi);
    let mut best = lo;
    for _ in 0..3 {
        let step = (b - a) / points as f64;
        let mut best_val = f64::INFINITY;
        for k in 0..=points {
            let v = a + step * k as f64;
            let val = obj(v);
            if val < best_val {
                best_val = val;
                best = v;
            }
        }
        a = (best - step).max(lo);
        b = (best + step).min(hi);
        if step == 0.0 {
            break;
        }
    }
    best
}

/// Which gradient estimator the enumeration models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Recursive: `v_t = (1/b) sum [ (grad f_i(w_t) - grad f_i(w_{t-1})) / (q_i n) ] + v_{t-1}`.
    Recursive,
    /// Anchor-based: `v_t = (1/b) sum [ (grad f_i(w_t) - grad f_i(w_anchor)) / (q_i n) ] + grad F(w_anchor)`.
    Svrg,
}

/// Loss families supported by tiny instances. Squared loss exists only here,
/// for analytic tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Logistic,
    Squared,
}

/// Explicit dense instance small enough for exhaustive sample-path
/// enumeration.
#[derive(Debug, Clone)]
pub struct TinyInstance {
    rows: Vec<Vec<f64>>,
    labels: Vec<f64>,
    loss: LossKind,
    lambda2: f64,
    pub reg: Regularizer,
}

impl TinyInstance {
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<f64>,
        loss: LossKind,
        lambda2: f64,
        reg: Regularizer,
    ) -> Self {
        assert!(!rows.is_empty() && rows.len() <= 8, "n must be in 1..=8");
        assert!(rows.iter().all(|r| r.len() == rows[0].len()));
        assert!(
            rows[0].len() >= 1 && rows[0].len() <= 4,
            "d must be in 1..=4"
        );
        assert_eq!(rows.len(), labels.len());
        assert!(lambda2 >= 0.0);
        TinyInstance {
            rows,
            labels,
            loss,
            lambda2,
            reg,
        }
    }

    /// 1-D squared-loss instance with `F(w) = (h/2)(w - c)^2`.
    pub fn quadratic_1d(h: f64, c: f64, reg: Regularizer) -> Self {
        assert!(h > 0.0);
        TinyInstance::new(
            alloc::vec![alloc::vec![h.sqrt()]],
            alloc::vec![h.sqrt() * c],
            LossKind::Squared,
            0.0,
            reg,
        )
    }

    /// Random logistic instance with entries in [-1, 1] and labels +/-1.
    pub fn random_logistic(
        n: usize,
        d: usize,
        lambda2: f64,
        reg: Regularizer,
        rng: &mut RngStream,
    ) -> Self {
        let rows = (0..n)
            .map(|_| (0..d).map(|_| 2.0 * rng.u01() - 1.0).collect())
            .collect();
        let labels = (0..n)
            .map(|_| if rng.u01() < 0.5 { -1.0 } else { 1.0 })
            .collect();
        TinyInstance::new(rows, labels, LossKind::Logistic, lambda2, reg)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Per-component smoothness constants for this loss kind.
    pub fn lipschitz(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                let norm_sq: f64 = r.iter().map(|v| v * v).sum();
                match self.loss {
                    LossKind::Logistic => norm_sq / 4.0 + self.lambda2,
                    LossKind::Squared => norm_sq + self.lambda2,
                }
            })
            .collect()
    }

    /// Sparse [`crate::Dataset`] view of this instance (for driving the real
    /// model and solver against oracle results; logistic instances only make
    /// sense there).
    pub fn to_dataset(&self) -> crate::dataset::Dataset {
        crate::dataset::Dataset::from_dense(&self.rows, &self.labels).unwrap()
    }

    pub fn component_value(&self, i: usize, w: &[f64]) -> f64 {
        let dot: f64 = self.rows[i].iter().zip(w).map(|(a, x)| a * x).sum();
        let ridge = 0.5 * self.lambda2 * w.iter().map(|x| x * x).sum::<f64>();
        match self.loss {
            LossKind::Logistic => {
                let z = self.labels[i] * dot;
                let loss = if z >= 0.0 {
                    (-z).exp().ln_1p()
                } else {
                    -z + z.exp().ln_1p()
                };
                loss + ridge
            }
            LossKind::Squared => {
                let r = self.labels[i] - dot;
                0.5 * r * r + ridge
            }
        }
    }

    pub fn component_grad(&self, i: usize, w: &[f64]) -> Vec<f64> {
        let dot: f64 = self.rows[i].iter().zip(w).map(|(a, x)| a * x).sum();
        let coeff = match self.loss {
            LossKind::Logistic => {
                let z = self.labels[i] * dot;
                let sig = if z >= 0.0 {
                    let e = (-z).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + z.exp())
                };
                -self.labels[i] * sig
            }
            LossKind::Squared => dot - self.labels[i],
        };
        self.rows[i]
            .iter()
            .zip(w)
            .map(|(a, x)| coeff * a + self.lambda2 * x)
            .collect()
    }

    pub fn smooth_value(&self, w: &[f64]) -> f64 {
        (0..self.n())
            .map(|i| self.component_value(i, w))
            .sum::<f64>()
            / self.n() as f64
    }

    pub fn full_grad(&self, w: &[f64]) -> Vec<f64> {
        let mut g = alloc::vec![0.0; self.dim()];
        for i in 0..self.n() {
            for (gj, cj) in g.iter_mut().zip(self.component_grad(i, w)) {
                *gj += cj / self.n() as f64;
            }
        }
        g
    }

    pub fn objective(&self, w: &[f64]) -> f64 {
        self.smooth_value(w) + self.reg.value(w)
    }

    fn prox_step(&self, w: &[f64], v: &[f64], u: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(v)
            .zip(u)
            .map(|((&wi, &vi), &ui)| prox_1d_oracle(wi - ui * vi, ui, &self.reg))
            .collect()
    }
}

/// Exact path budget for [`enumerate_expectation`].
pub const PATH_BUDGET: u128 = 1_000_000;

/// Raised when `n^(b*t)` exceeds the enumeration budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathExplosion {
    pub paths: u128,
}

impl fmt::Display for PathExplosion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "enumeration needs {} paths (budget {})",
            self.paths, PATH_BUDGET
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PathExplosion {}

/// Exact moments of the estimator state after `depth` inner steps, weighted
/// over every mini-batch sequence with path probability `prod q_i`.
#[derive(Debug, Clone)]
pub struct Moments {
    /// `E[v_t]`.
    pub mean_v: Vec<f64>,
    /// `E[grad F(w_t)]`.
    pub mean_grad: Vec<f64>,
    /// `E[||v_t - grad F(w_t)||^2]`.
    pub mean_dev_sq: f64,
    /// `E[||w_t - w_{t-1}||^2]`.
    pub mean_step_sq: f64,
    /// `E[||w_{t+1} - w_t||^2_{U^{-1}}]`.
    pub mean_next_step_sq_inv_u: f64,
    /// `E[P(w_t)]`.
    pub mean_obj: f64,
    /// `E[P(w_{t-1})]`.
    pub mean_obj_prev: f64,
    /// Number of enumerated paths.
    pub paths: usize,
}

struct EnumCtx<'a> {
    inst: &'a TinyInstance,
    kind: EstimatorKind,
    depth: usize,
    b: usize,
    q: &'a [f64],
    u: &'a [f64],
    anchor_w: Vec<f64>,
    anchor_v: Vec<f64>,
    acc: Moments,
}

impl EnumCtx<'_> {
    fn estimator(&self, w_now: &[f64], w_lag: &[f64], v_now: &[f64], batch: &[usize]) -> Vec<f64> {
        let n = self.inst.n() as f64;
        let (base, w_ref): (&[f64], &[f64]) = match self.kind {
            EstimatorKind::Recursive => (v_now, w_lag),
            EstimatorKind::Svrg => (&self.anchor_v, &self.anchor_w),
        };
        let mut v = base.to_vec();
        for &i in batch {
            let gi_now = self.inst.component_grad(i, w_now);
            let gi_ref = self.inst.component_grad(i, w_ref);
            let scale = 1.0 / (self.b as f64 * self.q[i] * n);
            for ((vj, gn), gr) in v.iter_mut().zip(gi_now).zip(gi_ref) {
                *vj += scale * (gn - gr);
            }
        }
        v
    }

    fn walk(&mut self, w_lag: &[f64], w_now: &[f64], v_now: &[f64], prob: f64, step: usize) {
        let n = self.inst.n();
        let tuples = n.pow(self.b as u32);
        let mut batch = alloc::vec![0usize; self.b];
        for code in 0..tuples {
            let mut c = code;
            let mut p_batch = prob;
            for slot in batch.iter_mut() {
                *slot = c % n;
                c /= n;
                p_batch *= self.q[*slot];
            }
            let v_new = self.estimator(w_now, w_lag, v_now, &batch);
            let w_next = self.inst.prox_step(w_now, &v_new, self.u);
            if step == self.depth {
                let grad = self.inst.full_grad(w_now);
                for (m, vj) in self.acc.mean_v.iter_mut().zip(&v_new) {
                    *m += p_batch * vj;
                }
                for (m, gj) in self.acc.mean_grad.iter_mut().zip(&grad) {
                    *m += p_batch * gj;
                }
                let dev: f64 = v_new
                    .iter()
                    .zip(&grad)
                    .map(|(v, g)| (v - g) * (v - g))
                    .sum();
                self.acc.mean_dev_sq += p_batch * dev;
                let step_sq: f64 = w_now
                    .iter()
                    .zip(w_lag)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                self.acc.mean_step_sq += p_batch * step_sq;
                let next_sq: f64 = w_next
                    .iter()
                    .zip(w_now)
                    .zip(self.u)
                    .map(|((a, b), ui)| (a - b) * (a - b) / ui)
                    .sum();
                self.acc.mean_next_step_sq_inv_u += p_batch * next_sq;
                self.acc.mean_obj += p_batch * self.inst.objective(w_now);
                self.acc.mean_obj_prev += p_batch * self.inst.objective(w_lag);
                self.acc.paths += 1;
            } else {
                self.walk(w_now, &w_next, &v_new, p_batch, step + 1);
            }
        }
    }
}

/// Exact moments after `depth` estimator steps starting from `w0` with
/// `v_0 = grad F(w0)`, enumerating every ordered mini-batch sequence.
pub fn enumerate_expectation(
    inst: &TinyInstance,
    kind: EstimatorKind,
    depth: usize,
    b: usize,
    q: &[f64],
    u: &[f64],
    w0: &[f64],
) -> Result<Moments, PathExplosion> {
    assert!(depth >= 1 && b >= 1);
    assert_eq!(q.len(), inst.n());
    assert_eq!(u.len(), inst.dim());
    assert!((q.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    let paths = (inst.n() as u128).pow((b * depth) as u32);
    if paths > PATH_BUDGET {
        return Err(PathExplosion { paths });
    }
    let v0 = inst.full_grad(w0);
    let acc = Moments {
        mean_v: alloc::vec![0.0; inst.dim()],
        mean_grad: alloc::vec![0.0; inst.dim()],
        mean_dev_sq: 0.0,
        mean_step_sq: 0.0,
        mean_next_step_sq_inv_u: 0.0,
        mean_obj: 0.0,
        mean_obj_prev: 0.0,
        paths: 0,
    };
    let mut ctx = EnumCtx {
        inst,
        kind,
        depth,
        b,
        q,
        u,
        anchor_w: w0.to_vec(),
        anchor_v: v0.clone(),
        acc,
    };
    ctx.walk(w0, w0, &v0, 1.0, 1);
    Ok(ctx.acc)
}

/// Conditional mean of one estimator step from an arbitrary state:
/// `E[v_t | w_t = w_now, reference state]`, enumerating all batches.
///
/// For the recursive estimator, `w_ref`/`v_carry` are `w_{t-1}`/`v_{t-1}`;
/// for the anchor-based one they are the anchor and its full gradient. The
/// batch arithmetic is the same once the reference state is fixed.
pub fn enumerate_single_step(
    inst: &TinyInstance,
    w_now: &[f64],
    w_ref: &[f64],
    v_carry: &[f64],
    b: usize,
    q: &[f64],
) -> Vec<f64> {
    let n = inst.n();
    let mut mean = alloc::vec![0.0; inst.dim()];
    let tuples = n.pow(b as u32);
    let mut batch = alloc::vec![0usize; b];
    for code in 0..tuples {
        let mut c = code;
        let mut p = 1.0;
        for slot in batch.iter_mut() {
            *slot = c % n;
            c /= n;
            p *= q[*slot];
        }
        let mut v = v_carry.to_vec();
        for &i in &batch {
            let gi_now = inst.component_grad(i, w_now);
            let gi_ref = inst.component_grad(i, w_ref);
            let scale = 1.0 / (b as f64 * q[i] * n as f64);
            for ((vj, gn), gr) in v.iter_mut().zip(gi_now).zip(gi_ref) {
                *vj += scale * (gn - gr);
            }
        }
        for (m, vj) in mean.iter_mut().zip(&v) {
            *m += p * vj;
        }
    }
    mean
}

/// Monte-Carlo estimate of the same moments as [`enumerate_expectation`],
/// with standard errors, using CDF-inversion sampling on `q`.
#[derive(Debug, Clone)]
pub struct McMoments {
    pub mean_v: Vec<f64>,
    pub se_v: Vec<f64>,
    pub mean_dev_sq: f64,
    pub se_dev_sq: f64,
    pub samples: usize,
}

pub fn monte_carlo_moments(
    inst: &TinyInstance,
    kind: EstimatorKind,
    depth: usize,
    b: usize,
    q: &[f64],
    u: &[f64],
    w0: &[f64],
    samples: usize,
    rng: &mut RngStream,
) -> McMoments {
    let d = inst.dim();
    let v0 = inst.full_grad(w0);
    let mut sum_v = alloc::vec![0.0; d];
    let mut sum_v_sq = alloc::vec![0.0; d];
    let mut sum_dev = 0.0;
    let mut sum_dev_sq = 0.0;
    let draw = |rng: &mut RngStream| -> usize {
        let r = rng.u01();
        let mut acc = 0.0;
        for (i, &p) in q.iter().enumerate() {
            acc += p;
            if r < acc {
                return i;
            }
        }
        q.len() - 1
    };
    let ctx = EnumCtx {
        inst,
        kind,
        depth,
        b,
        q,
        u,
        anchor_w: w0.to_vec(),
        anchor_v: v0.clone(),
        acc: Moments {
            mean_v: alloc::vec![],
            mean_grad: alloc::vec![],
            mean_dev_sq: 0.0,
            mean_step_sq: 0.0,
            mean_next_step_sq_inv_u: 0.0,
            mean_obj: 0.0,
            mean_obj_prev: 0.0,
            paths: 0,
        },
    };
    for _ in 0..samples {
        let mut w_lag = w0.to_vec();
        let mut w_now = w0.to_vec();
        let mut v = v0.clone();
        for step in 1..=depth {
            let batch: Vec<usize> = (0..b).map(|_| draw(rng)).collect();
            v = ctx.estimator(&w_now, &w_lag, &v, &batch);
            if step < depth {
                let w_next = inst.prox_step(&w_now, &v, u);
                w_lag = w_now;
                w_now = w_next;
            }
        }
        let grad = inst.full_grad(&w_now);
        let dev: f64 = v.iter().zip(&grad).map(|(a, g)| (a - g) * (a - g)).sum();
        sum_dev += dev;
        sum_dev_sq += dev * dev;
        for j in 0..d {
            sum_v[j] += v[j];
            sum_v_sq[j] += v[j] * v[j];
        }
    }
    let ns = samples as f64;
    let mean_v: Vec<f64> = sum_v.iter().map(|s| s / ns).collect();
    let se_v: Vec<f64> = (0..d)
        .map(|j| {
            let var = (sum_v_sq[j] / ns - mean_v[j] * mean_v[j]).max(0.0);
            (var / ns).sqrt()
        })
        .collect();
    let mean_dev_sq = sum_dev / ns;
    let var_dev = (sum_dev_sq / ns - mean_dev_sq * mean_dev_sq).max(0.0);
    McMoments {
        mean_v,
        se_v,
        mean_dev_sq,
        se_dev_sq: (var_dev / ns).sqrt(),
        samples,
    }
}
