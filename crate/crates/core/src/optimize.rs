//! Policy optimization: block-coordinate mirror ascent with restarts, and an
//! exhaustive simplex-grid oracle.
//!
//! The team objectives are combinations `a * rSum + b * rA + c * rB` with
//! nonnegative weights. Each is concave in one policy block when the other is
//! held fixed, so exponentiated-gradient steps with backtracking make monotone
//! progress. A step size of 1 on the first block of a sum-rate problem is
//! exactly a Blahut-Arimoto update.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::{
    clamp_information, cooperative_kernel, plogp, strategy_channel, CooperativePolicy, RateTriple, StrategyKernel, TeamPolicy,
};
use crate::model::{FsMacChannel, ModuloAdditiveSpec, DEFAULT_ENUMERATION_LIMIT};
use crate::rng::{role, Stream};
use crate::strategies::{ShannonStrategy, StrategySpace};

/// Largest number of objective evaluations the grid oracle will attempt.
pub const ORACLE_BUDGET: f64 = 1e8;

const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1024.0;
const MAX_INNER_STEPS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_outer_iters: usize,
    pub inner_step_tolerance: f64,
    pub objective_tolerance: f64,
    pub rng_seed: u64,
    pub grid_resolution: usize,
    pub enumeration_limit: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 16,
            max_outer_iters: 500,
            inner_step_tolerance: 1e-9,
            objective_tolerance: 1e-8,
            rng_seed: 0,
            grid_resolution: 8,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_outer_iters == 0 || self.grid_resolution == 0 || self.enumeration_limit == 0 {
            return Err(Error::InvalidConfig("counts must be at least 1".into()));
        }
        if !(self.inner_step_tolerance > 0.0) || !(self.objective_tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Best policy found, with the objective and rates evaluated at it.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult<P, R> {
    pub value: f64,
    pub policy: P,
    pub rates: R,
    pub converged: bool,
    pub restart_values: Vec<f64>,
}

pub type TeamOptimum = OptimizationResult<TeamPolicy, RateTriple>;
pub type CooperativeOptimum = OptimizationResult<CooperativePolicy, CooperativeRates>;

/// `(I(T^b;Y|X^a,S), I(X^a,T^b;Y|S))` of a cooperative policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CooperativeRates {
    pub r_b: f64,
    pub r_sum: f64,
}

impl CooperativeRates {
    /// Corners of the region `R_b <= r_b, R_a + R_b <= r_sum`.
    pub fn vertices(&self) -> [(f64, f64); 4] {
        let rb = self.r_b.min(self.r_sum);
        [(0.0, 0.0), (self.r_sum, 0.0), (self.r_sum - rb, rb), (0.0, rb)]
    }

    pub fn support(&self, lambda: f64) -> f64 {
        cooperative_weight(lambda).0 * self.r_sum + cooperative_weight(lambda).1 * self.r_b
    }
}

/// Nonnegative weights `(sum, a, b)` of the pentagon support function.
pub fn team_weights(lambda_a: f64) -> (f64, f64, f64) {
    if lambda_a >= 0.5 {
        (1.0 - lambda_a, 2.0 * lambda_a - 1.0, 0.0)
    } else {
        (lambda_a, 0.0, 1.0 - 2.0 * lambda_a)
    }
}

/// Weights `(sum, b)` of the cooperative support function.
pub fn cooperative_weight(lambda_a: f64) -> (f64, f64) {
    (lambda_a, (1.0 - 2.0 * lambda_a).max(0.0))
}

fn check_lambda(lambda_a: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda_a) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("lambda {lambda_a} outside [0, 1]")))
    }
}

fn entropy_unnormalized(v: &[f64]) -> f64 {
    v.iter().map(|&p| plogp(p)).sum()
}

fn dot_log(weights: &[f64], q: &[f64]) -> f64 {
    weights
        .iter()
        .zip(q)
        .map(|(&w, &p)| if w > 0.0 && p > 0.0 { w * p.log2() } else { 0.0 })
        .sum()
}

/// One orientation of a strategy kernel, with per-pair conditional entropies.
#[derive(Clone, Debug)]
struct Oriented {
    n_s: usize,
    n_a: usize,
    n_b: usize,
    n_y: usize,
    state: Vec<f64>,
    probs: Vec<f64>,
    /// `g[a * n_b + b] = sum_s P(s) H(Y | a, b, s)`.
    g: Vec<f64>,
}

impl Oriented {
    fn new(k: &StrategyKernel, transpose: bool) -> Self {
        let (n_a, n_b) = if transpose { (k.n_tb, k.n_ta) } else { (k.n_ta, k.n_tb) };
        let mut probs = vec![0.0; k.probs.len()];
        let mut g = vec![0.0; n_a * n_b];
        for a in 0..n_a {
            for b in 0..n_b {
                let (ta, tb) = if transpose { (b, a) } else { (a, b) };
                for s in 0..k.n_s {
                    let row = k.row(ta, tb, s);
                    let o = ((a * n_b + b) * k.n_s + s) * k.n_y;
                    probs[o..o + k.n_y].copy_from_slice(row);
                    g[a * n_b + b] += k.state_dist[s] * entropy_unnormalized(row);
                }
            }
        }
        Oriented {
            n_s: k.n_s,
            n_a,
            n_b,
            n_y: k.n_y,
            state: k.state_dist.clone(),
            probs,
            g,
        }
    }

    #[inline]
    fn row(&self, a: usize, b: usize, s: usize) -> &[f64] {
        let o = ((a * self.n_b + b) * self.n_s + s) * self.n_y;
        &self.probs[o..o + self.n_y]
    }

    /// Output law given `(s, b)` mixed over `pa`: index `(b * n_s + s) * n_y + y`.
    fn mix_over_a(&self, pa: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_b * self.n_s * self.n_y];
        for (a, &wa) in pa.iter().enumerate() {
            if wa == 0.0 {
                continue;
            }
            for b in 0..self.n_b {
                for s in 0..self.n_s {
                    let o = (b * self.n_s + s) * self.n_y;
                    for (y, &p) in self.row(a, b, s).iter().enumerate() {
                        out[o + y] += wa * p;
                    }
                }
            }
        }
        out
    }

    /// Output law given `(s, a)` mixed over `pb`: index `(a * n_s + s) * n_y + y`.
    fn mix_over_b(&self, pb: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_a * self.n_s * self.n_y];
        for a in 0..self.n_a {
            for (b, &wb) in pb.iter().enumerate() {
                if wb == 0.0 {
                    continue;
                }
                for s in 0..self.n_s {
                    let o = (a * self.n_s + s) * self.n_y;
                    for (y, &p) in self.row(a, b, s).iter().enumerate() {
                        out[o + y] += wb * p;
                    }
                }
            }
        }
        out
    }

    /// `(H(Y|S), H(Y|A,S), H(Y|B,S), H(Y|A,B,S))`.
    fn entropies(&self, pa: &[f64], pb: &[f64]) -> [f64; 4] {
        let qa = self.mix_over_b(pb);
        let qb = self.mix_over_a(pa);
        let mut h_y_s = 0.0;
        let mut q = vec![0.0; self.n_y];
        for s in 0..self.n_s {
            q.iter_mut().for_each(|x| *x = 0.0);
            for (a, &wa) in pa.iter().enumerate() {
                let o = (a * self.n_s + s) * self.n_y;
                for y in 0..self.n_y {
                    q[y] += wa * qa[o + y];
                }
            }
            h_y_s += self.state[s] * entropy_unnormalized(&q);
        }
        let mut h_y_as = 0.0;
        for (a, &wa) in pa.iter().enumerate() {
            for s in 0..self.n_s {
                let o = (a * self.n_s + s) * self.n_y;
                h_y_as += wa * self.state[s] * entropy_unnormalized(&qa[o..o + self.n_y]);
            }
        }
        let mut h_y_bs = 0.0;
        for (b, &wb) in pb.iter().enumerate() {
            for s in 0..self.n_s {
                let o = (b * self.n_s + s) * self.n_y;
                h_y_bs += wb * self.state[s] * entropy_unnormalized(&qb[o..o + self.n_y]);
            }
        }
        let mut h_y_abs = 0.0;
        for (a, &wa) in pa.iter().enumerate() {
            for (b, &wb) in pb.iter().enumerate() {
                h_y_abs += wa * wb * self.g[a * self.n_b + b];
            }
        }
        [h_y_s, h_y_as, h_y_bs, h_y_abs]
    }

    /// Gradient in `pa` of `w_sum * rSum + w_a * rA + w_b * rB`, up to a
    /// constant shift (irrelevant on the simplex).
    fn gradient_a(&self, w: (f64, f64, f64), pa: &[f64], pb: &[f64]) -> Vec<f64> {
        let (w_sum, w_a, w_b) = w;
        let qa = self.mix_over_b(pb);
        let qb = self.mix_over_a(pa);
        let mut q = vec![0.0; self.n_s * self.n_y];
        for (a, &wa) in pa.iter().enumerate() {
            for i in 0..self.n_s * self.n_y {
                q[i] += wa * qa[a * self.n_s * self.n_y + i];
            }
        }
        let mut grad = vec![0.0; self.n_a];
        for (a, ga) in grad.iter_mut().enumerate() {
            let mut d_h_y_s = 0.0;
            let mut d_h_y_as = 0.0;
            for s in 0..self.n_s {
                let o = (a * self.n_s + s) * self.n_y;
                let qa_row = &qa[o..o + self.n_y];
                d_h_y_s -= self.state[s] * dot_log(qa_row, &q[s * self.n_y..(s + 1) * self.n_y]);
                d_h_y_as += self.state[s] * entropy_unnormalized(qa_row);
            }
            let mut d_h_y_bs = 0.0;
            let mut d_h_y_abs = 0.0;
            for (b, &wb) in pb.iter().enumerate() {
                if wb == 0.0 {
                    continue;
                }
                d_h_y_abs += wb * self.g[a * self.n_b + b];
                if w_a > 0.0 {
                    for s in 0..self.n_s {
                        let o = (b * self.n_s + s) * self.n_y;
                        d_h_y_bs -= wb * self.state[s] * dot_log(self.row(a, b, s), &qb[o..o + self.n_y]);
                    }
                }
            }
            *ga = w_sum * (d_h_y_s - d_h_y_abs) + w_a * (d_h_y_bs - d_h_y_abs) + w_b * (d_h_y_as - d_h_y_abs);
        }
        grad
    }
}

/// Fast evaluator of team-policy rates on a fixed strategy kernel.
#[derive(Clone, Debug)]
pub struct TeamEvaluator {
    forward: Oriented,
    reverse: Oriented,
}

impl TeamEvaluator {
    pub fn new(kernel: &StrategyKernel) -> Self {
        TeamEvaluator {
            forward: Oriented::new(kernel, false),
            reverse: Oriented::new(kernel, true),
        }
    }

    pub fn n_a(&self) -> usize {
        self.forward.n_a
    }

    pub fn n_b(&self) -> usize {
        self.forward.n_b
    }

    fn raw_rates(&self, pa: &[f64], pb: &[f64]) -> (f64, f64, f64) {
        let [h_y_s, h_y_as, h_y_bs, h_y_abs] = self.forward.entropies(pa, pb);
        (h_y_bs - h_y_abs, h_y_as - h_y_abs, h_y_s - h_y_abs)
    }

    pub fn rates(&self, pa: &[f64], pb: &[f64]) -> Result<RateTriple> {
        let (ra, rb, rs) = self.raw_rates(pa, pb);
        Ok(RateTriple {
            r_a: clamp_information(ra, "rA")?,
            r_b: clamp_information(rb, "rB")?,
            r_sum: clamp_information(rs, "rSum")?,
        })
    }

    pub fn objective(&self, w: (f64, f64, f64), pa: &[f64], pb: &[f64]) -> f64 {
        let (ra, rb, rs) = self.raw_rates(pa, pb);
        w.0 * rs + w.1 * ra + w.2 * rb
    }

    fn gradient_a(&self, w: (f64, f64, f64), pa: &[f64], pb: &[f64]) -> Vec<f64> {
        self.forward.gradient_a(w, pa, pb)
    }

    fn gradient_b(&self, w: (f64, f64, f64), pa: &[f64], pb: &[f64]) -> Vec<f64> {
        self.reverse.gradient_a((w.0, w.2, w.1), pb, pa)
    }
}

/// Fast evaluator of cooperative (joint) policies.
#[derive(Clone, Debug)]
pub struct CooperativeEvaluator {
    k: Oriented,
}

impl CooperativeEvaluator {
    pub fn new(kernel: &StrategyKernel) -> Self {
        CooperativeEvaluator {
            k: Oriented::new(kernel, false),
        }
    }

    pub fn size(&self) -> usize {
        self.k.n_a * self.k.n_b
    }

    /// Output mixtures `q(y|s)` and `m(x_a, s, y) = sum_t pi(x_a,t) K(y|x_a,t,s)`.
    fn mixtures(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let k = &self.k;
        let mut m = vec![0.0; k.n_a * k.n_s * k.n_y];
        for a in 0..k.n_a {
            for b in 0..k.n_b {
                let w = p[a * k.n_b + b];
                if w == 0.0 {
                    continue;
                }
                for s in 0..k.n_s {
                    let o = (a * k.n_s + s) * k.n_y;
                    for (y, &v) in k.row(a, b, s).iter().enumerate() {
                        m[o + y] += w * v;
                    }
                }
            }
        }
        let mut q = vec![0.0; k.n_s * k.n_y];
        for a in 0..k.n_a {
            for i in 0..k.n_s * k.n_y {
                q[i] += m[a * k.n_s * k.n_y + i];
            }
        }
        (q, m)
    }

    fn raw_rates(&self, p: &[f64]) -> (f64, f64) {
        let k = &self.k;
        let (q, m) = self.mixtures(p);
        let mut h_y_s = 0.0;
        for s in 0..k.n_s {
            h_y_s += k.state[s] * entropy_unnormalized(&q[s * k.n_y..(s + 1) * k.n_y]);
        }
        let mut h_y_as = 0.0;
        for a in 0..k.n_a {
            let pa: f64 = p[a * k.n_b..(a + 1) * k.n_b].iter().sum();
            if pa <= 0.0 {
                continue;
            }
            for s in 0..k.n_s {
                let o = (a * k.n_s + s) * k.n_y;
                // H of the conditional m / pa, weighted by pa
                let h: f64 = m[o..o + k.n_y].iter().map(|&v| if v > 0.0 { -v * (v / pa).log2() } else { 0.0 }).sum();
                h_y_as += k.state[s] * h;
            }
        }
        let h_y_abs: f64 = p.iter().zip(&k.g).map(|(&w, &g)| w * g).sum();
        (h_y_as - h_y_abs, h_y_s - h_y_abs)
    }

    pub fn rates(&self, p: &[f64]) -> Result<CooperativeRates> {
        let (rb, rs) = self.raw_rates(p);
        Ok(CooperativeRates {
            r_b: clamp_information(rb, "rB")?,
            r_sum: clamp_information(rs, "rSum")?,
        })
    }

    pub fn objective(&self, w: (f64, f64), p: &[f64]) -> f64 {
        let (rb, rs) = self.raw_rates(p);
        w.0 * rs + w.1 * rb
    }

    fn gradient(&self, w: (f64, f64), p: &[f64]) -> Vec<f64> {
        let k = &self.k;
        let (q, m) = self.mixtures(p);
        let mut grad = vec![0.0; p.len()];
        for a in 0..k.n_a {
            let pa: f64 = p[a * k.n_b..(a + 1) * k.n_b].iter().sum();
            for b in 0..k.n_b {
                let mut d_h_y_s = 0.0;
                let mut d_h_y_as = 0.0;
                for s in 0..k.n_s {
                    let row = k.row(a, b, s);
                    d_h_y_s -= k.state[s] * dot_log(row, &q[s * k.n_y..(s + 1) * k.n_y]);
                    if pa > 0.0 && w.1 > 0.0 {
                        let o = (a * k.n_s + s) * k.n_y;
                        let cond: Vec<f64> = m[o..o + k.n_y].iter().map(|&v| v / pa).collect();
                        d_h_y_as -= k.state[s] * dot_log(row, &cond);
                    }
                }
                let g = k.g[a * k.n_b + b];
                grad[a * k.n_b + b] = w.0 * (d_h_y_s - g) + w.1 * (d_h_y_as - g);
            }
        }
        grad
    }
}

/// Multiplicative-weights step `p_i <- p_i exp(eta ln2 grad_i) / Z`.
fn exponentiated_step(p: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    let gmax = p
        .iter()
        .zip(grad)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(_, &g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = p
        .iter()
        .zip(grad)
        .map(|(&pi, &g)| if pi > 0.0 { pi * ((g - gmax) * eta * std::f64::consts::LN_2).exp() } else { 0.0 })
        .collect();
    let z: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= z);
    out
}

/// Runs backtracking mirror ascent on one block until the step falls below
/// `tol`. Returns the new objective value; `p` is updated in place.
fn ascend_block(
    p: &mut Vec<f64>,
    mut value: f64,
    eta: &mut f64,
    tol: f64,
    objective: impl Fn(&[f64]) -> f64,
    gradient: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    for _ in 0..MAX_INNER_STEPS {
        let grad = gradient(p);
        let mut accepted = false;
        while *eta >= MIN_STEP {
            let candidate = exponentiated_step(p, &grad, *eta);
            let v = objective(&candidate);
            if v >= value {
                let moved: f64 = candidate.iter().zip(p.iter()).map(|(a, b)| (a - b).abs()).sum();
                *p = candidate;
                value = v;
                *eta = (*eta * 2.0).min(MAX_STEP);
                accepted = moved >= tol;
                break;
            }
            *eta *= 0.5;
        }
        if !accepted {
            *eta = eta.max(MIN_STEP);
            break;
        }
    }
    value
}

struct RestartRun<P> {
    value: f64,
    policy: P,
    converged: bool,
}

fn restart_stream(config: &OptimizerConfig, restart: usize) -> Stream {
    Stream::new(config.rng_seed.wrapping_add(restart as u64), role::RESTART, 0)
}

fn lexicographic_less(a: &[f64], b: &[f64]) -> bool {
    a.partial_cmp(b) == Some(std::cmp::Ordering::Less)
}

fn run_team(eval: &TeamEvaluator, w: (f64, f64, f64), config: &OptimizerConfig, restart: usize) -> RestartRun<(Vec<f64>, Vec<f64>)> {
    let (n_a, n_b) = (eval.n_a(), eval.n_b());
    let (mut pa, mut pb) = if restart == 0 {
        (vec![1.0 / n_a as f64; n_a], vec![1.0 / n_b as f64; n_b])
    } else {
        let mut rng = restart_stream(config, restart);
        (rng.dirichlet_flat(n_a), rng.dirichlet_flat(n_b))
    };
    let mut value = eval.objective(w, &pa, &pb);
    let (mut eta_a, mut eta_b) = (1.0, 1.0);
    let mut converged = false;
    for _ in 0..config.max_outer_iters {
        let before = value;
        let pb_fixed = pb.clone();
        value = ascend_block(
            &mut pa,
            value,
            &mut eta_a,
            config.inner_step_tolerance,
            |x| eval.objective(w, x, &pb_fixed),
            |x| eval.gradient_a(w, x, &pb_fixed),
        );
        let pa_fixed = pa.clone();
        value = ascend_block(
            &mut pb,
            value,
            &mut eta_b,
            config.inner_step_tolerance,
            |x| eval.objective(w, &pa_fixed, x),
            |x| eval.gradient_b(w, &pa_fixed, x),
        );
        if value - before < config.objective_tolerance {
            converged = true;
            break;
        }
    }
    RestartRun {
        value,
        policy: (pa, pb),
        converged,
    }
}

fn merge_runs<P: Clone>(runs: Vec<RestartRun<P>>, key: impl Fn(&P) -> Vec<f64>) -> (RestartRun<P>, Vec<f64>) {
    let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let mut best: Option<RestartRun<P>> = None;
    for run in runs {
        let better = match &best {
            None => true,
            Some(b) => run.value > b.value || (run.value == b.value && lexicographic_less(&key(&run.policy), &key(&b.policy))),
        };
        if better {
            best = Some(run);
        }
    }
    (best.expect("at least one restart"), values)
}

/// Maximizes `w.0 * rSum + w.1 * rA + w.2 * rB` over team policies on a
/// precomputed strategy kernel.
pub fn maximize_team_objective(kernel: &StrategyKernel, w: (f64, f64, f64), config: &OptimizerConfig) -> Result<TeamOptimum> {
    config.validate()?;
    let eval = TeamEvaluator::new(kernel);
    let runs: Vec<_> = (0..config.restarts).into_par_iter().map(|r| run_team(&eval, w, config, r)).collect();
    let (best, restart_values) = merge_runs(runs, |(a, b)| [a.as_slice(), b.as_slice()].concat());
    let (pa, pb) = best.policy;
    let rates = eval.rates(&pa, &pb)?;
    Ok(OptimizationResult {
        value: eval.objective(w, &pa, &pb),
        policy: TeamPolicy::from_parts_unchecked(pa, pb),
        rates,
        converged: best.converged,
        restart_values,
    })
}

/// Sum-rate `sup I(T^a,T^b;Y|S)` over product team policies.
pub fn maximize_sum_rate(channel: &FsMacChannel, config: &OptimizerConfig) -> Result<TeamOptimum> {
    let kernel = strategy_channel(channel, config.enumeration_limit)?;
    maximize_team_objective(&kernel, (1.0, 0.0, 0.0), config)
}

/// Maximizes the pentagon support function in direction `(lambda_a, 1 - lambda_a)`.
pub fn maximize_weighted_rate(channel: &FsMacChannel, lambda_a: f64, config: &OptimizerConfig) -> Result<TeamOptimum> {
    check_lambda(lambda_a)?;
    let kernel = strategy_channel(channel, config.enumeration_limit)?;
    maximize_team_objective(&kernel, team_weights(lambda_a), config)
}

fn run_cooperative(eval: &CooperativeEvaluator, w: (f64, f64), config: &OptimizerConfig, restart: usize) -> RestartRun<Vec<f64>> {
    let n = eval.size();
    let mut p = if restart == 0 {
        vec![1.0 / n as f64; n]
    } else {
        restart_stream(config, restart).dirichlet_flat(n)
    };
    let mut value = eval.objective(w, &p);
    let mut eta = 1.0;
    let mut converged = false;
    for _ in 0..config.max_outer_iters {
        let before = value;
        value = ascend_block(
            &mut p,
            value,
            &mut eta,
            config.inner_step_tolerance,
            |x| eval.objective(w, x),
            |x| eval.gradient(w, x),
        );
        if value - before < config.objective_tolerance {
            converged = true;
            break;
        }
    }
    RestartRun { value, policy: p, converged }
}

/// Maximizes `lambda_a R_a + (1 - lambda_a) R_b` over the cooperative region
/// of a precomputed `(x_a, t_b)` kernel.
pub fn maximize_cooperative_kernel(kernel: &StrategyKernel, lambda_a: f64, config: &OptimizerConfig) -> Result<CooperativeOptimum> {
    config.validate()?;
    check_lambda(lambda_a)?;
    let size = kernel.n_ta() * kernel.n_tb();
    if size > config.enumeration_limit {
        return Err(Error::EnumerationLimitExceeded {
            count: format!("{} x {}", kernel.n_ta(), kernel.n_tb()),
            limit: config.enumeration_limit,
        });
    }
    let w = cooperative_weight(lambda_a);
    let eval = CooperativeEvaluator::new(kernel);
    let runs: Vec<_> = (0..config.restarts).into_par_iter().map(|r| run_cooperative(&eval, w, config, r)).collect();
    let (best, restart_values) = merge_runs(runs, |p| p.clone());
    let rates = eval.rates(&best.policy)?;
    Ok(OptimizationResult {
        value: eval.objective(w, &best.policy),
        policy: CooperativePolicy::from_parts_unchecked(kernel.n_ta(), kernel.n_tb(), best.policy),
        rates,
        converged: best.converged,
        restart_values,
    })
}

/// Cooperative region support value; encoder a's CSI is ignored.
pub fn maximize_cooperative(channel: &FsMacChannel, lambda_a: f64, config: &OptimizerConfig) -> Result<CooperativeOptimum> {
    let kernel = cooperative_kernel(channel, config.enumeration_limit)?;
    maximize_cooperative_kernel(&kernel, lambda_a, config)
}

/// Objective evaluated by the grid oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleObjective {
    SumRate,
    Weighted(f64),
    Cooperative(f64),
}

/// Best grid point found by the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// Team: `piA` followed by `piB`. Cooperative: the joint policy.
    pub policy: Vec<f64>,
    pub evaluations: f64,
}

/// All compositions of `g` into `n` nonnegative parts, as probability vectors,
/// in lexicographic order of the part counts.
pub fn simplex_grid(n: usize, g: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(n - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut counts = Vec::new();
    rec(n, g, &mut Vec::new(), &mut counts);
    counts.into_iter().map(|c| c.into_iter().map(|k| k as f64 / g as f64).collect()).collect()
}

/// Number of points in `simplex_grid(n, g)`: `C(g + n - 1, n - 1)`.
pub fn simplex_grid_size(n: usize, g: usize) -> f64 {
    let mut c = 1.0;
    for i in 1..n {
        c = c * (g + i) as f64 / i as f64;
    }
    c.round()
}

/// Exhaustive maximization over simplex grids of resolution `g` on a
/// precomputed kernel.
pub fn exhaustive_oracle_kernel(kernel: &StrategyKernel, objective: OracleObjective, g: usize) -> Result<OracleResult> {
    if g == 0 {
        return Err(Error::InvalidConfig("grid resolution must be at least 1".into()));
    }
    let pick_best = |acc: (f64, usize), x: (f64, usize)| if x.0 > acc.0 || (x.0 == acc.0 && x.1 < acc.1) { x } else { acc };
    match objective {
        OracleObjective::SumRate | OracleObjective::Weighted(_) => {
            let lambda = match objective {
                OracleObjective::Weighted(l) => l,
                _ => 0.5,
            };
            check_lambda(lambda)?;
            let w = if objective == OracleObjective::SumRate { (1.0, 0.0, 0.0) } else { team_weights(lambda) };
            let evaluations = simplex_grid_size(kernel.n_ta(), g) * simplex_grid_size(kernel.n_tb(), g);
            if evaluations > ORACLE_BUDGET {
                return Err(Error::OracleBudgetExceeded {
                    evaluations,
                    budget: ORACLE_BUDGET,
                });
            }
            let eval = TeamEvaluator::new(kernel);
            let grid_a = simplex_grid(kernel.n_ta(), g);
            let grid_b = simplex_grid(kernel.n_tb(), g);
            let nb = grid_b.len();
            let (value, idx) = (0..grid_a.len())
                .into_par_iter()
                .map(|i| {
                    grid_b
                        .iter()
                        .enumerate()
                        .map(|(j, pb)| (eval.objective(w, &grid_a[i], pb), i * nb + j))
                        .fold((f64::NEG_INFINITY, usize::MAX), pick_best)
                })
                .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_best);
            let policy = [grid_a[idx / nb].as_slice(), grid_b[idx % nb].as_slice()].concat();
            Ok(OracleResult { value, policy, evaluations })
        }
        OracleObjective::Cooperative(lambda) => {
            check_lambda(lambda)?;
            let n = kernel.n_ta() * kernel.n_tb();
            let evaluations = simplex_grid_size(n, g);
            if evaluations > ORACLE_BUDGET {
                return Err(Error::OracleBudgetExceeded {
                    evaluations,
                    budget: ORACLE_BUDGET,
                });
            }
            let eval = CooperativeEvaluator::new(kernel);
            let w = cooperative_weight(lambda);
            let grid = simplex_grid(n, g);
            let (value, idx) = grid
                .par_iter()
                .enumerate()
                .map(|(i, p)| (eval.objective(w, p), i))
                .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_best);
            Ok(OracleResult {
                value,
                policy: grid[idx].clone(),
                evaluations,
            })
        }
    }
}

/// Exhaustive grid oracle on a channel. The cooperative objective uses the
/// cooperative kernel (encoder a uninformed).
pub fn exhaustive_oracle(channel: &FsMacChannel, objective: OracleObjective, g: usize) -> Result<OracleResult> {
    let kernel = match objective {
        OracleObjective::Cooperative(_) => cooperative_kernel(channel, DEFAULT_ENUMERATION_LIMIT)?,
        _ => strategy_channel(channel, DEFAULT_ENUMERATION_LIMIT)?,
    };
    exhaustive_oracle_kernel(&kernel, objective, g)
}

/// Minimizing strategy pair of the shifted-noise entropy.
#[derive(Clone, Debug, PartialEq)]
pub struct HMin {
    pub value: f64,
    pub t_a: ShannonStrategy,
    pub t_b: ShannonStrategy,
}

/// `min_{t_a, t_b} H(Z + t_a(S^a) + t_b(S^b) | S)` by exhaustive scan; the
/// lowest index pair wins ties.
pub fn h_min_bruteforce(spec: &ModuloAdditiveSpec) -> Result<HMin> {
    spec.validate()?;
    let q = spec.q;
    let n_s = spec.n_s();
    let (n_sa, n_sb) = (spec.csi_a.cols(), spec.csi_b.cols());
    let space_a = StrategySpace::new(q, n_sa, DEFAULT_ENUMERATION_LIMIT)?;
    let space_b = StrategySpace::new(q, n_sb, DEFAULT_ENUMERATION_LIMIT)?;
    let table_a = space_a.lookup_table();
    let table_b = space_b.lookup_table();
    let mut best: Option<(f64, usize, usize)> = None;
    let mut dist = vec![0.0; q];
    for ta in 0..space_a.count() {
        for tb in 0..space_b.count() {
            let mut h = 0.0;
            for s in 0..n_s {
                dist.iter_mut().for_each(|x| *x = 0.0);
                for sa in 0..n_sa {
                    let pa = spec.csi_a.get(s, sa);
                    if pa == 0.0 {
                        continue;
                    }
                    for sb in 0..n_sb {
                        let pab = pa * spec.csi_b.get(s, sb);
                        if pab == 0.0 {
                            continue;
                        }
                        let shift = table_a[ta * n_sa + sa] + table_b[tb * n_sb + sb];
                        for z in 0..q {
                            dist[(z + shift) % q] += pab * spec.noise_given_state.get(s, z);
                        }
                    }
                }
                h += spec.state_dist[s] * entropy_unnormalized(&dist);
            }
            if best.is_none_or(|(v, _, _)| h < v - 1e-12) {
                best = Some((h, ta, tb));
            }
        }
    }
    let (value, ta, tb) = best.expect("nonempty strategy spaces");
    Ok(HMin {
        value,
        t_a: space_a.get(ta)?,
        t_b: space_b.get(tb)?,
    })
}

/// Uniform policy over the shifts `t_a* + tau` and `t_b* - tau`, `tau = 0..q`.
pub fn uniform_coset_policy(spec: &ModuloAdditiveSpec, argmin: &HMin) -> Result<TeamPolicy> {
    let q = spec.q;
    let shifted = |t: &ShannonStrategy, delta: usize| -> Result<usize> {
        let table: Vec<usize> = t.table().iter().map(|&x| (x + delta) % q).collect();
        Ok(ShannonStrategy::from_table(&table, q)?.index())
    };
    let n_a = q.pow(argmin.t_a.n_csi() as u32);
    let n_b = q.pow(argmin.t_b.n_csi() as u32);
    let mut pi_a = vec![0.0; n_a];
    let mut pi_b = vec![0.0; n_b];
    for tau in 0..q {
        pi_a[shifted(&argmin.t_a, tau)?] += 1.0 / q as f64;
        pi_b[shifted(&argmin.t_b, (q - tau) % q)?] += 1.0 / q as f64;
    }
    TeamPolicy::new(pi_a, pi_b)
}
