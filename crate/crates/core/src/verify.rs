//! Closed-form checks for the worked examples and the auxiliary-form
//! equivalence of the cooperative region.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::information::{
    binary_entropy, conditioned_input_rate_triple, cooperative_kernel, entropy, joint_distribution, plogp, rate_triple,
    ConditionedInputPolicy, CooperativePolicy, StrategyKernel, TeamPolicy,
};
use crate::model::{
    build_binary_multiplier, build_modulo_additive, equivalent_channel, BinaryMultiplierSpec, FsMacChannel, ModuloAdditiveSpec,
    StochasticKernel,
};
use crate::optimize::{h_min_bruteforce, maximize_cooperative_kernel, maximize_sum_rate, maximize_weighted_rate, uniform_coset_policy, OptimizerConfig};
use crate::regions::{convex_hull_2d, hull_violation, lambda_grid, DEFAULT_LAMBDA_SAMPLES};
use crate::rng::{role, Stream};

/// One assertion of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail report with every intermediate number.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VerificationReport {
    pub name: String,
    pub values: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn new(name: &str) -> Self {
        VerificationReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn value(&mut self, label: &str, v: f64) {
        self.values.push((label.to_string(), v));
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.checks.push(Check {
            label: label.to_string(),
            passed: err <= tol,
            detail: format!("got {got:.12} want {want:.12} |err| {err:.3e} tol {tol:.0e}"),
        });
    }

    fn assert(&mut self, label: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            label: label.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn value_of(&self, label: &str) -> Option<f64> {
        self.values.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify {}", self.name);
        for (label, v) in &self.values {
            let _ = writeln!(out, "  {label} = {v:.6}");
        }
        for c in &self.checks {
            let _ = writeln!(out, "  [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.label, c.detail);
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    /// The report itself on success, `VerificationFailed` otherwise.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::VerificationFailed(self.to_text()))
        }
    }
}

/// Checks `log q - H_min` for the modulo-additive channel: brute-force
/// `H_min`, the uniform coset policy and the optimizer must all agree.
pub fn verify_modulo_example(spec: &ModuloAdditiveSpec, config: &OptimizerConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("modulo");
    let channel = build_modulo_additive(spec)?;
    let log_q = (spec.q as f64).log2();
    let h = h_min_bruteforce(spec)?;
    let capacity = log_q - h.value;
    r.value("H_min", h.value);
    r.value("argmin tA", h.t_a.index() as f64);
    r.value("argmin tB", h.t_b.index() as f64);
    r.value("capacity", capacity);

    let policy = uniform_coset_policy(spec, &h)?;
    let triple = rate_triple(&channel, &policy)?;
    r.value("coset rA", triple.r_a);
    r.value("coset rB", triple.r_b);
    r.value("coset rSum", triple.r_sum);
    let joint = joint_distribution(&channel, &policy)?;
    let h_y_s = joint.entropy_of(&[0, 3])? - joint.entropy_of(&[0])?;
    let h_y_tas = joint.entropy_of(&[0, 1, 3])? - joint.entropy_of(&[0, 1])?;
    r.close("coset H(Y|S) = log q", h_y_s, log_q, 1e-9);
    r.close("coset H(Y|Ta,S) = log q", h_y_tas, log_q, 1e-9);
    r.close("coset rA = log q - H_min", triple.r_a, capacity, 1e-6);
    r.close("coset rB = log q - H_min", triple.r_b, capacity, 1e-6);
    r.close("coset rSum = log q - H_min", triple.r_sum, capacity, 1e-6);

    let opt = maximize_sum_rate(&channel, config)?;
    r.value("optimizer sum-rate", opt.value);
    r.close("optimizer = log q - H_min", opt.value, capacity, 1e-6);

    // without any CSI the noise is only known through its marginal
    let mut pz = vec![0.0; spec.q];
    for (s, &ps) in spec.state_dist.iter().enumerate() {
        for (z, v) in pz.iter_mut().enumerate() {
            *v += ps * spec.noise_given_state.get(s, z);
        }
    }
    let h_z = entropy(&pz)?;
    let h_z_s: f64 = spec
        .state_dist
        .iter()
        .enumerate()
        .map(|(s, &ps)| ps * spec.noise_given_state.row(s).iter().map(|&p| plogp(p)).sum::<f64>())
        .sum();
    r.value("no-CSI capacity log q - H(Z)", log_q - h_z);
    r.value("I(S;Z)", h_z - h_z_s);
    if spec.csi_a.is_identity() && spec.csi_b.is_identity() {
        let gain = capacity - (log_q - h_z);
        r.assert(
            "gain over no CSI >= I(S;Z)",
            gain >= h_z - h_z_s - 1e-9,
            format!("gain {gain:.12} I(S;Z) {:.12}", h_z - h_z_s),
        );
    }
    Ok(r)
}

/// Checks the binary multiplier bounds `1 - H(S|S^r)`.
///
/// Independent uniform inputs give `P(X_a X_b = 1) = 1/4`, so they do not
/// reach `H(Y|S^r) = 1`; the sum-rate policy used here has
/// `P(X_a = 1) = P(X_b = 1) = 1/sqrt(2)`, which makes the product uniform.
/// The uniform-input value is reported as a diagnostic.
pub fn verify_binary_multiplier(spec: &BinaryMultiplierSpec, config: &OptimizerConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("multiplier");
    let model = build_binary_multiplier(spec)?;
    let eq = equivalent_channel(&model)?;
    let sr = spec.sr_dist();
    let post = spec.state_given_sr();
    let h_s_sr: f64 = (0..2).map(|i| sr[i] * (plogp(post[i][0]) + plogp(post[i][1]))).sum();
    let bound = 1.0 - h_s_sr;
    r.value("H(S|S^r)", h_s_sr);
    r.value("bound 1 - H(S|S^r)", bound);

    let p1 = std::f64::consts::FRAC_1_SQRT_2;
    let input = |pa1: f64, pb1: f64| -> Result<ConditionedInputPolicy> {
        Ok(ConditionedInputPolicy {
            pi_a_given_csi: StochasticKernel::new("piA", 1, 2, vec![1.0 - pa1, pa1], 1e-12)?,
            pi_b_given_csi: StochasticKernel::new("piB", 1, 2, vec![1.0 - pb1, pb1], 1e-12)?,
            f_a: vec![0, 0],
            f_b: vec![0, 0],
        })
    };
    // (label, P(Xa=1), P(Xb=1))
    let policies = [("uniform", 0.5, 0.5), ("sum", p1, p1), ("b-private", 1.0, 0.5), ("a-private", 0.5, 1.0)];
    let mut entropies = Vec::new();
    for &(label, pa1, pb1) in &policies {
        let team = TeamPolicy::new(vec![1.0 - pa1, pa1], vec![1.0 - pb1, pb1])?;
        let joint = joint_distribution(&eq, &team)?;
        let h_y_sr = joint.entropy_of(&[0, 3])? - joint.entropy_of(&[0])?;
        let h_y_xa_sr = joint.entropy_of(&[0, 1, 3])? - joint.entropy_of(&[0, 1])?;
        let h_y_xb_sr = joint.entropy_of(&[0, 2, 3])? - joint.entropy_of(&[0, 2])?;
        let triple = conditioned_input_rate_triple(&model, &input(pa1, pb1)?)?;
        entropies.push((label, h_y_sr, h_y_xa_sr, h_y_xb_sr, triple));
    }
    let (_, h_uniform, _, _, t_uniform) = entropies[0];
    r.value("uniform inputs H(Y|S^r)", h_uniform);
    r.value("uniform inputs rSum", t_uniform.r_sum);

    let (_, h_sum, _, _, t_sum) = entropies[1];
    r.close("H(Y|S^r) = 1", h_sum, 1.0, 1e-9);
    r.close("sum bound = 1 - H(S|S^r)", t_sum.r_sum, bound, 1e-6);
    let (_, _, h_b, _, t_b) = entropies[2];
    r.close("H(Y|Xa,S^r) = 1", h_b, 1.0, 1e-9);
    r.close("Rb bound = 1 - H(S|S^r)", t_b.r_b, bound, 1e-6);
    let (_, _, _, h_a, t_a) = entropies[3];
    r.close("H(Y|Xb,S^r) = 1", h_a, 1.0, 1e-9);
    r.close("Ra bound = 1 - H(S|S^r)", t_a.r_a, bound, 1e-6);
    r.value("sum policy rSum", t_sum.r_sum);
    r.value("b-private policy rB", t_b.r_b);
    r.value("a-private policy rA", t_a.r_a);

    let opt = maximize_sum_rate(&eq, config)?;
    r.value("optimizer sum-rate", opt.value);
    r.close("optimizer sum-rate = bound", opt.value, bound, 1e-6);
    let opt_a = maximize_weighted_rate(&eq, 1.0, config)?;
    let opt_b = maximize_weighted_rate(&eq, 0.0, config)?;
    r.close("optimizer max rA = bound", opt_a.value, bound, 1e-6);
    r.close("optimizer max rB = bound", opt_b.value, bound, 1e-6);
    Ok(r)
}

/// One term `weight * 1{col = map[row]}` of a decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryTerm {
    pub weight: f64,
    pub map: Vec<usize>,
}

/// Greedy decomposition of a row-stochastic matrix into a convex combination
/// of binary stochastic matrices. Each step takes the largest residual entry
/// in every row (lowest column on ties) with weight equal to the smallest of
/// them, which zeroes at least one entry; at most `rows * cols` terms result.
pub fn binary_stochastic_decomposition(m: &StochasticKernel) -> Vec<BinaryTerm> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut residual = m.probs().to_vec();
    let mut terms = Vec::new();
    for _ in 0..rows * cols {
        let map: Vec<usize> = (0..rows)
            .map(|r| {
                let row = &residual[r * cols..(r + 1) * cols];
                (0..cols).fold(0, |best, c| if row[c] > row[best] { c } else { best })
            })
            .collect();
        let weight = map.iter().enumerate().map(|(r, &c)| residual[r * cols + c]).fold(f64::INFINITY, f64::min);
        if !(weight > 0.0) {
            break;
        }
        for (r, &c) in map.iter().enumerate() {
            residual[r * cols + c] -= weight;
        }
        terms.push(BinaryTerm { weight, map });
    }
    terms
}

/// Largest absolute entry error of `sum_k w_k B_k` against `m`.
pub fn reconstruction_error(m: &StochasticKernel, terms: &[BinaryTerm]) -> f64 {
    let cols = m.cols();
    let mut acc = vec![0.0; m.probs().len()];
    for t in terms {
        for (r, &c) in t.map.iter().enumerate() {
            acc[r * cols + c] += t.weight;
        }
    }
    acc.iter().zip(m.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Settings of the auxiliary-form check.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxiliaryCheck {
    pub samples: usize,
    pub lambdas: usize,
    pub decompositions: usize,
    pub containment_tolerance: f64,
    pub matching_tolerance: f64,
    pub max_refinements: usize,
}

impl Default for AuxiliaryCheck {
    fn default() -> Self {
        AuxiliaryCheck {
            samples: 10_000,
            lambdas: DEFAULT_LAMBDA_SAMPLES,
            decompositions: 100,
            containment_tolerance: 1e-6,
            matching_tolerance: 1e-4,
            max_refinements: 256,
        }
    }
}

/// Auxiliary-form rates `(I(U;Y|X_a), I(U,X_a;Y))` for a receiver without
/// state information, with `x_b = m(s, x_a, u)`.
///
/// The map is given per `x_a` as a row option index: option `r` sends
/// `(s, u)` to digit `s * n_u + u` of `r` in base `n_xb`.
struct AuxiliaryForm {
    n_s: usize,
    n_xa: usize,
    n_xb: usize,
    n_u: usize,
    n_y: usize,
    options: usize,
    /// `w[((xa * options + r) * n_u + u) * n_y + y] = sum_s P(s) P(y | xa, m, s)`.
    w: Vec<f64>,
    /// Entropy of each `w` row.
    hw: Vec<f64>,
}

impl AuxiliaryForm {
    fn new(channel: &FsMacChannel, limit: usize) -> Result<Self> {
        let a = channel.alphabets();
        let n_u = a.n_xb.pow(a.n_s as u32);
        let cells = a.n_s * n_u;
        let options = (a.n_xb as f64).powi(cells as i32);
        if options.powi(a.n_xa as i32) > limit as f64 {
            return Err(Error::EnumerationLimitExceeded {
                count: format!("{}^{}", options, a.n_xa),
                limit,
            });
        }
        let options = options as usize;
        let mut w = vec![0.0; a.n_xa * options * n_u * a.n_y];
        let mut hw = vec![0.0; a.n_xa * options * n_u];
        for xa in 0..a.n_xa {
            for r in 0..options {
                for u in 0..n_u {
                    let o = (xa * options + r) * n_u + u;
                    for s in 0..a.n_s {
                        let xb = digit(r, s * n_u + u, a.n_xb);
                        for y in 0..a.n_y {
                            w[o * a.n_y + y] += channel.state_dist()[s] * channel.transition(xa, xb, s, y);
                        }
                    }
                    hw[o] = w[o * a.n_y..(o + 1) * a.n_y].iter().map(|&p| plogp(p)).sum();
                }
            }
        }
        Ok(AuxiliaryForm {
            n_s: a.n_s,
            n_xa: a.n_xa,
            n_xb: a.n_xb,
            n_u,
            n_y: a.n_y,
            options,
            w,
            hw,
        })
    }

    /// Per `(x_a, r)`: `(sum_u P H(w), P(y, x_a) vector, P(x_a) H(Y | x_a))`.
    fn partials(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut c = vec![0.0; self.n_xa * self.options];
        let mut v = vec![0.0; self.n_xa * self.options * self.n_y];
        let mut hx = vec![0.0; self.n_xa * self.options];
        for xa in 0..self.n_xa {
            let pxa: f64 = p[xa * self.n_u..(xa + 1) * self.n_u].iter().sum();
            for r in 0..self.options {
                let k = xa * self.options + r;
                for u in 0..self.n_u {
                    let pu = p[xa * self.n_u + u];
                    if pu == 0.0 {
                        continue;
                    }
                    let o = k * self.n_u + u;
                    c[k] += pu * self.hw[o];
                    for y in 0..self.n_y {
                        v[k * self.n_y + y] += pu * self.w[o * self.n_y + y];
                    }
                }
                if pxa > 0.0 {
                    hx[k] = v[k * self.n_y..(k + 1) * self.n_y]
                        .iter()
                        .map(|&q| if q > 0.0 { -q * (q / pxa).log2() } else { 0.0 })
                        .sum();
                }
            }
        }
        (c, v, hx)
    }

    /// Calls `visit(i1, i2)` for every map `m`.
    fn for_each_map(&self, p: &[f64], mut visit: impl FnMut(f64, f64)) {
        let (c, v, hx) = self.partials(p);
        let mut choice = vec![0usize; self.n_xa];
        let mut y = vec![0.0; self.n_y];
        loop {
            let mut h_cond = 0.0;
            let mut h_y_xa = 0.0;
            y.iter_mut().for_each(|q| *q = 0.0);
            for (xa, &r) in choice.iter().enumerate() {
                let k = xa * self.options + r;
                h_cond += c[k];
                h_y_xa += hx[k];
                for (yy, q) in y.iter_mut().enumerate() {
                    *q += v[k * self.n_y + yy];
                }
            }
            let h_y = if self.n_y == 2 { binary_entropy(y[0]) } else { y.iter().map(|&q| plogp(q)).sum() };
            visit(h_y_xa - h_cond, h_y - h_cond);
            let mut i = 0;
            loop {
                if i == self.n_xa {
                    return;
                }
                choice[i] += 1;
                if choice[i] < self.options {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Rates of the single map `m(s, x_a, u) = u(s)`.
    fn strategy_map_rates(&self, p: &[f64]) -> (f64, f64) {
        let (c, v, hx) = self.partials(p);
        let r = self.strategy_option();
        let mut h_cond = 0.0;
        let mut h_y_xa = 0.0;
        let mut y = vec![0.0; self.n_y];
        for xa in 0..self.n_xa {
            let k = xa * self.options + r;
            h_cond += c[k];
            h_y_xa += hx[k];
            for (yy, q) in y.iter_mut().enumerate() {
                *q += v[k * self.n_y + yy];
            }
        }
        let h_y: f64 = y.iter().map(|&q| plogp(q)).sum();
        (h_y_xa - h_cond, h_y - h_cond)
    }

    /// Row option whose digit at `(s, u)` is `u(s)`.
    fn strategy_option(&self) -> usize {
        let mut r = 0usize;
        for cell in (0..self.n_s * self.n_u).rev() {
            let (s, u) = (cell / self.n_u, cell % self.n_u);
            r = r * self.n_xb + digit(u, s, self.n_xb);
        }
        r
    }
}

#[inline]
fn digit(mut v: usize, position: usize, base: usize) -> usize {
    for _ in 0..position {
        v /= base;
    }
    v % base
}

/// Sampled two-sided check that the strategy form and the auxiliary form of
/// the cooperative region agree for a receiver without state information.
///
/// Encoder a must be uninformed and encoder b must observe the state exactly.
pub fn verify_auxiliary_equivalence(channel: &FsMacChannel, check: &AuxiliaryCheck, config: &OptimizerConfig) -> Result<VerificationReport> {
    let a = *channel.alphabets();
    if a.n_sa != 1 {
        return Err(Error::ScenarioMismatch("auxiliary check requires nSa = 1".into()));
    }
    if !(a.n_sb == a.n_s && channel.csi_b().is_identity()) {
        return Err(Error::ScenarioMismatch("auxiliary check requires csiB = identity".into()));
    }
    if a.n_s > 2 || a.n_xa > 2 || a.n_xb > 2 {
        return Err(Error::ScenarioMismatch("auxiliary check supports |S|, |Xa|, |Xb| <= 2".into()));
    }
    let mut r = VerificationReport::new("auxiliary");
    let kernel: StrategyKernel = cooperative_kernel(channel, config.enumeration_limit)?.average_state();

    // strategy-form hull
    let mut pieces = Vec::new();
    for lambda in lambda_grid(check.lambdas) {
        pieces.push((lambda, maximize_cooperative_kernel(&kernel, lambda, config)?));
    }
    let build_hull = |pieces: &[(f64, crate::optimize::CooperativeOptimum)]| -> Result<Vec<(f64, f64)>> {
        let mut pts = vec![(0.0, 0.0)];
        pts.extend(pieces.iter().flat_map(|(_, o)| o.rates.vertices()));
        convex_hull_2d(&pts)
    };
    let mut hull = build_hull(&pieces)?;

    // (i) auxiliary samples inside the hull
    let form = AuxiliaryForm::new(channel, 1 << 20)?;
    let n_p = a.n_xa * form.n_u;
    let mut rng = Stream::new(config.rng_seed, role::SAMPLING, 0);
    let mut outside: Vec<(f64, f64)> = Vec::new();
    let mut evaluated = 0u64;
    let facets: Vec<((f64, f64), f64)> = facet_list(&hull);
    let tol = check.containment_tolerance;
    for _ in 0..check.samples {
        let p = rng.dirichlet_flat(n_p);
        form.for_each_map(&p, |i1, i2| {
            evaluated += 1;
            for q in [(i2, 0.0), (i2 - i1, i1)] {
                if facets.iter().any(|&(n, c)| n.0 * q.0 + n.1 * q.1 > c + tol) && outside.len() < 1_000_000 {
                    outside.push(q);
                }
            }
        });
    }
    let mut refinements = 0;
    loop {
        let worst = outside
            .iter()
            .map(|&q| (hull_violation(&hull, q), q))
            .reduce(|b, x| if b.0 .0 >= x.0 .0 { b } else { x });
        match worst {
            Some(((d, n), _)) if d > tol && refinements < check.max_refinements => {
                let (nx, ny) = (n.0.max(0.0), n.1.max(0.0));
                let lambda = if nx + ny > 0.0 { nx / (nx + ny) } else { 0.5 };
                pieces.push((lambda, maximize_cooperative_kernel(&kernel, lambda, config)?));
                hull = build_hull(&pieces)?;
                outside.retain(|&q| hull_violation(&hull, q).0 > tol);
                refinements += 1;
            }
            _ => break,
        }
    }
    let max_violation = outside.iter().map(|&q| hull_violation(&hull, q).0).fold(0.0, f64::max);
    r.value("samples", check.samples as f64);
    r.value("maps per sample", (form.options as f64).powi(a.n_xa as i32));
    r.value("rate pairs evaluated", evaluated as f64);
    r.value("hull vertices", hull.len() as f64);
    r.value("refinements", refinements as f64);
    r.value("max violation", max_violation);
    r.assert(
        "auxiliary pairs inside strategy hull",
        max_violation <= tol,
        format!("max violation {max_violation:.3e} tol {tol:.0e} after {refinements} refinements"),
    );

    // (ii) every hull vertex reproduced by the auxiliary form
    let mut worst_match: f64 = 0.0;
    for &v in &hull {
        let source = pieces
            .iter()
            .find(|(_, o)| o.rates.vertices().iter().any(|&w| (w.0 - v.0).abs() <= 1e-12 && (w.1 - v.1).abs() <= 1e-12));
        let dist = match source {
            None if v == (0.0, 0.0) => 0.0,
            None => f64::INFINITY,
            Some((_, o)) => {
                let (i1, i2) = form.strategy_map_rates(o.policy.probs());
                let embedded = crate::optimize::CooperativeRates { r_b: i1, r_sum: i2 };
                embedded
                    .vertices()
                    .iter()
                    .map(|w| (w.0 - v.0).hypot(w.1 - v.1))
                    .fold(f64::INFINITY, f64::min)
            }
        };
        worst_match = worst_match.max(dist);
    }
    r.value("max vertex matching distance", worst_match);
    r.assert(
        "hull vertices matched by auxiliary form",
        worst_match <= check.matching_tolerance,
        format!("max distance {worst_match:.3e} tol {:.0e}", check.matching_tolerance),
    );

    // point-mass auxiliary law gives the zero region in both forms
    let mut point = vec![0.0; n_p];
    point[0] = 1.0;
    let (i1, i2) = form.strategy_map_rates(&point);
    let coop_point = CooperativePolicy::new(a.n_xa, form.n_u, point.clone())?;
    let strat = kernel.cooperative_pair(&coop_point)?;
    r.assert(
        "point mass gives zero rates",
        i1.abs() < 1e-12 && i2.abs() < 1e-12 && strat.0 == 0.0 && strat.1 == 0.0,
        format!("auxiliary ({i1:.3e}, {i2:.3e}) strategy ({:.3e}, {:.3e})", strat.0, strat.1),
    );

    // any stochastic matrix is a mixture of deterministic maps
    let mut drng = Stream::new(config.rng_seed, role::SAMPLING, 1);
    let mut max_err: f64 = 0.0;
    let mut too_many = 0;
    for _ in 0..check.decompositions {
        let rows = 2 + drng.below(4);
        let cols = 2 + drng.below(3);
        let probs: Vec<f64> = (0..rows).flat_map(|_| drng.dirichlet_flat(cols)).collect();
        let m = StochasticKernel::new("random", rows, cols, probs, 1e-12)?;
        let terms = binary_stochastic_decomposition(&m);
        let wsum: f64 = terms.iter().map(|t| t.weight).sum();
        max_err = max_err.max(reconstruction_error(&m, &terms)).max((wsum - 1.0).abs());
        if terms.len() > rows * cols {
            too_many += 1;
        }
    }
    r.value("decomposition max error", max_err);
    r.assert(
        "binary stochastic decompositions reconstruct",
        max_err < 1e-10 && too_many == 0,
        format!("{} matrices, max error {max_err:.3e}, {too_many} over term bound", check.decompositions),
    );
    Ok(r)
}

/// Outward unit normals and offsets `n . x <= c` of a hull.
fn facet_list(hull: &[(f64, f64)]) -> Vec<((f64, f64), f64)> {
    if hull.len() < 3 {
        let max_x = hull.iter().map(|q| q.0).fold(0.0, f64::max);
        let max_y = hull.iter().map(|q| q.1).fold(0.0, f64::max);
        return vec![((1.0, 0.0), max_x), ((0.0, 1.0), max_y), ((std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2), (max_x + max_y) * std::f64::consts::FRAC_1_SQRT_2)];
    }
    (0..hull.len())
        .filter_map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            let n = (b.1 - a.1, a.0 - b.0);
            let len = n.0.hypot(n.1);
            (len > 0.0).then(|| ((n.0 / len, n.1 / len), (n.0 * a.0 + n.1 * a.1) / len))
        })
        .collect()
}
