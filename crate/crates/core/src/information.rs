//! Joint distributions, entropies and the rate bounds they induce.
//!
//! All quantities are in bits.

use crate::error::{Error, Result};
use crate::model::{check_distribution, FsMacChannel, NoisyReceiverModel, StochasticKernel, DEFAULT_ENUMERATION_LIMIT, INPUT_TOLERANCE, INTERNAL_TOLERANCE};
use crate::strategies::StrategySpace;

/// Mutual informations in `[-CLAMP_TOLERANCE, 0)` are reported as 0.
pub const CLAMP_TOLERANCE: f64 = 1e-10;
/// Tolerance on the total mass of a joint distribution.
pub const JOINT_TOLERANCE: f64 = 1e-10;

#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Entropy of a probability vector; `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidDistribution("entries must be finite and nonnegative".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > INPUT_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(p.iter().map(|&x| plogp(x)).sum())
}

/// Binary entropy function.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Clamps float noise around zero; larger negatives are reported as bugs.
pub fn clamp_information(value: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -CLAMP_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::NumericalInconsistency(format!("{what} evaluated to {value:e}")))
    }
}

/// Semantic tag of a tensor axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    State,
    ReceiverState,
    StrategyA,
    StrategyB,
    InputA,
    InputB,
    Auxiliary,
    Output,
}

/// Dense joint probability tensor, row-major over `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    dims: Vec<usize>,
    labels: Vec<Axis>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(dims: Vec<usize>, labels: Vec<Axis>, probs: Vec<f64>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::DimensionMismatch("one label per axis required".into()));
        }
        let size: usize = dims.iter().product();
        if size != probs.len() || size == 0 {
            return Err(Error::DimensionMismatch(format!(
                "tensor of shape {dims:?} needs {size} entries, found {}",
                probs.len()
            )));
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, &p)| !(p >= 0.0)) {
            return Err(Error::NegativeProbability {
                what: "joint distribution".into(),
                index,
                value,
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > JOINT_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("joint mass is {total}")));
        }
        Ok(JointDistribution { dims, labels, probs })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[Axis] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn axis_of(&self, label: Axis) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Marginal over `axes` (kept in the order given).
    pub fn marginal(&self, axes: &[usize]) -> Result<JointDistribution> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.dims.len() {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    bound: self.dims.len(),
                });
            }
            if axes[..i].contains(&a) {
                return Err(Error::AxisOverlap(a));
            }
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let labels: Vec<Axis> = axes.iter().map(|&a| self.labels[a]).collect();
        let mut out_strides = vec![1; axes.len()];
        for i in (0..axes.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * dims[i + 1];
        }
        // stride into the output for each input axis (0 if summed out)
        let mut map = vec![0usize; self.dims.len()];
        for (k, &a) in axes.iter().enumerate() {
            map[a] = out_strides[k];
        }
        let mut probs = vec![0.0; dims.iter().product::<usize>().max(1)];
        let mut idx = vec![0usize; self.dims.len()];
        let mut out = 0usize;
        for &p in &self.probs {
            probs[out] += p;
            // odometer increment
            for ax in (0..self.dims.len()).rev() {
                idx[ax] += 1;
                out += map[ax];
                if idx[ax] < self.dims[ax] {
                    break;
                }
                out -= map[ax] * self.dims[ax];
                idx[ax] = 0;
            }
        }
        let _ = self.strides();
        Ok(JointDistribution {
            dims: if dims.is_empty() { vec![1] } else { dims },
            labels: if labels.is_empty() { vec![Axis::Auxiliary] } else { labels },
            probs,
        })
    }

    /// Entropy of the whole tensor.
    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&p| plogp(p)).sum()
    }

    /// Entropy of the marginal over `axes`.
    pub fn entropy_of(&self, axes: &[usize]) -> Result<f64> {
        if axes.is_empty() {
            return Ok(0.0);
        }
        Ok(self.marginal(axes)?.entropy())
    }
}

/// `I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`, with axes not named
/// marginalized out first.
pub fn conditional_mutual_information(joint: &JointDistribution, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    for &x in a {
        if b.contains(&x) || c.contains(&x) {
            return Err(Error::AxisOverlap(x));
        }
    }
    for &x in b {
        if c.contains(&x) {
            return Err(Error::AxisOverlap(x));
        }
    }
    let cat = |parts: &[&[usize]]| parts.concat();
    let h_ac = joint.entropy_of(&cat(&[a, c]))?;
    let h_bc = joint.entropy_of(&cat(&[b, c]))?;
    let h_abc = joint.entropy_of(&cat(&[a, b, c]))?;
    let h_c = joint.entropy_of(c)?;
    clamp_information(h_ac + h_bc - h_abc - h_c, "conditional mutual information")
}

/// Pair of independent strategy distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct TeamPolicy {
    pi_a: Vec<f64>,
    pi_b: Vec<f64>,
}

impl TeamPolicy {
    pub fn new(pi_a: Vec<f64>, pi_b: Vec<f64>) -> Result<Self> {
        check_distribution("piA", &pi_a, INTERNAL_TOLERANCE)?;
        check_distribution("piB", &pi_b, INTERNAL_TOLERANCE)?;
        Ok(TeamPolicy { pi_a, pi_b })
    }

    pub fn uniform(n_a: usize, n_b: usize) -> Self {
        TeamPolicy {
            pi_a: vec![1.0 / n_a as f64; n_a],
            pi_b: vec![1.0 / n_b as f64; n_b],
        }
    }

    pub fn point_mass(n_a: usize, t_a: usize, n_b: usize, t_b: usize) -> Result<Self> {
        let mut pi_a = vec![0.0; n_a];
        let mut pi_b = vec![0.0; n_b];
        *pi_a.get_mut(t_a).ok_or(Error::IndexOutOfRange { index: t_a, bound: n_a })? = 1.0;
        *pi_b.get_mut(t_b).ok_or(Error::IndexOutOfRange { index: t_b, bound: n_b })? = 1.0;
        Ok(TeamPolicy { pi_a, pi_b })
    }

    pub fn pi_a(&self) -> &[f64] {
        &self.pi_a
    }

    pub fn pi_b(&self) -> &[f64] {
        &self.pi_b
    }

    pub(crate) fn from_parts_unchecked(pi_a: Vec<f64>, pi_b: Vec<f64>) -> Self {
        TeamPolicy { pi_a, pi_b }
    }
}

/// Joint law of encoder a's input and encoder b's strategy, without a
/// product constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct CooperativePolicy {
    n_xa: usize,
    n_tb: usize,
    probs: Vec<f64>,
}

impl CooperativePolicy {
    /// `probs` is row-major `(x_a, t_b)`.
    pub fn new(n_xa: usize, n_tb: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != n_xa * n_tb {
            return Err(Error::DimensionMismatch(format!(
                "joint policy needs {} entries, found {}",
                n_xa * n_tb,
                probs.len()
            )));
        }
        check_distribution("piJoint", &probs, INTERNAL_TOLERANCE)?;
        Ok(CooperativePolicy { n_xa, n_tb, probs })
    }

    pub fn product(pi_a: &[f64], pi_b: &[f64]) -> Result<Self> {
        let probs = pi_a.iter().flat_map(|&a| pi_b.iter().map(move |&b| a * b)).collect();
        Self::new(pi_a.len(), pi_b.len(), probs)
    }

    pub fn n_xa(&self) -> usize {
        self.n_xa
    }

    pub fn n_tb(&self) -> usize {
        self.n_tb
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, xa: usize, tb: usize) -> f64 {
        self.probs[xa * self.n_tb + tb]
    }

    pub(crate) fn from_parts_unchecked(n_xa: usize, n_tb: usize, probs: Vec<f64>) -> Self {
        CooperativePolicy { n_xa, n_tb, probs }
    }
}

/// Input distributions conditioned on CSI that is a deterministic function
/// of the receiver CSI: `pi(x_a | f_a(s^r))`, `pi(x_b | f_b(s^r))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedInputPolicy {
    pub pi_a_given_csi: StochasticKernel,
    pub pi_b_given_csi: StochasticKernel,
    /// Lookup table `s^r -> s^a`.
    pub f_a: Vec<usize>,
    /// Lookup table `s^r -> s^b`.
    pub f_b: Vec<usize>,
}

/// The three pentagon bounds of one policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateTriple {
    pub r_a: f64,
    pub r_b: f64,
    pub r_sum: f64,
}

impl RateTriple {
    /// Vertices of the rate pentagon, counterclockwise from the origin.
    pub fn pentagon_vertices(&self) -> [(f64, f64); 5] {
        let ra = self.r_a.min(self.r_sum);
        let rb = self.r_b.min(self.r_sum);
        [
            (0.0, 0.0),
            (ra, 0.0),
            (ra, (self.r_sum - ra).min(rb)),
            ((self.r_sum - rb).min(ra), rb),
            (0.0, rb),
        ]
    }

    /// Largest `lambda R_a + (1 - lambda) R_b` over the pentagon.
    pub fn support(&self, lambda: f64) -> f64 {
        self.pentagon_vertices()
            .iter()
            .map(|&(x, y)| lambda * x + (1.0 - lambda) * y)
            .fold(0.0, f64::max)
    }
}

/// Strategy-level channel `P(y | t_a, t_b, s)` together with the state law.
///
/// Indexed `((t_a * n_tb + t_b) * n_s + s) * n_y + y`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyKernel {
    pub(crate) n_s: usize,
    pub(crate) n_ta: usize,
    pub(crate) n_tb: usize,
    pub(crate) n_y: usize,
    pub(crate) state_dist: Vec<f64>,
    pub(crate) probs: Vec<f64>,
}

impl StrategyKernel {
    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_ta(&self) -> usize {
        self.n_ta
    }

    pub fn n_tb(&self) -> usize {
        self.n_tb
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn state_dist(&self) -> &[f64] {
        &self.state_dist
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn offset(&self, ta: usize, tb: usize, s: usize) -> usize {
        ((ta * self.n_tb + tb) * self.n_s + s) * self.n_y
    }

    #[inline]
    pub fn row(&self, ta: usize, tb: usize, s: usize) -> &[f64] {
        let o = self.offset(ta, tb, s);
        &self.probs[o..o + self.n_y]
    }

    /// Kernel over raw inputs, ignoring any encoder CSI.
    pub fn from_inputs(channel: &FsMacChannel) -> StrategyKernel {
        let a = channel.alphabets();
        StrategyKernel {
            n_s: a.n_s,
            n_ta: a.n_xa,
            n_tb: a.n_xb,
            n_y: a.n_y,
            state_dist: channel.state_dist().to_vec(),
            probs: channel.channel().probs().to_vec(),
        }
    }

    /// Averages the state out, for a receiver without CSI.
    pub fn average_state(&self) -> StrategyKernel {
        let mut probs = vec![0.0; self.n_ta * self.n_tb * self.n_y];
        for ta in 0..self.n_ta {
            for tb in 0..self.n_tb {
                let out = (ta * self.n_tb + tb) * self.n_y;
                for s in 0..self.n_s {
                    let w = self.state_dist[s];
                    for (y, &p) in self.row(ta, tb, s).iter().enumerate() {
                        probs[out + y] += w * p;
                    }
                }
            }
        }
        StrategyKernel {
            n_s: 1,
            n_ta: self.n_ta,
            n_tb: self.n_tb,
            n_y: self.n_y,
            state_dist: vec![1.0],
            probs,
        }
    }

    /// Joint `P(s, t_a, t_b, y)` of a team policy.
    pub fn joint(&self, policy: &TeamPolicy) -> Result<JointDistribution> {
        if policy.pi_a.len() != self.n_ta || policy.pi_b.len() != self.n_tb {
            return Err(Error::DimensionMismatch(format!(
                "policy sizes ({}, {}) do not match strategy spaces ({}, {})",
                policy.pi_a.len(),
                policy.pi_b.len(),
                self.n_ta,
                self.n_tb
            )));
        }
        let mut probs = vec![0.0; self.n_s * self.n_ta * self.n_tb * self.n_y];
        for s in 0..self.n_s {
            for ta in 0..self.n_ta {
                for tb in 0..self.n_tb {
                    let w = self.state_dist[s] * policy.pi_a[ta] * policy.pi_b[tb];
                    let out = ((s * self.n_ta + ta) * self.n_tb + tb) * self.n_y;
                    for (y, &p) in self.row(ta, tb, s).iter().enumerate() {
                        probs[out + y] = w * p;
                    }
                }
            }
        }
        JointDistribution::new(
            vec![self.n_s, self.n_ta, self.n_tb, self.n_y],
            vec![Axis::State, Axis::StrategyA, Axis::StrategyB, Axis::Output],
            probs,
        )
    }

    /// Joint `P(s, x_a, t_b, y)` of a cooperative policy.
    pub fn cooperative_joint(&self, policy: &CooperativePolicy) -> Result<JointDistribution> {
        if policy.n_xa != self.n_ta || policy.n_tb != self.n_tb {
            return Err(Error::DimensionMismatch(format!(
                "joint policy is {}x{}, kernel expects {}x{}",
                policy.n_xa, policy.n_tb, self.n_ta, self.n_tb
            )));
        }
        let mut probs = vec![0.0; self.n_s * self.n_ta * self.n_tb * self.n_y];
        for s in 0..self.n_s {
            for xa in 0..self.n_ta {
                for tb in 0..self.n_tb {
                    let w = self.state_dist[s] * policy.get(xa, tb);
                    let out = ((s * self.n_ta + xa) * self.n_tb + tb) * self.n_y;
                    for (y, &p) in self.row(xa, tb, s).iter().enumerate() {
                        probs[out + y] = w * p;
                    }
                }
            }
        }
        JointDistribution::new(
            vec![self.n_s, self.n_ta, self.n_tb, self.n_y],
            vec![Axis::State, Axis::InputA, Axis::StrategyB, Axis::Output],
            probs,
        )
    }

    /// Pentagon bounds of a team policy, evaluated on the joint tensor.
    pub fn rate_triple(&self, policy: &TeamPolicy) -> Result<RateTriple> {
        let joint = self.joint(policy)?;
        triple_from_joint(&joint)
    }

    /// `(I(T_b;Y|X_a,S), I(X_a,T_b;Y|S))` of a cooperative policy.
    pub fn cooperative_pair(&self, policy: &CooperativePolicy) -> Result<(f64, f64)> {
        let joint = self.cooperative_joint(policy)?;
        let r_b = conditional_mutual_information(&joint, &[2], &[3], &[1, 0])?;
        let r_sum = conditional_mutual_information(&joint, &[1, 2], &[3], &[0])?;
        Ok((r_b, r_sum))
    }
}

fn triple_from_joint(joint: &JointDistribution) -> Result<RateTriple> {
    // axes: 0 = state, 1 = encoder a, 2 = encoder b, 3 = output
    let r_a = conditional_mutual_information(joint, &[1], &[3], &[2, 0])?;
    let r_b = conditional_mutual_information(joint, &[2], &[3], &[1, 0])?;
    let r_sum = conditional_mutual_information(joint, &[1, 2], &[3], &[0])?;
    Ok(RateTriple { r_a, r_b, r_sum })
}

/// `P(y | t_a, t_b, s) = sum_{s^a, s^b} P(y | t_a(s^a), t_b(s^b), s) P(s^a|s) P(s^b|s)`.
pub fn strategy_channel(channel: &FsMacChannel, limit: usize) -> Result<StrategyKernel> {
    let a = channel.alphabets();
    let space_a = StrategySpace::new(a.n_xa, a.n_sa, limit)?;
    let space_b = StrategySpace::new(a.n_xb, a.n_sb, limit)?;
    let table_a = space_a.lookup_table();
    let table_b = space_b.lookup_table();
    let (n_ta, n_tb) = (space_a.count(), space_b.count());
    let mut probs = vec![0.0; n_ta * n_tb * a.n_s * a.n_y];
    let kernel = StrategyKernel {
        n_s: a.n_s,
        n_ta,
        n_tb,
        n_y: a.n_y,
        state_dist: channel.state_dist().to_vec(),
        probs: Vec::new(),
    };
    for ta in 0..n_ta {
        let map_a = &table_a[ta * a.n_sa..(ta + 1) * a.n_sa];
        for tb in 0..n_tb {
            let map_b = &table_b[tb * a.n_sb..(tb + 1) * a.n_sb];
            for s in 0..a.n_s {
                let out = kernel.offset(ta, tb, s);
                for (sa, &xa) in map_a.iter().enumerate() {
                    let wa = channel.csi_a().get(s, sa);
                    if wa == 0.0 {
                        continue;
                    }
                    for (sb, &xb) in map_b.iter().enumerate() {
                        let w = wa * channel.csi_b().get(s, sb);
                        if w == 0.0 {
                            continue;
                        }
                        let row = channel.channel().row(a.channel_row(xa, xb, s));
                        for (y, &p) in row.iter().enumerate() {
                            probs[out + y] += w * p;
                        }
                    }
                }
            }
        }
    }
    Ok(StrategyKernel { probs, ..kernel })
}

/// Joint `P(s, t_a, t_b, y) = P_S(s) P(y|t_a,t_b,s) pi_a(t_a) pi_b(t_b)`.
pub fn joint_distribution(channel: &FsMacChannel, policy: &TeamPolicy) -> Result<JointDistribution> {
    strategy_channel(channel, DEFAULT_ENUMERATION_LIMIT)?.joint(policy)
}

/// `(I(T_a;Y|T_b,S), I(T_b;Y|T_a,S), I(T_a,T_b;Y|S))`.
pub fn rate_triple(channel: &FsMacChannel, policy: &TeamPolicy) -> Result<RateTriple> {
    triple_from_joint(&joint_distribution(channel, policy)?)
}

/// Kernel used by the cooperative scenarios: encoder a sends raw inputs,
/// encoder b uses Shannon strategies on its CSI.
pub fn cooperative_kernel(channel: &FsMacChannel, limit: usize) -> Result<StrategyKernel> {
    strategy_channel(&channel.with_uninformed_a(), limit)
}

/// `(I(T_b;Y|X_a,S), I(X_a,T_b;Y|S))` for a joint policy over `(x_a, t_b)`.
/// Encoder a's CSI is not used (it only sees delayed CSI).
pub fn cooperative_rate_pair(channel: &FsMacChannel, policy: &CooperativePolicy) -> Result<(f64, f64)> {
    cooperative_kernel(channel, DEFAULT_ENUMERATION_LIMIT)?.cooperative_pair(policy)
}

/// Rate triple `(I(X_a;Y|X_b,S^r), I(X_b;Y|X_a,S^r), I(X_a,X_b;Y|S^r))` for
/// input distributions conditioned on deterministic functions of `s^r`.
pub fn conditioned_input_rate_triple(model: &NoisyReceiverModel, policy: &ConditionedInputPolicy) -> Result<RateTriple> {
    let eq = crate::model::equivalent_channel(model)?;
    let a = *eq.alphabets();
    let n_sr = a.n_s;
    let (ka, kb) = (&policy.pi_a_given_csi, &policy.pi_b_given_csi);
    if policy.f_a.len() != n_sr || policy.f_b.len() != n_sr {
        return Err(Error::DimensionMismatch(format!("CSIT maps need {n_sr} entries")));
    }
    if ka.cols() != a.n_xa || kb.cols() != a.n_xb {
        return Err(Error::DimensionMismatch("policy columns must match the input alphabets".into()));
    }
    for (&f, k) in policy.f_a.iter().map(|f| (f, ka)).chain(policy.f_b.iter().map(|f| (f, kb))) {
        if f >= k.rows() {
            return Err(Error::IndexOutOfRange { index: f, bound: k.rows() });
        }
    }
    let mut probs = vec![0.0; n_sr * a.n_xa * a.n_xb * a.n_y];
    for sr in 0..n_sr {
        for xa in 0..a.n_xa {
            for xb in 0..a.n_xb {
                let w = eq.state_dist()[sr] * ka.get(policy.f_a[sr], xa) * kb.get(policy.f_b[sr], xb);
                let out = ((sr * a.n_xa + xa) * a.n_xb + xb) * a.n_y;
                for y in 0..a.n_y {
                    probs[out + y] = w * eq.transition(xa, xb, sr, y);
                }
            }
        }
    }
    let joint = JointDistribution::new(
        vec![n_sr, a.n_xa, a.n_xb, a.n_y],
        vec![Axis::ReceiverState, Axis::InputA, Axis::InputB, Axis::Output],
        probs,
    )?;
    triple_from_joint(&joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_modulo_additive, Alphabets, ModuloAdditiveSpec};

    fn xor_mac() -> FsMacChannel {
        let mut k = Vec::new();
        for xa in 0..2 {
            for xb in 0..2 {
                let y = xa ^ xb;
                k.extend(if y == 0 { [1.0, 0.0] } else { [0.0, 1.0] });
            }
        }
        FsMacChannel::without_csit(1, 2, 2, 2, vec![1.0], StochasticKernel::new("xor", 4, 2, k, 1e-12).unwrap()).unwrap()
    }

    fn bsc_csit_modulo() -> (ModuloAdditiveSpec, FsMacChannel) {
        let bsc = StochasticKernel::new("bsc", 2, 2, vec![0.9, 0.1, 0.1, 0.9], 1e-12).unwrap();
        let spec = ModuloAdditiveSpec {
            q: 2,
            state_dist: vec![0.5, 0.5],
            csi_a: bsc.clone(),
            csi_b: bsc,
            noise_given_state: StochasticKernel::identity(2),
        };
        let ch = build_modulo_additive(&spec).unwrap();
        (spec, ch)
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        let closed = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert!((entropy(&[0.25, 0.75]).unwrap() - closed).abs() < 1e-15);
        assert!((entropy(&[0.25, 0.75]).unwrap() - 0.8112781245).abs() < 1e-10);
        assert!(matches!(entropy(&[0.5, 0.4]), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn cmi_independent_and_self_information() {
        // A, B independent given C
        let pa = [0.3, 0.7];
        let pb = [0.6, 0.4];
        let mut probs = Vec::new();
        for c in 0..2 {
            for a in pa {
                for b in 0..2 {
                    probs.push(0.5 * a * if c == 0 { pb[b] } else { pb[1 - b] });
                }
            }
        }
        let j = JointDistribution::new(vec![2, 2, 2], vec![Axis::State, Axis::InputA, Axis::InputB], probs).unwrap();
        assert!(conditional_mutual_information(&j, &[1], &[2], &[0]).unwrap().abs() < 1e-10);

        // A = B copies, trivial C
        let j = JointDistribution::new(vec![1, 2, 2], vec![Axis::State, Axis::InputA, Axis::InputB], vec![0.3, 0.0, 0.0, 0.7]).unwrap();
        let h = entropy(&[0.3, 0.7]).unwrap();
        assert!((conditional_mutual_information(&j, &[1], &[2], &[0]).unwrap() - h).abs() < 1e-12);
        assert!(matches!(conditional_mutual_information(&j, &[1], &[1], &[0]), Err(Error::AxisOverlap(1))));
    }

    #[test]
    fn raw_channel_when_no_csi() {
        let ch = xor_mac();
        let k = strategy_channel(&ch, 4096).unwrap();
        assert_eq!(k.probs(), ch.channel().probs());
    }

    #[test]
    fn perfect_csit_is_deterministic_marginalization() {
        let (_, ch) = {
            let spec = ModuloAdditiveSpec {
                q: 2,
                state_dist: vec![0.3, 0.7],
                csi_a: StochasticKernel::identity(2),
                csi_b: StochasticKernel::identity(2),
                noise_given_state: StochasticKernel::new("z", 2, 2, vec![0.8, 0.2, 0.35, 0.65], 1e-12).unwrap(),
            };
            let ch = build_modulo_additive(&spec).unwrap();
            (spec, ch)
        };
        let k = strategy_channel(&ch, 4096).unwrap();
        let sa = StrategySpace::new(2, 2, 4096).unwrap();
        for ta in sa.enumerate() {
            for tb in sa.enumerate() {
                for s in 0..2 {
                    for y in 0..2 {
                        let direct = ch.transition(ta.apply(s).unwrap(), tb.apply(s).unwrap(), s, y);
                        assert_eq!(k.row(ta.index(), tb.index(), s)[y], direct);
                    }
                }
            }
        }
    }

    #[test]
    fn noisy_csit_strategy_channel_double_sum() {
        let (_, ch) = bsc_csit_modulo();
        let k = strategy_channel(&ch, 4096).unwrap();
        let space = StrategySpace::new(2, 2, 4096).unwrap();
        for ta in space.enumerate() {
            for tb in space.enumerate() {
                for s in 0..2 {
                    for y in 0..2 {
                        let mut acc = 0.0;
                        for sa in 0..2 {
                            for sb in 0..2 {
                                let pa = if sa == s { 0.9 } else { 0.1 };
                                let pb = if sb == s { 0.9 } else { 0.1 };
                                let out = ta.apply(sa).unwrap() ^ tb.apply(sb).unwrap() ^ s;
                                acc += pa * pb * if out == y { 1.0 } else { 0.0 };
                            }
                        }
                        assert!((k.row(ta.index(), tb.index(), s)[y] - acc).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn point_mass_policy_slice_and_zero_rates() {
        let (_, ch) = bsc_csit_modulo();
        let p = TeamPolicy::point_mass(4, 1, 4, 2).unwrap();
        let j = joint_distribution(&ch, &p).unwrap();
        for (i, &v) in j.probs().iter().enumerate() {
            let tb = (i / 2) % 4;
            let ta = (i / 8) % 4;
            if (ta, tb) != (1, 2) {
                assert_eq!(v, 0.0);
            }
        }
        let t = rate_triple(&ch, &p).unwrap();
        assert_eq!((t.r_a, t.r_b, t.r_sum), (0.0, 0.0, 0.0));
    }

    #[test]
    fn joint_has_product_policy_marginal() {
        let (_, ch) = bsc_csit_modulo();
        let p = TeamPolicy::new(vec![0.1, 0.2, 0.3, 0.4], vec![0.25, 0.5, 0.0, 0.25]).unwrap();
        let j = joint_distribution(&ch, &p).unwrap();
        let m = j.marginal(&[1, 2]).unwrap();
        for ta in 0..4 {
            for tb in 0..4 {
                assert!((m.probs()[ta * 4 + tb] - p.pi_a()[ta] * p.pi_b()[tb]).abs() < 1e-15);
            }
        }
        let ms = j.marginal(&[0]).unwrap();
        assert!((ms.probs()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_policy_output_uniform_given_state() {
        let (_, ch) = bsc_csit_modulo();
        let j = joint_distribution(&ch, &TeamPolicy::uniform(4, 4)).unwrap();
        let m = j.marginal(&[0, 3]).unwrap();
        for s in 0..2 {
            for y in 0..2 {
                assert!((m.probs()[s * 2 + y] / 0.5 - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xor_mac_uniform_rates() {
        let t = rate_triple(&xor_mac(), &TeamPolicy::uniform(2, 2)).unwrap();
        assert!((t.r_a - 1.0).abs() < 1e-12);
        assert!((t.r_b - 1.0).abs() < 1e-12);
        assert!((t.r_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cooperative_product_matches_team_policy() {
        let (_, ch) = bsc_csit_modulo();
        // cooperative: encoder a uses raw inputs
        let pa = vec![0.3, 0.7];
        let pb = vec![0.1, 0.2, 0.3, 0.4];
        let coop = CooperativePolicy::product(&pa, &pb).unwrap();
        let (rb, rsum) = cooperative_rate_pair(&ch, &coop).unwrap();
        let team = rate_triple(&ch.with_uninformed_a(), &TeamPolicy::new(pa, pb).unwrap()).unwrap();
        assert!((rb - team.r_b).abs() < 1e-10);
        assert!((rsum - team.r_sum).abs() < 1e-10);

        let pm = CooperativePolicy::new(2, 4, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(cooperative_rate_pair(&ch, &pm).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn cooperative_correlated_policy_brute_force() {
        // binary channel without encoder CSI at b either: Y = Xa AND Xb with a BSC(0.2) on top
        let mut k = Vec::new();
        for xa in 0..2 {
            for xb in 0..2 {
                let y = xa & xb;
                k.extend(if y == 0 { [0.8, 0.2] } else { [0.2, 0.8] });
            }
        }
        let ch = FsMacChannel::without_csit(1, 2, 2, 2, vec![1.0], StochasticKernel::new("and", 4, 2, k.clone(), 1e-12).unwrap()).unwrap();
        let pol = CooperativePolicy::new(2, 2, vec![0.4, 0.1, 0.05, 0.45]).unwrap();
        let (rb, rsum) = cooperative_rate_pair(&ch, &pol).unwrap();

        // literal table build
        let mut pxy = [[[0.0; 2]; 2]; 2];
        for xa in 0..2 {
            for xb in 0..2 {
                for y in 0..2 {
                    pxy[xa][xb][y] = pol.get(xa, xb) * k[(xa * 2 + xb) * 2 + y];
                }
            }
        }
        let h = |v: &[f64]| v.iter().map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 }).sum::<f64>();
        let py: Vec<f64> = (0..2).map(|y| (0..2).map(|a| (0..2).map(|b| pxy[a][b][y]).sum::<f64>()).sum()).collect();
        let pxa_y: Vec<f64> = (0..4).map(|i| (0..2).map(|b| pxy[i / 2][b][i % 2]).sum()).collect();
        let pxa: Vec<f64> = (0..2).map(|a| pol.get(a, 0) + pol.get(a, 1)).collect();
        let full: Vec<f64> = pxy.iter().flatten().flatten().copied().collect();
        let pab = pol.probs();
        let h_y_given_ab = h(&full) - h(pab);
        let oracle_rsum = h(&py) - h_y_given_ab;
        let oracle_rb = (h(&pxa_y) - h(&pxa)) - h_y_given_ab;
        assert!((rsum - oracle_rsum).abs() < 1e-12);
        assert!((rb - oracle_rb).abs() < 1e-12);
    }

    #[test]
    fn average_state_kernel_sums() {
        let (_, ch) = bsc_csit_modulo();
        let k = strategy_channel(&ch, 4096).unwrap().average_state();
        assert_eq!(k.n_s(), 1);
        for r in k.probs().chunks(2) {
            assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let _ = Alphabets::new(1, 1, 1, 1, 1, 1);
    }
}
