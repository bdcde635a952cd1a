//! Channel and side-information models.
//!
//! Every model is validated on construction and immutable afterwards. Index
//! conventions (all row-major):
//!
//! * CSI kernels: row `s`, column `s^a` (resp. `s^b`).
//! * Channel kernel: row `(x_a * nXb + x_b) * nS + s`, column `y`.
//! * Noisy-receiver kernels are conditioned on `s^r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::strategy_count;

/// Row-sum tolerance for user supplied probabilities.
pub const INPUT_TOLERANCE: f64 = 1e-9;
/// Row-sum tolerance for kernels built by this crate.
pub const INTERNAL_TOLERANCE: f64 = 1e-12;
/// Default cap on the number of Shannon strategies per encoder.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 4096;

/// Alphabet sizes of a finite-state MAC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabets {
    #[serde(rename = "nS")]
    pub n_s: usize,
    #[serde(rename = "nSa")]
    pub n_sa: usize,
    #[serde(rename = "nSb")]
    pub n_sb: usize,
    #[serde(rename = "nXa")]
    pub n_xa: usize,
    #[serde(rename = "nXb")]
    pub n_xb: usize,
    #[serde(rename = "nY")]
    pub n_y: usize,
    #[serde(rename = "nSr", default, skip_serializing_if = "Option::is_none")]
    pub n_sr: Option<usize>,
}

impl Alphabets {
    pub fn new(n_s: usize, n_sa: usize, n_sb: usize, n_xa: usize, n_xb: usize, n_y: usize) -> Self {
        Alphabets {
            n_s,
            n_sa,
            n_sb,
            n_xa,
            n_xb,
            n_y,
            n_sr: None,
        }
    }

    /// Checks sizes and that both strategy spaces fit within `limit`.
    pub fn validate(&self, limit: usize) -> Result<()> {
        let sizes = [
            ("nS", self.n_s),
            ("nSa", self.n_sa),
            ("nSb", self.n_sb),
            ("nXa", self.n_xa),
            ("nXb", self.n_xb),
            ("nY", self.n_y),
        ];
        for (name, n) in sizes {
            if n == 0 {
                return Err(Error::DimensionMismatch(format!("{name} must be at least 1")));
            }
        }
        if self.n_sr == Some(0) {
            return Err(Error::DimensionMismatch("nSr must be at least 1".into()));
        }
        strategy_count(self.n_xa, self.n_sa, limit)?;
        strategy_count(self.n_xb, self.n_sb, limit)?;
        Ok(())
    }

    /// Number of rows of the channel kernel.
    pub fn channel_rows(&self) -> usize {
        self.n_xa * self.n_xb * self.n_s
    }

    pub fn channel_row(&self, xa: usize, xb: usize, s: usize) -> usize {
        (xa * self.n_xb + xb) * self.n_s + s
    }
}

/// A row-stochastic matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticKernel {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl StochasticKernel {
    /// Builds a kernel and checks it against `tolerance`.
    pub fn new(name: &str, rows: usize, cols: usize, probs: Vec<f64>, tolerance: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("{name}: empty kernel")));
        }
        if probs.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{name}: expected {rows}x{cols} entries, found {}",
                probs.len()
            )));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeProbability {
                    what: name.to_string(),
                    index,
                    value,
                });
            }
        }
        for (row, chunk) in probs.chunks(cols).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > tolerance {
                return Err(Error::NonStochasticRow {
                    kernel: name.to_string(),
                    row,
                    sum,
                });
            }
        }
        Ok(StochasticKernel { rows, cols, probs })
    }

    /// Builds a kernel from nested rows.
    pub fn from_rows(name: &str, rows: &[Vec<f64>], tolerance: f64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "{name}: row {i} has {} columns, expected {cols}",
                r.len()
            )));
        }
        Self::new(name, rows.len(), cols, rows.concat(), tolerance)
    }

    pub fn identity(n: usize) -> Self {
        let mut probs = vec![0.0; n * n];
        for i in 0..n {
            probs[i * n + i] = 1.0;
        }
        StochasticKernel { rows: n, cols: n, probs }
    }

    /// Kernel whose every row is `row`.
    pub fn constant_rows(rows: usize, row: &[f64]) -> Self {
        StochasticKernel {
            rows,
            cols: row.len(),
            probs: row.repeat(rows),
        }
    }

    /// Deterministic kernel `1{col = map[row]}`.
    pub fn deterministic(map: &[usize], cols: usize) -> Result<Self> {
        let mut probs = vec![0.0; map.len() * cols];
        for (r, &c) in map.iter().enumerate() {
            if c >= cols {
                return Err(Error::IndexOutOfRange { index: c, bound: cols });
            }
            probs[r * cols + c] = 1.0;
        }
        Self::new("deterministic map", map.len(), cols, probs, INTERNAL_TOLERANCE)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.probs[row * self.cols..(row + 1) * self.cols]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Whether the kernel is the identity map.
    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == if r == c { 1.0 } else { 0.0 }))
    }
}

/// Validates a probability vector.
pub fn check_distribution(name: &str, p: &[f64], tolerance: f64) -> Result<()> {
    StochasticKernel::new(name, 1, p.len(), p.to_vec(), tolerance).map(|_| ())
}

fn check_kernel_shape(name: &str, k: &StochasticKernel, rows: usize, cols: usize) -> Result<()> {
    if k.rows != rows || k.cols != cols {
        return Err(Error::DimensionMismatch(format!(
            "{name}: expected {rows}x{cols}, found {}x{}",
            k.rows, k.cols
        )));
    }
    Ok(())
}

/// Memoryless finite-state MAC with noisy CSI at both encoders and complete
/// CSI at the receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct FsMacChannel {
    alphabets: Alphabets,
    state_dist: Vec<f64>,
    csi_a: StochasticKernel,
    csi_b: StochasticKernel,
    channel: StochasticKernel,
}

impl FsMacChannel {
    pub fn new(
        alphabets: Alphabets,
        state_dist: Vec<f64>,
        csi_a: StochasticKernel,
        csi_b: StochasticKernel,
        channel: StochasticKernel,
    ) -> Result<Self> {
        Self::with_limit(alphabets, state_dist, csi_a, csi_b, channel, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn with_limit(
        alphabets: Alphabets,
        state_dist: Vec<f64>,
        csi_a: StochasticKernel,
        csi_b: StochasticKernel,
        channel: StochasticKernel,
        limit: usize,
    ) -> Result<Self> {
        alphabets.validate(limit)?;
        if state_dist.len() != alphabets.n_s {
            return Err(Error::DimensionMismatch(format!(
                "stateDist has {} entries, nS = {}",
                state_dist.len(),
                alphabets.n_s
            )));
        }
        check_distribution("stateDist", &state_dist, INPUT_TOLERANCE)?;
        check_kernel_shape("csiA", &csi_a, alphabets.n_s, alphabets.n_sa)?;
        check_kernel_shape("csiB", &csi_b, alphabets.n_s, alphabets.n_sb)?;
        check_kernel_shape("channel", &channel, alphabets.channel_rows(), alphabets.n_y)?;
        Ok(FsMacChannel {
            alphabets: Alphabets { n_sr: None, ..alphabets },
            state_dist,
            csi_a,
            csi_b,
            channel,
        })
    }

    /// Channel without side information at either encoder.
    pub fn without_csit(n_s: usize, n_xa: usize, n_xb: usize, n_y: usize, state_dist: Vec<f64>, channel: StochasticKernel) -> Result<Self> {
        let alphabets = Alphabets::new(n_s, 1, 1, n_xa, n_xb, n_y);
        Self::new(
            alphabets,
            state_dist,
            StochasticKernel::constant_rows(n_s, &[1.0]),
            StochasticKernel::constant_rows(n_s, &[1.0]),
            channel,
        )
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn state_dist(&self) -> &[f64] {
        &self.state_dist
    }

    pub fn csi_a(&self) -> &StochasticKernel {
        &self.csi_a
    }

    pub fn csi_b(&self) -> &StochasticKernel {
        &self.csi_b
    }

    pub fn channel(&self) -> &StochasticKernel {
        &self.channel
    }

    /// `P(y | x_a, x_b, s)`.
    #[inline]
    pub fn transition(&self, xa: usize, xb: usize, s: usize, y: usize) -> f64 {
        self.channel.get(self.alphabets.channel_row(xa, xb, s), y)
    }

    /// Same channel with the CSI at encoder a removed.
    pub fn with_uninformed_a(&self) -> FsMacChannel {
        FsMacChannel {
            alphabets: Alphabets { n_sa: 1, ..self.alphabets },
            csi_a: StochasticKernel::constant_rows(self.alphabets.n_s, &[1.0]),
            ..self.clone()
        }
    }

    /// Same channel with the CSI at both encoders removed.
    pub fn with_uninformed_encoders(&self) -> FsMacChannel {
        FsMacChannel {
            alphabets: Alphabets {
                n_sa: 1,
                n_sb: 1,
                ..self.alphabets
            },
            csi_a: StochasticKernel::constant_rows(self.alphabets.n_s, &[1.0]),
            csi_b: StochasticKernel::constant_rows(self.alphabets.n_s, &[1.0]),
            ..self.clone()
        }
    }
}

/// Model with noisy CSI at the receiver, factorized as
/// `P(s^a|s^r) P(s^b|s^r) P(s|s^r) P(s^r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyReceiverModel {
    alphabets: Alphabets,
    sr_dist: Vec<f64>,
    state_given_sr: StochasticKernel,
    csi_a_given_sr: StochasticKernel,
    csi_b_given_sr: StochasticKernel,
    channel: StochasticKernel,
}

impl NoisyReceiverModel {
    pub fn new(
        alphabets: Alphabets,
        sr_dist: Vec<f64>,
        state_given_sr: StochasticKernel,
        csi_a_given_sr: StochasticKernel,
        csi_b_given_sr: StochasticKernel,
        channel: StochasticKernel,
    ) -> Result<Self> {
        Self::with_limit(
            alphabets,
            sr_dist,
            state_given_sr,
            csi_a_given_sr,
            csi_b_given_sr,
            channel,
            DEFAULT_ENUMERATION_LIMIT,
        )
    }

    pub fn with_limit(
        alphabets: Alphabets,
        sr_dist: Vec<f64>,
        state_given_sr: StochasticKernel,
        csi_a_given_sr: StochasticKernel,
        csi_b_given_sr: StochasticKernel,
        channel: StochasticKernel,
        limit: usize,
    ) -> Result<Self> {
        alphabets.validate(limit)?;
        let n_sr = alphabets
            .n_sr
            .ok_or_else(|| Error::DimensionMismatch("noisy-receiver model requires nSr".into()))?;
        if sr_dist.len() != n_sr {
            return Err(Error::DimensionMismatch(format!(
                "srDist has {} entries, nSr = {n_sr}",
                sr_dist.len()
            )));
        }
        check_distribution("srDist", &sr_dist, INPUT_TOLERANCE)?;
        check_kernel_shape("stateGivenSr", &state_given_sr, n_sr, alphabets.n_s)?;
        check_kernel_shape("csiAGivenSr", &csi_a_given_sr, n_sr, alphabets.n_sa)?;
        check_kernel_shape("csiBGivenSr", &csi_b_given_sr, n_sr, alphabets.n_sb)?;
        check_kernel_shape("channel", &channel, alphabets.channel_rows(), alphabets.n_y)?;
        Ok(NoisyReceiverModel {
            alphabets,
            sr_dist,
            state_given_sr,
            csi_a_given_sr,
            csi_b_given_sr,
            channel,
        })
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn n_sr(&self) -> usize {
        self.sr_dist.len()
    }

    pub fn sr_dist(&self) -> &[f64] {
        &self.sr_dist
    }

    pub fn state_given_sr(&self) -> &StochasticKernel {
        &self.state_given_sr
    }

    pub fn csi_a_given_sr(&self) -> &StochasticKernel {
        &self.csi_a_given_sr
    }

    pub fn csi_b_given_sr(&self) -> &StochasticKernel {
        &self.csi_b_given_sr
    }

    pub fn channel(&self) -> &StochasticKernel {
        &self.channel
    }

    /// Marginal state law `P(s) = sum_{s^r} P(s|s^r) P(s^r)`.
    pub fn state_marginal(&self) -> Vec<f64> {
        let n_s = self.alphabets.n_s;
        let mut p = vec![0.0; n_s];
        for (sr, &w) in self.sr_dist.iter().enumerate() {
            for (s, ps) in p.iter_mut().enumerate() {
                *ps += w * self.state_given_sr.get(sr, s);
            }
        }
        p
    }

    /// Replaces the encoder CSI by deterministic functions of the receiver CSI,
    /// `s^a = f_a(s^r)` and `s^b = f_b(s^r)`.
    pub fn with_deterministic_csit(&self, f_a: &[usize], n_sa: usize, f_b: &[usize], n_sb: usize) -> Result<Self> {
        let n_sr = self.n_sr();
        if f_a.len() != n_sr || f_b.len() != n_sr {
            return Err(Error::DimensionMismatch(format!(
                "CSIT maps must have {n_sr} entries (found {} and {})",
                f_a.len(),
                f_b.len()
            )));
        }
        let alphabets = Alphabets {
            n_sa,
            n_sb,
            ..self.alphabets
        };
        Self::new(
            alphabets,
            self.sr_dist.clone(),
            self.state_given_sr.clone(),
            StochasticKernel::deterministic(f_a, n_sa)?,
            StochasticKernel::deterministic(f_b, n_sb)?,
            self.channel.clone(),
        )
    }
}

/// Reduces a noisy-receiver model to a complete-CSIR model whose state is
/// `s^r`: `P_eq(y|x_a,x_b,s^r) = sum_s P(y|x_a,x_b,s) P(s|s^r)`.
pub fn equivalent_channel(model: &NoisyReceiverModel) -> Result<FsMacChannel> {
    let a = model.alphabets;
    let n_sr = model.n_sr();
    let reduced = Alphabets {
        n_s: n_sr,
        n_sr: None,
        ..a
    };
    let mut probs = vec![0.0; reduced.channel_rows() * a.n_y];
    for xa in 0..a.n_xa {
        for xb in 0..a.n_xb {
            for sr in 0..n_sr {
                let out = reduced.channel_row(xa, xb, sr) * a.n_y;
                for s in 0..a.n_s {
                    let w = model.state_given_sr.get(sr, s);
                    if w == 0.0 {
                        continue;
                    }
                    let row = model.channel.row(a.channel_row(xa, xb, s));
                    for (y, &p) in row.iter().enumerate() {
                        probs[out + y] += w * p;
                    }
                }
            }
        }
    }
    let kernel = StochasticKernel::new("equivalent channel", reduced.channel_rows(), a.n_y, probs, INTERNAL_TOLERANCE)?;
    FsMacChannel::new(
        reduced,
        model.sr_dist.clone(),
        model.csi_a_given_sr.clone(),
        model.csi_b_given_sr.clone(),
        kernel,
    )
}

/// `Y = X_a + X_b + Z (mod q)` with state-dependent noise `Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuloAdditiveSpec {
    pub q: usize,
    pub state_dist: Vec<f64>,
    pub csi_a: StochasticKernel,
    pub csi_b: StochasticKernel,
    pub noise_given_state: StochasticKernel,
}

impl ModuloAdditiveSpec {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::DimensionMismatch(format!("modulus q = {} must be at least 2", self.q)));
        }
        let n_s = self.state_dist.len();
        check_distribution("stateDist", &self.state_dist, INPUT_TOLERANCE)?;
        if self.csi_a.rows() != n_s || self.csi_b.rows() != n_s {
            return Err(Error::DimensionMismatch("CSI kernels must have nS rows".into()));
        }
        check_kernel_shape("noiseGivenState", &self.noise_given_state, n_s, self.q)?;
        Ok(())
    }

    pub fn n_s(&self) -> usize {
        self.state_dist.len()
    }

    pub fn alphabets(&self) -> Alphabets {
        Alphabets::new(self.n_s(), self.csi_a.cols(), self.csi_b.cols(), self.q, self.q, self.q)
    }
}

/// Builds the channel kernel `P(y|x_a,x_b,s) = P_Z|S(y - x_a - x_b mod q | s)`.
pub fn build_modulo_additive(spec: &ModuloAdditiveSpec) -> Result<FsMacChannel> {
    spec.validate()?;
    let q = spec.q;
    let alphabets = spec.alphabets();
    let n_s = spec.n_s();
    let mut probs = vec![0.0; alphabets.channel_rows() * q];
    for xa in 0..q {
        for xb in 0..q {
            for s in 0..n_s {
                let row = alphabets.channel_row(xa, xb, s) * q;
                for y in 0..q {
                    let z = (y + 2 * q - xa - xb) % q;
                    probs[row + y] = spec.noise_given_state.get(s, z);
                }
            }
        }
    }
    let channel = StochasticKernel::new("modulo-additive channel", alphabets.channel_rows(), q, probs, INTERNAL_TOLERANCE)?;
    FsMacChannel::new(alphabets, spec.state_dist.clone(), spec.csi_a.clone(), spec.csi_b.clone(), channel)
}

/// Binary multiplier MAC `Y = X_a X_b + S (mod 2)` observed through
/// `S^r = S + Z^r`, `Z^r ~ Ber(p_r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryMultiplierSpec {
    #[serde(rename = "pS")]
    pub p_s: f64,
    #[serde(rename = "pR")]
    pub p_r: f64,
}

impl BinaryMultiplierSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("pS", self.p_s), ("pR", self.p_r)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidDistribution(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// `P(S = s | S^r = r)` by Bayes' rule. Unreachable `r` get the point mass `s = r`.
    pub fn state_given_sr(&self) -> [[f64; 2]; 2] {
        let ps = [1.0 - self.p_s, self.p_s];
        let pz = [1.0 - self.p_r, self.p_r];
        let mut out = [[0.0; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            let joint = [ps[0] * pz[r], ps[1] * pz[r ^ 1]];
            let total = joint[0] + joint[1];
            if total > 0.0 {
                *row = [joint[0] / total, joint[1] / total];
            } else {
                row[r] = 1.0;
            }
        }
        out
    }

    pub fn sr_dist(&self) -> [f64; 2] {
        let one = self.p_s * (1.0 - self.p_r) + (1.0 - self.p_s) * self.p_r;
        [1.0 - one, one]
    }
}

/// Builds the noisy-receiver model of the binary multiplier MAC with trivial
/// encoder CSI.
pub fn build_binary_multiplier(spec: &BinaryMultiplierSpec) -> Result<NoisyReceiverModel> {
    spec.validate()?;
    let mut alphabets = Alphabets::new(2, 1, 1, 2, 2, 2);
    alphabets.n_sr = Some(2);
    let mut probs = vec![0.0; 8 * 2];
    for xa in 0..2 {
        for xb in 0..2 {
            for s in 0..2 {
                let y = (xa * xb) ^ s;
                probs[alphabets.channel_row(xa, xb, s) * 2 + y] = 1.0;
            }
        }
    }
    let channel = StochasticKernel::new("binary multiplier channel", 8, 2, probs, INTERNAL_TOLERANCE)?;
    let post = spec.state_given_sr();
    let state_given_sr = StochasticKernel::new("stateGivenSr", 2, 2, post.concat(), INTERNAL_TOLERANCE)?;
    NoisyReceiverModel::new(
        alphabets,
        spec.sr_dist().to_vec(),
        state_given_sr,
        StochasticKernel::constant_rows(2, &[1.0]),
        StochasticKernel::constant_rows(2, &[1.0]),
        channel,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(p: f64) -> StochasticKernel {
        StochasticKernel::new("bsc", 2, 2, vec![1.0 - p, p, p, 1.0 - p], INPUT_TOLERANCE).unwrap()
    }

    #[test]
    fn bsc_kernel_is_valid() {
        let k = bsc(0.1);
        assert_eq!(k.row(1), &[0.1, 0.9]);
        let ch = FsMacChannel::without_csit(2, 1, 1, 2, vec![0.5, 0.5], bsc(0.1));
        assert!(ch.is_ok());
    }

    #[test]
    fn short_row_is_rejected() {
        let err = StochasticKernel::new("k", 2, 2, vec![0.5, 0.49, 0.5, 0.5], INPUT_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::NonStochasticRow { row: 0, .. }));
    }

    #[test]
    fn negative_entry_is_rejected() {
        let err = StochasticKernel::new("k", 1, 2, vec![-0.1, 1.1], INPUT_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::NegativeProbability { index: 0, .. }));
    }

    #[test]
    fn large_strategy_space_is_rejected() {
        let a = Alphabets::new(1, 20, 1, 4, 2, 2);
        assert!(matches!(a.validate(4096), Err(Error::EnumerationLimitExceeded { .. })));
    }

    #[test]
    fn identity_posterior_reproduces_channel() {
        let bm = build_binary_multiplier(&BinaryMultiplierSpec { p_s: 0.3, p_r: 0.0 }).unwrap();
        assert!(bm.state_given_sr().is_identity());
        let eq = equivalent_channel(&bm).unwrap();
        assert_eq!(eq.channel(), bm.channel());
    }

    #[test]
    fn uniform_posterior_gives_state_independent_rows() {
        let bm = build_binary_multiplier(&BinaryMultiplierSpec { p_s: 0.5, p_r: 0.5 }).unwrap();
        assert_eq!(bm.state_given_sr().row(0), &[0.5, 0.5]);
        assert_eq!(bm.state_given_sr().row(1), &[0.5, 0.5]);
        let eq = equivalent_channel(&bm).unwrap();
        for xa in 0..2 {
            for xb in 0..2 {
                assert_eq!(eq.channel().row(eq.alphabets().channel_row(xa, xb, 0)), eq.channel().row(eq.alphabets().channel_row(xa, xb, 1)));
            }
        }
    }

    #[test]
    fn binary_multiplier_posterior_by_brute_force() {
        let spec = BinaryMultiplierSpec { p_s: 0.5, p_r: 0.1 };
        // joint table over (s, z) -> (s, s xor z)
        let mut joint = [[0.0f64; 2]; 2];
        for s in 0..2 {
            for z in 0..2 {
                let p = [0.5, 0.5][s] * [0.9, 0.1][z];
                joint[s][s ^ z] += p;
            }
        }
        let p00 = joint[0][0] / (joint[0][0] + joint[1][0]);
        assert!((p00 - 0.9).abs() < 1e-15);
        let post = spec.state_given_sr();
        assert!((post[0][0] - p00).abs() < 1e-15);

        let eq = equivalent_channel(&build_binary_multiplier(&spec).unwrap()).unwrap();
        assert!((eq.transition(1, 1, 0, 1) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn modulo_additive_deterministic_noise() {
        let spec = ModuloAdditiveSpec {
            q: 2,
            state_dist: vec![0.5, 0.5],
            csi_a: StochasticKernel::identity(2),
            csi_b: StochasticKernel::identity(2),
            noise_given_state: StochasticKernel::identity(2),
        };
        let ch = build_modulo_additive(&spec).unwrap();
        for xa in 0..2 {
            for xb in 0..2 {
                for s in 0..2 {
                    for y in 0..2 {
                        let expect = if y == xa ^ xb ^ s { 1.0 } else { 0.0 };
                        assert_eq!(ch.transition(xa, xb, s, y), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn modulo_additive_flip_probability() {
        let spec = ModuloAdditiveSpec {
            q: 2,
            state_dist: vec![0.5, 0.5],
            csi_a: StochasticKernel::identity(2),
            csi_b: StochasticKernel::identity(2),
            noise_given_state: StochasticKernel::constant_rows(2, &[0.8, 0.2]),
        };
        let ch = build_modulo_additive(&spec).unwrap();
        for xa in 0..2 {
            for xb in 0..2 {
                for s in 0..2 {
                    assert!((ch.transition(xa, xb, s, 1 ^ xa ^ xb) - 0.2).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn modulo_additive_q3_rows_stochastic() {
        let noise = StochasticKernel::new("z", 3, 3, vec![0.7, 0.2, 0.1, 0.1, 0.1, 0.8, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], INPUT_TOLERANCE).unwrap();
        let spec = ModuloAdditiveSpec {
            q: 3,
            state_dist: vec![0.2, 0.3, 0.5],
            csi_a: StochasticKernel::identity(3),
            csi_b: StochasticKernel::constant_rows(3, &[1.0]),
            noise_given_state: noise,
        };
        let ch = build_modulo_additive(&spec).unwrap();
        assert_eq!(ch.channel().rows(), 27);
        for r in 0..27 {
            let sum: f64 = ch.channel().row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn modulo_additive_shift_invariance() {
        let noise = StochasticKernel::new("z", 2, 3, vec![0.6, 0.3, 0.1, 0.2, 0.2, 0.6], INPUT_TOLERANCE).unwrap();
        let spec = ModuloAdditiveSpec {
            q: 3,
            state_dist: vec![0.4, 0.6],
            csi_a: StochasticKernel::identity(2),
            csi_b: StochasticKernel::identity(2),
            noise_given_state: noise,
        };
        let ch = build_modulo_additive(&spec).unwrap();
        for c in 0..3 {
            for xa in 0..3 {
                for xb in 0..3 {
                    for s in 0..2 {
                        for y in 0..3 {
                            let shifted = ch.transition((xa + c) % 3, (xb + 3 - c) % 3, s, y);
                            assert_eq!(shifted, ch.transition(xa, xb, s, y));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equivalent_channel_preserves_output_marginal() {
        let mut alphabets = Alphabets::new(3, 1, 2, 2, 2, 2);
        alphabets.n_sr = Some(2);
        let state_given_sr = StochasticKernel::new("s|sr", 2, 3, vec![0.7, 0.2, 0.1, 0.1, 0.3, 0.6], INPUT_TOLERANCE).unwrap();
        let mut ch = Vec::new();
        for r in 0..12 {
            let p = 0.05 + 0.07 * r as f64;
            ch.extend([p, 1.0 - p]);
        }
        let channel = StochasticKernel::new("ch", 12, 2, ch, INPUT_TOLERANCE).unwrap();
        let model = NoisyReceiverModel::new(
            alphabets,
            vec![0.35, 0.65],
            state_given_sr,
            StochasticKernel::constant_rows(2, &[1.0]),
            StochasticKernel::identity(2),
            channel,
        )
        .unwrap();
        let eq = equivalent_channel(&model).unwrap();
        let ps = model.state_marginal();
        for xa in 0..2 {
            for xb in 0..2 {
                for y in 0..2 {
                    let lhs: f64 = (0..2).map(|sr| model.sr_dist()[sr] * eq.transition(xa, xb, sr, y)).sum();
                    let rhs: f64 = (0..3)
                        .map(|s| ps[s] * model.channel().get(alphabets.channel_row(xa, xb, s), y))
                        .sum();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }
}
