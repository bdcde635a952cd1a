//! Monte Carlo random coding with Shannon-strategy codebooks and a
//! joint-typicality decoder.
//!
//! Randomness is drawn from [`Stream`](crate::rng::Stream)s:
//!
//! * codeword `w` of encoder a: stream `(seed, CODEBOOK_A, w)`, `n`
//!   categorical draws from `piA` (likewise for b);
//! * trial `k`: stream `(seed, TRIAL, k)`, drawing `w_a = below(M_a)`,
//!   `w_b = below(M_b)`, then for each `t`: `s`, `s^a | s`, `s^b | s` and
//!   `y | x_a, x_b, s`, in that order, all by inverse CDF.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::{strategy_channel, JointDistribution, TeamPolicy};
use crate::model::{FsMacChannel, DEFAULT_ENUMERATION_LIMIT};
use crate::rng::{role, Stream};
use crate::strategies::StrategySpace;

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_CODEWORD_BUDGET: u64 = 1 << 16;
/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimulationParams {
    pub n: usize,
    pub rate_a: f64,
    pub rate_b: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub rng_seed: u64,
    pub codeword_budget: u64,
}

impl SimulationParams {
    pub fn new(n: usize, rate_a: f64, rate_b: f64, trials: usize, rng_seed: u64) -> Self {
        SimulationParams {
            n,
            rate_a,
            rate_b,
            epsilon: DEFAULT_EPSILON,
            trials,
            rng_seed,
            codeword_budget: DEFAULT_CODEWORD_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("block length n must be at least 1".into()));
        }
        if !(self.rate_a >= 0.0) || !(self.rate_b >= 0.0) || !self.rate_a.is_finite() || !self.rate_b.is_finite() {
            return Err(Error::InvalidConfig("rates must be finite and nonnegative".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig("epsilon must lie in [0, 1)".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// `(M_a, M_b)`, checked against the codeword budget.
    pub fn message_counts(&self) -> Result<(u64, u64)> {
        let exceeded = || Error::BudgetExceeded {
            requested: format!("2^{:.3} + 2^{:.3}", self.n as f64 * self.rate_a, self.n as f64 * self.rate_b),
            budget: self.codeword_budget,
        };
        let ma = message_count(self.n, self.rate_a).ok_or_else(exceeded)?;
        let mb = message_count(self.n, self.rate_b).ok_or_else(exceeded)?;
        if ma.checked_add(mb).is_none_or(|t| t > self.codeword_budget) {
            return Err(exceeded());
        }
        Ok((ma, mb))
    }
}

/// `ceil(2^(n R))`, treating exponents within 1e-9 of an integer as exact.
/// `None` when the count does not fit in 63 bits.
pub fn message_count(n: usize, rate: f64) -> Option<u64> {
    let e = n as f64 * rate;
    if e >= 63.0 {
        return None;
    }
    let r = e.round();
    if (e - r).abs() < 1e-9 {
        return Some(1u64 << r as u32);
    }
    Some(e.exp2().ceil() as u64)
}

/// Codebooks of strategy sequences, stored row-major `(message, time)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebooks {
    pub n: usize,
    pub m_a: usize,
    pub m_b: usize,
    pub book_a: Vec<u32>,
    pub book_b: Vec<u32>,
    pub policy: TeamPolicy,
}

impl Codebooks {
    pub fn codeword_a(&self, w: usize) -> &[u32] {
        &self.book_a[w * self.n..(w + 1) * self.n]
    }

    pub fn codeword_b(&self, w: usize) -> &[u32] {
        &self.book_b[w * self.n..(w + 1) * self.n]
    }
}

pub fn generate_codebooks(policy: &TeamPolicy, params: &SimulationParams) -> Result<Codebooks> {
    params.validate()?;
    let (m_a, m_b) = params.message_counts()?;
    let (m_a, m_b) = (m_a as usize, m_b as usize);
    let n = params.n;
    let draw = |probs: &[f64], r: u64, m: usize| -> Vec<u32> {
        (0..m)
            .into_par_iter()
            .flat_map_iter(|w| {
                let mut s = Stream::new(params.rng_seed, r, w as u64);
                (0..n).map(move |_| s.categorical(probs) as u32).collect::<Vec<_>>()
            })
            .collect()
    };
    Ok(Codebooks {
        n,
        m_a,
        m_b,
        book_a: draw(policy.pi_a(), role::CODEBOOK_A, m_a),
        book_b: draw(policy.pi_b(), role::CODEBOOK_B, m_b),
        policy: policy.clone(),
    })
}

const TA: u8 = 1;
const TB: u8 = 2;
const YY: u8 = 4;
const SS: u8 = 8;

/// Strong joint typicality tests against a reference law on
/// `(t_a, t_b, y, s)`, one test per nonempty subset of the four variables.
#[derive(Clone, Debug)]
pub struct TypicalityTester {
    dims: [usize; 4],
    epsilon: f64,
    /// Per subset mask: entropy and `log2` marginal over the full index with
    /// excluded coordinates set to 0.
    entropy: [f64; 16],
    log_p: Vec<Vec<f64>>,
}

impl TypicalityTester {
    /// `reference` must have axes `(s, t_a, t_b, y)` as produced by
    /// [`StrategyKernel::joint`](crate::information::StrategyKernel::joint).
    pub fn new(reference: &JointDistribution, epsilon: f64) -> Result<Self> {
        let d = reference.dims();
        if d.len() != 4 {
            return Err(Error::DimensionMismatch("reference joint must have 4 axes".into()));
        }
        let dims = [d[1], d[2], d[3], d[0]];
        let size: usize = dims.iter().product();
        let mut entropy = [0.0; 16];
        let mut log_p = vec![Vec::new(); 16];
        for mask in 1u8..16 {
            // axes of the reference tensor in (ta, tb, y, s) order
            let axes: Vec<usize> = [(TA, 1), (TB, 2), (YY, 3), (SS, 0)]
                .iter()
                .filter(|(m, _)| mask & m != 0)
                .map(|&(_, a)| a)
                .collect();
            let marginal = reference.marginal(&axes)?;
            entropy[mask as usize] = marginal.entropy();
            let mut table = vec![f64::NEG_INFINITY; size];
            for ta in 0..dims[0] {
                for tb in 0..dims[1] {
                    for y in 0..dims[2] {
                        for s in 0..dims[3] {
                            let sym = [ta, tb, y, s];
                            if (0..4).any(|k| mask & (1 << k) == 0 && sym[k] != 0) {
                                continue;
                            }
                            let mut idx = 0;
                            for k in 0..4 {
                                if mask & (1 << k) != 0 {
                                    idx = idx * dims[k] + sym[k];
                                }
                            }
                            let p = marginal.probs()[idx];
                            table[Self::index_of(&dims, sym)] = if p > 0.0 { p.log2() } else { f64::NEG_INFINITY };
                        }
                    }
                }
            }
            log_p[mask as usize] = table;
        }
        Ok(TypicalityTester {
            dims,
            epsilon,
            entropy,
            log_p,
        })
    }

    #[inline]
    fn index_of(dims: &[usize; 4], sym: [usize; 4]) -> usize {
        ((sym[0] * dims[1] + sym[1]) * dims[2] + sym[2]) * dims[3] + sym[3]
    }

    pub fn subset_entropy(&self, mask: u8) -> f64 {
        self.entropy[mask as usize]
    }

    #[inline]
    fn passes(&self, mask: u8, log_sum: f64, n: usize) -> bool {
        let rate = -log_sum / n as f64;
        (rate - self.entropy[mask as usize]).abs() < self.epsilon
    }

    fn sum(&self, mask: u8, ta: Option<&[u32]>, tb: Option<&[u32]>, y: &[usize], s: &[usize]) -> f64 {
        let table = &self.log_p[mask as usize];
        let mut acc = 0.0;
        for t in 0..y.len() {
            let sym = [
                if mask & TA != 0 { ta.map_or(0, |v| v[t] as usize) } else { 0 },
                if mask & TB != 0 { tb.map_or(0, |v| v[t] as usize) } else { 0 },
                if mask & YY != 0 { y[t] } else { 0 },
                if mask & SS != 0 { s[t] } else { 0 },
            ];
            acc += table[Self::index_of(&self.dims, sym)];
        }
        acc
    }

    /// Whether the four sequences pass all 15 subset tests.
    pub fn is_typical(&self, ta: &[u32], tb: &[u32], y: &[usize], s: &[usize]) -> bool {
        let n = y.len();
        (1u8..16).all(|mask| self.passes(mask, self.sum(mask, Some(ta), Some(tb), y, s), n))
    }
}

/// Result of searching all message pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Unique(usize, usize),
    /// No pair or more than one pair passed; holds the number that passed.
    Ambiguous(usize),
}

/// Returns the only message pair whose codewords are jointly typical with
/// `(y, s)`, if there is exactly one.
pub fn joint_typicality_decode(codebooks: &Codebooks, y: &[usize], s: &[usize], tester: &TypicalityTester) -> Decoded {
    let n = codebooks.n;
    for mask in [YY, SS, YY | SS] {
        if !tester.passes(mask, tester.sum(mask, None, None, y, s), n) {
            return Decoded::Ambiguous(0);
        }
    }
    let side = |m: usize, book: &[u32], bit: u8| -> Vec<usize> {
        (0..m)
            .filter(|&w| {
                let c = &book[w * n..(w + 1) * n];
                let (ta, tb) = if bit == TA { (Some(c), None) } else { (None, Some(c)) };
                [bit, bit | YY, bit | SS, bit | YY | SS]
                    .iter()
                    .all(|&mask| tester.passes(mask, tester.sum(mask, ta, tb, y, s), n))
            })
            .collect()
    };
    let pass_a = side(codebooks.m_a, &codebooks.book_a, TA);
    let pass_b = side(codebooks.m_b, &codebooks.book_b, TB);
    let mut count = 0;
    let mut found = (0, 0);
    for &wa in &pass_a {
        let ca = codebooks.codeword_a(wa);
        for &wb in &pass_b {
            let cb = codebooks.codeword_b(wb);
            let ok = [TA | TB, TA | TB | YY, TA | TB | SS, TA | TB | YY | SS]
                .iter()
                .all(|&mask| tester.passes(mask, tester.sum(mask, Some(ca), Some(cb), y, s), n));
            if ok {
                count += 1;
                found = (wa, wb);
            }
        }
    }
    if count == 1 {
        Decoded::Unique(found.0, found.1)
    } else {
        Decoded::Ambiguous(count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    TruthAtypical,
    Ambiguous,
    WrongUnique,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub truth: (usize, usize),
    pub decoded: Decoded,
    pub error: bool,
    pub failure: Option<FailureMode>,
}

/// Channel data needed to run trials.
#[derive(Clone, Debug)]
pub struct TrialContext<'a> {
    pub channel: &'a FsMacChannel,
    pub tables_a: Vec<usize>,
    pub tables_b: Vec<usize>,
    pub tester: TypicalityTester,
}

impl<'a> TrialContext<'a> {
    pub fn new(channel: &'a FsMacChannel, policy: &TeamPolicy, epsilon: f64) -> Result<Self> {
        let a = channel.alphabets();
        let kernel = strategy_channel(channel, DEFAULT_ENUMERATION_LIMIT)?;
        let reference = kernel.joint(policy)?;
        Ok(TrialContext {
            channel,
            tables_a: StrategySpace::new(a.n_xa, a.n_sa, DEFAULT_ENUMERATION_LIMIT)?.lookup_table(),
            tables_b: StrategySpace::new(a.n_xb, a.n_sb, DEFAULT_ENUMERATION_LIMIT)?.lookup_table(),
            tester: TypicalityTester::new(&reference, epsilon)?,
        })
    }
}

/// Transmits one random message pair and decodes it.
pub fn run_trial(ctx: &TrialContext, codebooks: &Codebooks, params: &SimulationParams, trial_index: u64) -> TrialOutcome {
    let ch = ctx.channel;
    let a = ch.alphabets();
    let mut rng = Stream::new(params.rng_seed, role::TRIAL, trial_index);
    let wa = rng.below(codebooks.m_a);
    let wb = rng.below(codebooks.m_b);
    let (ca, cb) = (codebooks.codeword_a(wa), codebooks.codeword_b(wb));
    let n = codebooks.n;
    let mut y = Vec::with_capacity(n);
    let mut s_seq = Vec::with_capacity(n);
    for t in 0..n {
        let s = rng.categorical(ch.state_dist());
        let sa = rng.categorical(ch.csi_a().row(s));
        let sb = rng.categorical(ch.csi_b().row(s));
        let xa = ctx.tables_a[ca[t] as usize * a.n_sa + sa];
        let xb = ctx.tables_b[cb[t] as usize * a.n_sb + sb];
        y.push(rng.categorical(ch.channel().row(a.channel_row(xa, xb, s))));
        s_seq.push(s);
    }
    let decoded = joint_typicality_decode(codebooks, &y, &s_seq, &ctx.tester);
    let failure = match decoded {
        Decoded::Unique(da, db) if (da, db) == (wa, wb) => None,
        Decoded::Unique(..) => Some(FailureMode::WrongUnique),
        Decoded::Ambiguous(_) => {
            if ctx.tester.is_typical(ca, cb, &y, &s_seq) {
                Some(FailureMode::Ambiguous)
            } else {
                Some(FailureMode::TruthAtypical)
            }
        }
    };
    TrialOutcome {
        truth: (wa, wb),
        decoded,
        error: failure.is_some(),
        failure,
    }
}

/// Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationReport {
    pub n: usize,
    pub rate_a: f64,
    pub rate_b: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub atypical: usize,
    pub ambiguous: usize,
    pub wrong_unique: usize,
}

pub const REPORT_CSV_HEADER: &str = "n,rateA,rateB,epsilon,trials,errors,errorRate,wilsonLo,wilsonHi,atypical,ambiguous,wrongUnique";

impl SimulationReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.rate_a,
            self.rate_b,
            self.epsilon,
            self.trials,
            self.errors,
            self.error_rate,
            self.wilson_lo,
            self.wilson_hi,
            self.atypical,
            self.ambiguous,
            self.wrong_unique
        )
    }
}

pub fn write_reports_csv(reports: &[SimulationReport], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{REPORT_CSV_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Empirical error probability of the random-coding scheme.
pub fn estimate_error(channel: &FsMacChannel, policy: &TeamPolicy, params: &SimulationParams) -> Result<SimulationReport> {
    params.validate()?;
    params.message_counts()?;
    let ctx = TrialContext::new(channel, policy, params.epsilon)?;
    let codebooks = generate_codebooks(policy, params)?;
    let outcomes: Vec<TrialOutcome> = (0..params.trials as u64)
        .into_par_iter()
        .map(|k| run_trial(&ctx, &codebooks, params, k))
        .collect();
    let count = |mode: FailureMode| outcomes.iter().filter(|o| o.failure == Some(mode)).count();
    let errors = outcomes.iter().filter(|o| o.error).count();
    let (wilson_lo, wilson_hi) = wilson_interval(errors, params.trials, WILSON_Z);
    Ok(SimulationReport {
        n: params.n,
        rate_a: params.rate_a,
        rate_b: params.rate_b,
        epsilon: params.epsilon,
        trials: params.trials,
        errors,
        error_rate: errors as f64 / params.trials as f64,
        wilson_lo,
        wilson_hi,
        atypical: count(FailureMode::TruthAtypical),
        ambiguous: count(FailureMode::Ambiguous),
        wrong_unique: count(FailureMode::WrongUnique),
    })
}
