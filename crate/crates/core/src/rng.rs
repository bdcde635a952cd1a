//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a [`Stream`] keyed by
//! `(seed, role, index)`. The algorithm is fixed so that runs can be
//! reproduced bit-for-bit by other implementations:
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!          return z ^ (z >> 31)
//! key    = mix(mix(seed + role * GAMMA) + index)
//! u64_i  = mix(key + (i + 1) * GAMMA)          i = 0, 1, 2, ...
//! f64_i  = (u64_i >> 11) * 2^-53               in [0, 1)
//! ```
//!
//! with `GAMMA = 0x9E3779B97F4A7C15` and all arithmetic wrapping modulo
//! 2^64. Categorical draws use inverse-CDF sampling on one `f64`, and
//! `below(n)` returns `(u64 * n) >> 64`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Substream roles.
pub mod role {
    pub const CODEBOOK_A: u64 = 1;
    pub const CODEBOOK_B: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const RESTART: u64 = 4;
    pub const SAMPLING: u64 = 5;
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A SplitMix64 stream positioned at counter 0.
#[derive(Clone, Debug)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64, role: u64, index: u64) -> Self {
        let key = mix64(mix64(seed.wrapping_add(role.wrapping_mul(GAMMA))).wrapping_add(index));
        Stream { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Inverse-CDF draw from `probs`. Falls back to the last positive entry
    /// when rounding leaves the cumulative sum below the uniform draw.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    /// Standard exponential variate `-ln(1 - U)`.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }

    /// Sample from the flat Dirichlet distribution on `n` coordinates.
    pub fn dirichlet_flat(&mut self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| self.exponential()).collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            v.iter_mut().for_each(|x| *x /= total);
        } else {
            v.iter_mut().for_each(|x| *x = 1.0 / n as f64);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values_of_the_finalizer() {
        // SplitMix64 seeded with 0 produces these first outputs.
        let mut state = 0u64;
        let mut out = Vec::new();
        for _ in 0..3 {
            state = state.wrapping_add(GAMMA);
            out.push(mix64(state));
        }
        assert_eq!(out, vec![0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut s = Stream::new(7, role::TRIAL, 3);
            (0..5).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = Stream::new(7, role::TRIAL, 3);
            (0..5).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
        let mut c = Stream::new(7, role::TRIAL, 4);
        assert_ne!(a[0], c.next_u64());
        let mut d = Stream::new(7, role::CODEBOOK_A, 3);
        assert_ne!(a[0], d.next_u64());
    }

    #[test]
    fn uniform_and_categorical_ranges() {
        let mut s = Stream::new(1, role::SAMPLING, 0);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            let u = s.next_f64();
            assert!((0.0..1.0).contains(&u));
            counts[s.categorical(&[0.2, 0.0, 0.8])] += 1;
            assert!(s.below(5) < 5);
        }
        assert_eq!(counts[1], 0);
        let f = counts[0] as f64 / 30_000.0;
        assert!((f - 0.2).abs() < 0.015);
    }

    #[test]
    fn dirichlet_is_on_the_simplex() {
        let mut s = Stream::new(9, role::RESTART, 0);
        for n in 1..6 {
            let p = s.dirichlet_flat(n);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }
}
