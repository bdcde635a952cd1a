//! Shannon strategies: deterministic maps from an encoder's CSI alphabet to
//! its input alphabet.
//!
//! A strategy is stored as an index whose base-`nX` digits, least significant
//! first, are the inputs chosen for CSI symbols `0, 1, ..., nCsi - 1`. Policy
//! vectors are aligned with ascending index order.

use crate::error::{Error, Result};

/// Number of strategies `nX^nCsi`, refusing spaces larger than `limit`.
pub fn strategy_count(n_x: usize, n_csi: usize, limit: usize) -> Result<usize> {
    if n_x == 0 || n_csi == 0 {
        return Err(Error::DimensionMismatch("strategy space needs nX, nCsi >= 1".into()));
    }
    let exceeded = || Error::EnumerationLimitExceeded {
        count: format!("{n_x}^{n_csi}"),
        limit,
    };
    let exp = u32::try_from(n_csi).map_err(|_| exceeded())?;
    let count = n_x.checked_pow(exp).ok_or_else(exceeded)?;
    if count > limit {
        return Err(exceeded());
    }
    Ok(count)
}

/// One Shannon strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShannonStrategy {
    index: usize,
    n_csi: usize,
    n_x: usize,
}

impl ShannonStrategy {
    pub fn new(index: usize, n_csi: usize, n_x: usize) -> Result<Self> {
        let bound = n_x
            .checked_pow(n_csi as u32)
            .ok_or(Error::IndexOutOfRange { index, bound: usize::MAX })?;
        if index >= bound {
            return Err(Error::IndexOutOfRange { index, bound });
        }
        Ok(ShannonStrategy { index, n_csi, n_x })
    }

    /// Strategy with the given lookup table `csi -> input`.
    pub fn from_table(table: &[usize], n_x: usize) -> Result<Self> {
        let mut index = 0usize;
        for &x in table.iter().rev() {
            if x >= n_x {
                return Err(Error::IndexOutOfRange { index: x, bound: n_x });
            }
            index = index * n_x + x;
        }
        Self::new(index, table.len(), n_x)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn n_csi(&self) -> usize {
        self.n_csi
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    /// Input symbol chosen for `csi`.
    pub fn apply(&self, csi: usize) -> Result<usize> {
        if csi >= self.n_csi {
            return Err(Error::IndexOutOfRange {
                index: csi,
                bound: self.n_csi,
            });
        }
        Ok(digit(self.index, csi, self.n_x))
    }

    pub fn table(&self) -> Vec<usize> {
        (0..self.n_csi).map(|k| digit(self.index, k, self.n_x)).collect()
    }
}

#[inline]
fn digit(index: usize, position: usize, base: usize) -> usize {
    let mut v = index;
    for _ in 0..position {
        v /= base;
    }
    v % base
}

/// All maps from an `n_csi`-letter CSI alphabet into an `n_x`-letter input alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategySpace {
    n_csi: usize,
    n_x: usize,
    count: usize,
}

impl StrategySpace {
    pub fn new(n_x: usize, n_csi: usize, limit: usize) -> Result<Self> {
        let count = strategy_count(n_x, n_csi, limit)?;
        Ok(StrategySpace { n_csi, n_x, count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn n_csi(&self) -> usize {
        self.n_csi
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn get(&self, index: usize) -> Result<ShannonStrategy> {
        ShannonStrategy::new(index, self.n_csi, self.n_x)
    }

    /// Strategies in ascending index order.
    pub fn enumerate(&self) -> impl Iterator<Item = ShannonStrategy> + '_ {
        (0..self.count).map(move |index| ShannonStrategy {
            index,
            n_csi: self.n_csi,
            n_x: self.n_x,
        })
    }

    /// Dense `count x n_csi` lookup table of strategy outputs.
    pub fn lookup_table(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count * self.n_csi);
        for t in 0..self.count {
            let mut v = t;
            for _ in 0..self.n_csi {
                out.push(v % self.n_x);
                v /= self.n_x;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(strategy_count(2, 2, 4096).unwrap(), 4);
        assert_eq!(strategy_count(2, 1, 4096).unwrap(), 2);
        assert_eq!(strategy_count(3, 4, 4096).unwrap(), 81);
        assert!(matches!(strategy_count(4, 20, 4096), Err(Error::EnumerationLimitExceeded { .. })));
        assert!(matches!(strategy_count(2, 200, usize::MAX), Err(Error::EnumerationLimitExceeded { .. })));
    }

    #[test]
    fn digit_extraction() {
        let id = ShannonStrategy::new(2, 2, 2).unwrap();
        assert_eq!(id.apply(0).unwrap(), 0);
        assert_eq!(id.apply(1).unwrap(), 1);
        let zero = ShannonStrategy::new(0, 3, 4).unwrap();
        assert!((0..3).all(|s| zero.apply(s).unwrap() == 0));
        // 5 = 2 + 1*3
        let t = ShannonStrategy::new(5, 2, 3).unwrap();
        assert_eq!(t.table(), vec![2, 1]);
        assert!(matches!(t.apply(2), Err(Error::IndexOutOfRange { .. })));
        assert!(ShannonStrategy::new(9, 2, 3).is_err());
    }

    #[test]
    fn enumeration_order() {
        let s = StrategySpace::new(2, 2, 4096).unwrap();
        assert_eq!(s.enumerate().map(|t| t.index()).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let s = StrategySpace::new(2, 1, 4096).unwrap();
        assert_eq!(s.enumerate().map(|t| t.index()).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn enumeration_is_bijective_on_function_tables() {
        for (n_x, n_csi) in [(3, 2), (2, 3), (4, 2), (3, 3)] {
            let space = StrategySpace::new(n_x, n_csi, 4096).unwrap();
            let tables: HashSet<Vec<usize>> = space.enumerate().map(|t| t.table()).collect();
            assert_eq!(tables.len(), space.count());
            // every function table appears: enumerate independently by nested counting
            let mut all = vec![vec![]];
            for _ in 0..n_csi {
                all = all
                    .into_iter()
                    .flat_map(|prefix: Vec<usize>| {
                        (0..n_x).map(move |x| {
                            let mut p = prefix.clone();
                            p.push(x);
                            p
                        })
                    })
                    .collect();
            }
            for table in all {
                assert!(tables.contains(&table));
                let t = ShannonStrategy::from_table(&table, n_x).unwrap();
                assert_eq!(t.table(), table);
            }
        }
    }

    proptest! {
        #[test]
        fn apply_stays_in_alphabet(n_x in 1usize..5, n_csi in 1usize..5, raw in any::<usize>()) {
            let space = StrategySpace::new(n_x, n_csi, 4096).unwrap();
            let t = space.get(raw % space.count()).unwrap();
            let table = space.lookup_table();
            for s in 0..n_csi {
                let x = t.apply(s).unwrap();
                prop_assert!(x < n_x);
                prop_assert_eq!(x, table[t.index() * n_csi + s]);
            }
        }
    }
}
