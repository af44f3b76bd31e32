use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::KneadingMap;
use crate::error::{KneadError, Result};

/// Cutting times `S_0 = 1 < S_1 < ... < S_K` generated from a kneading map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuttingTimes {
    values: Vec<BigUint>,
    /// `q[k - 1] = Q(k)` for `1 <= k <= K`.
    q: Vec<usize>,
    source: KneadingMap,
}

/// `S_k - S_{k-1} = S_{Q(k)}`, starting from `S_0 = 1`.
pub fn cutting_times(map: &KneadingMap, count: usize) -> Result<CuttingTimes> {
    let mut values = Vec::with_capacity(count + 1);
    let mut q = Vec::with_capacity(count);
    values.push(BigUint::one());
    for k in 1..=count {
        let qk = map.q_checked(k)?;
        let next = &values[k - 1] + &values[qk];
        values.push(next);
        q.push(qk);
    }
    Ok(CuttingTimes {
        values,
        q,
        source: map.clone(),
    })
}

impl CuttingTimes {
    /// Largest index `K`.
    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&BigUint> {
        self.values.get(k)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// `S_k` as a machine word, when it fits.
    pub fn s(&self, k: usize) -> Option<u64> {
        self.values.get(k).and_then(|v| v.to_u64())
    }

    /// `S_k` as a machine word; out-of-range or overflowing indices are errors.
    pub fn s_checked(&self, k: usize) -> Result<u64> {
        self.s(k).ok_or(KneadError::OutOfRange {
            index: k as u64,
            limit: self.depth() as u64,
        })
    }

    /// `Q(k)` as recorded during generation (`Q(0)` reads as 0).
    pub fn q(&self, k: usize) -> Option<usize> {
        if k == 0 {
            Some(0)
        } else {
            self.q.get(k - 1).copied()
        }
    }

    pub fn source(&self) -> &KneadingMap {
        &self.source
    }

    /// Index `k` with `S_k = n`, if `n` is a cutting time in range.
    pub fn index_of(&self, n: u64) -> Option<usize> {
        let target = BigUint::from(n);
        self.values.binary_search(&target).ok()
    }

    /// Largest `k` with `S_k <= n`.
    pub fn floor_index(&self, n: u64) -> Option<usize> {
        let target = BigUint::from(n);
        match self.values.binary_search(&target) {
            Ok(i) => Some(i),
            Err(0) => None,
            Err(i) => Some(i - 1),
        }
    }

    /// Rows `(k, S_k, Q(k))`; `Q(0)` is reported as empty.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &BigUint, Option<usize>)> + '_ {
        self.values.iter().enumerate().map(move |(k, s)| {
            (
                k,
                s,
                if k == 0 {
                    None
                } else {
                    self.q.get(k - 1).copied()
                },
            )
        })
    }
}

/// Result of [`beta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Beta {
    pub value: u64,
    /// `n` itself is a cutting time.
    pub cutting: bool,
}

/// `β(n) = n - max{S_j : S_j < n}` for `1 < n <= S_K`.
pub fn beta(times: &CuttingTimes, n: u64) -> Result<Beta> {
    let top = times.s(times.depth());
    let in_range = n > 1 && top.is_none_or(|t| n <= t);
    if !in_range {
        return Err(KneadError::OutOfRange {
            index: n,
            limit: top.unwrap_or(u64::MAX),
        });
    }
    let target = BigUint::from(n);
    // n > 1 = S_0, so the predecessor always exists.
    let below = match times.values.binary_search(&target) {
        Ok(i) => i - 1,
        Err(i) => i - 1,
    };
    let prev = times.values[below].to_u64().expect("S_j < n fits in u64");
    Ok(Beta {
        value: n - prev,
        cutting: times.index_of(n).is_some(),
    })
}
