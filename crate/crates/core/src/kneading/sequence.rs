use serde::Serialize;

use super::KneadingMap;
use crate::error::{KneadError, Result};

/// Sign itinerary `e_1 e_2 ...` of the critical orbit, `0` meaning negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KneadingSequence {
    /// `symbols[n - 1] = e_n`.
    pub symbols: Vec<u8>,
}

impl KneadingSequence {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, n: usize) -> Option<u8> {
        n.checked_sub(1).and_then(|i| self.symbols.get(i).copied())
    }

    pub fn decided(&self) -> impl Iterator<Item = Option<u8>> + '_ {
        self.symbols.iter().map(|&s| Some(s))
    }
}

impl std::fmt::Display for KneadingSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Incrementally extends the itinerary implied by a kneading map.
///
/// The block `e_{S_{k-1}+1} .. e_{S_k}` copies `e_1 .. e_{S_{Q(k)}}` with its
/// last symbol flipped, seeded by `e_1 = 0`. Extending never rewrites a prefix.
#[derive(Debug, Clone)]
pub struct SymbolGenerator {
    map: KneadingMap,
    symbols: Vec<u8>,
    /// Cutting times generated so far, as machine words.
    times: Vec<u64>,
}

impl SymbolGenerator {
    pub fn new(map: &KneadingMap) -> Self {
        SymbolGenerator {
            map: map.clone(),
            symbols: vec![0],
            times: vec![1],
        }
    }

    pub fn map(&self) -> &KneadingMap {
        &self.map
    }

    /// Grows the sequence to at least `len` symbols.
    pub fn ensure(&mut self, len: usize) -> Result<()> {
        while self.symbols.len() < len {
            let k = self.times.len();
            let qk = self.map.q_checked(k)?;
            let block = self.times[qk];
            let next = self.times[k - 1]
                .checked_add(block)
                .ok_or(KneadError::OutOfRange {
                    index: k as u64,
                    limit: u64::MAX,
                })?;
            let block = block as usize;
            // The block reads only symbols that already exist: S_{Q(k)} <= S_{k-1}.
            for i in 0..block {
                let mut s = self.symbols[i];
                if i + 1 == block {
                    s ^= 1;
                }
                self.symbols.push(s);
            }
            self.times.push(next);
        }
        Ok(())
    }

    /// 1-based symbol, generating on demand.
    pub fn symbol(&mut self, n: usize) -> Result<u8> {
        self.ensure(n)?;
        Ok(self.symbols[n - 1])
    }

    pub fn prefix(&mut self, len: usize) -> Result<KneadingSequence> {
        self.ensure(len)?;
        Ok(KneadingSequence {
            symbols: self.symbols[..len].to_vec(),
        })
    }

    pub fn generated(&self) -> &[u8] {
        &self.symbols
    }

    /// Cutting times `S_0, S_1, ...` reached so far.
    pub fn cutting_times(&self) -> &[u64] {
        &self.times
    }
}

pub fn kneading_sequence_from_q(map: &KneadingMap, length: usize) -> Result<KneadingSequence> {
    SymbolGenerator::new(map).prefix(length)
}

/// Reads the kneading map off a decided itinerary: `S_k` is the least
/// `m > S_{k-1}` with `e_m != e_{m - S_{k-1}}`, and `Q(k)` indexes the
/// difference `S_k - S_{k-1}`. Only levels with `S_k <= len` are returned.
pub fn kneading_map_from_sequence(seq: &KneadingSequence) -> Result<KneadingMap> {
    if seq.get(1) != Some(0) {
        return Err(KneadError::InvalidInput(
            "a kneading sequence starts with 0".into(),
        ));
    }
    let e = &seq.symbols;
    let mut times = vec![1usize];
    let mut table = Vec::new();
    loop {
        let prev = *times.last().unwrap();
        let Some(m) = (prev + 1..=e.len()).find(|&m| e[m - 1] != e[m - prev - 1]) else {
            break;
        };
        let k = times.len();
        let q = times
            .binary_search(&(m - prev))
            .map_err(|_| KneadError::RuleViolation {
                k,
                reason: format!("S_k - S_(k-1) = {} is not a cutting time", m - prev),
            })?;
        table.push(q);
        times.push(m);
    }
    Ok(KneadingMap::explicit(table))
}
