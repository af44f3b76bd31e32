//! Kneading maps and the integer combinatorics built on them.
//!
//! Everything here is exact: cutting times are big integers and the checks
//! operate on `usize` indices. No floating point is involved.

mod checks;
mod cutting;
mod sequence;

pub use checks::{
    check_admissible, check_admissible_range, check_feigenbaum_periodic, check_fibonacci_like,
    check_renormalizable, check_renormalizable_literal, check_strict_hofbauer, Admissibility,
    FibonacciLike, StrictHofbauer, DEFAULT_WINDOW,
};
pub use cutting::{beta, cutting_times, Beta, CuttingTimes};
pub use sequence::{
    kneading_map_from_sequence, kneading_sequence_from_q, KneadingSequence, SymbolGenerator,
};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{KneadError, Result};

/// How `Q(k)` is produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum KneadingRule {
    /// `table[k - 1] = Q(k)`.
    Explicit(Vec<usize>),
    /// `Q(k) = max(0, k - n)`; `n = 2` is the Fibonacci map.
    FibonacciLike { n: usize },
    /// `Q(k) = k - 1`.
    Feigenbaum,
    /// `Q(k) = min(q, k - 1)`.
    Constant { q: usize },
    /// `Q(k) = prefix[k - 1]` below `k0` (missing entries read as 0), then
    /// `Q(k0 + m p + i) = table[i] + m p`.
    EventuallyPeriodic {
        k0: usize,
        period: usize,
        table: Vec<usize>,
        prefix: Vec<usize>,
    },
}

/// A kneading map `Q: N -> N ∪ {0}`, evaluated lazily from its rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KneadingMap {
    rule: KneadingRule,
    k_max: usize,
}

impl KneadingMap {
    pub fn new(rule: KneadingRule) -> Result<Self> {
        let k_max = match &rule {
            KneadingRule::Explicit(t) => t.len(),
            KneadingRule::FibonacciLike { n } => {
                if *n == 0 {
                    return Err(KneadError::InvalidInput(
                        "fibonacci-like template needs n >= 1".into(),
                    ));
                }
                usize::MAX
            }
            KneadingRule::EventuallyPeriodic {
                k0, period, table, ..
            } => {
                if *k0 == 0 || *period == 0 || table.len() != *period {
                    return Err(KneadError::InvalidInput(format!(
                        "eventually-periodic rule needs k0 >= 1, p >= 1 and a table of length p (got k0={k0}, p={period}, len={})",
                        table.len()
                    )));
                }
                usize::MAX
            }
            _ => usize::MAX,
        };
        Ok(KneadingMap { rule, k_max })
    }

    pub fn fibonacci() -> Self {
        Self::fibonacci_like(2)
    }

    pub fn fibonacci_like(n: usize) -> Self {
        KneadingMap {
            rule: KneadingRule::FibonacciLike { n: n.max(1) },
            k_max: usize::MAX,
        }
    }

    pub fn feigenbaum() -> Self {
        KneadingMap {
            rule: KneadingRule::Feigenbaum,
            k_max: usize::MAX,
        }
    }

    pub fn constant(q: usize) -> Self {
        KneadingMap {
            rule: KneadingRule::Constant { q },
            k_max: usize::MAX,
        }
    }

    pub fn explicit(table: Vec<usize>) -> Self {
        let k_max = table.len();
        KneadingMap {
            rule: KneadingRule::Explicit(table),
            k_max,
        }
    }

    pub fn eventually_periodic(
        k0: usize,
        period: usize,
        table: Vec<usize>,
        prefix: Vec<usize>,
    ) -> Result<Self> {
        Self::new(KneadingRule::EventuallyPeriodic {
            k0,
            period,
            table,
            prefix,
        })
    }

    /// Restricts evaluation to `k <= k_max`.
    pub fn truncated(mut self, k_max: usize) -> Self {
        self.k_max = self.k_max.min(k_max);
        self
    }

    pub fn rule(&self) -> &KneadingRule {
        &self.rule
    }

    /// Largest `k` at which `Q(k)` is defined.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `Q(k)` for `k >= 1`, or `None` past `k_max`. `Q(0)` is taken as 0 so that
    /// iterates such as `Q(Q(1))` stay defined.
    pub fn q(&self, k: usize) -> Option<usize> {
        if k == 0 {
            return Some(0);
        }
        if k > self.k_max {
            return None;
        }
        Some(match &self.rule {
            KneadingRule::Explicit(t) => t[k - 1],
            KneadingRule::FibonacciLike { n } => k.saturating_sub(*n),
            KneadingRule::Feigenbaum => k - 1,
            KneadingRule::Constant { q } => (*q).min(k - 1),
            KneadingRule::EventuallyPeriodic {
                k0,
                period,
                table,
                prefix,
            } => {
                if k < *k0 {
                    prefix.get(k - 1).copied().unwrap_or(0)
                } else {
                    let off = k - k0;
                    table[off % period] + (off / period) * period
                }
            }
        })
    }

    /// `Q(k)`, failing with a rule violation when undefined or not `< k`.
    pub fn q_checked(&self, k: usize) -> Result<usize> {
        let v = self.q(k).ok_or_else(|| KneadError::RuleViolation {
            k,
            reason: format!("Q is only defined up to k = {}", self.k_max),
        })?;
        if k >= 1 && v >= k {
            return Err(KneadError::RuleViolation {
                k,
                reason: format!("Q({k}) = {v} is not < {k}"),
            });
        }
        Ok(v)
    }

    /// Short label used in reports and CLI echoes.
    pub fn label(&self) -> String {
        match &self.rule {
            KneadingRule::Explicit(t) => format!("explicit[{}]", t.len()),
            KneadingRule::FibonacciLike { n: 2 } => "fibonacci".into(),
            KneadingRule::FibonacciLike { n } => format!("fibonacci-like({n})"),
            KneadingRule::Feigenbaum => "feigenbaum".into(),
            KneadingRule::Constant { q } => format!("constant({q})"),
            KneadingRule::EventuallyPeriodic { k0, period, .. } => {
                format!("eventually-periodic(k0={k0}, p={period})")
            }
        }
    }

    /// Parses the interchange form
    /// `{"rule": ..., "params": {...}, "table": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawKneadingMap = serde_json::from_str(text)
            .map_err(|e| KneadError::InvalidInput(format!("kneading map JSON: {e}")))?;
        raw.into_map()
    }

    pub fn to_json(&self) -> Value {
        let (rule, params, table) = match &self.rule {
            KneadingRule::Explicit(t) => ("explicit", json!({}), t.clone()),
            KneadingRule::FibonacciLike { n } => ("fibonacci", json!({ "n": n }), vec![]),
            KneadingRule::Feigenbaum => ("feigenbaum", json!({}), vec![]),
            KneadingRule::Constant { q } => ("constant", json!({ "q": q }), vec![]),
            KneadingRule::EventuallyPeriodic {
                k0,
                period,
                table,
                prefix,
            } => (
                "eventually-periodic",
                json!({ "k0": k0, "p": period, "prefix": prefix }),
                table.clone(),
            ),
        };
        let mut v = json!({ "rule": rule, "params": params, "table": table });
        if self.k_max != usize::MAX && !matches!(self.rule, KneadingRule::Explicit(_)) {
            v["params"]["k_max"] = json!(self.k_max);
        }
        v
    }
}

#[derive(Deserialize)]
struct RawKneadingMap {
    rule: String,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    table: Vec<usize>,
}

#[derive(Deserialize, Default)]
struct RawParams {
    n: Option<usize>,
    q: Option<usize>,
    k0: Option<usize>,
    p: Option<usize>,
    #[serde(default)]
    prefix: Vec<usize>,
    k_max: Option<usize>,
}

impl RawKneadingMap {
    fn into_map(self) -> Result<KneadingMap> {
        let map = match self.rule.as_str() {
            "explicit" => KneadingMap::explicit(self.table),
            "fibonacci" => KneadingMap::new(KneadingRule::FibonacciLike {
                n: self.params.n.unwrap_or(2),
            })?,
            "feigenbaum" => KneadingMap::feigenbaum(),
            "constant" => KneadingMap::constant(self.params.q.unwrap_or(0)),
            "eventually-periodic" => {
                let k0 = self.params.k0.ok_or_else(|| {
                    KneadError::InvalidInput("eventually-periodic needs params.k0".into())
                })?;
                let p = self.params.p.unwrap_or(self.table.len());
                KneadingMap::eventually_periodic(k0, p, self.table, self.params.prefix)?
            }
            other => {
                return Err(KneadError::InvalidInput(format!(
                    "unknown kneading rule {other:?}"
                )))
            }
        };
        Ok(match self.params.k_max {
            Some(k) => map.truncated(k),
            None => map,
        })
    }
}
