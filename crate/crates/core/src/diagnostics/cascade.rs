use rug::Float;
use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::kneading::CuttingTimes;
use crate::map::UnicriticalMap;
use crate::orbit::{OrbitTable, PrecriticalLadder};
use crate::table::{num, Table, Verdict};

/// `L = sup |Df|` on `[f(0), f^2(0)]`; `|Df|` is monotone in `|x|`, so the
/// supremum is `ℓ · max(|c|, |f^2(0)|)^{ℓ-1}`.
pub fn l_bound(map: &UnicriticalMap) -> Float {
    let c = map.c().clone();
    let f2 = map.apply(&c);
    let r = if c.cmp_abs(&f2) == Some(std::cmp::Ordering::Less) {
        f2
    } else {
        c
    };
    map.derivative(&r.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeEntry {
    pub n: u64,
    /// Returns of the critical orbit to the central branch of `f^N`.
    pub depth: u64,
    /// Ladder level `j` with `S_j < N <= S_{j+1}`.
    pub level: usize,
    /// A cutting time `S_a` with `dN < S_a < (d+2)N`, when one exists.
    pub bracketing_cutting_time: Option<u64>,
    /// The orbit table ended before the orbit left the branch; `depth` is a
    /// lower bound.
    pub truncated: bool,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeReport {
    pub l: f64,
    pub entries: Vec<CascadeEntry>,
    /// `Σ d_j / (N_j L^{2 N_j / (ℓ-1)})`.
    pub sum: f64,
}

impl CascadeReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "saddle-node-cascade",
            &["N", "d", "level", "S_a", "truncated", "term"],
        );
        for e in &self.entries {
            t.push(vec![
                e.n.to_string(),
                e.depth.to_string(),
                e.level.to_string(),
                e.bracketing_cutting_time
                    .map(|s| s.to_string())
                    .unwrap_or_default(),
                e.truncated.to_string(),
                num(e.term),
            ]);
        }
        t
    }

    pub fn verdict(&self, ell: u32) -> Verdict {
        let bracketed = self
            .entries
            .iter()
            .filter(|e| !e.truncated)
            .all(|e| e.bracketing_cutting_time.is_some());
        Verdict::new(
            "saddle-node-cascade",
            self.l <= 2.0 * ell as f64 && bracketed,
            format!(
                "L = {:.6} (2ℓ = {}), {} entries, sum {:.6e}, every entry bracketed by a cutting time: {bracketed}",
                self.l,
                2 * ell,
                self.entries.len(),
                self.sum
            ),
        )
    }
}

/// For each `N` in `window`, counts successive returns `f^{iN}(0)` that stay in
/// the central-branch domain `(ζ_j, -ζ_j)`, `S_j < N <= S_{j+1}`, while the
/// sequence is monotone. `N` with no return is skipped.
pub fn saddle_node_cascade(
    orbit: &OrbitTable,
    ladder: &PrecriticalLadder,
    times: &CuttingTimes,
    window: (u64, u64),
) -> Result<CascadeReport> {
    let map = orbit.map();
    let l = l_bound(map);
    let ln_l = l.to_f64().ln();
    let ell = map.ell() as f64;
    let mut entries = Vec::new();
    for n in window.0.max(2)..=window.1.min(orbit.len()) {
        let Some(j) = (0..times.depth()).find(|&j| {
            times.s(j).unwrap_or(u64::MAX) < n && n <= times.s(j + 1).unwrap_or(u64::MAX)
        }) else {
            continue;
        };
        if j > ladder.depth() {
            return Err(KneadError::LadderTooShort {
                needed: j,
                have: ladder.depth(),
            });
        }
        let zeta = ladder.zeta_checked(j)?;
        let inside = |x: &Float| x.cmp_abs(zeta) == Some(std::cmp::Ordering::Less);
        let mut d = 0u64;
        let mut prev: Option<&Float> = None;
        let mut direction: Option<bool> = None;
        while (d + 1) * n <= orbit.len() {
            let x = orbit.at((d + 1) * n)?;
            if !inside(x) {
                break;
            }
            if let Some(p) = prev {
                let up = x > p;
                if x == p || direction.is_some_and(|dir| dir != up) {
                    break;
                }
                direction = Some(up);
            }
            prev = Some(x);
            d += 1;
        }
        if d == 0 {
            continue;
        }
        let truncated = (d + 1) * n > orbit.len();
        let bracketing_cutting_time = times.values().iter().find_map(|s| {
            let s = u64::try_from(s).ok()?;
            (d * n < s && s < (d + 2) * n).then_some(s)
        });
        let term = ((d as f64).ln() - (n as f64).ln() - 2.0 * n as f64 / (ell - 1.0) * ln_l).exp();
        entries.push(CascadeEntry {
            n,
            depth: d,
            level: j,
            bracketing_cutting_time,
            truncated,
            term,
        });
    }
    let sum = entries.iter().map(|e| e.term).fold(0.0, |a, b| a + b);
    Ok(CascadeReport {
        l: l.to_f64(),
        entries,
        sum,
    })
}
