use rug::Float;
use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::kneading::CuttingTimes;
use crate::orbit::{orbit_points, Placement, PrecriticalLadder};
use crate::precision::ln_abs_f64;
use crate::table::{num, Table, Verdict};

/// Which power of the gap enters the long-branched sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentSign {
    /// `|ζ_k - ζ_{k+1}|^{+δ}`.
    #[default]
    Plus,
    /// `|ζ_k - ζ_{k+1}|^{-δ}`.
    Minus,
}

impl std::str::FromStr for ExponentSign {
    type Err = KneadError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(ExponentSign::Plus),
            "-" | "minus" => Ok(ExponentSign::Minus),
            _ => Err(KneadError::InvalidInput(format!(
                "exponent sign must be + or -, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub k: usize,
    pub s_k: u64,
    pub gap: f64,
    pub term: f64,
    pub partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub name: String,
    pub rows: Vec<SeriesRow>,
    pub total: f64,
    /// Mean term over the last quarter is at least the mean over the quarter before.
    pub growing: bool,
}

impl SeriesReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            self.name.clone(),
            &["k", "S_k", "gap", "term", "partial_sum"],
        );
        for r in &self.rows {
            t.push(vec![
                r.k.to_string(),
                r.s_k.to_string(),
                num(r.gap),
                num(r.term),
                num(r.partial),
            ]);
        }
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::descriptive(
            format!("{}-growing", self.name),
            self.growing,
            format!("{} terms, partial sum {:.6e}", self.rows.len(), self.total),
        )
    }
}

fn quarter_growth(terms: &[f64]) -> bool {
    let q = terms.len() / 4;
    if q == 0 {
        return false;
    }
    let n = terms.len();
    let last: f64 = terms[n - q..].iter().sum();
    let before: f64 = terms[n - 2 * q..n - q].iter().sum();
    last >= before
}

/// Partial sums of `S_k |ζ_k - ζ_{k+1}|^{±δ}` for `0 <= k < K`.
pub fn longbranched_sum(
    ladder: &PrecriticalLadder,
    times: &CuttingTimes,
    delta: f64,
    depth: usize,
    sign: ExponentSign,
) -> Result<SeriesReport> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(KneadError::InvalidInput(format!(
            "delta must lie in (0, 2], got {delta}"
        )));
    }
    if depth > ladder.depth() {
        return Err(KneadError::LadderTooShort {
            needed: depth,
            have: ladder.depth(),
        });
    }
    let e = match sign {
        ExponentSign::Plus => delta,
        ExponentSign::Minus => -delta,
    };
    let mut rows = Vec::with_capacity(depth);
    let mut partial = 0.0;
    for k in 0..depth {
        let s_k = times.s_checked(k)?;
        let a = ladder.zeta_checked(k)?;
        let b = ladder.zeta_checked(k + 1)?;
        let gap = Float::with_val(a.prec(), a - b);
        let log_gap = ln_abs_f64(&gap);
        let term = ((s_k as f64).ln() + e * log_gap).exp();
        partial += term;
        rows.push(SeriesRow {
            k,
            s_k,
            gap: log_gap.exp(),
            term,
            partial,
        });
    }
    let terms: Vec<f64> = rows.iter().map(|r| r.term).collect();
    Ok(SeriesReport {
        name: format!("longbranched-{}", if e > 0.0 { "plus" } else { "minus" }),
        growing: quarter_growth(&terms),
        total: partial,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnRow {
    pub k: usize,
    pub s_k: u64,
    /// `Q(k+1)`.
    pub expected: usize,
    pub placement: Placement,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosestReturnReport {
    pub rows: Vec<ReturnRow>,
    pub violations: Vec<usize>,
}

impl ClosestReturnReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "closest-return",
            &["k", "S_k", "Q(k+1)", "placement", "f^S_k(0)", "ok"],
        );
        for r in &self.rows {
            let place = match r.placement {
                Placement::Between { m, reflected } => {
                    format!("{}{m}", if reflected { "+" } else { "-" })
                }
                Placement::Inside => "inside".into(),
                Placement::Tie { m } => format!("tie{m}"),
            };
            let ok = !self.violations.contains(&r.k);
            t.push(vec![
                r.k.to_string(),
                r.s_k.to_string(),
                r.expected.to_string(),
                place,
                num(r.value),
                ok.to_string(),
            ]);
        }
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "closest-return-law",
            self.holds(),
            if self.holds() {
                format!(
                    "f^S_k(0) between ±ζ_(Q(k+1)-1) and ±ζ_Q(k+1) for all {} levels",
                    self.rows.len()
                )
            } else {
                format!("violated at k = {:?}", self.violations)
            },
        )
    }
}

/// Places `f^{S_k}(0)`, `1 <= k <= K`, on the ladder and checks it lies in
/// `(ζ_{Q(k+1)-1}, ζ_{Q(k+1)})` or its mirror image.
pub fn closest_return_law(
    ladder: &PrecriticalLadder,
    times: &CuttingTimes,
    depth: usize,
) -> Result<ClosestReturnReport> {
    let idx = (1..=depth)
        .map(|k| times.s_checked(k))
        .collect::<Result<Vec<_>>>()?;
    let pts = orbit_points(ladder.map(), &idx)?;
    let mut rows = Vec::with_capacity(depth);
    let mut violations = Vec::new();
    for (k, x) in (1..=depth).zip(&pts) {
        let expected = times.q(k + 1).ok_or(KneadError::OutOfRange {
            index: k as u64 + 1,
            limit: times.depth() as u64,
        })?;
        if expected > ladder.depth() {
            return Err(KneadError::LadderTooShort {
                needed: expected,
                have: ladder.depth(),
            });
        }
        let placement = ladder.locate(x);
        if !matches!(placement, Placement::Between { m, .. } if m == expected) {
            violations.push(k);
        }
        rows.push(ReturnRow {
            k,
            s_k: idx[k - 1],
            expected,
            placement,
            value: x.to_f64(),
        });
    }
    Ok(ClosestReturnReport { rows, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub k: usize,
    pub m: usize,
    pub reflected: bool,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    /// `min_k` of the gaps.
    pub kappa: f64,
    pub decreasing: bool,
}

impl GapReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new("gap-kappa", &["k", "Q(k+1)", "reflected", "gap"]);
        for r in &self.rows {
            t.push(vec![
                r.k.to_string(),
                r.m.to_string(),
                r.reflected.to_string(),
                num(r.gap),
            ]);
        }
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "kappa-positive",
            self.kappa > 0.0,
            format!(
                "kappa' estimate {:.6e} over {} levels",
                self.kappa,
                self.rows.len()
            ),
        )
    }
}

/// `|f^{S_k}(0) - ζ_{Q(k+1)}|` (against `-ζ_{Q(k+1)}` on the positive side).
/// A closest-return violation means the solve is wrong and is an error.
pub fn gap_kappa(
    ladder: &PrecriticalLadder,
    times: &CuttingTimes,
    depth: usize,
) -> Result<GapReport> {
    let law = closest_return_law(ladder, times, depth)?;
    if let Some(&k) = law.violations.first() {
        let r = &law.rows[k - 1];
        return Err(KneadError::ClosestReturnViolated {
            k,
            detail: format!(
                "f^{}(0) = {:.6e} placed {:?}, expected level {}",
                r.s_k, r.value, r.placement, r.expected
            ),
        });
    }
    let idx: Vec<u64> = law.rows.iter().map(|r| r.s_k).collect();
    let pts = orbit_points(ladder.map(), &idx)?;
    let mut rows = Vec::with_capacity(depth);
    for (r, x) in law.rows.iter().zip(&pts) {
        let Placement::Between { m, reflected } = r.placement else {
            unreachable!("checked above")
        };
        let zeta = ladder.zeta_checked(m)?;
        let gap = if reflected {
            Float::with_val(x.prec(), x + zeta)
        } else {
            Float::with_val(x.prec(), x - zeta)
        };
        rows.push(GapRow {
            k: r.k,
            m,
            reflected,
            gap: gap.abs().to_f64(),
        });
    }
    let kappa = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    Ok(GapReport {
        decreasing: gaps.len() >= 2 && !quarter_growth(&gaps),
        kappa: if rows.is_empty() { 0.0 } else { kappa },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneading::{cutting_times, KneadingMap};
    use crate::map::UnicriticalMap;
    use crate::orbit::{closest_precritical, LadderOptions};

    fn chebyshev() -> (PrecriticalLadder, CuttingTimes) {
        let m = UnicriticalMap::from_f64(2, -2.0, 256).unwrap();
        let t = cutting_times(&KneadingMap::constant(0), 12).unwrap();
        (
            closest_precritical(&m, &t, 8, LadderOptions::default()).unwrap(),
            t,
        )
    }

    #[test]
    fn chebyshev_first_terms() {
        let (ladder, t) = chebyshev();
        let r = longbranched_sum(&ladder, &t, 1.0, 3, ExponentSign::Plus).unwrap();
        let s2 = 2f64.sqrt();
        let z = [
            -s2,
            -(2.0 - s2).sqrt(),
            -(2.0 - (2.0 + s2).sqrt()).sqrt(),
            -(2.0 - (2.0 + (2.0 + s2).sqrt()).sqrt()).sqrt(),
        ];
        for k in 0..3 {
            let want = (k as f64 + 1.0) * (z[k] - z[k + 1]).abs();
            assert!((r.rows[k].term - want).abs() < 1e-12, "k={k}");
        }
        assert!((r.rows[0].term - 0.64884).abs() < 1e-5);
    }

    #[test]
    fn empty_sum() {
        let (ladder, t) = chebyshev();
        let r = longbranched_sum(&ladder, &t, 0.7, 0, ExponentSign::Minus).unwrap();
        assert!(r.rows.is_empty() && r.total == 0.0);
        assert!(longbranched_sum(&ladder, &t, 1.0, 9, ExponentSign::Plus).is_err());
        assert!(longbranched_sum(&ladder, &t, 2.5, 2, ExponentSign::Plus).is_err());
    }

    #[test]
    fn partial_sums_monotone() {
        let (ladder, t) = chebyshev();
        for sign in [ExponentSign::Plus, ExponentSign::Minus] {
            let r = longbranched_sum(&ladder, &t, 1.3, 8, sign).unwrap();
            assert!(r.rows.windows(2).all(|w| w[1].partial >= w[0].partial));
        }
    }
}
