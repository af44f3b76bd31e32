use std::cmp::Ordering;

use rug::Float;
use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::kneading::CuttingTimes;
use crate::map::UnicriticalMap;
use crate::orbit::{d_interval, iterate, orbit_points, OrbitTable, PrecriticalLadder};
use crate::precision::{self, pow2, sign_threshold};
use crate::table::{num, Table, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentRow {
    pub n: u64,
    /// Ladder levels `m` with `ζ_m` or `-ζ_m` in `D_n` (a level appears twice
    /// when both are inside).
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct No2cppReport {
    pub n_max: u64,
    /// Least `m_0` such that each `D_n` holds at most one `±ζ_m`, `m >= m_0`.
    pub m0: usize,
    pub rows: Vec<ContainmentRow>,
}

impl No2cppReport {
    /// Non-cutting `n` whose `D_n` holds two or more `±ζ_m` with `m >= m0`.
    pub fn violations(&self, m0: usize) -> Vec<u64> {
        self.rows
            .iter()
            .filter(|r| r.levels.iter().filter(|&&m| m >= m0).count() > 1)
            .map(|r| r.n)
            .collect()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new("no-two-closest-precritical", &["n", "levels_inside"]);
        for r in &self.rows {
            let levels: Vec<String> = r.levels.iter().map(usize::to_string).collect();
            t.push(vec![r.n.to_string(), levels.join(" ")]);
        }
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "no-two-closest-precritical",
            self.violations(self.m0).is_empty(),
            format!(
                "m0 = {} covers all {} non-cutting n <= {}; {} violations at m0 = 0",
                self.m0,
                self.rows.len(),
                self.n_max,
                self.violations(0).len()
            ),
        )
    }
}

/// Scans the non-cutting `n <= n_max` and records which `±ζ_m` lie in `D_n`.
///
/// `D_n` must stay outside `(ζ_M, -ζ_M)` for the deepest level `M`, otherwise
/// untracked precritical points could be inside it.
pub fn verify_no2cpp(
    ladder: &PrecriticalLadder,
    orbit: &OrbitTable,
    times: &CuttingTimes,
    n_max: u64,
) -> Result<No2cppReport> {
    let tol = ladder.tolerance().clone();
    let deepest = ladder.zeta_checked(ladder.depth())?.clone();
    let mut rows = Vec::new();
    for n in 2..=n_max {
        if times.index_of(n).is_some() {
            continue;
        }
        let d = d_interval(orbit, times, n)?;
        if d.lo < Float::with_val(deepest.prec(), -&deepest) && d.hi > deepest {
            return Err(KneadError::LadderTooShort {
                needed: ladder.depth() + 1,
                have: ladder.depth(),
            });
        }
        let mut levels = Vec::new();
        for e in ladder.entries() {
            for p in [e.zeta.clone(), Float::with_val(e.zeta.prec(), -&e.zeta)] {
                for end in [&d.lo, &d.hi] {
                    if Float::with_val(p.prec(), &p - end).abs() <= tol {
                        return Err(KneadError::UnresolvedContainment {
                            n,
                            detail: format!("±ζ_{} within tolerance of an endpoint of D_n", e.k),
                        });
                    }
                }
                if d.contains(&p) {
                    levels.push(e.k);
                }
            }
        }
        levels.sort_unstable();
        rows.push(ContainmentRow { n, levels });
    }
    // Least m0 exceeding the second-largest tracked level of every row.
    let m0 = rows
        .iter()
        .filter_map(|r| r.levels.len().checked_sub(2).map(|i| r.levels[i] + 1))
        .max()
        .unwrap_or(0);
    Ok(No2cppReport { n_max, m0, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborhoodStatus {
    Pass,
    Fail,
    /// `k <= k_0`: the hypothesis does not hold.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodReport {
    pub k: usize,
    pub status: NeighborhoodStatus,
    /// `V ∋ c` on which `f^{S_k - 1}` is monotone.
    pub v: (String, String),
    /// Image endpoints, sorted.
    pub image: (String, String),
    /// `f^{S_{Q²(k)}}(0)` and `f^{S_{Q(k)}}(0)`, sorted.
    pub expected: (String, String),
    pub errors: (f64, f64),
    pub tolerance: f64,
}

impl NeighborhoodReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "monotone-neighbourhood",
            &["k", "endpoint", "image", "expected", "error"],
        );
        t.push(vec![
            self.k.to_string(),
            "left".into(),
            self.image.0.clone(),
            self.expected.0.clone(),
            num(self.errors.0),
        ]);
        t.push(vec![
            self.k.to_string(),
            "right".into(),
            self.image.1.clone(),
            self.expected.1.clone(),
            num(self.errors.1),
        ]);
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            format!("monotone-neighbourhood-k{}", self.k),
            self.status != NeighborhoodStatus::Fail,
            format!(
                "{:?}: endpoint errors {:.3e}, {:.3e} (tolerance {:.3e})",
                self.status, self.errors.0, self.errors.1, self.tolerance
            ),
        )
    }
}

/// Sign of `f^j(x)` for `0 <= j < len`, `None` once undecided.
fn signs(map: &UnicriticalMap, x: &Float, len: u64, threshold: &Float) -> Vec<Option<bool>> {
    let mut y = Float::with_val(map.bits(), x);
    let mut out = Vec::with_capacity(len as usize);
    for _ in 0..len {
        out.push((y.cmp_abs(threshold) == Some(Ordering::Greater)).then(|| y.is_sign_positive()));
        map.step(&mut y);
    }
    out
}

/// Locates the maximal `V ∋ c` on which `f^{S_k - 1}` is monotone (all of
/// `x, f(x), ..., f^{S_k - 2}(x)` keep the signs they have at `c`) and compares
/// its image with `[f^{S_{Q²(k)}}(0), f^{S_{Q(k)}}(0)]` to `2^{-bits/4}`.
pub fn verify_monotone_neighborhood(
    map: &UnicriticalMap,
    times: &CuttingTimes,
    k: usize,
    k0: usize,
) -> Result<NeighborhoodReport> {
    let bits = map.bits();
    let tolerance = pow2(bits, -((bits / 4) as i32));
    if k <= k0 {
        return Ok(NeighborhoodReport {
            k,
            status: NeighborhoodStatus::Skipped,
            v: Default::default(),
            image: Default::default(),
            expected: Default::default(),
            errors: (f64::NAN, f64::NAN),
            tolerance: tolerance.to_f64(),
        });
    }
    let s_k = times.s_checked(k)?;
    let qk = times.q(k).ok_or(KneadError::OutOfRange {
        index: k as u64,
        limit: times.depth() as u64,
    })?;
    let q2k = times.q(qk).unwrap_or(0);
    let len = s_k - 1;
    let threshold = sign_threshold(bits);
    let c = map.c().clone();
    let reference = signs(map, &c, len, &threshold);
    if let Some(j) = reference.iter().position(Option::is_none) {
        return Err(KneadError::EndpointUnresolved(format!(
            "f^{j}(c) is within the sign threshold at {bits} bits"
        )));
    }
    let same = |x: &Float| signs(map, x, len, &threshold) == reference;

    let left = endpoint(bits, &c, -1, &same)?;
    let right = endpoint(bits, &c, 1, &same)?;
    let a = iterate(map, &left, len)?;
    let b = iterate(map, &right, len)?;
    let (ilo, ihi) = sorted(a, b);
    let targets = orbit_points(map, &[times.s_checked(q2k)?, times.s_checked(qk)?])?;
    let [t0, t1]: [Float; 2] = targets.try_into().expect("two points");
    let (elo, ehi) = sorted(t0, t1);
    let e0 = Float::with_val(bits, &ilo - &elo).abs();
    let e1 = Float::with_val(bits, &ihi - &ehi).abs();
    let pass = e0 <= tolerance && e1 <= tolerance;
    let digits = precision::decimal_digits(bits).min(40);
    let dec = |x: &Float| precision::to_decimal_digits(x, digits);
    Ok(NeighborhoodReport {
        k,
        status: if pass {
            NeighborhoodStatus::Pass
        } else {
            NeighborhoodStatus::Fail
        },
        v: (dec(&left), dec(&right)),
        image: (dec(&ilo), dec(&ihi)),
        expected: (dec(&elo), dec(&ehi)),
        errors: (e0.to_f64(), e1.to_f64()),
        tolerance: tolerance.to_f64(),
    })
}

fn sorted(a: Float, b: Float) -> (Float, Float) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Outward doubling march from `c` in direction `dir`, then bisection of the
/// (interval-valued) predicate down to the working precision.
fn endpoint(bits: u32, c: &Float, dir: i32, same: &dyn Fn(&Float) -> bool) -> Result<Float> {
    let at = |h: &Float| {
        let mut x = Float::with_val(bits, h * dir);
        x += c;
        x
    };
    let mut h = pow2(bits, -8);
    let floor = pow2(bits, -(bits as i32) + 8);
    while !same(&at(&h)) {
        h >>= 1;
        if h < floor {
            return Err(KneadError::EndpointUnresolved(format!(
                "no monotone neighbourhood wider than 2^-{} on the {} side",
                bits - 8,
                if dir < 0 { "left" } else { "right" }
            )));
        }
    }
    let mut good = h.clone();
    let mut bad = Float::with_val(bits, &h * 2u32);
    while same(&at(&bad)) {
        good = bad.clone();
        bad *= 2u32;
        if bad > 4 {
            return Err(KneadError::EndpointUnresolved(
                "monotone neighbourhood is unbounded".into(),
            ));
        }
    }
    for _ in 0..bits + 8 {
        let mut mid = Float::with_val(bits, &good + &bad);
        mid /= 2;
        if mid == good || mid == bad {
            break;
        }
        if same(&at(&mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(at(&good))
}
