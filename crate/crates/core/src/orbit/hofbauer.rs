use rug::Float;
use serde::Serialize;

use super::{orbit_points, OrbitTable};
use crate::error::{KneadError, Result};
use crate::kneading::{beta, CuttingTimes};
use crate::map::UnicriticalMap;

/// `D_n = [f^n(0), f^{β(n)}(0)]`, stored with ordered endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct DInterval {
    pub n: u64,
    pub beta: u64,
    pub cutting: bool,
    pub lo: Float,
    pub hi: Float,
}

impl DInterval {
    pub fn contains(&self, x: &Float) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    pub fn len(&self) -> Float {
        Float::with_val(self.lo.prec(), &self.hi - &self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }

    /// `self ⊆ other` up to `tol` on each side.
    pub fn within(&self, other: &DInterval, tol: &Float) -> bool {
        let lo = Float::with_val(self.lo.prec(), &other.lo - tol);
        let hi = Float::with_val(self.lo.prec(), &other.hi + tol);
        self.lo >= lo && self.hi <= hi
    }
}

pub fn d_interval(orbit: &OrbitTable, times: &CuttingTimes, n: u64) -> Result<DInterval> {
    if n > orbit.len() {
        return Err(KneadError::OutOfRange {
            index: n,
            limit: orbit.len(),
        });
    }
    let b = beta(times, n)?;
    let a = orbit.at(n)?.clone();
    let other = orbit.at(b.value)?.clone();
    let (lo, hi) = if a <= other { (a, other) } else { (other, a) };
    Ok(DInterval {
        n,
        beta: b.value,
        cutting: b.cutting,
        lo,
        hi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodicVerdict {
    Periodic,
    NotPeriodic,
    /// The orbit hull still grew between `J` and `2J` returns.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicIntervalVerdict {
    pub verdict: PeriodicVerdict,
    pub period: u64,
    pub interval: (f64, f64),
    pub witness: String,
}

/// Checks whether the hull `I` of `{0} ∪ {f^{jS}(0) : 1 <= j <= 2J}` is a
/// periodic interval: `f^S(I) ⊆ I` and the intervals `f^i(I)`, `0 <= i < S`,
/// have pairwise disjoint interiors. Interval images are propagated exactly
/// (a unimodal branch maps `[a, b]` onto the hull of its endpoint images, plus
/// `c` when `0 ∈ [a, b]`).
pub fn detect_periodic_interval(
    map: &UnicriticalMap,
    period: u64,
    returns: u64,
) -> Result<PeriodicIntervalVerdict> {
    if period == 0 || returns == 0 {
        return Err(KneadError::InvalidInput(
            "period and return count must be positive".into(),
        ));
    }
    let bits = map.bits();
    let idx: Vec<u64> = (1..=2 * returns).map(|j| j * period).collect();
    let pts = orbit_points(map, &idx)?;
    let hull = |count: usize| {
        let mut lo = map.zero();
        let mut hi = map.zero();
        for p in &pts[..count] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        (lo, hi)
    };
    let (lo_j, hi_j) = hull(returns as usize);
    let (lo, hi) = hull(2 * returns as usize);
    let width = Float::with_val(bits, &hi - &lo);
    let growth = Float::with_val(bits, &width - Float::with_val(bits, &hi_j - &lo_j));
    let slack = Float::with_val(bits, &width * 1e-9) + Float::with_val(bits, 1e-30);
    let interval = (lo.to_f64(), hi.to_f64());
    if growth > slack {
        return Ok(PeriodicIntervalVerdict {
            verdict: PeriodicVerdict::Inconclusive,
            period,
            interval,
            witness: format!(
                "hull grew by {:.3e} between J and 2J returns",
                growth.to_f64()
            ),
        });
    }

    let mut images = Vec::with_capacity(period as usize);
    let (mut a, mut b) = (lo.clone(), hi.clone());
    for _ in 0..period {
        images.push((a.clone(), b.clone()));
        (a, b) = image(map, &a, &b);
    }
    let lo_slack = Float::with_val(bits, &lo - &slack);
    let hi_slack = Float::with_val(bits, &hi + &slack);
    if a < lo_slack || b > hi_slack {
        return Ok(PeriodicIntervalVerdict {
            verdict: PeriodicVerdict::NotPeriodic,
            period,
            interval,
            witness: format!(
                "f^{period}(I) = [{:.6}, {:.6}] leaves I = [{:.6}, {:.6}]",
                a.to_f64(),
                b.to_f64(),
                interval.0,
                interval.1
            ),
        });
    }
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let (ai, bi) = &images[i];
            let (aj, bj) = &images[j];
            let top = if bi < bj { bi } else { bj };
            let bottom = if ai > aj { ai } else { aj };
            let overlap = Float::with_val(bits, top - bottom);
            if overlap > slack {
                return Ok(PeriodicIntervalVerdict {
                    verdict: PeriodicVerdict::NotPeriodic,
                    period,
                    interval,
                    witness: format!("f^{i}(I) and f^{j}(I) overlap by {:.3e}", overlap.to_f64()),
                });
            }
        }
    }
    Ok(PeriodicIntervalVerdict {
        verdict: PeriodicVerdict::Periodic,
        period,
        interval,
        witness: format!(
            "f^{period}(I) = [{:.12}, {:.12}] inside I",
            a.to_f64(),
            b.to_f64()
        ),
    })
}

fn image(map: &UnicriticalMap, a: &Float, b: &Float) -> (Float, Float) {
    let fa = map.apply(a);
    let fb = map.apply(b);
    let (mut lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
    if a.is_sign_negative() != b.is_sign_negative() || a.is_zero() || b.is_zero() {
        lo = Float::with_val(map.bits(), map.c());
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneading::{cutting_times, KneadingMap};
    use crate::orbit::critical_orbit;

    #[test]
    fn d_interval_uses_beta() {
        let m = UnicriticalMap::from_f64(2, -1.8705, 128).unwrap();
        let t = cutting_times(&KneadingMap::fibonacci(), 8).unwrap();
        let orbit = critical_orbit(&m, 40).unwrap();
        let d = d_interval(&orbit, &t, 4).unwrap();
        assert_eq!((d.beta, d.cutting), (1, false));
        let d5 = d_interval(&orbit, &t, 5).unwrap();
        assert_eq!((d5.beta, d5.cutting), (2, true));
        assert_eq!(d5.beta, t.s(t.q(3).unwrap()).unwrap());
        let d2 = d_interval(&orbit, &t, 2).unwrap();
        assert_eq!(d2.beta, 1);
        assert!(d2.contains(orbit.at(1).unwrap()) && d2.contains(orbit.at(2).unwrap()));
        assert!(d_interval(&orbit, &t, 41).is_err());
    }

    #[test]
    fn superstable_period_two_is_periodic() {
        let m = UnicriticalMap::from_f64(2, -1.0, 128).unwrap();
        let v = detect_periodic_interval(&m, 2, 32).unwrap();
        assert_eq!(v.verdict, PeriodicVerdict::Periodic, "{}", v.witness);
    }

    #[test]
    fn chebyshev_has_no_period_two_interval() {
        let m = UnicriticalMap::from_f64(2, -2.0, 128).unwrap();
        let v = detect_periodic_interval(&m, 2, 32).unwrap();
        assert_eq!(v.verdict, PeriodicVerdict::NotPeriodic, "{}", v.witness);
    }
}
