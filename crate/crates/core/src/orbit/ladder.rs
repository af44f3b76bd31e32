use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use super::iterate_with_derivative;
use crate::error::{KneadError, Result};
use crate::kneading::CuttingTimes;
use crate::map::UnicriticalMap;
use crate::precision::{self, root_tolerance};

/// Controls the monotone-branch witness attached to every ladder entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderOptions {
    /// Grid size on `(ζ_{k-1}, ζ_k)`.
    pub witness_samples: usize,
    /// Upper bound on `samples * S_k` iterations per level; deep levels get a
    /// coarser grid (never fewer than 8 samples).
    pub witness_budget: u64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions {
            witness_samples: 1 << 10,
            witness_budget: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderEntry {
    pub k: usize,
    pub s_k: u64,
    pub zeta: Float,
    /// `|f^{S_k}(ζ_k)|`.
    pub residual: Float,
    /// Grid points checked for a sign change of `f^{S_k}` on `(ζ_{k-1}, ζ_k)`.
    pub witness_samples: usize,
}

/// Closest precritical points `ζ_0 < ζ_1 < ... < 0`; by symmetry `ζ̂_k = -ζ_k`.
#[derive(Debug, Clone)]
pub struct PrecriticalLadder {
    map: UnicriticalMap,
    entries: Vec<LadderEntry>,
    tolerance: Float,
}

/// Where a real point sits relative to the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Placement {
    /// `x ∈ (ζ_{m-1}, ζ_m)`, or `-x` there when `reflected`; `ζ_{-1} = -∞`.
    Between { m: usize, reflected: bool },
    /// `|x| < |ζ_M|` for the deepest computed level `M`.
    Inside,
    /// `x` is within tolerance of `±ζ_m`.
    Tie { m: usize },
}

impl PrecriticalLadder {
    pub fn map(&self) -> &UnicriticalMap {
        &self.map
    }

    pub fn entries(&self) -> &[LadderEntry] {
        &self.entries
    }

    /// Deepest level `M`.
    pub fn depth(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn zeta(&self, k: usize) -> Option<&Float> {
        self.entries.get(k).map(|e| &e.zeta)
    }

    pub fn zeta_checked(&self, k: usize) -> Result<&Float> {
        self.zeta(k).ok_or(KneadError::LadderTooShort {
            needed: k,
            have: self.depth(),
        })
    }

    pub fn tolerance(&self) -> &Float {
        &self.tolerance
    }

    pub fn locate(&self, x: &Float) -> Placement {
        let y = Float::with_val(x.prec(), -x.clone().abs());
        let reflected = x.is_sign_positive() && !x.is_zero();
        for e in &self.entries {
            let gap = Float::with_val(y.prec(), &y - &e.zeta).abs();
            if gap <= self.tolerance {
                return Placement::Tie { m: e.k };
            }
            if y < e.zeta {
                return Placement::Between { m: e.k, reflected };
            }
        }
        Placement::Inside
    }
}

/// Builds `ζ_0 .. ζ_{k_max}`: `ζ_0` solves `f(ζ_0) = 0`, and `ζ_k` is the unique
/// zero of `f^{S_k}` on the central branch `(ζ_{k-1}, 0)`.
pub fn closest_precritical(
    map: &UnicriticalMap,
    times: &CuttingTimes,
    k_max: usize,
    options: LadderOptions,
) -> Result<PrecriticalLadder> {
    if k_max > times.depth() {
        return Err(KneadError::OutOfRange {
            index: k_max as u64,
            limit: times.depth() as u64,
        });
    }
    if !map.c().is_sign_negative() {
        return Err(KneadError::InvalidInput(
            "closest precritical points need c < 0".into(),
        ));
    }
    let bits = map.bits();
    let tolerance = root_tolerance(bits);

    let mut zeta0 = Float::with_val(bits, -map.c());
    zeta0.root_mut(map.ell());
    let zeta0 = -zeta0;
    let residual0 = map.apply(&zeta0).abs();
    let mut entries = vec![LadderEntry {
        k: 0,
        s_k: 1,
        zeta: zeta0,
        residual: residual0,
        witness_samples: 0,
    }];

    for k in 1..=k_max {
        let period = times.s_checked(k)?;
        let left = entries[k - 1].zeta.clone();
        let g_left = eval(map, &left, period)?;
        let g_zero = eval(map, &map.zero(), period)?;
        if g_left.is_zero()
            || g_zero.is_zero()
            || g_left.is_sign_negative() == g_zero.is_sign_negative()
        {
            return Err(KneadError::NoRoot { k, period });
        }
        let left_negative = g_left.is_sign_negative();
        let (zeta, residual) = branch_root(map, period, left.clone(), map.zero(), left_negative)?;
        if residual > tolerance {
            return Err(KneadError::PrecisionExhausted {
                bits,
                context: format!(
                    "residual {} of ζ_{k} above tolerance",
                    precision::to_decimal_digits(&residual, 6)
                ),
            });
        }
        if !(left < zeta && zeta.is_sign_negative()) {
            return Err(KneadError::NoRoot { k, period });
        }
        let samples = witness_size(options, period);
        monotone_witness(map, period, &left, &zeta, left_negative, samples)
            .map_err(|_| KneadError::NoRoot { k, period })?;
        entries.push(LadderEntry {
            k,
            s_k: period,
            zeta,
            residual,
            witness_samples: samples,
        });
    }

    Ok(PrecriticalLadder {
        map: map.clone(),
        entries,
        tolerance,
    })
}

fn eval(map: &UnicriticalMap, x: &Float, n: u64) -> Result<Float> {
    let mut y = Float::with_val(map.bits(), x);
    for _ in 0..n {
        map.step(&mut y);
    }
    if !y.is_finite() {
        return Err(KneadError::Escaped { step: n });
    }
    Ok(y)
}

fn witness_size(options: LadderOptions, period: u64) -> usize {
    let affordable = (options.witness_budget / period.max(1)) as usize;
    options.witness_samples.min(affordable).max(8)
}

/// No sign change of `f^{period}` strictly between `left` and `right`.
fn monotone_witness(
    map: &UnicriticalMap,
    period: u64,
    left: &Float,
    right: &Float,
    left_negative: bool,
    samples: usize,
) -> std::result::Result<(), usize> {
    let bits = map.bits();
    let width = Float::with_val(bits, right - left);
    (1..=samples).into_par_iter().try_for_each(|i| {
        let mut x = Float::with_val(bits, &width * (i as u32));
        x /= (samples + 1) as u32;
        x += left;
        match eval(map, &x, period) {
            Ok(v) if !v.is_zero() && v.is_sign_negative() == left_negative => Ok(()),
            _ => Err(i),
        }
    })
}

/// Newton iteration safeguarded by the sign bracket `[lo, hi]`.
fn branch_root(
    map: &UnicriticalMap,
    period: u64,
    mut lo: Float,
    mut hi: Float,
    lo_negative: bool,
) -> Result<(Float, Float)> {
    let bits = map.bits();
    let mut x = Float::with_val(bits, &lo + &hi);
    x /= 2;
    let mut last = Float::with_val(bits, 0);
    for _ in 0..bits {
        let (gx, dx) = iterate_with_derivative(map, &x, period)?;
        if gx.is_zero() {
            return Ok((x, gx));
        }
        if gx.is_sign_negative() == lo_negative {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let scale = precision::pow2(bits, -(bits as i32) + 6) * Float::with_val(bits, x.abs_ref());
        let width = Float::with_val(bits, &hi - &lo);
        if width <= scale {
            break;
        }
        let mut next = Float::with_val(bits, &gx / &dx);
        let step = next.clone().abs();
        next = Float::with_val(bits, &x - &next);
        let inside = dx.is_normal() && next > lo && next < hi;
        let converging = inside
            && (last.is_zero() || step < Float::with_val(bits, &last / 2u32) || step <= scale);
        if converging {
            x = next;
            last = step.clone();
            if step <= scale {
                break;
            }
        } else {
            x = Float::with_val(bits, &lo + &hi);
            x /= 2;
            last = Float::with_val(bits, &width / 2u32);
        }
    }
    let residual = eval(map, &x, period)?.abs();
    Ok((x, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneading::{cutting_times, KneadingMap};

    fn chebyshev(bits: u32) -> (UnicriticalMap, CuttingTimes) {
        let m = UnicriticalMap::from_f64(2, -2.0, bits).unwrap();
        let t = cutting_times(&KneadingMap::constant(0), 12).unwrap();
        (m, t)
    }

    /// Nested radicals `ζ_k = -sqrt(2 - sqrt(2 + sqrt(2 + ...)))` with `k` inner roots.
    fn nested(bits: u32, k: usize) -> Float {
        if k == 0 {
            return -Float::with_val(bits, 2).sqrt();
        }
        let mut inner = Float::with_val(bits, 2).sqrt();
        for _ in 1..k {
            inner = (Float::with_val(bits, 2) + inner).sqrt();
        }
        -(Float::with_val(bits, 2) - inner).sqrt()
    }

    #[test]
    fn chebyshev_ladder_matches_nested_radicals() {
        let (m, t) = chebyshev(256);
        let ladder = closest_precritical(&m, &t, 8, LadderOptions::default()).unwrap();
        for k in 0..=8 {
            let err = Float::with_val(256, ladder.zeta(k).unwrap() - nested(256, k)).abs();
            assert!(err < 1e-60, "k={k} err={err}");
        }
        assert!((ladder.zeta(1).unwrap().to_f64() + 0.76537).abs() < 1e-5);
        assert!((ladder.zeta(2).unwrap().to_f64() + 0.39018).abs() < 1e-5);
    }

    #[test]
    fn ladder_is_ordered_with_small_residuals() {
        let (m, t) = chebyshev(128);
        let ladder = closest_precritical(&m, &t, 10, LadderOptions::default()).unwrap();
        for w in ladder.entries().windows(2) {
            assert!(w[0].zeta < w[1].zeta);
        }
        for e in ladder.entries() {
            assert!(e.residual < *ladder.tolerance());
            assert!(e.zeta.is_sign_negative());
        }
    }

    #[test]
    fn locate_places_points_between_rungs() {
        let (m, t) = chebyshev(128);
        let ladder = closest_precritical(&m, &t, 4, LadderOptions::default()).unwrap();
        assert_eq!(
            ladder.locate(&m.float(-1.9)),
            Placement::Between {
                m: 0,
                reflected: false
            }
        );
        assert_eq!(
            ladder.locate(&m.float(2.0)),
            Placement::Between {
                m: 0,
                reflected: true
            }
        );
        assert_eq!(
            ladder.locate(&m.float(-0.5)),
            Placement::Between {
                m: 2,
                reflected: false
            }
        );
        assert_eq!(ladder.locate(&m.float(1e-6)), Placement::Inside);
        let z1 = ladder.zeta(1).unwrap().clone();
        assert_eq!(ladder.locate(&-z1), Placement::Tie { m: 1 });
    }

    #[test]
    fn wrong_cutting_times_have_no_root() {
        // Fibonacci cutting times do not belong to the Chebyshev parameter.
        let m = UnicriticalMap::from_f64(2, -2.0, 128).unwrap();
        let t = cutting_times(&KneadingMap::fibonacci(), 6).unwrap();
        assert!(closest_precritical(&m, &t, 6, LadderOptions::default()).is_err());
    }
}
