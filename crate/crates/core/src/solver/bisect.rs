use rug::Float;
use serde::{Serialize, Serializer};

use super::c_min;
use super::itinerary::{
    compare_with_target, parity_lex_compare_partial, sign_itinerary_adaptive, LexComparison,
    LexOrder, Streamed,
};
use crate::error::{KneadError, Result};
use crate::kneading::{cutting_times, KneadingMap, SymbolGenerator};
use crate::map::{validate_ell, UnicriticalMap};
use crate::precision::{self, PrecisionPolicy};

/// Every parameter in the bracket lies on the dyadic grid `2^-GRID`, so
/// bisection midpoints are exact and re-solves at higher precision retrace
/// the same decisions.
const GRID: i32 = 20;

/// Endpoint itineraries are compared over at most this many symbols (or
/// `4 S_K` if larger).
const ENDPOINT_LEN: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub ell: u32,
    pub c_lo: Float,
    pub c_hi: Float,
    /// Largest `K'` with both endpoint itineraries matching the target
    /// through `S_{K'}`.
    pub matched_depth: usize,
    /// Common length through which both endpoints match the target.
    pub matched_len: u64,
    pub requested_depth: usize,
    pub precision_used: u32,
    pub iterations: u64,
}

impl SolveResult {
    pub fn width(&self) -> Float {
        Float::with_val(self.c_lo.prec(), &self.c_hi - &self.c_lo)
    }

    pub fn midpoint(&self) -> Float {
        let mut m = Float::with_val(self.c_lo.prec() + 1, &self.c_lo + &self.c_hi);
        m /= 2;
        m
    }

    pub fn contains(&self, c: &Float) -> bool {
        *c >= self.c_lo && *c <= self.c_hi
    }

    /// The map at the bracket midpoint, at the given precision.
    pub fn map(&self, bits: u32) -> Result<UnicriticalMap> {
        UnicriticalMap::new(self.ell, Float::with_val(bits, self.midpoint()))
    }
}

impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let digits = precision::decimal_digits(self.precision_used);
        let mut st = s.serialize_struct("SolveResult", 7)?;
        st.serialize_field("ell", &self.ell)?;
        st.serialize_field("c_lo", &precision::to_decimal_digits(&self.c_lo, digits))?;
        st.serialize_field("c_hi", &precision::to_decimal_digits(&self.c_hi, digits))?;
        st.serialize_field("matched_depth", &self.matched_depth)?;
        st.serialize_field("precision_bits", &self.precision_used)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.serialize_field("width", &precision::to_decimal_digits(&self.width(), 6))?;
        st.end()
    }
}

struct Search<'a> {
    ell: u32,
    target: SymbolGenerator,
    policy: &'a PrecisionPolicy,
    bits_used: u32,
}

impl Search<'_> {
    /// Streams the itinerary at `c` against the target, doubling precision on
    /// undecided symbols.
    fn compare(&mut self, c: &Float, max_len: u64) -> Result<LexComparison> {
        let mut bits = c.prec();
        loop {
            let map = UnicriticalMap::new(self.ell, Float::with_val(bits, c))?;
            match compare_with_target(&map, &mut self.target, max_len)? {
                Streamed::Done(r) => {
                    self.bits_used = self.bits_used.max(bits);
                    return Ok(r);
                }
                Streamed::Undecided(n) if bits >= self.policy.max_bits => {
                    return Err(KneadError::PrecisionExhausted {
                        bits,
                        context: format!(
                            "symbol {n} undecided at c = {}",
                            precision::to_decimal_digits(c, 25)
                        ),
                    })
                }
                Streamed::Undecided(_) => bits = (bits * 2).min(self.policy.max_bits),
            }
        }
    }
}

fn snap_down(c: &Float) -> Float {
    let mut x = Float::with_val(c.prec(), c << GRID);
    x.floor_mut();
    x >> GRID
}

/// Bisects `[c_min(ℓ), -2^-20]` (outer end snapped to the `2^-20` grid) for the
/// parameter whose itinerary is the kneading sequence of `q`.
///
/// Each midpoint is compared with the target in parity-lexicographic order,
/// streaming the orbit until the first difference; the order direction comes
/// from two probe parameters. The search stops once the bracket is narrower
/// than `2^-target_bits` and both ends match the target through `S_K`.
pub fn solve_parameter(
    ell: u32,
    q: &KneadingMap,
    depth: usize,
    policy: &PrecisionPolicy,
) -> Result<SolveResult> {
    validate_ell(ell)?;
    policy.validate()?;
    if depth < 3 {
        return Err(KneadError::InvalidInput(format!(
            "depth must be at least 3, got {depth}"
        )));
    }
    let s_k = cutting_times(q, depth)?.s_checked(depth)?;
    let bits = policy.start_bits.max(policy.target_bits + 64);
    if bits > policy.max_bits {
        return Err(KneadError::InvalidInput(format!(
            "target of {} bits needs {bits} working bits, above the cap {}",
            policy.target_bits, policy.max_bits
        )));
    }

    let mut lo = snap_down(&c_min(ell, bits)?);
    let mut hi = -precision::pow2(bits, -GRID);

    // Calibrate: which side of the parameter interval has the smaller itineraries.
    let probe_policy = PrecisionPolicy {
        start_bits: bits,
        ..*policy
    };
    let probe_lo = UnicriticalMap::new(
        ell,
        Float::with_val(bits, &lo + precision::pow2(bits, -GRID)),
    )?;
    let probe_hi = UnicriticalMap::new(ell, hi.clone())?;
    let a = sign_itinerary_adaptive(&probe_lo, 64, &probe_policy)?;
    let b = sign_itinerary_adaptive(&probe_hi, 64, &probe_policy)?;
    let low_side = parity_lex_compare_partial(&a.symbols, &b.symbols)?.order;
    if low_side != LexOrder::Less {
        return Err(KneadError::MonotonicityViolation(format!(
            "calibration probes compare {low_side:?}; the parity order must increase with c"
        )));
    }

    let mut search = Search {
        ell,
        target: SymbolGenerator::new(q),
        policy,
        bits_used: bits,
    };
    let endpoint_len = ENDPOINT_LEN.max(4 * s_k).min(policy.max_orbit_len);
    // First-difference index for each end (a lower bound when they agree
    // through the whole compared prefix).
    let mut lo_idx = side_index(&mut search, &lo, endpoint_len, LexOrder::Less)?;
    let mut hi_idx = side_index(&mut search, &hi, endpoint_len, LexOrder::Greater)?;

    let eps = precision::pow2(bits, -(policy.target_bits as i32));
    let mut iterations = 0u64;
    loop {
        let agreed = lo_idx.min(hi_idx) - 1;
        let width = Float::with_val(bits, &hi - &lo);
        if width < eps && agreed >= s_k {
            break;
        }
        let mut mid = Float::with_val(bits, &lo + &hi);
        mid /= 2;
        if mid == lo || mid == hi {
            if agreed < s_k {
                return Err(KneadError::AdmissibilityViolation { index: agreed + 1 });
            }
            break;
        }
        let r = search.compare(&mid, policy.max_orbit_len)?;
        iterations += 1;
        match r.order {
            LexOrder::EqualThroughPrefix => {
                return Err(KneadError::PrecisionExhausted {
                    bits: search.bits_used,
                    context: format!(
                        "itinerary at c = {} matches the target through max_orbit_len = {}",
                        precision::to_decimal_digits(&mid, 25),
                        policy.max_orbit_len
                    ),
                })
            }
            LexOrder::Less => {
                check_monotone(r.index, lo_idx, "lower")?;
                lo = mid;
                lo_idx = r.index;
            }
            LexOrder::Greater => {
                check_monotone(r.index, hi_idx, "upper")?;
                hi = mid;
                hi_idx = r.index;
            }
        }
    }

    let matched_len = lo_idx.min(hi_idx) - 1;
    search.target.ensure(matched_len as usize + 1)?;
    let matched_depth = search
        .target
        .cutting_times()
        .iter()
        .rposition(|&s| s <= matched_len)
        .unwrap_or(0);
    Ok(SolveResult {
        ell,
        c_lo: lo,
        c_hi: hi,
        matched_depth,
        matched_len,
        requested_depth: depth,
        precision_used: search.bits_used,
        iterations,
    })
}

/// An initial end must sit on its own side of the target (or agree with it).
fn side_index(search: &mut Search<'_>, c: &Float, len: u64, side: LexOrder) -> Result<u64> {
    let r = search.compare(c, len)?;
    match r.order {
        LexOrder::EqualThroughPrefix => Ok(len + 1),
        o if o == side => Ok(r.index),
        _ => Err(KneadError::AdmissibilityViolation { index: r.index }),
    }
}

/// Anything between an end and the target shares the end's agreement with the
/// target, so a replacing midpoint cannot agree for fewer symbols.
fn check_monotone(new: u64, old: u64, side: &str) -> Result<()> {
    if new < old {
        return Err(KneadError::MonotonicityViolation(format!(
            "{side} end agreed through {} symbols, its replacement only through {}",
            old - 1,
            new - 1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::critical_orbit;

    #[test]
    fn chebyshev_target_brackets_minus_two() {
        let policy = PrecisionPolicy::with_target(70);
        let r = solve_parameter(2, &KneadingMap::constant(0), 10, &policy).unwrap();
        let minus_two = Float::with_val(256, -2);
        assert!(r.contains(&minus_two));
        assert!(r.width() < 1e-20);
        assert!(r.matched_depth >= 10);
    }

    #[test]
    fn fibonacci_solve_matches_itinerary() {
        let q = KneadingMap::fibonacci();
        let r = solve_parameter(2, &q, 8, &PrecisionPolicy::with_target(64)).unwrap();
        assert!(
            (r.midpoint().to_f64() + 1.8705).abs() < 1e-3,
            "{}",
            r.midpoint()
        );
        let m = r.map(r.precision_used).unwrap();
        let target = crate::kneading::kneading_sequence_from_q(&q, 55).unwrap();
        let orbit = critical_orbit(&m, 55).unwrap();
        for (n, s) in orbit.signs().into_iter().enumerate() {
            if let Some(s) = s {
                assert_eq!(Some(s), target.get(n + 1), "n={}", n + 1);
            }
        }
    }

    #[test]
    fn higher_precision_resolve_is_nested() {
        let q = KneadingMap::fibonacci();
        let a = solve_parameter(2, &q, 6, &PrecisionPolicy::with_target(40)).unwrap();
        let policy = PrecisionPolicy {
            start_bits: 256,
            ..PrecisionPolicy::with_target(80)
        };
        let b = solve_parameter(2, &q, 6, &policy).unwrap();
        assert!(b.c_lo >= a.c_lo && b.c_hi <= a.c_hi);
    }

    #[test]
    fn non_admissible_target_is_reported() {
        // Q(4) = 0 breaks admissibility of the Feigenbaum table.
        let mut table: Vec<usize> = (1..=80).map(|k| k - 1).collect();
        table[3] = 0;
        let err = solve_parameter(
            2,
            &KneadingMap::explicit(table),
            6,
            &PrecisionPolicy::with_target(40),
        );
        assert!(
            matches!(err, Err(KneadError::AdmissibilityViolation { .. })),
            "{err:?}"
        );
    }

    #[test]
    fn json_shape() {
        let r = solve_parameter(
            2,
            &KneadingMap::constant(0),
            4,
            &PrecisionPolicy::with_target(30),
        )
        .unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["ell", "c_lo", "c_hi", "matched_depth", "precision_bits"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["c_lo"].as_str().unwrap().starts_with("-2"));
    }

    #[test]
    fn shallow_depth_rejected() {
        assert!(
            solve_parameter(2, &KneadingMap::fibonacci(), 2, &PrecisionPolicy::default()).is_err()
        );
    }
}
