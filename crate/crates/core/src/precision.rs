//! Extended-precision helpers shared by every numeric module.
//!
//! All real arithmetic is MPFR through [`rug::Float`]. A working precision is
//! a mantissa width in bits; derived thresholds (sign decisions, root
//! residuals) are powers of two of that width.

use rug::float::Round;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{KneadError, Result};

pub const MIN_BITS: u32 = 64;
pub const MAX_BITS: u32 = 4096;

/// Start/cap/target description of how much precision a computation may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
    /// Stop refining once the parameter bracket is narrower than `2^-target_bits`.
    pub target_bits: u32,
    /// Longest critical-orbit prefix a single itinerary comparison may iterate.
    pub max_orbit_len: u64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start_bits: 128,
            max_bits: MAX_BITS,
            target_bits: 64,
            max_orbit_len: 1 << 27,
        }
    }
}

impl PrecisionPolicy {
    pub fn with_target(target_bits: u32) -> Self {
        PrecisionPolicy {
            target_bits,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_bits < MIN_BITS || self.start_bits > self.max_bits || self.max_bits > MAX_BITS
        {
            return Err(KneadError::InvalidInput(format!(
                "precision policy needs {MIN_BITS} <= start ({}) <= cap ({}) <= {MAX_BITS}",
                self.start_bits, self.max_bits
            )));
        }
        if self.target_bits == 0 {
            return Err(KneadError::InvalidInput(
                "target_bits must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn from_f64(bits: u32, v: f64) -> Float {
    Float::with_val(bits, v)
}

/// Exact power of two `2^exp` at the given precision.
pub fn pow2(bits: u32, exp: i32) -> Float {
    Float::with_val(bits, 1) << exp
}

/// Sign-decision threshold `2^{-bits/2}`.
pub fn sign_threshold(bits: u32) -> Float {
    pow2(bits, -((bits / 2) as i32))
}

/// Root residual tolerance, identical to the sign threshold.
pub fn root_tolerance(bits: u32) -> Float {
    sign_threshold(bits)
}

pub fn parse_decimal(bits: u32, s: &str) -> Result<Float> {
    let parsed = Float::parse(s.trim())
        .map_err(|e| KneadError::InvalidInput(format!("cannot parse {s:?} as a real: {e}")))?;
    Ok(Float::with_val(bits, parsed))
}

/// Number of significant decimal digits carried by `bits` of mantissa.
pub fn decimal_digits(bits: u32) -> usize {
    ((bits as f64) / std::f64::consts::LOG2_10).floor().max(1.0) as usize
}

/// Decimal rendering sized to the value's own precision.
pub fn to_decimal(x: &Float) -> String {
    to_decimal_digits(x, decimal_digits(x.prec()))
}

pub fn to_decimal_digits(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = x.to_string_radix_round(10, Some(digits), Round::Nearest);
    normalize_exponent(&s)
}

// MPFR writes exponents as "e-5"/"e5"; keep plain fixed notation for moderate
// magnitudes so CSV columns are easy to read back.
fn normalize_exponent(s: &str) -> String {
    let Some(pos) = s.find('e') else {
        return s.to_string();
    };
    let (mant, exp) = s.split_at(pos);
    let exp: i64 = match exp[1..].parse() {
        Ok(v) => v,
        Err(_) => return s.to_string(),
    };
    if !(-30..=30).contains(&exp) {
        return s.to_string();
    }
    let negative = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    let point = int_part.len() as i64 + exp;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

/// Natural log of `|x|` as an f64, valid far outside the f64 exponent range.
pub fn ln_abs_f64(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mant, exp) = x.to_f64_exp();
    mant.abs().ln() + (exp as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering_is_fixed_point_for_moderate_values() {
        let x = from_f64(64, -2.0);
        assert_eq!(to_decimal_digits(&x, 5), "-2.0000");
        let y = from_f64(64, 0.000125);
        assert_eq!(to_decimal_digits(&y, 3), "0.000125");
        let z = from_f64(64, 1234.5);
        assert_eq!(to_decimal_digits(&z, 6), "1234.50");
    }

    #[test]
    fn digits_follow_bit_width() {
        assert_eq!(decimal_digits(128), 38);
        assert_eq!(decimal_digits(64), 19);
    }

    #[test]
    fn parse_round_trips_through_decimal() {
        let x = parse_decimal(256, "-1.4011551890920506").unwrap();
        let back = parse_decimal(256, &to_decimal(&x)).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn ln_abs_handles_huge_exponents() {
        let x = pow2(64, 5000);
        assert!((ln_abs_f64(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn policy_rejects_inverted_bounds() {
        let p = PrecisionPolicy {
            start_bits: 512,
            max_bits: 256,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
