//! Realizing a kneading map as a real parameter by bisection on itineraries.

mod bisect;
mod itinerary;

pub use bisect::{solve_parameter, SolveResult};
pub use itinerary::{
    parity_lex_compare, parity_lex_compare_partial, sign_itinerary, sign_itinerary_adaptive,
    Itinerary, ItineraryRow, LexComparison, LexOrder,
};

use rug::Float;

use crate::error::{KneadError, Result};
use crate::map::{validate_ell, UnicriticalMap};

/// `g(c) = f^3(0) - f^2(0) = c^ℓ [(c^{ℓ-1} + 1)^ℓ - 1]`.
fn g(ell: u32, c: &Float) -> Result<Float> {
    let m = UnicriticalMap::new(ell, c.clone())?;
    let f2 = m.apply(&m.apply(&m.zero()));
    let f3 = m.apply(&f2);
    Ok(Float::with_val(c.prec(), &f3 - &f2))
}

/// Left end of the real family: the parameter where `f^2(0)` is fixed, found by
/// bisection of `g` on `[-3, -1/2]` (g > 0 on the left, g < 0 on the right).
pub fn c_min(ell: u32, bits: u32) -> Result<Float> {
    validate_ell(ell)?;
    let mut lo = Float::with_val(bits, -3);
    let mut hi = Float::with_val(bits, -0.5);
    let (glo, ghi) = (g(ell, &lo)?, g(ell, &hi)?);
    if !(glo.is_sign_positive() && ghi.is_sign_negative()) {
        return Err(KneadError::NoBracket(format!(
            "g(c) on [-3, -1/2] for ell = {ell}"
        )));
    }
    for _ in 0..bits + 4 {
        let mut mid = Float::with_val(bits, &lo + &hi);
        mid /= 2;
        if mid == lo || mid == hi {
            break;
        }
        let gm = g(ell, &mid)?;
        if gm.is_zero() {
            return Ok(mid);
        }
        if gm.is_sign_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_endpoint_is_minus_two() {
        assert_eq!(c_min(2, 128).unwrap(), -2.0);
    }

    #[test]
    fn closed_form_for_higher_orders() {
        for ell in [4u32, 6, 8] {
            let c = c_min(ell, 256).unwrap();
            let mut exact = Float::with_val(256, 2);
            exact.root_mut(ell - 1);
            let err = Float::with_val(256, &c + &exact).abs();
            assert!(err < 1e-70, "ell={ell} err={err}");
            let residual = g(ell, &c).unwrap().abs();
            assert!(residual < crate::precision::sign_threshold(256));
        }
        assert!((c_min(4, 128).unwrap().to_f64() + 1.2599210498948732).abs() < 1e-15);
    }

    #[test]
    fn odd_order_rejected() {
        assert!(c_min(3, 128).is_err());
    }
}
