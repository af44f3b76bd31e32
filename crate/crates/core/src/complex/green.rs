use serde::Serialize;

use super::Complex;
use crate::error::{KneadError, Result};
use crate::map::UnicriticalMap;
use crate::precision;

const MAX_ITER: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenValue {
    pub value: f64,
    /// Orbit never exceeded the escape radius within the iteration cap; `value`
    /// is then reported as 0.
    pub bounded: bool,
    pub iterations: u64,
    /// Bound on the discarded tail of the telescoping series.
    pub error_bound: f64,
}

/// `G(z) = lim ℓ^{-n} ln|f^n(z)|`. Once `|f^n(z)| = R_n` with `|c| < R_n^ℓ`,
/// every later correction `ln|1 + c/w^ℓ|` is at most `-ln(1 - |c|/R_n^ℓ)`, so
/// the tail is below `ε_n / (ℓ^{n+1} (1 - 1/ℓ))`; iteration stops when that
/// falls under `tol`.
pub fn green(map: &UnicriticalMap, z: &Complex, tol: f64) -> Result<GreenValue> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(KneadError::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let ell = map.ell();
    let ellf = ell as f64;
    let c = Complex::real(map.c());
    let c_abs = map.c().to_f64().abs();
    let radius = map.escape_radius();
    let mut w = Complex::new(
        rug::Float::with_val(map.bits(), &z.re),
        rug::Float::with_val(map.bits(), &z.im),
    );
    // ln ℓ^{-n} kept in log form so large n never underflows.
    for n in 0..MAX_ITER {
        let r = w.abs();
        if r > radius {
            let ln_r = precision::ln_abs_f64(&r);
            // -ln(1 - |c| / R^ℓ), evaluated in log space.
            let ratio_ln = c_abs.ln() - ellf * ln_r;
            let eps = if c_abs == 0.0 {
                0.0
            } else {
                -(-ratio_ln.exp()).ln_1p()
            };
            let scale = -(n as f64 + 1.0) * ellf.ln();
            let bound = eps * scale.exp() / (1.0 - 1.0 / ellf);
            if bound < tol {
                return Ok(GreenValue {
                    value: ln_r * (-(n as f64) * ellf.ln()).exp(),
                    bounded: false,
                    iterations: n,
                    error_bound: bound,
                });
            }
        }
        w = &w.powu(ell) + &c;
    }
    Ok(GreenValue {
        value: 0.0,
        bounded: true,
        iterations: MAX_ITER,
        error_bound: 0.0,
    })
}
