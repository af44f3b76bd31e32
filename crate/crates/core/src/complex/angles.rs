use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::map::validate_ell;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WakeAngles {
    pub ell: u32,
    pub alpha: f64,
    /// `α_k = α + 2πk/ℓ`, reduced to `[0, 2π)`.
    pub alphas: Vec<f64>,
    /// `α̃_k = -α + 2πk/ℓ`, reduced to `[0, 2π)`.
    pub alpha_tildes: Vec<f64>,
    /// `{(2k+1)π/ℓ}`.
    pub t_ell: Vec<f64>,
}

pub fn wake_angles(ell: u32, alpha: f64) -> Result<WakeAngles> {
    validate_ell(ell)?;
    if !alpha.is_finite() {
        return Err(KneadError::InvalidInput(format!(
            "angle must be finite, got {alpha}"
        )));
    }
    let step = 2.0 * PI / ell as f64;
    let wrap = |x: f64| x.rem_euclid(2.0 * PI);
    Ok(WakeAngles {
        ell,
        alpha,
        alphas: (0..ell).map(|k| wrap(alpha + step * k as f64)).collect(),
        alpha_tildes: (0..ell).map(|k| wrap(-alpha + step * k as f64)).collect(),
        t_ell: (0..ell)
            .map(|k| (2 * k + 1) as f64 * PI / ell as f64)
            .collect(),
    })
}

/// An interval of angles with integer endpoints in units of `π/ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnitInterval {
    pub lo: i64,
    pub lo_closed: bool,
    pub hi: i64,
    pub hi_closed: bool,
}

impl UnitInterval {
    fn within(&self, outer: &UnitInterval) -> bool {
        let lo_ok =
            self.lo > outer.lo || (self.lo == outer.lo && (outer.lo_closed || !self.lo_closed));
        let hi_ok =
            self.hi < outer.hi || (self.hi == outer.hi && (outer.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorVerdict {
    pub ell: u32,
    pub k: u32,
    /// `α ∈ [0, π/ℓ)`: the range left after pairing a ray with its conjugate.
    pub holds: bool,
    /// The same check over the unreduced range `α ∈ [0, 2π/ℓ)`.
    pub holds_full_range: bool,
    pub alpha_k: UnitInterval,
    pub alpha_tilde_k: UnitInterval,
    pub sector: UnitInterval,
    /// `2 <= k <= (ℓ-1)/2`.
    pub in_claimed_range: bool,
}

/// Do `α_k` and `α̃_k` both land in the open sector `(2π/ℓ, (ℓ-1)π/ℓ)` for every
/// admissible `α`? Endpoints are exact multiples of `π/ℓ`, so the check is
/// integer interval arithmetic.
pub fn sector_check(ell: u32, k: u32) -> Result<SectorVerdict> {
    validate_ell(ell)?;
    if k >= ell {
        return Err(KneadError::InvalidInput(format!(
            "k must be below ℓ = {ell}, got {k}"
        )));
    }
    let (e, k2) = (ell as i64, 2 * k as i64);
    let sector = UnitInterval {
        lo: 2,
        lo_closed: false,
        hi: e - 1,
        hi_closed: false,
    };
    let ranges = |width: i64| {
        let a = UnitInterval {
            lo: k2,
            lo_closed: true,
            hi: k2 + width,
            hi_closed: false,
        };
        let t = UnitInterval {
            lo: k2 - width,
            lo_closed: false,
            hi: k2,
            hi_closed: true,
        };
        (a, t)
    };
    let (alpha_k, alpha_tilde_k) = ranges(1);
    let (full_a, full_t) = ranges(2);
    Ok(SectorVerdict {
        ell,
        k,
        holds: alpha_k.within(&sector) && alpha_tilde_k.within(&sector),
        holds_full_range: full_a.within(&sector) && full_t.within(&sector),
        alpha_k,
        alpha_tilde_k,
        sector,
        in_claimed_range: 2 <= k && k <= (ell - 1) / 2,
    })
}
