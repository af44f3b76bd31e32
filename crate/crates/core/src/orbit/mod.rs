//! Extended-precision real orbits: iteration, chain-rule derivatives,
//! closest precritical points and Hofbauer-tower intervals.

mod hofbauer;
mod ladder;

pub use hofbauer::{d_interval, detect_periodic_interval, DInterval, PeriodicIntervalVerdict};
pub use ladder::{closest_precritical, LadderEntry, LadderOptions, Placement, PrecriticalLadder};

use rug::Float;
use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::map::UnicriticalMap;
use crate::precision;

/// `f^n(x)`. Leaving the escape disk is reported as [`KneadError::Escaped`]
/// carrying the first step with `|f^j(x)| > R`.
pub fn iterate(map: &UnicriticalMap, x: &Float, n: u64) -> Result<Float> {
    let radius = map.escape_radius();
    let mut y = Float::with_val(map.bits(), x);
    for j in 1..=n {
        map.step(&mut y);
        if y.cmp_abs(&radius) == Some(std::cmp::Ordering::Greater) {
            return Err(KneadError::Escaped { step: j });
        }
    }
    Ok(y)
}

/// `Df^n(x)` split into a sign and a natural log of its magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivative {
    pub negative: bool,
    pub log_abs: f64,
    /// The signed product itself (MPFR's exponent range absorbs its size).
    pub value: Float,
}

impl LogDerivative {
    pub fn abs(&self) -> Float {
        self.value.clone().abs()
    }
}

/// Chain rule `Df^n(x) = Π ℓ (f^j(x))^{ℓ-1}`, accumulated as a product and
/// reported in log space with a separate sign.
pub fn derivative_along(map: &UnicriticalMap, x: &Float, n: u64) -> Result<LogDerivative> {
    let (_, d) = iterate_with_derivative(map, x, n)?;
    Ok(LogDerivative {
        negative: d.is_sign_negative(),
        log_abs: precision::ln_abs_f64(&d),
        value: d,
    })
}

/// `(f^n(x), Df^n(x))` in one pass.
pub fn iterate_with_derivative(map: &UnicriticalMap, x: &Float, n: u64) -> Result<(Float, Float)> {
    let bits = map.bits();
    let mut y = Float::with_val(bits, x);
    let mut d = Float::with_val(bits, 1);
    for j in 0..n {
        if y.is_zero() {
            return Err(KneadError::CriticalPointOnOrbit { step: j });
        }
        d *= map.derivative(&y);
        map.step(&mut y);
    }
    Ok((y, d))
}

/// `f^n(0)` for `0 <= n <= N`.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    map: UnicriticalMap,
    values: Vec<Float>,
}

impl OrbitTable {
    pub fn map(&self) -> &UnicriticalMap {
        &self.map
    }

    /// Largest iterate stored.
    pub fn len(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() <= 1
    }

    pub fn get(&self, n: u64) -> Option<&Float> {
        self.values.get(n as usize)
    }

    pub fn at(&self, n: u64) -> Result<&Float> {
        self.get(n).ok_or(KneadError::OutOfRange {
            index: n,
            limit: self.len(),
        })
    }

    /// Signs `e_n` (0 = negative) for `1 <= n <= N`; zero values are `None`.
    pub fn signs(&self) -> Vec<Option<u8>> {
        self.values[1..]
            .iter()
            .map(|v| {
                if v.is_zero() {
                    None
                } else {
                    Some(u8::from(v.is_sign_positive()))
                }
            })
            .collect()
    }

    /// Rows `(n, f^n(0))` for `1 <= n <= N`.
    pub fn rows(&self) -> impl Iterator<Item = (u64, &Float)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, v)| (n as u64, v))
    }
}

/// Critical orbit table. The critical orbit of a parameter in the bounded
/// window never escapes, so escape is an error here.
pub fn critical_orbit(map: &UnicriticalMap, n: u64) -> Result<OrbitTable> {
    let radius = map.escape_radius();
    let mut values = Vec::with_capacity(n as usize + 1);
    let mut y = map.zero();
    values.push(y.clone());
    for j in 1..=n {
        map.step(&mut y);
        if y.cmp_abs(&radius) == Some(std::cmp::Ordering::Greater) {
            return Err(KneadError::Escaped { step: j });
        }
        values.push(y.clone());
    }
    Ok(OrbitTable {
        map: map.clone(),
        values,
    })
}

/// `f^n(0)` at each requested `n` (any order) without storing the whole orbit.
pub fn orbit_points(map: &UnicriticalMap, indices: &[u64]) -> Result<Vec<Float>> {
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by_key(|&i| indices[i]);
    let radius = map.escape_radius();
    let mut out = vec![map.zero(); indices.len()];
    let mut y = map.zero();
    let mut at = 0u64;
    for i in order {
        let target = indices[i];
        while at < target {
            map.step(&mut y);
            at += 1;
            if y.cmp_abs(&radius) == Some(std::cmp::Ordering::Greater) {
                return Err(KneadError::Escaped { step: at });
            }
        }
        out[i] = y.clone();
    }
    Ok(out)
}

/// Serializable view of a signed log-derivative.
#[derive(Debug, Clone, Serialize)]
pub struct LogDerivativeRow {
    pub negative: bool,
    pub log_abs: f64,
}

impl From<&LogDerivative> for LogDerivativeRow {
    fn from(d: &LogDerivative) -> Self {
        LogDerivativeRow {
            negative: d.negative,
            log_abs: d.log_abs,
        }
    }
}
