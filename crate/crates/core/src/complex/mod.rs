//! Complex dynamics of `z^ℓ + c`: preimage trees, truncated Poincaré series,
//! the Green function, the Koebe bound and wake-angle arithmetic.

mod angles;
mod green;
mod preimage;

pub use angles::{sector_check, wake_angles, SectorVerdict, UnitInterval, WakeAngles};
pub use green::{green, GreenValue};
pub use preimage::{
    poincare_partial, preimages, Leaf, LevelRow, PoincareSummary, PreimageTree, Pruning,
};

use std::ops::{Add, Mul, Sub};

use rug::Float;

use crate::error::{KneadError, Result};

/// A complex number as a pair of MPFR reals at a common precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    pub fn from_f64(bits: u32, re: f64, im: f64) -> Self {
        Complex::new(Float::with_val(bits, re), Float::with_val(bits, im))
    }

    pub fn real(x: &Float) -> Self {
        Complex::new(x.clone(), Float::new(x.prec()))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), Float::with_val(self.prec(), -&self.im))
    }

    pub fn from_polar(r: &Float, theta: &Float) -> Self {
        let bits = r.prec();
        let (s, c) = Float::with_val(bits, theta).sin_cos(Float::new(bits));
        Complex::new(Float::with_val(bits, r * c), Float::with_val(bits, r * s))
    }

    pub fn powu(&self, n: u32) -> Self {
        let mut out = Complex::from_f64(self.prec(), 1.0, 0.0);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// The `n` roots of `self`, ordered by `j` in `(arg + 2πj) / n`.
    pub fn roots(&self, n: u32) -> Vec<Complex> {
        let bits = self.prec();
        let mut r = self.abs();
        r.root_mut(n);
        let arg = self.arg();
        let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
        (0..n)
            .map(|j| {
                let mut theta = Float::with_val(bits, &two_pi * j);
                theta += &arg;
                theta /= n;
                Complex::from_polar(&r, &theta)
            })
            .collect()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// `re` or `re±imi` (`i` suffix) at the given number of digits.
    pub fn parse(bits: u32, s: &str) -> Result<Self> {
        let t = s.trim().replace(' ', "");
        let bad = || KneadError::InvalidInput(format!("cannot parse complex number {s:?}"));
        if !t.ends_with('i') {
            return Ok(Complex::real(&crate::precision::parse_decimal(bits, &t)?));
        }
        let body = &t[..t.len() - 1];
        // Split at the last sign that is not part of an exponent or the leading sign.
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
        });
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re = crate::precision::parse_decimal(bits, re).map_err(|_| bad())?;
        let im =
            crate::precision::parse_decimal(bits, im.trim_start_matches('+')).map_err(|_| bad())?;
        Ok(Complex::new(re, im))
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        let bits = self.prec();
        Complex::new(
            Float::with_val(bits, &self.re + &o.re),
            Float::with_val(bits, &self.im + &o.im),
        )
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        let bits = self.prec();
        Complex::new(
            Float::with_val(bits, &self.re - &o.re),
            Float::with_val(bits, &self.im - &o.im),
        )
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        let bits = self.prec();
        let re = Float::with_val(bits, &self.re * &o.re) - Float::with_val(bits, &self.im * &o.im);
        let im = Float::with_val(bits, &self.re * &o.im) + Float::with_val(bits, &self.im * &o.re);
        Complex::new(re, im)
    }
}

/// `(1 + r)^4 / (1 - r)^4` for `0 <= r < 1`.
pub fn koebe_bound(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(KneadError::InvalidInput(format!(
            "Koebe bound needs 0 <= r < 1, got {r}"
        )));
    }
    Ok(((1.0 + r) / (1.0 - r)).powi(4))
}
