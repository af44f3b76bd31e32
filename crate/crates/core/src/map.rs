use rug::ops::PowAssign;
use rug::Float;
use serde::{Serialize, Serializer};

use crate::error::{KneadError, Result};
use crate::precision::{self, MAX_BITS, MIN_BITS};

/// `f(x) = x^ℓ + c` for even `ℓ >= 2` and real `c < 0`, at a fixed mantissa width.
#[derive(Debug, Clone, PartialEq)]
pub struct UnicriticalMap {
    ell: u32,
    c: Float,
}

impl UnicriticalMap {
    pub fn new(ell: u32, c: Float) -> Result<Self> {
        validate_ell(ell)?;
        if !c.is_finite() {
            return Err(KneadError::InvalidInput("parameter must be finite".into()));
        }
        if c.prec() < MIN_BITS || c.prec() > MAX_BITS {
            return Err(KneadError::InvalidInput(format!(
                "precision {} outside [{MIN_BITS}, {MAX_BITS}]",
                c.prec()
            )));
        }
        Ok(UnicriticalMap { ell, c })
    }

    pub fn from_f64(ell: u32, c: f64, bits: u32) -> Result<Self> {
        Self::new(ell, Float::with_val(bits, c))
    }

    pub fn from_decimal(ell: u32, c: &str, bits: u32) -> Result<Self> {
        Self::new(ell, precision::parse_decimal(bits, c)?)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn c(&self) -> &Float {
        &self.c
    }

    pub fn bits(&self) -> u32 {
        self.c.prec()
    }

    /// Same parameter value at another precision (exact when widening).
    pub fn with_bits(&self, bits: u32) -> Self {
        UnicriticalMap {
            ell: self.ell,
            c: Float::with_val(bits, &self.c),
        }
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits())
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    /// In-place `x <- x^ℓ + c`.
    #[inline]
    pub fn step(&self, x: &mut Float) {
        if self.ell == 2 {
            x.square_mut();
        } else {
            x.pow_assign(self.ell);
        }
        *x += &self.c;
    }

    pub fn apply(&self, x: &Float) -> Float {
        let mut y = Float::with_val(self.bits(), x);
        self.step(&mut y);
        y
    }

    /// `Df(x) = ℓ x^{ℓ-1}`.
    pub fn derivative(&self, x: &Float) -> Float {
        let mut d = Float::with_val(self.bits(), x);
        if self.ell > 2 {
            d.pow_assign(self.ell - 1);
        }
        d *= self.ell;
        d
    }

    /// `max(2, |c| + 2)`: beyond this radius every orbit diverges.
    pub fn escape_radius(&self) -> Float {
        let mut r = Float::with_val(self.bits(), self.c.abs_ref());
        r += 2;
        if r < 2 {
            r = Float::with_val(self.bits(), 2);
        }
        r
    }
}

impl Serialize for UnicriticalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("UnicriticalMap", 3)?;
        st.serialize_field("ell", &self.ell)?;
        st.serialize_field("c", &precision::to_decimal(&self.c))?;
        st.serialize_field("precision_bits", &self.bits())?;
        st.end()
    }
}

pub fn validate_ell(ell: u32) -> Result<()> {
    if ell < 2 || !ell.is_multiple_of(2) {
        return Err(KneadError::InvalidInput(format!(
            "critical order must be even and >= 2, got {ell}"
        )));
    }
    Ok(())
}
