use std::cmp::Ordering;

use rug::Float;
use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::kneading::{KneadingSequence, SymbolGenerator};
use crate::map::UnicriticalMap;
use crate::precision::{sign_threshold, PrecisionPolicy};

/// Signs of `f^j(0)` with their confidence margins `|f^j(0)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Itinerary {
    pub bits: u32,
    /// `None` where the margin is at or below the sign threshold.
    pub symbols: Vec<Option<u8>>,
    pub margins: Vec<Float>,
    /// First step that left the escape disk; later symbols are all `1`.
    pub escaped_at: Option<u64>,
}

impl Itinerary {
    pub fn first_undecided(&self) -> Option<usize> {
        self.symbols.iter().position(Option::is_none).map(|i| i + 1)
    }

    pub fn to_sequence(&self) -> Result<KneadingSequence> {
        if let Some(index) = self.first_undecided() {
            return Err(KneadError::UndecidedSymbol { index });
        }
        Ok(KneadingSequence {
            symbols: self.symbols.iter().map(|s| s.unwrap_or(0)).collect(),
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = ItineraryRow> + '_ {
        self.symbols
            .iter()
            .zip(&self.margins)
            .enumerate()
            .map(|(i, (s, m))| ItineraryRow {
                n: i as u64 + 1,
                symbol: *s,
                margin: m.to_f64(),
            })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ItineraryRow {
    pub n: u64,
    pub symbol: Option<u8>,
    pub margin: f64,
}

/// Sign itinerary at the map's own precision. Undecided symbols are marked,
/// never guessed.
pub fn sign_itinerary(map: &UnicriticalMap, n: usize) -> Itinerary {
    let bits = map.bits();
    let threshold = sign_threshold(bits);
    let radius = map.escape_radius();
    let mut y = map.zero();
    let mut symbols = Vec::with_capacity(n);
    let mut margins = Vec::with_capacity(n);
    let mut escaped_at = None;
    for j in 1..=n {
        if escaped_at.is_none() {
            map.step(&mut y);
            if y.cmp_abs(&radius) == Some(Ordering::Greater) || !y.is_finite() {
                escaped_at = Some(j as u64);
            }
        }
        if escaped_at.is_some() {
            symbols.push(Some(1));
            margins.push(Float::with_val(bits, &radius));
            continue;
        }
        let decided = y.cmp_abs(&threshold) == Some(Ordering::Greater);
        symbols.push(decided.then(|| u8::from(y.is_sign_positive())));
        margins.push(Float::with_val(bits, y.abs_ref()));
    }
    Itinerary {
        bits,
        symbols,
        margins,
        escaped_at,
    }
}

/// Doubles the precision (the parameter itself is widened exactly) until every
/// symbol is decided or the policy cap is reached.
pub fn sign_itinerary_adaptive(
    map: &UnicriticalMap,
    n: usize,
    policy: &PrecisionPolicy,
) -> Result<Itinerary> {
    let mut bits = map.bits().max(policy.start_bits);
    loop {
        let it = sign_itinerary(&map.with_bits(bits), n);
        match it.first_undecided() {
            None => return Ok(it),
            Some(index) if bits >= policy.max_bits => {
                return Err(KneadError::PrecisionExhausted {
                    bits,
                    context: format!("symbol {index} of the itinerary stays undecided"),
                })
            }
            Some(_) => bits = (bits * 2).min(policy.max_bits),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexOrder {
    Less,
    EqualThroughPrefix,
    Greater,
}

/// Order plus the 1-based index of the first difference (or the compared
/// length when equal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LexComparison {
    pub order: LexOrder,
    pub index: u64,
}

#[inline]
fn twisted(a: u8, b: u8, zeros: u64) -> LexOrder {
    let less = (a < b) ^ (zeros % 2 == 1);
    if less {
        LexOrder::Less
    } else {
        LexOrder::Greater
    }
}

/// Parity-lexicographic order: at the first difference the symbol order is
/// reversed iff an odd number of `0`s precede it.
pub fn parity_lex_compare(a: &KneadingSequence, b: &KneadingSequence) -> LexComparison {
    let mut zeros = 0;
    for (i, (&x, &y)) in a.symbols.iter().zip(&b.symbols).enumerate() {
        if x != y {
            return LexComparison {
                order: twisted(x, y, zeros),
                index: i as u64 + 1,
            };
        }
        zeros += u64::from(x == 0);
    }
    LexComparison {
        order: LexOrder::EqualThroughPrefix,
        index: a.len().min(b.len()) as u64,
    }
}

/// Same order on partially decided itineraries; an undecided symbol before the
/// first difference is an error.
pub fn parity_lex_compare_partial(a: &[Option<u8>], b: &[Option<u8>]) -> Result<LexComparison> {
    let mut zeros = 0;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let (Some(x), Some(y)) = (x, y) else {
            return Err(KneadError::UndecidedSymbol { index: i + 1 });
        };
        if x != y {
            return Ok(LexComparison {
                order: twisted(*x, *y, zeros),
                index: i as u64 + 1,
            });
        }
        zeros += u64::from(*x == 0);
    }
    Ok(LexComparison {
        order: LexOrder::EqualThroughPrefix,
        index: a.len().min(b.len()) as u64,
    })
}

pub(crate) enum Streamed {
    Done(LexComparison),
    Undecided(u64),
}

/// Streams the critical itinerary of `map` against the target produced by
/// `target`, stopping at the first difference. Nothing is stored.
pub(crate) fn compare_with_target(
    map: &UnicriticalMap,
    target: &mut SymbolGenerator,
    max_len: u64,
) -> Result<Streamed> {
    let threshold = sign_threshold(map.bits());
    let radius = map.escape_radius();
    let mut y = map.zero();
    let mut escaped = false;
    let mut zeros = 0u64;
    for n in 1..=max_len {
        let s = if escaped {
            1
        } else {
            map.step(&mut y);
            if y.cmp_abs(&radius) == Some(Ordering::Greater) || !y.is_finite() {
                escaped = true;
                1
            } else if y.cmp_abs(&threshold) == Some(Ordering::Greater) {
                u8::from(y.is_sign_positive())
            } else {
                return Ok(Streamed::Undecided(n));
            }
        };
        let t = target.symbol(n as usize)?;
        if s != t {
            return Ok(Streamed::Done(LexComparison {
                order: twisted(s, t, zeros),
                index: n,
            }));
        }
        zeros += u64::from(s == 0);
    }
    Ok(Streamed::Done(LexComparison {
        order: LexOrder::EqualThroughPrefix,
        index: max_len,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> KneadingSequence {
        KneadingSequence {
            symbols: s.bytes().map(|b| b - b'0').collect(),
        }
    }

    #[test]
    fn chebyshev_itinerary() {
        let m = UnicriticalMap::from_f64(2, -2.0, 128).unwrap();
        let it = sign_itinerary(&m, 4);
        assert_eq!(it.symbols, vec![Some(0), Some(1), Some(1), Some(1)]);
        assert!(it.margins.iter().all(|v| *v == 2.0));
    }

    #[test]
    fn superstable_symbols_are_undecided() {
        let m = UnicriticalMap::from_f64(2, -1.0, 128).unwrap();
        let it = sign_itinerary(&m, 4);
        assert_eq!(it.symbols, vec![Some(0), None, Some(0), None]);
        assert_eq!(it.first_undecided(), Some(2));
        assert!(it.to_sequence().is_err());
        let policy = PrecisionPolicy::default();
        assert!(matches!(
            sign_itinerary_adaptive(&m, 4, &policy),
            Err(KneadError::PrecisionExhausted { bits: 4096, .. })
        ));
    }

    #[test]
    fn near_period_three_needs_more_bits() {
        // 20-digit rounding of the real root of c^3 + 2c^2 + c + 1.
        let c = "-1.7548776662466927600";
        let low = sign_itinerary(&UnicriticalMap::from_decimal(2, c, 64).unwrap(), 3);
        assert_eq!(low.symbols[2], None);
        let high = sign_itinerary(&UnicriticalMap::from_decimal(2, c, 256).unwrap(), 3);
        assert!(high.symbols.iter().all(Option::is_some));
        let policy = PrecisionPolicy {
            start_bits: 64,
            ..Default::default()
        };
        let adaptive =
            sign_itinerary_adaptive(&UnicriticalMap::from_decimal(2, c, 64).unwrap(), 3, &policy)
                .unwrap();
        assert!(adaptive.bits > 64);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(
            parity_lex_compare(&seq("011"), &seq("010")).order,
            LexOrder::Less
        );
        assert_eq!(
            parity_lex_compare(&seq("0110"), &seq("0110")).order,
            LexOrder::EqualThroughPrefix
        );
        let c = parity_lex_compare(&seq("0"), &seq("1"));
        assert_eq!((c.order, c.index), (LexOrder::Less, 1));
        assert_eq!(
            parity_lex_compare(&seq("1"), &seq("0")).order,
            LexOrder::Greater
        );
        // Two zeros before the difference: no flip.
        assert_eq!(
            parity_lex_compare(&seq("0010"), &seq("0011")).order,
            LexOrder::Less
        );
    }

    #[test]
    fn partial_compare_rejects_early_undecided() {
        let a = [Some(0), None, Some(1)];
        let b = [Some(0), Some(1), Some(0)];
        assert_eq!(
            parity_lex_compare_partial(&a, &b),
            Err(KneadError::UndecidedSymbol { index: 2 })
        );
        let a = [Some(1), None];
        let b = [Some(0), Some(1)];
        assert_eq!(
            parity_lex_compare_partial(&a, &b).unwrap().order,
            LexOrder::Greater
        );
    }

    #[test]
    fn escape_reads_as_ones() {
        let m = UnicriticalMap::from_f64(2, -2.1, 128).unwrap();
        let it = sign_itinerary(&m, 20);
        assert!(it.escaped_at.is_some());
        assert_eq!(
            it.to_sequence().unwrap().to_string(),
            "01111111111111111111"
        );
    }
}
