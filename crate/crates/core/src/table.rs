//! Plain tabular output shared by the orbit, solver and diagnostic reports.

use serde::Serialize;

/// A named verdict with a human-readable witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub verdict: bool,
    pub witness: String,
    /// Reports which way a quantity goes rather than whether a property
    /// holds; `false` is an answer, not a failure.
    pub descriptive: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, verdict: bool, witness: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            verdict,
            witness: witness.into(),
            descriptive: false,
        }
    }

    pub fn descriptive(name: impl Into<String>, verdict: bool, witness: impl Into<String>) -> Self {
        Verdict {
            descriptive: true,
            ..Verdict::new(name, verdict, witness)
        }
    }

    /// A property check that came out negative.
    pub fn failed(&self) -> bool {
        !self.verdict && !self.descriptive
    }
}

/// Header plus string rows; rendering (CSV/JSON) is left to the caller.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Shortest round-trip form of an `f64` (`NaN`/`inf` spelled out).
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}").replace("e0", "")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(0.25e-10), "2.5e-11");
        assert_eq!(num(f64::INFINITY), "inf");
    }
}
