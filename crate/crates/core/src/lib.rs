//! Kneading maps, closest precritical points and high-precision realization of
//! real unicritical maps `x^ℓ + c`.

pub mod complex;
pub mod diagnostics;
pub mod error;
pub mod kneading;
pub mod map;
pub mod orbit;
pub mod precision;
pub mod solver;
pub mod table;

pub use error::{KneadError, Result};
pub use kneading::{cutting_times, CuttingTimes, KneadingMap, KneadingRule};
pub use map::UnicriticalMap;
pub use precision::PrecisionPolicy;
pub use solver::{solve_parameter, SolveResult};
