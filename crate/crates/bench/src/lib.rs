//! Fixtures shared by the criterion benches.

use kneadlab_core::{solve_parameter, KneadingMap, PrecisionPolicy, UnicriticalMap};

/// The Fibonacci map for `ℓ = 2`, solved to depth 14.
pub fn fibonacci_map(bits: u32) -> UnicriticalMap {
    let policy = PrecisionPolicy {
        start_bits: bits,
        ..PrecisionPolicy::with_target(48)
    };
    solve_parameter(2, &KneadingMap::fibonacci(), 14, &policy)
        .and_then(|r| r.map(bits))
        .expect("Fibonacci parameter")
}
