mod common;

use common::*;
use rug::Float;

#[test]
fn cascade_ratios_approach_delta() {
    let cs = cascade(10, 256);
    let n = cs.len();
    let r = Float::with_val(256, &cs[n - 3] - &cs[n - 2])
        / Float::with_val(256, &cs[n - 2] - &cs[n - 1]);
    assert!((r.to_f64() - 4.669_201_609).abs() < 1e-4, "{r}");
}

#[test]
fn superstable_period_two_and_four() {
    // Period 2 is exact; period 4 against a value cross-checked with mpmath.
    let c1 = superstable(1, &Float::with_val(128, -0.9), 128);
    assert_eq!(c1, -1.0);
    let c2 = superstable(2, &Float::with_val(128, -1.3), 128);
    assert!((c2.to_f64() + 1.310_702_641_336_833).abs() < 1e-15);
}

#[test]
fn extrapolated_point_matches_literature_value() {
    let c = feigenbaum_point(14, 3, 512);
    let known = Float::with_val(512, Float::parse("-1.401155189092050600756").unwrap());
    let err = Float::with_val(512, &c - &known).abs().to_f64();
    assert!(err < 1e-18, "error {err:e}");
}

#[test]
fn nested_radicals() {
    let bits = 256;
    assert_eq!(chebyshev_zeta(0, bits), -Float::with_val(bits, 2).sqrt());
    let z1 = chebyshev_zeta(1, bits).to_f64();
    assert!((z1 + (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-15);
    // f^{k+1}(ζ_k) = 0 under x^2 - 2.
    for k in 0..8 {
        let mut x = chebyshev_zeta(k, bits);
        for _ in 0..=k {
            x.square_mut();
            x -= 2u32;
        }
        assert!(x.abs() < 1e-60, "k={k}");
    }
}

#[test]
fn chebyshev_oracle_level_one() {
    // z = 1: preimages ±√3, |Df| = 2√3.
    let phi = std::f64::consts::FRAC_PI_3;
    assert!((chebyshev_level_sum(phi, 1, 1.0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!((chebyshev_level_sum(phi, 0, 2.0) - 1.0).abs() < 1e-15);
}
