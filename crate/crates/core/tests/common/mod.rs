//! Independent oracles. None of them touch the solver, the ladder or the
//! preimage tree; they only use `rug` arithmetic and closed forms.
#![allow(dead_code)]

use rand::Rng;
use rug::Float;

/// Superstable parameter of period `2^k` for `x^2 + c`, by Newton on
/// `F(c) = f_c^{2^k}(0)` with `F' ` from `x' <- 2 x x' + 1`.
pub fn superstable(k: u32, guess: &Float, bits: u32) -> Float {
    let period = 1u64 << k;
    let mut c = Float::with_val(bits, guess);
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 16));
    for _ in 0..200 {
        let mut x = Float::new(bits);
        let mut dx = Float::new(bits);
        for _ in 0..period {
            dx = Float::with_val(bits, &x * &dx) * 2u32 + 1u32;
            x.square_mut();
            x += &c;
        }
        let step = Float::with_val(bits, &x / &dx);
        c -= &step;
        if step.abs() < tol {
            break;
        }
    }
    c
}

/// `c_0 .. c_{k_max}` of the period-doubling cascade.
pub fn cascade(k_max: u32, bits: u32) -> Vec<Float> {
    let mut cs = vec![Float::with_val(bits, 0), Float::with_val(bits, -1)];
    for k in 2..=k_max {
        let n = cs.len();
        let (a, b) = (&cs[n - 2], &cs[n - 1]);
        // Geometric extrapolation with the last observed ratio (4.669 at first).
        let ratio = if n >= 3 {
            Float::with_val(bits, &cs[n - 3] - a) / Float::with_val(bits, a - b)
        } else {
            Float::with_val(bits, 4.669)
        };
        let guess = Float::with_val(bits, b - a) / ratio + b;
        cs.push(superstable(k, &guess, bits));
    }
    cs
}

fn aitken(xs: &[Float]) -> Vec<Float> {
    let bits = xs[0].prec();
    xs.windows(3)
        .map(|w| {
            let d1 = Float::with_val(bits, &w[2] - &w[1]);
            let twice = Float::with_val(bits, &w[1] * 2u32);
            let d2 = Float::with_val(bits, &w[2] - &twice) + &w[0];
            Float::with_val(bits, &w[2] - Float::with_val(bits, &d1 * &d1) / d2)
        })
        .collect()
}

/// The Feigenbaum parameter from the superstable cascade `k <= k_max`,
/// accelerated by iterated Aitken Δ² (`levels` times).
pub fn feigenbaum_point(k_max: u32, levels: usize, bits: u32) -> Float {
    let mut xs = cascade(k_max, bits);
    for _ in 0..levels {
        if xs.len() < 3 {
            break;
        }
        xs = aitken(&xs);
    }
    xs.pop().unwrap()
}

/// `-√(2 - √(2 + √(2 + ...)))` with `k` nested roots after the first: the
/// closest precritical points of the Chebyshev map `x^2 - 2`.
pub fn chebyshev_zeta(k: usize, bits: u32) -> Float {
    let two = Float::with_val(bits, 2);
    if k == 0 {
        return -two.sqrt();
    }
    let mut inner = Float::with_val(bits, 2).sqrt();
    for _ in 1..k {
        inner = (Float::with_val(bits, 2) + inner).sqrt();
    }
    -(two - inner).sqrt()
}

/// Level-`n` Poincaré sum of the Chebyshev map at `z = 2 cos φ`:
/// preimages are `2 cos θ_j`, `θ_j = (φ + 2πj)/2^n`, and
/// `|Df^n| = 2^n |sin φ| / |sin θ_j|`.
pub fn chebyshev_level_sum(phi: f64, n: u32, delta: f64) -> f64 {
    let m = 1u64 << n;
    let denom = m as f64 * phi.sin().abs();
    (0..m)
        .map(|j| {
            let theta = (phi + 2.0 * std::f64::consts::PI * j as f64) / m as f64;
            (theta.sin().abs() / denom).powf(delta)
        })
        .sum()
}

/// A random explicit table with `Q(k) < k` and `Q` non-decreasing. Such maps
/// are admissible: `Q²(k) + 1 <= k`, so `Q(Q²(k) + j) <= Q(k + j)` termwise.
pub fn random_monotone_table<R: Rng>(rng: &mut R, len: usize) -> Vec<usize> {
    let mut table = Vec::with_capacity(len);
    let mut q = 0usize;
    for k in 1..=len {
        q = (q + rng.gen_range(0..=2)).min(k - 1);
        table.push(q);
    }
    table
}
