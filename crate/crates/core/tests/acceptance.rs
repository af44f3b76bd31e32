//! One line per acceptance criterion. Runs as a plain binary
//! (`cargo test --test acceptance`), exits non-zero if any line fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use kneadlab_core::complex::{poincare_partial, Complex};
use kneadlab_core::diagnostics::{
    closest_return_law, derivative_band_window, divergence_from_values, l_bound, scaling_ratios,
    verify_monotone_neighborhood, verify_no2cpp, NeighborhoodStatus,
};
use kneadlab_core::kneading::check_strict_hofbauer;
use kneadlab_core::orbit::{
    closest_precritical, critical_orbit, derivative_along, iterate, LadderOptions,
};
use kneadlab_core::precision::pow2;
use kneadlab_core::{cutting_times, solve_parameter, KneadingMap, PrecisionPolicy, UnicriticalMap};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

type Outcome = Result<String, String>;

struct Line {
    id: u32,
    name: &'static str,
    outcome: Outcome,
    elapsed: Duration,
    budget: Duration,
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn policy(bits: u32, target: u32) -> PrecisionPolicy {
    PrecisionPolicy {
        start_bits: bits,
        max_bits: bits.max(target + 64),
        ..PrecisionPolicy::with_target(target)
    }
}

fn solved(
    ell: u32,
    q: &KneadingMap,
    depth: usize,
    target: u32,
    bits: u32,
) -> Result<UnicriticalMap, String> {
    solve_parameter(ell, q, depth, &policy(bits, target))
        .and_then(|r| r.map(bits))
        .map_err(err)
}

fn c1_cutting_times() -> Outcome {
    let fib = cutting_times(&KneadingMap::fibonacci(), 25).map_err(err)?;
    let (mut a, mut b) = (BigUint::from(1u32), BigUint::from(2u32));
    for k in 0..=25 {
        ensure(
            fib.get(k) == Some(&a),
            format!("Fibonacci S_{k} = {:?}", fib.get(k)),
        )?;
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    let feig = cutting_times(&KneadingMap::feigenbaum(), 25).map_err(err)?;
    for k in 0..=25 {
        ensure(
            feig.get(k) == Some(&(BigUint::from(1u32) << k)),
            format!("Feigenbaum S_{k}"),
        )?;
    }
    Ok("S_0..S_25 exact for both templates".into())
}

fn c2_recursion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in 0..100 {
        let table = random_monotone_table(&mut rng, 200);
        let times = cutting_times(&KneadingMap::explicit(table.clone()), 200).map_err(err)?;
        for k in 1..=200 {
            let lhs = times.get(k).unwrap() - times.get(k - 1).unwrap();
            ensure(
                &lhs == times.get(table[k - 1]).unwrap(),
                format!("table {t}, k = {k}"),
            )?;
        }
    }
    Ok("100 tables, K = 200, exact".into())
}

fn c3_feigenbaum() -> Outcome {
    let r = solve_parameter(2, &KneadingMap::feigenbaum(), 22, &policy(512, 52)).map_err(err)?;
    let oracle = feigenbaum_point(14, 3, 512);
    let e = Float::with_val(512, r.midpoint() - &oracle).abs().to_f64();
    ensure(e < 1e-15, format!("|mid - oracle| = {e:.3e}"))?;
    Ok(format!(
        "|mid - oracle| = {e:.3e}, width {:.3e}",
        r.width().to_f64()
    ))
}

fn c4_chebyshev() -> Outcome {
    let r = solve_parameter(2, &KneadingMap::constant(0), 8, &policy(256, 100)).map_err(err)?;
    let minus_two = Float::with_val(256, -2);
    let w = r.width().to_f64();
    ensure(
        r.contains(&minus_two) && w < 1e-20,
        format!("bracket misses -2 or width {w:.3e}"),
    )?;
    let map = r.map(256).map_err(err)?;
    let times = cutting_times(&KneadingMap::constant(0), 4).map_err(err)?;
    let ladder = closest_precritical(&map, &times, 2, LadderOptions::default()).map_err(err)?;
    let mut worst = 0f64;
    for k in 0..=2 {
        let e = Float::with_val(256, ladder.zeta(k).unwrap() - chebyshev_zeta(k, 256))
            .abs()
            .to_f64();
        worst = worst.max(e);
    }
    ensure(worst < 1e-25, format!("ζ error {worst:.3e}"))?;
    Ok(format!("width {w:.3e}, max ζ error {worst:.3e}"))
}

fn law(name: &str, ell: u32, q: KneadingMap, depth: usize, bits: u32) -> Result<String, String> {
    let map = solved(ell, &q, depth + 2, 52, bits)?;
    let times = cutting_times(&q, depth + 1).map_err(err)?;
    let need = (1..=depth + 1)
        .filter_map(|j| times.q(j))
        .max()
        .unwrap_or(0);
    let ladder = closest_precritical(&map, &times, need, LadderOptions::default()).map_err(err)?;
    let report = closest_return_law(&ladder, &times, 20).map_err(err)?;
    ensure(
        report.holds(),
        format!("{name}: violations at {:?}", report.violations),
    )?;
    Ok(format!("{name} 0/20"))
}

fn c5_closest_return() -> Outcome {
    let parts = std::thread::scope(|s| {
        let a = s.spawn(|| law("fib2", 2, KneadingMap::fibonacci(), 20, 256));
        let b = s.spawn(|| law("fib4", 4, KneadingMap::fibonacci(), 20, 256));
        let c = s.spawn(|| law("feig", 2, KneadingMap::feigenbaum(), 20, 256));
        [a.join().unwrap(), b.join().unwrap(), c.join().unwrap()]
    });
    let mut out = Vec::new();
    for p in parts {
        out.push(p?);
    }
    Ok(format!("violations {}", out.join(", ")))
}

fn lambda_hat(ell: u32) -> Result<(f64, f64), String> {
    let q = KneadingMap::fibonacci();
    let map = solved(ell, &q, 26, 64, 256)?;
    let times = cutting_times(&q, 22).map_err(err)?;
    let s = scaling_ratios(&map, &times, 20).map_err(err)?;
    Ok((s.lambda_hat, s.cauchy_width))
}

fn c6_scaling() -> Outcome {
    let rows: Vec<_> = std::thread::scope(|s| {
        let hs: Vec<_> = [4u32, 6, 8]
            .map(|ell| s.spawn(move || lambda_hat(ell)))
            .into();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let text: Vec<String> = rows
        .iter()
        .map(|(l, w)| format!("{l:.5}±{w:.1e}"))
        .collect();
    let ok = rows.windows(2).all(|w| w[0].0 < w[1].0)
        && rows.iter().all(|&(l, w)| l > 0.0 && l < 1.0 && w < 1e-3);
    ensure(ok, format!("lambda_hat(4, 6, 8) = {}", text.join(", ")))?;
    Ok(format!("lambda_hat(4, 6, 8) = {}", text.join(", ")))
}

fn c7_band() -> Outcome {
    let q = KneadingMap::fibonacci();
    let map = solved(6, &q, 24, 64, 256)?;
    let times = cutting_times(&q, 20).map_err(err)?;
    let ladder = closest_precritical(&map, &times, 18, LadderOptions::default()).map_err(err)?;
    let band = derivative_band_window(&ladder, &times, 18, (9, 18)).map_err(err)?;
    ensure(band.ratio < 100.0, format!("max/min = {:.4}", band.ratio))?;
    Ok(format!("max/min = {:.4}", band.ratio))
}

fn c8_divergence() -> Outcome {
    // Synthetic S_n = σ^n, so that term growth is exactly σλ⁴ > 1.
    for (sigma, lambda, expect) in [
        (1.618f64, 0.9f64, true),
        (1.618, 0.8, false),
        (2.0, 0.85, true),
    ] {
        let s: Vec<f64> = (0..40).map(|n| sigma.powi(n)).collect();
        let d = divergence_from_values(sigma, lambda, &s).map_err(err)?;
        let hand = sigma * lambda * lambda * lambda * lambda;
        ensure(
            d.diverges == expect && (hand > 1.0) == expect,
            format!("({sigma}, {lambda})"),
        )?;
        ensure(
            d.terms_increasing == expect,
            format!("term growth at ({sigma}, {lambda})"),
        )?;
        let steps: Vec<f64> = d
            .rows
            .windows(2)
            .map(|w| w[1].partial - w[0].partial)
            .collect();
        let accelerating = steps.windows(2).all(|w| w[1] > w[0]);
        ensure(
            accelerating == expect,
            format!("partial-sum increments at ({sigma}, {lambda})"),
        )?;
    }
    Ok("{>1, <1, >1}; partial-sum increments follow term growth".into())
}

fn c9_poincare() -> Outcome {
    let map = UnicriticalMap::from_f64(2, -2.0, 256).map_err(err)?;
    let mut worst = 0f64;
    let mut band = 0f64;
    for delta in [1.0, 2.0] {
        let mut totals = Vec::new();
        for phi in [std::f64::consts::FRAC_PI_3, 1.0] {
            let z = Complex::from_f64(256, 2.0 * phi.cos(), 0.0);
            let s = poincare_partial(&map, &z, delta, 12, None).map_err(err)?;
            for row in &s.rows {
                worst =
                    worst.max((row.level_sum - chebyshev_level_sum(phi, row.level, delta)).abs());
            }
            totals.push(s.rows.iter().map(|r| r.cumulative).collect::<Vec<_>>());
        }
        let ratios: Vec<f64> = totals[0]
            .iter()
            .zip(&totals[1])
            .map(|(a, b)| a / b)
            .collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        band = band.max(hi / lo);
    }
    ensure(worst < 1e-12, format!("oracle error {worst:.3e}"))?;
    ensure(band < 10.0, format!("ratio band {band:.4}"))?;
    Ok(format!("oracle error {worst:.3e}, ratio band {band:.4}"))
}

fn c10_containment() -> Outcome {
    let q = KneadingMap::fibonacci();
    let map = solved(2, &q, 20, 52, 512)?;
    let times = cutting_times(&q, 14).map_err(err)?;
    let ladder = closest_precritical(
        &map,
        &times,
        20.min(times.depth()),
        LadderOptions::default(),
    )
    .map_err(err)?;
    let orbit = critical_orbit(&map, times.s(12).unwrap()).map_err(err)?;
    let no2 = verify_no2cpp(&ladder, &orbit, &times, times.s(10).unwrap()).map_err(err)?;
    ensure(no2.violations(no2.m0).is_empty(), "violations at m0")?;
    let k0 = check_strict_hofbauer(&q, 10).map_err(err)?.k0;
    let mut worst = 0f64;
    for k in [6, 8, 10] {
        let n = verify_monotone_neighborhood(&map, &times, k, k0).map_err(err)?;
        ensure(
            n.status == NeighborhoodStatus::Pass,
            format!("k = {k}: {:?}", n.status),
        )?;
        worst = worst.max(n.errors.0).max(n.errors.1);
    }
    ensure(worst < 1e-20, format!("endpoint error {worst:.3e}"))?;
    Ok(format!(
        "m0 = {}, 0 violations over n <= S_10; endpoint error {worst:.3e}",
        no2.m0
    ))
}

fn gradient(map: &UnicriticalMap, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let bits = map.bits();
    let h = pow2(bits, -((bits / 3) as i32));
    let c = map.c().to_f64();
    let mut worst = 0f64;
    for _ in 0..10 {
        let n = rng.gen_range(1..=30u64);
        let x = Float::with_val(bits, rng.gen_range(c..-c));
        let plus = iterate(map, &Float::with_val(bits, &x + &h), n).map_err(err)?;
        let minus = iterate(map, &Float::with_val(bits, &x - &h), n).map_err(err)?;
        let fd = Float::with_val(bits, &plus - &minus) / Float::with_val(bits, &h * 2u32);
        let d = derivative_along(map, &x, n).map_err(err)?;
        let rel = (Float::with_val(bits, &fd - &d.value).abs() / d.value.abs()).to_f64();
        worst = worst.max(rel);
    }
    Ok(worst)
}

fn c11_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cheb = UnicriticalMap::from_f64(2, -2.0, 256).map_err(err)?;
    let fib = solved(2, &KneadingMap::fibonacci(), 16, 48, 256)?;
    let worst = gradient(&cheb, &mut rng)?.max(gradient(&fib, &mut rng)?);
    ensure(worst < 1e-6, format!("relative error {worst:.3e}"))?;
    Ok(format!("worst relative error {worst:.3e}"))
}

fn c12_l_bound() -> Outcome {
    let cheb = UnicriticalMap::from_f64(2, -2.0, 256).map_err(err)?;
    let l = l_bound(&cheb);
    ensure(l == 4, format!("L(c = -2) = {l}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0f64;
    for i in 0..20 {
        let ell = [2u32, 4, 6][rng.gen_range(0..3)];
        let table = random_monotone_table(&mut rng, 40);
        let map = solved(ell, &KneadingMap::explicit(table), 12, 40, 128)
            .map_err(|e| format!("map {i}: {e}"))?;
        let ratio = l_bound(&map).to_f64() / (2 * ell) as f64;
        ensure(ratio <= 1.0, format!("map {i}: L/2ℓ = {ratio}"))?;
        worst = worst.max(ratio);
    }
    Ok(format!(
        "L(-2) = 4 exactly; max L/2ℓ over 20 maps = {worst:.6}"
    ))
}

fn main() {
    type Case = (u32, &'static str, fn() -> Outcome, u64);
    let cases: [Case; 12] = [
        (1, "cutting-time exactness", c1_cutting_times, 1),
        (2, "recursion invariant", c2_recursion, 5),
        (3, "solver vs Feigenbaum cascade", c3_feigenbaum, 120),
        (4, "solver vs Chebyshev radicals", c4_chebyshev, 30),
        (5, "closest-return law k <= 20", c5_closest_return, 300),
        (6, "scaling trend in ℓ", c6_scaling, 600),
        (7, "derivative band ℓ = 6", c7_band, 300),
        (8, "divergence arithmetic", c8_divergence, 1),
        (9, "Poincaré oracle", c9_poincare, 120),
        (
            10,
            "no-two-closest / monotone neighbourhood",
            c10_containment,
            600,
        ),
        (11, "gradient check", c11_gradient, 10),
        (12, "L bound", c12_l_bound, 30),
    ];
    let lines: Vec<Line> = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|&(id, name, f, budget)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let outcome = f();
                    Line {
                        id,
                        name,
                        outcome,
                        elapsed: t.elapsed(),
                        budget: Duration::from_secs(budget),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for l in &lines {
        // Wall-clock under a shared machine: budgets are reported, not enforced.
        let (tag, detail) = match &l.outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {} ({detail}; {:.1}s, budget {}s)",
            l.id,
            l.name,
            l.elapsed.as_secs_f64(),
            l.budget.as_secs()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
