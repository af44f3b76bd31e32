use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{KneadError, Result};
use crate::kneading::CuttingTimes;
use crate::map::UnicriticalMap;
use crate::orbit::{derivative_along, orbit_points, PrecriticalLadder};
use crate::precision::ln_abs_f64;
use crate::table::{num, Table, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub k: usize,
    /// `|f^{S_{k+1}}(0)| / |f^{S_k}(0)|`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Mean of the last `max(1, K/4)` ratios.
    pub lambda_hat: f64,
    /// Spread (max - min) of the same tail.
    pub cauchy_width: f64,
    pub tail_len: usize,
}

impl ScalingReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new("scaling", &["k", "ratio"]);
        for r in &self.rows {
            t.push(vec![r.k.to_string(), num(r.ratio)]);
        }
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "lambda-below-one",
            self.lambda_hat > 0.0 && self.lambda_hat < 1.0,
            format!(
                "lambda_hat = {:.9} over the last {} ratios, Cauchy width {:.3e}",
                self.lambda_hat, self.tail_len, self.cauchy_width
            ),
        )
    }
}

/// `r_k = |f^{S_{k+1}}(0)| / |f^{S_k}(0)|` for `0 <= k <= K`, in log space.
pub fn scaling_ratios(
    map: &UnicriticalMap,
    times: &CuttingTimes,
    depth: usize,
) -> Result<ScalingReport> {
    let idx = (0..=depth + 1)
        .map(|k| times.s_checked(k))
        .collect::<Result<Vec<_>>>()?;
    let pts = orbit_points(map, &idx)?;
    for (p, &n) in pts.iter().zip(&idx) {
        if p.is_zero() {
            return Err(KneadError::CriticalPointOnOrbit { step: n });
        }
    }
    let logs: Vec<f64> = pts.iter().map(ln_abs_f64).collect();
    let rows: Vec<ScalingRow> = (0..=depth)
        .map(|k| ScalingRow {
            k,
            ratio: (logs[k + 1] - logs[k]).exp(),
        })
        .collect();
    let tail_len = (depth / 4).max(1);
    let tail = &rows[rows.len() - tail_len..];
    let lambda_hat = tail.iter().map(|r| r.ratio).sum::<f64>() / tail_len as f64;
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.ratio), hi.max(r.ratio))
        });
    Ok(ScalingReport {
        rows,
        lambda_hat,
        cauchy_width: hi - lo,
        tail_len,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub k: usize,
    pub s_k: u64,
    pub log_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    pub rows: Vec<BandRow>,
    pub window: (usize, usize),
    pub max: f64,
    pub min: f64,
    /// `max / min` over the window.
    pub ratio: f64,
}

impl BandReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "derivative-band",
            &["k", "S_k", "abs_derivative", "log_abs_derivative"],
        );
        for r in &self.rows {
            t.push(vec![
                r.k.to_string(),
                r.s_k.to_string(),
                num(r.log_abs.exp()),
                num(r.log_abs),
            ]);
        }
        t
    }

    pub fn verdict(&self, bound: f64) -> Verdict {
        Verdict::new(
            "derivative-band",
            self.ratio.is_finite() && self.ratio < bound,
            format!(
                "max/min = {:.4} over k in [{}, {}] (max {:.4e}, min {:.4e})",
                self.ratio, self.window.0, self.window.1, self.max, self.min
            ),
        )
    }
}

/// `|Df^{S_k}(ζ_k)|` for `0 <= k <= K`, summarised over `k ∈ [K/2, K]`.
pub fn derivative_band(
    ladder: &PrecriticalLadder,
    times: &CuttingTimes,
    depth: usize,
) -> Result<BandReport> {
    derivative_band_window(ladder, times, depth, (depth / 2, depth))
}

pub fn derivative_band_window(
    ladder: &PrecriticalLadder,
    times: &CuttingTimes,
    depth: usize,
    window: (usize, usize),
) -> Result<BandReport> {
    if window.0 > window.1 || window.1 > depth {
        return Err(KneadError::InvalidInput(format!(
            "band window {window:?} outside [0, {depth}]"
        )));
    }
    let map = ladder.map();
    let mut rows = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let s_k = times.s_checked(k)?;
        let d = derivative_along(map, ladder.zeta_checked(k)?, s_k)?;
        rows.push(BandRow {
            k,
            s_k,
            log_abs: d.log_abs,
        });
    }
    let band = &rows[window.0..=window.1];
    let max = band
        .iter()
        .map(|r| r.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = band.iter().map(|r| r.log_abs).fold(f64::INFINITY, f64::min);
    Ok(BandReport {
        rows,
        window,
        max: max.exp(),
        min: min.exp(),
        ratio: (max - min).exp(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub n: usize,
    pub s_n: f64,
    pub term: f64,
    pub partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub sigma: f64,
    pub lambda: f64,
    /// `σ λ^4`.
    pub criterion: f64,
    pub diverges: bool,
    /// Terms `S_n λ^{4n}` increase over the last quarter of the table.
    pub terms_increasing: bool,
    pub rows: Vec<DivergenceRow>,
}

impl DivergenceReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new("divergence", &["n", "S_n", "term", "partial_sum"]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                num(r.s_n),
                num(r.term),
                num(r.partial),
            ]);
        }
        t
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::descriptive(
            "sigma-lambda4-above-one",
            self.diverges,
            format!(
                "sigma*lambda^4 = {:.6} ({}); terms {}",
                self.criterion,
                if self.diverges { "> 1" } else { "<= 1" },
                if self.terms_increasing {
                    "eventually increasing"
                } else {
                    "eventually decreasing"
                }
            ),
        )
    }
}

/// Criterion `σλ⁴ > 1` with partial sums of `S_n λ^{4n}` over the first
/// `N + 1` cutting times.
pub fn fib_divergence_report(
    sigma: f64,
    lambda: f64,
    times: &CuttingTimes,
    count: usize,
) -> Result<DivergenceReport> {
    if count > times.depth() {
        return Err(KneadError::OutOfRange {
            index: count as u64,
            limit: times.depth() as u64,
        });
    }
    let s: Vec<f64> = times.values()[..=count]
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::INFINITY))
        .collect();
    divergence_from_values(sigma, lambda, &s)
}

/// Same report on arbitrary positive `S_n` values.
pub fn divergence_from_values(sigma: f64, lambda: f64, s: &[f64]) -> Result<DivergenceReport> {
    if !(lambda > 0.0 && lambda < 1.0) || sigma.is_nan() || sigma <= 0.0 {
        return Err(KneadError::InvalidInput(format!(
            "need sigma > 0 and lambda in (0, 1), got ({sigma}, {lambda})"
        )));
    }
    let criterion = sigma * lambda.powi(4);
    let l4 = lambda.powi(4).ln();
    let mut partial = 0.0;
    let rows: Vec<DivergenceRow> = s
        .iter()
        .enumerate()
        .map(|(n, &s_n)| {
            let term = (s_n.ln() + n as f64 * l4).exp();
            partial += term;
            DivergenceRow {
                n,
                s_n,
                term,
                partial,
            }
        })
        .collect();
    let tail = &rows[(rows.len() - (rows.len() / 4).max(1)).saturating_sub(1)..];
    let terms_increasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1].term > w[0].term);
    Ok(DivergenceReport {
        sigma,
        lambda,
        criterion,
        diverges: criterion > 1.0,
        terms_increasing,
        rows,
    })
}

/// `exp` of the least-squares slope of `ln S_k` over `k ∈ [K/2, K]`.
pub fn sigma_hat(times: &CuttingTimes, depth: usize) -> Result<f64> {
    if depth < 2 || depth > times.depth() {
        return Err(KneadError::InvalidInput(format!(
            "sigma_hat needs 2 <= K <= {}",
            times.depth()
        )));
    }
    let pts: Vec<(f64, f64)> = (depth / 2..=depth)
        .map(|k| {
            (
                k as f64,
                times.values()[k].to_f64().unwrap_or(f64::INFINITY).ln(),
            )
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx).exp())
}
