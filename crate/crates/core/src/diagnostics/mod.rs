//! Quantitative checks on solved maps: scaling of closest returns, derivative
//! bands, divergence criteria, series over the precritical ladder and the
//! Hofbauer-tower checks.

mod cascade;
mod containment;
mod scaling;
mod series;

pub use cascade::{l_bound, saddle_node_cascade, CascadeEntry, CascadeReport};
pub use containment::{
    verify_monotone_neighborhood, verify_no2cpp, ContainmentRow, NeighborhoodReport,
    NeighborhoodStatus, No2cppReport,
};
pub use scaling::{
    derivative_band, derivative_band_window, divergence_from_values, fib_divergence_report,
    scaling_ratios, sigma_hat, BandReport, BandRow, DivergenceReport, DivergenceRow, ScalingReport,
    ScalingRow,
};
pub use series::{
    closest_return_law, gap_kappa, longbranched_sum, ClosestReturnReport, ExponentSign, GapReport,
    GapRow, ReturnRow, SeriesReport, SeriesRow,
};

use serde::Serialize;

use crate::error::Result;
use crate::kneading::{check_strict_hofbauer, cutting_times, KneadingMap};
use crate::map::UnicriticalMap;
use crate::orbit::{closest_precritical, critical_orbit, LadderOptions};
use crate::table::{Table, Verdict};

/// Knobs for [`DiagnosticsReport::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub delta: f64,
    pub exponent_sign: ExponentSign,
    /// Acceptable `max/min` of the derivative band.
    pub band_bound: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            delta: 1.0,
            exponent_sign: ExponentSign::Plus,
            band_bound: 100.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub scaling: ScalingReport,
    pub lambda_hat: f64,
    pub sigma_hat: f64,
    pub derivative_band: BandReport,
    pub closest_return: ClosestReturnReport,
    pub partial_sums: Vec<SeriesReport>,
    pub divergence: Option<DivergenceReport>,
    pub verdicts: Vec<Verdict>,
}

impl DiagnosticsReport {
    /// Every diagnostic that only needs `(map, Q, K)`.
    pub fn build(
        map: &UnicriticalMap,
        q: &KneadingMap,
        depth: usize,
        options: ReportOptions,
    ) -> Result<Self> {
        let times = cutting_times(q, depth + 2)?;
        let deepest_q = (1..=depth + 1)
            .filter_map(|k| times.q(k))
            .max()
            .unwrap_or(0);
        let ladder =
            closest_precritical(map, &times, depth.max(deepest_q), LadderOptions::default())?;
        let scaling = scaling_ratios(map, &times, depth)?;
        let sigma = sigma_hat(&times, depth)?;
        let band = derivative_band(&ladder, &times, depth)?;
        let law = closest_return_law(&ladder, &times, depth)?;
        let long = longbranched_sum(&ladder, &times, options.delta, depth, options.exponent_sign)?;

        let mut verdicts = vec![
            scaling.verdict(),
            band.verdict(options.band_bound),
            law.verdict(),
            long.verdict(),
        ];
        let partial_sums = vec![long];
        let divergence = if scaling.lambda_hat > 0.0 && scaling.lambda_hat < 1.0 {
            let d = fib_divergence_report(sigma, scaling.lambda_hat, &times, depth)?;
            verdicts.push(d.verdict());
            Some(d)
        } else {
            None
        };
        if law.holds() {
            let gaps = gap_kappa(&ladder, &times, depth)?;
            verdicts.push(gaps.verdict());
        }
        let orbit = critical_orbit(map, times.s_checked(depth)?)?;
        let cascade =
            saddle_node_cascade(&orbit, &ladder, &times, (2, times.s_checked(depth.min(8))?))?;
        verdicts.push(cascade.verdict(map.ell()));
        let hofbauer = check_strict_hofbauer(q, depth)?;
        verdicts.push(Verdict::new(
            "strict-hofbauer",
            hofbauer.pass,
            format!("k0 = {}", hofbauer.k0),
        ));
        Ok(DiagnosticsReport {
            lambda_hat: scaling.lambda_hat,
            sigma_hat: sigma,
            scaling,
            derivative_band: band,
            closest_return: law,
            partial_sums,
            divergence,
            verdicts,
        })
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut out = vec![
            self.scaling.table(),
            self.derivative_band.table(),
            self.closest_return.table(),
        ];
        out.extend(self.partial_sums.iter().map(SeriesReport::table));
        if let Some(d) = &self.divergence {
            out.push(d.table());
        }
        out
    }
}
