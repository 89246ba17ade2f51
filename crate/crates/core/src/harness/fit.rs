//! Exponential decay fits of survival curves and the d* scaling check.

use serde::Serialize;

use super::sweep::SweepRow;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Target distinguishability for `d_star_hat`.
    pub epsilon: f64,
    /// Rows before the first `p_hat` below this value are dropped.
    pub transient_threshold: f64,
    pub min_rows: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            epsilon: 0.01,
            transient_threshold: 0.9,
            min_rows: 4,
        }
    }
}

/// Least-squares line through `(depth, ln p_hat)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Depth where the fitted curve reaches `epsilon`; infinite when the
    /// fit does not decay.
    pub d_star_hat: f64,
    /// Every row had zero survivors; `d_star_hat` is then the first depth
    /// with zero survivors and the line fields are not meaningful.
    pub saturated: bool,
    pub rows_used: usize,
}

/// Fits one survival curve. All rows must share family, `n` and `gamma`.
pub fn fit_decay(rows: &[SweepRow], opts: &FitOptions) -> Result<DecayFit> {
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {} outside (0, 1)",
            opts.epsilon
        )));
    }
    let Some(first) = rows.first() else {
        return Err(Error::Fit("no rows".into()));
    };
    if rows
        .iter()
        .any(|r| r.family != first.family || r.n != first.n || r.gamma.to_bits() != first.gamma.to_bits())
    {
        return Err(Error::Fit("rows mix several (family, n, gamma) series".into()));
    }
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.depth);

    if sorted.iter().all(|r| r.survivors == 0) {
        return Ok(DecayFit {
            slope: f64::NEG_INFINITY,
            intercept: 0.0,
            r_squared: 0.0,
            d_star_hat: sorted[0].depth as f64,
            saturated: true,
            rows_used: 0,
        });
    }

    let start = sorted
        .iter()
        .position(|r| r.p_hat < opts.transient_threshold)
        .unwrap_or(0);
    let points: Vec<(f64, f64)> = sorted[start..]
        .iter()
        .filter(|r| r.survivors > 0)
        .map(|r| (r.depth as f64, r.p_hat.ln()))
        .collect();
    if points.len() < opts.min_rows {
        return Err(Error::Fit(format!(
            "{} usable rows after the transient, need {}",
            points.len(),
            opts.min_rows
        )));
    }
    let (slope, intercept, r_squared) = least_squares(&points);
    let d_star_hat = if slope < 0.0 {
        (opts.epsilon.ln() - intercept) / slope
    } else {
        f64::INFINITY
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        d_star_hat,
        saturated: false,
        rows_used: points.len(),
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PolylogConsistent,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCheck {
    pub n: usize,
    pub next_n: usize,
    pub ratio: f64,
    pub bound: f64,
    pub within: bool,
}

/// Consistency check of d* growth against `log^2 n`; not a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub ratios: Vec<RatioCheck>,
    pub verdict: Verdict,
}

/// Compares consecutive `d_star_hat` ratios with `(ln n' / ln n)^2 * slack`.
/// With a doubling grid this is the `d*(2n) / d*(n)` test.
pub fn estimate_dstar_scaling(fits: &[(usize, DecayFit)], slack: f64) -> Result<ScalingReport> {
    let mut fits: Vec<(usize, DecayFit)> = fits.to_vec();
    fits.sort_by_key(|f| f.0);
    fits.dedup_by_key(|f| f.0);
    if fits.len() < 3 {
        return Err(Error::Fit(format!(
            "need fits for at least 3 values of n, got {}",
            fits.len()
        )));
    }
    if let Some((n, _)) = fits
        .iter()
        .find(|(n, f)| *n < 2 || !(f.d_star_hat.is_finite() && f.d_star_hat > 0.0))
    {
        return Err(Error::Fit(format!("missing or unusable d* estimate for n = {n}")));
    }
    let ratios: Vec<RatioCheck> = fits
        .windows(2)
        .map(|w| {
            let (n, a) = (w[0].0, w[0].1.d_star_hat);
            let (next_n, b) = (w[1].0, w[1].1.d_star_hat);
            let bound = ((next_n as f64).ln() / (n as f64).ln()).powi(2) * slack;
            let ratio = b / a;
            RatioCheck {
                n,
                next_n,
                ratio,
                bound,
                within: ratio <= bound,
            }
        })
        .collect();
    let verdict = if ratios.iter().all(|r| r.within) {
        Verdict::PolylogConsistent
    } else {
        Verdict::Inconsistent
    };
    Ok(ScalingReport { ratios, verdict })
}
