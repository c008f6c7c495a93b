//! Comparing Monte Carlo histograms with the exact distribution.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exact::{distribution, make_modulus, spanning_moments, NomeSummary};
use crate::mc::TrialStatistics;
use crate::series::Truncation;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Rows whose expected number of events is below this are flagged.
pub const MIN_EXPECTED_COUNT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilsonInterval {
    pub center: f64,
    pub half_width: f64,
}

impl WilsonInterval {
    pub fn lower(&self) -> f64 {
        (self.center - self.half_width).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.center + self.half_width).min(1.0)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower() <= p && p <= self.upper()
    }
}

fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

fn check_confidence(confidence: f64) -> Result<()> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!(
            "confidence must be in (0, 1), got {confidence}"
        )));
    }
    Ok(())
}

fn wilson_with_z(successes: u64, trials: u64, z: f64) -> WilsonInterval {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = n + z2;
    let center = (successes as f64 + z2 / 2.0) / denom;
    // at the boundaries the interval touches 0 or 1 exactly
    let half_width = if successes == 0 {
        center
    } else if successes == trials {
        1.0 - center
    } else {
        z / denom * (n * p * (1.0 - p) + z2 / 4.0).sqrt()
    };
    WilsonInterval { center, half_width }
}

/// Two-sided Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<WilsonInterval> {
    check_confidence(confidence)?;
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if successes > trials {
        return Err(Error::domain(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    Ok(wilson_with_z(
        successes,
        trials,
        normal_quantile(0.5 + confidence / 2.0),
    ))
}

/// One-sided Wilson upper bound when no events were seen: `z²/(n + z²)`.
pub fn wilson_upper_bound_for_zero(trials: u64, confidence: f64) -> Result<f64> {
    check_confidence(confidence)?;
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let z = normal_quantile(confidence);
    Ok(z * z / (trials as f64 + z * z))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    /// `crossing`, `p1`, `p2`, … or `mean_nc`.
    pub observable: String,
    pub exact: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
    /// `(estimate − exact)` over the standard error implied by the exact
    /// distribution.
    pub z_score: f64,
    /// `exact × trials`; absent for the mean.
    pub expected_count: Option<f64>,
    pub insufficient_statistics: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub confidence: f64,
    pub trials: u64,
    pub rho_effective: f64,
    pub nome: NomeSummary,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, observable: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.observable == observable)
    }
}

fn proportion_row(
    observable: String,
    successes: u64,
    trials: u64,
    exact: f64,
    confidence: f64,
) -> Result<ComparisonRow> {
    let n = trials as f64;
    let estimate = successes as f64 / n;
    let (lower, upper, half_width) = if successes == 0 {
        let upper = wilson_upper_bound_for_zero(trials, confidence)?;
        (0.0, upper, upper / 2.0)
    } else {
        let w = wilson_interval(successes, trials, confidence)?;
        (w.lower(), w.upper(), w.half_width)
    };
    let null_se = (exact * (1.0 - exact) / n).sqrt();
    let expected = exact * n;
    Ok(ComparisonRow {
        observable,
        exact,
        estimate,
        lower,
        upper,
        half_width,
        z_score: z_score(estimate, exact, null_se),
        expected_count: Some(expected),
        insufficient_statistics: expected < MIN_EXPECTED_COUNT,
    })
}

fn z_score(estimate: f64, exact: f64, se: f64) -> f64 {
    if se > 0.0 {
        (estimate - exact) / se
    } else if estimate == exact {
        0.0
    } else {
        f64::MAX.copysign(estimate - exact)
    }
}

/// [`compare_with_confidence`] at 95%.
pub fn compare(
    stats: &TrialStatistics,
    n_max: u32,
    trunc: &Truncation,
) -> Result<ComparisonReport> {
    compare_with_confidence(stats, n_max, trunc, DEFAULT_CONFIDENCE)
}

/// Compares the crossing frequency, `P(1), …, P(n_max)` and the mean number
/// of spanning clusters with exact values at the lattice's realised aspect
/// ratio.
pub fn compare_with_confidence(
    stats: &TrialStatistics,
    n_max: u32,
    trunc: &Truncation,
    confidence: f64,
) -> Result<ComparisonReport> {
    check_confidence(confidence)?;
    if stats.trials == 0 {
        return Err(Error::domain("no trials to compare"));
    }
    let rho_effective = stats.geometry.rho_effective();
    let m = make_modulus(rho_effective)?;
    let exact = distribution(&m, n_max, trunc)?;
    let trials = stats.trials;

    let mut rows = Vec::with_capacity(n_max as usize + 2);
    rows.push(proportion_row(
        "crossing".into(),
        stats.spanning_trials(),
        trials,
        exact.crossing,
        confidence,
    )?);
    for n_c in 1..=n_max {
        rows.push(proportion_row(
            format!("p{n_c}"),
            stats.count(n_c),
            trials,
            exact.p[n_c as usize],
            confidence,
        )?);
    }

    let (mean, variance) = spanning_moments(&m, trunc)?;
    let (sample_mean, sample_variance) = stats.moments();
    let n = trials as f64;
    let half_width = normal_quantile(0.5 + confidence / 2.0) * (sample_variance / n).sqrt();
    rows.push(ComparisonRow {
        observable: "mean_nc".into(),
        exact: mean,
        estimate: sample_mean,
        lower: sample_mean - half_width,
        upper: sample_mean + half_width,
        half_width,
        z_score: z_score(sample_mean, mean, (variance / n).sqrt()),
        expected_count: None,
        insufficient_statistics: mean * n < MIN_EXPECTED_COUNT,
    });

    Ok(ComparisonReport {
        confidence,
        trials,
        rho_effective,
        nome: m.nome_summary(),
        rows,
    })
}
