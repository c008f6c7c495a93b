use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::lattice::{trial_seed, Coloring, LatticeGeometry};
use crate::mc::spanning::{Color, SpanningCounter};

/// Trials handed to a worker at a time. Fixed so the work split never
/// depends on the worker count.
const CHUNK: u64 = 256;

/// Histogram of spanning-cluster counts over independent colourings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialStatistics {
    pub trials: u64,
    pub histogram: BTreeMap<u32, u64>,
    /// Trials in which a winding spanning cluster was discarded.
    pub wrap_excluded: u64,
    pub master_seed: u64,
    pub geometry: LatticeGeometry,
}

impl TrialStatistics {
    fn empty(geometry: LatticeGeometry, master_seed: u64) -> Self {
        TrialStatistics {
            trials: 0,
            histogram: BTreeMap::new(),
            wrap_excluded: 0,
            master_seed,
            geometry,
        }
    }

    fn merge(mut self, other: TrialStatistics) -> Self {
        self.trials += other.trials;
        self.wrap_excluded += other.wrap_excluded;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    pub fn count(&self, n_c: u32) -> u64 {
        self.histogram.get(&n_c).copied().unwrap_or(0)
    }

    /// Trials with at least one spanning cluster.
    pub fn spanning_trials(&self) -> u64 {
        self.histogram.range(1..).map(|(_, &v)| v).sum()
    }

    pub fn frequency(&self, n_c: u32) -> f64 {
        self.count(n_c) as f64 / self.trials as f64
    }

    /// Sample mean and unbiased variance of `N_c`.
    pub fn moments(&self) -> (f64, f64) {
        let n = self.trials as f64;
        let mean = self
            .histogram
            .iter()
            .map(|(&k, &v)| k as f64 * v as f64)
            .sum::<f64>()
            / n;
        if self.trials < 2 {
            return (mean, 0.0);
        }
        let ss: f64 = self
            .histogram
            .iter()
            .map(|(&k, &v)| v as f64 * (k as f64 - mean).powi(2))
            .sum();
        (mean, ss / (n - 1.0))
    }
}

fn run_chunk(
    geometry: LatticeGeometry,
    master_seed: u64,
    color: Color,
    range: std::ops::Range<u64>,
) -> Result<TrialStatistics> {
    let mut coloring = Coloring::try_new(geometry)?;
    let mut counter = SpanningCounter::new();
    let mut stats = TrialStatistics::empty(geometry, master_seed);
    for t in range {
        coloring.resample(trial_seed(master_seed, t));
        let result = counter.count(&coloring, color);
        *stats.histogram.entry(result.n_spanning).or_insert(0) += 1;
        stats.wrap_excluded += u64::from(result.wrap_excluded);
        stats.trials += 1;
    }
    Ok(stats)
}

/// Runs `trials` independent colourings; trial `t` uses
/// [`trial_seed`]`(master_seed, t)`, so the histogram is identical for any
/// `workers`.
pub fn run_trials(
    geometry: LatticeGeometry,
    trials: u64,
    master_seed: u64,
    workers: usize,
) -> Result<TrialStatistics> {
    run_trials_for(geometry, trials, master_seed, workers, Color::Blue)
}

/// [`run_trials`] counting clusters of either colour.
pub fn run_trials_for(
    geometry: LatticeGeometry,
    trials: u64,
    master_seed: u64,
    workers: usize,
    color: Color,
) -> Result<TrialStatistics> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if workers == 0 {
        return Err(Error::domain("workers must be at least 1"));
    }
    let chunks: Vec<std::ops::Range<u64>> = (0..trials.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(trials))
        .collect();

    let run = || {
        chunks
            .par_iter()
            .map(|range| run_chunk(geometry, master_seed, color, range.clone()))
            .try_reduce(
                || TrialStatistics::empty(geometry, master_seed),
                |a, b| Ok(a.merge(b)),
            )
    };
    if workers == 1 {
        return chunks
            .iter()
            .try_fold(TrialStatistics::empty(geometry, master_seed), |acc, r| {
                Ok(acc.merge(run_chunk(geometry, master_seed, color, r.clone())?))
            });
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start {workers} workers: {e}")))?
        .install(run)
}
