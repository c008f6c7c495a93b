//! Monte Carlo simulation of critical site percolation on the cylinder.

pub mod lattice;
pub mod spanning;
pub mod trials;

pub use lattice::{geometry_for, sample, splitmix64, trial_seed, Coloring, LatticeGeometry};
pub use spanning::{count_spanning, Color, SpanningCount, SpanningCounter};
pub use trials::{run_trials, run_trials_for, TrialStatistics};
