//! Spanning clusters of critical percolation in an annulus.
//!
//! [`exact`] evaluates the scaling-limit formulas for the number of clusters
//! crossing between the two boundaries; [`mc`] simulates site percolation on
//! a triangular lattice wrapped into a cylinder; [`analysis`] compares the two.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod mc;
pub mod series;

pub use analysis::{compare, wilson_interval, ComparisonReport, ComparisonRow, WilsonInterval};
pub use error::{Error, Result};
pub use exact::{
    crossing_probability, distribution, make_modulus, mean_spanning_clusters, p_exact,
    AnnulusModulus, CrossingDistribution, CrossingForm,
};
pub use mc::{
    count_spanning, geometry_for, run_trials, sample, Coloring, LatticeGeometry, SpanningCount,
    TrialStatistics,
};
pub use series::{Nome, QuadraticSeries, Truncation};
