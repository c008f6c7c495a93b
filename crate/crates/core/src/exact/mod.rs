//! Closed-form scaling-limit results for the annulus.

pub mod crossing;
pub mod distribution;
pub mod modulus;
pub mod sweep;

pub use crossing::{
    angle_factor_from_fugacity, angle_from_fugacity, crossing_probability, fugacity_from_angle,
    loop_gas_partition, o1_crossing_probability, o1_crossing_probability_in, odd_hull_probability,
    z_plus_minus, z_plus_minus_in, CrossingForm, Representation, CHI_PRIME_NEGATIVE_FUGACITY,
    CHI_PRIME_UNIT_FUGACITY, CHI_PRIME_ZERO_FUGACITY,
};
pub use distribution::{
    a_coefficient, distribution, leading_order_pn, mean_spanning_clusters, p_exact,
    spanning_moments, ClusterProbability, CoefficientTable, CrossingDistribution,
    MAX_COEFFICIENT_ORDER, MAX_DISTRIBUTION_ORDER,
};
pub use modulus::{make_modulus, AnnulusModulus, NomeSummary};
pub use sweep::{rho_grid, sweep, sweep_point, SweepPoint};
