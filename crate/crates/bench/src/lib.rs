//! Shared inputs for the criterion benches.

use annulus_core::{geometry_for, sample, Coloring};

/// Aspect ratios spanning both nome representations.
pub const RHOS: [f64; 4] = [0.2, 0.5, 1.0, 5.0];

/// Lattice widths benchmarked by the simulation benches.
pub const COLS: [usize; 3] = [32, 128, 512];

/// `count` colourings of the `rho = 1` lattice with `cols` columns.
pub fn colorings(cols: usize, count: u64) -> Vec<Coloring> {
    let g = geometry_for(1.0, cols).expect("valid geometry");
    (0..count)
        .map(|seed| sample(g, seed).expect("lattice fits in memory"))
        .collect()
}
