//! Triangular lattice on a cylinder and its random two-colourings.
//!
//! The lattice has `cols = 2ℓ/a` distinct columns of the staggered picture, so
//! each row holds `cols / 2` sites. Sites are stored row-major on a sheared
//! grid: site `(i, j)` touches `(i, j±1)`, `(i±1, j)`, `(i+1, j−1)` and
//! `(i−1, j+1)`, with `j` taken mod `cols / 2` and `i` not wrapped. Row 0 is
//! the edge `y = 0`, row `rows − 1` the edge `y = L`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeGeometry {
    cols: usize,
    rows: usize,
}

impl LatticeGeometry {
    /// `cols` must be even and at least 4; `rows` at least 2.
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if cols < 4 || !cols.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "cols must be even and >= 4, got {cols}"
            )));
        }
        if rows < 2 {
            return Err(Error::domain(format!("rows must be >= 2, got {rows}")));
        }
        if rows
            .checked_mul(cols / 2)
            .is_none_or(|n| n > u32::MAX as usize)
        {
            return Err(Error::Resource(format!(
                "{rows} x {cols} lattice is too large"
            )));
        }
        Ok(LatticeGeometry { cols, rows })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Sites per row, `ℓ/a`.
    pub fn width(&self) -> usize {
        self.cols / 2
    }

    pub fn sites(&self) -> usize {
        self.rows * self.width()
    }

    /// `L/ℓ` realised by this lattice: `(rows − 1)(√3/2) / (cols/2)`.
    pub fn rho_effective(&self) -> f64 {
        (self.rows - 1) as f64 * SQRT_3 / self.cols as f64
    }

    /// `(rows + 1)·√3/cols`: the aspect ratio with each edge moved one row
    /// outward. Finite lattices cross about as often as the continuum at this
    /// ratio; the shift from [`rho_effective`](Self::rho_effective) is the
    /// leading finite-size offset.
    pub fn rho_extended(&self) -> f64 {
        (self.rows + 1) as f64 * SQRT_3 / self.cols as f64
    }
}

/// Lattice whose aspect ratio is nearest to `rho` at the given resolution.
pub fn geometry_for(rho: f64, cols: usize) -> Result<LatticeGeometry> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::domain(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    if cols < 4 || !cols.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "cols must be even and >= 4, got {cols}"
        )));
    }
    let rows = (rho * cols as f64 / SQRT_3).round() + 1.0;
    if rows < 2.0 {
        return Err(Error::domain(format!(
            "rho = {rho} needs fewer than 2 rows at cols = {cols}"
        )));
    }
    if rows > u32::MAX as f64 {
        return Err(Error::Resource(format!("rho = {rho} needs {rows} rows")));
    }
    LatticeGeometry::new(rows as usize, cols)
}

/// One assignment of colours; `true` is blue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    geometry: LatticeGeometry,
    cells: Vec<bool>,
}

impl Coloring {
    pub fn try_new(geometry: LatticeGeometry) -> Result<Self> {
        let mut cells = Vec::new();
        cells.try_reserve_exact(geometry.sites()).map_err(|e| {
            Error::Resource(format!("cannot allocate {} sites: {e}", geometry.sites()))
        })?;
        cells.resize(geometry.sites(), false);
        Ok(Coloring { geometry, cells })
    }

    /// Builds a colouring from row-major cells.
    pub fn from_cells(geometry: LatticeGeometry, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != geometry.sites() {
            return Err(Error::domain(format!(
                "expected {} cells, got {}",
                geometry.sites(),
                cells.len()
            )));
        }
        Ok(Coloring { geometry, cells })
    }

    /// Colouring whose site `k` is blue iff bit `k` of `bits` is set.
    pub fn from_bits(geometry: LatticeGeometry, bits: u64) -> Result<Self> {
        if geometry.sites() > 64 {
            return Err(Error::domain("from_bits supports at most 64 sites"));
        }
        let cells = (0..geometry.sites()).map(|k| bits >> k & 1 == 1).collect();
        Ok(Coloring { geometry, cells })
    }

    pub fn geometry(&self) -> LatticeGeometry {
        self.geometry
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn is_blue(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.geometry.width() + col]
    }

    /// Swaps red and blue.
    pub fn inverted(&self) -> Coloring {
        Coloring {
            geometry: self.geometry,
            cells: self.cells.iter().map(|&c| !c).collect(),
        }
    }

    pub fn blue_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Re-colours in place from `seed`; see [`sample`].
    pub fn resample(&mut self, seed: u64) {
        let mut rng = trial_rng(seed);
        for chunk in self.cells.chunks_mut(64) {
            let bits = rng.next_u64();
            for (k, cell) in chunk.iter_mut().enumerate() {
                *cell = bits >> k & 1 == 1;
            }
        }
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `t` under `master_seed`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial))
}

/// ChaCha8 keyed by four successive SplitMix64 outputs of `seed`.
fn trial_rng(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for word in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        word.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Colours every site blue with probability ½.
///
/// Site `k` (row-major) takes bit `k mod 64` of the `⌊k/64⌋`-th `u64` drawn
/// from a ChaCha8 stream keyed by `seed`, so a seed fixes the colouring on
/// every platform.
pub fn sample(geometry: LatticeGeometry, seed: u64) -> Result<Coloring> {
    let mut coloring = Coloring::try_new(geometry)?;
    coloring.resample(seed);
    Ok(coloring)
}
