use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{distribution, make_modulus, mean_spanning_clusters};
use crate::series::Truncation;

/// `points` aspect ratios from `min` to `max` inclusive, evenly spaced in
/// `ρ` or in `ln ρ`. The endpoints are returned exactly as given.
pub fn rho_grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if !(min.is_finite() && min > 0.0) {
        return Err(Error::domain(format!(
            "rho-min must be positive, got {min}"
        )));
    }
    if !(max.is_finite() && max > min) {
        return Err(Error::domain(format!(
            "rho-max must exceed rho-min, got {max}"
        )));
    }
    if points < 2 {
        return Err(Error::domain(format!(
            "points must be at least 2, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points)
        .map(|k| {
            let t = k as f64 / last;
            if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect();
    grid[0] = min;
    grid[points - 1] = max;
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub rho: f64,
    pub crossing: f64,
    /// `P(1), …, P(n_max)`.
    pub p: Vec<f64>,
    pub mean_nc: f64,
}

pub fn sweep_point(rho: f64, n_max: u32, trunc: &Truncation) -> Result<SweepPoint> {
    let m = make_modulus(rho)?;
    let dist = distribution(&m, n_max, trunc)?;
    Ok(SweepPoint {
        rho,
        crossing: dist.crossing,
        p: dist.p[1..].to_vec(),
        mean_nc: mean_spanning_clusters(&m, trunc)?,
    })
}

pub fn sweep(grid: &[f64], n_max: u32, trunc: &Truncation) -> Result<Vec<SweepPoint>> {
    grid.iter()
        .map(|&rho| sweep_point(rho, n_max, trunc))
        .collect()
}
