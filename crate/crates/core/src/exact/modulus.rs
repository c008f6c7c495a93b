use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::Nome;

/// Shape of the periodic rectangle: `rho = L/ℓ` with the two nomes
/// `q̃ = e^{−2πρ}` and `q = e^{−π/ρ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusModulus {
    rho: f64,
    q_tilde: Nome,
    q: Nome,
}

impl AnnulusModulus {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::domain(format!(
                "rho must be positive and finite, got {rho}"
            )));
        }
        let q_tilde = Nome::from_ln(-2.0 * PI * rho)?;
        let q = Nome::from_ln(-PI / rho)
            .map_err(|_| Error::domain(format!("rho = {rho} is too small to represent q")))?;
        Ok(AnnulusModulus { rho, q_tilde, q })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn q_tilde(&self) -> Nome {
        self.q_tilde
    }

    pub fn q(&self) -> Nome {
        self.q
    }

    /// Which nome gives the faster-converging series: `q̃` for `ρ ≥ ½`.
    pub fn prefers_q_tilde(&self) -> bool {
        self.rho >= 0.5
    }

    pub fn nome_summary(&self) -> NomeSummary {
        NomeSummary {
            rho: self.rho,
            q_tilde: self.q_tilde.value(),
            q: self.q.value(),
        }
    }
}

/// Printable `ρ → (q̃, q)` conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NomeSummary {
    pub rho: f64,
    pub q_tilde: f64,
    pub q: f64,
}

/// Convenience wrapper over [`AnnulusModulus::new`].
pub fn make_modulus(rho: f64) -> Result<AnnulusModulus> {
    AnnulusModulus::new(rho)
}
