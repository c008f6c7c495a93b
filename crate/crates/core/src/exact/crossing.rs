//! Crossing probabilities for percolation and the O(1) loop model.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::modulus::AnnulusModulus;
use crate::series::{
    bilateral_sum, euler_product, ln_dedekind_eta, ln_euler_product, weighted_bilateral_sum, Nome,
    QuadraticSeries, Truncation,
};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// `cos 3χ` for the closed-hull phase `χ = π/18`.
const COS_THREE_CHI: f64 = SQRT_3 / 2.0;

/// Boundary angles `χ′` at which the spanning-hull fugacity is `u = 1, 0, −1`.
pub const CHI_PRIME_UNIT_FUGACITY: f64 = PI / 18.0;
pub const CHI_PRIME_ZERO_FUGACITY: f64 = PI / 6.0;
pub const CHI_PRIME_NEGATIVE_FUGACITY: f64 = 5.0 * PI / 18.0;

/// Equivalent closed forms of `Σ_{N_c≥1} P(N_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingForm {
    /// Ratio of two `q̃` theta series (`x1`).
    QTildeSeries,
    /// Ratio of two `q` theta series (`x2`).
    ConjugateSeries,
    /// `√3 η(τ)η(6τ)² / η(3τ)η(2τ)²` (`x3a`).
    EtaQuotient,
    /// The same quotient at `−1/τ` (`x3b`).
    ConjugateEtaQuotient,
    /// `Z(π/18) + Z(5π/18) − 2Z(π/6)` from the loop-gas partition function.
    LoopGas,
    /// `QTildeSeries` for `ρ ≥ ½`, `ConjugateSeries` below.
    Auto,
}

impl CrossingForm {
    pub const EXPLICIT: [CrossingForm; 5] = [
        CrossingForm::QTildeSeries,
        CrossingForm::ConjugateSeries,
        CrossingForm::EtaQuotient,
        CrossingForm::ConjugateEtaQuotient,
        CrossingForm::LoopGas,
    ];

    pub fn key(self) -> &'static str {
        match self {
            CrossingForm::QTildeSeries => "x1",
            CrossingForm::ConjugateSeries => "x2",
            CrossingForm::EtaQuotient => "x3a",
            CrossingForm::ConjugateEtaQuotient => "x3b",
            CrossingForm::LoopGas => "loopgas",
            CrossingForm::Auto => "auto",
        }
    }
}

impl fmt::Display for CrossingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for CrossingForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let form = match s.to_ascii_lowercase().as_str() {
            "x1" => CrossingForm::QTildeSeries,
            "x2" => CrossingForm::ConjugateSeries,
            "x3a" => CrossingForm::EtaQuotient,
            "x3b" => CrossingForm::ConjugateEtaQuotient,
            "loopgas" => CrossingForm::LoopGas,
            "auto" => CrossingForm::Auto,
            other => return Err(Error::domain(format!("unknown crossing form '{other}'"))),
        };
        Ok(form)
    }
}

/// Which nome a dual-representation formula is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Auto,
    QTilde,
    Q,
}

impl Representation {
    fn use_q_tilde(self, m: &AnnulusModulus) -> bool {
        match self {
            Representation::Auto => m.prefers_q_tilde(),
            Representation::QTilde => true,
            Representation::Q => false,
        }
    }
}

fn series(a: i64, b: i64, c_num: i64, c_den: i64) -> QuadraticSeries {
    QuadraticSeries::integral(a, b, c_num, c_den).expect("positive quadratic coefficient")
}

fn series_difference(
    plus: QuadraticSeries,
    minus: QuadraticSeries,
    nome: Nome,
    trunc: &Truncation,
) -> Result<f64> {
    Ok(bilateral_sum(&plus, nome, trunc)? - bilateral_sum(&minus, nome, trunc)?)
}

fn q_tilde_series_form(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    let qt = m.q_tilde();
    let numerator = series_difference(series(12, 4, 1, 4), series(12, 8, 5, 4), qt, trunc)?;
    let denominator = series_difference(series(12, 2, 0, 1), series(12, 10, 2, 1), qt, trunc)?;
    Ok(SQRT_3 * numerator / denominator)
}

fn conjugate_series_form(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    let q = m.q();
    let a = bilateral_sum(&series(6, 1, 0, 1), q, trunc)?;
    let b = bilateral_sum(&series(6, 5, 1, 1), q, trunc)?;
    let c = bilateral_sum(&series(6, 3, 1, 3), q, trunc)?;
    Ok((a + b - 2.0 * c) / (a - b))
}

fn eta_quotient_form(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    let qt = m.q_tilde();
    let ln_eta = |k: f64| ln_dedekind_eta(qt.pow(k), trunc);
    let ln = ln_eta(1.0)? + 2.0 * ln_eta(6.0)? - ln_eta(3.0)? - 2.0 * ln_eta(2.0)?;
    Ok(SQRT_3 * ln.exp())
}

fn conjugate_eta_quotient_form(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    // η(−1/kτ) has nome q^{2/k}.
    let q = m.q();
    let ln_eta = |k: f64| ln_dedekind_eta(q.pow(2.0 / k), trunc);
    let ln = ln_eta(1.0)? + 2.0 * ln_eta(6.0)? - ln_eta(3.0)? - 2.0 * ln_eta(2.0)?;
    Ok(ln.exp())
}

fn loop_gas_form(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    let z = |chi_prime| loop_gas_partition(chi_prime, m, trunc);
    Ok(
        z(CHI_PRIME_UNIT_FUGACITY)? + z(CHI_PRIME_NEGATIVE_FUGACITY)?
            - 2.0 * z(CHI_PRIME_ZERO_FUGACITY)?,
    )
}

/// Probability that at least one cluster spans the annulus without wrapping.
pub fn crossing_probability(
    m: &AnnulusModulus,
    form: CrossingForm,
    trunc: &Truncation,
) -> Result<f64> {
    match form {
        CrossingForm::QTildeSeries => q_tilde_series_form(m, trunc),
        CrossingForm::ConjugateSeries => conjugate_series_form(m, trunc),
        CrossingForm::EtaQuotient => eta_quotient_form(m, trunc),
        CrossingForm::ConjugateEtaQuotient => conjugate_eta_quotient_form(m, trunc),
        CrossingForm::LoopGas => loop_gas_form(m, trunc),
        CrossingForm::Auto if m.prefers_q_tilde() => q_tilde_series_form(m, trunc),
        CrossingForm::Auto => conjugate_series_form(m, trunc),
    }
}

/// Loop-gas partition function at closed-hull phase `3χ = π/6`:
///
/// `Z(χ′) = (1/2√3) ∏(1 − q̃^{2n})⁻¹ Σ_p cos(3χ′p) q̃^{(p²−1)/12}`,
///
/// normalised so that `Z(χ′) − Z(π/6) = Σ_{n_c≥1} p(n_c) uⁿᶜ` with
/// `u = cos 3χ′ / cos(π/6)`.
pub fn loop_gas_partition(chi_prime: f64, m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    if !chi_prime.is_finite() {
        return Err(Error::domain("boundary angle must be finite"));
    }
    let qt = m.q_tilde();
    let exponents = QuadraticSeries::new(
        num_rational::Ratio::new(1, 12),
        num_rational::Ratio::from_integer(0),
        num_rational::Ratio::new(-1, 12),
    )?;
    let phase = 3.0 * chi_prime;
    let sum = weighted_bilateral_sum(&exponents, qt, trunc, |p| (phase * p as f64).cos())?;
    let product = euler_product(qt, 2, trunc)?;
    Ok(sum / (2.0 * SQRT_3 * product))
}

/// `Σ_{n_c odd} p(n_c) = ½ (Z(π/18) − Z(5π/18))`, identically ½.
pub fn odd_hull_probability(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    let unit = loop_gas_partition(CHI_PRIME_UNIT_FUGACITY, m, trunc)?;
    let negative = loop_gas_partition(CHI_PRIME_NEGATIVE_FUGACITY, m, trunc)?;
    Ok(0.5 * (unit - negative))
}

/// Probability of at least one spanning hull in the O(1) model,
/// `Σ_{n_c≥1} p(n_c)`, in the nome picked by `ρ`.
pub fn o1_crossing_probability(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    o1_crossing_probability_in(m, Representation::Auto, trunc)
}

/// [`o1_crossing_probability`] with an explicit nome.
///
/// In `q`: `Σ_r (q^{6r²+r} − q^{6r²+3r+⅓}) / ∏(1 − qⁿ)`.
/// In `q̃`: `Z(π/18) − Z(π/6)`.
pub fn o1_crossing_probability_in(
    m: &AnnulusModulus,
    repr: Representation,
    trunc: &Truncation,
) -> Result<f64> {
    if repr.use_q_tilde(m) {
        let unit = loop_gas_partition(CHI_PRIME_UNIT_FUGACITY, m, trunc)?;
        let zero = loop_gas_partition(CHI_PRIME_ZERO_FUGACITY, m, trunc)?;
        Ok(unit - zero)
    } else {
        let q = m.q();
        let numerator = series_difference(series(6, 1, 0, 1), series(6, 3, 1, 3), q, trunc)?;
        Ok(numerator / euler_product(q, 1, trunc)?)
    }
}

/// O(1) partition function with opposite fixed spins on the two edges,
/// `Z₊₋ = Σ_r (q^{6r²+3r+⅓} − q^{6r²+5r+1}) / ∏(1 − qⁿ) = 1 − Z_{crossing}`.
pub fn z_plus_minus(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    z_plus_minus_in(m, Representation::Auto, trunc)
}

pub fn z_plus_minus_in(
    m: &AnnulusModulus,
    repr: Representation,
    trunc: &Truncation,
) -> Result<f64> {
    if repr.use_q_tilde(m) {
        // Z₊₊ = 1.
        Ok(1.0 - o1_crossing_probability_in(m, Representation::QTilde, trunc)?)
    } else {
        let q = m.q();
        let numerator = series_difference(series(6, 3, 1, 3), series(6, 5, 1, 1), q, trunc)?;
        Ok(numerator / euler_product(q, 1, trunc)?)
    }
}

/// Spanning-hull fugacity `u = cos 3χ′ / cos 3χ` with `χ = π/18`.
pub fn fugacity_from_angle(chi_prime: f64) -> f64 {
    (3.0 * chi_prime).cos() / COS_THREE_CHI
}

/// `e^{3iχ′}` as `(re, im)` for a given fugacity, on the branch with
/// `3χ′ ∈ [0, π]`, so that `fugacity_from_angle` inverts it.
pub fn angle_factor_from_fugacity(u: f64) -> Result<(f64, f64)> {
    let half_sqrt3_u = SQRT_3 * u / 2.0;
    if half_sqrt3_u.is_nan() || half_sqrt3_u.abs() > 1.0 {
        return Err(Error::domain(format!(
            "fugacity {u} is outside |u| <= 2/sqrt(3)"
        )));
    }
    let im = (1.0 - half_sqrt3_u * half_sqrt3_u).sqrt();
    Ok((half_sqrt3_u, im))
}

/// `χ′` for a fugacity, inverse of [`fugacity_from_angle`] on `[0, π/3]`.
pub fn angle_from_fugacity(u: f64) -> Result<f64> {
    let (re, im) = angle_factor_from_fugacity(u)?;
    Ok(im.atan2(re) / 3.0)
}

pub(crate) fn ln_q_tilde_product(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    ln_euler_product(m.q_tilde(), 2, trunc)
}
