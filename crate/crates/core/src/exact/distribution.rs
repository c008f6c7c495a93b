//! The distribution `P(N_c)` of the number of distinct spanning clusters.
//!
//! For `N_c ≥ 1`
//!
//! ```text
//! P(N_c) = 3^{N_c−½} / 2^{2N_c−1} · ∏(1 − q̃^{2n})⁻¹ · Σ_{s≥0} A_s(N_c) q̃^{(N_c+s)²/3 − 1/12}
//! A_s(N_c) = (−1)^s Σ_{r=s}^{N_c+s} C(r, s) C(2N_c+2s, 2r)
//! ```
//!
//! `P(0)` is never evaluated directly; it is the complement of the crossing
//! probability.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::crossing::{crossing_probability, ln_q_tilde_product, CrossingForm};
use crate::exact::modulus::AnnulusModulus;
use crate::series::{CompensatedSum, Truncation};

/// Largest `N_c + s` for which `A_s(N_c)` is tabulated.
pub const MAX_COEFFICIENT_ORDER: u32 = 64;

/// Largest `n_max` accepted by [`distribution`]; leaves room for the two
/// look-ahead terms used by the tail bound.
pub const MAX_DISTRIBUTION_ORDER: u32 = 60;

const LN_MIN_POSITIVE: f64 = -708.396_418_532_264_1;

/// Exact coefficients `A_s(N_c)` for `1 ≤ N_c`, `N_c + s ≤ 64`, built once.
pub struct CoefficientTable {
    // exact[n_c - 1][s]
    exact: Vec<Vec<BigInt>>,
    // A_s(N_c) / 2^{2N_c−1}
    scaled: Vec<Vec<f64>>,
}

impl CoefficientTable {
    fn build() -> Self {
        let rows = 2 * MAX_COEFFICIENT_ORDER as usize;
        let mut pascal: Vec<Vec<BigInt>> = Vec::with_capacity(rows + 1);
        for n in 0..=rows {
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &pascal[n - 1][k - 1] + &pascal[n - 1][k];
            }
            pascal.push(row);
        }
        let choose = |n: usize, k: usize| -> &BigInt { &pascal[n][k] };

        let mut exact = Vec::new();
        let mut scaled = Vec::new();
        for n_c in 1..=MAX_COEFFICIENT_ORDER as usize {
            let mut exact_row = Vec::new();
            let mut scaled_row = Vec::new();
            let leading = (2.0f64).powi(2 * n_c as i32 - 1);
            for s in 0..=(MAX_COEFFICIENT_ORDER as usize - n_c) {
                let mut acc = BigInt::zero();
                for r in s..=(n_c + s) {
                    acc += choose(r, s) * choose(2 * n_c + 2 * s, 2 * r);
                }
                if s % 2 == 1 {
                    acc = -acc;
                }
                scaled_row.push(acc.to_f64().expect("coefficient fits f64") / leading);
                exact_row.push(acc);
            }
            exact.push(exact_row);
            scaled.push(scaled_row);
        }
        CoefficientTable { exact, scaled }
    }

    pub fn global() -> &'static CoefficientTable {
        static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
        TABLE.get_or_init(CoefficientTable::build)
    }

    fn check(n_c: u32, s: u32) -> Result<()> {
        if n_c == 0 {
            return Err(Error::domain("A_s(N_c) needs N_c >= 1"));
        }
        if n_c.checked_add(s).is_none_or(|o| o > MAX_COEFFICIENT_ORDER) {
            return Err(Error::Overflow {
                n_c,
                s,
                limit: MAX_COEFFICIENT_ORDER,
            });
        }
        Ok(())
    }

    pub fn get(&self, n_c: u32, s: u32) -> Result<&BigInt> {
        Self::check(n_c, s)?;
        Ok(&self.exact[n_c as usize - 1][s as usize])
    }

    /// `A_s(N_c) / A_0(N_c)` as a double.
    pub fn ratio(&self, n_c: u32, s: u32) -> Result<f64> {
        Self::check(n_c, s)?;
        Ok(self.scaled[n_c as usize - 1][s as usize])
    }
}

/// `A_s(N_c)` in exact integer arithmetic.
pub fn a_coefficient(n_c: u32, s: u32) -> Result<BigInt> {
    CoefficientTable::global().get(n_c, s).cloned()
}

/// `P(N_c)` with its logarithm, so tails stay inspectable after the value
/// underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterProbability {
    pub n_c: u32,
    pub value: f64,
    pub ln_value: f64,
    pub underflow: bool,
}

/// Exact `P(N_c)` for `N_c ≥ 1`.
///
/// The `s`-series stops once two consecutive terms are below
/// `trunc.abs_tol` relative to the running sum.
pub fn p_exact(n_c: u32, m: &AnnulusModulus, trunc: &Truncation) -> Result<ClusterProbability> {
    if n_c == 0 {
        return Err(Error::domain(
            "P(0) is defined by complement; use distribution()",
        ));
    }
    let table = CoefficientTable::global();
    let qt = m.q_tilde();
    let n = n_c as f64;

    // Σ_s (A_s/A_0) q̃^{(2 N_c s + s²)/3}, leading term 1.
    let mut series = CompensatedSum::default();
    series.add(1.0);
    let mut quiet = 0;
    let mut s: u32 = 1;
    loop {
        if s as usize > trunc.max_terms {
            return Err(Error::TruncationExceeded {
                what: "P(N_c) series",
                max_terms: trunc.max_terms,
            });
        }
        let ratio = table.ratio(n_c, s)?;
        let sf = s as f64;
        let term = ratio * qt.power_or_zero((2.0 * n * sf + sf * sf) / 3.0);
        series.add(term);
        if term.abs() < trunc.abs_tol * series.value().abs() {
            quiet += 1;
            if quiet == 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        s += 1;
    }

    let sum = series.value();
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::domain(format!(
            "P({n_c}) series lost all precision at rho = {}",
            m.rho()
        )));
    }
    let ln_value = (n - 0.5) * 3f64.ln() + (4.0 * n * n - 1.0) / 12.0 * qt.ln()
        - ln_q_tilde_product(m, trunc)?
        + sum.ln();
    let underflow = ln_value < LN_MIN_POSITIVE;
    let value = if underflow { 0.0 } else { ln_value.exp() };
    Ok(ClusterProbability {
        n_c,
        value,
        ln_value,
        underflow,
    })
}

/// First term of the `s`-series: `3^{N_c−½} q̃^{(4N_c²−1)/12}`.
pub fn leading_order_pn(n_c: u32, m: &AnnulusModulus) -> Result<f64> {
    if n_c == 0 {
        return Err(Error::domain("leading-order P(N_c) needs N_c >= 1"));
    }
    let n = n_c as f64;
    Ok(((n - 0.5) * 3f64.ln() + (4.0 * n * n - 1.0) / 12.0 * m.q_tilde().ln()).exp())
}

/// `P(0), …, P(n_max)` together with a bound on `Σ_{N_c > n_max} P(N_c)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingDistribution {
    pub p: Vec<f64>,
    pub tail_bound: f64,
    pub crossing: f64,
    #[serde(skip)]
    pub modulus: AnnulusModulus,
}

impl CrossingDistribution {
    pub fn n_max(&self) -> usize {
        self.p.len() - 1
    }

    /// `Σ_{N_c=1}^{n_max} P(N_c)`.
    pub fn spanning_mass(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        self.p[1..].iter().for_each(|&v| acc.add(v));
        acc.value()
    }
}

pub fn distribution(
    m: &AnnulusModulus,
    n_max: u32,
    trunc: &Truncation,
) -> Result<CrossingDistribution> {
    if n_max == 0 || n_max > MAX_DISTRIBUTION_ORDER {
        return Err(Error::domain(format!(
            "n_max must be in 1..={MAX_DISTRIBUTION_ORDER}, got {n_max}"
        )));
    }
    let crossing = crossing_probability(m, CrossingForm::Auto, trunc)?;
    let mut p = Vec::with_capacity(n_max as usize + 1);
    p.push(1.0 - crossing);
    for n_c in 1..=n_max {
        p.push(p_exact(n_c, m, trunc)?.value);
    }

    // P(N+1)/P(N) shrinks with N, so once it is below 1 the omitted tail is
    // dominated by a geometric series seeded with the first omitted term.
    let first = p_exact(n_max + 1, m, trunc)?.value;
    let second = p_exact(n_max + 2, m, trunc)?.value;
    let tail_bound = if first == 0.0 {
        0.0
    } else if second < first {
        first / (1.0 - second / first)
    } else {
        let mut acc = CompensatedSum::default();
        p[1..].iter().for_each(|&v| acc.add(v));
        (1.0 - acc.value()).max(first)
    };

    Ok(CrossingDistribution {
        p,
        tail_bound,
        crossing,
        modulus: *m,
    })
}

/// `E[N_c] = Σ_{N_c≥1} N_c P(N_c)`.
pub fn mean_spanning_clusters(m: &AnnulusModulus, trunc: &Truncation) -> Result<f64> {
    Ok(spanning_moments(m, trunc)?.0)
}

/// `E[N_c]` and `Var[N_c]`.
pub fn spanning_moments(m: &AnnulusModulus, trunc: &Truncation) -> Result<(f64, f64)> {
    let mut first = CompensatedSum::default();
    let mut second = CompensatedSum::default();
    let mut previous = 0.0;
    let mut quiet = 0;
    for n_c in 1..=MAX_COEFFICIENT_ORDER - 2 {
        let n = n_c as f64;
        let p = p_exact(n_c, m, trunc)?.value;
        first.add(n * p);
        second.add(n * n * p);
        // the N_c² P(N_c) terms decay last
        let term = n * n * p;
        let past_mode = term <= previous;
        if past_mode && term < trunc.abs_tol * second.value() {
            quiet += 1;
            if quiet == 2 {
                let mean = first.value();
                return Ok((mean, second.value() - mean * mean));
            }
        } else {
            quiet = 0;
        }
        previous = term;
    }
    Err(Error::TruncationExceeded {
        what: "spanning-cluster moment sums",
        max_terms: (MAX_COEFFICIENT_ORDER - 2) as usize,
    })
}

/// Sign and magnitude checks shared by tests and the acceptance suite.
pub fn coefficient_sign_ok(n_c: u32, s: u32) -> Result<bool> {
    let a = a_coefficient(n_c, s)?;
    Ok(if s.is_multiple_of(2) {
        a.is_positive()
    } else {
        a.is_negative()
    })
}
