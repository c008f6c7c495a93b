//! Sparse quadratic-exponent sums and Euler products.
//!
//! Every closed form in this crate is a ratio of bilateral sums
//! `Σ_{r∈ℤ} ± q^{a r² + b r + c}` and products `∏ (1 − q^{k n})`. The nome is
//! carried through its logarithm so that nomes whose value would underflow a
//! double (or sit within an ulp of 1) are still usable.

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Natural log of the smallest positive normal double.
const LN_MIN_NORMAL: f64 = -708.396_418_532_264_1;

/// A nome `q ∈ (0, 1)`, stored as `ln q`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Nome {
    ln: f64,
}

impl Nome {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::domain(format!("nome {value} is outside (0, 1)")));
        }
        Ok(Nome { ln: value.ln() })
    }

    /// Builds a nome from `ln q`, which must be finite and negative.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if !(ln.is_finite() && ln < 0.0) {
            return Err(Error::domain(format!(
                "log-nome {ln} is not finite and negative"
            )));
        }
        Ok(Nome { ln })
    }

    /// `q`. May round to 0 for extremely small nomes; use [`Nome::ln`] then.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// `q^k` for `k > 0`.
    pub fn pow(self, k: f64) -> Nome {
        debug_assert!(k > 0.0);
        Nome { ln: self.ln * k }
    }

    /// `q^e`, flushed to exactly zero below the normal range.
    pub fn power_or_zero(self, exponent: f64) -> f64 {
        let ln_term = exponent * self.ln;
        if ln_term < LN_MIN_NORMAL {
            0.0
        } else {
            ln_term.exp()
        }
    }
}

/// Series evaluation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            abs_tol: 1e-15,
            max_terms: 10_000,
        }
    }
}

impl Truncation {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::domain(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::domain("max_terms must be at least 1"));
        }
        Ok(Truncation { abs_tol, max_terms })
    }
}

/// `Σ_{r∈ℤ} (±1)^r q^{a r² + b r + c}` with exact rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticSeries {
    a: Ratio<i64>,
    b: Ratio<i64>,
    c: Ratio<i64>,
    alternating: bool,
}

impl QuadraticSeries {
    pub fn new(a: Ratio<i64>, b: Ratio<i64>, c: Ratio<i64>) -> Result<Self> {
        if a <= Ratio::from_integer(0) {
            return Err(Error::domain(format!(
                "quadratic coefficient {a} must be positive"
            )));
        }
        Ok(QuadraticSeries {
            a,
            b,
            c,
            alternating: false,
        })
    }

    /// Shorthand for `a r² + b r + c_num/c_den` with integer `a`, `b`.
    pub fn integral(a: i64, b: i64, c_num: i64, c_den: i64) -> Result<Self> {
        if c_den == 0 {
            return Err(Error::domain("zero denominator in constant offset"));
        }
        Self::new(
            Ratio::from_integer(a),
            Ratio::from_integer(b),
            Ratio::new(c_num, c_den),
        )
    }

    /// Each term picks up a factor `(−1)^r`.
    pub fn alternating(mut self) -> Self {
        self.alternating = true;
        self
    }

    /// Exponent of the `r`-th term, exact until the final conversion.
    pub fn exponent(&self, r: i64) -> f64 {
        let r = Ratio::from_integer(r);
        let e = self.a * r * r + self.b * r + self.c;
        e.to_f64().expect("rational exponent converts to f64")
    }

    fn sign(&self, r: i64) -> f64 {
        if self.alternating && r.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Location of the exponent minimum, `−b / 2a`.
    fn vertex(&self) -> f64 {
        (-self.b / (self.a * 2)).to_f64().unwrap_or(0.0)
    }
}

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Evaluates a [`QuadraticSeries`] at `nome`, accumulating `r = 0, ±1, ±2, …`
/// until both of the next terms fall below `trunc.abs_tol` on the decaying
/// side of the exponent's minimum.
pub fn bilateral_sum(series: &QuadraticSeries, nome: Nome, trunc: &Truncation) -> Result<f64> {
    weighted_bilateral_sum(series, nome, trunc, |r| series.sign(r))
}

/// Like [`bilateral_sum`] with an extra per-term weight `w(r)`, `|w(r)| ≤ 1`.
/// The alternating flag of `series` is ignored; fold it into `weight`.
pub fn weighted_bilateral_sum(
    series: &QuadraticSeries,
    nome: Nome,
    trunc: &Truncation,
    weight: impl Fn(i64) -> f64,
) -> Result<f64> {
    let vertex = series.vertex();
    let magnitude = |r: i64| nome.power_or_zero(series.exponent(r));
    let mut acc = CompensatedSum::default();

    acc.add(weight(0) * magnitude(0));
    for radius in 1..=trunc.max_terms as i64 {
        acc.add(weight(radius) * magnitude(radius));
        acc.add(weight(-radius) * magnitude(-radius));

        let next = radius + 1;
        let decaying = next as f64 >= vertex.abs();
        if decaying && magnitude(next) < trunc.abs_tol && magnitude(-next) < trunc.abs_tol {
            return Ok(acc.value());
        }
    }
    Err(Error::TruncationExceeded {
        what: "bilateral sum",
        max_terms: trunc.max_terms,
    })
}

/// Number of factors `N` after which the omitted tail `∏_{n>N}(1 − xⁿ)` is
/// within `abs_tol` of 1, using `−ln ∏_{n>N} ≤ x^{N+1} / ((1 − x)(1 − x^{N+1}))`.
fn product_factors(x: Nome, trunc: &Truncation) -> Result<usize> {
    let one_minus_x = -x.ln().exp_m1();
    for n in 1..=trunc.max_terms {
        let lead = x.power_or_zero((n + 1) as f64);
        let tail = lead / (one_minus_x * (1.0 - lead));
        if tail < trunc.abs_tol {
            return Ok(n);
        }
    }
    Err(Error::TruncationExceeded {
        what: "Euler product",
        max_terms: trunc.max_terms,
    })
}

/// `∏_{n≥1} (1 − nome^{step·n})`.
pub fn euler_product(nome: Nome, step: u32, trunc: &Truncation) -> Result<f64> {
    if step == 0 {
        return Err(Error::domain("product step must be at least 1"));
    }
    let x = nome.pow(step as f64);
    let factors = product_factors(x, trunc)?;
    let mut product = 1.0;
    for n in 1..=factors {
        product *= 1.0 - x.power_or_zero(n as f64);
    }
    Ok(product)
}

/// `ln ∏_{n≥1} (1 − nome^{step·n})`, accumulated as a compensated sum of
/// `ln(1 − x^n)`.
pub fn ln_euler_product(nome: Nome, step: u32, trunc: &Truncation) -> Result<f64> {
    if step == 0 {
        return Err(Error::domain("product step must be at least 1"));
    }
    let x = nome.pow(step as f64);
    let factors = product_factors(x, trunc)?;
    let mut acc = CompensatedSum::default();
    for n in 1..=factors {
        acc.add((-x.power_or_zero(n as f64)).ln_1p());
    }
    Ok(acc.value())
}

/// Dedekind eta on the imaginary axis: `q^{1/24} ∏ (1 − qⁿ)`.
pub fn dedekind_eta(nome: Nome, trunc: &Truncation) -> Result<f64> {
    Ok(nome.power_or_zero(1.0 / 24.0) * euler_product(nome, 1, trunc)?)
}

/// `ln η`, usable when `q^{1/24}` underflows.
pub fn ln_dedekind_eta(nome: Nome, trunc: &Truncation) -> Result<f64> {
    Ok(nome.ln() / 24.0 + ln_euler_product(nome, 1, trunc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tight() -> Truncation {
        Truncation::default()
    }

    fn pentagonal_sum(q: Nome) -> f64 {
        let plus = QuadraticSeries::integral(6, 1, 0, 1).unwrap();
        let minus = QuadraticSeries::integral(6, 5, 1, 1).unwrap();
        bilateral_sum(&plus, q, &tight()).unwrap() - bilateral_sum(&minus, q, &tight()).unwrap()
    }

    // Oracle: plain truncated product, no tolerance logic.
    fn naive_product(q: f64, step: u32, factors: u32) -> f64 {
        (1..=factors)
            .map(|n| 1.0 - q.powi((step * n) as i32))
            .product()
    }

    #[test]
    fn nome_rejects_boundary_values() {
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(Nome::new(bad), Err(Error::Domain(_))), "{bad}");
        }
        assert!(Nome::from_ln(0.0).is_err());
        assert!(Nome::from_ln(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn truncation_validation() {
        assert!(Truncation::new(0.0, 10).is_err());
        assert!(Truncation::new(1e-12, 0).is_err());
        assert!(Truncation::new(1e-12, 1).is_ok());
    }

    #[test]
    fn series_requires_positive_quadratic_coefficient() {
        assert!(QuadraticSeries::integral(0, 1, 0, 1).is_err());
        assert!(QuadraticSeries::integral(-3, 1, 0, 1).is_err());
    }

    #[test]
    fn small_nome_keeps_only_the_central_term() {
        let s = QuadraticSeries::integral(12, 2, 0, 1).unwrap();
        let v = bilateral_sum(&s, Nome::new(1e-8).unwrap(), &tight()).unwrap();
        // r = −1 contributes q^{10}, negligible.
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn central_term_dominates_at_q_tilde_of_unit_modulus() {
        let s = QuadraticSeries::integral(12, 4, 1, 4).unwrap();
        let q = Nome::from_ln(-2.0 * PI).unwrap();
        let v = bilateral_sum(&s, q, &tight()).unwrap();
        let direct: f64 = (-5..=5i32)
            .map(|r| (-2.0 * PI * (12.0 * (r * r) as f64 + 4.0 * r as f64 + 0.25)).exp())
            .sum();
        assert!((v - direct).abs() < 1e-16);
        assert!((v - 0.20788).abs() < 1e-4);
    }

    #[test]
    fn pentagonal_theorem() {
        for q in [0.01, 0.1, 0.3, 0.6] {
            let nome = Nome::new(q).unwrap();
            let sum = pentagonal_sum(nome);
            let prod = euler_product(nome, 1, &tight()).unwrap();
            assert!(
                ((sum - prod) / prod).abs() < 1e-12,
                "q={q}: {sum} vs {prod}"
            );
        }
    }

    #[test]
    fn pentagonal_theorem_near_one_is_limited_by_cancellation() {
        // At q = 0.9 the two sums are O(1) while their difference is 1.3e-6,
        // so double precision only resolves the identity in absolute terms.
        let nome = Nome::new(0.9).unwrap();
        let sum = pentagonal_sum(nome);
        let prod = euler_product(nome, 1, &tight()).unwrap();
        assert!((sum - prod).abs() < 2e-15, "{sum} vs {prod}");
        assert!(((sum - prod) / prod).abs() < 1e-9);
    }

    #[test]
    fn pentagonal_theorem_against_naive_product() {
        let prod = naive_product(0.1, 1, 40);
        assert!((pentagonal_sum(Nome::new(0.1).unwrap()) - prod).abs() < 1e-14);
        assert!(
            (euler_product(Nome::new(0.1).unwrap(), 1, &tight()).unwrap() - prod).abs() < 1e-14
        );
    }

    #[test]
    fn product_of_tiny_nome_is_first_factor() {
        let v = euler_product(Nome::new(1e-8).unwrap(), 1, &tight()).unwrap();
        assert!((v - (1.0 - 1e-8)).abs() < 1e-16);
    }

    #[test]
    fn product_direct_and_log_paths_agree() {
        let nome = Nome::new(0.5).unwrap();
        let direct = euler_product(nome, 2, &tight()).unwrap();
        let via_log = ln_euler_product(nome, 2, &tight()).unwrap().exp();
        assert!((direct - via_log).abs() < 1e-13);
        assert!((direct - naive_product(0.5, 2, 60)).abs() < 1e-15);
    }

    #[test]
    fn product_step_zero_rejected() {
        assert!(euler_product(Nome::new(0.5).unwrap(), 0, &tight()).is_err());
    }

    #[test]
    fn product_near_one_exceeds_cap() {
        let nome = Nome::from_ln(-1e-9).unwrap();
        assert!(matches!(
            euler_product(nome, 1, &tight()),
            Err(Error::TruncationExceeded { .. })
        ));
        let s = QuadraticSeries::integral(6, 1, 0, 1).unwrap();
        assert!(matches!(
            bilateral_sum(&s, nome, &tight()),
            Err(Error::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn eta_of_tiny_nome() {
        let v = dedekind_eta(Nome::new(1e-24).unwrap(), &tight()).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn eta_modular_fixed_point_and_inversion() {
        // η(iρ) = ρ^{-1/2} η(i/ρ)
        for rho in [0.5, 1.0, 2.0, 4.0] {
            let lhs = dedekind_eta(Nome::from_ln(-2.0 * PI * rho).unwrap(), &tight()).unwrap();
            let rhs = dedekind_eta(Nome::from_ln(-2.0 * PI / rho).unwrap(), &tight()).unwrap()
                / f64::sqrt(rho);
            assert!(
                ((lhs - rhs) / lhs).abs() < 1e-12,
                "rho={rho}: {lhs} vs {rhs}"
            );
        }
        let two_i = dedekind_eta(Nome::from_ln(-4.0 * PI).unwrap(), &tight()).unwrap();
        let half_i = dedekind_eta(Nome::from_ln(-PI).unwrap(), &tight()).unwrap();
        assert!((two_i - half_i / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn log_eta_survives_underflow() {
        let nome = Nome::from_ln(-30_000.0).unwrap();
        assert_eq!(dedekind_eta(nome, &tight()).unwrap(), 0.0);
        assert!((ln_dedekind_eta(nome, &tight()).unwrap() + 1250.0).abs() < 1e-12);
    }

    #[test]
    fn alternating_signs() {
        // Σ (−1)^r q^{r²} at tiny q is 1 − 2q.
        let s = QuadraticSeries::integral(1, 0, 0, 1).unwrap().alternating();
        let v = bilateral_sum(&s, Nome::new(1e-6).unwrap(), &tight()).unwrap();
        assert!((v - (1.0 - 2e-6)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn positive_sums_increase_with_nome(q1 in 0.01f64..0.95, dq in 1e-4f64..0.04) {
            let s = QuadraticSeries::integral(6, 3, 1, 3).unwrap();
            let lo = bilateral_sum(&s, Nome::new(q1).unwrap(), &tight()).unwrap();
            let hi = bilateral_sum(&s, Nome::new(q1 + dq).unwrap(), &tight()).unwrap();
            prop_assert!(hi > lo);
        }

        #[test]
        fn halving_tolerance_stays_within_previous_tolerance(
            q in 0.01f64..0.97,
            tol_exp in 3i32..14,
        ) {
            let tol = 10f64.powi(-tol_exp);
            let coarse = Truncation::new(tol, 10_000).unwrap();
            let fine = Truncation::new(tol / 2.0, 10_000).unwrap();
            let nome = Nome::new(q).unwrap();
            let s = QuadraticSeries::integral(12, 8, 5, 4).unwrap();
            let a = bilateral_sum(&s, nome, &coarse).unwrap();
            let b = bilateral_sum(&s, nome, &fine).unwrap();
            prop_assert!((a - b).abs() <= tol);
            let pa = euler_product(nome, 2, &coarse).unwrap();
            let pb = euler_product(nome, 2, &fine).unwrap();
            prop_assert!((pa - pb).abs() <= tol);
        }
    }
}
