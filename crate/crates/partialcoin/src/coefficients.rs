//! Binomial-type coefficient sequences.
//!
//! Everything here is a recurrence over |binomial(α, n)|: the Sibuya weights
//! w̃ₙ, the signed partial-coin probabilities pₙ = 2^-μ binomial(μ, n), their
//! biased variant, and the Catalan closed form for the half-coin. Recurrences
//! are used instead of gamma-function quotients so the sequences stay finite
//! in IEEE doubles for arbitrarily many terms.

use crate::error::Error;

/// Absolute binomial coefficients |binomial(α, n)| for n = 1..=N.
///
/// These are simultaneously the Sibuya(α) probability masses.
#[derive(Debug, Clone, PartialEq)]
pub struct SibuyaWeights {
    alpha: f64,
    w: Vec<f64>,
}

impl SibuyaWeights {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_terms(&self) -> usize {
        self.w.len()
    }

    /// Slice of weights; index i holds w̃ᵢ₊₁.
    pub fn values(&self) -> &[f64] {
        &self.w
    }

    /// w̃ₙ for 1-based n.
    pub fn weight(&self, n: usize) -> f64 {
        self.w[n - 1]
    }

    /// Partial sum Σ w̃ₙ over the truncation (the Sibuya CDF value F_N).
    pub fn partial_sum(&self) -> f64 {
        self.w.iter().sum()
    }
}

/// Truncated signed coefficient sequence of a partial-coin generating
/// function; `coeffs[n]` holds pₙ for n = 0..=n_terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPmf {
    mu: f64,
    coeffs: Vec<f64>,
}

impl SignedPmf {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    #[cfg(test)]
    pub(crate) fn coeffs_mut(&mut self) -> &mut Vec<f64> {
        &mut self.coeffs
    }
}

fn check_alpha(alpha: f64, name: &str) -> Result<(), Error> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!(
            "{name} must be in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

fn check_terms(n_terms: usize) -> Result<(), Error> {
    if n_terms == 0 {
        return Err(Error::domain("n_terms must be at least 1"));
    }
    Ok(())
}

/// Sibuya weights w̃₁..w̃_N by the binomial ratio recurrence
/// w̃₁ = α, w̃ₙ₊₁ = w̃ₙ (1 − (α + 1)/(n + 1)).
pub fn sibuya_weights(alpha: f64, n_terms: usize) -> Result<SibuyaWeights, Error> {
    check_alpha(alpha, "alpha")?;
    check_terms(n_terms)?;
    let mut w = Vec::with_capacity(n_terms);
    w.push(alpha);
    for n in 1..n_terms {
        let prev = w[n - 1];
        w.push(prev * (1.0 - (alpha + 1.0) / (n as f64 + 1.0)));
    }
    Ok(SibuyaWeights { alpha, w })
}

/// Signed probabilities of the μ-th coin: p₀ = 2^-μ and
/// pₙ = 2^-μ (−1)ⁿ⁺¹ w̃ₙ for n ≥ 1.
pub fn partial_coin_pmf(mu: f64, n_terms: usize) -> Result<SignedPmf, Error> {
    check_alpha(mu, "mu")?;
    check_terms(n_terms)?;
    let weights = sibuya_weights(mu, n_terms)?;
    let scale = 2f64.powf(-mu);
    let mut coeffs = Vec::with_capacity(n_terms + 1);
    coeffs.push(scale);
    let mut sign = 1.0;
    for &w in weights.values() {
        coeffs.push(sign * scale * w);
        sign = -sign;
    }
    Ok(SignedPmf { mu, coeffs })
}

/// Signed probabilities of the biased μ-th coin with generating function
/// (a + bx)^μ: pₙ = a^μ (b/a)ⁿ binomial(μ, n).
///
/// Takes raw a, b so the caller controls orientation; `a + b` is not
/// validated here.
pub fn biased_coin_pmf(a: f64, b: f64, mu: f64, n_terms: usize) -> Result<SignedPmf, Error> {
    check_alpha(mu, "mu")?;
    check_terms(n_terms)?;
    if !(a > 0.0 && a < 1.0) || !(b > 0.0 && b < 1.0) {
        return Err(Error::domain(format!(
            "a, b must be in (0, 1), got a={a}, b={b}"
        )));
    }
    let weights = sibuya_weights(mu, n_terms)?;
    let scale = a.powf(mu);
    let ratio = b / a;
    let mut coeffs = Vec::with_capacity(n_terms + 1);
    coeffs.push(scale);
    let mut sign = 1.0;
    let mut damp = 1.0;
    for &w in weights.values() {
        damp *= ratio;
        coeffs.push(sign * scale * damp * w);
        sign = -sign;
    }
    Ok(SignedPmf { mu, coeffs })
}

/// Half-coin probabilities through the Catalan closed form
/// pₙ = (−1)ⁿ⁻¹ √2 Cₙ₋₁ / 4ⁿ with C₋₁ = −1/2.
///
/// The scaled quantity Cₙ₋₁/4ⁿ is advanced by the Catalan recurrence
/// Cₙ = Cₙ₋₁ · 2(2n − 1)/(n + 1) folded with the 1/4 step, so nothing
/// overflows no matter how many terms are requested.
pub fn catalan_pmf(n_terms: usize) -> SignedPmf {
    let root2 = std::f64::consts::SQRT_2;
    let mut coeffs = Vec::with_capacity(n_terms + 1);
    // n = 0: (−1)^-1 √2 (−1/2) / 1 = √2 / 2.
    coeffs.push(root2 / 2.0);
    if n_terms >= 1 {
        // scaled = Cₙ₋₁ / 4ⁿ, starting at C₀/4.
        let mut scaled = 0.25;
        coeffs.push(root2 * scaled);
        for n in 1..n_terms {
            let nf = n as f64;
            scaled *= 2.0 * (2.0 * nf - 1.0) / (nf + 1.0) / 4.0;
            // Pushing p_{n+1}, whose sign is (−1)ⁿ.
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            coeffs.push(sign * root2 * scaled);
        }
    }
    SignedPmf { mu: 0.5, coeffs }
}

/// (Σ pₙ, Σ |pₙ|) over the truncation.
pub fn signed_sums(pmf: &SignedPmf) -> (f64, f64) {
    let sum = pmf.coeffs.iter().sum();
    let abs_sum = pmf.coeffs.iter().map(|p| p.abs()).sum();
    (sum, abs_sum)
}
