//! The Sibuya distribution: first-success index of Bernoulli trials whose
//! k-th trial succeeds with probability α/k.
//!
//! Its PMF values are exactly the absolute binomial coefficients
//! |binomial(α, k)|, its mean is infinite for α < 1, and its tail decays
//! like k^-α. Two samplers are provided so they can cross-validate each
//! other: the definitional trial-by-trial sampler and inverse-CDF sampling
//! over a truncated cumulative table.

use crate::coefficients::SibuyaWeights;
use crate::error::Error;
use crate::rng::CounterRng;
use crate::stats::ln_gamma;

/// Default trial cap for [`SibuyaDist::sample_direct`].
pub const DEFAULT_K_MAX: u64 = 1_000_000_000;

/// Sibuya distribution with parameter 0 < α < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SibuyaDist {
    alpha: f64,
}

impl SibuyaDist {
    pub fn new(alpha: f64) -> Result<Self, Error> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// P(Y = k) by the stable recurrence p₁ = α, p_{k+1} = p_k (k − α)/(k + 1).
    pub fn pmf(&self, k: u64) -> Result<f64, Error> {
        check_k(k)?;
        let mut p = self.alpha;
        for j in 1..k {
            p *= (j as f64 - self.alpha) / (j as f64 + 1.0);
        }
        Ok(p)
    }

    /// P(Y <= k) through the tail recurrence t₀ = 1, t_k = t_{k−1} (k − α)/k.
    pub fn cdf(&self, k: u64) -> Result<f64, Error> {
        check_k(k)?;
        Ok(1.0 - self.tail(k))
    }

    /// P(Y > k); the complement of [`Self::cdf`], exposed because the tail
    /// is the better-conditioned quantity far out.
    pub fn tail(&self, k: u64) -> f64 {
        let mut t = 1.0;
        for j in 1..=k {
            t *= (j as f64 - self.alpha) / j as f64;
        }
        t
    }

    /// Closed-form CDF 1 − Γ(k − α + 1) / (k Γ(k) Γ(1 − α)), evaluated in
    /// log space. Verification path only: agrees with [`Self::cdf`] but is
    /// slower and subject to gamma cancellation.
    pub fn cdf_via_ln_gamma(&self, k: u64) -> Result<f64, Error> {
        check_k(k)?;
        let kf = k as f64;
        let log_tail =
            ln_gamma(kf - self.alpha + 1.0) - kf.ln() - ln_gamma(kf) - ln_gamma(1.0 - self.alpha);
        Ok(1.0 - log_tail.exp())
    }

    /// First `n` PMF values p₁..p_n in one pass.
    pub fn pmf_sequence(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut p = self.alpha;
        for j in 1..=n {
            if j > 1 {
                p *= (j as f64 - 1.0 - self.alpha) / j as f64;
            }
            out.push(p);
        }
        out
    }

    /// Definitional sampler: run the Bernoulli trials until the first
    /// success and return its index. `None` means no success within `k_max`
    /// trials (the variable is heavy-tailed, so a cap is mandatory); the
    /// caller decides what a truncated draw means.
    pub fn sample_direct(&self, rng: &mut CounterRng, k_max: u64) -> Option<u64> {
        (1..=k_max).find(|&k| rng.next_open01() < self.alpha / k as f64)
    }
}

fn check_k(k: u64) -> Result<(), Error> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(())
}

/// Cumulative table of Sibuya weights for inverse-CDF sampling.
#[derive(Debug, Clone)]
pub struct SibuyaInvCdf {
    cumulative: Vec<f64>,
}

impl SibuyaInvCdf {
    pub fn from_weights(weights: &SibuyaWeights) -> Self {
        let mut cumulative = Vec::with_capacity(weights.n_terms());
        let mut acc = 0.0;
        for &w in weights.values() {
            acc += w;
            cumulative.push(acc);
        }
        Self { cumulative }
    }

    /// Smallest k with F_k >= u, by bisection over the cumulative table.
    /// `None` is a tail event: u lies beyond the truncated range.
    pub fn sample_invcdf(&self, u: f64) -> Result<Option<u64>, Error> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("u must be in (0, 1), got {u}")));
        }
        let idx = self.cumulative.partition_point(|&f| f < u);
        if idx == self.cumulative.len() {
            Ok(None)
        } else {
            Ok(Some(idx as u64 + 1))
        }
    }

    pub fn truncated_mass(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }
}
