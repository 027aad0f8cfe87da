//! Decomposition of a signed partial-coin distribution into a pair of
//! ordinary nonnegative distributions.
//!
//! The signed series f (the μ-th coin) is not samplable on its own, but it
//! satisfies f·g = h for a pair of nonnegative generating functions: g is a
//! shifted Sibuya series, h is the product, and both have support
//! {k+1, k+2, ...} for shift parameter k ≥ −1. The biased variants ĝ, ĥ are
//! defective — their total mass is c = 1 − ((a − b)/a)^μ < 1 — and are kept
//! unnormalized on purpose; the missing mass surfaces as tail events during
//! sampling.

use crate::coefficients::{self, SignedPmf};
use crate::error::Error;

/// Truncated nonnegative (possibly defective) distribution on an integer
/// support starting at `support_offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegPmf {
    support_offset: i64,
    probs: Vec<f64>,
    total_mass: f64,
}

impl NonnegPmf {
    pub fn support_offset(&self) -> i64 {
        self.support_offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Analytic mass of the untruncated distribution (1 for the unbiased
    /// constructions, the defect c for the biased ones).
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn partial_sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// (support value, probability) pairs.
    pub fn support_iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.support_offset + i as i64, p))
    }
}

/// A matched (f, g, h, shift) triple with f·g = h on truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub f: SignedPmf,
    pub g: NonnegPmf,
    pub h: NonnegPmf,
    pub shift: i64,
}

/// Validated configuration of a biased partial coin.
///
/// Construction normalizes orientation: inputs with a < b are swapped and
/// `swapped` records that the reported flips must be reflected (F̂ = 1 − F).
/// After normalization a > b holds and b is snapped to 1 − a exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedCoinSpec {
    a: f64,
    b: f64,
    mu: f64,
    swapped: bool,
}

impl BiasedCoinSpec {
    /// Tolerance on the raw inputs for a + b = 1.
    pub const SIDE_SUM_TOL: f64 = 1e-9;

    pub fn new(a: f64, b: f64, mu: f64) -> Result<Self, Error> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::domain(format!("mu must be in (0, 1], got {mu}")));
        }
        if !(a > 0.0 && a < 1.0) || !(b > 0.0 && b < 1.0) {
            return Err(Error::domain(format!(
                "a and b must be in (0, 1), got a={a}, b={b}"
            )));
        }
        if (a + b - 1.0).abs() > Self::SIDE_SUM_TOL {
            return Err(Error::domain(format!(
                "a + b must equal 1 (within {:e}), got {}",
                Self::SIDE_SUM_TOL,
                a + b
            )));
        }
        if a == b {
            return Err(Error::domain(
                "a = b is the fair partial coin; use the unbiased path",
            ));
        }
        let swapped = a < b;
        let a = if swapped { b } else { a };
        Ok(Self {
            a,
            b: 1.0 - a,
            mu,
            swapped,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }
}

fn check_shift(shift: i64) -> Result<(), Error> {
    if shift < -1 {
        return Err(Error::domain(format!("shift must be >= -1, got {shift}")));
    }
    Ok(())
}

/// g_k: the Sibuya(μ) series shifted by k. Probability w̃ₙ at support value
/// k + n; total mass 1 in the untruncated limit.
pub fn build_g(mu: f64, shift: i64, n_terms: usize) -> Result<NonnegPmf, Error> {
    check_shift(shift)?;
    let weights = coefficients::sibuya_weights(mu, n_terms)?;
    Ok(NonnegPmf {
        support_offset: shift + 1,
        probs: weights.values().to_vec(),
        total_mass: 1.0,
    })
}

/// h_k: coefficients of 2^-μ x^k ((1+x)^μ − (1−x²)^μ). At support value
/// k + m the coefficient is 2^-μ w̃ₘ for odd m and 2^-μ (w̃_{m/2} − w̃ₘ) for
/// even m; all positive because the weights decrease strictly.
pub fn build_h(mu: f64, shift: i64, n_terms: usize) -> Result<NonnegPmf, Error> {
    check_shift(shift)?;
    let weights = coefficients::sibuya_weights(mu, n_terms)?;
    let w = weights.values();
    let scale = 2f64.powf(-mu);
    let mut probs = Vec::with_capacity(n_terms);
    for m in 1..=n_terms {
        let q = if m % 2 == 1 {
            scale * w[m - 1]
        } else {
            scale * (w[m / 2 - 1] - w[m - 1])
        };
        probs.push(q);
    }
    Ok(NonnegPmf {
        support_offset: shift + 1,
        probs,
        total_mass: 1.0,
    })
}

/// ĝ_k for a biased coin: w̃ₙ (b/a)ⁿ at support value k + n. Defective with
/// total mass c = 1 − ((a − b)/a)^μ; decays geometrically at rate b/a.
pub fn build_biased_g(
    spec: &BiasedCoinSpec,
    shift: i64,
    n_terms: usize,
) -> Result<NonnegPmf, Error> {
    check_shift(shift)?;
    let weights = coefficients::sibuya_weights(spec.mu, n_terms)?;
    let ratio = spec.b / spec.a;
    let mut probs = Vec::with_capacity(n_terms);
    let mut damp = 1.0;
    for &w in weights.values() {
        damp *= ratio;
        probs.push(w * damp);
    }
    Ok(NonnegPmf {
        support_offset: shift + 1,
        probs,
        total_mass: defect_mass(spec),
    })
}

/// ĥ_k for a biased coin: a^μ (b/a)^m w̃ₘ at odd support positions m and
/// a^μ (b/a)^m (w̃_{m/2} − w̃ₘ) at even ones. Same defect mass c as ĝ_k —
/// an identity that relies on a + b = 1.
pub fn build_biased_h(
    spec: &BiasedCoinSpec,
    shift: i64,
    n_terms: usize,
) -> Result<NonnegPmf, Error> {
    check_shift(shift)?;
    let weights = coefficients::sibuya_weights(spec.mu, n_terms)?;
    let w = weights.values();
    let scale = spec.a.powf(spec.mu);
    let ratio = spec.b / spec.a;
    let mut probs = Vec::with_capacity(n_terms);
    let mut damp = 1.0;
    for m in 1..=n_terms {
        damp *= ratio;
        let q = if m % 2 == 1 {
            scale * damp * w[m - 1]
        } else {
            scale * damp * (w[m / 2 - 1] - w[m - 1])
        };
        probs.push(q);
    }
    Ok(NonnegPmf {
        support_offset: shift + 1,
        probs,
        total_mass: defect_mass(spec),
    })
}

/// Defect mass c = ĝ(1) = ĥ(1) = 1 − ((a − b)/a)^μ.
pub fn defect_mass(spec: &BiasedCoinSpec) -> f64 {
    1.0 - ((spec.a - spec.b) / spec.a).powf(spec.mu)
}

/// Full unbiased decomposition (f, g, h) at the given shift and truncation.
pub fn decompose(mu: f64, shift: i64, n_terms: usize) -> Result<Decomposition, Error> {
    Ok(Decomposition {
        f: coefficients::partial_coin_pmf(mu, n_terms)?,
        g: build_g(mu, shift, n_terms)?,
        h: build_h(mu, shift, n_terms)?,
        shift,
    })
}

/// Full biased decomposition (f̂, ĝ, ĥ) at the given shift and truncation.
pub fn decompose_biased(
    spec: &BiasedCoinSpec,
    shift: i64,
    n_terms: usize,
) -> Result<Decomposition, Error> {
    Ok(Decomposition {
        f: coefficients::biased_coin_pmf(spec.a, spec.b, spec.mu, n_terms)?,
        g: build_biased_g(spec, shift, n_terms)?,
        h: build_biased_h(spec, shift, n_terms)?,
        shift,
    })
}

/// Checks the defining identity f·g = h coefficient-wise within `tol`,
/// over every index where the truncated convolution is fully determined.
pub fn verify_product(d: &Decomposition, tol: f64) -> Result<bool, Error> {
    if d.g.support_offset != d.h.support_offset {
        return Err(Error::config(format!(
            "g and h support offsets differ: {} vs {}",
            d.g.support_offset, d.h.support_offset
        )));
    }
    if d.g.len() != d.h.len() {
        return Err(Error::config(format!(
            "g and h truncation lengths differ: {} vs {}",
            d.g.len(),
            d.h.len()
        )));
    }
    let f = d.f.coeffs();
    let g = d.g.probs();
    let h = d.h.probs();
    // Coefficient of x^{k+m} in f·g_k is Σ_{j=1..m} g_j f_{m−j}; it is fully
    // determined when f carries indices up to m − 1.
    let m_max = h.len().min(f.len());
    if m_max == 0 {
        return Err(Error::config("empty truncation"));
    }
    for m in 1..=m_max {
        let mut conv = 0.0;
        for j in 1..=m {
            conv += g[j - 1] * f[m - j];
        }
        if (conv - h[m - 1]).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_is_shifted_sibuya() {
        let g = build_g(0.5, -1, 4).unwrap();
        assert_eq!(g.support_offset(), 0);
        assert_eq!(g.probs(), &[0.5, 0.125, 0.0625, 0.0390625]);

        let g1 = build_g(0.5, 0, 2).unwrap();
        assert_eq!(g1.support_offset(), 1);
        assert_eq!(g1.probs(), &[0.5, 0.125]);
    }

    #[test]
    fn g_for_mu_one_is_point_mass() {
        let g = build_g(1.0, -1, 3).unwrap();
        assert_eq!(g.support_offset(), 0);
        assert_eq!(g.probs()[0], 1.0);
        assert_eq!(g.probs()[1], 0.0);
    }

    #[test]
    fn h_head_coefficients_for_half_coin() {
        let h = build_h(0.5, -1, 4).unwrap();
        let p = h.probs();
        // 2^-1/2 · 0.5; 2^-1/2 (0.5 − 0.125); 2^-1/2 · 0.0625;
        // 2^-1/2 (0.125 − 0.0390625).
        assert!((p[0] - 0.353_553_390_593_273_8).abs() < 1e-12);
        assert!((p[1] - 0.265_165_042_944_955_3).abs() < 1e-12);
        assert!((p[2] - 0.044_194_173_824_159_22).abs() < 1e-12);
        assert!((p[3] - 0.060_766_989_008_218_93).abs() < 1e-12);
    }

    #[test]
    fn h_coefficients_stay_positive_across_grid() {
        for mu in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            let h = build_h(mu, -1, 100_000).unwrap();
            assert!(
                h.probs().iter().all(|&q| q > 0.0),
                "nonpositive h coefficient at mu={mu}"
            );
        }
    }

    #[test]
    fn product_identity_holds_for_half_coin() {
        let d = decompose(0.5, -1, 200).unwrap();
        assert!(verify_product(&d, 1e-12).unwrap());
    }

    #[test]
    fn product_identity_detects_perturbation() {
        let mut d = decompose(0.5, -1, 200).unwrap();
        d.f.coeffs_mut()[3] += 1e-6;
        assert!(!verify_product(&d, 1e-9).unwrap());
    }

    #[test]
    fn product_identity_fair_coin_closed_form() {
        // ((1+x)/2) · x = (x + x²)/2.
        let d = decompose(1.0, -1, 10).unwrap();
        assert!(verify_product(&d, 1e-15).unwrap());
        assert_eq!(d.h.probs()[0], 0.5);
        assert_eq!(d.h.probs()[1], 0.5);
    }

    #[test]
    fn biased_fair_exponent_closed_form() {
        // μ = 1: ĝ = (b/a) x, ĥ = b x + (b²/a) x², both with mass b/a.
        let spec = BiasedCoinSpec::new(0.6, 0.4, 1.0).unwrap();
        let d = decompose_biased(&spec, -1, 10).unwrap();
        assert!(verify_product(&d, 1e-15).unwrap());
        let c = defect_mass(&spec);
        assert!((c - 0.4 / 0.6).abs() < 1e-12);
        assert!((d.g.probs()[0] - 0.4 / 0.6).abs() < 1e-12);
        assert!((d.h.probs()[0] - 0.4).abs() < 1e-12);
        assert!((d.h.probs()[1] - 0.16 / 0.6).abs() < 1e-12);
        assert!((d.g.partial_sum() - c).abs() < 1e-12);
        assert!((d.h.partial_sum() - c).abs() < 1e-12);
    }

    #[test]
    fn product_check_rejects_mismatched_lengths() {
        let mut d = decompose(0.5, -1, 50).unwrap();
        d.h = build_h(0.5, -1, 40).unwrap();
        assert!(verify_product(&d, 1e-12).is_err());
        let mut d = decompose(0.5, -1, 50).unwrap();
        d.h = build_h(0.5, 0, 50).unwrap();
        assert!(verify_product(&d, 1e-12).is_err());
    }

    #[test]
    fn biased_spec_normalizes_orientation() {
        let spec = BiasedCoinSpec::new(0.4, 0.6, 0.5).unwrap();
        assert!(spec.swapped());
        assert_eq!(spec.a(), 0.6);
        assert!((spec.a() + spec.b() - 1.0).abs() < 1e-15);

        let spec = BiasedCoinSpec::new(0.6, 0.4, 0.5).unwrap();
        assert!(!spec.swapped());
        assert_eq!(spec.a(), 0.6);
    }

    #[test]
    fn biased_spec_rejects_bad_sides() {
        assert!(BiasedCoinSpec::new(0.3, 0.6, 0.5).is_err());
        assert!(BiasedCoinSpec::new(0.5, 0.5, 0.5).is_err());
        assert!(BiasedCoinSpec::new(0.0, 1.0, 0.5).is_err());
        assert!(BiasedCoinSpec::new(0.6, 0.4, 0.0).is_err());
        assert!(BiasedCoinSpec::new(0.6, 0.4, 1.5).is_err());
    }

    #[test]
    fn biased_g_head_and_mass() {
        let spec = BiasedCoinSpec::new(0.6, 0.4, 0.5).unwrap();
        let g = build_biased_g(&spec, -1, 200).unwrap();
        // w̃₁ (b/a) = 0.5 · 2/3.
        assert!((g.probs()[0] - 0.333_333_333_333_333_3).abs() < 1e-15);
        let c = defect_mass(&spec);
        assert!((c - 0.422_649_730_810_374_2).abs() < 1e-12);
        assert!((g.partial_sum() - c).abs() < 1e-12);
    }

    #[test]
    fn biased_geometric_tail_convergence() {
        let spec = BiasedCoinSpec::new(0.9, 0.1, 0.5).unwrap();
        let c = defect_mass(&spec);
        assert!((c - 0.057_190_958_417_936_65).abs() < 1e-12);
        // Ratio b/a = 1/9: a short truncation already reaches the defect.
        let g = build_biased_g(&spec, -1, 20).unwrap();
        let bound = (1.0 / 9.0f64).powi(20) / (1.0 - 1.0 / 9.0);
        assert!((g.partial_sum() - c).abs() <= bound + 1e-15);
    }

    #[test]
    fn biased_h_head_and_mass_identity() {
        let spec = BiasedCoinSpec::new(0.6, 0.4, 0.5).unwrap();
        let h = build_biased_h(&spec, -1, 200).unwrap();
        // a^μ (b/a) w̃₁ = √0.6 · (2/3) · 0.5.
        assert!((h.probs()[0] - 0.258_198_889_747_161_3).abs() < 1e-12);
        assert!((h.partial_sum() - defect_mass(&spec)).abs() < 1e-12);
    }

    #[test]
    fn defect_mass_frozen_values() {
        let spec = BiasedCoinSpec::new(0.6, 0.4, 0.5).unwrap();
        assert!((defect_mass(&spec) - 0.422_649_730_810_374_2).abs() < 1e-12);
        // 1 − (4/7)^(3/4).
        let spec = BiasedCoinSpec::new(0.7, 0.3, 0.75).unwrap();
        assert!((defect_mass(&spec) - 0.342_763_818_916_798_3).abs() < 1e-12);
        // b → 0 degenerates to zero mass.
        let spec = BiasedCoinSpec::new(1.0 - 1e-6, 1e-6, 0.5).unwrap();
        assert!(defect_mass(&spec) < 1e-5);
        // a → 1/2 from above recovers full mass (the unbiased limit).
        let spec = BiasedCoinSpec::new(0.5 + 1e-7, 0.5 - 1e-7, 0.5).unwrap();
        assert!(defect_mass(&spec) > 0.999);
    }

    #[test]
    fn masses_approach_one_at_stable_tail_rate() {
        // Both truncated masses miss 1 by O(N^-μ): for μ = 1/2, N = 1e5 the
        // Sibuya tail is ≈ 1.78e-3.
        let n = 100_000;
        let g = build_g(0.5, -1, n).unwrap();
        let h = build_h(0.5, -1, n).unwrap();
        for pmf in [&g, &h] {
            let gap = 1.0 - pmf.partial_sum();
            assert!(gap > 0.0 && gap < 4e-3, "gap = {gap}");
        }
    }

    #[test]
    fn biased_product_identity() {
        let spec = BiasedCoinSpec::new(0.6, 0.4, 0.5).unwrap();
        for shift in [-1, 0, 3] {
            let d = decompose_biased(&spec, shift, 200).unwrap();
            assert!(verify_product(&d, 1e-12).unwrap(), "shift={shift}");
        }
    }

    #[test]
    fn shift_equivariance() {
        for shift in [0i64, 3] {
            let base = build_g(0.5, -1, 50).unwrap();
            let moved = build_g(0.5, shift, 50).unwrap();
            assert_eq!(moved.support_offset(), base.support_offset() + shift + 1);
            assert_eq!(moved.probs(), base.probs());

            let base = build_h(0.5, -1, 50).unwrap();
            let moved = build_h(0.5, shift, 50).unwrap();
            assert_eq!(moved.support_offset(), base.support_offset() + shift + 1);
            assert_eq!(moved.probs(), base.probs());
        }
    }

    #[test]
    fn shift_below_minus_one_is_rejected() {
        assert!(build_g(0.5, -2, 10).is_err());
        assert!(build_h(0.5, -2, 10).is_err());
    }

    #[test]
    fn h_equals_brute_force_product_of_f_and_g() {
        // Independent route: truncated series product of the signed series
        // and the Sibuya series, no closed-form shortcut.
        let n = 300;
        let f = coefficients::partial_coin_pmf(0.5, n).unwrap();
        let g = build_g(0.5, -1, n).unwrap();
        let h = build_h(0.5, -1, n).unwrap();
        for m in 1..=n {
            let mut conv = 0.0;
            for j in 1..=m {
                conv += g.probs()[j - 1] * f.coeff(m - j);
            }
            assert!((conv - h.probs()[m - 1]).abs() < 1e-12, "m={m}");
        }
    }
}
