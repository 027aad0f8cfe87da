//! Cross-module invariants: property tests over parameter ranges plus
//! seeded statistical checks.

use proptest::prelude::*;

use partialcoin::coefficients::{catalan_pmf, partial_coin_pmf, sibuya_weights, signed_sums};
use partialcoin::coupling::{
    cdf_from_pmf, coupled_flip, exact_flip_probability, interlacing_check, invert,
};
use partialcoin::decomposition::{
    build_g, build_h, decompose, decompose_biased, verify_product, BiasedCoinSpec,
};
use partialcoin::rng::CounterRng;
use partialcoin::sibuya::SibuyaDist;
use partialcoin::simulation::{run_pair, run_single, run_single_traced, summarize, CoinSpec};
use partialcoin::stats::chi_square_gof;

/// Direct product formula |α(α−1)···(α−n+1)/n!|, independent of the
/// ratio recurrence.
fn binomial_magnitude(alpha: f64, n: usize) -> f64 {
    let mut num = 1.0f64;
    for j in 0..n {
        num *= alpha - j as f64;
    }
    let mut fact = 1.0f64;
    for j in 1..=n {
        fact *= j as f64;
    }
    (num / fact).abs()
}

proptest! {
    #[test]
    fn weight_recurrence_matches_product_formula(
        alpha in 0.01f64..0.999,
        n_terms in 1usize..150,
    ) {
        // The factorial in the direct formula overflows doubles past
        // n ≈ 170, so the comparison stops at 149; the ratio identity below
        // covers arbitrary depth.
        let w = sibuya_weights(alpha, n_terms).unwrap();
        for n in 1..=n_terms {
            let direct = binomial_magnitude(alpha, n);
            prop_assert!(
                (w.weight(n) - direct).abs() <= 1e-12 * direct.max(1e-300),
                "n = {n}"
            );
        }
    }

    #[test]
    fn weight_ratio_identity(
        alpha in 0.01f64..0.999,
        n_terms in 2usize..2000,
    ) {
        // w̃ₙ₊₁ / w̃ₙ must equal |binomial(α, n+1) / binomial(α, n)|
        // = (n − α)/(n + 1) at any depth.
        let w = sibuya_weights(alpha, n_terms).unwrap();
        for n in 1..n_terms {
            let ratio = w.weight(n + 1) / w.weight(n);
            let direct = (n as f64 - alpha) / (n as f64 + 1.0);
            prop_assert!((ratio - direct).abs() <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn weights_decrease_strictly_and_sum_below_one(
        alpha in 0.01f64..0.999,
        n_terms in 2usize..500,
    ) {
        let w = sibuya_weights(alpha, n_terms).unwrap();
        prop_assert_eq!(w.weight(1), alpha);
        for n in 1..n_terms {
            prop_assert!(w.weight(n + 1) < w.weight(n));
            prop_assert!(w.weight(n) > 0.0);
        }
        prop_assert!(w.partial_sum() <= 1.0 + 1e-12);
    }

    #[test]
    fn signed_pmf_alternates_and_decays(
        mu in 0.01f64..=1.0,
        n_terms in 2usize..400,
    ) {
        let pmf = partial_coin_pmf(mu, n_terms).unwrap();
        prop_assert!(pmf.coeff(0) > 0.0);
        prop_assert!(pmf.coeff(1) > 0.0);
        for n in 1..=n_terms {
            let c = pmf.coeff(n);
            if mu == 1.0 && n >= 2 {
                prop_assert_eq!(c, 0.0);
                continue;
            }
            if n % 2 == 1 {
                prop_assert!(c > 0.0, "n = {n}");
            } else {
                prop_assert!(c < 0.0, "n = {n}");
            }
            if n >= 2 {
                prop_assert!(c.abs() < pmf.coeff(n - 1).abs());
            }
        }
        let (sum, abs_sum) = signed_sums(&pmf);
        // Alternating remainder: the partial sum misses 1 by at most the
        // first dropped magnitude.
        let next_magnitude = pmf.coeff(n_terms).abs()
            * (1.0 - (mu + 1.0) / (n_terms as f64 + 1.0));
        prop_assert!((sum - 1.0).abs() <= next_magnitude + 1e-12);
        prop_assert!(abs_sum <= 2f64.powf(1.0 - mu) + 1e-12);
    }

    #[test]
    fn truncated_masses_stay_below_totals(
        mu in 0.05f64..=1.0,
        shift in -1i64..4,
        n_terms in 1usize..300,
    ) {
        let g = build_g(mu, shift, n_terms).unwrap();
        let h = build_h(mu, shift, n_terms).unwrap();
        prop_assert!(g.partial_sum() <= g.total_mass() + 1e-12);
        prop_assert!(h.partial_sum() <= h.total_mass() + 1e-12);
        prop_assert_eq!(g.support_offset(), shift + 1);
        prop_assert_eq!(h.support_offset(), shift + 1);
    }

    #[test]
    fn product_identity_across_parameters(
        mu in 0.05f64..=1.0,
        shift in -1i64..4,
    ) {
        let d = decompose(mu, shift, 128).unwrap();
        prop_assert!(verify_product(&d, 1e-12).unwrap());
    }

    #[test]
    fn biased_product_identity_across_parameters(
        a in 0.51f64..0.95,
        mu in 0.05f64..0.999,
        shift in -1i64..4,
    ) {
        let spec = BiasedCoinSpec::new(a, 1.0 - a, mu).unwrap();
        let d = decompose_biased(&spec, shift, 128).unwrap();
        prop_assert!(verify_product(&d, 1e-12).unwrap());
    }

    #[test]
    fn bisection_matches_linear_scan(
        mu in 0.05f64..=1.0,
        u in 0.0001f64..0.9999,
    ) {
        let g = cdf_from_pmf(&build_g(mu, -1, 500).unwrap());
        let by_bisection = invert(&g, u).unwrap();
        let by_scan = g
            .values()
            .iter()
            .position(|&c| c >= u)
            .map(|i| g.support_offset() + i as i64);
        prop_assert_eq!(by_bisection, by_scan);
    }

    #[test]
    fn coupled_flips_are_binary(
        mu in 0.05f64..=1.0,
        u in 0.0001f64..0.9999,
    ) {
        let g = cdf_from_pmf(&build_g(mu, -1, 2000).unwrap());
        let h = cdf_from_pmf(&build_h(mu, -1, 2000).unwrap());
        let s = coupled_flip(&g, &h, u).unwrap();
        if let Some(f) = s.difference() {
            prop_assert!(f == 0 || f == 1, "f = {f}");
        }
    }

    #[test]
    fn catalan_equals_binomial_route(n_terms in 1usize..120) {
        let catalan = catalan_pmf(n_terms);
        let binomial = partial_coin_pmf(0.5, n_terms).unwrap();
        for n in 0..=n_terms {
            prop_assert!(
                (catalan.coeff(n) - binomial.coeff(n)).abs() <= 1e-12,
                "n = {n}"
            );
        }
    }

    #[test]
    fn uniforms_stay_strictly_inside_unit_interval(seed: u64, stream: u64) {
        let mut rng = CounterRng::from_seed_and_stream(seed, stream);
        for _ in 0..64 {
            let u = rng.next_open01();
            prop_assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn runs_are_deterministic_functions_of_seed(seed: u64) {
        let spec = CoinSpec { n_terms: 2000, ..CoinSpec::new(0.5) };
        let a = run_single(&spec, 512, seed, 1).unwrap();
        let b = run_single(&spec, 512, seed, 3).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn summarize_agrees_with_streaming(seed: u64) {
        let spec = CoinSpec { n_terms: 1000, ..CoinSpec::new(0.4) };
        let (summary, trace) = run_single_traced(&spec, 300, seed, 2).unwrap();
        prop_assert_eq!(summarize(&trace).unwrap(), summary);
    }
}

#[test]
fn interlacing_and_flip_shift_invariance_on_grid() {
    for mu in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
        let mut pairs = Vec::new();
        for shift in [-1i64, 0, 3] {
            let g = cdf_from_pmf(&build_g(mu, shift, 100_000).unwrap());
            let h = cdf_from_pmf(&build_h(mu, shift, 100_000).unwrap());
            assert!(interlacing_check(&g, &h), "mu={mu} shift={shift}");
            pairs.push((g, h));
        }
        let mut rng = CounterRng::from_seed_and_stream(8, 0);
        for _ in 0..500 {
            let u = rng.next_open01();
            let base = coupled_flip(&pairs[0].0, &pairs[0].1, u).unwrap();
            for (g, h) in &pairs[1..] {
                let s = coupled_flip(g, h, u).unwrap();
                assert_eq!(s.difference(), base.difference());
            }
        }
    }
}

#[test]
fn single_coin_flips_pass_bernoulli_gof_on_grid() {
    // Counts of {0, 1} against (1 − p*, p*) at significance 0.01.
    let n = 100_000u64;
    for mu in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
        let spec = CoinSpec::new(mu);
        let s = run_single(&spec, n, 814, 4).unwrap();
        let p = s.exact_probability;
        let zeros = *s.counts.get(&0).unwrap_or(&0);
        let ones = *s.counts.get(&1).unwrap_or(&0);
        let test = chi_square_gof(&[zeros, ones], &[(1.0 - p) * n as f64, p * n as f64]).unwrap();
        assert!(
            test.p_value > 0.01,
            "mu={mu}: chi2={} p={}",
            test.statistic,
            test.p_value
        );
    }
}

#[test]
fn pair_outcomes_factor_into_marginals() {
    let n = 100_000u64;
    let spec1 = CoinSpec::new(1.0 / 3.0);
    let spec2 = CoinSpec::new(2.0 / 3.0);
    let s = run_pair(&spec1, &spec2, n, 99, 4).unwrap();
    let p1 = run_single(&spec1, 1, 0, 1).unwrap().exact_probability;
    let p2 = run_single(&spec2, 1, 0, 1).unwrap().exact_probability;
    let expected = [
        (1.0 - p1) * (1.0 - p2),
        p1 * (1.0 - p2) + p2 * (1.0 - p1),
        p1 * p2,
    ];
    for (value, want) in expected.iter().enumerate() {
        let got = *s.counts.get(&(value as i64)).unwrap_or(&0) as f64 / n as f64;
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!(
            (got - want).abs() <= 3.0 * sigma,
            "outcome {value}: {got} vs {want}"
        );
    }
}

#[test]
fn direct_sampler_passes_gof_against_pmf() {
    // Buckets {1..20, >= 21}; the last expected mass is the true tail
    // P(Y >= 21), and a capped draw lands there truthfully because
    // overflow implies Y > cap >= 21.
    let n = 100_000u64;
    let cap = 10_000u64;
    let dist = SibuyaDist::new(0.5).unwrap();
    let mut expected: Vec<f64> = (1..=20).map(|k| dist.pmf(k).unwrap() * n as f64).collect();
    expected.push(dist.tail(20) * n as f64);

    let mut observed = vec![0u64; 21];
    let mut rng = CounterRng::from_seed_and_stream(31, 0);
    for _ in 0..n {
        let idx = match dist.sample_direct(&mut rng, cap) {
            Some(k) if k <= 20 => (k - 1) as usize,
            _ => 20,
        };
        observed[idx] += 1;
    }
    let test = chi_square_gof(&observed, &expected).unwrap();
    assert!(
        test.p_value > 0.01,
        "chi2 = {}, p = {}",
        test.statistic,
        test.p_value
    );
}

#[test]
fn tail_event_rate_matches_uncovered_mass() {
    let n = 100_000u64;
    let spec = CoinSpec::new(0.5);
    let s = run_single(&spec, n, 505, 4).unwrap();
    let g = cdf_from_pmf(&build_g(spec.mu, spec.shift, spec.n_terms).unwrap());
    let h = cdf_from_pmf(&build_h(spec.mu, spec.shift, spec.n_terms).unwrap());
    let uncovered = 1.0 - g.truncated_mass().min(h.truncated_mass());
    let rate = s.tail_events as f64 / n as f64;
    let sigma = (uncovered * (1.0 - uncovered) / n as f64).sqrt();
    assert!(
        (rate - uncovered).abs() <= 3.0 * sigma,
        "rate={rate} uncovered={uncovered}"
    );
}

#[test]
fn exact_probability_dominates_partial_sums() {
    // Adding terms only adds nonnegative G(m) − H(m) gaps.
    let mut last = 0.0;
    for n in [50usize, 100, 500, 1000, 5000] {
        let g = cdf_from_pmf(&build_g(0.3, -1, n).unwrap());
        let h = cdf_from_pmf(&build_h(0.3, -1, n).unwrap());
        let p = exact_flip_probability(&g, &h).unwrap();
        assert!(p >= last - 1e-15);
        last = p;
    }
}
