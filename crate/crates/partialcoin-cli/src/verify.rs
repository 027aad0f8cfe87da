//! Self-verification: re-derives the identities that make the sampler
//! sound and reports pass/fail for each.

use std::process::ExitCode;

use partialcoin::coefficients::{partial_coin_pmf, signed_sums};
use partialcoin::coupling::{cdf_from_pmf, interlacing_check};
use partialcoin::decomposition::{build_g, build_h, decompose, verify_product};

use crate::{CliError, VerifyArgs};

/// When set, the f series is deliberately mismatched before the product
/// check; used to test that a corrupted build is detected (exit 1).
const FAULT_ENV: &str = "PARTIALCOIN_FAULT_INJECT";

const PRODUCT_TERMS: usize = 200;
const PRODUCT_TOL: f64 = 1e-12;

struct Reporter {
    first_failure: Option<String>,
}

impl Reporter {
    fn check(&mut self, name: &str, mu: f64, pass: bool, detail: &str) -> Result<(), CliError> {
        use std::io::Write;
        let stdout = std::io::stdout();
        writeln!(
            stdout.lock(),
            "{} {name} mu={mu} ({detail})",
            if pass { "PASS" } else { "FAIL" }
        )?;
        if !pass && self.first_failure.is_none() {
            self.first_failure = Some(format!("{name} (mu={mu})"));
        }
        Ok(())
    }
}

pub fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let inject_fault = std::env::var_os(FAULT_ENV).is_some();
    let mut reporter = Reporter {
        first_failure: None,
    };

    for &mu in &args.mu {
        product_identity(&mut reporter, mu, args.terms, inject_fault)?;
        positivity(&mut reporter, mu, args.terms)?;
        interlacing(&mut reporter, mu, args.terms)?;
        sums(&mut reporter, mu, args.terms)?;
    }

    match reporter.first_failure {
        None => {
            use std::io::Write;
            writeln!(std::io::stdout().lock(), "all identities hold")?;
            Ok(ExitCode::SUCCESS)
        }
        Some(name) => {
            eprintln!("verification failed: {name}");
            Ok(ExitCode::from(1))
        }
    }
}

fn product_identity(
    reporter: &mut Reporter,
    mu: f64,
    terms: usize,
    inject_fault: bool,
) -> Result<(), CliError> {
    let n = terms.min(PRODUCT_TERMS);
    let mut d = decompose(mu, -1, n)?;
    if inject_fault {
        // Pair g and h with a slightly wrong f; the convolution must notice.
        d.f = decompose((mu * 0.999_999).min(1.0), -1, n)?.f;
    }
    let ok = verify_product(&d, PRODUCT_TOL)?;
    reporter.check(
        "product identity",
        mu,
        ok,
        &format!("{n} coefficients, tol {PRODUCT_TOL:e}"),
    )
}

fn positivity(reporter: &mut Reporter, mu: f64, terms: usize) -> Result<(), CliError> {
    let g = build_g(mu, -1, terms)?;
    let h = build_h(mu, -1, terms)?;
    // For mu = 1 the series terminate: trailing coefficients are exactly 0.
    let ok = if mu < 1.0 {
        g.probs().iter().all(|&p| p > 0.0) && h.probs().iter().all(|&p| p > 0.0)
    } else {
        g.probs().iter().all(|&p| p >= 0.0) && h.probs().iter().all(|&p| p >= 0.0)
    };
    reporter.check("coefficient positivity", mu, ok, &format!("{terms} terms"))
}

fn interlacing(reporter: &mut Reporter, mu: f64, terms: usize) -> Result<(), CliError> {
    let g = cdf_from_pmf(&build_g(mu, -1, terms)?);
    let h = cdf_from_pmf(&build_h(mu, -1, terms)?);
    let ok = interlacing_check(&g, &h);
    reporter.check("interlacing", mu, ok, &format!("{terms} terms"))
}

fn sums(reporter: &mut Reporter, mu: f64, terms: usize) -> Result<(), CliError> {
    let pmf = partial_coin_pmf(mu, terms)?;
    let (sum, abs_sum) = signed_sums(&pmf);

    // Alternating series: the partial sum misses 1 by at most the first
    // dropped magnitude.
    let next_magnitude = pmf.coeff(terms).abs() * (1.0 - (mu + 1.0) / (terms as f64 + 1.0));
    let sum_ok = (sum - 1.0).abs() <= next_magnitude + 1e-12;

    // Cross-check Σ|p| against the tail recurrence t_N = Π (j − μ)/j:
    // Σ|p| = 2^(1−μ) − 2^(−μ) t_N exactly, up to rounding.
    let mut tail = 1.0;
    for j in 1..=terms {
        tail *= (j as f64 - mu) / j as f64;
    }
    let expected_abs = 2f64.powf(1.0 - mu) - 2f64.powf(-mu) * tail;
    let abs_ok = (abs_sum - expected_abs).abs() <= 1e-9;

    reporter.check(
        "signed sums",
        mu,
        sum_ok && abs_ok,
        &format!(
            "|Σp − 1| = {:.2e}, |Σ|p| − (2^(1−μ) − 2^(−μ) t_N)| = {:.2e}",
            (sum - 1.0).abs(),
            (abs_sum - expected_abs).abs()
        ),
    )
}
