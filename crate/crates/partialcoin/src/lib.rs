//! Simulation of signed ("negative-probability") partial-coin
//! distributions.
//!
//! A μ-th coin has generating function ((1 + x)/2)^μ; for 0 < μ < 1 its
//! series coefficients alternate in sign from n = 2 on, so it cannot be
//! sampled directly. It can, however, be written as a quotient of two
//! ordinary nonnegative distributions built from the Sibuya distribution:
//! f·g = h with g a shifted Sibuya series and h the product. Driving the
//! inverse CDFs of g and h with one shared uniform then yields flips
//! H⁻¹(u) − G⁻¹(u) ∈ {0, 1} whose mean is the mean of the signed
//! distribution.
//!
//! Modules follow that pipeline:
//!
//! * [`coefficients`] — binomial-type coefficient sequences (Sibuya
//!   weights, signed partial-coin series, Catalan closed form).
//! * [`sibuya`] — the Sibuya distribution with two cross-validating
//!   samplers.
//! * [`decomposition`] — the nonnegative pairs (g, h), unbiased and
//!   biased, and the product-identity check.
//! * [`coupling`] — comonotone coupled inverse-CDF flips, interlacing, and
//!   the exact expectation oracle.
//! * [`simulation`] — seeded, chunked, reproducible experiment runs.
//! * [`rng`] — the deterministic counter-based uniform source.
//! * [`stats`] — log-gamma and chi-square helpers for verification.

#![forbid(unsafe_code)]

pub mod coefficients;
pub mod coupling;
pub mod decomposition;
pub mod error;
pub mod rng;
pub mod sibuya;
pub mod simulation;
pub mod stats;

pub use coefficients::{SibuyaWeights, SignedPmf};
pub use coupling::{Cdf, CoupledSample, TailPolicy};
pub use decomposition::{BiasedCoinSpec, Decomposition, NonnegPmf};
pub use error::Error;
pub use simulation::{BiasedRunSpec, CoinSpec, FlipRecord, FlipTrace, RunSummary};
