//! Experiment runner: single partial coins, independent pairs, and biased
//! partial coins, with seeded determinism and chunked parallelism.
//!
//! # Determinism contract
//!
//! Flips are partitioned into fixed chunks of [`CHUNK_SIZE`]. Chunk j of a
//! single-coin run draws its uniforms from stream j (see [`crate::rng`]);
//! in a pair run the first coin uses stream 2j and the second 2j + 1.
//! Chunk results are merged in chunk order, so the output is a pure
//! function of (spec, n_flips, seed) — independent of thread count and
//! scheduling.

use std::collections::BTreeMap;

use crate::coupling::{
    cdf_from_pmf, coupled_flip, exact_flip_probability, Cdf, CoupledSample, TailPolicy,
};
use crate::decomposition::{decompose, decompose_biased, BiasedCoinSpec};
use crate::error::Error;
use crate::rng::CounterRng;

/// Flips per RNG stream chunk.
pub const CHUNK_SIZE: u64 = 4096;

/// Default truncation length of the series expansions.
pub const DEFAULT_N_TERMS: usize = 100_000;

/// Configuration of one unbiased partial coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpec {
    pub mu: f64,
    pub n_terms: usize,
    pub shift: i64,
    pub tail_policy: TailPolicy,
}

impl CoinSpec {
    /// μ-th coin with default truncation, shift −1, zero-difference tails.
    pub fn new(mu: f64) -> Self {
        Self {
            mu,
            n_terms: DEFAULT_N_TERMS,
            shift: -1,
            tail_policy: TailPolicy::default(),
        }
    }
}

/// Configuration of one biased partial coin run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedRunSpec {
    pub coin: BiasedCoinSpec,
    pub n_terms: usize,
    pub shift: i64,
    pub tail_policy: TailPolicy,
}

impl BiasedRunSpec {
    pub fn new(coin: BiasedCoinSpec) -> Self {
        Self {
            coin,
            n_terms: DEFAULT_N_TERMS,
            shift: -1,
            tail_policy: TailPolicy::default(),
        }
    }
}

/// Aggregated results of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n_flips: u64,
    /// Outcome value -> count. Keys are 0/1 for single coins, 0/1/2 for
    /// pairs.
    pub counts: BTreeMap<i64, u64>,
    /// Mean outcome.
    pub expectation: f64,
    /// Flips affected by at least one tail event.
    pub tail_events: u64,
    /// Deterministic oracle for the expected outcome (independent of the
    /// uniform stream), under the zero-difference tail convention.
    pub exact_probability: f64,
    pub seed: u64,
}

/// Per-flip audit record. For a flip resolved by redraws the record holds
/// the accepted draw, with `tail` marking that at least one redraw happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipRecord {
    pub index: u64,
    pub u: f64,
    pub g_val: Option<i64>,
    pub h_val: Option<i64>,
    pub f: i64,
    pub tail: bool,
}

/// Full audit trail of a single-coin run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipTrace {
    pub seed: u64,
    pub exact_probability: f64,
    pub records: Vec<FlipRecord>,
}

/// Recomputes a [`RunSummary`] from a trace; must agree with the streaming
/// summary field for field.
pub fn summarize(trace: &FlipTrace) -> Result<RunSummary, Error> {
    if trace.records.is_empty() {
        return Err(Error::domain("trace is empty"));
    }
    let mut counts = BTreeMap::new();
    let mut tail_events = 0u64;
    for r in &trace.records {
        *counts.entry(r.f).or_insert(0) += 1;
        if r.tail {
            tail_events += 1;
        }
    }
    let n_flips = trace.records.len() as u64;
    Ok(RunSummary {
        n_flips,
        expectation: expectation_from_counts(&counts, n_flips),
        counts,
        tail_events,
        exact_probability: trace.exact_probability,
        seed: trace.seed,
    })
}

fn expectation_from_counts(counts: &BTreeMap<i64, u64>, n_flips: u64) -> f64 {
    let weighted: i128 = counts.iter().map(|(&v, &c)| v as i128 * c as i128).sum();
    weighted as f64 / n_flips as f64
}

/// One coin's sampling tables plus its flip convention.
struct FlipKernel {
    g: Cdf,
    h: Cdf,
    policy: TailPolicy,
    swapped: bool,
}

impl FlipKernel {
    fn unbiased(spec: &CoinSpec) -> Result<(Self, f64), Error> {
        let d = decompose(spec.mu, spec.shift, spec.n_terms)?;
        let g = cdf_from_pmf(&d.g);
        let h = cdf_from_pmf(&d.h);
        let exact = exact_flip_probability(&g, &h)?;
        Ok((
            Self {
                g,
                h,
                policy: spec.tail_policy,
                swapped: false,
            },
            exact,
        ))
    }

    fn biased(spec: &BiasedRunSpec) -> Result<(Self, f64), Error> {
        let d = decompose_biased(&spec.coin, spec.shift, spec.n_terms)?;
        let g = cdf_from_pmf(&d.g);
        let h = cdf_from_pmf(&d.h);
        let raw = exact_flip_probability(&g, &h)?;
        let swapped = spec.coin.swapped();
        let exact = if swapped { 1.0 - raw } else { raw };
        Ok((
            Self {
                g,
                h,
                policy: spec.tail_policy,
                swapped,
            },
            exact,
        ))
    }

    /// Draws until the policy resolves a value. Swapped orientation reports
    /// F̂ = 1 − (H⁻¹ − G⁻¹), with tail events scoring 1 instead of 0.
    fn flip(&self, rng: &mut CounterRng) -> (i64, bool, CoupledSample) {
        let mut redrawn = false;
        loop {
            let u = rng.next_open01();
            let sample =
                coupled_flip(&self.g, &self.h, u).expect("tables validated at kernel construction");
            match sample.difference() {
                Some(diff) => {
                    let value = if self.swapped { 1 - diff } else { diff };
                    return (value, redrawn, sample);
                }
                None => match self.policy {
                    TailPolicy::ZeroDifference => {
                        let value = if self.swapped { 1 } else { 0 };
                        return (value, true, sample);
                    }
                    TailPolicy::Redraw => redrawn = true,
                },
            }
        }
    }
}

enum Engine {
    Single(FlipKernel),
    Pair(FlipKernel, FlipKernel),
}

impl Engine {
    fn flip(&self, rngs: &mut (CounterRng, CounterRng)) -> (i64, bool, Option<CoupledSample>) {
        match self {
            Engine::Single(kernel) => {
                let (v, tail, sample) = kernel.flip(&mut rngs.0);
                (v, tail, Some(sample))
            }
            Engine::Pair(first, second) => {
                let (v1, t1, _) = first.flip(&mut rngs.0);
                let (v2, t2, _) = second.flip(&mut rngs.1);
                (v1 + v2, t1 || t2, None)
            }
        }
    }

    fn chunk_rngs(&self, seed: u64, chunk: u64) -> (CounterRng, CounterRng) {
        match self {
            Engine::Single(_) => (
                CounterRng::from_seed_and_stream(seed, chunk),
                CounterRng::from_seed_and_stream(seed, chunk),
            ),
            Engine::Pair(_, _) => (
                CounterRng::from_seed_and_stream(seed, 2 * chunk),
                CounterRng::from_seed_and_stream(seed, 2 * chunk + 1),
            ),
        }
    }
}

#[derive(Default)]
struct ChunkOut {
    counts: BTreeMap<i64, u64>,
    tail_events: u64,
    records: Vec<FlipRecord>,
}

fn run_chunk(engine: &Engine, seed: u64, chunk: u64, n_flips: u64, want_trace: bool) -> ChunkOut {
    let start = chunk * CHUNK_SIZE;
    let end = (start + CHUNK_SIZE).min(n_flips);
    let mut rngs = engine.chunk_rngs(seed, chunk);
    let mut out = ChunkOut::default();
    if want_trace {
        out.records.reserve((end - start) as usize);
    }
    for index in start..end {
        let (value, tail, sample) = engine.flip(&mut rngs);
        *out.counts.entry(value).or_insert(0) += 1;
        if tail {
            out.tail_events += 1;
        }
        if want_trace {
            let sample = sample.expect("trace is only collected for single-coin runs");
            out.records.push(FlipRecord {
                index,
                u: sample.u,
                g_val: sample.g_val,
                h_val: sample.h_val,
                f: value,
                tail,
            });
        }
    }
    out
}

fn run_engine(
    engine: &Engine,
    n_flips: u64,
    seed: u64,
    threads: usize,
    exact_probability: f64,
    want_trace: bool,
) -> Result<(RunSummary, Option<FlipTrace>), Error> {
    if n_flips == 0 {
        return Err(Error::domain("n_flips must be at least 1"));
    }
    if threads == 0 {
        return Err(Error::domain("threads must be at least 1"));
    }
    let n_chunks = n_flips.div_ceil(CHUNK_SIZE) as usize;
    let workers = threads.min(n_chunks);

    let outs: Vec<ChunkOut> = if workers <= 1 {
        (0..n_chunks)
            .map(|j| run_chunk(engine, seed, j as u64, n_flips, want_trace))
            .collect()
    } else {
        let mut slots: Vec<Option<ChunkOut>> = (0..n_chunks).map(|_| None).collect();
        let per_worker = n_chunks.div_ceil(workers);
        std::thread::scope(|scope| {
            let mut rest: &mut [Option<ChunkOut>] = &mut slots;
            let mut first_chunk = 0usize;
            while !rest.is_empty() {
                let take = per_worker.min(rest.len());
                let (head, tail) = rest.split_at_mut(take);
                rest = tail;
                let base = first_chunk;
                scope.spawn(move || {
                    for (offset, slot) in head.iter_mut().enumerate() {
                        *slot = Some(run_chunk(
                            engine,
                            seed,
                            (base + offset) as u64,
                            n_flips,
                            want_trace,
                        ));
                    }
                });
                first_chunk += take;
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("chunk completed"))
            .collect()
    };

    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut tail_events = 0u64;
    let mut records = Vec::new();
    for out in outs {
        for (value, count) in out.counts {
            *counts.entry(value).or_insert(0) += count;
        }
        tail_events += out.tail_events;
        records.extend(out.records);
    }
    let summary = RunSummary {
        n_flips,
        expectation: expectation_from_counts(&counts, n_flips),
        counts,
        tail_events,
        exact_probability,
        seed,
    };
    let trace = want_trace.then_some(FlipTrace {
        seed,
        exact_probability,
        records,
    });
    Ok((summary, trace))
}

/// Flips one partial coin `n_flips` times.
pub fn run_single(
    spec: &CoinSpec,
    n_flips: u64,
    seed: u64,
    threads: usize,
) -> Result<RunSummary, Error> {
    let (kernel, exact) = FlipKernel::unbiased(spec)?;
    run_engine(
        &Engine::Single(kernel),
        n_flips,
        seed,
        threads,
        exact,
        false,
    )
    .map(|(summary, _)| summary)
}

/// Like [`run_single`], also collecting the per-flip audit trail.
pub fn run_single_traced(
    spec: &CoinSpec,
    n_flips: u64,
    seed: u64,
    threads: usize,
) -> Result<(RunSummary, FlipTrace), Error> {
    let (kernel, exact) = FlipKernel::unbiased(spec)?;
    run_engine(&Engine::Single(kernel), n_flips, seed, threads, exact, true)
        .map(|(summary, trace)| (summary, trace.expect("trace requested")))
}

/// Flips two independent partial coins; each flip reports the sum of the
/// two outcomes (0, 1, or 2).
pub fn run_pair(
    spec1: &CoinSpec,
    spec2: &CoinSpec,
    n_flips: u64,
    seed: u64,
    threads: usize,
) -> Result<RunSummary, Error> {
    let (k1, e1) = FlipKernel::unbiased(spec1)?;
    let (k2, e2) = FlipKernel::unbiased(spec2)?;
    run_engine(
        &Engine::Pair(k1, k2),
        n_flips,
        seed,
        threads,
        e1 + e2,
        false,
    )
    .map(|(summary, _)| summary)
}

/// Flips one biased partial coin. A swapped spec (raw inputs had a < b)
/// reports reflected flips F̂ = 1 − (H⁻¹ − G⁻¹) with tail events scoring 1.
pub fn run_biased(
    spec: &BiasedRunSpec,
    n_flips: u64,
    seed: u64,
    threads: usize,
) -> Result<RunSummary, Error> {
    let (kernel, exact) = FlipKernel::biased(spec)?;
    run_engine(
        &Engine::Single(kernel),
        n_flips,
        seed,
        threads,
        exact,
        false,
    )
    .map(|(summary, _)| summary)
}
