//! Output rendering: caption-style human summaries, machine-readable
//! JSON/CSV, text histograms, and CSV traces.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use partialcoin::coefficients::{biased_coin_pmf, partial_coin_pmf};
use partialcoin::decomposition::{
    build_biased_g, build_biased_h, build_g, build_h, BiasedCoinSpec,
};
use partialcoin::simulation::{FlipTrace, RunSummary};
use serde::Serialize;

use crate::{CliError, CoeffsArgs, Format, RunArgs, Which};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const HIST_WIDTH: u64 = 40;

/// Echoed run parameters, shared by all output formats.
pub struct Params {
    pub command: &'static str,
    pub mu: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub terms: usize,
    pub shift: i64,
    pub flips: u64,
    pub seed: u64,
    pub threads: usize,
    pub policy: &'static str,
}

impl Params {
    pub fn new(run: &RunArgs, seed: u64) -> Self {
        Self {
            command: "",
            mu: None,
            mu1: None,
            mu2: None,
            a: None,
            b: None,
            terms: run.terms,
            shift: run.shift,
            flips: run.flips,
            seed,
            threads: run.threads,
            policy: match run.tail_policy {
                crate::PolicyArg::ZeroDifference => "zero-difference",
                crate::PolicyArg::Redraw => "redraw",
            },
        }
    }
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    terms: usize,
    shift: i64,
    flips: u64,
    seed: u64,
    counts: BTreeMap<String, u64>,
    expectation: f64,
    exact_probability: f64,
    tail_events: u64,
    version: &'a str,
}

fn count(summary: &RunSummary, value: i64) -> u64 {
    *summary.counts.get(&value).unwrap_or(&0)
}

fn counts_map(params: &Params, summary: &RunSummary) -> BTreeMap<String, u64> {
    let values: &[i64] = if params.command == "twocoins" {
        &[0, 1, 2]
    } else {
        &[0, 1]
    };
    values
        .iter()
        .map(|&v| (v.to_string(), count(summary, v)))
        .collect()
}

pub fn emit(
    params: &Params,
    summary: &RunSummary,
    format: Format,
    hist: bool,
) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Human => emit_human(&mut out, params, summary, hist)?,
        Format::Json => {
            let json = JsonSummary {
                command: params.command,
                mu: params.mu,
                mu1: params.mu1,
                mu2: params.mu2,
                a: params.a,
                b: params.b,
                terms: params.terms,
                shift: params.shift,
                flips: params.flips,
                seed: params.seed,
                counts: counts_map(params, summary),
                expectation: summary.expectation,
                exact_probability: summary.exact_probability,
                tail_events: summary.tail_events,
                version: VERSION,
            };
            let body = serde_json::to_string(&json)
                .map_err(|e| CliError::Runtime(format!("json encoding failed: {e}")))?;
            writeln!(out, "{body}")?;
        }
        Format::Csv => emit_csv(&mut out, params, summary)?,
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn emit_csv(out: &mut impl Write, params: &Params, summary: &RunSummary) -> Result<(), CliError> {
    writeln!(
        out,
        "command,mu,mu1,mu2,a,b,terms,shift,flips,seed,count_0,count_1,count_2,\
         expectation,exact_probability,tail_events,version"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        params.command,
        opt(params.mu),
        opt(params.mu1),
        opt(params.mu2),
        opt(params.a),
        opt(params.b),
        params.terms,
        params.shift,
        params.flips,
        params.seed,
        count(summary, 0),
        count(summary, 1),
        count(summary, 2),
        summary.expectation,
        summary.exact_probability,
        summary.tail_events,
        VERSION,
    )?;
    Ok(())
}

fn emit_human(
    out: &mut impl Write,
    params: &Params,
    summary: &RunSummary,
    hist: bool,
) -> Result<(), CliError> {
    let mut head = format!("{}:", params.command);
    for (name, value) in [
        ("mu", params.mu),
        ("mu1", params.mu1),
        ("mu2", params.mu2),
        ("a", params.a),
        ("b", params.b),
    ] {
        if let Some(v) = value {
            head.push_str(&format!(" {name}={v}"));
        }
    }
    head.push_str(&format!(
        " terms={} shift={} seed={} threads={} tail-policy={}",
        params.terms, params.shift, params.seed, params.threads, params.policy
    ));
    writeln!(out, "{head}")?;

    if params.command == "twocoins" {
        writeln!(
            out,
            "Flips: {}; ones on both partial coins: {}; ones on one partial coin: {}; \
             zeros on both partial coins: {}; expectation: {:.4}",
            summary.n_flips,
            count(summary, 2),
            count(summary, 1),
            count(summary, 0),
            summary.expectation
        )?;
    } else {
        writeln!(
            out,
            "Flips: {}; ones: {}; zeros: {}; expectation: {:.4}",
            summary.n_flips,
            count(summary, 1),
            count(summary, 0),
            summary.expectation
        )?;
    }
    writeln!(
        out,
        "exact expectation: {:.6}; tail events: {}",
        summary.exact_probability, summary.tail_events
    )?;

    if hist {
        writeln!(out, "histogram:")?;
        let max = summary.counts.values().copied().max().unwrap_or(1).max(1);
        let values: &[i64] = if params.command == "twocoins" {
            &[0, 1, 2]
        } else {
            &[0, 1]
        };
        for &v in values {
            let c = count(summary, v);
            let width = (c * HIST_WIDTH).div_ceil(max);
            writeln!(out, "  {v} | {} {c}", "#".repeat(width as usize))?;
        }
    }
    Ok(())
}

/// CSV trace: flip_index, u (17 significant digits), g_val, h_val, f, tail.
/// Undefined inverses (tail events) leave their cell empty.
pub fn write_trace(path: &Path, trace: &FlipTrace) -> Result<(), CliError> {
    let file = File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "flip_index,u,g_val,h_val,f,tail")?;
    for r in &trace.records {
        let g = r.g_val.map(|v| v.to_string()).unwrap_or_default();
        let h = r.h_val.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{:.16e},{},{},{},{}",
            r.index,
            r.u,
            g,
            h,
            r.f,
            u8::from(r.tail)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Coefficient dump: `index,value` rows for the requested series.
pub fn emit_coeffs(args: &CoeffsArgs) -> Result<(), CliError> {
    let rows = coeff_rows(args)?;
    let mut body = String::from("index,value\n");
    for (index, value) in rows {
        body.push_str(&format!("{index},{value}\n"));
    }
    match &args.out {
        Some(path) => {
            let mut file = File::create(path)?;
            file.write_all(body.as_bytes())?;
        }
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

fn coeff_rows(args: &CoeffsArgs) -> Result<Vec<(i64, f64)>, CliError> {
    let biased = match (args.a, args.b) {
        (Some(a), Some(b)) => {
            if (a + b - 1.0).abs() > 1e-9 {
                return Err(CliError::Usage(format!(
                    "a + b must equal 1 (got {} + {} = {})",
                    a,
                    b,
                    a + b
                )));
            }
            Some(BiasedCoinSpec::new(a, b, args.mu)?)
        }
        _ => None,
    };
    let rows = match (args.which, biased) {
        (Which::F, None) => {
            let pmf = partial_coin_pmf(args.mu, args.terms.max(2) - 1)?;
            pmf.coeffs()
                .iter()
                .take(args.terms)
                .enumerate()
                .map(|(n, &p)| (n as i64, p))
                .collect()
        }
        (Which::F, Some(spec)) => {
            let pmf = biased_coin_pmf(spec.a(), spec.b(), spec.mu(), args.terms.max(2) - 1)?;
            pmf.coeffs()
                .iter()
                .take(args.terms)
                .enumerate()
                .map(|(n, &p)| (n as i64, p))
                .collect()
        }
        (Which::G, None) => build_g(args.mu, args.shift, args.terms)?
            .support_iter()
            .collect(),
        (Which::G, Some(spec)) => build_biased_g(&spec, args.shift, args.terms)?
            .support_iter()
            .collect(),
        (Which::H, None) => build_h(args.mu, args.shift, args.terms)?
            .support_iter()
            .collect(),
        (Which::H, Some(spec)) => build_biased_h(&spec, args.shift, args.terms)?
            .support_iter()
            .collect(),
    };
    Ok(rows)
}
