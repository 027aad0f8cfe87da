//! `partialcoin` — flip partial coins from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 domain/numeric error.

mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partialcoin::coupling::TailPolicy;
use partialcoin::decomposition::BiasedCoinSpec;
use partialcoin::simulation::{
    run_biased, run_pair, run_single, run_single_traced, BiasedRunSpec, CoinSpec,
};

const DEFAULT_SEED: u64 = 42;
const MAX_TERMS: usize = 10_000_000;
const SEED_ENV: &str = "PARTIALCOIN_SEED";

#[derive(Parser)]
#[command(
    name = "partialcoin",
    version,
    about = "Simulate signed (negative-probability) partial-coin distributions",
    long_about = "Simulate signed (negative-probability) partial-coin distributions.\n\
                  A mu-th coin is decomposed into two ordinary distributions built from\n\
                  the Sibuya distribution; one uniform drives both inverse CDFs and the\n\
                  difference of the inverses is the flip. Runs are deterministic given\n\
                  a seed, including multi-threaded ones."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flip one partial coin
    Coin(CoinArgs),
    /// Flip a pair of independent partial coins (outcomes 0, 1, or 2)
    Twocoins(TwoCoinsArgs),
    /// Flip a biased partial coin with sides a + b = 1
    Biased(BiasedArgs),
    /// Print series coefficients (f, g, or h) as CSV
    Coeffs(CoeffsArgs),
    /// Run the self-verification identities and report pass/fail
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Number of flips
    #[arg(long, default_value_t = 10_000, value_parser = parse_flips)]
    flips: u64,
    /// Truncation length of the series expansions
    #[arg(long, default_value_t = 100_000, value_parser = parse_terms)]
    terms: usize,
    /// Support shift k: g and h live on {k+1, k+2, ...}
    #[arg(long, default_value_t = -1, value_parser = parse_shift, allow_hyphen_values = true)]
    shift: i64,
    /// RNG seed (falls back to $PARTIALCOIN_SEED, then 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Append a text histogram of the outcome counts (human format only)
    #[arg(long)]
    hist: bool,
    /// Worker threads; results are identical for any thread count
    #[arg(long, default_value_t = 1, value_parser = parse_threads)]
    threads: usize,
    /// What to do when a uniform lands beyond the defined CDF range
    #[arg(long, value_enum, default_value_t = PolicyArg::ZeroDifference)]
    tail_policy: PolicyArg,
}

#[derive(Args)]
struct CoinArgs {
    /// Coin exponent mu in (0, 1]
    #[arg(long, value_parser = parse_mu)]
    mu: f64,
    /// Write a per-flip CSV trace (flip_index, u, g_val, h_val, f, tail)
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct TwoCoinsArgs {
    /// Exponent of the first coin
    #[arg(long, value_parser = parse_mu)]
    mu1: f64,
    /// Exponent of the second coin
    #[arg(long, value_parser = parse_mu)]
    mu2: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct BiasedArgs {
    /// Probability of the zero side
    #[arg(long, value_parser = parse_side)]
    a: f64,
    /// Probability of the one side (a + b must equal 1)
    #[arg(long, value_parser = parse_side)]
    b: f64,
    /// Coin exponent mu in (0, 1]
    #[arg(long, value_parser = parse_mu)]
    mu: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct CoeffsArgs {
    /// Coin exponent mu in (0, 1]
    #[arg(long, value_parser = parse_mu)]
    mu: f64,
    /// Which series to print
    #[arg(long, value_enum)]
    which: Which,
    /// Number of rows
    #[arg(long, default_value_t = 20, value_parser = parse_terms)]
    terms: usize,
    /// Support shift for g and h
    #[arg(long, default_value_t = -1, value_parser = parse_shift, allow_hyphen_values = true)]
    shift: i64,
    /// Zero-side probability for the biased variants (requires --b)
    #[arg(long, value_parser = parse_side, requires = "b")]
    a: Option<f64>,
    /// One-side probability for the biased variants (requires --a)
    #[arg(long, value_parser = parse_side, requires = "a")]
    b: Option<f64>,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// mu value or comma-separated list, e.g. --mu 0.1,0.2,0.3
    #[arg(long, value_delimiter = ',', value_parser = parse_mu, required = true)]
    mu: Vec<f64>,
    /// Truncation length for the positivity and interlacing scans
    #[arg(long, default_value_t = 100_000, value_parser = parse_terms)]
    terms: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    /// Score the flip 0 and count a tail event
    ZeroDifference,
    /// Reject the draw and take a fresh uniform
    Redraw,
}

impl From<PolicyArg> for TailPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::ZeroDifference => TailPolicy::ZeroDifference,
            PolicyArg::Redraw => TailPolicy::Redraw,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Which {
    /// Signed partial-coin series
    F,
    /// Sibuya series (the sampler's first component)
    G,
    /// Product series (the sampler's second component)
    H,
}

fn parse_mu(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| "mu must be a number".to_string())?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("mu must be in (0,1]".to_string())
    }
}

fn parse_side(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| "side probability must be a number".to_string())?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("side probabilities must be in (0,1)".to_string())
    }
}

fn parse_terms(s: &str) -> Result<usize, String> {
    let v: usize = s
        .parse()
        .map_err(|_| "terms must be an integer".to_string())?;
    if (1..=MAX_TERMS).contains(&v) {
        Ok(v)
    } else {
        Err(format!("terms must be between 1 and {MAX_TERMS}"))
    }
}

fn parse_flips(s: &str) -> Result<u64, String> {
    let v: u64 = s
        .parse()
        .map_err(|_| "flips must be an integer".to_string())?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("flips must be at least 1".to_string())
    }
}

fn parse_shift(s: &str) -> Result<i64, String> {
    let v: i64 = s
        .parse()
        .map_err(|_| "shift must be an integer".to_string())?;
    if v >= -1 {
        Ok(v)
    } else {
        Err("shift must be >= -1".to_string())
    }
}

fn parse_threads(s: &str) -> Result<usize, String> {
    let v: usize = s
        .parse()
        .map_err(|_| "threads must be an integer".to_string())?;
    if (1..=256).contains(&v) {
        Ok(v)
    } else {
        Err("threads must be between 1 and 256".to_string())
    }
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<partialcoin::Error> for CliError {
    fn from(e: partialcoin::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Coin(args) => cmd_coin(args),
        Command::Twocoins(args) => cmd_twocoins(args),
        Command::Biased(args) => cmd_biased(args),
        Command::Coeffs(args) => cmd_coeffs(args),
        Command::Verify(args) => verify::cmd_verify(args),
    }
}

fn cmd_coin(args: CoinArgs) -> Result<ExitCode, CliError> {
    let seed = resolve_seed(args.run.seed)?;
    let spec = CoinSpec {
        mu: args.mu,
        n_terms: args.run.terms,
        shift: args.run.shift,
        tail_policy: args.run.tail_policy.into(),
    };
    let summary = if let Some(path) = &args.trace {
        let (summary, trace) = run_single_traced(&spec, args.run.flips, seed, args.run.threads)?;
        report::write_trace(path, &trace)?;
        summary
    } else {
        run_single(&spec, args.run.flips, seed, args.run.threads)?
    };
    let params = report::Params {
        command: "coin",
        mu: Some(args.mu),
        ..report::Params::new(&args.run, seed)
    };
    report::emit(&params, &summary, args.run.format, args.run.hist)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_twocoins(args: TwoCoinsArgs) -> Result<ExitCode, CliError> {
    let seed = resolve_seed(args.run.seed)?;
    let make = |mu| CoinSpec {
        mu,
        n_terms: args.run.terms,
        shift: args.run.shift,
        tail_policy: args.run.tail_policy.into(),
    };
    let summary = run_pair(
        &make(args.mu1),
        &make(args.mu2),
        args.run.flips,
        seed,
        args.run.threads,
    )?;
    let params = report::Params {
        command: "twocoins",
        mu1: Some(args.mu1),
        mu2: Some(args.mu2),
        ..report::Params::new(&args.run, seed)
    };
    report::emit(&params, &summary, args.run.format, args.run.hist)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_biased(args: BiasedArgs) -> Result<ExitCode, CliError> {
    if (args.a + args.b - 1.0).abs() > 1e-9 {
        return Err(CliError::Usage(format!(
            "a + b must equal 1 (got {} + {} = {})",
            args.a,
            args.b,
            args.a + args.b
        )));
    }
    let seed = resolve_seed(args.run.seed)?;
    let summary = if args.a == args.b {
        // Equal sides degenerate to the fair partial coin.
        let spec = CoinSpec {
            mu: args.mu,
            n_terms: args.run.terms,
            shift: args.run.shift,
            tail_policy: args.run.tail_policy.into(),
        };
        run_single(&spec, args.run.flips, seed, args.run.threads)?
    } else {
        let spec = BiasedRunSpec {
            coin: BiasedCoinSpec::new(args.a, args.b, args.mu)?,
            n_terms: args.run.terms,
            shift: args.run.shift,
            tail_policy: args.run.tail_policy.into(),
        };
        run_biased(&spec, args.run.flips, seed, args.run.threads)?
    };
    let params = report::Params {
        command: "biased",
        mu: Some(args.mu),
        a: Some(args.a),
        b: Some(args.b),
        ..report::Params::new(&args.run, seed)
    };
    report::emit(&params, &summary, args.run.format, args.run.hist)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<ExitCode, CliError> {
    report::emit_coeffs(&args)?;
    Ok(ExitCode::SUCCESS)
}
