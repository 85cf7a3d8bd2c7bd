use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::Ratio;

#[derive(Debug, Parser)]
#[command(name = "progfree", version, about = "Build and check progression-free integer sets")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for randomized steps such as sampled density ladders.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Print parameters, certificates and timings to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a set and write it with its density record.
    Construct(ConstructArgs),
    /// Check a set file for forbidden progressions.
    Verify(VerifyArgs),
    /// Exact extremal values r(k, N) and r_m(k, N).
    Rvalue(RvalueArgs),
    /// Run a ladder of budgets and fit the deficiency exponent.
    Density(DensityArgs),
    /// Print the level parameters without building anything.
    Schedule(ScheduleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Behrend,
    SalemSpencer,
    PolyBase,
    LabaLacey,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Self::Behrend => "behrend",
            Self::SalemSpencer => "salem-spencer",
            Self::PolyBase => "poly-base",
            Self::LabaLacey => "laba-lacey",
        }
    }
}

/// Construction choice and parameter overrides shared by `construct` and `density`.
#[derive(Clone, Debug, Args)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub construction: Construction,

    /// Progression length to avoid. For laba-lacey it must be 1 + 2^t.
    #[arg(long)]
    pub k: Option<u32>,

    /// Polynomial degree (poly-base only).
    #[arg(long)]
    pub m: Option<u32>,

    /// Digit fraction for salem-spencer, as `p/q`.
    #[arg(long)]
    pub c: Option<Ratio<u64>>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub build: BuildArgs,

    /// Target interval length; accepts `100000`, `1e12` or `10^12`.
    #[arg(long = "N", value_parser = parse_budget)]
    pub budget: Option<BigUint>,

    /// Base override, rounded up to a multiple of c_0 where one applies.
    #[arg(long)]
    pub n: Option<u64>,

    /// Dimension override.
    #[arg(long)]
    pub d: Option<usize>,

    /// Set file to write. The record goes next to it with a `.csv` extension.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Set file, or a plain list of integers one per line.
    #[arg(long)]
    pub file: PathBuf,

    /// Progression length (default: the one recorded in the file, else 3).
    #[arg(long)]
    pub k: Option<u32>,

    /// Polynomial degree (default: the one recorded in the file, else 1).
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Enumerate,
    BranchBound,
}

#[derive(Debug, Args)]
pub struct RvalueArgs {
    #[arg(long, default_value_t = 3)]
    pub k: u32,

    /// Degree; when given, computes r_m(k, N).
    #[arg(long)]
    pub m: Option<u32>,

    #[arg(long = "N")]
    pub n: usize,

    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,

    /// Print every value for lengths 1..=N.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub build: BuildArgs,

    /// Smallest budget, as a decimal exponent.
    #[arg(long)]
    pub from: f64,

    /// Largest budget, as a decimal exponent.
    #[arg(long)]
    pub to: f64,

    /// Evenly spaced ladder points per decade.
    #[arg(long, default_value_t = 1)]
    pub per_decade: u32,

    /// Draw this many log-uniform budgets from the seeded generator instead.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Size spheres from their histograms without enumerating them
    /// (behrend and poly-base).
    #[arg(long)]
    pub count_only: bool,

    /// CSV destination.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Progression length 1 + 2^t.
    #[arg(long, default_value_t = 5)]
    pub k: u32,

    #[arg(long = "N", value_parser = parse_budget)]
    pub budget: BigUint,
}

/// Parses `123`, `1e12`, `2.5e9` or `10^12` into an exact integer.
pub fn parse_budget(s: &str) -> Result<BigUint, String> {
    let s = s.trim().replace('_', "");
    let bad = || format!("expected an integer budget such as 100000, 1e12 or 10^12, found {s:?}");
    if let Some((base, exp)) = s.split_once('^') {
        let base: BigUint = base.parse().map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        return Ok(base.pow(exp));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().map_err(|_| bad())?),
        None => (s.as_str(), 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let frac = frac.trim_end_matches('0');
    let shift = exp
        .checked_sub(frac.len() as u32)
        .ok_or_else(|| format!("{s:?} is not an integer"))?;
    let digits: BigUint = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(digits * BigUint::from(10u32).pow(shift))
}
