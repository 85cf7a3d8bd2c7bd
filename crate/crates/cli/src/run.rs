use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use progfree::analysis::{predicted_exponent, write_csv};
use progfree::constructions::{poly_base_size, salem_spencer_size, ENUMERATION_CAP};
use progfree::detectors::{exact_r_enumerate, exact_r_m_branch_bound, exact_r_m_enumerate, exact_r_with};
use progfree::{
    behrend_set, build_schedule, density_record, exact_r, exact_r_m, exponent_fit, laba_lacey_set,
    min_c0, poly_base_set, salem_spencer_set, verify_set, ConstructionParams, DensityRecord, Error,
    IntegerSet, Provenance, SearchBudget,
};

use crate::args::{
    BuildArgs, Construction, ConstructArgs, DensityArgs, Method, RvalueArgs, ScheduleArgs,
    VerifyArgs,
};

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

/// Environment variable naming the default directory for output files.
pub const OUT_DIR_VAR: &str = "PROGFREE_OUT_DIR";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource { .. } | Error::Overflow(_) => EXIT_RESOURCE,
            Error::Invariant(_) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

pub type Outcome = Result<(), Failure>;

pub struct Context {
    pub verbose: u8,
    pub seed: u64,
}

impl Context {
    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn create_file(path: &Path) -> io::Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// `t` with `k = 1 + 2^t`.
fn depth_for_length(k: u32) -> Result<u32, Failure> {
    match k.checked_sub(1) {
        Some(p) if p.is_power_of_two() && p >= 2 => Ok(p.trailing_zeros()),
        _ => Err(Failure::usage(format!(
            "laba-lacey avoids lengths of the form 1 + 2^t (3, 5, 9, 17), got {k}"
        ))),
    }
}

fn round_up(n: u64, c0: u64) -> u64 {
    n.div_ceil(c0).max(1) * c0
}

fn ceil_root(budget: &BigUint, d: usize) -> Result<u64, Failure> {
    let mut root = budget.nth_root(d as u32);
    if root.pow(d as u32) < *budget {
        root += 1u32;
    }
    u64::try_from(root).map_err(|_| Failure::usage(format!("budget {budget} is too large for d = {d}")))
}

fn within_twice(n: u64, d: usize, budget: &BigUint) -> bool {
    let big = BigUint::from(n).pow(d as u32);
    &big * 2u32 >= *budget && big <= budget * 2u32
}

/// Default dimension `⌊√ln N⌋`, at least 1.
fn default_dimension(budget: &BigUint) -> usize {
    (progfree::analysis::ln_big(budget).max(1.0).sqrt().floor() as usize).max(1)
}

/// Resolves `(n, d)` from the overrides and the budget. `c0` is the divisor
/// the base is rounded up to.
fn resolve_dims(
    n: Option<u64>,
    d: Option<usize>,
    budget: Option<&BigUint>,
    c0: u64,
) -> Result<(u64, usize), Failure> {
    let need = || Failure::usage("give --N or both --n and --d");
    if d == Some(0) {
        return Err(Failure::usage("--d must be at least 1"));
    }
    let (n, d) = match (n, d) {
        (Some(n), Some(d)) => (round_up(n, c0), d),
        (None, Some(d)) => (round_up(ceil_root(budget.ok_or_else(need)?, d)?, c0), d),
        (Some(n), None) => {
            let budget = budget.ok_or_else(need)?;
            let n = round_up(n, c0);
            let ratio = progfree::analysis::ln_big(budget) / (n as f64).ln();
            (n, (ratio.round() as usize).max(1))
        }
        (None, None) => {
            // Largest dimension up to the default whose rounded base keeps
            // n^d within a factor 2 of the budget.
            let budget = budget.ok_or_else(need)?;
            let mut pick = None;
            for d in (1..=default_dimension(budget)).rev() {
                let n = round_up(ceil_root(budget, d)?, c0);
                pick = Some((n, d));
                if within_twice(n, d, budget) {
                    break;
                }
            }
            pick.expect("the dimension range is never empty")
        }
    };
    Ok((n, d))
}

fn check_overrides(n: u64, d: usize, args_given: bool, budget: Option<&BigUint>) -> Outcome {
    if let (true, Some(budget)) = (args_given, budget) {
        if !within_twice(n, d, budget) {
            return Err(Failure::usage(format!(
                "n^d = {n}^{d} is not within a factor 2 of the budget {budget}"
            )));
        }
    }
    Ok(())
}

/// The `(n, d)` with `n = ⌈N^{1/d}⌉` whose digit class has the highest
/// density among those small enough to enumerate.
fn densest_salem_spencer(budget: &BigUint, c: Ratio<u64>) -> Result<(u64, usize), Failure> {
    let mut best: Option<(f64, u64, usize)> = None;
    for d in 1..=budget.bits().max(1) as usize {
        let n = ceil_root(budget, d)?.max(2);
        let size = salem_spencer_size(n, d, c)?;
        if size > BigUint::from(ENUMERATION_CAP) {
            continue;
        }
        let density = progfree::analysis::ln_big(&size) - d as f64 * (n as f64).ln();
        if best.is_none_or(|b| density > b.0) {
            best = Some((density, n, d));
        }
    }
    best.map(|(_, n, d)| (n, d))
        .ok_or_else(|| Failure::usage(format!("no enumerable salem-spencer class for N = {budget}")))
}

/// Builds one set. `n`/`d` are overrides; without them the budget decides.
fn build(
    args: &BuildArgs,
    budget: Option<&BigUint>,
    n: Option<u64>,
    d: Option<usize>,
) -> Result<IntegerSet, Failure> {
    let overrides = n.is_some() || d.is_some();
    match args.construction {
        Construction::Behrend => {
            if args.k.is_some_and(|k| k != 3) || args.m.is_some_and(|m| m != 1) {
                return Err(Failure::usage("behrend avoids 3-term progressions (k = 3, m = 1)"));
            }
            let (n, d) = if overrides {
                resolve_dims(n, d, budget, min_c0(1, 3)?)?
            } else {
                let budget = budget.ok_or_else(|| Failure::usage("give --N or both --n and --d"))?;
                let p = build_schedule(1, budget)?.base().params.clone();
                (p.n, p.d)
            };
            check_overrides(n, d, overrides, budget)?;
            Ok(behrend_set(n, d)?)
        }
        Construction::PolyBase => {
            let m = args.m.unwrap_or(1);
            let k = args.k.unwrap_or(2 * m + 1);
            let c0 = min_c0(m, k)?;
            let (n, d) = resolve_dims(n, d, budget, c0)?;
            check_overrides(n, d, overrides, budget)?;
            let params = ConstructionParams::new(n, d, m, k, c0)?;
            Ok(poly_base_set(m, &params)?)
        }
        Construction::SalemSpencer => {
            if args.k.is_some_and(|k| k != 3) || args.m.is_some_and(|m| m != 1) {
                return Err(Failure::usage("salem-spencer avoids 3-term progressions (k = 3, m = 1)"));
            }
            let c = args.c.unwrap_or(Ratio::new(1, 2));
            let (n, d) = if overrides {
                resolve_dims(n, d, budget, 1)?
            } else {
                densest_salem_spencer(budget.ok_or_else(|| Failure::usage("give --N or both --n and --d"))?, c)?
            };
            check_overrides(n, d, overrides, budget)?;
            Ok(salem_spencer_set(n, d, c)?)
        }
        Construction::LabaLacey => {
            if overrides {
                return Err(Failure::usage(
                    "laba-lacey takes its level parameters from the schedule; drop --n and --d",
                ));
            }
            if args.m.is_some_and(|m| m != 1) {
                return Err(Failure::usage("laba-lacey avoids arithmetic progressions (m = 1)"));
            }
            let t = depth_for_length(args.k.unwrap_or(5))?;
            let budget = budget.ok_or_else(|| Failure::usage("laba-lacey needs --N"))?;
            Ok(laba_lacey_set(t, budget)?)
        }
    }
}

pub fn construct(ctx: &Context, args: &ConstructArgs) -> Outcome {
    let start = Instant::now();
    let set = build(&args.build, args.budget.as_ref(), args.n, args.d)?;
    let p = set.provenance();
    let path = args.output.clone().unwrap_or_else(|| {
        out_dir().join(format!("{}-N{}.set", args.build.construction.name(), set.ambient()))
    });
    let record_path = path.with_extension("csv");
    let mut w = create_file(&path)?;
    set.write_to(&mut w)?;
    w.flush()?;
    let record = density_record(&set, p.k)?;
    let mut w = create_file(&record_path)?;
    write_csv(std::slice::from_ref(&record), &mut w)?;
    w.flush()?;
    for (key, value) in &p.params {
        ctx.note(format!("{key} = {value}"));
    }
    for c in &p.certificates {
        ctx.note(format!("pigeonhole {}: {} * {} >= {}", c.label, c.chosen, c.bins, c.mass));
    }
    ctx.note(format!("built in {:.3}s", start.elapsed().as_secs_f64()));
    println!(
        "construction={} N={} size={} k={} m={} deficiency={:.6}",
        p.construction,
        set.ambient(),
        set.len(),
        p.k,
        p.m,
        record.deficiency
    );
    println!("set: {}", path.display());
    println!("record: {}", record_path.display());
    Ok(())
}

/// Reads a set file, or a bare list of integers with ambient `[0, max + 1)`.
fn read_set(path: &Path) -> Result<IntegerSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    if text.lines().any(|l| l.starts_with('#')) {
        return Ok(IntegerSet::parse(&text)?);
    }
    let mut elements = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let x: BigInt = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("expected an integer, found {line:?}"),
        })?;
        elements.push(x);
    }
    let ambient = elements
        .iter()
        .max()
        .and_then(|m| (m + 1u32).to_biguint())
        .unwrap_or_default();
    Ok(IntegerSet::new(elements, ambient, Provenance::explicit())?)
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> Outcome {
    let set = read_set(&args.file)?;
    let p = set.provenance();
    let k = args.k.or((p.k > 0).then_some(p.k)).unwrap_or(3);
    let m = args.m.or((p.m > 0).then_some(p.m)).unwrap_or(1);
    ctx.note(format!("{}: {} elements, N = {}", args.file.display(), set.len(), set.ambient()));
    let report = verify_set(&set, m, k)?;
    print!("{}", report.to_text());
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VIOLATION,
            message: format!("forbidden configuration found in {}", args.file.display()),
        })
    }
}

fn rvalue_one(args: &RvalueArgs, n: usize) -> Result<usize, Failure> {
    let budget = SearchBudget::default();
    let value = match (args.m, args.method) {
        (None, Method::Auto) => exact_r(args.k, n)?,
        (None, Method::Enumerate) => exact_r_enumerate(args.k, n)?,
        (None, Method::BranchBound) => exact_r_with(args.k, n, &budget)?,
        (Some(m), Method::Auto) => exact_r_m(m, args.k, n)?,
        (Some(m), Method::Enumerate) => exact_r_m_enumerate(m, args.k, n)?,
        (Some(m), Method::BranchBound) => exact_r_m_branch_bound(m, args.k, n, &budget)?,
    };
    Ok(value)
}

pub fn rvalue(ctx: &Context, args: &RvalueArgs) -> Outcome {
    let lengths: Vec<usize> = if args.table { (1..=args.n).collect() } else { vec![args.n] };
    for n in lengths {
        let start = Instant::now();
        let value = rvalue_one(args, n)?;
        match args.m {
            Some(m) => println!("r_{m}({}, {n}) = {value}", args.k),
            None => println!("r({}, {n}) = {value}", args.k),
        }
        ctx.note(format!("  {:.3}s", start.elapsed().as_secs_f64()));
    }
    Ok(())
}

/// Budgets `10^e` for the ladder, deduplicated and ascending.
fn ladder(args: &DensityArgs, seed: u64) -> Result<Vec<BigUint>, Failure> {
    if !(args.from.is_finite() && args.to.is_finite()) || args.from < 0.3 || args.to < args.from {
        return Err(Failure::usage("need 0.3 <= --from <= --to"));
    }
    if args.to > 300.0 {
        return Err(Failure::usage("--to above 300 decades is not supported"));
    }
    let exponents: Vec<f64> = match args.samples {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<f64> = (0..s).map(|_| rng.random_range(args.from..=args.to)).collect();
            v.sort_by(f64::total_cmp);
            v
        }
        None => {
            if args.per_decade == 0 {
                return Err(Failure::usage("--per-decade must be at least 1"));
            }
            let steps = ((args.to - args.from) * args.per_decade as f64).round() as u32;
            (0..=steps)
                .map(|i| args.from + i as f64 / args.per_decade as f64)
                .collect()
        }
    };
    let mut budgets: Vec<BigUint> = exponents.iter().map(|&e| pow10(e)).collect();
    budgets.dedup();
    Ok(budgets)
}

/// `⌊10^e⌋` for a non-negative real exponent, exact in the integer part.
fn pow10(e: f64) -> BigUint {
    let whole = e.floor();
    let frac = 10f64.powf(e - whole);
    let scaled = (frac * 1e12).round() as u64;
    let whole = whole as u32;
    if whole >= 12 {
        BigUint::from(scaled) * BigUint::from(10u32).pow(whole - 12)
    } else {
        BigUint::from(scaled) / BigUint::from(10u32).pow(12 - whole)
    }
}

fn density_point(args: &DensityArgs, budget: &BigUint) -> Result<DensityRecord, Failure> {
    if !args.count_only {
        let set = build(&args.build, Some(budget), None, None)?;
        let k = set.provenance().k;
        return Ok(density_record(&set, k)?);
    }
    let b = &args.build;
    let (name, k, params) = match b.construction {
        Construction::Behrend => ("behrend", 3, build_schedule(1, budget)?.base().params.clone()),
        Construction::PolyBase => {
            let m = b.m.unwrap_or(1);
            let k = b.k.unwrap_or(2 * m + 1);
            let c0 = min_c0(m, k)?;
            let (n, d) = resolve_dims(None, None, Some(budget), c0)?;
            ("poly-base", k, ConstructionParams::new(n, d, m, k, c0)?)
        }
        _ => return Err(Failure::usage("--count-only applies to behrend and poly-base")),
    };
    let size = poly_base_size(&params)?;
    Ok(DensityRecord::from_counts(name, k, params.big_n.clone(), size)?)
}

pub fn density(ctx: &Context, args: &DensityArgs) -> Outcome {
    let budgets = ladder(args, ctx.seed)?;
    let mut records: Vec<DensityRecord> = Vec::new();
    for budget in &budgets {
        let start = Instant::now();
        let record = density_point(args, budget)?;
        ctx.note(format!(
            "budget {budget}: N = {} size = {} ({:.3}s)",
            record.big_n,
            record.set_size,
            start.elapsed().as_secs_f64()
        ));
        if records.iter().all(|r| r.big_n != record.big_n) {
            records.push(record);
        }
    }
    let path = args.output.clone().unwrap_or_else(|| {
        out_dir().join(format!("density-{}.csv", args.build.construction.name()))
    });
    let mut w = create_file(&path)?;
    write_csv(&records, &mut w)?;
    w.flush()?;
    println!("records: {} ({})", records.len(), path.display());
    if records.len() < 3 {
        println!("fit: needs at least 3 distinct N");
        return Ok(());
    }
    let first = &records[0];
    let predicted = predicted_exponent(&first.construction, first.k);
    let mut alphas = vec![1.0 / 3.0, 0.5, 2.0 / 3.0];
    if alphas.iter().all(|a| (a - predicted).abs() > 1e-12) {
        alphas.push(predicted);
    }
    for alpha in alphas {
        let fit = exponent_fit(&records, alpha)?;
        let mark = if (alpha - predicted).abs() < 1e-12 { " (predicted)" } else { "" };
        println!(
            "alpha={alpha:.4} C={:.6} max_rel_residual={:.6}{mark}",
            fit.c, fit.max_rel_residual
        );
    }
    Ok(())
}

pub fn schedule(_ctx: &Context, args: &ScheduleArgs) -> Outcome {
    let t = depth_for_length(args.k)?;
    print!("{}", build_schedule(t, &args.budget)?.to_text());
    Ok(())
}
