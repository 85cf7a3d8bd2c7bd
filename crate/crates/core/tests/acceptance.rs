//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so that the verdict lines
//! always reach the terminal. The process fails if any criterion outside
//! `KNOWN_RED` fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use progfree::analysis::{parse_csv, export_csv, DensityRecord};
use progfree::constructions::{
    build_schedule, cramer_matrix, min_c0, poly_base_size, sphere_histogram, vandermonde_det,
};
use progfree::detectors::{exact_r_enumerate, exact_r_m, exact_r_with};
use progfree::digits::combine_digits;
use progfree::{
    behrend_set, density_record, exact_r, exponent_fit, from_digits, laba_lacey_set, norm_sq,
    poly_base_set, salem_spencer_set, to_balanced_digits, verify_set, BalancedDigits,
    ConstructionParams, CubeMembership, IntegerSet, SearchBudget,
};

/// Criteria that are recorded as unattainable at desk scale. They still run
/// and print their verdict; they do not fail the process.
const KNOWN_RED: &[u32] = &[3];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn detail(mut self, lines: Vec<String>) -> Self {
        self.details = lines;
        self
    }
}

// ---------------------------------------------------------------------------
// Parameter grids shared by criteria 1, 4 and 8.

fn behrend_grid() -> Vec<(u64, usize)> {
    vec![
        (44, 2),
        (44, 3),
        (66, 3),
        (88, 3),
        (110, 3),
        (66, 4),
        (44, 5),
        (132, 3),
        (110, 4),
        (22, 4),
        (66, 2),
    ]
}

fn poly_base_grid() -> Vec<(u64, usize)> {
    vec![
        (308, 1),
        (616, 1),
        (308, 2),
        (616, 2),
        (924, 2),
        (1232, 2),
        (308, 3),
        (616, 3),
        (1540, 2),
        (308, 4),
    ]
}

fn salem_spencer_grid() -> Vec<(u64, usize, Ratio<u64>)> {
    vec![
        (2, 4, Ratio::new(1, 2)),
        (4, 5, Ratio::new(1, 2)),
        (6, 6, Ratio::new(1, 2)),
        (8, 6, Ratio::new(1, 2)),
        (9, 6, Ratio::new(1, 3)),
        (10, 5, Ratio::new(1, 2)),
        (10, 7, Ratio::new(2, 5)),
        (12, 8, Ratio::new(1, 4)),
        (16, 6, Ratio::new(1, 2)),
        (20, 6, Ratio::new(3, 10)),
        (7, 9, Ratio::new(2, 7)),
    ]
}

fn laba_lacey_budgets(k: u32) -> Vec<u64> {
    match k {
        1 => vec![
            100, 1_000, 5_000, 10_000, 50_000, 100_000, 200_000, 400_000, 700_000, 1_000_000,
        ],
        _ => vec![
            1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000, 3_000_000, 10_000_000,
            100_000_000,
        ],
    }
}

struct Built {
    kind: String,
    label: String,
    set: IntegerSet,
    m: u32,
    k: u32,
}

fn build_all() -> Result<Vec<Built>, String> {
    let mut out = Vec::new();
    for (n, d) in behrend_grid() {
        let set = behrend_set(n, d).map_err(|e| format!("behrend({n},{d}): {e}"))?;
        out.push(Built {
            kind: "behrend".into(),
            label: format!("behrend n={n} d={d}"),
            set,
            m: 1,
            k: 3,
        });
    }
    for (n, d) in poly_base_grid() {
        let p = ConstructionParams::with_min_c0(n, d, 2, 5).map_err(|e| e.to_string())?;
        let set = poly_base_set(2, &p).map_err(|e| format!("poly-base({n},{d}): {e}"))?;
        out.push(Built {
            kind: "poly-base m=2".into(),
            label: format!("poly-base m=2 n={n} d={d}"),
            set,
            m: 2,
            k: 5,
        });
    }
    for (n, d, c) in salem_spencer_grid() {
        let set = salem_spencer_set(n, d, c).map_err(|e| format!("salem-spencer({n},{d},{c}): {e}"))?;
        out.push(Built {
            kind: "salem-spencer".into(),
            label: format!("salem-spencer n={n} d={d} c={c}"),
            set,
            m: 1,
            k: 3,
        });
    }
    for k in [1u32, 2] {
        for b in laba_lacey_budgets(k) {
            let set = laba_lacey_set(k, &BigUint::from(b))
                .map_err(|e| format!("laba-lacey({k},{b}): {e}"))?;
            out.push(Built {
                kind: format!("laba-lacey k={k}"),
                label: format!("laba-lacey k={k} budget={b}"),
                set,
                m: 1,
                k: 1 + (1 << k),
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Criterion 1: every construction output verifies clean.

fn criterion_1(built: &[Built]) -> Outcome {
    let mut failures = Vec::new();
    let mut counts = std::collections::BTreeMap::<String, (usize, usize, BigUint)>::new();
    for b in built {
        let entry = counts.entry(b.kind.clone()).or_insert((0, 0, BigUint::zero()));
        entry.0 += 1;
        entry.1 = entry.1.max(b.set.len());
        entry.2 = entry.2.clone().max(b.set.ambient().clone());
        match verify_set(&b.set, b.m, b.k) {
            Ok(r) if r.is_clean() => {}
            Ok(r) => failures.push(format!("{}: {}", b.label, r.witness.unwrap())),
            Err(e) => failures.push(format!("{}: {e}", b.label)),
        }
    }
    let mut details: Vec<String> = counts
        .iter()
        .map(|(k, (pts, max_len, max_n))| {
            format!("{k}: {pts} parameter points, largest |A| = {max_len}, largest N = {max_n}")
        })
        .collect();
    let enough = counts.values().all(|c| c.0 >= 10);
    details.extend(failures.iter().cloned());
    Outcome::new(
        failures.is_empty() && enough,
        format!("{} sets verified, {} witnesses or errors", built.len(), failures.len()),
    )
    .detail(details)
}

// ---------------------------------------------------------------------------
// Criterion 2: Behrend deficiency grows like (ln N)^{1/2}.

fn fit_summary(recs: &[DensityRecord]) -> Result<[f64; 3], String> {
    let mut out = [0.0; 3];
    for (slot, alpha) in out.iter_mut().zip([1.0 / 3.0, 0.5, 2.0 / 3.0]) {
        *slot = exponent_fit(recs, alpha).map_err(|e| e.to_string())?.max_rel_residual;
    }
    Ok(out)
}

fn decades(recs: &[DensityRecord]) -> f64 {
    let lo = recs.iter().map(|r| r.log_n).fold(f64::INFINITY, f64::min);
    let hi = recs.iter().map(|r| r.log_n).fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / std::f64::consts::LN_10
}

/// Behrend record at the scheduled dimension for `budget`; the size comes
/// from the exact sphere histogram.
fn behrend_record(budget: &BigUint) -> Result<DensityRecord, String> {
    let s = build_schedule(1, budget).map_err(|e| e.to_string())?;
    let p = &s.base().params;
    let size = poly_base_size(p).map_err(|e| e.to_string())?;
    DensityRecord::from_counts("behrend", 3, p.big_n.clone(), size).map_err(|e| e.to_string())
}

/// `10^(t/2)` for `t` in `lo..=hi`.
fn half_decades(lo: u32, hi: u32) -> Vec<BigUint> {
    (lo..=hi)
        .map(|t| {
            let base = BigUint::from(10u32).pow(t / 2);
            if t % 2 == 1 {
                base * 31_623u32 / 10_000u32
            } else {
                base
            }
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let run = || -> Result<Outcome, String> {
        // Desk-scale ladder, materialised and verified.
        let mut desk = Vec::new();
        for e in 3..=12u32 {
            let budget = BigUint::from(10u32).pow(e);
            let s = build_schedule(1, &budget).map_err(|e| e.to_string())?;
            let p = &s.base().params;
            let set = behrend_set(p.n, p.d).map_err(|e| e.to_string())?;
            let exact = behrend_record(&budget)?;
            if exact.set_size != set.len() as u128 {
                return Err("histogram size disagrees with the materialised set".into());
            }
            desk.push(density_record(&set, 3).map_err(|e| e.to_string())?);
        }
        let desk_fit = fit_summary(&desk)?;

        // Large ladder, exact sizes from histograms.
        let mut large = Vec::new();
        for budget in half_decades(56, 63) {
            large.push(behrend_record(&budget)?);
        }
        let large_fit = fit_summary(&large)?;
        let span = decades(&large);
        let pass = large.len() >= 5
            && span >= 3.0
            && large_fit[1] <= 0.25
            && large_fit[1] < large_fit[0]
            && large_fit[1] < large_fit[2];
        let fmt = |f: &[f64; 3]| format!("resid(1/3)={:.4} resid(1/2)={:.4} resid(2/3)={:.4}", f[0], f[1], f[2]);
        let mut details = vec![
            format!(
                "exact-count ladder: {} points N = 1e28..1e31.5 ({span:.2} decades): {}",
                large.len(),
                fmt(&large_fit)
            ),
            format!(
                "desk ladder (materialised): {} points N = 1e3..1e12 ({:.2} decades): {}",
                desk.len(),
                decades(&desk),
                fmt(&desk_fit)
            ),
        ];
        for r in large.iter().chain(&desk) {
            details.push(format!(
                "  N={} |A|={} deficiency={:.4} ln N={:.3}",
                r.big_n, r.set_size, r.deficiency, r.log_n
            ));
        }
        Ok(Outcome::new(
            pass,
            format!("alpha = 1/2 on the exact-count ladder: {}", fmt(&large_fit)),
        )
        .detail(details))
    };
    run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")))
}

// ---------------------------------------------------------------------------
// Criterion 3: exponent 1/3 for the two-level construction, or beating
// Behrend at equal N.

fn criterion_3() -> Outcome {
    let run = || -> Result<Outcome, String> {
        // n = 374 t is a multiple of both safety constants (34 and 22), so
        // both constructions realise exactly N = n².
        let mut recs = Vec::new();
        let mut details = Vec::new();
        let mut beats = false;
        let mut clean = true;
        for t in [2u64, 6, 18, 54, 162] {
            let n = 374 * t;
            let budget = BigUint::from(n).pow(2);
            let schedule = build_schedule(2, &budget).map_err(|e| e.to_string())?;
            let outer = &schedule.outer().params;
            if (outer.n, outer.d) != (n, 2) {
                return Err(format!("schedule for {budget} picked n={} d={}", outer.n, outer.d));
            }
            let ll = laba_lacey_set(2, &budget).map_err(|e| e.to_string())?;
            let be = behrend_set(n, 2).map_err(|e| e.to_string())?;
            assert_eq!(ll.ambient(), be.ambient());
            let ll_clean = verify_set(&ll, 1, 5).map_err(|e| e.to_string())?.is_clean();
            let be_clean = verify_set(&be, 1, 3).map_err(|e| e.to_string())?.is_clean();
            clean &= ll_clean && be_clean;
            beats |= ll.len() > be.len();
            details.push(format!(
                "N={budget}: laba-lacey |A|={} (clean={ll_clean}) behrend |A|={} (clean={be_clean})",
                ll.len(),
                be.len()
            ));
            recs.push(density_record(&ll, 5).map_err(|e| e.to_string())?);
        }
        let a13 = exponent_fit(&recs, 1.0 / 3.0).map_err(|e| e.to_string())?;
        let a12 = exponent_fit(&recs, 0.5).map_err(|e| e.to_string())?;
        let span = decades(&recs);
        let shape = span >= 2.0 && a13.max_rel_residual < a12.max_rel_residual;
        let size = beats && clean;
        details.insert(
            0,
            format!(
                "ladder spans {span:.2} decades: resid(1/3)={:.4} resid(1/2)={:.4}",
                a13.max_rel_residual, a12.max_rel_residual
            ),
        );
        let branch = match (shape, size) {
            (true, _) => "exponent branch met",
            (false, true) => "size branch met",
            (false, false) => "neither branch met",
        };
        Ok(Outcome::new(shape || size, branch).detail(details))
    };
    run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")))
}

// ---------------------------------------------------------------------------
// Criterion 4: pigeonhole inequalities, recomputed from the recorded parameters.

fn param_u128(set: &IntegerSet, key: &str) -> Result<u128, String> {
    set.provenance()
        .param(key)
        .ok_or_else(|| format!("missing parameter {key}"))?
        .parse()
        .map_err(|_| format!("bad parameter {key}"))
}

/// `(2q+1)^d`, `dq² + 1` and `9D²dq² + 1` for the level with this prefix.
fn level_counts(set: &IntegerSet, prefix: &str) -> Result<(u128, u128, u128), String> {
    let d = param_u128(set, &format!("{prefix}d"))?;
    let q = param_u128(set, &format!("{prefix}q"))?;
    let det = param_u128(set, &format!("{prefix}D"))?;
    let cube = (2 * q + 1).pow(d as u32);
    Ok((cube, d * q * q + 1, 9 * det * det * d * q * q + 1))
}

fn check_certificates(b: &Built) -> Result<usize, String> {
    let p = b.set.provenance();
    let certs = &p.certificates;
    match p.construction.as_str() {
        "salem-spencer" => return Ok(0),
        "behrend" | "poly-base" => {
            let (cube, radii, _) = level_counts(&b.set, "")?;
            let [c] = certs.as_slice() else {
                return Err("expected one certificate".into());
            };
            if c.chosen != b.set.len() as u128 || c.mass != cube || c.bins != radii || c.chosen * radii < cube {
                return Err(format!("sphere bound fails: {c}"));
            }
        }
        "laba-lacey" => {
            let levels = param_u128(&b.set, "levels")? as usize;
            if certs.len() != levels {
                return Err(format!("{} certificates for {levels} levels", certs.len()));
            }
            let mut prev = 0u128;
            for (i, c) in certs.iter().enumerate() {
                let level = i + 1;
                let (cube, radii, shifts) = level_counts(&b.set, &format!("level{level}."))?;
                let ok = if level == 1 {
                    c.mass == cube && c.bins == radii && c.chosen * radii >= cube
                } else {
                    c.mass == prev * cube && c.bins == shifts && c.chosen * shifts >= prev * cube
                };
                if !ok {
                    return Err(format!("level {level} bound fails: {c}"));
                }
                prev = c.chosen;
            }
            if prev != b.set.len() as u128 {
                return Err("outer certificate does not match the set size".into());
            }
        }
        other => return Err(format!("unexpected construction {other}")),
    }
    Ok(certs.len())
}

fn criterion_4(built: &[Built]) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for b in built {
        match check_certificates(b) {
            Ok(n) => checked += n,
            Err(e) => failures.push(format!("{}: {e}", b.label)),
        }
    }
    Outcome::new(
        failures.is_empty() && checked > 0,
        format!("{checked} pigeonhole inequalities checked exactly, {} failures", failures.len()),
    )
    .detail(failures)
}

// ---------------------------------------------------------------------------
// Criterion 5: the exact-value oracles agree.

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let budget = SearchBudget::default();
    for n in 1..=25usize {
        let bb = exact_r_with(3, n, &budget);
        let en = exact_r_enumerate(3, n);
        match (bb, en) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => failures.push(format!("r(3,{n}): branch-and-bound {a:?} vs enumeration {b:?}")),
        }
    }
    for k in 3..=5u32 {
        for n in 1..=25usize {
            match (exact_r_m(1, k, n), exact_r(k, n)) {
                (Ok(a), Ok(b)) if a == b => {}
                (a, b) => failures.push(format!("r_1({k},{n}) = {a:?} but r({k},{n}) = {b:?}")),
            }
        }
    }
    let mut monotone_checks = 0;
    for k in 2..=7u32 {
        for n in 1..=18usize {
            let vals: Vec<_> = (1..=3).map(|m| exact_r_m(m, k, n)).collect();
            match vals.as_slice() {
                [Ok(a), Ok(b), Ok(c)] if a >= b && b >= c => monotone_checks += 1,
                other => failures.push(format!("r_m({k},{n}) for m=1..3: {other:?}")),
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "r(3,N) two ways for N<=25, r_1 = r for k=3..5, {monotone_checks} monotone triples ({:.1}s)",
            start.elapsed().as_secs_f64()
        ),
    )
    .detail(failures)
}

// ---------------------------------------------------------------------------
// Criterion 6: digitwise interpolation identity.

fn random_point(rng: &mut ChaCha8Rng, q: i64, d: usize) -> Vec<i64> {
    (0..d).map(|_| rng.random_range(-q..=q)).collect()
}

fn digits_of(x: &BigInt, n: u64, d: usize) -> Result<BalancedDigits, String> {
    to_balanced_digits(x, n, d).map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    const TRIALS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for m in 1..=3u32 {
        let c0 = min_c0(m, 2 * m + 1).unwrap();
        let det = vandermonde_det(m).unwrap();
        let cramer = cramer_matrix(m).unwrap();
        for trial in 0..TRIALS {
            let q = rng.random_range(1..=3i64);
            let d = rng.random_range(1..=3usize);
            let n = c0 * q as u64;
            // a_i from m + 1 random points of Q through D a_i = Σ_j C_ij x^(j).
            let pts: Vec<Vec<i64>> = (0..=m).map(|_| random_point(&mut rng, q, d)).collect();
            let xs: Vec<BigInt> = pts.iter().map(|p| from_digits(p, n).unwrap()).collect();
            let da: Vec<BigInt> = cramer
                .iter()
                .map(|row| row.iter().zip(&xs).map(|(c, x)| c * x).sum())
                .collect();
            let run = || -> Result<(), String> {
                let da_digits: Vec<BalancedDigits> =
                    da.iter().map(|v| digits_of(v, n, d)).collect::<Result<_, _>>()?;
                for j in 0..=2 * m as i64 {
                    let mut dx = BigInt::zero();
                    let mut pow = BigInt::from(1);
                    for v in &da {
                        dx += v * &pow;
                        pow *= j;
                    }
                    if !(&dx % &det).is_zero() {
                        return Err(format!("D does not divide D x^({j})"));
                    }
                    let x = dx / &det;
                    let lhs: Vec<i128> = digits_of(&x, n, d)?
                        .digits()
                        .iter()
                        .map(|&v| v as i128 * det.to_i128().unwrap())
                        .collect();
                    // Independent digitwise sum.
                    let mut rhs = vec![0i128; d];
                    let mut jp = 1i128;
                    for v in &da_digits {
                        for (o, &digit) in rhs.iter_mut().zip(v.digits()) {
                            *o += jp * digit as i128;
                        }
                        jp *= j as i128;
                    }
                    let terms: Vec<(i64, &BalancedDigits)> = da_digits
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (j.pow(i as u32), v))
                        .collect();
                    if lhs != rhs || combine_digits(&terms) != rhs {
                        return Err(format!("j={j}: D·v = {lhs:?} but Σ j^i v = {rhs:?}"));
                    }
                }
                Ok(())
            };
            match run() {
                Ok(()) => checked += 1,
                Err(e) => failures.push(format!("m={m} trial {trial} n={n} d={d}: {e}")),
            }
        }
    }
    failures.truncate(5);
    Outcome::new(
        failures.is_empty() && checked == 3 * TRIALS,
        format!("{checked} random tuples for m = 1, 2, 3, identity checked at j = 0..2m"),
    )
    .detail(failures)
}

// ---------------------------------------------------------------------------
// Criterion 7: no non-constant polynomial curve of 2m+1 equal-norm points.

/// Lagrange extrapolation of integer data at nodes `0..=m` to node `j`.
fn extrapolate(values: &[BigInt], j: i64) -> BigInt {
    let m = values.len() as i64 - 1;
    let mut total = num_rational::BigRational::zero();
    for (l, v) in values.iter().enumerate() {
        let l = l as i64;
        let mut coeff = num_rational::BigRational::from_integer(1.into());
        for t in 0..=m {
            if t != l {
                coeff *= num_rational::BigRational::new((j - t).into(), (l - t).into());
            }
        }
        total += coeff * num_rational::BigRational::from_integer(v.clone());
    }
    assert!(total.is_integer());
    total.to_integer()
}

fn criterion_7() -> Outcome {
    const TRIALS: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = Vec::new();
    let mut summary = Vec::new();
    for (m, n, d) in [(1u32, 44u64, 3usize), (2, 616, 3)] {
        let p = ConstructionParams::with_min_c0(n, d, m, 2 * m + 1).unwrap();
        let q = p.q as i64;
        // Group the points of Q by norm so every trial starts on one sphere.
        let side = (2 * q + 1) as usize;
        let mut spheres = std::collections::BTreeMap::<u128, Vec<Vec<i64>>>::new();
        for idx in 0..side.pow(d as u32) {
            let mut rest = idx;
            let v: Vec<i64> = (0..d)
                .map(|_| {
                    let x = (rest % side) as i64 - q;
                    rest /= side;
                    x
                })
                .collect();
            spheres.entry(norm_sq(&v)).or_default().push(v);
        }
        let radii: Vec<u128> = spheres.keys().copied().collect();
        let cube = CubeMembership::new(1, p.q);
        let mut nonconstant = 0usize;
        // Only tuples with at least two distinct points count as trials.
        while nonconstant < TRIALS {
            let r = radii[rng.random_range(0..radii.len())];
            let pts = &spheres[&r];
            let chosen: Vec<BigInt> = (0..=m)
                .map(|_| from_digits(&pts[rng.random_range(0..pts.len())], n).unwrap())
                .collect();
            if chosen.iter().all(|x| *x == chosen[0]) {
                continue;
            }
            nonconstant += 1;
            let mut all_equal = true;
            for j in m as i64 + 1..=2 * m as i64 {
                let x = extrapolate(&chosen, j);
                let inside = cube.contains(&x, n, d).unwrap();
                let same = inside
                    && to_balanced_digits(&x, n, d).map(|v| v.norm_sq()).ok() == Some(r);
                if !same {
                    all_equal = false;
                    break;
                }
            }
            if all_equal {
                found.push(format!("m={m} radius {r}: {chosen:?}"));
            }
        }
        summary.push(format!("m={m} (n={n}, d={d}): {nonconstant} non-constant trials"));
    }
    Outcome::new(
        found.is_empty(),
        format!("{} equal-norm curves found; {}", found.len(), summary.join("; ")),
    )
    .detail(found.into_iter().take(5).collect())
}

// ---------------------------------------------------------------------------
// Criterion 8: determinism, round-trips and histogram mass.

fn criterion_8(built: &[Built]) -> Outcome {
    let mut failures = Vec::new();
    // Rebuild a sample of every construction and compare byte for byte.
    let again: Vec<(String, Result<IntegerSet, String>)> = vec![
        ("behrend 66 4".into(), behrend_set(66, 4).map_err(|e| e.to_string())),
        (
            "poly-base 616 2".into(),
            ConstructionParams::with_min_c0(616, 2, 2, 5)
                .and_then(|p| poly_base_set(2, &p))
                .map_err(|e| e.to_string()),
        ),
        (
            "salem-spencer 10 5".into(),
            salem_spencer_set(10, 5, Ratio::new(1, 2)).map_err(|e| e.to_string()),
        ),
        (
            "laba-lacey 2 1e7".into(),
            laba_lacey_set(2, &BigUint::from(10_000_000u32)).map_err(|e| e.to_string()),
        ),
    ];
    for (label, first) in again {
        let second = match label.split(' ').next().unwrap() {
            "behrend" => behrend_set(66, 4).map_err(|e| e.to_string()),
            "poly-base" => ConstructionParams::with_min_c0(616, 2, 2, 5)
                .and_then(|p| poly_base_set(2, &p))
                .map_err(|e| e.to_string()),
            "salem-spencer" => salem_spencer_set(10, 5, Ratio::new(1, 2)).map_err(|e| e.to_string()),
            _ => laba_lacey_set(2, &BigUint::from(10_000_000u32)).map_err(|e| e.to_string()),
        };
        match (first, second) {
            (Ok(a), Ok(b)) if a.to_text() == b.to_text() => {}
            (a, b) => failures.push(format!("{label}: rebuild differs ({:?} / {:?})", a.err(), b.err())),
        }
    }
    let mut records = Vec::new();
    for b in built {
        let text = b.set.to_text();
        match IntegerSet::parse(&text) {
            Ok(back) if back == b.set && back.to_text() == text => {}
            Ok(_) => failures.push(format!("{}: set file parse-back differs", b.label)),
            Err(e) => failures.push(format!("{}: {e}", b.label)),
        }
        records.push(density_record(&b.set, b.k).unwrap());
    }
    let csv = export_csv(&records);
    match parse_csv(&csv) {
        Ok(back) if export_csv(&back) == csv && back.len() == records.len() => {}
        _ => failures.push("density CSV parse-back differs".into()),
    }
    let mut histograms = 0;
    for (n, d, m, k) in [(22u64, 6usize, 1u32, 3u32), (220, 3, 1, 3), (68, 4, 1, 5), (616, 3, 2, 5), (1232, 2, 2, 5)] {
        let p = ConstructionParams::with_min_c0(n, d, m, k).unwrap();
        let q = p.q as i64;
        let det = p.det;
        for (shift, scale) in [(0i64, 1u64), (2 * q, det * det)] {
            let h = sphere_histogram(&p, shift, scale).unwrap();
            let mass = (2 * p.q as u128 + 1).pow(d as u32);
            if h.total() != mass {
                failures.push(format!("histogram mass {} != {mass} for {p}", h.total()));
            }
            let h2 = sphere_histogram(&p, shift, scale).unwrap();
            if h != h2 {
                failures.push(format!("histogram not reproducible for {p}"));
            }
            histograms += 1;
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{} set files and {} CSV rows round-tripped, {histograms} histograms with exact mass",
            built.len(),
            records.len()
        ),
    )
    .detail(failures)
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let built = match build_all() {
        Ok(b) => b,
        Err(e) => {
            println!("acceptance: construction failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "constructions verify clean", criterion_1(&built)),
        (2, "Behrend exponent shape", criterion_2()),
        (3, "two-level exponent or size", criterion_3()),
        (4, "pigeonhole inequalities", criterion_4(&built)),
        (5, "exact-value oracles", criterion_5()),
        (6, "digitwise interpolation identity", criterion_6()),
        (7, "no equal-norm polynomial curves", criterion_7()),
        (8, "determinism and round-trips", criterion_8(&built)),
    ];
    let mut unexpected = 0;
    for (id, name, outcome) in &results {
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if !outcome.pass && KNOWN_RED.contains(id) {
            " [known red]"
        } else {
            ""
        };
        println!("criterion {id} ({name}): {verdict}{note} - {}", outcome.summary);
        for line in &outcome.details {
            println!("    {line}");
        }
        if !outcome.pass && !KNOWN_RED.contains(id) {
            unexpected += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
