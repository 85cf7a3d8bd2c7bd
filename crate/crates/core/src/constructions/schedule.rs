//! Parameter schedule and the full multi-level construction.
//!
//! For depth `k` the target avoids progressions of length `1 + 2^k`.
//! Level `l = k, k−1, …, 1` uses degree `m = 2^{k−l}`; level 1 is a single
//! sphere, and each level above it lifts the set below through an inductive
//! step, so the ambient interval of level `l − 1` must fit inside the radius
//! range `[0, D²dq²)` of level `l`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::params::round_up_to_multiple;
use super::{inductive_step, min_c0, poly_base_set, ConstructionParams};
use crate::analysis::ln_big;
use crate::error::{param, Error, Result};
use crate::set::IntegerSet;

/// Largest supported depth.
pub const MAX_THEOREM_K: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    /// Level number `l`; `1` is the base.
    pub index: u32,
    pub params: ConstructionParams,
    /// Radius range of the level above, which bounds this level's ambient size.
    pub cap: Option<u128>,
}

/// Levels from the outermost (`l = k`) down to the base (`l = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSchedule {
    pub theorem_k: u32,
    pub length: u32,
    pub budget: BigUint,
    pub levels: Vec<Level>,
}

impl LevelSchedule {
    pub fn outer(&self) -> &Level {
        &self.levels[0]
    }

    pub fn base(&self) -> &Level {
        self.levels.last().expect("a schedule has at least one level")
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.len() != self.theorem_k as usize {
            return Err(Error::Invariant(format!(
                "{} levels for depth {}",
                self.levels.len(),
                self.theorem_k
            )));
        }
        for (i, level) in self.levels.iter().enumerate() {
            level.params.validate()?;
            let expect = self.theorem_k - i as u32;
            if level.index != expect || level.params.m != 1 << (self.theorem_k - expect) {
                return Err(Error::Invariant(format!("level {i} is out of order")));
            }
            if level.params.k != self.length {
                return Err(Error::Invariant(format!(
                    "level {} avoids length {} instead of {}",
                    level.index, level.params.k, self.length
                )));
            }
            if i > 0 {
                let cap = self.levels[i - 1].params.radius_range();
                if level.cap != Some(cap) || level.params.big_n > BigUint::from(cap) {
                    return Err(Error::Invariant(format!(
                        "level {} has N = {} above the radius range {cap} of the level above",
                        level.index, level.params.big_n
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "theorem_k={} length={} budget={}",
            self.theorem_k, self.length, self.budget
        );
        for level in &self.levels {
            let p = &level.params;
            let _ = write!(
                out,
                "level {}: n={} d={} q={} c0={} m={} D={} N={} radius_range={}",
                level.index,
                p.n,
                p.d,
                p.q,
                p.c0,
                p.m,
                p.det,
                p.big_n,
                p.radius_range()
            );
            if let Some(cap) = level.cap {
                let _ = write!(out, " cap={cap}");
            }
            out.push('\n');
        }
        out
    }
}

/// `⌊(ln x)^{1/(l+1)}⌋`, at least 1.
fn level_dimension(ln_x: f64, l: u32) -> usize {
    (ln_x.max(1.0).powf(1.0 / (l as f64 + 1.0)).floor() as usize).max(1)
}

/// Inner levels `l, l−1, …, 1` under the cap `cap`; the first feasible
/// dimension (largest first) at each level that lets the rest complete.
fn inner_levels(theorem_k: u32, length: u32, l: u32, cap: u128) -> Result<Option<Vec<Level>>> {
    if l == 0 {
        return Ok(Some(Vec::new()));
    }
    let m = 1u32 << (theorem_k - l);
    let c0 = min_c0(m, length)?;
    let top = level_dimension((cap as f64).ln(), l);
    for d in (1..=top).rev() {
        let root = BigUint::from(cap).nth_root(d as u32).to_u64().unwrap_or(u64::MAX);
        let n = root / c0 * c0;
        if n < c0 {
            continue;
        }
        let params = ConstructionParams::new(n, d, m, length, c0)?;
        if params.big_n > BigUint::from(cap) {
            continue;
        }
        let below = params.radius_range();
        if let Some(mut rest) = inner_levels(theorem_k, length, l - 1, below)? {
            let mut levels = vec![Level {
                index: l,
                params,
                cap: Some(cap),
            }];
            levels.append(&mut rest);
            return Ok(Some(levels));
        }
    }
    Ok(None)
}

/// Level parameters for depth `k` with ambient size near `budget`.
///
/// The outer base is `⌈budget^{1/d}⌉` rounded up to a multiple of `c_0`, so the
/// realised `N` may exceed the budget. Inner bases are rounded down so each
/// level fits the radius range above it; when that fails the dimension is
/// lowered, outer level included.
pub fn build_schedule(k: u32, budget: &BigUint) -> Result<LevelSchedule> {
    if !(1..=MAX_THEOREM_K).contains(&k) {
        return Err(param(format!(
            "depth must lie in 1..={MAX_THEOREM_K}, got {k}"
        )));
    }
    if budget < &BigUint::from(2u32) {
        return Err(param("budget must be at least 2"));
    }
    let length = 1 + (1u32 << k);
    let c0 = min_c0(1, length)?;
    let top = level_dimension(ln_big(budget), k);
    for d in (1..=top).rev() {
        let mut root = budget.nth_root(d as u32);
        if root.pow(d as u32) < *budget {
            root += 1u32;
        }
        let Some(root) = root.to_u64() else { continue };
        let n = round_up_to_multiple(root, c0);
        let params = match ConstructionParams::new(n, d, 1, length, c0) {
            Ok(p) => p,
            Err(Error::Parameter(_)) => continue,
            Err(e) => return Err(e),
        };
        let cap = params.radius_range();
        if let Some(mut rest) = inner_levels(k, length, k - 1, cap)? {
            let mut levels = vec![Level {
                index: k,
                params,
                cap: None,
            }];
            levels.append(&mut rest);
            let schedule = LevelSchedule {
                theorem_k: k,
                length,
                budget: budget.clone(),
                levels,
            };
            schedule.validate()?;
            return Ok(schedule);
        }
    }
    Err(param(format!(
        "no feasible schedule for depth {k} with budget {budget}"
    )))
}

/// Set free of `(1 + 2^k)`-term progressions, built level by level from the
/// schedule for `budget`.
pub fn laba_lacey_set(k: u32, budget: &BigUint) -> Result<IntegerSet> {
    let schedule = build_schedule(k, budget)?;
    let base = schedule.base();
    let mut set = poly_base_set(base.params.m, &base.params)?;
    for level in schedule.levels.iter().rev().skip(1) {
        set = inductive_step(&set, &level.params)?;
    }
    let mut provenance = set.provenance().clone();
    provenance.construction = "laba-lacey".into();
    provenance.k = schedule.length;
    provenance.m = 1;
    let mut params = vec![
        ("theorem_k".to_string(), k.to_string()),
        ("budget".to_string(), budget.to_string()),
        ("levels".to_string(), schedule.levels.len().to_string()),
    ];
    for level in &schedule.levels {
        params.extend(level.params.record(&format!("level{}.", level.index)));
    }
    let shift = provenance.param("shift").map(str::to_string);
    if let Some(s) = shift {
        params.push((format!("level{k}.shift"), s));
    }
    provenance.params = params;
    // Certificates run from the base outwards.
    for (cert, level) in provenance
        .certificates
        .iter_mut()
        .zip(schedule.levels.iter().rev())
    {
        cert.label = format!("level{}.{}", level.index, cert.label);
    }
    *set.provenance_mut() = provenance;
    Ok(set)
}
