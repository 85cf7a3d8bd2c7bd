//! Exact squared-norm histograms of the cube and enumeration of chosen fibres.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::ConstructionParams;
use crate::digits::to_i128;
use crate::error::{param, Error, Result};
use crate::set::{IntegerSet, Provenance};

const CHUNK: usize = 1 << 12;
/// Hard cap on the number of points a single enumeration may return.
pub const ENUMERATION_CAP: u128 = 50_000_000;
/// Largest norm range handled with dense tables.
const DENSE_SPAN: usize = 1 << 25;
/// Largest number of distinct partial norms tracked sparsely.
const SPARSE_ENTRIES: usize = 1 << 24;

fn resource(message: String) -> Error {
    Error::Resource {
        message,
        best_lower_bound: None,
    }
}

/// Counts of cube points by `scale · Σ (x_i − shift)²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusHistogram {
    /// Nonzero `(Σ (x_i − shift)², count)` pairs by increasing unscaled norm.
    counts: Vec<(u128, u128)>,
    shift: i64,
    scale: u64,
    d: usize,
    q: u64,
}

impl RadiusHistogram {
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn bound(&self) -> u64 {
        self.q
    }

    /// Number of cube points whose scaled norm equals `r`.
    #[inline]
    pub fn get(&self, r: u128) -> u128 {
        let scale = self.scale as u128;
        if !r.is_multiple_of(scale) {
            return 0;
        }
        let idx = r / scale;
        match self.counts.binary_search_by_key(&idx, |e| e.0) {
            Ok(pos) => self.counts[pos].1,
            Err(_) => 0,
        }
    }

    /// Largest scaled key with a nonzero count.
    pub fn max_key(&self) -> u128 {
        self.counts.last().map_or(0, |e| e.0) * self.scale as u128
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|e| e.1).sum()
    }

    /// Number of distinct radii present.
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    /// Nonzero `(scaled radius, count)` pairs in increasing radius order.
    pub fn iter(&self) -> impl Iterator<Item = (u128, u128)> + '_ {
        let scale = self.scale as u128;
        self.counts.iter().map(move |&(i, c)| (i * scale, c))
    }

    /// The most populated radius; the smallest one on ties.
    pub fn argmax(&self) -> (u128, u128) {
        let mut best = (0u128, 0u128);
        for (r, c) in self.iter() {
            if c > best.1 {
                best = (r, c);
            }
        }
        best
    }

    /// `r,count` CSV with a header line, nonzero rows only.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,count")?;
        for (r, c) in self.iter() {
            writeln!(w, "{r},{c}")?;
        }
        Ok(())
    }
}

/// Distinct unscaled digit weights `(v − shift)²` with multiplicities.
fn digit_weights(q: u64, shift: i64) -> Vec<(usize, u128)> {
    let mut map: BTreeMap<usize, u128> = BTreeMap::new();
    let q = q as i64;
    for v in -q..=q {
        let t = (v - shift).unsigned_abs() as usize;
        *map.entry(t * t).or_default() += 1;
    }
    map.into_iter().collect()
}

fn check_shape(params: &ConstructionParams, shift: i64, scale: u64) -> Result<()> {
    if scale == 0 {
        return Err(param("histogram scale must be positive"));
    }
    if shift.unsigned_abs() > 2 * params.q {
        return Err(param(format!(
            "shift {shift} outside [-2q, 2q] for q = {}",
            params.q
        )));
    }
    Ok(())
}

/// Rough operation counts of the dense and sparse convolutions.
fn dense_is_cheaper(n_weights: usize, max_w: usize, d: usize) -> bool {
    let (w, m) = (n_weights as f64, max_w as f64);
    let mut dense = 0.0;
    let mut sparse = 0.0;
    for t in 1..=d {
        let span = t as f64 * m;
        dense += span * w;
        // Sorting the sparse pairs costs a log factor on top.
        sparse += span.min(w.powi(t as i32 - 1)) * w * 8.0;
    }
    dense <= sparse
}

fn dense_histogram(weights: &[(usize, u128)], d: usize) -> Vec<(u128, u128)> {
    let max_w = weights.last().map_or(0, |w| w.0);
    let mut counts = vec![1u128];
    for _ in 0..d {
        let old = &counts;
        let mut next = vec![0u128; old.len() + max_w];
        next.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(ci, chunk)| {
                let base = ci * CHUNK;
                for (o, slot) in chunk.iter_mut().enumerate() {
                    let r = base + o;
                    let mut acc = 0u128;
                    for &(w, mult) in weights {
                        if w > r {
                            break;
                        }
                        if let Some(&c) = old.get(r - w) {
                            acc += mult * c;
                        }
                    }
                    *slot = acc;
                }
            });
        counts = next;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|e| e.1 > 0)
        .map(|(i, c)| (i as u128, c))
        .collect()
}

fn sparse_histogram(weights: &[(usize, u128)], d: usize) -> Result<Vec<(u128, u128)>> {
    let mut counts: Vec<(u128, u128)> = vec![(0, 1)];
    for _ in 0..d {
        if counts.len().saturating_mul(weights.len()) > SPARSE_ENTRIES * 4 {
            return Err(resource(format!(
                "sparse histogram with {} partial norms exceeds the working limit",
                counts.len()
            )));
        }
        let mut next: Vec<(u128, u128)> = counts
            .par_iter()
            .flat_map_iter(|&(p, c)| weights.iter().map(move |&(w, m)| (p + w as u128, c * m)))
            .collect();
        next.par_sort_unstable_by_key(|e| e.0);
        next.dedup_by(|later, kept| {
            if later.0 == kept.0 {
                kept.1 += later.1;
                true
            } else {
                false
            }
        });
        counts = next;
    }
    Ok(counts)
}

/// Exact histogram of `scale · Σ (x_i − shift)²` over `Q`, by a digit-by-digit
/// convolution with the single-digit weights.
pub fn sphere_histogram(
    params: &ConstructionParams,
    shift: i64,
    scale: u64,
) -> Result<RadiusHistogram> {
    check_shape(params, shift, scale)?;
    // Every entry is bounded by the total mass, so this rules out overflow.
    let mass = params.cube_size()?;
    let weights = digit_weights(params.q, shift);
    let max_w = weights.last().map_or(0, |w| w.0);
    let span = params.d.saturating_mul(max_w).saturating_add(1);
    let counts = if span <= DENSE_SPAN && dense_is_cheaper(weights.len(), max_w, params.d) {
        dense_histogram(&weights, params.d)
    } else {
        sparse_histogram(&weights, params.d)?
    };
    let hist = RadiusHistogram {
        counts,
        shift,
        scale,
        d: params.d,
        q: params.q,
    };
    if hist.total() != mass {
        return Err(Error::Invariant(format!(
            "histogram mass {} differs from (2q+1)^d = {mass}",
            hist.total()
        )));
    }
    Ok(hist)
}

/// All `x ∈ Q` whose scaled, shifted squared norm lies in `targets`,
/// translated into `{0, …, N−1}` and sorted.
///
/// Digits are chosen from the most significant position down; a prefix is
/// extended only when the remaining positions can still reach some target,
/// so no branch dead-ends.
pub fn enumerate_sphere(
    params: &ConstructionParams,
    targets: &[u128],
    shift: i64,
    scale: u64,
) -> Result<IntegerSet> {
    if targets.is_empty() {
        return Err(param("target radius set is empty"));
    }
    check_shape(params, shift, scale)?;
    let elements = enumerate_points(params, targets, shift, scale)?;
    let mut provenance = Provenance::new("sphere", params.k, params.m);
    provenance.offset = params.offset();
    provenance.params = params.record("");
    provenance.params.push(("shift".into(), shift.to_string()));
    provenance.params.push(("scale".into(), scale.to_string()));
    IntegerSet::new(elements, params.big_n.clone(), provenance)
}

pub(crate) fn enumerate_points(
    params: &ConstructionParams,
    targets: &[u128],
    shift: i64,
    scale: u64,
) -> Result<Vec<BigInt>> {
    let d = params.d;
    let weights: Vec<usize> = {
        let q = params.q as i64;
        (-q..=q)
            .map(|v| {
                let t = (v - shift).unsigned_abs() as usize;
                t * t
            })
            .collect()
    };
    let max_w = *weights.iter().max().unwrap_or(&0);
    let span = d.saturating_mul(max_w).saturating_add(1);
    let mut distinct = weights.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let feasible = if span <= DENSE_SPAN && dense_is_cheaper(distinct.len(), max_w, d) {
        dense_reach(&distinct, targets, scale, span, d)
    } else {
        sparse_reach(&distinct, targets, scale, d)?
    };
    if !feasible[d].contains(0) {
        return Ok(Vec::new());
    }

    let offset = params.offset();
    let fast = to_i128(&(BigInt::from(params.big_n.clone()) + &offset)).is_some();
    let walker = Walker {
        params,
        weights: &weights,
        feasible: &feasible,
    };
    let q = params.q as i64;
    let branches: Vec<Result<Vec<BigInt>>> = (-q..=q)
        .into_par_iter()
        .map(|top| {
            let w = weights[(top + q) as usize];
            if d == 0 || !feasible[d - 1].contains(w) {
                return Ok(Vec::new());
            }
            let mut digits = vec![0i64; d];
            digits[d - 1] = top;
            let mut out = Vec::new();
            walker.walk(d - 1, w, &mut digits, &mut out)?;
            Ok(out
                .into_iter()
                .map(|ds| walker.value(&ds, fast, &offset))
                .collect())
        })
        .collect();
    let mut elements = Vec::new();
    for b in branches {
        elements.extend(b?);
    }
    debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
    Ok(elements)
}

/// Partial norms from which some target is still reachable.
enum Reach {
    Dense(Vec<bool>),
    Sparse(HashSet<usize>),
}

impl Reach {
    #[inline]
    fn contains(&self, p: usize) -> bool {
        match self {
            Reach::Dense(v) => v.get(p).copied().unwrap_or(false),
            Reach::Sparse(set) => set.contains(&p),
        }
    }
}

fn unscaled_targets(targets: &[u128], scale: u64) -> impl Iterator<Item = usize> + '_ {
    let scale = scale as u128;
    targets
        .iter()
        .filter(move |&&t| t % scale == 0)
        .filter_map(move |&t| usize::try_from(t / scale).ok())
}

/// `reach[t]`: partial norms with `t` digits left that can still hit a target.
fn dense_reach(weights: &[usize], targets: &[u128], scale: u64, span: usize, d: usize) -> Vec<Reach> {
    let mut first = vec![false; span];
    for t in unscaled_targets(targets, scale) {
        if t < span {
            first[t] = true;
        }
    }
    let mut levels = vec![first];
    for t in 1..=d {
        let prev = &levels[t - 1];
        let level: Vec<bool> = (0..span)
            .into_par_iter()
            .map(|p| weights.iter().any(|&w| p + w < span && prev[p + w]))
            .collect();
        levels.push(level);
    }
    levels.into_iter().map(Reach::Dense).collect()
}

/// Sparse variant, restricted to partial norms the leading digits can produce.
fn sparse_reach(weights: &[usize], targets: &[u128], scale: u64, d: usize) -> Result<Vec<Reach>> {
    // forward[j]: norms of j leading digits.
    let mut forward: Vec<Vec<usize>> = vec![vec![0]];
    for j in 1..d {
        let prev = &forward[j - 1];
        if prev.len().saturating_mul(weights.len()) > SPARSE_ENTRIES * 4 {
            return Err(resource(format!(
                "sphere enumeration tracks more than {SPARSE_ENTRIES} partial norms"
            )));
        }
        let mut next: Vec<usize> = prev
            .par_iter()
            .flat_map_iter(|&p| weights.iter().map(move |&w| p + w))
            .collect();
        next.par_sort_unstable();
        next.dedup();
        forward.push(next);
    }
    let mut levels = vec![unscaled_targets(targets, scale).collect::<HashSet<usize>>()];
    for t in 1..=d {
        let prev = &levels[t - 1];
        let level: HashSet<usize> = forward[d - t]
            .par_iter()
            .copied()
            .filter(|&p| weights.iter().any(|&w| prev.contains(&(p + w))))
            .collect();
        levels.push(level);
    }
    Ok(levels.into_iter().map(Reach::Sparse).collect())
}

struct Walker<'a> {
    params: &'a ConstructionParams,
    weights: &'a [usize],
    feasible: &'a [Reach],
}

impl Walker<'_> {
    /// Digits `pos..d` are fixed in `digits`; `partial` is their norm.
    fn walk(
        &self,
        pos: usize,
        partial: usize,
        digits: &mut [i64],
        out: &mut Vec<Vec<i64>>,
    ) -> Result<()> {
        if pos == 0 {
            out.push(digits.to_vec());
            if out.len() as u128 > ENUMERATION_CAP {
                return Err(Error::Resource {
                    message: format!("sphere enumeration exceeds {ENUMERATION_CAP} points"),
                    best_lower_bound: None,
                });
            }
            return Ok(());
        }
        let q = self.params.q as i64;
        let remaining = pos - 1;
        for v in -q..=q {
            let p = partial + self.weights[(v + q) as usize];
            if self.feasible[remaining].contains(p) {
                digits[pos - 1] = v;
                self.walk(pos - 1, p, digits, out)?;
            }
        }
        Ok(())
    }

    fn value(&self, digits: &[i64], fast: bool, offset: &BigInt) -> BigInt {
        let n = self.params.n;
        if fast {
            let off = to_i128(offset).expect("offset fits when N does");
            let v = digits
                .iter()
                .rev()
                .fold(0i128, |acc, &x| acc * n as i128 + x as i128);
            BigInt::from(v + off)
        } else {
            let base = BigInt::from(n);
            digits
                .iter()
                .rev()
                .fold(BigInt::ZERO, |acc, &x| acc * &base + x)
                + offset
        }
    }
}
