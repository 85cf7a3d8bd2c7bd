use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::lookup::Lookup;
use super::ProgressionWitness;
use crate::error::{param, Result};
use crate::set::IntegerSet;

const MAX_LENGTH: u32 = 1 << 20;
const MAX_DEGREE: u32 = 8;

/// Finds a `k`-term arithmetic progression in `set`.
///
/// Every ordered pair `(x, x + y)` is tried as the first two terms. The
/// returned witness is the lexicographically smallest `(x, a_1)`.
pub fn find_arith_progression(set: &IntegerSet, k: u32) -> Result<Option<ProgressionWitness>> {
    Ok(arith_search(set, k)?.0)
}

/// Finds a degree-`m`, length-`k` polynomial configuration in `set`.
///
/// Each assignment of set elements to the positions `j = 0, …, m` fixes a
/// polynomial of degree at most `m`; it is kept when its monomial
/// coefficients are integers, it is not constant, and its values at
/// `j = m+1, …, k−1` all lie in the set. The lexicographically smallest
/// `(x, a_1, …, a_m)` is returned.
///
/// When `k ≤ m`, `x + j(j−1)⋯(j−k+1)` vanishes on every `j < k`, so any
/// nonempty set contains the single-point configuration; that witness is
/// returned for the smallest element.
pub fn find_poly_progression(
    set: &IntegerSet,
    m: u32,
    k: u32,
) -> Result<Option<ProgressionWitness>> {
    Ok(poly_search(set, m, k)?.0)
}

pub(crate) fn arith_search(set: &IntegerSet, k: u32) -> Result<(Option<ProgressionWitness>, u64)> {
    if k < 3 {
        return Err(param(format!("progression length must be at least 3, got {k}")));
    }
    if k > MAX_LENGTH {
        return Err(param(format!("progression length {k} exceeds {MAX_LENGTH}")));
    }
    let values = set.to_i128()?;
    let lookup = Lookup::new(&values);
    let checked = AtomicU64::new(0);
    let found = (0..values.len()).into_par_iter().find_map_first(|i| {
        let (hit, n) = ap_from(&values, &lookup, i, k);
        checked.fetch_add(n, Ordering::Relaxed);
        hit.map(|y| (values[i], y))
    });
    let witness = found.map(|(x, y)| ProgressionWitness::from_parts(1, k, x, &[y]));
    Ok((witness, checked.into_inner()))
}

/// Smallest common difference `y` (negative first) of a `k`-AP starting at `values[i]`.
fn ap_from(values: &[i128], lookup: &Lookup, i: usize, k: u32) -> (Option<i128>, u64) {
    let x = values[i];
    let (min, max) = (values[0], values[values.len() - 1]);
    let steps = (k - 1) as i128;
    let completes = |y: i128| (2..k as i128).all(|t| lookup.contains(x + t * y));
    let mut checked = 0;

    let start = values[..i].partition_point(|&v| steps * (v - x) < min - x);
    for &v in &values[start..i] {
        checked += 1;
        if completes(v - x) {
            return (Some(v - x), checked);
        }
    }
    for &v in &values[i + 1..] {
        let y = v - x;
        if steps * y > max - x {
            break;
        }
        checked += 1;
        if completes(y) {
            return (Some(y), checked);
        }
    }
    (None, checked)
}

pub(crate) fn poly_search(
    set: &IntegerSet,
    m: u32,
    k: u32,
) -> Result<(Option<ProgressionWitness>, u64)> {
    if m < 1 {
        return Err(param("degree must be at least 1"));
    }
    if m > MAX_DEGREE {
        return Err(param(format!("degree {m} exceeds {MAX_DEGREE}")));
    }
    if k < 2 {
        return Err(param(format!("length must be at least 2, got {k}")));
    }
    if k > MAX_LENGTH {
        return Err(param(format!("length {k} exceeds {MAX_LENGTH}")));
    }
    let values = set.to_i128()?;
    if values.is_empty() {
        return Ok((None, 0));
    }
    if k <= m {
        let falling = falling_factorial_coefficients(k as usize);
        let mut coeffs = vec![0i128; m as usize];
        coeffs[..k as usize].copy_from_slice(&falling[k as usize][1..]);
        return Ok((
            Some(ProgressionWitness::from_parts(m, k, values[0], &coeffs)),
            1,
        ));
    }

    let lookup = Lookup::new(&values);
    let search = TupleSearch::new(&values, &lookup, m as usize, k as usize);
    let checked = AtomicU64::new(0);
    let found = (0..values.len()).into_par_iter().find_map_first(|i| {
        let (best, n) = search.from_base(values[i]);
        checked.fetch_add(n, Ordering::Relaxed);
        best.map(|a| (values[i], a))
    });
    let witness = found.map(|(x, a)| ProgressionWitness::from_parts(m, k, x, &a));
    Ok((witness, checked.into_inner()))
}

/// `falling[t][i]` is the coefficient of `j^i` in `j(j−1)⋯(j−t+1)`.
fn falling_factorial_coefficients(max_t: usize) -> Vec<Vec<i128>> {
    let mut rows = vec![vec![1i128]];
    for t in 0..max_t {
        let prev = &rows[t];
        let mut next = vec![0i128; prev.len() + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= t as i128 * c;
        }
        rows.push(next);
    }
    rows
}

struct TupleSearch<'a> {
    values: &'a [i128],
    lookup: &'a Lookup,
    m: usize,
    k: usize,
    binom: Vec<Vec<i128>>,
    factorial: Vec<i128>,
    falling: Vec<Vec<i128>>,
}

impl<'a> TupleSearch<'a> {
    fn new(values: &'a [i128], lookup: &'a Lookup, m: usize, k: usize) -> Self {
        let mut binom = vec![vec![1i128]];
        for t in 1..=m {
            let prev = &binom[t - 1];
            let mut row = vec![1i128; t + 1];
            for u in 1..t {
                row[u] = prev[u - 1] + prev[u];
            }
            binom.push(row);
        }
        let mut factorial = vec![1i128];
        for t in 1..=m {
            factorial.push(factorial[t - 1] * t as i128);
        }
        Self {
            values,
            lookup,
            m,
            k,
            binom,
            factorial,
            falling: falling_factorial_coefficients(m),
        }
    }

    /// Lexicographically smallest coefficient vector of a configuration with `p(0) = x`.
    fn from_base(&self, x: i128) -> (Option<Vec<i128>>, u64) {
        let mut point = vec![0i128; self.m + 1];
        let mut newton = vec![0i128; self.m + 1];
        point[0] = x;
        newton[0] = x;
        let mut best = None;
        let mut checked = 0;
        self.extend(1, &mut point, &mut newton, &mut best, &mut checked);
        (best, checked)
    }

    fn extend(
        &self,
        t: usize,
        point: &mut [i128],
        newton: &mut [i128],
        best: &mut Option<Vec<i128>>,
        checked: &mut u64,
    ) {
        if t > self.m {
            *checked += 1;
            if let Some(coeffs) = self.accept(newton) {
                if best.as_ref().is_none_or(|b| coeffs < *b) {
                    *best = Some(coeffs);
                }
            }
            return;
        }
        for &v in self.values {
            point[t] = v;
            // t-th forward difference at 0.
            let mut diff = 0i128;
            for u in 0..=t {
                let term = self.binom[t][u] * point[u];
                if (t - u).is_multiple_of(2) {
                    diff += term;
                } else {
                    diff -= term;
                }
            }
            if diff % self.factorial[t] != 0 {
                continue;
            }
            newton[t] = diff / self.factorial[t];
            self.extend(t + 1, point, newton, best, checked);
        }
    }

    /// `newton[t]` holds `Δ^t p(0) / t!`, so `p(j) = Σ_t newton[t] · j^(t falling)`.
    fn accept(&self, newton: &[i128]) -> Option<Vec<i128>> {
        if newton[1..].iter().all(|&b| b == 0) {
            return None;
        }
        for j in self.m + 1..self.k {
            match self.eval(newton, j as i128) {
                Some(v) if self.lookup.contains(v) => {}
                _ => return None,
            }
        }
        let mut coeffs = vec![0i128; self.m];
        for (t, &b) in newton.iter().enumerate() {
            for (i, &s) in self.falling[t].iter().enumerate().skip(1) {
                coeffs[i - 1] += b * s;
            }
        }
        Some(coeffs)
    }

    fn eval(&self, newton: &[i128], j: i128) -> Option<i128> {
        let fast = || {
            let mut acc = 0i128;
            let mut fall = 1i128;
            for (t, &b) in newton.iter().enumerate() {
                acc = acc.checked_add(b.checked_mul(fall)?)?;
                fall = fall.checked_mul(j - t as i128)?;
            }
            Some(acc)
        };
        fast().or_else(|| {
            let mut acc = BigInt::ZERO;
            let mut fall = BigInt::from(1);
            for (t, &b) in newton.iter().enumerate() {
                acc += &fall * b;
                fall *= j - t as i128;
            }
            acc.to_i128()
        })
    }
}
