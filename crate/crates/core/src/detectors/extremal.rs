//! Exact `r(k, N)` and `r_m(k, N)` for intervals that fit in a 64-bit mask.
//!
//! Both quantities depend only on the interval length, so subsets of
//! `{0, …, N−1}` are handled as bitmasks. The branch-and-bound searches
//! compute the values for every length `1, …, N` in turn; a set for length
//! `L` that beats `r(L−1)` must contain both `0` and `L−1`, and the suffix
//! starting at position `p` can contribute at most `r(L−p)`.

use rayon::prelude::*;

use crate::error::{param, Error, Result};

/// Limits for the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest interval length accepted.
    pub max_n: usize,
    /// Search-tree nodes allowed across all lengths.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_n: 40,
            max_nodes: 4_000_000_000,
        }
    }
}

/// Largest interval length for full power-set enumeration.
pub const ENUMERATION_LIMIT: usize = 30;
/// `exact_r_m` enumerates the power set up to this length and branches beyond it.
pub const ENUMERATION_DEFAULT: usize = 22;

/// Exact `r(k, N)` with the default budget.
pub fn exact_r(k: u32, n: usize) -> Result<usize> {
    exact_r_with(k, n, &SearchBudget::default())
}

/// Exact `r(k, N)` by branch and bound over AP-free subsets.
pub fn exact_r_with(k: u32, n: usize, budget: &SearchBudget) -> Result<usize> {
    if k < 3 {
        return Err(param(format!("progression length must be at least 3, got {k}")));
    }
    check_len(n, budget)?;
    let k = k as usize;
    let mut table = vec![0usize; n + 1];
    let mut nodes = 0u64;
    for len in 1..=n {
        let target = table[len - 1] + 1;
        let mut search = ApSearch {
            k,
            len,
            target,
            table: &table,
            nodes: &mut nodes,
            max_nodes: budget.max_nodes,
        };
        let found = search.run(1, 1, 1)?;
        table[len] = if found { target } else { target - 1 };
        if nodes > budget.max_nodes {
            return Err(resource(nodes, table[len]));
        }
    }
    Ok(table[n])
}

struct ApSearch<'a> {
    k: usize,
    len: usize,
    target: usize,
    table: &'a [usize],
    nodes: &'a mut u64,
    max_nodes: u64,
}

impl ApSearch<'_> {
    /// Decides positions `pos..len` given `mask` (elements below `pos`).
    fn run(&mut self, pos: usize, mask: u64, count: usize) -> Result<bool> {
        if count >= self.target {
            return Ok(true);
        }
        if pos >= self.len {
            return Ok(false);
        }
        *self.nodes += 1;
        if *self.nodes > self.max_nodes {
            return Err(resource(*self.nodes, self.target - 1));
        }
        if count + self.table[self.len - pos] < self.target {
            return Ok(false);
        }
        let last = pos == self.len - 1;
        if !closes_progression(mask, pos, self.k) && self.run(pos + 1, mask | 1 << pos, count + 1)? {
            return Ok(true);
        }
        // The last position is mandatory for a set that beats length len−1.
        if last {
            return Ok(false);
        }
        self.run(pos + 1, mask, count)
    }
}

/// Whether adding `e` to `mask` (all elements below `e`) completes a `k`-AP ending at `e`.
fn closes_progression(mask: u64, e: usize, k: usize) -> bool {
    let mut y = 1;
    while (k - 1) * y <= e {
        if (1..k).all(|t| mask >> (e - t * y) & 1 == 1) {
            return true;
        }
        y += 1;
    }
    false
}

/// Exact `r(k, N)` by scanning all `2^N` subsets.
pub fn exact_r_enumerate(k: u32, n: usize) -> Result<usize> {
    if k < 3 {
        return Err(param(format!("progression length must be at least 3, got {k}")));
    }
    if n > ENUMERATION_LIMIT {
        return Err(Error::Resource {
            message: format!("power-set enumeration is limited to N ≤ {ENUMERATION_LIMIT}"),
            best_lower_bound: None,
        });
    }
    let k = k as usize;
    let best = (0u64..1 << n)
        .into_par_iter()
        .filter(|&mask| ap_free_mask(mask, k, n))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0);
    Ok(best)
}

fn ap_free_mask(mask: u64, k: usize, n: usize) -> bool {
    let mut y = 1;
    while (k - 1) * y < n {
        let mut hit = mask;
        for t in 1..k {
            hit &= mask >> (t * y);
        }
        if hit != 0 {
            return false;
        }
        y += 1;
    }
    true
}

/// Exact `r_m(k, N)` with the default budget: enumeration for `N ≤ 22`,
/// branch and bound beyond.
pub fn exact_r_m(m: u32, k: u32, n: usize) -> Result<usize> {
    exact_r_m_with(m, k, n, &SearchBudget::default())
}

pub fn exact_r_m_with(m: u32, k: u32, n: usize, budget: &SearchBudget) -> Result<usize> {
    if n <= ENUMERATION_DEFAULT {
        exact_r_m_enumerate(m, k, n)
    } else {
        exact_r_m_branch_bound(m, k, n, budget)
    }
}

/// Exact `r_m(k, N)` by scanning all `2^N` subsets against the minimal
/// configuration masks.
pub fn exact_r_m_enumerate(m: u32, k: u32, n: usize) -> Result<usize> {
    check_poly(m, k)?;
    if n > ENUMERATION_LIMIT {
        return Err(Error::Resource {
            message: format!("power-set enumeration is limited to N ≤ {ENUMERATION_LIMIT}"),
            best_lower_bound: None,
        });
    }
    if n == 0 || k <= m {
        return Ok(0);
    }
    let configs = configuration_masks(m as usize, k as usize, n);
    let best = (0u64..1 << n)
        .into_par_iter()
        .filter(|&mask| configs.iter().all(|&c| mask & c != c))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// Exact `r_m(k, N)` by branch and bound.
pub fn exact_r_m_branch_bound(m: u32, k: u32, n: usize, budget: &SearchBudget) -> Result<usize> {
    check_poly(m, k)?;
    check_len(n, budget)?;
    if n == 0 || k <= m {
        return Ok(0);
    }
    let configs = configuration_masks(m as usize, k as usize, n);
    let mut by_max: Vec<Vec<u64>> = vec![Vec::new(); n];
    for c in configs {
        by_max[63 - c.leading_zeros() as usize].push(c);
    }
    let mut table = vec![0usize; n + 1];
    let mut nodes = 0u64;
    for len in 1..=n {
        let target = table[len - 1] + 1;
        let mut search = ConfigSearch {
            by_max: &by_max,
            len,
            target,
            table: &table,
            nodes: &mut nodes,
            max_nodes: budget.max_nodes,
        };
        let found = !blocked(&by_max[0], 1) && search.run(1, 1, 1)?;
        table[len] = if found { target } else { target - 1 };
    }
    Ok(table[n])
}

struct ConfigSearch<'a> {
    by_max: &'a [Vec<u64>],
    len: usize,
    target: usize,
    table: &'a [usize],
    nodes: &'a mut u64,
    max_nodes: u64,
}

impl ConfigSearch<'_> {
    fn run(&mut self, pos: usize, mask: u64, count: usize) -> Result<bool> {
        if count >= self.target {
            return Ok(true);
        }
        if pos >= self.len {
            return Ok(false);
        }
        *self.nodes += 1;
        if *self.nodes > self.max_nodes {
            return Err(resource(*self.nodes, self.target - 1));
        }
        if count + self.table[self.len - pos] < self.target {
            return Ok(false);
        }
        let with = mask | 1 << pos;
        if !blocked(&self.by_max[pos], with) && self.run(pos + 1, with, count + 1)? {
            return Ok(true);
        }
        if pos == self.len - 1 {
            return Ok(false);
        }
        self.run(pos + 1, mask, count)
    }
}

fn blocked(configs: &[u64], mask: u64) -> bool {
    configs.iter().any(|&c| mask & c == c)
}

/// Element masks of every degree-`m`, length-`k` configuration inside
/// `{0, …, n−1}` (for `k > m`), reduced to the inclusion-minimal ones.
pub(crate) fn configuration_masks(m: usize, k: usize, n: usize) -> Vec<u64> {
    debug_assert!(k > m && n <= 64);
    let factorial: Vec<i64> = (0..=m).map(|t| (1..=t as i64).product()).collect();
    let mut masks = Vec::new();
    let mut point = vec![0i64; m + 1];
    collect_configs(0, m, k, n, &factorial, &mut point, &mut masks);
    masks.sort_unstable_by_key(|c: &u64| (c.count_ones(), *c));
    masks.dedup();
    let mut minimal: Vec<u64> = Vec::new();
    for c in masks {
        if !minimal.iter().any(|&s| c & s == s) {
            minimal.push(c);
        }
    }
    minimal
}

fn collect_configs(
    t: usize,
    m: usize,
    k: usize,
    n: usize,
    factorial: &[i64],
    point: &mut [i64],
    out: &mut Vec<u64>,
) {
    if t > m {
        // Newton coefficients b_t = Δ^t p(0) / t!.
        let mut b = vec![0i64; m + 1];
        for (s, slot) in b.iter_mut().enumerate() {
            let mut diff = 0i64;
            let mut binom = 1i64;
            for u in 0..=s {
                let term = binom * point[u];
                diff += if (s - u) % 2 == 0 { term } else { -term };
                binom = binom * (s - u) as i64 / (u + 1) as i64;
            }
            if diff % factorial[s] != 0 {
                return;
            }
            *slot = diff / factorial[s];
        }
        if b[1..].iter().all(|&x| x == 0) {
            return;
        }
        let mut mask = 0u64;
        for j in 0..k as i64 {
            let mut value = 0i64;
            let mut fall = 1i64;
            for (s, &bs) in b.iter().enumerate() {
                value += bs * fall;
                fall *= j - s as i64;
            }
            if value < 0 || value >= n as i64 {
                return;
            }
            mask |= 1 << value;
        }
        out.push(mask);
        return;
    }
    for v in 0..n as i64 {
        point[t] = v;
        collect_configs(t + 1, m, k, n, factorial, point, out);
    }
}

fn check_poly(m: u32, k: u32) -> Result<()> {
    if m < 1 {
        return Err(param("degree must be at least 1"));
    }
    if k < 2 {
        return Err(param(format!("length must be at least 2, got {k}")));
    }
    if m > 6 || k > 64 {
        return Err(param(format!("(m, k) = ({m}, {k}) outside the exact-search range")));
    }
    Ok(())
}

fn check_len(n: usize, budget: &SearchBudget) -> Result<()> {
    if n > budget.max_n.min(64) {
        return Err(Error::Resource {
            message: format!("N = {n} exceeds the exhaustive-search limit {}", budget.max_n.min(64)),
            best_lower_bound: None,
        });
    }
    Ok(())
}

fn resource(nodes: u64, best: usize) -> Error {
    Error::Resource {
        message: format!("search stopped after {nodes} nodes"),
        best_lower_bound: Some(best),
    }
}
