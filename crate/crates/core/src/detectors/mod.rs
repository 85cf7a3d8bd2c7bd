//! Exhaustive detectors for forbidden configurations and exact extremal
//! values at tiny scale.
//!
//! A degree-`m`, length-`k` configuration is `{x + Σ_{i=1..m} a_i j^i : 0 ≤ j < k}`
//! with some `a_i ≠ 0`. Values may repeat, so a configuration can have fewer
//! than `k` distinct elements. For `m = 1` these are the `k`-term arithmetic
//! progressions.

mod extremal;
mod lookup;
mod progression;

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use crate::analysis::{density_record, DensityRecord};
use crate::error::{Error, Result};
use crate::set::IntegerSet;

pub use extremal::{
    exact_r, exact_r_enumerate, exact_r_m, exact_r_m_branch_bound, exact_r_m_enumerate,
    exact_r_m_with, exact_r_with, SearchBudget,
};
pub use progression::{find_arith_progression, find_poly_progression};

/// A concrete forbidden configuration inside a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressionWitness {
    pub m: u32,
    pub k: u32,
    pub x: BigInt,
    /// `a_1, …, a_m`.
    pub coefficients: Vec<BigInt>,
    /// `x + Σ a_i j^i` for `j = 0, …, k−1`.
    pub elements: Vec<BigInt>,
}

impl ProgressionWitness {
    pub(crate) fn from_parts(m: u32, k: u32, x: i128, coefficients: &[i128]) -> Self {
        let x_big = BigInt::from(x);
        let coeffs: Vec<BigInt> = coefficients.iter().map(|&a| BigInt::from(a)).collect();
        let elements = (0..k)
            .map(|j| evaluate(&x_big, &coeffs, j))
            .collect();
        Self {
            m,
            k,
            x: x_big,
            coefficients: coeffs,
            elements,
        }
    }

    /// Checks the witness against its own definition and against `set`.
    pub fn validate(&self, set: &IntegerSet) -> Result<()> {
        if self.coefficients.len() != self.m as usize {
            return Err(Error::Invariant(format!(
                "witness has {} coefficients for degree {}",
                self.coefficients.len(),
                self.m
            )));
        }
        if self.coefficients.iter().all(|a| a == &BigInt::ZERO) {
            return Err(Error::Invariant("witness polynomial is constant".into()));
        }
        if self.elements.len() != self.k as usize {
            return Err(Error::Invariant("witness has the wrong number of elements".into()));
        }
        for (j, e) in self.elements.iter().enumerate() {
            if e != &evaluate(&self.x, &self.coefficients, j as u32) {
                return Err(Error::Invariant(format!("witness element {j} mismatches")));
            }
            if !set.contains(e) {
                return Err(Error::Invariant(format!("witness element {e} is not in the set")));
            }
        }
        Ok(())
    }
}

fn evaluate(x: &BigInt, coefficients: &[BigInt], j: u32) -> BigInt {
    let j = BigInt::from(j);
    let mut pow = j.clone();
    let mut acc = x.clone();
    for a in coefficients {
        acc += a * &pow;
        pow *= &j;
    }
    acc
}

impl fmt::Display for ProgressionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "x={} a=[{}] elements={}",
            self.x,
            join(&self.coefficients),
            join(&self.elements)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Clean => "clean",
            Verdict::Violated => "violated",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub witness: Option<ProgressionWitness>,
    pub m: u32,
    pub k: u32,
    pub set_size: usize,
    /// Candidate pairs (for `m = 1`) or interpolating tuples examined.
    pub tuples_checked: u64,
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.verdict == Verdict::Clean
    }

    /// Line-oriented `key: value` text report.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "verdict: {}\nm: {}\nk: {}\nset_size: {}\ntuples_checked: {}\nwall_time_ms: {:.3}\n",
            self.verdict,
            self.m,
            self.k,
            self.set_size,
            self.tuples_checked,
            self.wall_time.as_secs_f64() * 1e3
        );
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness: {w}\n"));
        }
        out
    }

    /// The verified set's density record, in the schema used by `analysis`.
    pub fn to_record(&self, set: &IntegerSet) -> Result<DensityRecord> {
        density_record(set, self.k)
    }
}

/// Runs the matching detector and packages the outcome.
///
/// `m = 1` with `k ≥ 3` uses the pair-based progression search; every other
/// case goes through the interpolation search.
pub fn verify_set(set: &IntegerSet, m: u32, k: u32) -> Result<VerificationReport> {
    let start = Instant::now();
    let (witness, tuples_checked) = if m == 1 && k >= 3 {
        progression::arith_search(set, k)?
    } else {
        progression::poly_search(set, m, k)?
    };
    if let Some(w) = &witness {
        w.validate(set)?;
    }
    Ok(VerificationReport {
        verdict: if witness.is_some() {
            Verdict::Violated
        } else {
            Verdict::Clean
        },
        witness,
        m,
        k,
        set_size: set.len(),
        tuples_checked,
        wall_time: start.elapsed(),
    })
}
