//! Balanced base-`n` expansions and the cube `rQ`.
//!
//! Every integer of the symmetric interval of length `n^d` has a unique
//! expansion `x = Σ x_i n^i` with digits in `[⌊n/2⌋ + 1 − n, ⌊n/2⌋]`. For odd
//! `n` that range is `[−(n−1)/2, (n−1)/2]`, for even `n` it is `(−n/2, n/2]`.
//! Digits are stored least-significant first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::constructions::ConstructionParams;
use crate::error::{param, Error, Result};

/// Smallest and largest admissible digit for base `n`.
pub fn digit_bounds(n: u64) -> (i64, i64) {
    let hi = (n / 2) as i64;
    (hi + 1 - n as i64, hi)
}

/// Smallest and largest integer with a `d`-digit balanced expansion in base `n`.
pub fn representable_range(n: u64, d: usize) -> (BigInt, BigInt) {
    let (lo, hi) = digit_bounds(n);
    let repunit = repunit(n, d);
    (&repunit * lo, &repunit * hi)
}

/// Translation that maps the symmetric interval onto `{0, …, n^d − 1}`.
pub fn interval_offset(n: u64, d: usize) -> BigInt {
    -representable_range(n, d).0
}

/// `Σ_{i<d} n^i`.
pub(crate) fn repunit(n: u64, d: usize) -> BigInt {
    let base = BigInt::from(n);
    let mut acc = BigInt::zero();
    let mut pow = BigInt::one();
    for _ in 0..d {
        acc += &pow;
        pow *= &base;
    }
    acc
}

fn check_base(n: u64, d: usize) -> Result<()> {
    if n < 3 {
        return Err(param(format!("base must be at least 3, got {n}")));
    }
    if d < 1 {
        return Err(param("digit count must be at least 1"));
    }
    if n > i64::MAX as u64 {
        return Err(param(format!("base {n} exceeds the supported digit width")));
    }
    Ok(())
}

/// The coordinate vector of an integer: its balanced digits in base `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BalancedDigits {
    base: u64,
    digits: Vec<i64>,
}

impl BalancedDigits {
    /// Wraps a digit vector, rejecting digits outside the balanced range.
    pub fn new(base: u64, digits: Vec<i64>) -> Result<Self> {
        check_base(base, digits.len())?;
        let (lo, hi) = digit_bounds(base);
        if let Some((i, &x)) = digits.iter().enumerate().find(|(_, &x)| x < lo || x > hi) {
            return Err(Error::Invariant(format!(
                "digit {i} = {x} outside the balanced range [{lo}, {hi}] for base {base}"
            )));
        }
        Ok(Self { base, digits })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&x| x == 0)
    }

    pub fn value(&self) -> BigInt {
        eval_digits(&self.digits, self.base)
    }

    pub fn norm_sq(&self) -> u128 {
        norm_sq(&self.digits)
    }
}

impl fmt::Display for BalancedDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Balanced expansion of `x` with exactly `d` digits.
pub fn to_balanced_digits(x: &BigInt, n: u64, d: usize) -> Result<BalancedDigits> {
    check_base(n, d)?;
    let (min, max) = representable_range(n, d);
    if x < &min || x > &max {
        return Err(Error::Range(format!(
            "{x} is not representable with {d} balanced digits in base {n} (range [{min}, {max}])"
        )));
    }
    let (_, hi) = digit_bounds(n);
    let base = BigInt::from(n);
    let mut rest = x.clone();
    let mut digits = Vec::with_capacity(d);
    for _ in 0..d {
        let (quot, rem) = rest.div_mod_floor(&base);
        // rem lies in [0, n); n fits in i64 by check_base.
        let mut digit = rem.to_i64().expect("remainder below base");
        rest = quot;
        if digit > hi {
            digit -= n as i64;
            rest += 1;
        }
        digits.push(digit);
    }
    debug_assert!(rest.is_zero());
    Ok(BalancedDigits { base: n, digits })
}

/// `Σ x_i n^i`, rejecting digits outside the balanced range for `n`.
pub fn from_digits(digits: &[i64], n: u64) -> Result<BigInt> {
    let v = BalancedDigits::new(n, digits.to_vec())?;
    Ok(v.value())
}

fn eval_digits(digits: &[i64], n: u64) -> BigInt {
    let base = BigInt::from(n);
    digits
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &x| acc * &base + x)
}

/// `Σ x_i²`.
pub fn norm_sq(digits: &[i64]) -> u128 {
    digits
        .iter()
        .map(|&x| {
            let a = x.unsigned_abs() as u128;
            a * a
        })
        .sum()
}

/// Membership in `rQ`: every balanced digit bounded by `shell · q` in absolute value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubeMembership {
    pub shell: u64,
    pub bound: u64,
}

impl CubeMembership {
    pub fn new(shell: u64, bound: u64) -> Self {
        Self { shell, bound }
    }

    pub fn limit(&self) -> u128 {
        self.shell as u128 * self.bound as u128
    }

    pub fn contains_digits(&self, v: &BalancedDigits) -> bool {
        let limit = self.limit();
        v.digits().iter().all(|x| (x.unsigned_abs() as u128) <= limit)
    }

    /// Whether `x` (a value of the symmetric interval for `(n, d)`) lies in `rQ`.
    /// Values outside the interval are never members.
    pub fn contains(&self, x: &BigInt, n: u64, d: usize) -> Result<bool> {
        check_base(n, d)?;
        match to_balanced_digits(x, n, d) {
            Ok(v) => Ok(self.contains_digits(&v)),
            Err(Error::Range(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// The anchor point whose balanced digits all equal `2q`.
pub fn anchor(params: &ConstructionParams) -> BigInt {
    repunit(params.n, params.d) * BigInt::from(2 * params.q)
}

/// `D² · ‖x − X‖²` computed digitwise, for `x ∈ Q` and the anchor `X`.
pub fn shifted_norm_sq(x: &BigInt, anchor: &BigInt, params: &ConstructionParams) -> Result<u128> {
    let (n, d, q) = (params.n, params.d, params.q);
    let v = to_balanced_digits(x, n, d)?;
    if !CubeMembership::new(1, q).contains_digits(&v) {
        return Err(Error::Membership {
            value: x.to_string(),
            shell: 1,
            q,
        });
    }
    let a = to_balanced_digits(anchor, n, d)?;
    if a.digits().iter().any(|&x| x != 2 * q as i64) {
        return Err(param(format!(
            "anchor {anchor} does not have every digit equal to 2q = {}",
            2 * q
        )));
    }
    let raw: u128 = v
        .digits()
        .iter()
        .map(|&x| {
            let t = (2 * q as i64 - x) as u128;
            t * t
        })
        .sum();
    let det = params.det as u128;
    raw.checked_mul(det * det)
        .ok_or_else(|| Error::Overflow("shifted norm exceeds 128 bits".into()))
}

/// Whether `Σ r_k |a_k| < c_0 / 3` for the `(coefficient, shell)` pairs.
///
/// When true, combining members of the shells `r_k Q` with these coefficients
/// produces no carries, so the combination's balanced digits are the same
/// combination of the individual digit vectors.
pub fn lincomb_budget_ok(terms: &[(i64, u64)], c0: u64) -> bool {
    let mut total: u128 = 0;
    for &(a, r) in terms {
        total = match total.checked_add(a.unsigned_abs() as u128 * r as u128) {
            Some(t) => t,
            None => return false,
        };
    }
    total.checked_mul(3).is_some_and(|t| t < c0 as u128)
}

/// Digitwise combination `Σ a_k v_k` of coordinate vectors of equal length.
pub fn combine_digits(terms: &[(i64, &BalancedDigits)]) -> Vec<i128> {
    let d = terms.first().map_or(0, |(_, v)| v.len());
    let mut out = vec![0i128; d];
    for (a, v) in terms {
        for (o, &x) in out.iter_mut().zip(v.digits()) {
            *o += *a as i128 * x as i128;
        }
    }
    out
}

/// `|x|` as an `i128` when it fits.
pub(crate) fn to_i128(x: &BigInt) -> Option<i128> {
    if x.abs().bits() > 126 {
        None
    } else {
        x.to_i128()
    }
}
