use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::digits::interval_offset;
use crate::error::{param, Error, Result};

/// `|det (j^i)_{i,j=1..m}|`, by fraction-free elimination.
pub fn vandermonde_det(m: u32) -> Result<BigInt> {
    if m < 1 {
        return Err(param("Vandermonde order must be at least 1"));
    }
    let m = m as usize;
    let mut a: Vec<Vec<BigInt>> = (1..=m)
        .map(|i| (1..=m).map(|j| BigInt::from(j).pow(i as u32)).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return Ok(BigInt::zero());
        };
        if p != col {
            a.swap(p, col);
            sign = -sign;
        }
        for r in col + 1..m {
            for c in col + 1..m {
                let v = &a[r][c] * &a[col][col] - &a[r][col] * &a[col][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[col][col].clone();
    }
    let det = &a[m - 1][m - 1] * sign;
    Ok(det.abs())
}

/// Integer matrix `C = D · V^{-1}` for the interpolation system
/// `x^{(j)} = Σ_{i=0..m} a_i j^i`, `j = 0..m`, so that `D a_i = Σ_j C[i][j] x^{(j)}`.
///
/// The system's determinant `Π_{0≤s<t≤m} (t − s)` equals `vandermonde_det(m)`.
pub fn cramer_matrix(m: u32) -> Result<Vec<Vec<BigInt>>> {
    let det = vandermonde_det(m)?;
    let size = m as usize + 1;
    let mut aug: Vec<Vec<BigRational>> = (0..size)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..size)
                .map(|i| BigRational::from_integer(BigInt::from(j).pow(i as u32)))
                .collect();
            row.extend((0..size).map(|c| {
                if c == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..size {
        let p = (col..size)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or_else(|| Error::Invariant("singular interpolation matrix".into()))?;
        aug.swap(p, col);
        let inv = aug[col][col].recip();
        for v in aug[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..size {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in 0..2 * size {
                    let t = &aug[col][c] * &f;
                    aug[r][c] -= t;
                }
            }
        }
    }
    let scale = BigRational::from_integer(det);
    aug.into_iter()
        .map(|row| {
            row[size..]
                .iter()
                .map(|v| {
                    let s = v * &scale;
                    if s.is_integer() {
                        Ok(s.to_integer())
                    } else {
                        Err(Error::Invariant("Cramer cofactor is not integral".into()))
                    }
                })
                .collect()
        })
        .collect()
}

/// Smallest even `c_0` for which the interpolation identities hold without
/// carries for degree `m` and positions `j = 0, …, k−1`.
///
/// With `s_i = Σ_j |C[i][j]|` the shell of `D a_i` (each `x^{(j)} ∈ Q`), we
/// need `3 (Σ_i s_i j^i + 2D) < c_0` for every `j < k`; the `2D` term covers
/// the anchored variant where `D X` with `X ∈ 2Q` is subtracted.
pub fn min_c0(m: u32, k: u32) -> Result<u64> {
    if m < 1 {
        return Err(param("degree must be at least 1"));
    }
    if k < 2 * m + 1 {
        return Err(param(format!("length {k} is below 2m + 1 = {}", 2 * m + 1)));
    }
    let det = vandermonde_det(m)?;
    let shells: Vec<BigInt> = cramer_matrix(m)?
        .iter()
        .map(|row| row.iter().map(|c| c.abs()).sum())
        .collect();
    let mut worst = BigInt::zero();
    for j in 0..k {
        let j = BigInt::from(j);
        let mut pow = BigInt::one();
        let mut total = BigInt::zero();
        for s in &shells {
            total += s * &pow;
            pow *= &j;
        }
        worst = worst.max(total);
    }
    let budget = (worst + det * 2u32) * 3u32;
    let mut c0 = budget + 1u32;
    if c0.bit(0) {
        c0 += 1u32;
    }
    c0.to_u64()
        .ok_or_else(|| Error::Overflow(format!("c_0 for (m, k) = ({m}, {k}) exceeds 64 bits")))
}

/// Parameters of one construction level.
///
/// Invariants: `q · c_0 = n`, `q ≥ 1`, `c_0 ≥ min_c0(m, k)`, `det = D_m`,
/// `big_n = n^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub n: u64,
    pub d: usize,
    pub q: u64,
    pub c0: u64,
    pub m: u32,
    pub k: u32,
    pub det: u64,
    pub big_n: BigUint,
}

impl ConstructionParams {
    pub fn new(n: u64, d: usize, m: u32, k: u32, c0: u64) -> Result<Self> {
        let required = min_c0(m, k)?;
        if c0 < required {
            return Err(param(format!(
                "c_0 = {c0} is below the required minimum {required} for (m, k) = ({m}, {k})"
            )));
        }
        if d < 1 {
            return Err(param("dimension must be at least 1"));
        }
        if n == 0 || !n.is_multiple_of(c0) {
            return Err(param(format!("base n = {n} must be a positive multiple of c_0 = {c0}")));
        }
        if n > i64::MAX as u64 / 4 {
            return Err(param(format!("base n = {n} is too large")));
        }
        let det = vandermonde_det(m)?
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("D_{m} exceeds 64 bits")))?;
        Ok(Self {
            n,
            d,
            q: n / c0,
            c0,
            m,
            k,
            det,
            big_n: BigUint::from(n).pow(d as u32),
        })
    }

    pub fn with_min_c0(n: u64, d: usize, m: u32, k: u32) -> Result<Self> {
        Self::new(n, d, m, k, min_c0(m, k)?)
    }

    /// Re-checks the invariants of a value that may have been edited in place.
    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(self.n, self.d, self.m, self.k, self.c0)?;
        if &fresh != self {
            return Err(Error::Invariant(format!(
                "inconsistent construction parameters {self}"
            )));
        }
        Ok(())
    }

    /// `(2q + 1)^d`, the number of points of `Q`.
    pub fn cube_size(&self) -> Result<u128> {
        (2 * self.q as u128 + 1)
            .checked_pow(self.d as u32)
            .ok_or_else(|| Error::Overflow(format!("(2q+1)^d overflows for {self}")))
    }

    /// `D² d q²`: the radius set `R` of an inductive step lives in `[0, D² d q²)`.
    pub fn radius_range(&self) -> u128 {
        let det = self.det as u128;
        let q = self.q as u128;
        det * det * self.d as u128 * q * q
    }

    /// `9 D² d q² + 1`, the number of shifts `s ∈ {0, …, 9D²dq²}`.
    pub fn shift_bins(&self) -> u128 {
        9 * self.radius_range() + 1
    }

    /// `d q² + 1`, the number of radii of `Q`.
    pub fn radius_bins(&self) -> u128 {
        let q = self.q as u128;
        self.d as u128 * q * q + 1
    }

    /// Offset that maps the symmetric interval onto `{0, …, N−1}`.
    pub fn offset(&self) -> BigInt {
        interval_offset(self.n, self.d)
    }

    pub(crate) fn record(&self, prefix: &str) -> Vec<(String, String)> {
        [
            ("n", self.n.to_string()),
            ("d", self.d.to_string()),
            ("q", self.q.to_string()),
            ("c0", self.c0.to_string()),
            ("degree", self.m.to_string()),
            ("length", self.k.to_string()),
            ("D", self.det.to_string()),
        ]
        .into_iter()
        .map(|(key, v)| (format!("{prefix}{key}"), v))
        .collect()
    }
}

impl fmt::Display for ConstructionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} d={} q={} c0={} m={} k={} D={} N={}",
            self.n, self.d, self.q, self.c0, self.m, self.k, self.det, self.big_n
        )
    }
}

/// Smallest multiple of `step` that is at least `value` (and at least `step`).
pub(crate) fn round_up_to_multiple(value: u64, step: u64) -> u64 {
    value.max(1).div_ceil(step) * step
}

#[cfg(test)]
mod tests {
    use super::*;

    fn superfactorial(m: u32) -> BigInt {
        (1..=m)
            .map(|i| (1..=i).map(BigInt::from).product::<BigInt>())
            .product()
    }

    /// Π_{1≤s<t≤m} (t − s) · Π_t t for nodes 1..m.
    fn product_formula(m: u32) -> BigInt {
        let mut acc: BigInt = (1..=m).map(BigInt::from).product();
        for t in 1..=m {
            for s in 1..t {
                acc *= t - s;
            }
        }
        acc
    }

    #[test]
    fn determinant_small_orders() {
        assert_eq!(vandermonde_det(1).unwrap(), BigInt::from(1));
        assert_eq!(vandermonde_det(2).unwrap(), BigInt::from(2));
        assert_eq!(vandermonde_det(3).unwrap(), BigInt::from(12));
        assert!(vandermonde_det(0).is_err());
    }

    #[test]
    fn determinant_matches_product_formula() {
        for m in 1..=9 {
            let det = vandermonde_det(m).unwrap();
            assert_eq!(det, product_formula(m));
            assert_eq!(det, superfactorial(m));
        }
    }

    #[test]
    fn cramer_matrix_inverts_the_system() {
        for m in 1..=5u32 {
            let c = cramer_matrix(m).unwrap();
            let det = vandermonde_det(m).unwrap();
            let size = m as usize + 1;
            // C · V = D · I with V[j][i] = j^i.
            for i in 0..size {
                for col in 0..size {
                    let v: BigInt = (0..size)
                        .map(|j| &c[i][j] * BigInt::from(j).pow(col as u32))
                        .sum();
                    let expect = if i == col { det.clone() } else { BigInt::zero() };
                    assert_eq!(v, expect, "m={m} i={i} col={col}");
                }
            }
        }
    }

    #[test]
    fn cofactors_for_degree_one_and_two() {
        let c1 = cramer_matrix(1).unwrap();
        let as_i64 = |rows: &[Vec<BigInt>]| -> Vec<Vec<i64>> {
            rows.iter()
                .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
                .collect()
        };
        assert_eq!(as_i64(&c1), [[1, 0], [-1, 1]]);
        let c2 = cramer_matrix(2).unwrap();
        assert_eq!(as_i64(&c2), [[2, 0, 0], [-3, 4, -1], [1, -2, 1]]);
    }

    #[test]
    fn safety_constants() {
        // m = 1: shells 1, 2; worst j = k−1 gives 1 + 2(k−1), plus 2D = 2.
        assert_eq!(min_c0(1, 3).unwrap(), 22);
        assert_eq!(min_c0(1, 5).unwrap(), 34);
        // m = 2: shells 2, 8, 4; j = 4 gives 2 + 32 + 64 = 98, plus 2D = 4.
        assert_eq!(min_c0(2, 5).unwrap(), 308);
        assert!(min_c0(2, 4).is_err());
        assert!(min_c0(0, 3).is_err());
    }

    #[test]
    fn safety_constant_is_monotone() {
        for m in 1..=4u32 {
            let mut prev = 0;
            for k in 2 * m + 1..2 * m + 6 {
                let c = min_c0(m, k).unwrap();
                assert!(c >= prev);
                assert_eq!(c % 2, 0);
                prev = c;
            }
            if m > 1 {
                let k = 2 * m + 1;
                assert!(min_c0(m, k).unwrap() >= min_c0(m - 1, k).unwrap());
            }
        }
    }

    #[test]
    fn params_invariants() {
        let p = ConstructionParams::with_min_c0(44, 3, 1, 3).unwrap();
        assert_eq!((p.q, p.c0, p.det), (2, 22, 1));
        assert_eq!(p.big_n, BigUint::from(44u32 * 44 * 44));
        assert_eq!(p.cube_size().unwrap(), 125);
        assert_eq!(p.radius_bins(), 13);
        assert_eq!(p.radius_range(), 12);
        assert_eq!(p.shift_bins(), 109);
        p.validate().unwrap();
        assert!(ConstructionParams::with_min_c0(45, 3, 1, 3).is_err());
        assert!(ConstructionParams::new(40, 3, 1, 3, 20).is_err());
        let mut edited = p.clone();
        edited.q = 3;
        assert!(edited.validate().is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_up_to_multiple(0, 22), 22);
        assert_eq!(round_up_to_multiple(22, 22), 22);
        assert_eq!(round_up_to_multiple(23, 22), 44);
    }
}
