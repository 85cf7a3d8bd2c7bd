//! Single-level constructions: digit-restricted cubes, fixed-count digit
//! classes and single spheres.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::histogram::{enumerate_points, ENUMERATION_CAP};
use super::{sphere_histogram, ConstructionParams, PigeonholeCertificate};
use crate::digits::to_i128;
use crate::error::{param, Error, Result};
use crate::set::{IntegerSet, Provenance};

fn check_salem_spencer(n: u64, d: usize, c: Ratio<u64>) -> Result<u64> {
    if n < 2 {
        return Err(param(format!("base must be at least 2, got {n}")));
    }
    if d < 1 {
        return Err(param("dimension must be at least 1"));
    }
    if c.numer().is_zero() || c > Ratio::new(1, 2) {
        return Err(param(format!("digit fraction c = {c} must lie in (0, 1/2]")));
    }
    // Digits 0 ≤ v < c·n.
    let levels = (*c.numer() as u128 * n as u128).div_ceil(*c.denom() as u128);
    Ok(levels as u64)
}

fn resource(message: String) -> Error {
    Error::Resource {
        message,
        best_lower_bound: None,
    }
}

/// Value of a most-significant-first digit string.
fn digits_value(msd_first: &[u64], n: u64, fast: bool) -> BigInt {
    if fast {
        BigInt::from(
            msd_first
                .iter()
                .fold(0i128, |acc, &x| acc * n as i128 + x as i128),
        )
    } else {
        let base = BigInt::from(n);
        msd_first
            .iter()
            .fold(BigInt::zero(), |acc, &x| acc * &base + x)
    }
}

fn fits_fast(n: u64, d: usize) -> bool {
    to_i128(&BigInt::from(BigUint::from(n).pow(d as u32))).is_some()
}

/// Every `x < n^d` whose base-`n` digits all satisfy `0 ≤ x_i < c·n`.
/// Not progression-free itself; [`salem_spencer_set`] is a subset of it.
pub fn salem_spencer_cube(n: u64, d: usize, c: Ratio<u64>) -> Result<IntegerSet> {
    let levels = check_salem_spencer(n, d, c)?;
    let size = (levels as u128)
        .checked_pow(d as u32)
        .filter(|&s| s <= ENUMERATION_CAP)
        .ok_or_else(|| resource(format!("{levels}^{d} digit strings exceed the enumeration cap")))?;
    let fast = fits_fast(n, d);
    let mut elements = Vec::with_capacity(size as usize);
    let mut digits = vec![0u64; d];
    loop {
        elements.push(digits_value(&digits, n, fast));
        // Odometer, least significant digit last.
        let mut pos = d;
        loop {
            if pos == 0 {
                let provenance = Provenance::new("salem-spencer-cube", 3, 1)
                    .with_param("n", n)
                    .with_param("d", d)
                    .with_param("c", c)
                    .with_param("digits", levels);
                return IntegerSet::new(elements, BigUint::from(n).pow(d as u32), provenance);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < levels {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Digit strings over `{0, …, L−1}`, `L = ⌈c n⌉`, with the most balanced
/// digit-count vector (the `d mod L` surplus goes to the smallest digits).
///
/// With no carries, `x + z = 2y` forces `x_i + z_i = 2 y_i`; equal digit
/// multisets give equal norms, and strict convexity then forces `x = y = z`.
pub fn salem_spencer_set(n: u64, d: usize, c: Ratio<u64>) -> Result<IntegerSet> {
    let levels = check_salem_spencer(n, d, c)?;
    let classes = levels.min(d as u64) as usize;
    let counts = balanced_counts(levels, d);
    let total = multinomial(&counts);
    if total > BigUint::from(ENUMERATION_CAP) {
        return Err(resource(format!(
            "digit class holds {total} strings, above the enumeration cap"
        )));
    }
    let fast = fits_fast(n, d);
    let mut elements = Vec::with_capacity(total.to_usize().unwrap_or(0));
    let mut digits = Vec::with_capacity(d);
    let mut left = counts.clone();
    permute(&mut left, &mut digits, d, &mut |ds| {
        elements.push(digits_value(ds, n, fast))
    });
    let class = counts
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(":");
    let provenance = Provenance::new("salem-spencer", 3, 1)
        .with_param("n", n)
        .with_param("d", d)
        .with_param("c", c)
        .with_param("digits", levels)
        .with_param("used_digits", classes)
        .with_param("class", class);
    IntegerSet::new(elements, BigUint::from(n).pow(d as u32), provenance)
}

fn balanced_counts(levels: u64, d: usize) -> Vec<usize> {
    let mut counts = vec![d / levels as usize; levels as usize];
    for slot in counts.iter_mut().take(d % levels as usize) {
        *slot += 1;
    }
    counts
}

/// Size of [`salem_spencer_set`] without building it.
pub fn salem_spencer_size(n: u64, d: usize, c: Ratio<u64>) -> Result<BigUint> {
    let levels = check_salem_spencer(n, d, c)?;
    Ok(multinomial(&balanced_counts(levels, d)))
}

fn multinomial(counts: &[usize]) -> BigUint {
    let fact = |k: usize| (1..=k).fold(BigUint::from(1u32), |a, i| a * i);
    let d: usize = counts.iter().sum();
    counts.iter().fold(fact(d), |acc, &c| acc / fact(c))
}

/// Multiset permutations in lexicographic order.
fn permute(left: &mut [usize], prefix: &mut Vec<u64>, d: usize, emit: &mut impl FnMut(&[u64])) {
    if prefix.len() == d {
        emit(prefix);
        return;
    }
    for v in 0..left.len() {
        if left[v] > 0 {
            left[v] -= 1;
            prefix.push(v as u64);
            permute(left, prefix, d, emit);
            prefix.pop();
            left[v] += 1;
        }
    }
}

/// All points of `Q` on the sphere `‖x‖² = radius`, translated into `[0, N)`.
pub fn sphere_set(params: &ConstructionParams, radius: u128) -> Result<IntegerSet> {
    params.validate()?;
    let elements = enumerate_points(params, &[radius], 0, 1)?;
    let mut provenance = Provenance::new("sphere", params.k, params.m);
    provenance.offset = params.offset();
    provenance.params = params.record("");
    provenance.params.push(("radius".into(), radius.to_string()));
    IntegerSet::new(elements, params.big_n.clone(), provenance)
}

/// Fullest sphere of `Q` and its pigeonhole certificate.
fn fullest_sphere(params: &ConstructionParams) -> Result<(u128, PigeonholeCertificate)> {
    params.validate()?;
    let hist = sphere_histogram(params, 0, 1)?;
    let (radius, count) = hist.argmax();
    let cert = PigeonholeCertificate {
        label: "radius".into(),
        chosen: count,
        mass: params.cube_size()?,
        bins: params.radius_bins(),
    };
    if !cert.holds() {
        return Err(Error::Invariant(format!("pigeonhole bound fails: {cert}")));
    }
    Ok((radius, cert))
}

/// Size of [`poly_base_set`] for these parameters, from the histogram alone.
pub fn poly_base_size(params: &ConstructionParams) -> Result<u128> {
    Ok(fullest_sphere(params)?.1.chosen)
}

/// The fullest sphere of `Q`, free of degree-`m` polynomial progressions of
/// length `params.k` (at least `2m + 1`).
pub fn poly_base_set(m: u32, params: &ConstructionParams) -> Result<IntegerSet> {
    if params.m != m {
        return Err(param(format!(
            "degree {m} does not match the parameter degree {}",
            params.m
        )));
    }
    let (radius, cert) = fullest_sphere(params)?;
    if cert.chosen > ENUMERATION_CAP {
        return Err(Error::Resource {
            message: format!("fullest sphere holds {} points, above the enumeration cap", cert.chosen),
            best_lower_bound: cert.chosen.to_usize(),
        });
    }
    let mut set = sphere_set(params, radius)?;
    if set.len() as u128 != cert.chosen {
        return Err(Error::Invariant(format!(
            "enumerated {} points but the histogram predicts {}",
            set.len(),
            cert.chosen
        )));
    }
    let p = set.provenance_mut();
    p.construction = "poly-base".into();
    p.certificates.push(cert);
    Ok(set)
}

/// The classical sphere construction for 3-term progressions, with `c_0 = 22`.
pub fn behrend_set(n: u64, d: usize) -> Result<IntegerSet> {
    let params = ConstructionParams::with_min_c0(n, d, 1, 3)?;
    let mut set = poly_base_set(1, &params)?;
    set.provenance_mut().construction = "behrend".into();
    Ok(set)
}
