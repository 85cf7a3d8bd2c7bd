//! One inductive step: lift a radius set `R` to a union of shifted spheres
//! around the anchor `X = (2q, …, 2q)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::histogram::{enumerate_points, ENUMERATION_CAP};
use super::{sphere_histogram, ConstructionParams, PigeonholeCertificate, RadiusHistogram};
use crate::detectors::find_poly_progression;
use crate::error::{param, Error, Result};
use crate::set::{IntegerSet, Provenance};

/// Largest shift table materialised by [`shift_profile`].
const MAX_SHIFT_BINS: u128 = 1 << 26;
/// Upper limit on the work of one shift-profile pass.
const MAX_PROFILE_WORK: u128 = 1 << 36;
/// `R` is re-verified on entry when `|R|^(2m+1)` stays below this.
const ENTRY_CHECK_LIMIT: f64 = 2e7;

fn resource(message: String) -> Error {
    Error::Resource {
        message,
        best_lower_bound: None,
    }
}

/// `|A_s| = Σ_{r ∈ R} hist[r + s]` for `s = 0, …, bins − 1`.
pub fn shift_profile(radii: &[u128], hist: &RadiusHistogram, bins: u128) -> Result<Vec<u128>> {
    if bins > MAX_SHIFT_BINS {
        return Err(resource(format!("{bins} shifts exceed the in-memory table limit")));
    }
    let mut profile = vec![0u128; bins as usize];
    profile
        .par_chunks_mut(1 << 12)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let base = (ci << 12) as u128;
            for (o, slot) in chunk.iter_mut().enumerate() {
                let s = base + o as u128;
                *slot = radii.iter().map(|&r| hist.get(r + s)).sum();
            }
        });
    Ok(profile)
}

/// Total mass of the profile and its first maximum `(s, |A_s|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ProfileSummary {
    total: u128,
    best_shift: u128,
    best: u128,
}

impl ProfileSummary {
    const EMPTY: Self = Self {
        total: 0,
        best_shift: 0,
        best: 0,
    };

    fn push(mut self, s: u128, count: u128) -> Self {
        self.total += count;
        if count > self.best || (count == self.best && count > 0 && s < self.best_shift) {
            self.best = count;
            self.best_shift = s;
        }
        self
    }

    fn merge(self, other: Self) -> Self {
        let total = self.total + other.total;
        let mut best = self.push(other.best_shift, other.best);
        best.total = total;
        best
    }
}

/// Streams the profile chunk by chunk without storing it. Each chunk of
/// shifts collects the keys `r + s` it covers by binary search, so the work
/// is `|keys| · |R|` plus one pass over the shifts.
fn summarize_profile(radii: &[u128], hist: &RadiusHistogram, bins: u128) -> Result<ProfileSummary> {
    const CHUNK: u128 = 1 << 16;
    let keys: Vec<(u128, u128)> = hist.iter().collect();
    let work = (keys.len() as u128)
        .saturating_mul(radii.len() as u128)
        .saturating_add(bins);
    if work > MAX_PROFILE_WORK {
        return Err(resource(format!(
            "shift profile over {bins} shifts and {} radii exceeds the work limit",
            radii.len()
        )));
    }
    let chunks = bins.div_ceil(CHUNK) as u64;
    Ok((0..chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci as u128 * CHUNK;
            let hi = (lo + CHUNK).min(bins);
            let mut local = vec![0u128; (hi - lo) as usize];
            for &r in radii {
                let start = keys.partition_point(|e| e.0 < lo + r);
                for &(key, c) in &keys[start..] {
                    let s = key - r;
                    if s >= hi {
                        break;
                    }
                    local[(s - lo) as usize] += c;
                }
            }
            local
                .iter()
                .enumerate()
                .fold(ProfileSummary::EMPTY, |acc, (o, &c)| acc.push(lo + o as u128, c))
        })
        .reduce(|| ProfileSummary::EMPTY, ProfileSummary::merge))
}

fn radii_of(r_set: &IntegerSet, params: &ConstructionParams) -> Result<Vec<u128>> {
    let limit = params.radius_range();
    r_set
        .elements()
        .iter()
        .map(|x| {
            x.to_u128().filter(|&v| v < limit).ok_or_else(|| {
                Error::Range(format!("radius {x} lies outside [0, D²dq²) = [0, {limit})"))
            })
        })
        .collect()
}

/// Best shift for `R` and the pigeonhole record behind it.
fn best_shift(radii: &[u128], params: &ConstructionParams) -> Result<(u128, PigeonholeCertificate)> {
    let det = params.det;
    let hist = sphere_histogram(params, 2 * params.q as i64, det * det)?;
    let bins = params.shift_bins();
    let summary = summarize_profile(radii, &hist, bins)?;
    let mass = (radii.len() as u128)
        .checked_mul(params.cube_size()?)
        .ok_or_else(|| Error::Overflow("|R|·|Q| overflows 128 bits".into()))?;
    if summary.total != mass {
        return Err(Error::Invariant(format!(
            "shift profile sums to {}, expected |R|·|Q| = {mass}",
            summary.total
        )));
    }
    let (s, chosen) = (summary.best_shift, summary.best);
    let cert = PigeonholeCertificate {
        label: "shift".into(),
        chosen,
        mass,
        bins,
    };
    if !cert.holds() {
        return Err(Error::Invariant(format!("pigeonhole bound fails: {cert}")));
    }
    Ok((s, cert))
}

fn check_entry(r_set: &IntegerSet, params: &ConstructionParams) -> Result<Vec<u128>> {
    params.validate()?;
    if r_set.is_empty() {
        return Err(param("radius set is empty"));
    }
    let radii = radii_of(r_set, params)?;
    let degree = 2 * params.m;
    let work = (radii.len() as f64).powi(degree as i32 + 1);
    if work <= ENTRY_CHECK_LIMIT && degree <= 8 {
        if let Some(w) = find_poly_progression(r_set, degree, params.k)? {
            return Err(param(format!(
                "radius set contains a degree-{degree} progression of length {}: {w}",
                params.k
            )));
        }
    }
    Ok(radii)
}

/// From a radius set `R ⊆ [0, D²dq²)` free of degree-`2m` progressions of
/// length `k`, the set `{x ∈ Q : D²‖x − X‖² ∈ R + s}` for the most populated
/// shift `s`, free of degree-`m` progressions of length `k`.
pub fn inductive_step(r_set: &IntegerSet, params: &ConstructionParams) -> Result<IntegerSet> {
    let radii = check_entry(r_set, params)?;
    let (s, cert) = best_shift(&radii, params)?;
    if cert.chosen > ENUMERATION_CAP {
        return Err(Error::Resource {
            message: format!("chosen shift holds {} points, above the enumeration cap", cert.chosen),
            best_lower_bound: cert.chosen.to_usize(),
        });
    }
    let targets: Vec<u128> = radii.iter().map(|r| r + s).collect();
    let det = params.det;
    let elements: Vec<BigInt> = enumerate_points(params, &targets, 2 * params.q as i64, det * det)?;
    if elements.len() as u128 != cert.chosen {
        return Err(Error::Invariant(format!(
            "enumerated {} points but the shift profile predicts {}",
            elements.len(),
            cert.chosen
        )));
    }
    let mut provenance = Provenance::new("inductive-step", params.k, params.m);
    provenance.offset = params.offset();
    provenance.params = params.record("");
    provenance.params.push(("shift".into(), s.to_string()));
    provenance.params.push(("radii".into(), radii.len().to_string()));
    provenance.certificates = r_set.provenance().certificates.clone();
    provenance.certificates.push(cert);
    IntegerSet::new(elements, params.big_n.clone(), provenance)
}
