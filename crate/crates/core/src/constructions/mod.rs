//! Progression-free set constructions.
//!
//! Everything here works in balanced base-`n` coordinates on the cube
//! `Q = {x : |x_i| ≤ q}` with `q = n / c_0`, then translates the result into
//! `{0, …, n^d − 1}`. Selection of the sphere (or union of shifted spheres)
//! is done on exact histograms; only the chosen fibre is enumerated.

mod base;
mod histogram;
mod induct;
mod params;
mod schedule;

use std::fmt;
use std::str::FromStr;

pub use base::{
    behrend_set, poly_base_set, poly_base_size, salem_spencer_cube, salem_spencer_set,
    salem_spencer_size, sphere_set,
};
pub use histogram::{enumerate_sphere, sphere_histogram, RadiusHistogram, ENUMERATION_CAP};
pub use induct::{inductive_step, shift_profile};
pub use params::{cramer_matrix, min_c0, vandermonde_det, ConstructionParams};
pub use schedule::{build_schedule, laba_lacey_set, Level, LevelSchedule, MAX_THEOREM_K};

/// Record of one pigeonhole selection: the chosen fibre holds `chosen`
/// points out of `mass` spread over `bins` fibres, so `chosen · bins ≥ mass`
/// must hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PigeonholeCertificate {
    pub label: String,
    pub chosen: u128,
    pub mass: u128,
    pub bins: u128,
}

impl PigeonholeCertificate {
    pub fn holds(&self) -> bool {
        // u128 × u128 may overflow; compare via widening division.
        match self.chosen.checked_mul(self.bins) {
            Some(p) => p >= self.mass,
            None => true,
        }
    }
}

impl fmt::Display for PigeonholeCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.label, self.chosen, self.mass, self.bins)
    }
}

impl FromStr for PigeonholeCertificate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        let [label, chosen, mass, bins] = parts.as_slice() else {
            return Err(format!("expected label,chosen,mass,bins but found {s:?}"));
        };
        let num = |v: &str| {
            v.parse::<u128>()
                .map_err(|_| format!("bad count {v:?} in pigeonhole record"))
        };
        Ok(Self {
            label: label.to_string(),
            chosen: num(chosen)?,
            mass: num(mass)?,
            bins: num(bins)?,
        })
    }
}
