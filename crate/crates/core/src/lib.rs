//! Progression-free subsets of `{0, …, N−1}` and exhaustive checks for them.
//!
//! The crate builds Salem–Spencer and Behrend sets, the polynomial-curve-free
//! sphere construction and the sphere-union recursion that avoids
//! `(1 + 2^k)`-term progressions, and checks every output with exhaustive
//! detectors. Exact extremal values `r(k, N)` and `r_m(k, N)` are available
//! at tiny `N` for cross-checking.

pub mod analysis;
pub mod constructions;
pub mod detectors;
pub mod digits;
mod error;
pub mod set;

pub use analysis::{density_record, exponent_fit, DensityRecord, FitResult};
pub use constructions::{
    behrend_set, build_schedule, enumerate_sphere, inductive_step, laba_lacey_set, min_c0,
    poly_base_set, salem_spencer_set, sphere_histogram, vandermonde_det, ConstructionParams,
    LevelSchedule, PigeonholeCertificate, RadiusHistogram,
};
pub use detectors::{
    exact_r, exact_r_m, find_arith_progression, find_poly_progression, verify_set,
    ProgressionWitness, SearchBudget, Verdict, VerificationReport,
};
pub use digits::{from_digits, norm_sq, to_balanced_digits, BalancedDigits, CubeMembership};
pub use error::{Error, Result};
pub use set::{IntegerSet, Provenance};
