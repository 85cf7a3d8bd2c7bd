//! Fixtures shared by the criterion benchmarks.

use progfree::{behrend_set, ConstructionParams, IntegerSet};

/// Degree-1 parameters with the minimal safety constant.
pub fn behrend_params(n: u64, d: usize) -> ConstructionParams {
    ConstructionParams::with_min_c0(n, d, 1, 3).expect("benchmark parameters are valid")
}

/// A Behrend set used as detector input.
pub fn behrend_fixture(n: u64, d: usize) -> IntegerSet {
    behrend_set(n, d).expect("benchmark parameters are valid")
}
