use std::collections::HashSet;

/// Membership oracle over a sorted slice: a dense bitmap when the span is
/// small, a hash set otherwise.
pub(crate) enum Lookup {
    Dense { min: i128, bits: Vec<u64> },
    Sparse(HashSet<i128>),
}

const DENSE_SPAN_LIMIT: u128 = 1 << 28;

impl Lookup {
    pub(crate) fn new(sorted: &[i128]) -> Self {
        let (Some(&min), Some(&max)) = (sorted.first(), sorted.last()) else {
            return Lookup::Sparse(HashSet::new());
        };
        let span = (max - min) as u128 + 1;
        if span <= DENSE_SPAN_LIMIT {
            let mut bits = vec![0u64; span.div_ceil(64) as usize];
            for &x in sorted {
                let off = (x - min) as usize;
                bits[off / 64] |= 1 << (off % 64);
            }
            Lookup::Dense { min, bits }
        } else {
            Lookup::Sparse(sorted.iter().copied().collect())
        }
    }

    #[inline]
    pub(crate) fn contains(&self, x: i128) -> bool {
        match self {
            Lookup::Dense { min, bits } => {
                if x < *min {
                    return false;
                }
                let off = (x - min) as u128;
                if off >= bits.len() as u128 * 64 {
                    return false;
                }
                let off = off as usize;
                bits[off / 64] >> (off % 64) & 1 == 1
            }
            Lookup::Sparse(set) => set.contains(&x),
        }
    }
}
