//! Sorted integer sets with provenance, and the `.set` text format.
//!
//! The format is UTF-8 text. A header of `#`-prefixed `key=value` lines comes
//! first, in this order: `construction`, `N`, `k`, `m`, `offset`, the
//! construction's parameter record, then one `pigeonhole` line per selection
//! step. After the header, one decimal integer per line in strictly ascending
//! order. Every line, including the last, ends with `\n`.

use std::io::{BufRead, Write};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

use crate::constructions::PigeonholeCertificate;
use crate::digits::to_i128;
use crate::error::{Error, Result};

/// Where a set came from: the construction, the progression it avoids and
/// every parameter needed to rebuild it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub construction: String,
    /// Length of the progressions the set is claimed to avoid.
    pub k: u32,
    /// Degree of the polynomial progressions the set is claimed to avoid.
    pub m: u32,
    /// Translation applied to move the set from the symmetric interval into
    /// `{0, …, N−1}`.
    pub offset: BigInt,
    pub params: Vec<(String, String)>,
    pub certificates: Vec<PigeonholeCertificate>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>, k: u32, m: u32) -> Self {
        Self {
            construction: construction.into(),
            k,
            m,
            offset: BigInt::zero(),
            params: Vec::new(),
            certificates: Vec::new(),
        }
    }

    /// Provenance for a set supplied directly rather than constructed.
    pub fn explicit() -> Self {
        Self::new("explicit", 0, 0)
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        let key = key.into();
        debug_assert!(!is_reserved(&key), "reserved header key {key}");
        self.params.push((key, value.to_string()));
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

const RESERVED: [&str; 6] = ["construction", "N", "k", "m", "offset", "pigeonhole"];

/// A sorted, deduplicated set of non-negative integers inside `[0, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSet {
    elements: Vec<BigInt>,
    ambient: BigUint,
    provenance: Provenance,
}

impl IntegerSet {
    /// Sorts and deduplicates `elements`; every element must lie in `[0, ambient)`.
    pub fn new(mut elements: Vec<BigInt>, ambient: BigUint, provenance: Provenance) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        let limit = BigInt::from_biguint(Sign::Plus, ambient.clone());
        if let Some(bad) = elements.iter().find(|x| x.is_negative() || **x >= limit) {
            return Err(Error::Range(format!(
                "element {bad} lies outside [0, {ambient})"
            )));
        }
        Ok(Self {
            elements,
            ambient,
            provenance,
        })
    }

    /// An explicit set with ambient interval `[0, max + 1)`.
    pub fn from_values<I: IntoIterator<Item = i64>>(values: I) -> Result<Self> {
        let elements: Vec<BigInt> = values.into_iter().map(BigInt::from).collect();
        let ambient = elements
            .iter()
            .max()
            .map(|m| (m + 1u32).to_biguint().unwrap_or_default())
            .unwrap_or_default();
        Self::new(elements, ambient, Provenance::explicit())
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ambient(&self) -> &BigUint {
        &self.ambient
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn provenance_mut(&mut self) -> &mut Provenance {
        &mut self.provenance
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Elements as machine integers, for the detectors.
    pub fn to_i128(&self) -> Result<Vec<i128>> {
        self.elements
            .iter()
            .map(|x| {
                to_i128(x)
                    .filter(|v| v.unsigned_abs() < 1u128 << 100)
                    .ok_or_else(|| Error::Range(format!("element {x} exceeds the 100-bit detector range")))
            })
            .collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let p = &self.provenance;
        writeln!(w, "# construction={}", p.construction)?;
        writeln!(w, "# N={}", self.ambient)?;
        writeln!(w, "# k={}", p.k)?;
        writeln!(w, "# m={}", p.m)?;
        writeln!(w, "# offset={}", p.offset)?;
        for (key, value) in &p.params {
            writeln!(w, "# {key}={value}")?;
        }
        for c in &p.certificates {
            writeln!(w, "# pigeonhole={c}")?;
        }
        for x in &self.elements {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("set files are ASCII")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut construction = None;
        let mut ambient = None;
        let mut k = None;
        let mut m = None;
        let mut offset = None;
        let mut params = Vec::new();
        let mut certificates = Vec::new();
        let mut elements: Vec<BigInt> = Vec::new();

        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let perr = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            if let Some(rest) = line.strip_prefix('#') {
                if !elements.is_empty() {
                    return Err(perr("header line after the first element".into()));
                }
                let rest = rest.strip_prefix(' ').unwrap_or(rest);
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(format!("header line without '=': {line:?}")))?;
                match key {
                    "construction" => construction = Some(value.to_string()),
                    "N" => ambient = Some(parse_num::<BigUint>(value).map_err(perr)?),
                    "k" => k = Some(parse_num::<u32>(value).map_err(perr)?),
                    "m" => m = Some(parse_num::<u32>(value).map_err(perr)?),
                    "offset" => offset = Some(parse_num::<BigInt>(value).map_err(perr)?),
                    "pigeonhole" => certificates.push(value.parse().map_err(perr)?),
                    _ => params.push((key.to_string(), value.to_string())),
                }
                continue;
            }
            let x: BigInt = parse_num(line.trim()).map_err(perr)?;
            if let Some(prev) = elements.last() {
                if &x <= prev {
                    return Err(perr(format!("{x} does not exceed the previous element")));
                }
            }
            elements.push(x);
        }

        let missing = |key: &str| Error::Parse {
            line: 0,
            message: format!("missing header key {key}"),
        };
        let provenance = Provenance {
            construction: construction.ok_or_else(|| missing("construction"))?,
            k: k.ok_or_else(|| missing("k"))?,
            m: m.ok_or_else(|| missing("m"))?,
            offset: offset.ok_or_else(|| missing("offset"))?,
            params,
            certificates,
        };
        Self::new(elements, ambient.ok_or_else(|| missing("N"))?, provenance)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

fn parse_num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse::<T>()
        .map_err(|_| format!("expected an integer, found {s:?}"))
}

pub(crate) fn is_reserved(key: &str) -> bool {
    RESERVED.contains(&key)
}
