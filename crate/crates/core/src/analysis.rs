//! Density records, exponent fits and CSV/table output.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{param, Error, Result};
use crate::set::IntegerSet;

pub const CSV_HEADER: &str = "construction,k,N,set_size,deficiency,alpha,fitC";

/// Measured size of one construction run.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityRecord {
    pub construction: String,
    /// Progression length the set avoids.
    pub k: u32,
    pub big_n: BigUint,
    pub set_size: u128,
    pub log_n: f64,
    /// `ln(N / set_size)`.
    pub deficiency: f64,
    pub predicted_exponent: f64,
    /// Constant of the fit this record took part in, if any.
    pub fit_c: Option<f64>,
}

/// Natural logarithm of an arbitrary-precision integer from its bit length
/// and leading 64 bits.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().expect("fits in 64 bits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top word fits in 64 bits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_u128(x: u128) -> f64 {
    ln_big(&BigUint::from(x))
}

/// Exponent predicted for a construction avoiding `k`-term progressions.
pub fn predicted_exponent(construction: &str, k: u32) -> f64 {
    if construction == "laba-lacey" && k >= 3 {
        let theorem_k = ((k - 1) as f64).log2();
        1.0 / (theorem_k + 1.0)
    } else {
        0.5
    }
}

impl DensityRecord {
    pub fn from_counts(construction: &str, k: u32, big_n: BigUint, set_size: u128) -> Result<Self> {
        if set_size == 0 {
            return Err(param("density of an empty set is undefined"));
        }
        if BigUint::from(set_size) > big_n {
            return Err(param(format!("set size {set_size} exceeds N = {big_n}")));
        }
        let log_n = ln_big(&big_n);
        let deficiency = if BigUint::from(set_size) == big_n {
            0.0
        } else {
            (log_n - ln_u128(set_size)).max(0.0)
        };
        Ok(Self {
            construction: construction.to_string(),
            k,
            big_n,
            set_size,
            log_n,
            deficiency,
            predicted_exponent: predicted_exponent(construction, k),
            fit_c: None,
        })
    }
}

/// Record for a constructed (or supplied) set against `k`-term progressions.
pub fn density_record(set: &IntegerSet, k: u32) -> Result<DensityRecord> {
    if set.is_empty() {
        return Err(param("density of an empty set is undefined"));
    }
    DensityRecord::from_counts(
        &set.provenance().construction,
        k,
        set.ambient().clone(),
        set.len() as u128,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub c: f64,
    pub max_rel_residual: f64,
}

/// Least-squares fit of `deficiency = C · (ln N)^α` through the origin.
/// Relative residuals are taken against the measured deficiency; a record
/// with zero deficiency contributes its absolute residual.
pub fn exponent_fit(records: &[DensityRecord], alpha: f64) -> Result<FitResult> {
    if records.len() < 3 {
        return Err(param(format!(
            "an exponent fit needs at least 3 records, got {}",
            records.len()
        )));
    }
    let first = &records[0];
    if records
        .iter()
        .any(|r| r.k != first.k || r.construction != first.construction)
    {
        return Err(param("records mix constructions or progression lengths"));
    }
    let mut ns: Vec<&BigUint> = records.iter().map(|r| &r.big_n).collect();
    ns.sort();
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(param("records must have distinct N"));
    }
    let xs: Vec<f64> = records.iter().map(|r| r.log_n.powf(alpha)).collect();
    let sxy: f64 = xs.iter().zip(records).map(|(x, r)| x * r.deficiency).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    if sxx == 0.0 {
        return Err(param("degenerate ladder: every ln N is zero"));
    }
    let c = sxy / sxx;
    let max_rel_residual = xs
        .iter()
        .zip(records)
        .map(|(x, r)| {
            let e = (r.deficiency - c * x).abs();
            if r.deficiency > 0.0 {
                e / r.deficiency
            } else {
                e
            }
        })
        .fold(0.0, f64::max);
    Ok(FitResult { c, max_rel_residual })
}

fn sorted(records: &[DensityRecord]) -> Vec<&DensityRecord> {
    let mut rows: Vec<&DensityRecord> = records.iter().collect();
    rows.sort_by(|a, b| a.big_n.cmp(&b.big_n));
    rows
}

/// CSV with one header line, rows by ascending `N`. Floats use Rust's
/// shortest round-trip formatting, so parsing back is lossless.
pub fn write_csv<W: Write>(records: &[DensityRecord], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in sorted(records) {
        let fit = r.fit_c.map(|c| format!("{c:?}")).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{:?},{:?},{}",
            r.construction, r.k, r.big_n, r.set_size, r.deficiency, r.predicted_exponent, fit
        )?;
    }
    Ok(())
}

pub fn export_csv(records: &[DensityRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<DensityRecord>> {
    let mut lines = r.lines();
    let perr = |line: usize, message: String| Error::Parse { line, message };
    let header = lines.next().transpose()?;
    if header.as_deref() != Some(CSV_HEADER) {
        return Err(perr(1, format!("expected header {CSV_HEADER:?}")));
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        let cols: Vec<&str> = line.split(',').collect();
        let [construction, k, n, size, deficiency, alpha, fit] = cols.as_slice() else {
            return Err(perr(lineno, format!("expected 7 columns, found {}", cols.len())));
        };
        let bad = |what: &str, v: &str| perr(lineno, format!("bad {what} {v:?}"));
        let big_n: BigUint = n.parse().map_err(|_| bad("N", n))?;
        let set_size: u128 = size.parse().map_err(|_| bad("set_size", size))?;
        let k: u32 = k.parse().map_err(|_| bad("k", k))?;
        let mut rec = DensityRecord::from_counts(construction, k, big_n, set_size)
            .map_err(|e| perr(lineno, e.to_string()))?;
        rec.deficiency = deficiency.parse().map_err(|_| bad("deficiency", deficiency))?;
        rec.predicted_exponent = alpha.parse().map_err(|_| bad("alpha", alpha))?;
        rec.fit_c = if fit.is_empty() {
            None
        } else {
            Some(fit.parse().map_err(|_| bad("fitC", fit))?)
        };
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_csv(text: &str) -> Result<Vec<DensityRecord>> {
    read_csv(text.as_bytes())
}

/// Aligned text table of the records, by ascending `N`.
pub fn render_table(records: &[DensityRecord]) -> String {
    let header = ["construction", "k", "N", "set_size", "ln N", "deficiency", "alpha", "fitC"];
    let rows: Vec<[String; 8]> = sorted(records)
        .into_iter()
        .map(|r| {
            [
                r.construction.clone(),
                r.k.to_string(),
                r.big_n.to_string(),
                r.set_size.to_string(),
                format!("{:.4}", r.log_n),
                format!("{:.4}", r.deficiency),
                format!("{:.4}", r.predicted_exponent),
                r.fit_c.map(|c| format!("{c:.4}")).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in &rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}
