//! Hilbert-newform Hecke-eigenvalue data over real quadratic fields.
//!
//! A newform record carries a real quadratic base field, a principal
//! level ideal, a totally real Hecke eigenvalue field, and a table of
//! eigenvalues a_p indexed by prime ideals of the base field.  Records
//! are read from JSON-lines fixture files or fetched over HTTP with an
//! on-disk cache.  On top of the records this crate provides the
//! descent criteria (mod-2 congruence between conjugate primes, trace
//! surjectivity onto F16, and exact eigenvalue descent through a Hecke
//! field automorphism) and the Dirichlet coefficients of twisted
//! L-series.
//!
//! Fixture format, one JSON object per line:
//!
//! ```text
//! {"base_field_disc":12,"level_gen":[17,17],"level_norm":578,
//!  "hecke_min_poly":[1,1,-3,-1,1],"bound":300,"label":"..."}
//! {"p":11,"norm":11,"gen":[4,1],"ap":[0,1,0,0]}
//! ```
//!
//! The header names the base field by discriminant, the level by an
//! explicit generator x + y*omega, and the Hecke field by its minimal
//! polynomial (low to high coefficients).  Each row names its prime by
//! rational prime, norm, and explicit generator, making the ordering
//! of conjugate primes self-contained; `ap` holds power-basis
//! coordinates, integers or "n/d" strings.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use numfield::{prime_split, sieve_primes, NFElem, NfError, NumberField, PrimeIdeal, SplitType};

pub mod checks;
pub mod fetch;
pub mod series;

pub use checks::{
    descent_check_mod2, exact_descent_check, galois_conjugate_prime, trace_surjectivity,
    DescentReport, ExactDescentReport, TraceReport,
};
pub use fetch::{lmfdb_fetch, FetchConfig};
pub use series::dirichlet_coefficients;

#[derive(Debug, Error)]
pub enum HmfError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("number field error: {0}")]
    Field(#[from] NfError),
    #[error("unsupported base field discriminant {0}")]
    BadBaseDisc(i64),
    #[error("level generator has norm {got}, header says {expected}")]
    BadLevel { expected: u64, got: u64 },
    #[error("eigenvalue at prime ({p},{index}) violates the Ramanujan bound")]
    RamanujanViolation { p: u64, index: u32 },
    #[error("eigenvalue table misses the prime ({p},{index}) of norm {norm}")]
    MissingPrime { p: u64, index: u32, norm: u64 },
    #[error("eigenvalue coverage stops before norm {norm}")]
    CoverageGap { norm: u64 },
    #[error("embedding index {0} out of range for the Hecke field")]
    BadEmbeddingIndex(usize),
    #[error("malformed label {0:?}")]
    BadLabel(String),
    #[error("label {0} not found at the remote endpoint")]
    LabelNotFound(String),
    #[error("network failure: {0}")]
    Network(String),
}

/// Fixture header, mirrored by the JSON object on the first line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureHeader {
    pub base_field_disc: i64,
    /// Level generator x + y*omega as [x, y].
    pub level_gen: [i64; 2],
    pub level_norm: u64,
    /// Minimal polynomial of the Hecke field, low to high, monic.
    pub hecke_min_poly: Vec<i64>,
    /// Eigenvalues cover every prime ideal of norm <= bound that does
    /// not divide the level (level primes are optional extras).
    pub bound: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

/// One eigenvalue row of a fixture file.
#[derive(Debug, Clone)]
pub struct FixtureRow {
    pub p: u64,
    pub norm: u64,
    /// Prime generator x + y*omega as [x, y].
    pub gen: [i64; 2],
    /// Power-basis coordinates of a_p in the Hecke field.
    pub ap: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RowJson {
    p: u64,
    norm: u64,
    gen: [i64; 2],
    ap: Vec<RatJson>,
}

/// Rational fixture entry: a plain integer or an "n/d" string.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatJson {
    Int(i64),
    Str(String),
}

impl RatJson {
    fn to_rational(&self) -> Result<Rational, String> {
        match self {
            RatJson::Int(n) => Ok(Rational::from(*n)),
            RatJson::Str(s) => parse_rational(s),
        }
    }

    fn from_rational(r: &Rational) -> RatJson {
        if *r.denom() == 1 {
            if let Some(n) = r.numer().to_i64() {
                return RatJson::Int(n);
            }
        }
        RatJson::Str(r.to_string())
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = Integer::parse(num)
        .map(Integer::from)
        .map_err(|e| format!("bad numerator {num:?}: {e}"))?;
    let d = Integer::parse(den)
        .map(Integer::from)
        .map_err(|e| format!("bad denominator {den:?}: {e}"))?;
    if d.cmp0() == std::cmp::Ordering::Equal {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::from((n, d)))
}

/// Stored eigenvalue together with the prime it belongs to.
#[derive(Debug, Clone)]
pub struct EigenEntry {
    pub prime: PrimeIdeal,
    pub ap: NFElem,
}

/// A Hilbert newform with its eigenvalue table.
///
/// Primes are keyed by (p, index) where index is the conjugate-prime
/// index assigned by `numfield::prime_split` (residue of omega,
/// ascending); row generators in fixture files are re-identified
/// against that ordering at load time.
#[derive(Debug)]
pub struct NewformRecord {
    pub label: String,
    pub base: NumberField,
    pub base_disc: i64,
    pub level_gen: NFElem,
    pub level_coords: [i64; 2],
    pub level_norm: u64,
    pub hecke: NumberField,
    pub bound: u64,
    pub eigen: BTreeMap<(u64, u32), EigenEntry>,
}

impl fmt::Display for NewformRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: base disc {}, level norm {}, {} eigenvalues to norm {}",
            self.label,
            self.base_disc,
            self.level_norm,
            self.eigen.len(),
            self.bound
        )
    }
}

/// Real quadratic field of fundamental discriminant d, presented as
/// x^2 - d/4 (d even) or x^2 - x - (d-1)/4 (d odd), so that omega is
/// sqrt(d)/2 resp. (1+sqrt(d))/2.
pub fn base_field_from_disc(d: i64) -> Result<NumberField, HmfError> {
    if d <= 1 {
        return Err(HmfError::BadBaseDisc(d));
    }
    let field = match d.rem_euclid(4) {
        0 => NumberField::new(&[-(d / 4), 0, 1]),
        1 => NumberField::new(&[-((d - 1) / 4), -1, 1]),
        _ => return Err(HmfError::BadBaseDisc(d)),
    };
    field.map_err(HmfError::from)
}

impl NewformRecord {
    /// Whether the prime ideal divides the level.
    pub fn divides_level(&self, pr: &PrimeIdeal) -> bool {
        let p = pr.p as i128;
        let (x, y) = (self.level_coords[0] as i128, self.level_coords[1] as i128);
        match pr.omega_residue {
            Some(r) => (x + y * r as i128).rem_euclid(p) == 0,
            None => x.rem_euclid(p) == 0 && y.rem_euclid(p) == 0,
        }
    }

    /// Stored eigenvalue at a prime, if present.
    pub fn eigenvalue(&self, pr: &PrimeIdeal) -> Option<&NFElem> {
        self.eigen.get(&(pr.p, pr.index)).map(|e| &e.ap)
    }

    /// Entries at primes not dividing the level.
    pub fn good_entries(&self) -> impl Iterator<Item = &EigenEntry> {
        self.eigen
            .values()
            .filter(|e| !self.divides_level(&e.prime))
    }
}

/// Load a newform record from a JSON-lines fixture file.
pub fn load_newform(path: &Path) -> Result<NewformRecord, HmfError> {
    let file = std::fs::File::open(path)?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unlabeled".into());
    parse_newform(BufReader::new(file), &fallback)
}

/// Parse a newform record from any reader of the fixture format.
pub fn parse_newform<R: Read>(reader: BufReader<R>, fallback_label: &str) -> Result<NewformRecord, HmfError> {
    let mut lines = reader.lines();
    let header_line = match lines.next() {
        Some(l) => l?,
        None => {
            return Err(HmfError::Parse {
                line: 1,
                msg: "empty file: missing header object".into(),
            })
        }
    };
    let header: FixtureHeader =
        serde_json::from_str(&header_line).map_err(|e| HmfError::Parse {
            line: 1,
            msg: format!("bad header: {e}"),
        })?;

    let base = base_field_from_disc(header.base_field_disc)?;
    let coeffs = header.hecke_min_poly.clone();
    let hecke = NumberField::new(&coeffs)?;
    let level_gen = NFElem::from_i64s(&header.level_gen);
    let level_norm_computed = base.norm(&level_gen).abs();
    if level_norm_computed != Rational::from(header.level_norm) {
        let got = level_norm_computed
            .numer()
            .to_u64()
            .unwrap_or(u64::MAX);
        return Err(HmfError::BadLevel {
            expected: header.level_norm,
            got,
        });
    }

    let mut eigen: BTreeMap<(u64, u32), EigenEntry> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: RowJson = serde_json::from_str(&line).map_err(|e| HmfError::Parse {
            line: lineno,
            msg: format!("bad row: {e}"),
        })?;
        let mut ap = Vec::with_capacity(row.ap.len());
        for r in &row.ap {
            ap.push(r.to_rational().map_err(|msg| HmfError::Parse {
                line: lineno,
                msg,
            })?);
        }
        if ap.len() != hecke.degree {
            return Err(HmfError::Parse {
                line: lineno,
                msg: format!(
                    "ap has {} coordinates, Hecke field has degree {}",
                    ap.len(),
                    hecke.degree
                ),
            });
        }
        let key = identify_prime(&base, &row).map_err(|msg| HmfError::Parse {
            line: lineno,
            msg,
        })?;
        if eigen.contains_key(&(key.p, key.index)) {
            return Err(HmfError::Parse {
                line: lineno,
                msg: format!("duplicate prime ({}, {})", key.p, key.index),
            });
        }
        let ap = NFElem::from_rationals(ap);
        eigen.insert((key.p, key.index), EigenEntry { prime: key, ap });
    }

    let record = NewformRecord {
        label: header.label.unwrap_or_else(|| fallback_label.into()),
        base,
        base_disc: header.base_field_disc,
        level_gen,
        level_coords: header.level_gen,
        level_norm: header.level_norm,
        hecke,
        bound: header.bound,
        eigen,
    };
    validate_record(&record)?;
    Ok(record)
}

/// Match a fixture row against the canonical prime ordering.
fn identify_prime(base: &NumberField, row: &RowJson) -> Result<PrimeIdeal, String> {
    let g = NFElem::from_i64s(&row.gen);
    let gnorm = base.norm(&g).abs();
    if gnorm != Rational::from(row.norm) {
        return Err(format!(
            "generator [{}, {}] has norm {}, row says {}",
            row.gen[0], row.gen[1], gnorm, row.norm
        ));
    }
    let (ty, primes) = prime_split(base, row.p).map_err(|e| e.to_string())?;
    match ty {
        SplitType::Inert => {
            if row.norm != row.p * row.p {
                return Err(format!("{} is inert; norm must be p^2", row.p));
            }
            Ok(primes[0].clone())
        }
        SplitType::Ramified => {
            if row.norm != row.p {
                return Err(format!("{} is ramified; norm must be p", row.p));
            }
            Ok(primes[0].clone())
        }
        SplitType::Split => {
            if row.norm != row.p {
                return Err(format!("{} is split; norm must be p", row.p));
            }
            let p = row.p as i128;
            let (x, y) = (row.gen[0] as i128, row.gen[1] as i128);
            let hit: Vec<&PrimeIdeal> = primes
                .iter()
                .filter(|pr| {
                    let r = pr.omega_residue.expect("split primes carry residues") as i128;
                    (x + y * r).rem_euclid(p) == 0
                })
                .collect();
            match hit.len() {
                1 => Ok((*hit[0]).clone()),
                n => Err(format!(
                    "generator matches {n} of the primes above {}",
                    row.p
                )),
            }
        }
    }
}

/// Ramanujan bound and coverage validation.
fn validate_record(rec: &NewformRecord) -> Result<(), HmfError> {
    let prec = 128u32;
    let slack = Float::with_val(prec, Float::i_exp(1, -64));
    for entry in rec.eigen.values() {
        let bound = 2 * Float::with_val(prec, entry.prime.norm).sqrt() + &slack;
        for v in rec.hecke.embed(&entry.ap, prec)? {
            if v.abs() > bound {
                return Err(HmfError::RamanujanViolation {
                    p: entry.prime.p,
                    index: entry.prime.index,
                });
            }
        }
    }
    for p in sieve_primes(rec.bound) {
        let (_, primes) = prime_split(&rec.base, p)?;
        for pr in &primes {
            if pr.norm > rec.bound || rec.divides_level(pr) {
                continue;
            }
            if !rec.eigen.contains_key(&(pr.p, pr.index)) {
                return Err(HmfError::MissingPrime {
                    p: pr.p,
                    index: pr.index,
                    norm: pr.norm,
                });
            }
        }
    }
    Ok(())
}

/// Write a fixture file; the inverse of `load_newform`.
pub fn write_newform_file(
    path: &Path,
    header: &FixtureHeader,
    rows: &[FixtureRow],
) -> Result<(), HmfError> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let hline = serde_json::to_string(header).expect("header serializes");
    writeln!(out, "{hline}")?;
    for row in rows {
        let json = RowJson {
            p: row.p,
            norm: row.norm,
            gen: row.gen,
            ap: row.ap.iter().map(RatJson::from_rational).collect(),
        };
        let line = serde_json::to_string(&json).expect("row serializes");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_entries_roundtrip() {
        for s in ["5", "-7", "3/2", "-22/7"] {
            let r = parse_rational(s).unwrap();
            let j = RatJson::from_rational(&r);
            assert_eq!(j.to_rational().unwrap(), r);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn base_fields_have_right_disc() {
        let f12 = base_field_from_disc(12).unwrap();
        assert_eq!(f12.disc, Integer::from(12));
        let f77 = base_field_from_disc(77).unwrap();
        assert_eq!(f77.disc, Integer::from(77));
        assert!(base_field_from_disc(7).is_err());
        assert!(base_field_from_disc(-4).is_err());
    }
}
