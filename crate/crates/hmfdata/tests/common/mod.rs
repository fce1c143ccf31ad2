//! Synthetic fixture construction shared by the integration tests.
#![allow(dead_code)] // each test target uses a different subset
//!
//! Eigenvalues are assigned so that every descent criterion holds by
//! construction: at split pairs the second eigenvalue is the image of
//! the first under the nontrivial Hecke-field automorphism tau, and
//! sigma-fixed primes (inert, ramified) get rational values, which tau
//! fixes.  Split primes p >= 79 cycle through all 16 residue patterns
//! of F16 via {0,1}-coordinate elements (their embeddings stay below
//! the Ramanujan bound 2*sqrt(79) = 17.78); smaller split primes get
//! the eigenvalue 1.

use std::path::{Path, PathBuf};

use hmfdata::{load_newform, write_newform_file, FixtureHeader, FixtureRow, NewformRecord};
use numfield::{automorphisms, prime_split, sieve_primes, NFElem, NumberField, SplitType};
use rug::Rational;

pub fn quartic() -> NumberField {
    NumberField::new(&[1, 1, -3, -1, 1]).unwrap()
}

pub fn base12() -> NumberField {
    NumberField::new(&[-3, 0, 1]).unwrap()
}

pub fn base77() -> NumberField {
    NumberField::new(&[-19, -1, 1]).unwrap()
}

/// Element with {0,1} power-basis coordinates given by the low 4 bits.
pub fn bits_elem(bits: u32) -> NFElem {
    NFElem::from_i64s(&[
        (bits & 1) as i64,
        (bits >> 1 & 1) as i64,
        (bits >> 2 & 1) as i64,
        (bits >> 3 & 1) as i64,
    ])
}

pub fn coords2(e: &NFElem) -> [i64; 2] {
    [
        e.coeffs[0].numer().to_i64().unwrap(),
        e.coeffs[1].numer().to_i64().unwrap(),
    ]
}

fn row(p: u64, norm: u64, gen: [i64; 2], ap: &NFElem) -> FixtureRow {
    FixtureRow {
        p,
        norm,
        gen,
        ap: ap.coeffs.clone(),
    }
}

/// Header over Q(sqrt 3) with the given level; quartic Hecke field.
pub fn header12(level_gen: [i64; 2], level_norm: u64, bound: u64, label: &str) -> FixtureHeader {
    FixtureHeader {
        base_field_disc: 12,
        level_gen,
        level_norm,
        hecke_min_poly: vec![1, 1, -3, -1, 1],
        bound,
        label: Some(label.into()),
        comment: Some("synthetic test fixture".into()),
    }
}

/// Rows covering every prime ideal of norm <= bound (level divisors
/// included), built to satisfy all descent criteria.
pub fn synthetic_rows(bound: u64) -> Vec<FixtureRow> {
    let base = base12();
    let k = quartic();
    let auts = automorphisms(&k).unwrap();
    let tau = auts.iter().find(|a| !a.is_identity()).unwrap().clone();
    let one = NFElem::from_i64s(&[1, 0, 0, 0]);
    let zero = NFElem::from_i64s(&[0, 0, 0, 0]);

    let mut rows = vec![];
    let mut counter = 0u32;
    let mut inert_flip = 0i64;
    for p in sieve_primes(bound) {
        let (ty, primes) = prime_split(&base, p).unwrap();
        match ty {
            SplitType::Inert => {
                if p * p > bound {
                    continue;
                }
                let a = NFElem::from_i64s(&[inert_flip, 0, 0, 0]);
                inert_flip = 1 - inert_flip;
                rows.push(row(p, p * p, [p as i64, 0], &a));
            }
            SplitType::Ramified => {
                rows.push(row(p, p, coords2(&primes[0].gen), &zero));
            }
            SplitType::Split => {
                if p >= 79 {
                    let e = bits_elem(counter % 16);
                    counter += 1;
                    let te = tau.apply(&k, &e);
                    rows.push(row(p, p, coords2(&primes[0].gen), &e));
                    rows.push(row(p, p, coords2(&primes[1].gen), &te));
                } else {
                    rows.push(row(p, p, coords2(&primes[0].gen), &one));
                    rows.push(row(p, p, coords2(&primes[1].gen), &one));
                }
            }
        }
    }
    rows
}

/// Write the synthetic fixture into `dir` and return its path.
pub fn write_synthetic(dir: &Path, bound: u64, label: &str) -> PathBuf {
    let path = dir.join(format!("{label}.jsonl"));
    let header = header12([1, 0], 1, bound, label);
    write_newform_file(&path, &header, &synthetic_rows(bound)).unwrap();
    path
}

/// Load a fresh synthetic record with unit level.
pub fn synthetic_record(bound: u64) -> NewformRecord {
    let dir = tempfile::tempdir().unwrap();
    let path = write_synthetic(dir.path(), bound, "synthetic-c");
    load_newform(&path).unwrap()
}

/// Rational constant as a Hecke-field element.
pub fn rat_elem(n: i64) -> NFElem {
    NFElem::from_rational(Rational::from(n), 4)
}
