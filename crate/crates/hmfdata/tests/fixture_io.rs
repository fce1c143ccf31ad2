//! Fixture parsing, validation, and writing.

mod common;

use std::io::Write;

use common::*;
use hmfdata::{load_newform, write_newform_file, FixtureRow, HmfError};
use numfield::{prime_split, SplitType};
use rug::Rational;

#[test]
fn roundtrip_preserves_everything() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_synthetic(dir.path(), 300, "synthetic-c");
    let rec = load_newform(&path).unwrap();
    assert_eq!(rec.label, "synthetic-c");
    assert_eq!(rec.base_disc, 12);
    assert_eq!(rec.level_norm, 1);
    assert_eq!(rec.bound, 300);
    assert_eq!(rec.hecke.degree, 4);

    // rewrite from the loaded table and reload; tables must agree
    let rows: Vec<FixtureRow> = rec
        .eigen
        .values()
        .map(|e| FixtureRow {
            p: e.prime.p,
            norm: e.prime.norm,
            gen: coords2(&e.prime.gen),
            ap: e.ap.coeffs.clone(),
        })
        .collect();
    let path2 = dir.path().join("again.jsonl");
    write_newform_file(&path2, &header12([1, 0], 1, 300, "synthetic-c"), &rows).unwrap();
    let rec2 = load_newform(&path2).unwrap();
    assert_eq!(rec.eigen.len(), rec2.eigen.len());
    for (key, entry) in &rec.eigen {
        assert_eq!(entry.ap, rec2.eigen[key].ap);
    }
}

#[test]
fn split_rows_reidentify_by_generator() {
    // a generator times a unit still names the same prime
    let base = base12();
    let rec = synthetic_record(150);
    let (ty, primes) = prime_split(&base, 11).unwrap();
    assert_eq!(ty, SplitType::Split);
    // unit 2 + sqrt(3)
    let unit = numfield::NFElem::from_i64s(&[2, 1]);
    for pr in &primes {
        let g2 = base.mul(&pr.gen, &unit);
        assert_eq!(base.norm(&g2).abs(), Rational::from(11u32));
        let dir = tempfile::tempdir().unwrap();
        let mut rows = synthetic_rows(150);
        for r in rows.iter_mut() {
            if r.p == 11 && r.gen == coords2(&pr.gen) {
                r.gen = coords2(&g2);
            }
        }
        let path = dir.path().join("u.jsonl");
        write_newform_file(&path, &header12([1, 0], 1, 150, "u"), &rows).unwrap();
        let rec2 = load_newform(&path).unwrap();
        assert_eq!(
            rec2.eigen[&(11, pr.index)].ap,
            rec.eigen[&(11, pr.index)].ap
        );
    }
}

#[test]
fn empty_file_names_missing_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.jsonl");
    std::fs::File::create(&path).unwrap();
    match load_newform(&path) {
        Err(HmfError::Parse { line: 1, msg }) => {
            assert!(msg.contains("header"), "message was: {msg}")
        }
        other => panic!("expected header parse error, got {other:?}"),
    }
}

#[test]
fn truncated_header_names_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nohead.jsonl");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "{{\"base_field_disc\":12,\"level_gen\":[1,0]}}").unwrap();
    drop(f);
    match load_newform(&path) {
        Err(HmfError::Parse { line: 1, msg }) => {
            assert!(msg.contains("level_norm"), "message was: {msg}")
        }
        other => panic!("expected missing-field error, got {other:?}"),
    }
}

#[test]
fn level_norm_mismatch_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lvl.jsonl");
    let header = header12([17, 17], 577, 100, "bad");
    write_newform_file(&path, &header, &synthetic_rows(100)).unwrap();
    match load_newform(&path) {
        Err(HmfError::BadLevel { expected: 577, got: 578 }) => {}
        other => panic!("expected level mismatch, got {other:?}"),
    }
}

#[test]
fn ramanujan_violation_is_data_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ram.jsonl");
    let mut rows = synthetic_rows(100);
    for r in rows.iter_mut() {
        if r.p == 11 {
            r.ap = rat_elem(7).coeffs.clone(); // |7| > 2 sqrt(11)
        }
    }
    write_newform_file(&path, &header12([1, 0], 1, 100, "ram"), &rows).unwrap();
    match load_newform(&path) {
        Err(HmfError::RamanujanViolation { p: 11, .. }) => {}
        other => panic!("expected Ramanujan violation, got {other:?}"),
    }
}

#[test]
fn coverage_gap_detected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.jsonl");
    let rows: Vec<FixtureRow> = synthetic_rows(100)
        .into_iter()
        .filter(|r| !(r.p == 13 && r.norm == 13))
        .collect();
    write_newform_file(&path, &header12([1, 0], 1, 100, "gap"), &rows).unwrap();
    match load_newform(&path) {
        Err(HmfError::MissingPrime { p: 13, norm: 13, .. }) => {}
        other => panic!("expected missing prime, got {other:?}"),
    }
}

#[test]
fn level_primes_are_optional() {
    // with level (17 + 17 omega) of norm 578, the primes above 2 and
    // 17 divide the level and may be omitted
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lvl578.jsonl");
    let rows: Vec<FixtureRow> = synthetic_rows(300)
        .into_iter()
        .filter(|r| r.p != 2 && r.p != 17)
        .collect();
    write_newform_file(&path, &header12([17, 17], 578, 300, "lvl578"), &rows).unwrap();
    let rec = load_newform(&path).unwrap();
    assert!(rec.eigen.values().all(|e| !rec.divides_level(&e.prime)));
    // and the ramified prime above 3 still does not divide this level
    let (_, p3) = prime_split(&rec.base, 3).unwrap();
    assert!(!rec.divides_level(&p3[0]));
}

#[test]
fn duplicate_prime_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.jsonl");
    let mut rows = synthetic_rows(50);
    let extra = rows
        .iter()
        .find(|r| r.p == 11)
        .cloned()
        .expect("11 splits");
    rows.push(extra);
    write_newform_file(&path, &header12([1, 0], 1, 50, "dup"), &rows).unwrap();
    match load_newform(&path) {
        Err(HmfError::Parse { msg, .. }) => assert!(msg.contains("duplicate")),
        other => panic!("expected duplicate error, got {other:?}"),
    }
}

#[test]
fn wrong_generator_norm_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("badgen.jsonl");
    let mut rows = synthetic_rows(50);
    for r in rows.iter_mut() {
        if r.p == 11 && r.gen[1] != 0 {
            r.gen = [11, 0]; // norm 121, not 11
            break;
        }
    }
    write_newform_file(&path, &header12([1, 0], 1, 50, "badgen"), &rows).unwrap();
    match load_newform(&path) {
        Err(HmfError::Parse { msg, .. }) => assert!(msg.contains("norm")),
        other => panic!("expected generator norm error, got {other:?}"),
    }
}

#[test]
fn rational_ap_entries_parse() {
    // denominators are legal in the format even though descent checks
    // will refuse even ones later
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rat.jsonl");
    let mut rows = synthetic_rows(50);
    for r in rows.iter_mut() {
        if r.p == 11 {
            r.ap = vec![
                Rational::from((1, 3)),
                Rational::from(0),
                Rational::from(0),
                Rational::from(0),
            ];
        }
    }
    write_newform_file(&path, &header12([1, 0], 1, 50, "rat"), &rows).unwrap();
    let rec = load_newform(&path).unwrap();
    let splits = prime_split(&rec.base, 11).unwrap().1;
    let ap = rec.eigenvalue(&splits[0]).unwrap();
    assert_eq!(ap.coeffs[0], Rational::from((1, 3)));
}

#[test]
fn label_falls_back_to_file_stem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stem-name.jsonl");
    let mut header = header12([1, 0], 1, 50, "x");
    header.label = None;
    write_newform_file(&path, &header, &synthetic_rows(50)).unwrap();
    let rec = load_newform(&path).unwrap();
    assert_eq!(rec.label, "stem-name");
}
