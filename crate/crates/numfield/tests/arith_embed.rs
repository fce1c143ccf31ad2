//! Arithmetic, embeddings, and the mod-2 residue map.  Root counts
//! for the quartic coefficient field are certified by an in-test
//! Sturm-chain oracle computed in exact rational arithmetic, and the
//! embedding values are frozen 40-digit strings cross-checked against
//! that oracle's isolating intervals.

use numfield::{NFElem, NfError, NumberField};
use rug::ops::CompleteRound;
use rug::{Complete, Float, Rational};

fn field_sqrt3() -> NumberField {
    NumberField::new(&[-3, 0, 1]).unwrap()
}

fn field_quartic() -> NumberField {
    NumberField::new(&[1, 1, -3, -1, 1]).unwrap()
}

// --- Sturm oracle -------------------------------------------------

fn poly_deriv(p: &[Rational]) -> Vec<Rational> {
    (1..p.len())
        .map(|i| (&p[i] * &Rational::from(i as u64)).complete())
        .collect()
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r: Vec<Rational> = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let f = (&r[dr] / &lead).complete();
        if f.cmp0() != std::cmp::Ordering::Equal {
            for i in 0..=db {
                let t = (&b[i] * &f).complete();
                r[dr - db + i] -= t;
            }
        }
        r.pop();
        while r.last().map_or(false, |c| c.cmp0() == std::cmp::Ordering::Equal) {
            r.pop();
        }
    }
    r
}

fn sturm_chain(f: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = vec![f.to_vec(), poly_deriv(f)];
    loop {
        let k = chain.len();
        if chain[k - 1].len() <= 1 {
            break;
        }
        let mut r = poly_rem(&chain[k - 2], &chain[k - 1]);
        if r.is_empty() {
            break;
        }
        for c in &mut r {
            *c = (-&*c).complete();
        }
        chain.push(r);
    }
    chain
}

fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn sign_changes(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let mut signs = vec![];
    for p in chain {
        let v = poly_eval(p, x);
        match v.cmp0() {
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Greater => signs.push(1i32),
            std::cmp::Ordering::Less => signs.push(-1i32),
        }
    }
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of f in (a, b].
fn sturm_count(f: &[Rational], a: &Rational, b: &Rational) -> usize {
    let chain = sturm_chain(f);
    sign_changes(&chain, a) - sign_changes(&chain, b)
}

fn rat(n: i64, d: u64) -> Rational {
    Rational::from((n, d as i64))
}

// --- arithmetic ---------------------------------------------------

#[test]
fn trace_of_one_is_degree() {
    assert_eq!(field_sqrt3().trace(&NFElem::one(2)), Rational::from(2));
    assert_eq!(field_quartic().trace(&NFElem::one(4)), Rational::from(4));
}

#[test]
fn quadratic_norm_identifies_prime_above_2() {
    let f = field_sqrt3();
    let e = NFElem::from_i64s(&[1, 1]); // 1 + sqrt(3)
    assert_eq!(f.norm(&e), Rational::from(-2));
}

#[test]
fn quartic_generator_is_unit() {
    let k = field_quartic();
    let nu = k.gen();
    // product of roots of the monic quartic = constant term = +1
    assert_eq!(k.norm(&nu), Rational::from(1));
    assert_eq!(k.trace(&nu), Rational::from(1));
    let inv = k.inv(&nu).unwrap();
    assert_eq!(k.mul(&nu, &inv), k.one());
    // inverse of a unit is integral
    assert!(inv.is_integral());
}

#[test]
fn charpoly_of_generator_is_min_poly() {
    for f in [field_sqrt3(), field_quartic()] {
        let cp = f.charpoly(&f.gen());
        let expect: Vec<Rational> = f.min_poly.iter().map(Rational::from).collect();
        assert_eq!(cp, expect);
    }
}

#[test]
fn division_by_zero_reported() {
    let f = field_sqrt3();
    assert!(matches!(
        f.inv(&f.zero()),
        Err(NfError::DivisionByZero)
    ));
}

#[test]
fn exact_inverse_roundtrip() {
    let k = field_quartic();
    let e = NFElem::from_rationals(vec![
        rat(3, 2),
        rat(-7, 5),
        rat(0, 1),
        rat(11, 4),
    ]);
    let q = k.div(&k.one(), &e).unwrap();
    assert_eq!(k.mul(&e, &q), k.one());
}

// --- embeddings ---------------------------------------------------

#[test]
fn sqrt3_embeddings_ascending() {
    let f = field_sqrt3();
    let r = f.real_embeddings(128).unwrap();
    assert_eq!(r.len(), 2);
    let s3 = Float::with_val(160, 3u32).sqrt();
    let tol = Float::with_val(160, Float::i_exp(1, -120));
    assert!(((&r[0] + &s3).complete(160)).abs() < tol);
    assert!(((&r[1] - &s3).complete(160)).abs() < tol);
}

#[test]
fn quartic_roots_certified_by_sturm() {
    let k = field_quartic();
    let fp: Vec<Rational> = k.min_poly.iter().map(Rational::from).collect();
    // four roots, all inside (-2, 3), isolated one per interval
    assert_eq!(sturm_count(&fp, &rat(-2, 1), &rat(3, 1)), 4);
    assert_eq!(sturm_count(&fp, &rat(-2, 1), &rat(-1, 1)), 1);
    assert_eq!(sturm_count(&fp, &rat(-1, 1), &rat(0, 1)), 1);
    assert_eq!(sturm_count(&fp, &rat(0, 1), &rat(1, 1)), 1);
    assert_eq!(sturm_count(&fp, &rat(2, 1), &rat(3, 1)), 1);
    // nothing outside
    assert_eq!(sturm_count(&fp, &rat(-100, 1), &rat(-2, 1)), 0);
    assert_eq!(sturm_count(&fp, &rat(3, 1), &rat(100, 1)), 0);

    let roots = k.real_embeddings(200).unwrap();
    let frozen = [
        "-1.35567429397808222657840059495863546271",
        "-0.4772599964740196445422298845006444654461",
        "0.7376403052281873783738137605929973449894",
        "2.095293985223914492746816718866282583166",
    ];
    let tol = Float::with_val(220, 1e-30f64);
    for (r, s) in roots.iter().zip(frozen) {
        let want = Float::with_val(220, Float::parse(s).unwrap());
        assert!(((r - &want).complete(220)).abs() < tol, "root {r} vs {s}");
    }
}

#[test]
fn newton_refinement_doubles_accuracy() {
    let k = field_quartic();
    let lo = k.real_embeddings(120).unwrap();
    let hi = k.real_embeddings(440).unwrap();
    for (r, big) in lo.iter().zip(&hi) {
        let err = ((r - big).complete(440)).abs();
        assert!(err < Float::with_val(440, Float::i_exp(1, -110)));
        // one Newton step at high precision from the low-precision
        // value must square the error
        let wp = 440u32;
        let x = Float::with_val(wp, r);
        let mut f = Float::new(wp);
        let mut df = Float::new(wp);
        for c in k.min_poly.iter().rev() {
            df *= &x;
            df += &f;
            f *= &x;
            f += c;
        }
        let refined = x - f / df;
        let err2 = ((&refined - big).complete(440)).abs();
        assert!(
            err2 < Float::with_val(440, Float::i_exp(1, -216)),
            "newton step err {err2}"
        );
    }
}

#[test]
fn sum_of_embeddings_matches_trace() {
    // invariant tolerance 2^(8 - prec)
    for prec in [64u32, 128, 256] {
        for k in [field_sqrt3(), field_quartic()] {
            let nu = k.gen();
            let t = k.trace(&nu);
            let vals = k.embed(&nu, prec).unwrap();
            let mut s = Float::new(prec + 16);
            for v in &vals {
                s += v;
            }
            let tf = Float::with_val(prec + 16, &t);
            let diff = ((&s - &tf).complete(prec + 16)).abs();
            assert!(
                diff < Float::with_val(prec, Float::i_exp(1, 8 - prec as i32)),
                "prec {prec}: {diff}"
            );
        }
    }
}

#[test]
fn non_totally_real_rejected() {
    // the 5th cyclotomic polynomial has no real roots; the error
    // surfaces when embeddings are requested
    let k = NumberField::new(&[1, 1, 1, 1, 1]).unwrap();
    assert!(matches!(
        k.real_embeddings(64),
        Err(NfError::NotTotallyReal(0, 4))
    ));
    // x^4 - 2 has exactly 2 real roots
    let k = NumberField::new(&[-2, 0, 0, 0, 1]).unwrap();
    assert!(matches!(
        k.real_embeddings(64),
        Err(NfError::NotTotallyReal(2, 4))
    ));
}

#[test]
fn irreducibility_certificate_is_sound_but_conservative() {
    // x^4 + 1 is irreducible over Q yet reducible modulo every
    // prime, so the mod-p certificate honestly refuses it
    assert!(matches!(
        NumberField::new(&[1, 0, 0, 0, 1]),
        Err(NfError::IrreducibilityUncertified)
    ));
    // genuinely reducible inputs are refused too
    assert!(NumberField::new(&[-1, 0, 1]).is_err());
    assert!(NumberField::new(&[2, 3, 1]).is_err()); // (x+1)(x+2)
}

// --- residue map mod 2 --------------------------------------------

#[test]
fn residue_map_reduced_poly_and_order() {
    let k = field_quartic();
    let m = numfield::residue_map_mod2(&k).unwrap();
    // x^4 + x^3 + x^2 + x + 1
    assert_eq!(m.reduced_poly, vec![1, 1, 1, 1, 1]);
    let nu_bar = m.apply(&k.gen()).unwrap();
    assert_ne!(nu_bar.index(), m.field.one().index());
    assert_eq!(nu_bar.pow(5).index(), m.field.one().index());
    // order is exactly 5 (not 1): already know != 1, and 5 is prime
}

#[test]
fn residue_map_kills_even_integers() {
    let k = field_quartic();
    let m = numfield::residue_map_mod2(&k).unwrap();
    for n in [-6i64, -2, 0, 2, 4, 100] {
        let e = NFElem::from_rational(Rational::from(n), 4);
        assert_eq!(m.apply(&e).unwrap().index(), 0, "n={n}");
    }
    for n in [-3i64, 1, 7] {
        let e = NFElem::from_rational(Rational::from(n), 4);
        assert_eq!(m.apply(&e).unwrap().index(), 1, "n={n}");
    }
}

#[test]
fn residue_map_rejects_even_denominator() {
    let k = field_quartic();
    let m = numfield::residue_map_mod2(&k).unwrap();
    let e = NFElem::from_rationals(vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)]);
    assert!(matches!(m.apply(&e), Err(NfError::EvenDenominator)));
    // odd denominators are fine: 1/3 = 1 mod 2
    let e = NFElem::from_rationals(vec![rat(1, 3), rat(0, 1), rat(0, 1), rat(0, 1)]);
    assert_eq!(m.apply(&e).unwrap().index(), 1);
}

#[test]
fn residue_map_requires_two_inert() {
    // x^4 - 5x^2 + 5: totally real (Eisenstein at 5), but mod 2 it is
    // x^4 + x^2 + 1 = (x^2 + x + 1)^2
    let k = NumberField::new(&[5, 0, -5, 0, 1]).unwrap();
    assert!(matches!(
        numfield::residue_map_mod2(&k),
        Err(NfError::TwoNotInert)
    ));
    // wrong degree
    assert!(matches!(
        numfield::residue_map_mod2(&field_sqrt3()),
        Err(NfError::WrongResidueField(16, 4))
    ));
}
