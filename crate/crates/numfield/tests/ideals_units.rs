//! Prime splitting, fundamental units, and ideal enumeration.
//!
//! Oracles: fundamental units are checked against a brute-force
//! minimality search over small norm-form solutions; ideal counts per
//! norm are checked against the Dedekind zeta coefficients
//! sum_{d | n} chi(d) with chi the Kronecker character of the field
//! discriminant (an independent closed form).

use numfield::{
    fundamental_unit, ideals_of_norm_upto, kronecker, prime_split, NFElem, NfError, NumberField,
    SplitType,
};
use rug::ops::CompleteRound;
use rug::{Float, Rational};

fn field_sqrt3() -> NumberField {
    NumberField::new(&[-3, 0, 1]).unwrap()
}

fn field_sqrt2() -> NumberField {
    NumberField::new(&[-2, 0, 1]).unwrap()
}

/// Q(sqrt(77)) with the integral generator (1 + sqrt(77)) / 2.
fn field_77() -> NumberField {
    NumberField::new(&[-19, -1, 1]).unwrap()
}

fn abs_norm(f: &NumberField, e: &NFElem) -> Rational {
    f.norm(e).abs()
}

#[test]
fn two_is_ramified_in_sqrt3() {
    let f = field_sqrt3();
    let (ty, ps) = prime_split(&f, 2).unwrap();
    assert_eq!(ty, SplitType::Ramified);
    assert_eq!(ps.len(), 1);
    let p2 = &ps[0];
    assert_eq!((p2.norm, p2.residue_degree, p2.ramification), (2, 1, 2));
    assert_eq!(abs_norm(&f, &p2.gen), Rational::from(2));
    // the ideal is (1 + sqrt 3): the quotient of generators is a unit
    let canonical = NFElem::from_i64s(&[1, 1]);
    let q = f.div(&p2.gen, &canonical).unwrap();
    assert!(q.is_integral());
    assert_eq!(abs_norm(&f, &q), Rational::from(1));
}

#[test]
fn seventeen_is_inert_in_sqrt3() {
    let f = field_sqrt3();
    let (ty, ps) = prime_split(&f, 17).unwrap();
    assert_eq!(ty, SplitType::Inert);
    assert_eq!(ps.len(), 1);
    assert_eq!(ps[0].norm, 289);
    assert_eq!(ps[0].residue_degree, 2);
    assert!(ps[0].omega_residue.is_none());
    // level norm of (17(1+sqrt3)) = 289 * 2
    assert_eq!(ps[0].norm * 2, 578);
}

#[test]
fn eleven_splits_in_sqrt3() {
    let f = field_sqrt3();
    let (ty, ps) = prime_split(&f, 11).unwrap();
    assert_eq!(ty, SplitType::Split);
    assert_eq!(ps.len(), 2);
    // 3 = 5^2 = 6^2 mod 11, so the residues of omega are 5 and 6,
    // and index 0 takes the smaller residue
    assert_eq!(ps[0].omega_residue, Some(5));
    assert_eq!(ps[1].omega_residue, Some(6));
    assert_eq!((ps[0].index, ps[1].index), (0, 1));
    for p in &ps {
        assert_eq!(abs_norm(&f, &p.gen), Rational::from(11));
    }
    // the two generators multiply to an associate of 11
    let prod = f.mul(&ps[0].gen, &ps[1].gen);
    let q = f
        .div(&prod, &NFElem::from_rational(Rational::from(11), 2))
        .unwrap();
    assert!(q.is_integral());
    assert_eq!(abs_norm(&f, &q), Rational::from(1));
}

#[test]
fn split_residues_are_roots_of_min_poly() {
    // the residue convention is intrinsic: omega_residue must be a
    // root of the minimal polynomial modulo p
    for f in [field_sqrt3(), field_77()] {
        let c0 = f.min_poly[0].to_i128().unwrap();
        let c1 = f.min_poly[1].to_i128().unwrap();
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let (ty, ps) = prime_split(&f, p).unwrap();
            if ty == SplitType::Inert {
                continue;
            }
            for q in &ps {
                let r = q.omega_residue.unwrap() as i128;
                assert_eq!(
                    (r * r + c1 * r + c0).rem_euclid(p as i128),
                    0,
                    "p={p} r={r}"
                );
            }
        }
    }
}

#[test]
fn norm_product_above_p_is_p_squared() {
    for f in [field_sqrt3(), field_77()] {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29] {
            let (_, ps) = prime_split(&f, p).unwrap();
            let mut prod = 1u64;
            for q in &ps {
                assert_eq!(
                    abs_norm(&f, &q.gen),
                    Rational::from(q.norm),
                    "generator norm mismatch at p={p}"
                );
                prod *= q.norm.pow(q.ramification);
            }
            assert_eq!(prod, p * p, "p={p}");
        }
    }
}

#[test]
fn prime_split_requires_quadratic() {
    let k = NumberField::new(&[1, 1, -3, -1, 1]).unwrap();
    assert!(matches!(
        prime_split(&k, 7),
        Err(NfError::NotQuadratic(4))
    ));
}

// --- fundamental units --------------------------------------------

/// Brute-force oracle: smallest unit > 1 (in the embedding sending
/// omega to its larger root) among a + b*omega with small a, b.
fn brute_fundamental(f: &NumberField, a_range: i64, b_range: i64) -> NFElem {
    let prec = 96u32;
    let emb = f.real_embeddings(prec).unwrap();
    let omega_big = emb.last().unwrap();
    let mut best: Option<(Float, NFElem)> = None;
    for a in -a_range..=a_range {
        for b in -b_range..=b_range {
            let e = NFElem::from_i64s(&[a, b]);
            let n = f.norm(&e).abs();
            if n != 1 {
                continue;
            }
            let val = Float::with_val(prec, a) + Float::with_val(prec, b) * omega_big;
            if val <= 1 {
                continue;
            }
            // strictly greater than 1 with margin (exclude the unit 1)
            if (val.clone() - 1u32).abs() < Float::with_val(prec, 1e-20) {
                continue;
            }
            match &best {
                Some((v, _)) if *v <= val => {}
                _ => best = Some((val, e)),
            }
        }
    }
    best.expect("oracle found no unit").1
}

#[test]
fn fundamental_unit_sqrt3() {
    let f = field_sqrt3();
    let (u, n) = fundamental_unit(&f).unwrap();
    assert_eq!(u, NFElem::from_i64s(&[2, 1])); // 2 + sqrt 3
    assert_eq!(n, 1);
    assert_eq!(u, brute_fundamental(&f, 40, 20));
}

#[test]
fn fundamental_unit_sqrt2() {
    let f = field_sqrt2();
    let (u, n) = fundamental_unit(&f).unwrap();
    assert_eq!(u, NFElem::from_i64s(&[1, 1])); // 1 + sqrt 2
    assert_eq!(n, -1);
    assert_eq!(u, brute_fundamental(&f, 40, 20));
}

#[test]
fn fundamental_unit_77() {
    let f = field_77();
    let (u, n) = fundamental_unit(&f).unwrap();
    // (9 + sqrt 77)/2 = 4 + omega
    assert_eq!(u, NFElem::from_i64s(&[4, 1]));
    assert_eq!(n, 1);
    assert_eq!(u, brute_fundamental(&f, 60, 12));
}

#[test]
fn unit_times_conjugate_is_plus_minus_one() {
    for f in [field_sqrt3(), field_sqrt2(), field_77()] {
        let (u, n) = fundamental_unit(&f).unwrap();
        let auts = numfield::automorphisms(&f).unwrap();
        let sigma = auts.iter().find(|a| !a.is_identity()).unwrap();
        let prod = f.mul(&u, &sigma.apply(&f, &u));
        let mut expect = f.zero();
        expect.coeffs[0] = Rational::from(n);
        assert_eq!(prod, expect);
    }
}

// --- ideal enumeration --------------------------------------------

#[test]
fn only_unit_ideal_below_one() {
    let f = field_sqrt3();
    let list = ideals_of_norm_upto(&f, 1).unwrap();
    assert_eq!(list.ideals.len(), 1);
    assert_eq!(list.ideals[0].norm, 1);
    assert!(list.ideals[0].factors.is_empty());
}

#[test]
fn sqrt3_ideals_up_to_four() {
    let f = field_sqrt3();
    let list = ideals_of_norm_upto(&f, 4).unwrap();
    let norms: Vec<u64> = list.ideals.iter().map(|i| i.norm).collect();
    assert_eq!(norms, vec![1, 2, 3, 4]);
    // norm 4 is the square of the ramified prime above 2, not a
    // split pair
    let four = &list.ideals[3];
    assert_eq!(four.factors.len(), 1);
    let (idx, e) = four.factors[0];
    assert_eq!(e, 2);
    assert_eq!(list.primes[idx].p, 2);
}

#[test]
fn ideal_counts_match_zeta_coefficients() {
    // #ideals of norm n = sum over d | n of chi(d), chi = Kronecker
    // character of the field discriminant
    for (f, disc) in [(field_sqrt3(), 12i64), (field_77(), 77i64)] {
        let x = 2000u64;
        let list = ideals_of_norm_upto(&f, x).unwrap();
        let mut counts = vec![0u32; (x + 1) as usize];
        for i in &list.ideals {
            counts[i.norm as usize] += 1;
        }
        for n in 1..=x {
            let mut expect = 0i32;
            let mut d = 1u64;
            while d * d <= n {
                if n % d == 0 {
                    expect += kronecker(disc, d as i64);
                    if d != n / d {
                        expect += kronecker(disc, (n / d) as i64);
                    }
                }
                d += 1;
            }
            assert!(expect >= 0);
            assert_eq!(counts[n as usize] as i32, expect, "disc {disc}, n={n}");
        }
    }
}

#[test]
fn ideal_count_growth_is_linear() {
    let f = field_sqrt3();
    let big = ideals_of_norm_upto(&f, 10_000).unwrap().ideals.len() as f64;
    let half = ideals_of_norm_upto(&f, 5_000).unwrap().ideals.len() as f64;
    let slope_big = big / 10_000.0;
    let slope_half = half / 5_000.0;
    let rel = (slope_big - slope_half).abs() / slope_half;
    assert!(rel < 0.2, "slopes {slope_big} vs {slope_half}");
}

#[test]
fn composite_ideal_generators_have_matching_norm() {
    let f = field_sqrt3();
    let list = ideals_of_norm_upto(&f, 200).unwrap();
    for ideal in &list.ideals {
        let g = list.generator(&f, ideal);
        assert!(g.is_integral());
        assert_eq!(
            abs_norm(&f, &g),
            Rational::from(ideal.norm),
            "norm {}",
            ideal.norm
        );
    }
}

#[test]
fn iterator_view_agrees() {
    let f = field_sqrt3();
    let list = ideals_of_norm_upto(&f, 50).unwrap();
    let via_iter: Vec<u64> = list.iter().map(|(_, n)| n).collect();
    let direct: Vec<u64> = list.ideals.iter().map(|i| i.norm).collect();
    assert_eq!(via_iter, direct);
    for (factors, norm) in list.iter() {
        let prod: u64 = factors.iter().map(|(p, e)| p.norm.pow(*e)).product();
        assert_eq!(prod, norm);
    }
}

#[test]
fn split_pair_omega_residues_cover_both_roots() {
    // over Q(sqrt 77): 2 and 3 are inert (needed downstream), and a
    // known split prime keeps distinct residues
    let f = field_77();
    for p in [2u64, 3] {
        let (ty, _) = prime_split(&f, p).unwrap();
        assert_eq!(ty, SplitType::Inert, "p={p}");
    }
    // 78 = 77 + 1: x^2 - x - 19 mod 13: try p = 13: disc 77 = 77 - 5*13 = 12
    // kronecker(77,13): 77 = 12 mod 13, and 12 = 5^2 mod 13, so split
    let (ty, ps) = prime_split(&f, 13).unwrap();
    assert_eq!(ty, SplitType::Split);
    assert_ne!(ps[0].omega_residue, ps[1].omega_residue);
    assert!(ps[0].omega_residue < ps[1].omega_residue);
}

#[test]
fn unit_search_uses_float_tolerance_safely() {
    // the fundamental unit of Q(sqrt 3) to high precision matches
    // 2 + sqrt 3 evaluated from the embeddings
    let f = field_sqrt3();
    let (u, _) = fundamental_unit(&f).unwrap();
    let prec = 256u32;
    let vals = f.embed(&u, prec).unwrap();
    let s3 = Float::with_val(prec + 16, 3u32).sqrt();
    let big = Float::with_val(prec + 16, 2u32) + &s3;
    let small = Float::with_val(prec + 16, 2u32) - &s3;
    let tol = Float::with_val(prec, Float::i_exp(1, -200));
    assert!(((&vals[1] - &big).complete(prec)).abs() < tol);
    assert!(((&vals[0] - &small).complete(prec)).abs() < tol);
}
