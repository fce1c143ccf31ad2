//! Automorphisms and the codifferent test.
//!
//! The automorphism count of the quartic coefficient field is
//! certified by an exact factorization oracle: dividing the minimal
//! polynomial by the linear factors found gives an exact quadratic
//! cofactor whose discriminant has a negative real embedding, so it
//! has no roots in the (totally real) field and the two linear
//! factors are all of them.

use numfield::{
    automorphisms, codifferent_gram, codifferent_report, is_codifferent_generator,
    recognize_rational_cf, residue_frobenius_power, residue_map_mod2, NFElem, NumberField,
};
use rug::ops::CompleteRound;
use rug::{Float, Rational};

fn field_sqrt3() -> NumberField {
    NumberField::new(&[-3, 0, 1]).unwrap()
}

fn field_quartic() -> NumberField {
    NumberField::new(&[1, 1, -3, -1, 1]).unwrap()
}

fn drat(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from(x)).collect()
}

#[test]
fn quadratic_has_two_automorphisms() {
    let f = field_sqrt3();
    let auts = automorphisms(&f).unwrap();
    assert_eq!(auts.len(), 2);
    assert!(auts[0].is_identity());
    // conjugation: sqrt3 -> -sqrt3
    assert_eq!(auts[1].image, NFElem::from_i64s(&[0, -1]));
    assert_eq!(auts[1].root_perm, vec![1, 0]);
}

#[test]
fn quartic_automorphism_group_is_order_two() {
    // The quartic x^4 - x^3 - 3x^2 + x + 1 (discriminant 725, Galois
    // closure of degree 8) contains exactly two roots of itself; the
    // nontrivial automorphism is nu -> nu^3 - nu^2 - 3 nu + 1 and it
    // swaps the embedding pairs (0 2) and (1 3).
    let k = field_quartic();
    let auts = automorphisms(&k).unwrap();
    assert_eq!(auts.len(), 2);
    assert!(auts[0].is_identity());
    let tau = &auts[1];
    assert_eq!(tau.image, NFElem::from_rationals(drat(&[1, -3, -1, 1])));
    assert_eq!(tau.root_perm, vec![2, 3, 0, 1]);
    // involution: tau composed with itself is the identity
    let square = tau.compose(&k, tau);
    assert!(square.is_identity());
    assert_eq!(square.image, k.gen());
    // exact root check
    assert!(k.eval_min_poly(&tau.image).is_zero());
}

#[test]
fn quartic_root_count_certified_by_exact_factorization() {
    // divide f(x) by (x - nu)(x - tau(nu)) over the field; the
    // quotient is an exact quadratic shown to have non-square
    // discriminant in the field, so the polynomial has exactly two
    // roots there and the automorphism group has order exactly 2
    let k = field_quartic();
    let auts = automorphisms(&k).unwrap();
    let tau = &auts[1];
    let nu = k.gen();
    // (x - nu)(x - tau nu) = x^2 - s x + p
    let s = k.add(&nu, &tau.image);
    let p = k.mul(&nu, &tau.image);
    // long division of f by x^2 - s x + p over K, exact
    let fq: Vec<NFElem> = k
        .min_poly
        .iter()
        .map(|c| NFElem::from_rational(Rational::from(c), 4))
        .collect();
    let mut rem = fq;
    let mut quot = vec![k.zero(); 3];
    for top in (2..=4usize).rev() {
        let lead = rem[top].clone();
        quot[top - 2] = lead.clone();
        // subtract lead * x^(top-2) * (x^2 - s x + p)
        rem[top] = k.sub(&rem[top], &lead);
        rem[top - 1] = k.add(&rem[top - 1], &k.mul(&lead, &s));
        rem[top - 2] = k.sub(&rem[top - 2], &k.mul(&lead, &p));
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division must be exact");
    // quotient x^2 + b x + c with b = quot[1], c = quot[0]
    let b = quot[1].clone();
    let c = quot[0].clone();
    let disc = k.sub(&k.mul(&b, &b), &k.scale(&c, &Rational::from(4)));

    // every embedding of the field is real and keeps all four roots of
    // f real, so the cofactor has two real roots under each embedding
    // and its discriminant is totally positive: a sign test can never
    // decide squareness here
    assert!(k.is_totally_positive(&disc).unwrap());

    // exact square test: a square root s of an algebraic integer is
    // itself integral, and its embeddings are +-sqrt of the embeddings
    // of disc, so scanning all 2^4 sign patterns, solving the
    // Vandermonde system for power-basis coordinates, recognizing them
    // as rationals, and verifying s^2 == disc exactly is exhaustive
    let prec = 320u32;
    let roots = k.real_embeddings(prec).unwrap();
    let square_root_in_field = |d: &NFElem| -> Option<NFElem> {
        let dv = k.embed(d, prec).unwrap();
        let sq: Vec<Float> = dv.iter().map(|v| v.clone().sqrt()).collect();
        for mask in 0u32..16 {
            let target: Vec<Float> = sq
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if mask >> i & 1 == 1 {
                        (-v).complete(prec)
                    } else {
                        v.clone()
                    }
                })
                .collect();
            // augmented Vandermonde rows [1, r, r^2, r^3 | target]
            let mut m: Vec<Vec<Float>> = (0..4)
                .map(|i| {
                    let mut row = Vec::with_capacity(5);
                    let mut p = Float::with_val(prec, 1);
                    for _ in 0..4 {
                        row.push(p.clone());
                        p = (&p * &roots[i]).complete(prec);
                    }
                    row.push(target[i].clone());
                    row
                })
                .collect();
            for col in 0..4 {
                let piv = (col..4)
                    .max_by(|&a, &b| {
                        let x = m[a][col].clone().abs();
                        let y = m[b][col].clone().abs();
                        x.partial_cmp(&y).unwrap()
                    })
                    .unwrap();
                m.swap(col, piv);
                for r in 0..4 {
                    if r == col {
                        continue;
                    }
                    let f = (&m[r][col] / &m[col][col]).complete(prec);
                    for cc in col..5 {
                        let sub = (&f * &m[col][cc]).complete(prec);
                        m[r][cc] -= sub;
                    }
                }
            }
            let mut coeffs = Vec::with_capacity(4);
            let mut ok = true;
            for r in 0..4 {
                let v = (&m[r][4] / &m[r][r]).complete(prec);
                match recognize_rational_cf(&v, 64, 160) {
                    Some(q) => coeffs.push(q),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let cand = NFElem::from_rationals(coeffs);
            if k.sub(&k.mul(&cand, &cand), d).is_zero() {
                return Some(cand);
            }
        }
        None
    };

    // positive control: the search recovers a known square exactly
    let t = k.sub(&k.mul(&nu, &nu), &k.one());
    let t2 = k.mul(&t, &t);
    let s = square_root_in_field(&t2).expect("known square must be recovered");
    assert!(k.sub(&k.mul(&s, &s), &t2).is_zero());

    // the cofactor discriminant admits no square root in the field
    assert!(square_root_in_field(&disc).is_none());
}

#[test]
fn automorphisms_closed_under_composition() {
    for f in [field_sqrt3(), field_quartic()] {
        let auts = automorphisms(&f).unwrap();
        for a in &auts {
            for b in &auts {
                let c = a.compose(&f, b);
                assert!(
                    auts.iter().any(|x| x.image == c.image),
                    "composition escaped the group"
                );
                // exact homomorphism check on a sample element
                let sample = [1i64, 2, 0, -1];
                let e = NFElem::from_i64s(&sample[..f.degree]);
                let lhs = c.apply(&f, &e);
                let rhs = a.apply(&f, &b.apply(&f, &e));
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn codifferent_generator_confirmed() {
    let k = field_quartic();
    // d = -2 nu^3 + 4 nu^2 + 3 nu + 2
    let d = NFElem::from_i64s(&[2, 3, 4, -2]);
    let rep = codifferent_report(&k, &d).unwrap();
    assert!(rep.generates_codifferent);
    assert!(rep.gram_integral);
    assert!(rep.gram_det == 1 || rep.gram_det == -1);
    assert!(rep.totally_positive);
    assert_eq!(rep.embedding_positive, vec![true; 4]);
    assert!(is_codifferent_generator(&k, &d).unwrap());
}

#[test]
fn trivial_element_is_not_codifferent_generator() {
    let k = field_quartic();
    let one = k.one();
    let rep = codifferent_report(&k, &one).unwrap();
    assert!(!rep.generates_codifferent);
    // Gram of the plain trace form has determinant = discriminant 725
    let gram = codifferent_gram(&k, &one).unwrap();
    let det = numfield::linalg::det_rational(&gram);
    assert_eq!(det, Rational::from(725));
}

#[test]
fn codifferent_stable_under_totally_positive_unit() {
    let k = field_quartic();
    let d = NFElem::from_i64s(&[2, 3, 4, -2]);
    let nu = k.gen();
    // nu is a unit (norm 1); nu^2 is totally positive
    let nu2 = k.mul(&nu, &nu);
    assert!(k.is_totally_positive(&nu2).unwrap());
    let scaled = k.mul(&d, &nu2);
    let rep = codifferent_report(&k, &scaled).unwrap();
    assert!(rep.generates_codifferent);
    assert!(rep.totally_positive);
    // scaling by the sign-mixed unit nu keeps the ideal but loses
    // positivity
    let mixed = k.mul(&d, &nu);
    let rep = codifferent_report(&k, &mixed).unwrap();
    assert!(rep.generates_codifferent);
    assert!(!rep.totally_positive);
}

#[test]
fn residue_frobenius_powers() {
    let k = field_quartic();
    let map = residue_map_mod2(&k).unwrap();
    let auts = automorphisms(&k).unwrap();
    let id_pow = residue_frobenius_power(&map, &auts[0]).unwrap();
    assert_eq!(id_pow, Some(0));
    // tau acts on the residue field as Frobenius squared (x -> x^4):
    // this is the exponent in the mod-2 eigenvalue descent relation
    let tau_pow = residue_frobenius_power(&map, &auts[1]).unwrap();
    assert_eq!(tau_pow, Some(2));
    // inertia at 2 is trivial: only the identity acts trivially
    let inertia: Vec<_> = auts
        .iter()
        .filter(|a| residue_frobenius_power(&map, a).unwrap() == Some(0))
        .collect();
    assert_eq!(inertia.len(), 1);
    assert!(inertia[0].is_identity());
}

#[test]
fn rational_recognition_behaves() {
    let prec = 200u32;
    let x = Float::with_val(prec, 22) / Float::with_val(prec, 7);
    assert_eq!(
        recognize_rational_cf(&x, 64, 120),
        Some(Rational::from((22, 7)))
    );
    let x = Float::with_val(prec, -355) / Float::with_val(prec, 113);
    assert_eq!(
        recognize_rational_cf(&x, 64, 120),
        Some(Rational::from((-355, 113)))
    );
    // pi is not a small rational
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    assert_eq!(recognize_rational_cf(&pi, 64, 120), None);
    // sqrt(3) is not rational either
    let s3 = Float::with_val(prec, 3u32).sqrt();
    assert_eq!(recognize_rational_cf(&s3, 64, 120), None);
}

#[test]
fn embeddings_of_tau_image_match_permutation() {
    let k = field_quartic();
    let auts = automorphisms(&k).unwrap();
    let tau = &auts[1];
    let prec = 220u32;
    let roots = k.real_embeddings(prec).unwrap();
    let vals = k.embed(&tau.image, prec).unwrap();
    let tol = Float::with_val(prec, Float::i_exp(1, -180));
    for (i, v) in vals.iter().enumerate() {
        let expect = &roots[tau.root_perm[i]];
        assert!(((v - expect).complete(prec)).abs() < tol, "i={i}");
    }
}
