//! Matrix invariants, projective action, and image-criteria tests.

use ffgroup::{
    all_proj_points, large_image_check, matrix_group_closure, pgammal_action, perm_of,
    sl2_f16_generators, u_invariant, FfError, FqField, Mat2, ProjPoint,
};
use proptest::prelude::*;
use std::sync::Arc;

fn mat(f: &Arc<FqField>, a: u64, b: u64, c: u64, d: u64) -> Mat2 {
    Mat2::new(
        f.from_index(a),
        f.from_index(b),
        f.from_index(c),
        f.from_index(d),
    )
}

#[test]
fn u_invariant_examples() {
    let f16 = FqField::f16();
    // u([[0,1],[1,0]]) = 0
    let w = mat(&f16, 0, 1, 1, 0);
    assert!(u_invariant(&w).unwrap().is_zero());
    // u([[v,-v],[1,0]]) = v for every nonzero v (char 2: -v = v)
    for v in f16.elements().skip(1) {
        let g = Mat2::new(v.clone(), v.neg(), f16.one(), f16.zero());
        assert_eq!(u_invariant(&g).unwrap(), v);
    }
    // same identity over F_7
    let f7 = FqField::prime(7).unwrap();
    for v in f7.elements().skip(1) {
        let g = Mat2::new(v.clone(), v.neg(), f7.one(), f7.zero());
        assert_eq!(u_invariant(&g).unwrap(), v);
    }
    // u(identity) over F_7: tr = 2, det = 1, u = 4
    let id7 = Mat2::identity(&f7);
    assert_eq!(u_invariant(&id7).unwrap(), f7.from_index(4));
    // singular matrix rejected
    let sing = mat(&f16, 1, 1, 1, 1);
    assert!(matches!(u_invariant(&sing), Err(FfError::Singular)));
}

#[test]
fn pgammal_identity_and_scalars_fix_everything() {
    let f16 = FqField::f16();
    let id = Mat2::identity(&f16);
    for p in all_proj_points(&f16) {
        assert_eq!(pgammal_action(&id, 0, &p).unwrap(), p);
    }
    // scalar matrices act trivially (frob_power 0)
    for s in f16.elements().skip(1) {
        let m = Mat2::new(s.clone(), f16.zero(), f16.zero(), s.clone());
        for p in all_proj_points(&f16) {
            assert_eq!(pgammal_action(&m, 0, &p).unwrap(), p);
        }
    }
}

/// The order-2 automorphism a -> a^4 of F_16 fixes exactly the 5
/// points of P^1(F_4); derived here by direct enumeration.
#[test]
fn frobenius_squared_fixes_p1_f4() {
    let f16 = FqField::f16();
    let id = Mat2::identity(&f16);
    let mut fixed = 0;
    for p in all_proj_points(&f16) {
        if pgammal_action(&id, 2, &p).unwrap() == p {
            fixed += 1;
        }
    }
    assert_eq!(fixed, 5);
    let sigma = perm_of(&id, 2).unwrap();
    let mut ct = sigma.cycle_type();
    ct.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(ct, vec![2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1]);
}

#[test]
fn frob_power_out_of_range_rejected() {
    let f16 = FqField::f16();
    let id = Mat2::identity(&f16);
    let p = ProjPoint::infinity(&f16);
    assert!(matches!(
        pgammal_action(&id, 4, &p),
        Err(FfError::BadFrobPower(4, 4))
    ));
}

#[test]
fn large_image_on_full_sl2_f16() {
    let gens = sl2_f16_generators();
    let all = matrix_group_closure(&gens, 10_000).unwrap();
    // brute-force closure oracle: the generators generate all of SL_2(F_16)
    assert_eq!(all.len(), 4080);
    let report = large_image_check(&all).unwrap();
    assert!(report.split_semisimple.is_some());
    assert!(report.nonsplit_semisimple.is_some());
    assert!(report.projective_order_gt5.is_some());
    assert!(report.u_generates_field.is_some());
    assert!(report.contains_sl2());
}

#[test]
fn large_image_identity_only_satisfies_nothing() {
    let f16 = FqField::f16();
    let report = large_image_check(&[Mat2::identity(&f16)]).unwrap();
    assert!(report.split_semisimple.is_none());
    assert!(report.nonsplit_semisimple.is_none());
    assert!(report.projective_order_gt5.is_none());
    assert!(report.u_generates_field.is_none());
    assert!(!report.contains_sl2());
}

#[test]
fn large_image_upper_triangular_fails_nonsplit() {
    let f16 = FqField::f16();
    let mut uppers = vec![];
    for a in f16.elements().skip(1) {
        for b in f16.elements() {
            for d in f16.elements().skip(1) {
                uppers.push(Mat2::new(a.clone(), b.clone(), f16.zero(), d.clone()));
            }
        }
    }
    let report = large_image_check(&uppers).unwrap();
    // characteristic polynomials of triangular matrices always split
    assert!(report.nonsplit_semisimple.is_none());
    assert!(!report.contains_sl2());
}

#[test]
fn large_image_small_field_rejected() {
    let f4 = FqField::f4();
    let err = large_image_check(&[Mat2::identity(&f4)]);
    assert!(matches!(err, Err(FfError::FieldTooSmall(4))));
}

/// Every g in GL_2(k) factors as diag(det g, 1) * s with det s = 1.
#[test]
fn gl2_determinant_factorization() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for field in [FqField::prime(7).unwrap(), FqField::f16()] {
        let mut found = 0;
        while found < 40 {
            let g = mat(
                &field,
                rng.gen_range(0..field.q),
                rng.gen_range(0..field.q),
                rng.gen_range(0..field.q),
                rng.gen_range(0..field.q),
            );
            let det = g.det();
            if det.is_zero() {
                continue;
            }
            found += 1;
            let scale = Mat2::new(
                det.inv().unwrap(),
                field.zero(),
                field.zero(),
                field.one(),
            );
            let s = scale.mul(&g);
            assert_eq!(s.det(), field.one());
            // and diag(det,1) * s reassembles g
            let diag = Mat2::new(det, field.zero(), field.zero(), field.one());
            assert_eq!(diag.mul(&s), g);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// u is invariant under scalar multiplication.
    #[test]
    fn u_scalar_invariance(gi in 0u64..65536, ci in 1u64..16) {
        let f16 = FqField::f16();
        let a = gi % 16; let b = (gi / 16) % 16; let c = (gi / 256) % 16; let d = (gi / 4096) % 16;
        let g = mat(&f16, a, b, c, d);
        prop_assume!(!g.det().is_zero());
        let s = f16.from_index(ci);
        let sg = Mat2::new(g.a.mul(&s), g.b.mul(&s), g.c.mul(&s), g.d.mul(&s));
        prop_assert_eq!(u_invariant(&sg).unwrap(), u_invariant(&g).unwrap());
    }

    /// Semilinear action composes as a group action:
    /// (g1, f1) . ((g2, f2) . P) = (g1 sigma^f1(g2), f1+f2) . P.
    #[test]
    fn pgammal_is_group_action(g1i in 0u64..65536, g2i in 0u64..65536,
                               f1 in 0u32..4, f2 in 0u32..4, pi in 0u64..17) {
        let f16 = FqField::f16();
        let unpack = |n: u64| mat(&f16, n % 16, (n / 16) % 16, (n / 256) % 16, (n / 4096) % 16);
        let g1 = unpack(g1i);
        let g2 = unpack(g2i);
        prop_assume!(!g1.det().is_zero() && !g2.det().is_zero());
        let p = all_proj_points(&f16)[pi as usize].clone();
        let lhs = pgammal_action(&g1, f1, &pgammal_action(&g2, f2, &p).unwrap()).unwrap();
        let prod = g1.mul(&g2.frobenius(f1));
        let rhs = pgammal_action(&prod, (f1 + f2) % 4, &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
