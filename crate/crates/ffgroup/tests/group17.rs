//! Structure of the degree-17 group: order, transitivity, stabilizer,
//! derived subgroup, simplicity, cycle statistics.

use ffgroup::perm::{cycle_type_multiset, cycle_type_set};
use ffgroup::{build_17t7, criteria::sl2_f16_permutation_image, FqField, Mat2};

#[test]
fn order_transitivity_stabilizer() {
    let g = build_17t7();
    assert_eq!(g.degree, 17);
    assert_eq!(g.order(), 8160); // 2^5 * 3 * 5 * 17
    assert!(g.is_transitive());
    for point in 0..17 {
        assert_eq!(g.stabilizer_order(point), 480); // 8160 / 17
    }
}

#[test]
fn derived_subgroup_is_simple_of_index_2() {
    let g = build_17t7();
    let d = g.derived_subgroup().unwrap();
    assert_eq!(d.order(), 4080);
    assert_eq!(g.order() / d.order(), 2);
    assert!(d.is_simple().unwrap());

    // the derived subgroup coincides with the image of SL_2(F_16)
    let sl2 = sl2_f16_permutation_image();
    assert_eq!(sl2.order(), 4080);
    assert_eq!(d.elements, sl2.elements);
}

#[test]
fn cosets_split_by_frobenius_part() {
    let g = build_17t7();
    let sl2 = sl2_f16_permutation_image();
    // the order-2 field automorphism represents the nontrivial coset
    let f16 = FqField::f16();
    let sigma = ffgroup::perm_of(&Mat2::identity(&f16), 2).unwrap();
    assert!(!sl2.contains(&sigma));
    // every element lies in exactly one of H, sigma H
    for e in &g.elements {
        let in_h = sl2.contains(e);
        let twisted = sigma.inverse().compose(e);
        let in_sigma_h = sl2.contains(&twisted);
        assert!(in_h ^ in_sigma_h);
    }
}

#[test]
fn cycle_types_contain_outer_involution_class() {
    let g = build_17t7();
    let types = cycle_type_set(&g);
    // the outer involution a -> a^4 acts with type 1^5 2^6
    assert!(types.contains(&vec![2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1]));
    // identity class
    assert!(types.contains(&vec![1u32; 17]));
    // transitive of degree 17 = 2^4 + 1: a 17-cycle exists (Singer orbit)
    assert!(types.contains(&vec![17u32]));
    // multiset sanity: multiplicities sum to the order
    let multi = cycle_type_multiset(&g);
    assert_eq!(multi.values().sum::<usize>(), 8160);
    assert_eq!(multi[&vec![1u32; 17]], 1);
}

/// Every partition in the cycle-type set must divide consistently:
/// parts sum to 17 and element orders divide the group order.
#[test]
fn cycle_type_set_consistency() {
    let g = build_17t7();
    for t in cycle_type_set(&g) {
        assert_eq!(t.iter().sum::<u32>(), 17);
        let lcm = t.iter().fold(1u64, |acc, &p| {
            let mut a = acc;
            let b = p as u64;
            let g = {
                let (mut x, mut y) = (a, b);
                while y != 0 {
                    let r = x % y;
                    x = y;
                    y = r;
                }
                x
            };
            a = a / g * b;
            a
        });
        assert_eq!(8160 % lcm, 0, "element order {lcm} must divide 8160");
    }
}
