//! Large-image criteria for subgroups of GL_2 over a small finite
//! field, the trace-set criterion for SL_2, and the construction of
//! the degree-17 group.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::perm::{Perm, PermGroup};
use crate::{perm_of, sl2_elements, FfError, FqElem, FqField, Mat2};

/// u(g) = (tr g)^2 / det g, invariant under conjugation and scalar
/// multiplication.
pub fn u_invariant(g: &Mat2) -> Result<FqElem, FfError> {
    let det = g.det();
    if det.is_zero() {
        return Err(FfError::Singular);
    }
    let t = g.tr();
    Ok(t.mul(&t).mul(&det.inv()?))
}

/// Distinct roots of x^2 - (tr g) x + det g in the base field, by
/// exhaustive scan (q <= 2^16 keeps this trivial).
fn charpoly_roots(g: &Mat2) -> Vec<FqElem> {
    let f = g.field();
    let t = g.tr();
    let d = g.det();
    let mut roots = vec![];
    for x in f.elements() {
        // x^2 - t x + d
        let v = x.mul(&x).sub(&t.mul(&x)).add(&d);
        if v.is_zero() {
            roots.push(x);
        }
    }
    roots
}

/// Order of the image of g in PGL_2 exceeds 5?  Checked directly:
/// g^m is scalar for some m <= 5 iff the projective order is <= 5.
fn projective_order_exceeds_5(g: &Mat2) -> bool {
    let mut p = g.clone();
    for _ in 0..5 {
        if p.is_scalar() {
            return false;
        }
        p = p.mul(g);
    }
    true
}

/// Outcome of the four-condition image test on a set of invertible
/// matrices over a common field k (#k >= 7):
///
/// (i) some element is split semisimple (characteristic polynomial
///     has two distinct roots in k);
/// (ii) some element is nonsplit semisimple (characteristic
///     polynomial irreducible over k);
/// (iii) some element has projective order > 5;
/// (iv) some element g has k = F_ell(u(g)).
///
/// When all four hold, the subgroup generated contains SL_2(k)
/// (equivalently: the list cannot sit inside any proper subgroup
/// type: Borel, normalizer of a torus, or exceptional).
#[derive(Debug, Clone)]
pub struct LargeImageReport {
    /// Witness index into the input list for each condition, if found.
    pub split_semisimple: Option<usize>,
    pub nonsplit_semisimple: Option<usize>,
    pub projective_order_gt5: Option<usize>,
    pub u_generates_field: Option<usize>,
}

impl LargeImageReport {
    /// All four conditions witnessed: the generated subgroup contains
    /// SL_2(k).
    pub fn contains_sl2(&self) -> bool {
        self.split_semisimple.is_some()
            && self.nonsplit_semisimple.is_some()
            && self.projective_order_gt5.is_some()
            && self.u_generates_field.is_some()
    }
}

pub fn large_image_check(elems: &[Mat2]) -> Result<LargeImageReport, FfError> {
    let field = match elems.first() {
        Some(m) => Arc::clone(m.field()),
        None => {
            return Ok(LargeImageReport {
                split_semisimple: None,
                nonsplit_semisimple: None,
                projective_order_gt5: None,
                u_generates_field: None,
            })
        }
    };
    if field.q < 7 {
        return Err(FfError::FieldTooSmall(field.q));
    }
    let mut report = LargeImageReport {
        split_semisimple: None,
        nonsplit_semisimple: None,
        projective_order_gt5: None,
        u_generates_field: None,
    };
    for (i, g) in elems.iter().enumerate() {
        if *g.field() != field {
            return Err(FfError::FieldMismatch);
        }
        if g.det().is_zero() {
            return Err(FfError::Singular);
        }
        if report.split_semisimple.is_none() || report.nonsplit_semisimple.is_none() {
            let roots = charpoly_roots(g);
            if roots.len() == 2 && report.split_semisimple.is_none() {
                report.split_semisimple = Some(i);
            }
            if roots.is_empty() && report.nonsplit_semisimple.is_none() {
                report.nonsplit_semisimple = Some(i);
            }
        }
        if report.projective_order_gt5.is_none() && projective_order_exceeds_5(g) {
            report.projective_order_gt5 = Some(i);
        }
        if report.u_generates_field.is_none()
            && u_invariant(g)?.degree_over_prime() == field.e
        {
            report.u_generates_field = Some(i);
        }
        if report.contains_sl2() {
            break;
        }
    }
    Ok(report)
}

/// Trace-set criterion: a subgroup G <= SL_2(k) with q >= 4, q != 5
/// equals SL_2(k) iff its trace set is all of k.  This operation only
/// checks the trace-set condition; q in {2, 3, 5} is refused because
/// of the classical counterexamples (C3 in SL2(F2), Q8 in SL2(F3),
/// SL2(F3) inside SL2(F5)).
pub fn trace_lemma_check(traces: &BTreeSet<FqElem>, q: u64) -> Result<bool, FfError> {
    if q == 2 || q == 3 || q == 5 {
        return Err(FfError::UnsupportedTraceField(q));
    }
    assert!(q >= 4, "trace criterion stated for q >= 4");
    if let Some(t) = traces.iter().next() {
        assert_eq!(t.field.q, q, "trace set does not match the stated field");
    }
    Ok(traces.len() as u64 == q)
}

/// Every subgroup of `elements` (a full finite matrix group of order
/// <= 64), enumerated as bitmasks over the element list: all cyclic
/// subgroups, then joins of pairs until fixpoint.
fn all_subgroup_masks(elements: &[Mat2]) -> Vec<u64> {
    let n = elements.len();
    assert!(n <= 64, "bitmask subgroup enumeration capped at order 64");
    let idx = |m: &Mat2| -> usize { elements.iter().position(|x| x == m).unwrap() };
    // multiplication table
    let mut table = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            table[i * n + j] = idx(&elements[i].mul(&elements[j]));
        }
    }
    let id = idx(&Mat2::identity(elements[0].field()));
    let close = |seed: u64| -> u64 {
        let mut mask = seed | (1u64 << id);
        loop {
            let mut next = mask;
            let mut i_bits = mask;
            while i_bits != 0 {
                let i = i_bits.trailing_zeros() as usize;
                i_bits &= i_bits - 1;
                let mut j_bits = mask;
                while j_bits != 0 {
                    let j = j_bits.trailing_zeros() as usize;
                    j_bits &= j_bits - 1;
                    next |= 1u64 << table[i * n + j];
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    };
    let mut subs: BTreeSet<u64> = BTreeSet::new();
    for i in 0..n {
        subs.insert(close(1u64 << i));
    }
    loop {
        let snapshot: Vec<u64> = subs.iter().copied().collect();
        let before = subs.len();
        for (a, &ma) in snapshot.iter().enumerate() {
            for &mb in snapshot.iter().skip(a + 1) {
                subs.insert(close(ma | mb));
            }
        }
        if subs.len() == before {
            break;
        }
    }
    subs.into_iter().collect()
}

/// Subgroup count of SL_2(F_4) (= A_5); exposed for the oracle test.
pub fn sl2_f4_subgroup_count() -> usize {
    all_subgroup_masks(&sl2_elements(&FqField::f4())).len()
}

/// Exhaustive verification that the only subgroup of SL_2(F_4) whose
/// trace set is all of F_4 is SL_2(F_4) itself.
pub fn trace_lemma_bruteforce(q: u64) -> Result<bool, FfError> {
    if q != 4 {
        return Err(FfError::UnsupportedTraceField(q));
    }
    let field = FqField::f4();
    let elements = sl2_elements(&field);
    assert_eq!(elements.len(), 60);
    let full_mask_popcount = elements.len() as u32;
    for mask in all_subgroup_masks(&elements) {
        let mut traces: BTreeSet<FqElem> = BTreeSet::new();
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            traces.insert(elements[i].tr());
        }
        let full_trace_set = traces.len() as u64 == field.q;
        let is_whole_group = mask.count_ones() == full_mask_popcount;
        if full_trace_set && !is_whole_group {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The order-3 subgroup of SL_2(F_2) together with its trace set;
/// exposed for the q = 2 counterexample test.
pub fn sl2_f2_order3_trace_set() -> (usize, BTreeSet<FqElem>) {
    let field = FqField::prime(2).unwrap();
    let elements = sl2_elements(&field);
    for mask in all_subgroup_masks(&elements) {
        if mask.count_ones() == 3 {
            let mut traces = BTreeSet::new();
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                traces.insert(elements[i].tr());
            }
            return (3, traces);
        }
    }
    unreachable!("SL_2(F_2) has an order-3 subgroup");
}

/// Standard generators of SL_2(F_16): the two transvections and the
/// diagonal torus generator diag(t, t^{-1}) for a multiplicative
/// generator t.
pub fn sl2_f16_generators() -> Vec<Mat2> {
    let f = FqField::f16();
    let one = f.one();
    let zero = f.zero();
    let t = f.gen();
    let ti = t.inv().unwrap();
    vec![
        Mat2::new(one.clone(), one.clone(), zero.clone(), one.clone()),
        Mat2::new(one.clone(), zero.clone(), one.clone(), one.clone()),
        Mat2::new(t, zero.clone(), zero, ti),
    ]
}

/// Build the degree-17 permutation group: the action of
/// SL_2(F_16) . 2 on P^1(F_16) (17 points), generated by SL_2(F_16)
/// with trivial Frobenius part and the identity matrix with the
/// order-2 automorphism a -> a^4.
pub fn build_17t7() -> PermGroup {
    let f = FqField::f16();
    let mut gens: Vec<Perm> = sl2_f16_generators()
        .iter()
        .map(|g| perm_of(g, 0).expect("generators are invertible"))
        .collect();
    gens.push(perm_of(&Mat2::identity(&f), 2).expect("identity is invertible"));
    PermGroup::from_gens(17, gens).expect("order 8160 is far below the cap")
}

/// The image of SL_2(F_16) inside the degree-17 group (frob_power 0
/// coset representative side).
pub fn sl2_f16_permutation_image() -> PermGroup {
    let gens: Vec<Perm> = sl2_f16_generators()
        .iter()
        .map(|g| perm_of(g, 0).expect("generators are invertible"))
        .collect();
    PermGroup::from_gens(17, gens).expect("order 4080 is far below the cap")
}

/// Brute-force closure of a matrix generating set (used by tests to
/// realize all of SL_2(F_16) as an element list).
pub fn matrix_group_closure(gens: &[Mat2], cap: usize) -> Result<Vec<Mat2>, FfError> {
    use std::collections::{HashSet, VecDeque};
    let mut seen: HashSet<Mat2> = HashSet::new();
    let id = Mat2::identity(gens[0].field());
    seen.insert(id.clone());
    let mut queue = VecDeque::new();
    queue.push_back(id);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next = cur.mul(g);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(FfError::GroupTooLarge(cap));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}
