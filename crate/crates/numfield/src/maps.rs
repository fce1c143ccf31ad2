//! Structure maps of the coefficient field: reduction modulo the
//! inert prime 2 into the canonical 16-element field, the field
//! automorphisms (found as roots of the minimal polynomial inside the
//! field itself, verified exactly), and the codifferent-generator
//! test through the trace pairing.

use std::sync::Arc;

use ffgroup::{FqElem, FqField};
use rug::ops::{CompleteRound, Pow};
use rug::{Complete, Float, Integer, Rational};

use crate::{linalg, NFElem, NfError, NumberField};

/// Reduction of the ring of integers of a quartic field modulo the
/// inert prime 2, landing in the canonical model of F16.
pub struct ResidueMapMod2 {
    pub field: Arc<FqField>,
    /// Image of the power-basis generator: a root of the reduced
    /// minimal polynomial in F16 (the one of smallest index, for
    /// determinism).
    pub root: FqElem,
    /// Minimal polynomial reduced mod 2, low-to-high.
    pub reduced_poly: Vec<u8>,
}

impl ResidueMapMod2 {
    /// Apply the map to an element integral at 2 (odd denominators).
    pub fn apply(&self, e: &NFElem) -> Result<FqElem, NfError> {
        let mut acc = self.field.zero();
        let one = self.field.one();
        for c in e.coeffs.iter().rev() {
            acc = acc.mul(&self.root);
            if !c.denom().is_odd() {
                return Err(NfError::EvenDenominator);
            }
            if c.numer().is_odd() {
                acc = acc.add(&one);
            }
        }
        Ok(acc)
    }
}

fn eval_f2_poly_at(coeffs: &[u8], x: &FqElem, field: &Arc<FqField>) -> FqElem {
    let mut acc = field.zero();
    let one = field.one();
    for &c in coeffs.iter().rev() {
        acc = acc.mul(x);
        if c == 1 {
            acc = acc.add(&one);
        }
    }
    acc
}

/// Build the reduction map Z_K -> F16 for a quartic field in which 2
/// is inert.
pub fn residue_map_mod2(f: &NumberField) -> Result<ResidueMapMod2, NfError> {
    if f.degree != 4 {
        return Err(NfError::WrongResidueField(16, 1u64 << f.degree));
    }
    if !crate::irreducible_mod_p(&f.min_poly, 2) {
        return Err(NfError::TwoNotInert);
    }
    let reduced: Vec<u8> = f
        .min_poly
        .iter()
        .map(|c| if c.is_odd() { 1u8 } else { 0u8 })
        .collect();
    let field = FqField::f16();
    let mut roots: Vec<FqElem> = field
        .elements()
        .filter(|x| eval_f2_poly_at(&reduced, x, &field).index() == 0)
        .collect();
    roots.sort_by_key(|r| r.index());
    debug_assert_eq!(roots.len(), 4, "an irreducible quartic splits in F16");
    let root = roots.into_iter().next().expect("irreducible quartic has a root in F16");
    Ok(ResidueMapMod2 {
        field,
        root,
        reduced_poly: reduced,
    })
}

/// A field automorphism, stored as the image of the power-basis
/// generator together with the induced permutation of the real
/// embeddings (embedding i composed with the map equals embedding
/// root_perm[i]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NfAutomorphism {
    pub image: NFElem,
    pub root_perm: Vec<usize>,
}

impl NfAutomorphism {
    pub fn apply(&self, f: &NumberField, e: &NFElem) -> NFElem {
        f.eval_poly(&e.coeffs, &self.image)
    }

    pub fn is_identity(&self) -> bool {
        self.root_perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn compose(&self, f: &NumberField, inner: &NfAutomorphism) -> NfAutomorphism {
        let image = f.eval_poly(&inner.image.coeffs, &self.image);
        let root_perm = (0..f.degree)
            .map(|i| inner.root_perm[self.root_perm[i]])
            .collect();
        NfAutomorphism { image, root_perm }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

fn solve_float(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Option<Vec<Float>> {
    let n = a.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| {
            a[i][k]
                .clone()
                .abs()
                .partial_cmp(&a[j][k].clone().abs())
                .unwrap()
        })?;
        if a[piv][k].is_zero() {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let factor = (&a[i][k] / &a[k][k]).complete(a[i][k].prec());
            for j in k..n {
                let t = (&factor * &a[k][j]).complete(factor.prec());
                a[i][j] -= t;
            }
            let t = (&factor * &b[k]).complete(factor.prec());
            b[i] -= t;
        }
    }
    let mut x = b;
    for k in (0..n).rev() {
        for j in k + 1..n {
            let t = (&a[k][j] * &x[j]).complete(a[k][j].prec());
            x[k] -= t;
        }
        let v = (&x[k] / &a[k][k]).complete(x[k].prec());
        x[k] = v;
    }
    Some(x)
}

/// Recognize a high-precision real number as a rational with bounded
/// denominator via its continued fraction.  A convergent h/k is
/// accepted only when the residual beats both the requested tolerance
/// and the generic convergent error 2^-(2 bits(k) + 24), so that
/// near-misses of irrational inputs are rejected; a genuine rational
/// reaches float-level exactness and passes.  The working precision
/// should comfortably exceed 2 * max_den_bits + 24.
pub fn recognize_rational_cf(x: &Float, max_den_bits: u32, tol_bits: u32) -> Option<Rational> {
    let prec = x.prec();
    let mut xk = x.clone();
    let (mut h_prev, mut k_prev) = (Integer::from(0), Integer::from(1));
    let (mut h_cur, mut k_cur) = (Integer::from(1), Integer::from(0));
    let tol = Float::with_val(prec, Float::i_exp(1, -(tol_bits as i32)));
    for _ in 0..200 {
        let a = xk.clone().floor().to_integer()?;
        let h = (&a * &h_cur).complete() + &h_prev;
        let k = (&a * &k_cur).complete() + &k_prev;
        if k.significant_bits() > max_den_bits {
            return None;
        }
        if k.cmp0() != std::cmp::Ordering::Equal {
            let cand = Rational::from((h.clone(), k.clone()));
            let cf = Float::with_val(prec, &cand);
            let diff = (x - &cf).complete(prec).abs();
            let kbits = k.significant_bits() as i32;
            let strict = Float::with_val(prec, Float::i_exp(1, -(2 * kbits + 24)));
            if diff < tol && diff < strict {
                return Some(cand);
            }
        }
        let frac = xk - Float::with_val(prec, &a);
        if frac.clone().abs() < Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16)) {
            return None;
        }
        xk = frac.recip();
        h_prev = h_cur;
        k_prev = k_cur;
        h_cur = h;
        k_cur = k;
    }
    None
}

/// All automorphisms of a totally real field, each verified exactly:
/// the image of the generator is a root of the minimal polynomial in
/// the field itself.  The identity comes first; the rest are sorted
/// by their embedding permutation.
pub fn automorphisms(f: &NumberField) -> Result<Vec<NfAutomorphism>, NfError> {
    let g = f.degree;
    let prec = 320u32;
    let roots = f.real_embeddings(prec)?;
    let mut found: Vec<NfAutomorphism> = vec![];
    for perm in permutations(g) {
        // solve sum_j c_j root_i^j = roots[perm[i]] for rational c
        let a: Vec<Vec<Float>> = roots
            .iter()
            .map(|r| {
                (0..g)
                    .map(|j| Float::with_val(prec, r.clone().pow(j as u32)))
                    .collect()
            })
            .collect();
        let y: Vec<Float> = perm.iter().map(|&j| roots[j].clone()).collect();
        let sol = match solve_float(a, y) {
            Some(s) => s,
            None => continue,
        };
        let mut coeffs = Vec::with_capacity(g);
        let mut ok = true;
        for v in &sol {
            match recognize_rational_cf(v, 96, prec / 2) {
                Some(r) => coeffs.push(r),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let cand = NFElem { coeffs };
        if !f.eval_min_poly(&cand).is_zero() {
            continue;
        }
        if found.iter().any(|a| a.image == cand) {
            continue;
        }
        found.push(NfAutomorphism {
            image: cand,
            root_perm: perm,
        });
    }
    if !found.iter().any(|a| a.is_identity()) {
        return Err(NfError::AutomorphismRecognition);
    }
    found.sort_by_key(|a| (!a.is_identity(), a.root_perm.clone()));
    Ok(found)
}

/// Which power of the residue-field Frobenius x -> x^2 an
/// automorphism induces modulo 2 (None when the reduction does not
/// act as a Frobenius power, which cannot happen for a genuine
/// automorphism).  The inertia subgroup at 2 is the set of
/// automorphisms inducing power 0.
pub fn residue_frobenius_power(
    map: &ResidueMapMod2,
    aut: &NfAutomorphism,
) -> Result<Option<u32>, NfError> {
    let image_bar = map.apply(&aut.image)?;
    let mut frob = map.root.clone();
    for k in 0..4u32 {
        if frob == image_bar {
            return Ok(Some(k));
        }
        frob = frob.mul(&frob);
    }
    Ok(None)
}

/// Result of the codifferent test: the Gram criterion for generating
/// the codifferent as a fractional ideal, plus the sign of the
/// element at each real embedding.
#[derive(Debug, Clone)]
pub struct CodifferentCheck {
    pub generates_codifferent: bool,
    pub gram_integral: bool,
    pub gram_det: Rational,
    pub embedding_positive: Vec<bool>,
    pub totally_positive: bool,
}

/// Gram matrix [Tr(nu^i nu^j / d)] of the trace pairing twisted by
/// 1/d on the power basis.
pub fn codifferent_gram(f: &NumberField, d: &NFElem) -> Result<Vec<Vec<Rational>>, NfError> {
    let dinv = f.inv(d)?;
    let g = f.degree;
    let mut powers = Vec::with_capacity(g);
    let mut cur = f.one();
    for _ in 0..g {
        powers.push(cur.clone());
        cur = f.mul(&cur, &f.gen());
    }
    let mut gram = vec![vec![Rational::new(); g]; g];
    for i in 0..g {
        for j in i..g {
            let prod = f.mul(&f.mul(&powers[i], &powers[j]), &dinv);
            let t = f.trace(&prod);
            gram[i][j] = t.clone();
            gram[j][i] = t;
        }
    }
    Ok(gram)
}

/// Full report: does (1/d) Z_K have trace-dual lattice equal to Z_K
/// (Gram integral and unimodular), and is d totally positive?
pub fn codifferent_report(f: &NumberField, d: &NFElem) -> Result<CodifferentCheck, NfError> {
    let gram = codifferent_gram(f, d)?;
    let gram_integral = gram
        .iter()
        .all(|row| row.iter().all(|x| *x.denom() == 1));
    let gram_det = linalg::det_rational(&gram);
    let unimodular = gram_det == 1 || gram_det == -1;
    let vals = f.embed(d, 192)?;
    let embedding_positive: Vec<bool> = vals
        .iter()
        .map(|v| v.is_sign_positive() && !v.is_zero())
        .collect();
    let totally_positive = embedding_positive.iter().all(|&b| b);
    Ok(CodifferentCheck {
        generates_codifferent: gram_integral && unimodular,
        gram_integral,
        gram_det,
        embedding_positive,
        totally_positive,
    })
}

/// True iff the Gram matrix [Tr(nu^i nu^j / d)] is integral with
/// determinant +-1, i.e. 1/d generates the codifferent.
pub fn is_codifferent_generator(f: &NumberField, d: &NFElem) -> Result<bool, NfError> {
    Ok(codifferent_report(f, d)?.generates_codifferent)
}
