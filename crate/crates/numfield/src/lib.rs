//! Exact arithmetic in the two totally real number fields the
//! pipeline works over: a real quadratic base field and a quartic
//! coefficient field.  Elements are rational coefficient vectors in
//! the power basis of a monogenic field; embeddings are computed to
//! explicit precision; prime splitting, fundamental units, ideal
//! enumeration, residue maps and automorphisms are all exact.
//!
//! Only monogenic fields of class number 1 are in scope (asserted by
//! the callers that construct them); this removes the need for any
//! general ideal-class machinery.

use std::collections::HashMap;
use std::sync::Mutex;

use rug::{Complete, Float, Integer, Rational};
use thiserror::Error;

pub mod linalg;
pub mod lll;
pub mod maps;
pub mod primes;

pub use maps::{
    automorphisms, codifferent_gram, codifferent_report, is_codifferent_generator,
    recognize_rational_cf, residue_frobenius_power, residue_map_mod2, CodifferentCheck,
    NfAutomorphism, ResidueMapMod2,
};
pub use primes::{
    fundamental_unit, ideals_of_norm_upto, kronecker, prime_split, sieve_primes, IdealFactors,
    IdealList, PrimeIdeal, SplitType,
};

#[derive(Debug, Error)]
pub enum NfError {
    #[error("polynomial is not monic with integer coefficients")]
    NotMonicIntegral,
    #[error("could not certify irreducibility over Q (no small prime keeps the polynomial irreducible)")]
    IrreducibilityUncertified,
    #[error("field is not totally real: found {0} real roots of a degree {1} polynomial")]
    NotTotallyReal(usize, usize),
    #[error("division by zero in the number field")]
    DivisionByZero,
    #[error("element is not integral at 2 (even denominator)")]
    EvenDenominator,
    #[error("2 is not inert: minimal polynomial factors mod 2")]
    TwoNotInert,
    #[error("residue map target must be the canonical field with {0} elements, got {1}")]
    WrongResidueField(u64, u64),
    #[error("generator search exhausted at bound {0} for norm {1}")]
    GeneratorSearchExhausted(i64, u64),
    #[error("operation requires a quadratic field, got degree {0}")]
    NotQuadratic(usize),
    #[error("coefficient vector length {0} does not match field degree {1}")]
    DegreeMismatch(usize, usize),
    #[error("automorphism recognition failed to verify a candidate exactly")]
    AutomorphismRecognition,
    #[error("continued-fraction unit search did not terminate")]
    UnitSearchExhausted,
}

/// Element of a number field: rational coordinates in the power basis
/// 1, nu, ..., nu^{g-1}.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct NFElem {
    pub coeffs: Vec<Rational>,
}

impl NFElem {
    pub fn from_i64s(c: &[i64]) -> Self {
        NFElem {
            coeffs: c.iter().map(|&x| Rational::from(x)).collect(),
        }
    }

    pub fn from_rationals(c: Vec<Rational>) -> Self {
        NFElem { coeffs: c }
    }

    pub fn zero(g: usize) -> Self {
        NFElem {
            coeffs: vec![Rational::new(); g],
        }
    }

    pub fn one(g: usize) -> Self {
        let mut e = Self::zero(g);
        e.coeffs[0] = Rational::from(1);
        e
    }

    /// The power-basis generator nu.
    pub fn gen(g: usize) -> Self {
        let mut e = Self::zero(g);
        e.coeffs[1] = Rational::from(1);
        e
    }

    pub fn from_rational(r: Rational, g: usize) -> Self {
        let mut e = Self::zero(g);
        e.coeffs[0] = r;
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.cmp0() == std::cmp::Ordering::Equal)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.cmp0() == std::cmp::Ordering::Equal)
    }

    /// All coordinates integral (denominator 1)?
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| *c.denom() == 1)
    }
}

/// A totally real number field Q[x]/(f), f monic integral,
/// irreducible (certified by a mod-p check), with the power basis
/// assumed integral (monogenic; true for the fields in scope, where
/// the polynomial discriminant equals the field discriminant).
pub struct NumberField {
    /// Monic integer minimal polynomial, low-to-high, length g+1.
    pub min_poly: Vec<Integer>,
    pub degree: usize,
    /// Polynomial discriminant (= field discriminant in scope).
    pub disc: Integer,
    /// Rows g..2g-2: x^{g+k} reduced mod f, as integer row vectors.
    reduction_rows: Vec<Vec<Integer>>,
    /// Real embeddings cache keyed by precision.
    embeddings: Mutex<HashMap<u32, Vec<Float>>>,
}

impl std::fmt::Debug for NumberField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NumberField(deg {}, disc {})", self.degree, self.disc)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
    }
}

// --- small helpers over F_p for the irreducibility certificate ---

fn pmod_mul(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // reduce mod m (monic)
    let dm = m.len() - 1;
    while prod.len() > dm {
        let da = prod.len() - 1;
        let f = prod[da];
        if f != 0 {
            for i in 0..=dm {
                let idx = da - dm + i;
                prod[idx] = (prod[idx] + p * p - (f * m[i]) % p) % p;
            }
        }
        prod.pop();
        while prod.last() == Some(&0) {
            prod.pop();
        }
    }
    prod
}

fn pmod_pow(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = pmod_mul(&acc, &b, m, p);
        }
        e >>= 1;
        if e > 0 {
            b = pmod_mul(&b, &b, m, p);
        }
    }
    acc
}

fn pmod_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    let tidy = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    tidy(&mut a);
    tidy(&mut b);
    while !b.is_empty() {
        // a mod b
        let db = b.len() - 1;
        let lead_inv = {
            // Fermat inverse
            let mut acc = 1u64;
            let mut base = b[db] % p;
            let mut e = p - 2;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p;
                }
                base = base * base % p;
                e >>= 1;
            }
            acc
        };
        while a.len() > db {
            let da = a.len() - 1;
            let f = a[da] * lead_inv % p;
            if f != 0 {
                for i in 0..=db {
                    let idx = da - db + i;
                    a[idx] = (a[idx] + p * p - f * b[i] % p) % p;
                }
            }
            a.pop();
            tidy(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Is f irreducible mod p?  (f squarefree mod p assumed: caller skips
/// p dividing disc(f).)
pub(crate) fn irreducible_mod_p(f: &[Integer], p: u64) -> bool {
    let fm: Vec<u64> = f
        .iter()
        .map(|c| {
            let r = c.mod_u(p as u32) as u64;
            r % p
        })
        .collect();
    let n = fm.len() - 1;
    if fm[n] % p == 0 {
        return false; // leading coefficient vanishes: not usable
    }
    // x^{p^n} = x mod f  and gcd(x^{p^{n/r}} - x, f) = 1 for primes r | n
    let mut xq = vec![0u64, 1];
    for _ in 0..n {
        xq = pmod_pow(&xq, p, &fm, p);
    }
    let mut diff = xq.clone();
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    while diff.last() == Some(&0) {
        diff.pop();
    }
    if !diff.is_empty() {
        return false;
    }
    let mut primes = vec![];
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for r in primes {
        let sub = n / r;
        let mut xe = vec![0u64, 1];
        for _ in 0..sub {
            xe = pmod_pow(&xe, p, &fm, p);
        }
        let mut diff = xe;
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let g = pmod_gcd(fm.clone(), diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl NumberField {
    /// Construct from monic integer coefficients (low-to-high).
    /// Certifies irreducibility by exhibiting a prime p (not dividing
    /// the polynomial discriminant) modulo which f stays irreducible.
    pub fn new(coeffs: &[i64]) -> Result<Self, NfError> {
        let min_poly: Vec<Integer> = coeffs.iter().map(|&c| Integer::from(c)).collect();
        Self::from_integer_poly(min_poly)
    }

    pub fn from_integer_poly(min_poly: Vec<Integer>) -> Result<Self, NfError> {
        let g = min_poly.len() - 1;
        if g == 0 || min_poly[g] != 1 {
            return Err(NfError::NotMonicIntegral);
        }
        let disc = linalg::poly_discriminant(&min_poly);
        if g > 1 {
            let mut certified = false;
            for p in [
                2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                73, 79, 83, 89, 97,
            ] {
                if disc.is_divisible_u(p as u32) {
                    continue;
                }
                if irreducible_mod_p(&min_poly, p) {
                    certified = true;
                    break;
                }
            }
            if !certified {
                return Err(NfError::IrreducibilityUncertified);
            }
        }
        // reduction rows for x^g .. x^{2g-2}
        let mut rows: Vec<Vec<Integer>> = Vec::new();
        // x^g = -(c_0 + c_1 x + ... + c_{g-1} x^{g-1})
        let mut cur: Vec<Integer> = (0..g).map(|i| (-&min_poly[i]).complete()).collect();
        rows.push(cur.clone());
        for _ in 1..g.max(1) - 1 {
            // multiply by x: shift, then reduce the overflow via rows[0]
            let carry = cur[g - 1].clone();
            let mut next: Vec<Integer> = Vec::with_capacity(g);
            next.push((&carry * &rows[0][0]).complete());
            for i in 1..g {
                next.push((&carry * &rows[0][i]).complete() + &cur[i - 1]);
            }
            rows.push(next.clone());
            cur = next;
        }
        Ok(NumberField {
            min_poly,
            degree: g,
            disc,
            reduction_rows: rows,
            embeddings: Mutex::new(HashMap::new()),
        })
    }

    fn check_len(&self, e: &NFElem) -> Result<(), NfError> {
        if e.coeffs.len() != self.degree {
            return Err(NfError::DegreeMismatch(e.coeffs.len(), self.degree));
        }
        Ok(())
    }

    pub fn zero(&self) -> NFElem {
        NFElem::zero(self.degree)
    }

    pub fn one(&self) -> NFElem {
        NFElem::one(self.degree)
    }

    pub fn gen(&self) -> NFElem {
        NFElem::gen(self.degree)
    }

    pub fn add(&self, a: &NFElem, b: &NFElem) -> NFElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| (x + y).complete())
            .collect();
        NFElem { coeffs }
    }

    pub fn sub(&self, a: &NFElem, b: &NFElem) -> NFElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| (x - y).complete())
            .collect();
        NFElem { coeffs }
    }

    pub fn neg(&self, a: &NFElem) -> NFElem {
        NFElem {
            coeffs: a.coeffs.iter().map(|x| (-x).complete()).collect(),
        }
    }

    pub fn scale(&self, a: &NFElem, c: &Rational) -> NFElem {
        NFElem {
            coeffs: a.coeffs.iter().map(|x| (x * c).complete()).collect(),
        }
    }

    pub fn mul(&self, a: &NFElem, b: &NFElem) -> NFElem {
        let g = self.degree;
        let mut prod = vec![Rational::new(); 2 * g - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += (x * y).complete();
            }
        }
        let mut out = prod[..g].to_vec();
        for k in 0..g - 1 {
            let hi = &prod[g + k];
            if hi.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            for i in 0..g {
                out[i] += (hi * &self.reduction_rows[k][i]).complete();
            }
        }
        NFElem { coeffs: out }
    }

    pub fn pow(&self, a: &NFElem, mut n: u64) -> NFElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Multiplication-by-a matrix in the power basis (columns are
    /// a * nu^j).
    pub fn mult_matrix(&self, a: &NFElem) -> Vec<Vec<Rational>> {
        let g = self.degree;
        let mut cols = Vec::with_capacity(g);
        let mut cur = a.clone();
        cols.push(cur.coeffs.clone());
        for _ in 1..g {
            cur = self.mul(&cur, &self.gen());
            cols.push(cur.coeffs.clone());
        }
        // transpose into row-major matrix M with M[i][j] = coeff i of a*nu^j
        (0..g)
            .map(|i| (0..g).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    pub fn trace(&self, a: &NFElem) -> Rational {
        let m = self.mult_matrix(a);
        let mut t = Rational::new();
        for (i, row) in m.iter().enumerate() {
            t += &row[i];
        }
        t
    }

    pub fn norm(&self, a: &NFElem) -> Rational {
        linalg::det_rational(&self.mult_matrix(a))
    }

    /// Characteristic polynomial of multiplication by a (monic,
    /// degree g, low-to-high), by the Faddeev-LeVerrier recursion.
    pub fn charpoly(&self, a: &NFElem) -> Vec<Rational> {
        linalg::charpoly_rational(&self.mult_matrix(a))
    }

    pub fn inv(&self, a: &NFElem) -> Result<NFElem, NfError> {
        self.check_len(a)?;
        if a.is_zero() {
            return Err(NfError::DivisionByZero);
        }
        let m = self.mult_matrix(a);
        let mut rhs = vec![Rational::new(); self.degree];
        rhs[0] = Rational::from(1);
        let sol = linalg::solve_rational(&m, &rhs).ok_or(NfError::DivisionByZero)?;
        Ok(NFElem { coeffs: sol })
    }

    pub fn div(&self, a: &NFElem, b: &NFElem) -> Result<NFElem, NfError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Evaluate a polynomial expression of nu: given rational
    /// coefficients p_i, return sum p_i nu^i as an element.
    pub fn from_poly_in_gen(&self, p: &[Rational]) -> NFElem {
        let mut acc = self.zero();
        for c in p.iter().rev() {
            acc = self.mul(&acc, &self.gen());
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Substitute an element into a polynomial with rational
    /// coefficients: sum p_i a^i.
    pub fn eval_poly(&self, p: &[Rational], a: &NFElem) -> NFElem {
        let mut acc = self.zero();
        for c in p.iter().rev() {
            acc = self.mul(&acc, a);
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Evaluate the minimal polynomial at an element (for exact root
    /// verification).
    pub fn eval_min_poly(&self, a: &NFElem) -> NFElem {
        let p: Vec<Rational> = self.min_poly.iter().map(|c| Rational::from(c)).collect();
        self.eval_poly(&p, a)
    }

    /// The g real embedding values of nu at precision `prec`,
    /// ascending, certified by sign changes and refined by Newton.
    pub fn real_embeddings(&self, prec: u32) -> Result<Vec<Float>, NfError> {
        {
            let cache = self.embeddings.lock().unwrap();
            if let Some(v) = cache.get(&prec) {
                return Ok(v.clone());
            }
        }
        let roots = self.compute_embeddings(prec)?;
        let mut cache = self.embeddings.lock().unwrap();
        Ok(cache.entry(prec).or_insert(roots).clone())
    }

    fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0f64;
        for c in self.min_poly.iter().rev() {
            acc = acc * x + c.to_f64();
        }
        acc
    }

    fn compute_embeddings(&self, prec: u32) -> Result<Vec<Float>, NfError> {
        let g = self.degree;
        // Cauchy bound on root magnitude
        let maxc = self
            .min_poly
            .iter()
            .take(g)
            .map(|c| c.to_f64().abs())
            .fold(0f64, f64::max);
        let bound = 1.0 + maxc;
        // seed isolation on a fine grid
        let steps = 8192.max(64 * g);
        let mut seeds = vec![];
        let mut prev_x = -bound;
        let mut prev_v = self.eval_f64(prev_x);
        for i in 1..=steps {
            let x = -bound + 2.0 * bound * (i as f64) / (steps as f64);
            let v = self.eval_f64(x);
            if prev_v == 0.0 {
                seeds.push(prev_x);
            } else if prev_v * v < 0.0 {
                // bisect to machine precision
                let (mut lo, mut hi) = (prev_x, x);
                let (mut flo, _fhi) = (prev_v, v);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.eval_f64(mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                seeds.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev_v = v;
        }
        seeds.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if seeds.len() != g {
            return Err(NfError::NotTotallyReal(seeds.len(), g));
        }
        // Newton ladder: double the working precision until target
        let target = prec + 32;
        let mut roots = Vec::with_capacity(g);
        for &s in &seeds {
            let mut wp = 64u32;
            let mut x = Float::with_val(wp, s);
            loop {
                wp = (wp * 2).min(target.max(64) * 2);
                x = Float::with_val(wp, &x);
                // a couple of Newton steps at this precision
                for _ in 0..4 {
                    let (f, df) = self.eval_with_derivative(&x, wp);
                    let step = f / df;
                    x -= step;
                }
                if wp >= target {
                    break;
                }
            }
            roots.push(Float::with_val(prec, x));
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(roots)
    }

    fn eval_with_derivative(&self, x: &Float, wp: u32) -> (Float, Float) {
        let mut f = Float::new(wp);
        let mut df = Float::new(wp);
        for c in self.min_poly.iter().rev() {
            // df = df*x + f ; f = f*x + c
            df *= x;
            df += &f;
            f *= x;
            f += c;
        }
        (f, df)
    }

    /// Embedding values of an element under all real embeddings at
    /// precision `prec` (same order as `real_embeddings`).
    pub fn embed(&self, a: &NFElem, prec: u32) -> Result<Vec<Float>, NfError> {
        let roots = self.real_embeddings(prec + 16)?;
        let mut out = Vec::with_capacity(self.degree);
        for r in &roots {
            let mut acc = Float::new(prec + 16);
            for c in a.coeffs.iter().rev() {
                acc *= r;
                let cf = Float::with_val(prec + 16, c);
                acc += cf;
            }
            out.push(Float::with_val(prec, acc));
        }
        Ok(out)
    }

    /// Is `a` totally positive (all real embeddings > 0)?  Decided
    /// numerically at 192 bits with an exactness fallback: a zero
    /// embedding can only happen for a = 0 (the polynomial is
    /// irreducible), which is rejected.
    pub fn is_totally_positive(&self, a: &NFElem) -> Result<bool, NfError> {
        if a.is_zero() {
            return Ok(false);
        }
        let vals = self.embed(a, 192)?;
        Ok(vals.iter().all(|v| v.is_sign_positive() && !v.is_zero()))
    }
}
