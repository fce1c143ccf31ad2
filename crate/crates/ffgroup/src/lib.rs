//! Finite fields of small order, 2x2 matrix groups over them, their
//! action on the projective line, and the large-image criteria used to
//! pin down mod-2 Galois images.
//!
//! The centerpiece is the construction of the degree-17 permutation
//! group `17T7 = SL_2(F_16) . 2` acting on the 17 points of P^1(F_16):
//! the group generated by SL_2(F_16) together with the order-2 field
//! automorphism a -> a^4, which has order 8160 = 2^5 * 3 * 5 * 17.
//!
//! Fields are represented as F_ell[x]/(m(x)) with an explicit
//! irreducible modulus; F_16 always means the canonical model
//! F_2[x]/(x^4+x+1) so that residue maps built elsewhere agree with
//! the matrix groups built here.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub mod criteria;
pub mod perm;

pub use criteria::{
    build_17t7, large_image_check, matrix_group_closure, sl2_f16_generators,
    trace_lemma_bruteforce, trace_lemma_check, u_invariant, LargeImageReport,
};
pub use perm::{cycle_type_multiset, cycle_type_set, Partition, Perm, PermGroup};

#[derive(Debug, Error)]
pub enum FfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("field order {0}^{1} exceeds the supported bound 2^16")]
    TooLarge(u64, u32),
    #[error("modulus is not monic of the stated degree or not irreducible")]
    BadModulus,
    #[error("elements from different fields")]
    FieldMismatch,
    #[error("singular matrix where an invertible one is required")]
    Singular,
    #[error("field with {0} elements is too small for the image criteria (need at least 7)")]
    FieldTooSmall(u64),
    #[error("trace criterion undefined for q = {0}: counterexamples C3 <= SL2(F2), Q8 <= SL2(F3), SL2(F3) inside SL2(F5)")]
    UnsupportedTraceField(u64),
    #[error("frobenius power {0} out of range for degree {1}")]
    BadFrobPower(u32, u32),
    #[error("group enumeration exceeded the cap of {0} elements")]
    GroupTooLarge(usize),
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// --- polynomial helpers over F_ell (dense, low-degree) ---

fn poly_trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn poly_rem(mut a: Vec<u64>, b: &[u64], ell: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], ell);
    while a.len() > db {
        let da = a.len() - 1;
        let factor = (a[da] * lead_inv) % ell;
        if factor != 0 {
            for i in 0..=db {
                let idx = da - db + i;
                a[idx] = (a[idx] + ell * ell - (factor * b[i]) % ell) % ell;
            }
        }
        a.pop();
        poly_trim(&mut a);
        if a.is_empty() {
            break;
        }
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], ell: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % ell;
        }
    }
    poly_trim(&mut prod);
    poly_rem(prod, m, ell)
}

fn poly_powmod(base: &[u64], mut exp: u64, m: &[u64], ell: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, ell);
        }
        exp >>= 1;
        if exp > 0 {
            b = poly_mulmod(&b, &b, m, ell);
        }
    }
    acc
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, ell: u64) -> Vec<u64> {
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, ell);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, ell: u64) -> u64 {
    // Fermat; ell is prime and small.
    mod_pow(a % ell, ell - 2, ell)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility over F_ell: f of degree e is irreducible iff
/// x^{ell^e} = x mod f and gcd(x^{ell^{e/r}} - x, f) = 1 for every
/// prime r dividing e.
fn poly_irreducible(f: &[u64], ell: u64) -> bool {
    let e = (f.len() - 1) as u32;
    if e == 0 {
        return false;
    }
    if e == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // x^{ell^e} mod f by repeated q-power
    let mut fr = x.clone();
    for _ in 0..e {
        fr = poly_powmod(&fr, ell, f, ell);
    }
    let mut diff = fr.clone();
    // diff = fr - x
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = (diff[1] + ell - 1) % ell;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    let mut primes = vec![];
    let mut n = e;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            primes.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for r in primes {
        let sub = e / r;
        let mut fr = x.clone();
        for _ in 0..sub {
            fr = poly_powmod(&fr, ell, f, ell);
        }
        let mut diff = fr;
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + ell - 1) % ell;
        poly_trim(&mut diff);
        let g = poly_gcd(f.to_vec(), diff, ell);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// A finite field F_{ell^e} = F_ell[x]/(modulus), q <= 2^16.
#[derive(Debug)]
pub struct FqField {
    pub ell: u64,
    pub e: u32,
    pub q: u64,
    /// Monic irreducible modulus, coefficients low-to-high, length e+1.
    pub modulus: Vec<u64>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.ell == other.ell && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FqField {}

impl FqField {
    pub fn new(ell: u64, e: u32, modulus: Vec<u64>) -> Result<Arc<Self>, FfError> {
        if !is_prime_u64(ell) {
            return Err(FfError::NotPrime(ell));
        }
        let mut q = 1u64;
        for _ in 0..e {
            q = q
                .checked_mul(ell)
                .filter(|&v| v <= 1 << 16)
                .ok_or(FfError::TooLarge(ell, e))?;
        }
        if e == 0 || modulus.len() != e as usize + 1 || modulus[e as usize] % ell != 1 {
            return Err(FfError::BadModulus);
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % ell).collect();
        if !poly_irreducible(&modulus, ell) {
            return Err(FfError::BadModulus);
        }
        Ok(Arc::new(FqField {
            ell,
            e,
            q,
            modulus,
        }))
    }

    /// Prime field F_ell, modeled as F_ell[x]/(x).
    pub fn prime(ell: u64) -> Result<Arc<Self>, FfError> {
        Self::new(ell, 1, vec![0, 1])
    }

    /// The canonical model F_2[x]/(x^4+x+1) of F_16 used throughout
    /// the pipeline.
    pub fn f16() -> Arc<Self> {
        Self::new(2, 4, vec![1, 1, 0, 0, 1]).expect("x^4+x+1 is irreducible over F_2")
    }

    /// F_4 = F_2[x]/(x^2+x+1).
    pub fn f4() -> Arc<Self> {
        Self::new(2, 2, vec![1, 1, 1]).expect("x^2+x+1 is irreducible over F_2")
    }

    pub fn elem(self: &Arc<Self>, coeffs: &[u64]) -> FqElem {
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % self.ell).collect();
        poly_trim(&mut c);
        if c.len() > self.e as usize {
            c = poly_rem(c, &self.modulus, self.ell);
        }
        c.resize(self.e as usize, 0);
        FqElem {
            field: Arc::clone(self),
            coeffs: c,
        }
    }

    pub fn zero(self: &Arc<Self>) -> FqElem {
        self.elem(&[])
    }

    pub fn one(self: &Arc<Self>) -> FqElem {
        self.elem(&[1])
    }

    /// Residue of the polynomial variable x; a multiplicative
    /// generator for the canonical F_16 model (x^4+x+1 is primitive).
    pub fn gen(self: &Arc<Self>) -> FqElem {
        self.elem(&[0, 1])
    }

    /// Element with index n = sum c_i ell^i, 0 <= n < q.
    pub fn from_index(self: &Arc<Self>, mut n: u64) -> FqElem {
        assert!(n < self.q);
        let mut c = vec![0u64; self.e as usize];
        for ci in c.iter_mut() {
            *ci = n % self.ell;
            n /= self.ell;
        }
        FqElem {
            field: Arc::clone(self),
            coeffs: c,
        }
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.q).map(move |n| self.from_index(n))
    }
}

/// Element of an [`FqField`]: a reduced coefficient vector over the
/// prime field, low-to-high, of length e.
#[derive(Clone)]
pub struct FqElem {
    pub field: Arc<FqField>,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq{}({:?})", self.field.q, self.coeffs)
    }
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}
impl Eq for FqElem {}

impl std::hash::Hash for FqElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.q.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FqElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FqElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.field.q, &self.coeffs).cmp(&(other.field.q, &other.coeffs))
    }
}

impl FqElem {
    fn assert_same_field(&self, other: &Self) {
        assert!(
            *self.field == *other.field,
            "elements from different fields"
        );
    }

    pub fn index(&self) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.field.ell + c)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let ell = self.field.ell;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % ell)
            .collect();
        FqElem {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let ell = self.field.ell;
        let coeffs = self.coeffs.iter().map(|&a| (ell - a) % ell).collect();
        FqElem {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let f = &self.field;
        let prod = poly_mulmod(&self.coeffs, &other.coeffs, &f.modulus, f.ell);
        let mut coeffs = prod;
        coeffs.resize(f.e as usize, 0);
        FqElem {
            field: Arc::clone(f),
            coeffs,
        }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = self.field.one();
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<Self, FfError> {
        if self.is_zero() {
            return Err(FfError::Singular);
        }
        Ok(self.pow(self.field.q - 2))
    }

    /// phi^f where phi is the ell-power Frobenius: a -> a^{ell^f}.
    pub fn frobenius(&self, f: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..f {
            out = out.pow(self.field.ell);
        }
        out
    }

    /// Degree of F_ell(a) over F_ell: the least d | e with a^{ell^d} = a.
    pub fn degree_over_prime(&self) -> u32 {
        let e = self.field.e;
        for d in 1..=e {
            if e % d == 0 && self.frobenius(d) == *self {
                return d;
            }
        }
        e
    }
}

/// 2x2 matrix over a finite field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    pub a: FqElem,
    pub b: FqElem,
    pub c: FqElem,
    pub d: FqElem,
}

impl Mat2 {
    pub fn new(a: FqElem, b: FqElem, c: FqElem, d: FqElem) -> Self {
        a.assert_same_field(&b);
        a.assert_same_field(&c);
        a.assert_same_field(&d);
        Mat2 { a, b, c, d }
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.a.field
    }

    pub fn identity(field: &Arc<FqField>) -> Self {
        Mat2 {
            a: field.one(),
            b: field.zero(),
            c: field.zero(),
            d: field.one(),
        }
    }

    pub fn det(&self) -> FqElem {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn tr(&self) -> FqElem {
        self.a.add(&self.d)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2 {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn inverse(&self) -> Result<Self, FfError> {
        let det = self.det();
        let di = det.inv()?;
        Ok(Mat2 {
            a: self.d.mul(&di),
            b: self.b.neg().mul(&di),
            c: self.c.neg().mul(&di),
            d: self.a.mul(&di),
        })
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Entrywise Frobenius phi^f.
    pub fn frobenius(&self, f: u32) -> Self {
        Mat2 {
            a: self.a.frobenius(f),
            b: self.b.frobenius(f),
            c: self.c.frobenius(f),
            d: self.d.frobenius(f),
        }
    }
}

/// Point of P^1(F_q), canonically normalized to (x : 1) or (1 : 0).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjPoint {
    pub x: FqElem,
    pub infinite: bool,
}

impl ProjPoint {
    pub fn finite(x: FqElem) -> Self {
        ProjPoint { x, infinite: false }
    }

    pub fn infinity(field: &Arc<FqField>) -> Self {
        ProjPoint {
            x: field.one(),
            infinite: true,
        }
    }

    /// Canonical index in 0..=q: finite points by element index, then
    /// infinity at index q.
    pub fn index(&self) -> u64 {
        if self.infinite {
            self.x.field.q
        } else {
            self.x.index()
        }
    }
}

/// The q+1 points of P^1(F_q) in canonical index order.
pub fn all_proj_points(field: &Arc<FqField>) -> Vec<ProjPoint> {
    let mut pts: Vec<ProjPoint> = field.elements().map(ProjPoint::finite).collect();
    pts.push(ProjPoint::infinity(field));
    pts
}

/// Semilinear action of (g, phi^f) on P^1: (x:y) -> g . (x^{ell^f} : y^{ell^f}).
pub fn pgammal_action(g: &Mat2, frob_power: u32, p: &ProjPoint) -> Result<ProjPoint, FfError> {
    let field = g.field();
    if frob_power >= field.e {
        return Err(FfError::BadFrobPower(frob_power, field.e));
    }
    if g.det().is_zero() {
        return Err(FfError::Singular);
    }
    let (x, y) = if p.infinite {
        (field.one(), field.zero())
    } else {
        (p.x.frobenius(frob_power), field.one())
    };
    let nx = g.a.mul(&x).add(&g.b.mul(&y));
    let ny = g.c.mul(&x).add(&g.d.mul(&y));
    if ny.is_zero() {
        Ok(ProjPoint::infinity(field))
    } else {
        Ok(ProjPoint::finite(nx.mul(&ny.inv()?)))
    }
}

/// The permutation of P^1(F_q) (canonical index order) induced by
/// (g, phi^f).
pub fn perm_of(g: &Mat2, frob_power: u32) -> Result<Perm, FfError> {
    let field = g.field();
    let pts = all_proj_points(field);
    let mut images = vec![0u16; pts.len()];
    for (i, p) in pts.iter().enumerate() {
        images[i] = pgammal_action(g, frob_power, p)?.index() as u16;
    }
    Ok(Perm::new(images))
}

/// All matrices in SL_2(F_q), by exhaustive determinant filter.
pub fn sl2_elements(field: &Arc<FqField>) -> Vec<Mat2> {
    let one = field.one();
    let mut out = vec![];
    for a in field.elements() {
        for b in field.elements() {
            for c in field.elements() {
                for d in field.elements() {
                    let m = Mat2::new(a.clone(), b.clone(), c.clone(), d.clone());
                    if m.det() == one {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}
