//! Exact arithmetic in a real quadratic field.
//!
//! Elements are pairs `a + b*omega` over `Z` where `omega^2 = t*omega + n`
//! with `t, n` read off the field discriminant the same way the rest of the
//! workspace does (`x^2 - d/4` for even discriminants, `x^2 - x - (d-1)/4`
//! for odd ones).  Everything here is exact integer arithmetic; floating
//! point appears only in the `emb` helper used to seed lattice enumeration,
//! never in a certificate.
//!
//! The canonicalization machinery picks a unique representative out of each
//! orbit `{±eps^(2k) x}` of a nonzero element under sign flips and even
//! powers of the totally positive fundamental unit `eps`.  Representatives
//! are chosen by the embedding-ratio window `|x_2/x_1| in [eps_2^-2, eps_2^2)`
//! (embeddings sorted ascending), which pins the trace of a representative of
//! norm `±m` below `(eps_2 + 1/eps_2) * sqrt(m)`.  Window membership is
//! decided by exact sign tests on integer coordinates, so bucketing by
//! canonical keys is deterministic.

use rug::Rational;

/// Ring data for `Z[omega]`, `omega^2 = t*omega + n`, discriminant `d = t^2 + 4n`.
#[derive(Clone, Copy, Debug)]
pub struct QuadRing {
    pub t: i64,
    pub n: i64,
    pub disc: i64,
    /// Totally positive fundamental unit (norm +1 in the fields in scope).
    pub eps: FElt,
    /// eps^2 and its conjugate (= inverse square), both integral.
    pub eps2: FElt,
    pub eps2_inv: FElt,
}

/// `a + b*omega` with integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FElt {
    pub a: i128,
    pub b: i128,
}

impl FElt {
    pub const fn new(a: i128, b: i128) -> Self {
        FElt { a, b }
    }

    pub const ZERO: FElt = FElt { a: 0, b: 0 };
    pub const ONE: FElt = FElt { a: 1, b: 0 };

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn neg(&self) -> FElt {
        FElt::new(-self.a, -self.b)
    }

    pub fn key(&self) -> (i64, i64) {
        (
            i64::try_from(self.a).expect("canonical key fits i64"),
            i64::try_from(self.b).expect("canonical key fits i64"),
        )
    }
}

/// Exact sign of `u + v*sqrt(d)` for squarefree-ish `d > 0`.
fn sign_sqrt_comb(u: i128, v: i128, d: i64) -> i32 {
    if u == 0 && v == 0 {
        return 0;
    }
    if u >= 0 && v >= 0 {
        return 1;
    }
    if u <= 0 && v <= 0 {
        return -1;
    }
    // Opposite signs: compare u^2 against v^2 d; sqrt(d) is irrational here
    // so ties cannot occur for nonzero v.
    let lhs = u.checked_mul(u).expect("sign test overflow");
    let rhs = v
        .checked_mul(v)
        .and_then(|x| x.checked_mul(d as i128))
        .expect("sign test overflow");
    if u > 0 {
        // u > 0, v < 0: positive iff u^2 > v^2 d
        if lhs > rhs {
            1
        } else {
            -1
        }
    } else {
        // u < 0, v > 0: positive iff v^2 d > u^2
        if rhs > lhs {
            1
        } else {
            -1
        }
    }
}

impl QuadRing {
    /// Build the ring for a fundamental discriminant, deriving the totally
    /// positive fundamental unit from the continued fraction machinery.
    pub fn from_disc(d: i64) -> QuadRing {
        assert!(d > 0, "need a real quadratic field");
        let (t, n) = if d % 4 == 0 {
            (0, d / 4)
        } else {
            assert_eq!(d.rem_euclid(4), 1, "not a fundamental discriminant");
            (1, (d - 1) / 4)
        };
        assert_eq!(t * t + 4 * n, d);
        let poly = [-n, -t, 1];
        let f = numfield::NumberField::new(&poly).expect("real quadratic field");
        let (u, norm) = numfield::fundamental_unit(&f).expect("fundamental unit");
        let coord = |r: &Rational| -> i128 {
            assert_eq!(*r.denom(), 1u32, "unit is integral");
            r.numer().to_i128().expect("unit coordinate fits")
        };
        let mut eps = FElt::new(coord(&u.coeffs[0]), coord(&u.coeffs[1]));
        let mut ring = QuadRing {
            t,
            n,
            disc: d,
            eps: FElt::ONE,
            eps2: FElt::ONE,
            eps2_inv: FElt::ONE,
        };
        if norm == -1 {
            eps = ring.mul(eps, eps);
        }
        // Norm +1 units have equal-sign embeddings; flip to totally positive.
        if ring.sign_emb(eps, 1) < 0 {
            eps = eps.neg();
        }
        assert!(ring.is_tot_pos(eps), "eps is totally positive");
        assert_eq!(ring.norm(eps), 1, "eps has norm one");
        ring.eps = eps;
        ring.eps2 = ring.mul(eps, eps);
        ring.eps2_inv = ring.conj(ring.eps2);
        let check = ring.mul(ring.eps2, ring.eps2_inv);
        assert_eq!(check, FElt::ONE);
        ring
    }

    pub fn add(&self, x: FElt, y: FElt) -> FElt {
        FElt::new(x.a + y.a, x.b + y.b)
    }

    pub fn sub(&self, x: FElt, y: FElt) -> FElt {
        FElt::new(x.a - y.a, x.b - y.b)
    }

    pub fn mul(&self, x: FElt, y: FElt) -> FElt {
        // (a + b w)(c + d w) = ac + n bd + (ad + bc + t bd) w
        let bd = x.b * y.b;
        FElt::new(
            x.a * y.a + (self.n as i128) * bd,
            x.a * y.b + x.b * y.a + (self.t as i128) * bd,
        )
    }

    pub fn mul_i(&self, x: FElt, c: i128) -> FElt {
        FElt::new(x.a * c, x.b * c)
    }

    pub fn conj(&self, x: FElt) -> FElt {
        // conj(omega) = t - omega
        FElt::new(x.a + (self.t as i128) * x.b, -x.b)
    }

    pub fn trace(&self, x: FElt) -> i128 {
        2 * x.a + (self.t as i128) * x.b
    }

    pub fn norm(&self, x: FElt) -> i128 {
        x.a * x.a + (self.t as i128) * x.a * x.b - (self.n as i128) * x.b * x.b
    }

    /// Exact quotient `x / y`; panics unless `y` divides `x` in `Z[omega]`.
    pub fn div_exact(&self, x: FElt, y: FElt) -> FElt {
        let ny = self.norm(y);
        assert!(ny != 0, "division by zero");
        let z = self.mul(x, self.conj(y));
        assert!(
            z.a % ny == 0 && z.b % ny == 0,
            "inexact field division {x:?} / {y:?}"
        );
        FElt::new(z.a / ny, z.b / ny)
    }

    pub fn divides(&self, y: FElt, x: FElt) -> bool {
        let ny = self.norm(y);
        if ny == 0 {
            return x.is_zero();
        }
        let z = self.mul(x, self.conj(y));
        z.a % ny == 0 && z.b % ny == 0
    }

    /// Embeddings sorted ascending: `omega_1 < omega_2`.
    pub fn omega_emb(&self) -> (f64, f64) {
        let s = (self.disc as f64).sqrt();
        ((self.t as f64 - s) / 2.0, (self.t as f64 + s) / 2.0)
    }

    pub fn emb(&self, x: FElt) -> (f64, f64) {
        let (w1, w2) = self.omega_emb();
        (x.a as f64 + x.b as f64 * w1, x.a as f64 + x.b as f64 * w2)
    }

    /// Exact sign of the `which`-th embedding (0 = smaller omega, 1 = larger).
    pub fn sign_emb(&self, x: FElt, which: usize) -> i32 {
        // a + b*(t ± sqrt(d))/2 has the sign of (2a + tb) ± b sqrt(d).
        let u = 2 * x.a + (self.t as i128) * x.b;
        let v = if which == 0 { -x.b } else { x.b };
        sign_sqrt_comb(u, v, self.disc)
    }

    pub fn is_tot_pos(&self, x: FElt) -> bool {
        self.sign_emb(x, 0) > 0 && self.sign_emb(x, 1) > 0
    }

    /// `|x_2 / x_1| < eps_2^2` decided exactly.
    fn below_upper(&self, x: FElt) -> bool {
        // z = x * conj(eps^2) has z_1 = x_1 (eps^2)_2, z_2 = x_2 (eps^2)_1;
        // |z_2| < |z_1| iff (z_2 - z_1)(z_2 + z_1) < 0 iff B(2A + tB) < 0.
        let z = self.mul(x, self.eps2_inv);
        let s = z.b * (2 * z.a + (self.t as i128) * z.b);
        s < 0
    }

    /// `|x_2 / x_1| >= eps_2^-2` decided exactly.
    fn at_least_lower(&self, x: FElt) -> bool {
        let z = self.mul(x, self.eps2);
        let s = z.b * (2 * z.a + (self.t as i128) * z.b);
        s >= 0
    }

    /// Exact test that a sign-normalized element (larger embedding positive)
    /// lies in the canonical window.
    pub fn in_window(&self, x: FElt) -> bool {
        self.below_upper(x) && self.at_least_lower(x)
    }

    /// Canonical representative of the orbit `{±eps^(2k) x}`: the sign is
    /// normalized so the larger embedding is positive, then the embedding
    /// ratio is brought into the unit window.  Orbits of `x` and `eps*x`
    /// stay distinct, which is exactly the parity split the theta counts
    /// need.
    pub fn canon(&self, x: FElt) -> FElt {
        assert!(!x.is_zero());
        let mut y = if self.sign_emb(x, 1) > 0 { x } else { x.neg() };
        let mut guard = 0;
        while !self.below_upper(y) {
            y = self.mul(y, self.eps2_inv);
            guard += 1;
            assert!(guard < 200, "window reduction ran away");
        }
        while !self.at_least_lower(y) {
            y = self.mul(y, self.eps2);
            guard += 1;
            assert!(guard < 200, "window reduction ran away");
        }
        y
    }

    /// The two canonical keys (even and odd unit parity) of the value orbit
    /// of `x` under the full unit action `{±eps^k}`.
    pub fn canon_pair(&self, x: FElt) -> [FElt; 2] {
        [self.canon(x), self.canon(self.mul(x, self.eps))]
    }

    /// Sign character of the narrow class group evaluated on a generator:
    /// +1 when the generator has totally equal signs (then a totally
    /// positive associate exists), -1 otherwise.
    pub fn chi_narrow(&self, gen: FElt) -> i32 {
        let n = self.norm(gen);
        assert!(n != 0);
        if n > 0 {
            1
        } else {
            -1
        }
    }
}

/// `zeta_F(-1)` of the real quadratic field of discriminant `d` by Siegel's
/// formula: `(1/60) * sum sigma_1((d - b^2)/4)` over integers `b` (both
/// signs) with `b^2 < d` and `b ≡ d (mod 2)`.
pub fn zeta_minus_one(d: i64) -> Rational {
    assert!(d > 0);
    let mut total = 0i64;
    let mut b = if d % 2 == 0 { 0 } else { 1 };
    let mut first = d % 2 == 0;
    while b * b < d {
        let m = (d - b * b) / 4;
        assert_eq!((d - b * b) % 4, 0);
        let s = sigma1(m as u64) as i64;
        total += if first { s } else { 2 * s };
        first = false;
        b += 2;
    }
    Rational::from((total, 60))
}

fn sigma1(m: u64) -> u64 {
    assert!(m > 0);
    let mut s = 0;
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            s += d;
            if d * d != m {
                s += m / d;
            }
        }
        d += 1;
    }
    s
}

/// Eichler mass of the class set of Eichler orders of squarefree level `N`
/// inside the totally definite quaternion algebra of reduced discriminant 1
/// over the field of discriminant `d` (class number one fields only):
/// `(1/2) |zeta_F(-1)| * prod (Nm(p) + 1)` over primes dividing the level.
pub fn eichler_mass(d: i64, level_prime_norms: &[u64]) -> Rational {
    let mut m = zeta_minus_one(d).abs() / Rational::from(2);
    for &q in level_prime_norms {
        m *= Rational::from(q + 1);
    }
    m
}
