//! The totally definite quaternion algebra `(-1, -1)` over a real quadratic
//! field, in fixed coordinates.
//!
//! Elements are stored as integer vectors of length 8 holding quarter
//! coordinates with respect to the global basis
//! `1, omega, i, omega*i, j, omega*j, k, omega*k`: the vector `x` denotes
//! the element `(sum x_m g_m) / 4`.  Every order and ideal in play lives
//! inside `(1/4) Lambda_0`, so quarter coordinates stay integral throughout.
//! Products of elements of a common order (or of an ideal by an ideal) are
//! again quarter-integral; the multiplication routine checks the required
//! exact divisibility and panics on misuse rather than round.

use crate::field::{FElt, QuadRing};

/// Quarter-coordinate vector.
pub type Vec8 = [i128; 8];

#[derive(Clone, Copy, Debug)]
pub struct Alg {
    pub f: QuadRing,
}

/// Split a coordinate vector (any scale) into its four field coefficients.
fn coeffs(x: &Vec8) -> [FElt; 4] {
    [
        FElt::new(x[0], x[1]),
        FElt::new(x[2], x[3]),
        FElt::new(x[4], x[5]),
        FElt::new(x[6], x[7]),
    ]
}

fn assemble(c: [FElt; 4]) -> Vec8 {
    [
        c[0].a, c[0].b, c[1].a, c[1].b, c[2].a, c[2].b, c[3].a, c[3].b,
    ]
}

impl Alg {
    pub fn new(f: QuadRing) -> Alg {
        Alg { f }
    }

    pub const ONE: Vec8 = [4, 0, 0, 0, 0, 0, 0, 0];

    /// Hamilton product on raw basis coordinates (no rescaling): if `x, y`
    /// are coordinates w.r.t. `g_m`, the result is the product in the same
    /// coordinates.
    pub fn prod_raw(&self, x: &Vec8, y: &Vec8) -> Vec8 {
        let f = &self.f;
        let [a0, a1, a2, a3] = coeffs(x);
        let [b0, b1, b2, b3] = coeffs(y);
        let m = |u: FElt, v: FElt| f.mul(u, v);
        let z0 = f.sub(f.sub(f.sub(m(a0, b0), m(a1, b1)), m(a2, b2)), m(a3, b3));
        let z1 = f.sub(f.add(f.add(m(a0, b1), m(a1, b0)), m(a2, b3)), m(a3, b2));
        let z2 = f.add(f.sub(f.add(m(a0, b2), m(a2, b0)), m(a1, b3)), m(a3, b1));
        let z3 = f.sub(f.add(f.add(m(a0, b3), m(a3, b0)), m(a1, b2)), m(a2, b1));
        assemble([z0, z1, z2, z3])
    }

    /// Product of two quarter-coordinate elements, again in quarter
    /// coordinates.  `(x/4)(y/4) = prod_raw(x, y)/16`, so the raw product
    /// must be divisible by 4; this holds whenever both factors lie in a
    /// common order or in integral ideals of one.
    pub fn mul(&self, x: &Vec8, y: &Vec8) -> Vec8 {
        self.mul_checked(x, y)
            .expect("product left the quarter-coordinate lattice")
    }

    pub fn mul_checked(&self, x: &Vec8, y: &Vec8) -> Option<Vec8> {
        let mut z = self.prod_raw(x, y);
        for c in z.iter_mut() {
            if *c % 4 != 0 {
                return None;
            }
            *c /= 4;
        }
        Some(z)
    }

    /// Standard quaternion conjugation (field coefficients untouched).
    pub fn conj(&self, x: &Vec8) -> Vec8 {
        [x[0], x[1], -x[2], -x[3], -x[4], -x[5], -x[6], -x[7]]
    }

    /// `2 * Trd(x/4)` as an exact field element.
    pub fn trd_times2(&self, x: &Vec8) -> FElt {
        FElt::new(x[0], x[1])
    }

    /// `16 * Nrd(x/4)` as an exact field element.
    pub fn nrd_times16(&self, x: &Vec8) -> FElt {
        let f = &self.f;
        let c = coeffs(x);
        let mut s = FElt::ZERO;
        for ci in c {
            s = f.add(s, f.mul(ci, ci));
        }
        s
    }

    /// Reduced norm of a quarter-coordinate element known to have integral
    /// norm.
    pub fn nrd(&self, x: &Vec8) -> FElt {
        let s = self.nrd_times16(x);
        assert!(s.a % 16 == 0 && s.b % 16 == 0, "norm is not integral");
        FElt::new(s.a / 16, s.b / 16)
    }

    /// Reduced trace of a quarter-coordinate element known to have integral
    /// trace.
    pub fn trd(&self, x: &Vec8) -> FElt {
        let t = self.trd_times2(x);
        assert!(t.a % 2 == 0 && t.b % 2 == 0, "trace is not integral");
        FElt::new(t.a / 2, t.b / 2)
    }

    pub fn is_integral(&self, x: &Vec8) -> bool {
        let t = self.trd_times2(x);
        let s = self.nrd_times16(x);
        t.a % 2 == 0 && t.b % 2 == 0 && s.a % 16 == 0 && s.b % 16 == 0
    }

    /// `8 * Tr_F(Trd((x/4) conj(y/4)))`, the trace pairing before the final
    /// exact division by 8.
    pub fn pair_times8(&self, x: &Vec8, y: &Vec8) -> i128 {
        let p = self.prod_raw(x, &self.conj(y));
        2 * p[0] + (self.f.t as i128) * p[1]
    }

    /// Scale a quarter-coordinate vector by a field element.
    pub fn scale_felt(&self, x: &Vec8, c: FElt) -> Vec8 {
        let f = &self.f;
        let cs = coeffs(x).map(|u| f.mul(u, c));
        assemble(cs)
    }

    /// Exact quotient by a field element; panics if not divisible.
    pub fn div_felt(&self, x: &Vec8, c: FElt) -> Vec8 {
        let f = &self.f;
        let cs = coeffs(x).map(|u| f.div_exact(u, c));
        assemble(cs)
    }

    pub fn add(&self, x: &Vec8, y: &Vec8) -> Vec8 {
        let mut z = *x;
        for (a, b) in z.iter_mut().zip(y.iter()) {
            *a += *b;
        }
        z
    }

    pub fn scale_i(&self, x: &Vec8, c: i128) -> Vec8 {
        let mut z = *x;
        for a in z.iter_mut() {
            *a *= c;
        }
        z
    }
}
