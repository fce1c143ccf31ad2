//! Theta tables: counts of lattice vectors bucketed by the canonical key of
//! the unit-orbit of `Nrd(x) / gamma`.
//!
//! For a rank-8 lattice whose reduced norms all lie in the principal ideal
//! `(gamma)`, every vector has `w = Nrd(x) / gamma` integral with the sign
//! pattern of `1/gamma`.  Vectors are counted once per `{x, -x}` pair and
//! only when `±w` lies in the canonical unit window, so the count at a key
//! `kappa` equals the number of `O_F^x`-orbits of vectors with `canon(w) =
//! kappa`.  Completeness for every key with `|Nm| <= norm_bound` follows
//! from the trace bound on window representatives; the enumeration is
//! rounded outward so it can only see extra vectors, which land at keys
//! outside the certified range and are censored by the exact window test,
//! never miscounted.

use crate::field::FElt;
use crate::fpenum::QForm;
use crate::quat::{Alg, Vec8};

pub struct ThetaTable {
    pub norm_bound: i128,
    a_max: i64,
    b_max: i64,
    counts: Vec<u32>,
}

impl ThetaTable {
    /// Count window-normalized norms of the lattice spanned by `rows`, with
    /// common reduced-norm divisor `gamma`, complete for every canonical
    /// key of absolute norm up to `norm_bound`.
    pub fn build(alg: &Alg, rows: &[Vec8], gamma: FElt, norm_bound: i128) -> ThetaTable {
        let f = alg.f;
        assert!(norm_bound > 0);
        let (g1, g2) = f.emb(gamma);
        assert!(g1 != 0.0 && g2 != 0.0);
        let theta = (1.0 / g1.abs(), 1.0 / g2.abs());
        let (e1, e2) = f.emb(f.eps);
        let _ = e1;
        let tbound = (e2 + 1.0 / e2) * (norm_bound as f64).sqrt();
        let d_sqrt = (f.disc as f64).sqrt();
        let b_max = (tbound / d_sqrt).ceil() as i64 + 2;
        let a_max = (tbound / 2.0).ceil() as i64 + (f.t.abs() * b_max + 1) / 2 + 2;
        let width = (2 * b_max + 1) as usize;
        let height = (2 * a_max + 1) as usize;
        let mut counts = vec![0u32; width * height];
        let qf = QForm::new(alg, rows, theta);
        let c16 = 16.0 * tbound * (1.0 + 1e-9) + 1e-6;
        let g16 = f.mul_i(gamma, 16);
        qf.enumerate(c16, &mut |_x, sa, sb| {
            let w = f.div_exact(FElt::new(sa, sb), g16);
            let s = if f.sign_emb(w, 1) > 0 { w } else { w.neg() };
            if !f.in_window(s) {
                return;
            }
            if s.a.unsigned_abs() as u64 > a_max as u64 || s.b.unsigned_abs() as u64 > b_max as u64
            {
                return;
            }
            let idx = (s.a as i64 + a_max) as usize * width + (s.b as i64 + b_max) as usize;
            counts[idx] += 1;
        });
        ThetaTable {
            norm_bound,
            a_max,
            b_max,
            counts,
        }
    }

    /// Count of unit orbits at one canonical key.
    pub fn at(&self, key: FElt) -> u32 {
        let a = match i64::try_from(key.a) {
            Ok(a) => a,
            Err(_) => return 0,
        };
        let b = match i64::try_from(key.b) {
            Ok(b) => b,
            Err(_) => return 0,
        };
        if a.abs() > self.a_max || b.abs() > self.b_max {
            return 0;
        }
        let width = (2 * self.b_max + 1) as usize;
        let idx = (a + self.a_max) as usize * width + (b + self.b_max) as usize;
        self.counts[idx]
    }

    /// Count over both unit parities of a value: total orbits of vectors
    /// with `(Nrd x) = (value) * (gamma)` as ideals.
    pub fn value_count(&self, f: &crate::field::QuadRing, value: FElt) -> u64 {
        assert!(
            f.norm(value).unsigned_abs() <= self.norm_bound as u128,
            "query beyond certified bound"
        );
        let pair = f.canon_pair(value);
        self.at(pair[0]) as u64 + self.at(pair[1]) as u64
    }
}
