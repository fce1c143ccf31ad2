//! Orders in the totally definite quaternion algebra `(-1, -1)` over a real
//! quadratic field of class number one: primes of the base field, a
//! Hurwitz-style starting order, the maximal order it sits inside, and
//! Eichler orders of squarefree level.
//!
//! Correctness is certified by exact lattice discriminants: the Gram
//! determinant of the trace pairing on a maximal order must equal `d_F^4`
//! (the algebra is unramified at every finite place for these fields), an
//! Eichler order of level `N` must have Gram determinant `d_F^4 * Nm(N)^2`,
//! and every order is checked to be closed under multiplication.

use crate::field::{FElt, QuadRing};
use crate::lattice::{self, Lat};
use crate::quat::{Alg, Vec8};
use crate::residue::{Fq, ResQuot, Splitting};
use rug::Integer;

/// A prime of the base field with the data the quaternionic machinery
/// needs: a totally explicit generator (class number one) and the residue
/// field presentation.
#[derive(Clone, Copy, Debug)]
pub struct FPrime {
    pub p: u64,
    /// generator of the prime ideal
    pub gen: FElt,
    /// absolute norm of the prime
    pub norm: u64,
    pub fq: Fq,
    /// residue of omega for degree-one primes
    pub omega_r: Option<u64>,
    pub ramified: bool,
}

/// Integer square root test.
fn perfect_sqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let r = (x as f64).sqrt().round() as i128;
    for c in [r - 1, r, r + 1] {
        if c >= 0 && c * c == x {
            return Some(c);
        }
    }
    None
}

/// Find a generator of the ideal of norm `p` containing `omega - r`
/// (degree-one primes) or of `(p)` itself when `r` is `None`.
fn find_generator(ring: &QuadRing, p: u64, r: Option<u64>) -> FElt {
    let r = match r {
        None => return FElt::new(p as i128, 0),
        Some(r) => r as i128,
    };
    let pi = p as i128;
    let t = ring.t as i128;
    let n = ring.n as i128;
    let bmax = ((p as f64).sqrt() * 1.2) as i128 + 2;
    let mut best: Option<FElt> = None;
    for b in 0..=bmax {
        for sgn in [pi, -pi] {
            // a^2 + t a b - n b^2 = sgn
            let disc = t * t * b * b + 4 * (n * b * b + sgn);
            if let Some(s) = perfect_sqrt(disc) {
                for a in [(-t * b + s) / 2, (-t * b - s) / 2] {
                    let g = FElt::new(a, b);
                    if ring.norm(g).unsigned_abs() != p as u128 {
                        continue;
                    }
                    // g must lie in the prime with omega = r
                    if (a + b * r).rem_euclid(pi) != 0 {
                        continue;
                    }
                    let cand = ring.canon(g);
                    let better = match best {
                        None => true,
                        Some(c) => (cand.b.abs(), cand.a.abs()) < (c.b.abs(), c.a.abs()),
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
        if best.is_some() && b > 3 {
            break;
        }
    }
    best.expect("no generator found; field is not class number one?")
}

/// All primes of the base field above `p`, ordered by ascending omega
/// residue for split primes.
pub fn primes_over(ring: &QuadRing, p: u64) -> Vec<FPrime> {
    let pi = p as i128;
    let t = ring.t as i128;
    let n = ring.n as i128;
    let mut roots: Vec<u64> = Vec::new();
    for r in 0..pi {
        if (r * r - t * r - n).rem_euclid(pi) == 0 {
            roots.push(r as u64);
        }
    }
    match roots.len() {
        0 => {
            // inert
            vec![FPrime {
                p,
                gen: FElt::new(pi, 0),
                norm: p * p,
                fq: Fq::new_inert(p, ring.t, ring.n),
                omega_r: None,
                ramified: false,
            }]
        }
        1 => {
            // ramified (double root)
            let r = roots[0];
            vec![FPrime {
                p,
                gen: find_generator(ring, p, Some(r)),
                norm: p,
                fq: Fq::new_prime(p, r),
                omega_r: Some(r),
                ramified: true,
            }]
        }
        2 => roots
            .iter()
            .map(|&r| FPrime {
                p,
                gen: find_generator(ring, p, Some(r)),
                norm: p,
                fq: Fq::new_prime(p, r),
                omega_r: Some(r),
                ramified: false,
            })
            .collect(),
        _ => unreachable!("quadratic has at most two roots mod p"),
    }
}

/// The Hurwitz-style order `O_F<1, i, j, k, h, wh>` with `h = (1+i+j+k)/2`.
pub fn hurwitz(alg: &Alg) -> Lat {
    let mut rows: Vec<Vec8> = Vec::new();
    for m in 0..8 {
        let mut r = [0i128; 8];
        r[m] = 4;
        rows.push(r);
    }
    rows.push([2, 0, 2, 0, 2, 0, 2, 0]);
    rows.push([0, 2, 0, 2, 0, 2, 0, 2]);
    let lat = lattice::from_i128_rows(&rows);
    assert_closed(alg, &lat);
    lat
}

/// Exact determinant of a small integer matrix (Bareiss).
pub fn int_det(m: &[Vec<Integer>]) -> Integer {
    let n = m.len();
    let mut a: Vec<Vec<Integer>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Integer::from(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j]);
                let (q, r) = t.div_rem(prev.clone());
                assert_eq!(r, 0, "Bareiss exactness");
                a[i][j] = q;
            }
        }
        prev = a[k][k].clone();
        for i in k + 1..n {
            a[i][k] = Integer::from(0);
        }
    }
    let mut d = a[n - 1][n - 1].clone();
    if sign < 0 {
        d = -d;
    }
    d
}

/// Gram determinant of the trace pairing on a lattice: the discriminant
/// certificate used for orders.
pub fn gram_det(alg: &Alg, lat: &Lat) -> Integer {
    let g = lattice::gram(alg, lat);
    int_det(&g)
}

fn assert_closed(alg: &Alg, o: &Lat) {
    let rows = o.rows_i128();
    assert!(o.contains_vec8(&Alg::ONE), "order does not contain 1");
    for x in &rows {
        assert!(alg.is_integral(x), "order has non-integral elements");
        for y in &rows {
            let xy = alg
                .mul_checked(x, y)
                .expect("order product leaves quarter coordinates");
            assert!(o.contains_vec8(&xy), "order is not closed under products");
        }
    }
}

/// The maximal order containing the Hurwitz-style order, found by greedy
/// closure over half-integral candidates and certified by its discriminant:
/// the Gram determinant must be exactly `d_F^4`.
pub fn maximal_order(alg: &Alg) -> Lat {
    let mut o = hurwitz(alg);
    let target = Integer::from(alg.f.disc).pow(4);
    loop {
        let rows = o.rows_i128();
        let mut grew = false;
        'cand: for mask in 1u32..256 {
            let mut w = [0i128; 8];
            for (m, row) in rows.iter().enumerate() {
                if mask >> m & 1 == 1 {
                    for c in 0..8 {
                        w[c] += row[c];
                    }
                }
            }
            if w.iter().any(|c| c % 2 != 0) {
                continue;
            }
            let half: Vec8 = core::array::from_fn(|c| w[c] / 2);
            if o.contains_vec8(&half) || !alg.is_integral(&half) {
                continue;
            }
            // close under multiplication with the candidate adjoined
            let mut gen = rows.clone();
            gen.push(half);
            let mut cur = lattice::from_i128_rows(&gen);
            for _ in 0..8 {
                let cr = cur.rows_i128();
                let mut prod = cr.clone();
                for x in &cr {
                    for y in &cr {
                        match alg.mul_checked(x, y) {
                            Some(xy) => prod.push(xy),
                            None => continue 'cand,
                        }
                    }
                }
                let next = lattice::from_i128_rows(&prod);
                let stable = next == cur;
                cur = next;
                if stable {
                    break;
                }
            }
            // keep only if everything stayed integral
            if cur.rows_i128().iter().all(|x| alg.is_integral(x)) {
                o = cur;
                grew = true;
                break;
            }
        }
        if !grew {
            break;
        }
    }
    assert_closed(alg, &o);
    assert_eq!(
        gram_det(alg, &o),
        target,
        "greedy closure did not reach the maximal order"
    );
    assert_eq!(lattice::conj(alg, &o), o, "maximal order not conj-stable");
    o
}

/// Eichler order of squarefree level inside a maximal order, one splitting
/// per level prime, certified by the discriminant `d_F^4 * Nm(N)^2` and by
/// multiplicative closure.
pub fn eichler_order(alg: &Alg, omax: &Lat, level: &[FPrime]) -> Lat {
    let mut o = omax.clone();
    for pr in level {
        let before = o.det();
        let quot = ResQuot::new(alg, &o, pr.gen, pr.fq);
        let sp = Splitting::new(quot);
        o = sp.eichler_sublattice();
        assert_eq!(o.det(), before * Integer::from(pr.norm), "Eichler index");
    }
    assert_closed(alg, &o);
    let mut target = Integer::from(alg.f.disc).pow(4);
    for pr in level {
        target *= Integer::from(pr.norm).square();
    }
    assert_eq!(gram_det(alg, &o), target, "Eichler discriminant");
    o
}
