//! Prime splitting, fundamental units, and ideal enumeration in real
//! quadratic fields of class number 1.
//!
//! Every ideal is represented by an explicit generator found by a
//! bounded norm-form search; conjugate primes above a split rational
//! prime are ordered by the residue of the power-basis generator
//! omega modulo the prime (ascending in [0, p)).  That rule is
//! intrinsic to the ideal, unlike orderings that depend on a choice
//! of real embedding of a particular generator.

use rug::{Complete, Integer, Rational};

use crate::{NFElem, NfError, NumberField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// Prime ideal of a real quadratic field, with explicit generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub residue_degree: u32,
    pub ramification: u32,
    /// 0 or 1.  Conjugate primes above a split p are indexed by the
    /// residue of omega modulo the prime, ascending.
    pub index: u32,
    /// r in [0, p) with omega congruent to r modulo this prime;
    /// None when the prime is inert.
    pub omega_residue: Option<u64>,
    pub gen: NFElem,
    pub norm: u64,
}

/// Kronecker symbol (a|b).
pub fn kronecker(mut a: i64, mut b: i64) -> i32 {
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut v = 0u32;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k: i32 = if v % 2 == 0 {
        1
    } else {
        TAB2[(a & 7) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn mod_inv_i128(a: i128, m: i128) -> i128 {
    // extended Euclid; m prime, a not divisible by m
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        let tr = old_r - q * r;
        old_r = r;
        r = tr;
        let ts = old_s - q * s;
        old_s = s;
        s = ts;
    }
    old_s.rem_euclid(m)
}

fn quadratic_coeffs(f: &NumberField) -> Result<(i128, i128), NfError> {
    if f.degree != 2 {
        return Err(NfError::NotQuadratic(f.degree));
    }
    let c0 = f.min_poly[0].to_i128().expect("quadratic field coefficient overflow");
    let c1 = f.min_poly[1].to_i128().expect("quadratic field coefficient overflow");
    Ok((c0, c1))
}

/// Search for (a, b) with N(a + b*omega) = t, |t| = p, b in 1..=bound.
/// Returns the two quadratic-formula branches (a_plus, a_minus, b, t)
/// for the first b that works.
fn norm_form_solve(
    c0: i128,
    c1: i128,
    p: u64,
    bound: i64,
) -> Option<(i128, i128, i128, i128)> {
    let d = c1 * c1 - 4 * c0;
    for b in 1..=bound as i128 {
        for t in [p as i128, -(p as i128)] {
            let arg = d * b * b + 4 * t;
            if arg < 0 {
                continue;
            }
            let s = isqrt_u128(arg as u128) as i128;
            if s * s != arg {
                continue;
            }
            if (c1 * b + s) % 2 != 0 {
                continue;
            }
            let a_plus = (c1 * b + s) / 2;
            let a_minus = (c1 * b - s) / 2;
            return Some((a_plus, a_minus, b, t));
        }
    }
    None
}

fn elem_ab(a: i128, b: i128) -> NFElem {
    NFElem {
        coeffs: vec![
            Rational::from(Integer::from(a)),
            Rational::from(Integer::from(b)),
        ],
    }
}

/// Splitting data of a rational prime p in a real quadratic field.
/// The returned primes are ordered by index.
pub fn prime_split(f: &NumberField, p: u64) -> Result<(SplitType, Vec<PrimeIdeal>), NfError> {
    let (c0, c1) = quadratic_coeffs(f)?;
    let d = c1 * c1 - 4 * c0;
    let symbol = kronecker(d as i64, p as i64);
    if symbol == -1 {
        let gen = elem_ab(p as i128, 0);
        return Ok((
            SplitType::Inert,
            vec![PrimeIdeal {
                p,
                residue_degree: 2,
                ramification: 1,
                index: 0,
                omega_residue: None,
                gen,
                norm: p * p,
            }],
        ));
    }
    let bound = 2 * isqrt_u128(p as u128) as i64 + 8;
    let (a_plus, a_minus, b, _t) = norm_form_solve(c0, c1, p, bound)
        .ok_or(NfError::GeneratorSearchExhausted(bound, p))?;
    let pp = p as i128;
    // p never divides b for a norm +-p solution (else p^2 | norm)
    let binv = mod_inv_i128(b.rem_euclid(pp), pp);
    let res_of = |a: i128| ((-a).rem_euclid(pp) * binv).rem_euclid(pp) as u64;
    if symbol == 0 {
        let r = res_of(a_plus);
        return Ok((
            SplitType::Ramified,
            vec![PrimeIdeal {
                p,
                residue_degree: 1,
                ramification: 2,
                index: 0,
                omega_residue: Some(r),
                gen: elem_ab(a_plus, b),
                norm: p,
            }],
        ));
    }
    let r_plus = res_of(a_plus);
    let r_minus = res_of(a_minus);
    debug_assert_ne!(r_plus, r_minus);
    let mut pair = vec![
        (r_plus, elem_ab(a_plus, b)),
        (r_minus, elem_ab(a_minus, b)),
    ];
    pair.sort_by_key(|(r, _)| *r);
    let primes = pair
        .into_iter()
        .enumerate()
        .map(|(i, (r, gen))| PrimeIdeal {
            p,
            residue_degree: 1,
            ramification: 1,
            index: i as u32,
            omega_residue: Some(r),
            gen,
            norm: p,
        })
        .collect();
    Ok((SplitType::Split, primes))
}

/// Fundamental unit (as an element, with its norm) of a real
/// quadratic field, from the continued fraction of the power-basis
/// generator omega: the first convergent p/q with
/// |N(p - q*conj(omega))| = 1 yields the fundamental unit > 1.
pub fn fundamental_unit(f: &NumberField) -> Result<(NFElem, i32), NfError> {
    let (c0, c1) = quadratic_coeffs(f)?;
    let d = c1 * c1 - 4 * c0;
    let sd = isqrt_u128(d as u128) as i128;
    // omega = (-c1 + sqrt(d)) / 2, the larger root
    let mut pp = -c1;
    let mut qq = 2i128;
    let (mut p_prev, mut q_prev) = (Integer::from(0), Integer::from(1));
    let (mut p_cur, mut q_cur) = (Integer::from(1), Integer::from(0));
    let floor_div = |a: i128, b: i128| -> i128 {
        let q = a / b;
        if a % b != 0 && (a < 0) != (b < 0) {
            q - 1
        } else {
            q
        }
    };
    for _ in 0..100_000 {
        debug_assert!(qq != 0);
        let a = if qq > 0 {
            floor_div(pp + sd, qq)
        } else {
            floor_div(pp + sd + 1, qq)
        };
        let pk = Integer::from(a) * &p_cur + &p_prev;
        let qk = Integer::from(a) * &q_cur + &q_prev;
        // N(pk - qk*conj(omega)) = pk^2 + c1 pk qk + c0 qk^2
        let n = (&pk * &pk).complete()
            + Integer::from(c1) * (&pk * &qk).complete()
            + Integer::from(c0) * (&qk * &qk).complete();
        if qk > 0 && (n == 1 || n == -1) {
            // unit = (pk + c1 qk) + qk * omega
            let u0 = Integer::from(c1) * &qk + &pk;
            let unit = NFElem {
                coeffs: vec![Rational::from(u0), Rational::from(qk)],
            };
            let norm = if n == 1 { 1 } else { -1 };
            return Ok((unit, norm));
        }
        p_prev = std::mem::replace(&mut p_cur, pk);
        q_prev = std::mem::replace(&mut q_cur, qk);
        // surd step
        let p_next = a * qq - pp;
        let q_next = (d - p_next * p_next) / qq;
        pp = p_next;
        qq = q_next;
    }
    Err(NfError::UnitSearchExhausted)
}

/// An ideal as a multiset of prime-ideal factors (indices into the
/// `primes` list of the enclosing `IdealList`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealFactors {
    pub norm: u64,
    pub factors: Vec<(usize, u32)>,
}

/// All ideals of norm at most the requested bound, together with the
/// prime ideals they factor into.
#[derive(Debug)]
pub struct IdealList {
    pub primes: Vec<PrimeIdeal>,
    pub ideals: Vec<IdealFactors>,
}

impl IdealList {
    /// Explicit generator of an ideal: product of the generators of
    /// its prime factors (class number 1 in scope).
    pub fn generator(&self, f: &NumberField, ideal: &IdealFactors) -> NFElem {
        let mut g = f.one();
        for &(idx, e) in &ideal.factors {
            g = f.mul(&g, &f.pow(&self.primes[idx].gen, e as u64));
        }
        g
    }

    pub fn count_of_norm(&self, n: u64) -> usize {
        self.ideals.iter().filter(|i| i.norm == n).count()
    }

    /// View of the ideals as (factored prime list, norm) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<(&PrimeIdeal, u32)>, u64)> + '_ {
        self.ideals.iter().map(move |i| {
            let factors = i
                .factors
                .iter()
                .map(|&(idx, e)| (&self.primes[idx], e))
                .collect();
            (factors, i.norm)
        })
    }
}

/// Primes up to and including `upto`, by Eratosthenes sieve.
pub fn sieve_primes(upto: u64) -> Vec<u64> {
    if upto < 2 {
        return vec![];
    }
    let n = upto as usize;
    let mut is_comp = vec![false; n + 1];
    let mut out = vec![];
    for i in 2..=n {
        if !is_comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Enumerate all ideals of norm <= x in a real quadratic field of
/// class number 1, sorted by norm then by factorization.
pub fn ideals_of_norm_upto(f: &NumberField, x: u64) -> Result<IdealList, NfError> {
    let _ = quadratic_coeffs(f)?;
    let mut primes: Vec<PrimeIdeal> = vec![];
    for p in sieve_primes(x) {
        let (ty, ps) = prime_split(f, p)?;
        match ty {
            SplitType::Inert => {
                if p.checked_mul(p).map_or(false, |n| n <= x) {
                    primes.extend(ps);
                }
            }
            _ => primes.extend(ps),
        }
    }
    primes.sort_by_key(|q| (q.norm, q.p, q.index));
    let mut ideals: Vec<IdealFactors> = vec![];
    let mut stack: Vec<(usize, u64, Vec<(usize, u32)>)> = vec![(0, 1, vec![])];
    while let Some((start, norm, factors)) = stack.pop() {
        ideals.push(IdealFactors {
            norm,
            factors: factors.clone(),
        });
        for i in start..primes.len() {
            let q = primes[i].norm;
            if let Some(next) = norm.checked_mul(q) {
                if next <= x {
                    let mut nf = factors.clone();
                    nf.push((i, 1));
                    // deeper powers of the same prime are reached by
                    // re-extending from index i
                    stack.push((i, next, merge_last(nf)));
                }
            }
        }
    }
    // merge_last keeps factors canonical; dedupe paths that reach the
    // same multiset through different push orders cannot occur since
    // extension index is monotone
    ideals.sort_by(|a, b| (a.norm, &a.factors).cmp(&(b.norm, &b.factors)));
    Ok(IdealList { primes, ideals })
}

fn merge_last(mut factors: Vec<(usize, u32)>) -> Vec<(usize, u32)> {
    if factors.len() >= 2 {
        let last = factors[factors.len() - 1];
        let prev = factors[factors.len() - 2];
        if last.0 == prev.0 {
            factors.pop();
            let n = factors.len();
            factors[n - 1].1 += last.1;
        }
    }
    factors
}
