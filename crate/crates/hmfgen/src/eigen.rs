//! Exact simultaneous eigensystems of commuting integer Hecke matrices.
//!
//! Two entry points:
//!
//! * Known coefficient field: `screened_candidates` enumerates the integral
//!   elements inside the archimedean box given by the Eichler-Shimura/Weil
//!   bound, screened by matching their residues against the root set of the
//!   Hecke characteristic polynomial modulo two split primes.  Survivors are
//!   handed to `extract_system`.
//! * Unknown coefficient field: `spectrum_orbits` computes the exact
//!   characteristic polynomial by Chinese remaindering, refines the float
//!   spectrum by Newton iteration, and recognizes each minimal polynomial by
//!   lattice reduction, certifying it as an exact divisor.
//!
//! `extract_system` turns a certified eigenvalue into an exact eigenvector
//! over the coefficient field: rational kernel of the minimal polynomial
//! evaluated at the matrix, restriction to that kernel, and a field kernel of
//! the restriction.  `certified_eigenvalue` then proves `M v = lambda v`
//! exactly for any further commuting operator.

use numfield::lll::lll_gram;
use numfield::{NFElem, NumberField};
use rug::ops::CompleteRound;
use rug::{Complete, Float, Integer, Rational};

use crate::brandt::Mat;

// ---------------------------------------------------------------------------
// word-size modular arithmetic

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes_below(start: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = start;
    while out.len() < count {
        if is_prime_u64(p) {
            out.push(p);
        }
        p -= 1;
    }
    out
}

// ---------------------------------------------------------------------------
// characteristic polynomials

fn reduce_mat(b: &Mat, p: u64) -> Vec<Vec<u64>> {
    b.iter()
        .map(|row| row.iter().map(|&e| e.rem_euclid(p as i64) as u64).collect())
        .collect()
}

/// Characteristic polynomial of an i64 matrix modulo a prime p > dim,
/// low-to-high, monic, by the Faddeev-LeVerrier recursion.
pub fn charpoly_mod(b: &Mat, p: u64) -> Vec<u64> {
    let h = b.len();
    assert!(p > h as u64);
    let a = reduce_mat(b, p);
    let mut coeffs = vec![0u64; h + 1];
    coeffs[h] = 1;
    let mut m = a.clone();
    for k in 1..=h {
        let mut tr = 0u64;
        for (i, row) in m.iter().enumerate() {
            tr = (tr + row[i]) % p;
        }
        let c = mulmod(p - tr % p, invmod(k as u64, p), p) % p;
        coeffs[h - k] = c;
        if k == h {
            break;
        }
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = (row[i] + c) % p;
        }
        let mut next = vec![vec![0u64; h]; h];
        for i in 0..h {
            for l in 0..h {
                let ail = a[i][l];
                if ail == 0 {
                    continue;
                }
                for j in 0..h {
                    next[i][j] = (next[i][j] + mulmod(ail, m[l][j], p)) % p;
                }
            }
        }
        m = next;
    }
    coeffs
}

/// Exact characteristic polynomial (low-to-high, monic) by CRT over enough
/// word-size primes to cover the Hadamard-style coefficient bound.
pub fn charpoly_exact(b: &Mat) -> Vec<Integer> {
    let h = b.len();
    let maxabs = b
        .iter()
        .flat_map(|r| r.iter().map(|e| e.unsigned_abs()))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let bits = h as f64 + h as f64 * (0.5 * (h as f64).log2() + maxabs.log2()) + 66.0;
    let count = (bits / 61.0).ceil() as usize + 1;
    let primes = primes_below(u64::MAX / 4, count);

    let mut modulus = Integer::from(1);
    let mut res: Vec<Integer> = vec![Integer::new(); h + 1];
    for &p in &primes {
        let cp = charpoly_mod(b, p);
        if modulus == 1 {
            res = cp.iter().map(|&c| Integer::from(c)).collect();
            modulus = Integer::from(p);
            continue;
        }
        let pz = Integer::from(p);
        let minv_p = invmod((modulus.clone() % &pz).to_u64().unwrap(), p);
        for (r, &c) in res.iter_mut().zip(cp.iter()) {
            let r_mod_p = (r.clone() % &pz).to_u64().unwrap();
            let delta = (c + p - r_mod_p) % p;
            *r += (&modulus * Integer::from(mulmod(delta, minv_p, p))).complete();
        }
        modulus *= p;
    }
    let half = (modulus.clone()) >> 1;
    for r in res.iter_mut() {
        if *r > half {
            *r -= &modulus;
        }
    }
    assert_eq!(res[h], 1);
    res
}

// ---------------------------------------------------------------------------
// integer polynomial helpers (all low-to-high)

pub fn poly_derivative(p: &[Integer]) -> Vec<Integer> {
    (1..p.len()).map(|i| (&p[i] * Integer::from(i)).complete()).collect()
}

pub fn eval_poly_float(p: &[Integer], x: &Float) -> Float {
    let prec = x.prec();
    let mut acc = Float::with_val(prec, 0);
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Quotient of num by a monic den if the division is exact.
pub fn poly_div_monic(num: &[Integer], den: &[Integer]) -> Option<Vec<Integer>> {
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    if num.len() - 1 < dd {
        return None;
    }
    let mut rem: Vec<Integer> = num.to_vec();
    let qd = num.len() - 1 - dd;
    let mut quo = vec![Integer::new(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        quo[k] = c.clone();
        if c != 0 {
            for i in 0..=dd {
                rem[k + i] -= (&den[i] * &c).complete();
            }
        }
    }
    if rem.iter().all(|r| *r == 0) {
        Some(quo)
    } else {
        None
    }
}

/// Largest k with m^k dividing p, together with p / m^k.
pub fn poly_multiplicity(p: &[Integer], m: &[Integer]) -> (usize, Vec<Integer>) {
    let mut k = 0;
    let mut cur = p.to_vec();
    while let Some(q) = poly_div_monic(&cur, m) {
        k += 1;
        cur = q;
        if cur.len() == 1 {
            break;
        }
    }
    (k, cur)
}

fn integer_divisors(n: &Integer) -> Vec<Integer> {
    let n = n.clone().abs();
    assert!(n != 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = Integer::from(1);
    while (&d * &d).complete() <= n {
        if n.is_divisible(&d) {
            small.push(d.clone());
            large.push((&n / &d).complete());
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small.dedup();
    small
}

/// Irreducibility over Q for monic integer polynomials of degree at most 4:
/// rational-root exclusion plus, in degree 4, exclusion of monic quadratic
/// factorizations (integral by Gauss's lemma).
pub fn is_irreducible_deg_le4(m: &[Integer]) -> bool {
    let d = m.len() - 1;
    assert!((1..=4).contains(&d) && m[d] == 1);
    if d == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    for div in integer_divisors(&m[0]) {
        for root in [div.clone(), (-div).complete()] {
            let mut acc = Integer::new();
            for c in m.iter().rev() {
                acc = acc * &root + c;
            }
            if acc == 0 {
                return false;
            }
        }
    }
    if d < 4 {
        return true;
    }
    // x^4 + m3 x^3 + m2 x^2 + m1 x + m0 = (x^2+ax+b)(x^2+cx+d)
    for b in integer_divisors(&m[0]) {
        for b in [b.clone(), (-b).complete()] {
            let dd = (&m[0] / &b).complete();
            // a + c = m3, a c = m2 - b - d, a d + b c = m1
            let s = m[3].clone();
            let prod = (&m[2] - &b).complete() - &dd;
            let disc = (&s * &s).complete() - Integer::from(4) * &prod;
            if disc < 0 || !disc.is_perfect_square() {
                continue;
            }
            let r = disc.sqrt();
            for a in [((&s + &r).complete()) / 2, ((&s - &r).complete()) / 2] {
                let c = (&s - &a).complete();
                if (&a + &c).complete() != s || (&a * &c).complete() != prod {
                    continue;
                }
                if (&a * &dd).complete() + (&b * &c).complete() == m[1] {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// float spectrum and root refinement

/// Eigenvalues of the symmetrization D B D^{-1}, D = diag(u_i^{-1/2}), by
/// cyclic Jacobi rotations.  Valid because u_j B_ij = u_i B_ji.
pub fn symmetric_spectrum(b: &Mat, units: &[u64]) -> Vec<f64> {
    let h = b.len();
    let mut s = vec![vec![0f64; h]; h];
    for i in 0..h {
        for j in 0..h {
            s[i][j] = b[i][j] as f64 * (units[i] as f64 / units[j] as f64).sqrt();
        }
    }
    for i in 0..h {
        for j in 0..i {
            assert!(
                (s[i][j] - s[j][i]).abs() <= 1e-8 * (1.0 + s[i][j].abs()),
                "matrix not symmetrizable by the unit weights"
            );
            let avg = 0.5 * (s[i][j] + s[j][i]);
            s[i][j] = avg;
            s[j][i] = avg;
        }
    }
    for _sweep in 0..60 {
        let mut off = 0f64;
        for p in 0..h {
            for q in p + 1..h {
                off += s[p][q] * s[p][q];
            }
        }
        if off < 1e-22 {
            break;
        }
        for p in 0..h {
            for q in p + 1..h {
                if s[p][q].abs() < 1e-14 {
                    continue;
                }
                let theta = 0.5 * (s[q][q] - s[p][p]) / s[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..h {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..h {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut evs: Vec<f64> = (0..h).map(|i| s[i][i]).collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}

/// Refine an approximate real root of p to `prec` bits by Newton iteration.
pub fn newton_root(p: &[Integer], x0: f64, prec: u32) -> Float {
    let dp = poly_derivative(p);
    let mut x = Float::with_val(prec, x0);
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec as i32) - 24)));
    for _ in 0..300 {
        let num = eval_poly_float(p, &x);
        let den = eval_poly_float(&dp, &x);
        assert!(den != 0, "Newton hit a critical point");
        let dx = num / den;
        x -= &dx;
        if dx.clone().abs() < tol.clone() * (Float::with_val(prec, 1) + x.clone().abs()) {
            return x;
        }
    }
    panic!("Newton iteration did not converge");
}

/// Minimal monic integer polynomial of a high-precision real algebraic
/// number, certified as an exact divisor of the characteristic polynomial
/// `p` it is a root of.  Degrees are tried in increasing order, so the first
/// verified candidate is minimal.
pub fn recognize_minpoly(x: &Float, p: &[Integer], max_deg: usize) -> Option<Vec<Integer>> {
    let prec = x.prec();
    for d in 1..=max_deg {
        let mut powers: Vec<Rational> = Vec::with_capacity(d + 1);
        let mut cur = Float::with_val(prec, 1);
        for _ in 0..=d {
            powers.push(cur.to_rational().unwrap());
            cur *= x;
        }
        let scale = Rational::from(Integer::from(1) << (prec as u32 - 110).min(620));
        let n = d + 1;
        let mut gram = vec![vec![Rational::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut g = (&powers[i] * &powers[j]).complete() * &scale * &scale;
                if i == j {
                    g += Rational::from(1);
                }
                gram[i][j] = g;
            }
        }
        let red = lll_gram(&gram);
        let mut best = 0;
        for i in 1..n {
            if red.reduced[i][i] < red.reduced[best][best] {
                best = i;
            }
        }
        let mut cand: Vec<Integer> = red.transform[best].clone();
        if cand[d] == 0 {
            continue;
        }
        if cand[d] < 0 {
            for c in cand.iter_mut() {
                *c = (-&*c).complete();
            }
        }
        let mut g = cand[0].clone();
        for c in &cand[1..] {
            g.gcd_mut(c);
        }
        if g != 1 {
            for c in cand.iter_mut() {
                *c /= &g;
            }
        }
        if cand[d] != 1 {
            continue;
        }
        let val = eval_poly_float(&cand, x).abs();
        let tiny = Float::with_val(prec, Float::i_exp(1, -((prec as i32) / 2)));
        if val > tiny {
            continue;
        }
        if poly_div_monic(p, &cand).is_some() {
            return Some(cand);
        }
    }
    None
}

/// A Galois orbit of the spectrum: the minimal polynomial of its
/// eigenvalues and the multiplicity with which it divides the
/// characteristic polynomial.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub minpoly: Vec<Integer>,
    pub multiplicity: usize,
}

/// Orbit decomposition of the spectrum of a Hecke matrix up to a degree
/// cutoff: exact characteristic polynomial, float spectrum, Newton
/// refinement, minimal polynomial recognition by lattice reduction.  Every
/// recognized minimal polynomial carries an exact certificate (it divides
/// the characteristic polynomial over Z) and its multiplicity comes from
/// exact division.  Eigenvalue clusters of degree above `max_deg` are
/// skipped; when none are skipped the recognized orbits are additionally
/// certified to account for the whole spectrum.
pub fn spectrum_orbits(b: &Mat, units: &[u64], max_deg: usize) -> (Vec<Integer>, Vec<Orbit>) {
    let h = b.len();
    let p = charpoly_exact(b);
    let evs = symmetric_spectrum(b, units);
    let mut reps: Vec<f64> = Vec::new();
    for &e in &evs {
        if reps.last().map_or(true, |&r| (e - r).abs() > 1e-7) {
            reps.push(e);
        }
    }
    let mut minpolys: Vec<Vec<Integer>> = Vec::new();
    let mut skipped = 0usize;
    for &r in &reps {
        let x = newton_root(&p, r, 480);
        match recognize_minpoly(&x, &p, max_deg) {
            Some(m) => {
                if !minpolys.contains(&m) {
                    minpolys.push(m);
                }
            }
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        eprintln!("  spectrum: {skipped} clusters of degree above {max_deg} skipped");
    }
    let mut orbits = Vec::new();
    let mut covered = 0usize;
    for m in minpolys {
        let (k, _) = poly_multiplicity(&p, &m);
        assert!(k >= 1, "recognized polynomial does not divide the charpoly");
        covered += (m.len() - 1) * k;
        orbits.push(Orbit { minpoly: m, multiplicity: k });
    }
    assert!(covered <= h, "orbit degrees overcount the spectrum");
    if skipped == 0 {
        assert_eq!(covered, h, "spectrum not fully accounted for");
    }
    (p, orbits)
}

// ---------------------------------------------------------------------------
// Weil box and residue screening (known coefficient field)

/// All integral coordinate vectors (power basis) whose every real embedding
/// is at most `w` in absolute value.
pub fn weil_box(nf: &NumberField, w: f64) -> Vec<Vec<i64>> {
    let g = nf.degree;
    let roots: Vec<f64> = nf
        .real_embeddings(90)
        .expect("coefficient field must be totally real")
        .iter()
        .map(|r| r.to_f64())
        .collect();
    assert_eq!(roots.len(), g);
    let emb: Vec<Vec<f64>> = roots
        .iter()
        .map(|&r| (0..g).map(|j| r.powi(j as i32)).collect())
        .collect();
    // numeric inverse for coordinate bounds
    let mut aug: Vec<Vec<f64>> = emb
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..g).map(|j| f64::from(i == j)));
            v
        })
        .collect();
    for col in 0..g {
        let piv = (col..g).max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs())).unwrap();
        aug.swap(col, piv);
        let d = aug[col][col];
        assert!(d.abs() > 1e-12);
        for j in 0..2 * g {
            aug[col][j] /= d;
        }
        for r in 0..g {
            if r != col {
                let f = aug[r][col];
                for j in 0..2 * g {
                    aug[r][j] -= f * aug[col][j];
                }
            }
        }
    }
    let bounds: Vec<i64> = (0..g)
        .map(|j| {
            let s: f64 = (0..g).map(|i| aug[j][g + i].abs()).sum();
            (s * w * (1.0 + 1e-9)).floor() as i64 + 1
        })
        .collect();
    let mut out = Vec::new();
    let mut coords = vec![0i64; g];
    fn rec(
        k: usize,
        coords: &mut Vec<i64>,
        bounds: &[i64],
        emb: &[Vec<f64>],
        w: f64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if k == coords.len() {
            let ok = emb.iter().all(|row| {
                let v: f64 = row.iter().zip(coords.iter()).map(|(e, &c)| e * c as f64).sum();
                v.abs() <= w * (1.0 + 1e-9) + 1e-9
            });
            if ok {
                out.push(coords.clone());
            }
            return;
        }
        for c in -bounds[k]..=bounds[k] {
            coords[k] = c;
            rec(k + 1, coords, bounds, emb, w, out);
        }
    }
    rec(0, &mut coords, &bounds, &emb, w, &mut out);
    out
}

/// Find a prime >= `from`, not dividing `disc`, modulo which the minimal
/// polynomial of the field splits into distinct linear factors, returning
/// (p, roots).
fn split_prime(nf: &NumberField, from: u64) -> (u64, Vec<u64>) {
    let g = nf.degree as usize;
    let mp: Vec<Integer> = nf.min_poly.clone();
    let mut p = from;
    loop {
        p += 1;
        if !is_prime_u64(p) {
            continue;
        }
        if nf.disc.clone().abs() % p == 0 {
            continue;
        }
        let mpp: Vec<u64> = mp
            .iter()
            .map(|c| {
                let r = c.clone() % Integer::from(p);
                let r = if r < 0 { r + p } else { r };
                r.to_u64().unwrap()
            })
            .collect();
        let mut roots = Vec::new();
        for x in 0..p {
            let mut acc = 0u64;
            for c in mpp.iter().rev() {
                acc = (mulmod(acc, x, p) + c) % p;
            }
            if acc == 0 {
                roots.push(x);
            }
            if roots.len() == g {
                break;
            }
        }
        if roots.len() == g {
            return (p, roots);
        }
    }
}

/// Eigenvalue candidates in the ring of integers of `nf` bounded by `w` at
/// every real place, screened against the Hecke matrix `b`: a true
/// eigenvalue reduces, at every prime of `nf` above a split prime p, to a
/// root of charpoly(b) mod p.  Requiring this at all embeddings modulo two
/// split primes leaves only genuine eigenvalues and rare accidental hits,
/// which the exact kernel step discards.
pub fn screened_candidates(nf: &NumberField, b: &Mat, w: f64) -> Vec<NFElem> {
    let g = nf.degree;
    let box_coords = weil_box(nf, w);
    let mut screens = Vec::new();
    let mut from = 2000;
    for _ in 0..2 {
        let (p, roots) = split_prime(nf, from);
        from = p;
        let cp = charpoly_mod(b, p);
        let mut is_root = vec![false; p as usize];
        for x in 0..p {
            let mut acc = 0u64;
            for c in cp.iter().rev() {
                acc = (mulmod(acc, x, p) + c) % p;
            }
            if acc == 0 {
                is_root[x as usize] = true;
            }
        }
        // power tables per embedding root
        let powers: Vec<Vec<u64>> = roots
            .iter()
            .map(|&r| {
                let mut row = Vec::with_capacity(g);
                let mut cur = 1u64;
                for _ in 0..g {
                    row.push(cur);
                    cur = mulmod(cur, r, p);
                }
                row
            })
            .collect();
        screens.push((p, is_root, powers));
    }
    let mut out = Vec::new();
    'cand: for c in &box_coords {
        for (p, is_root, powers) in &screens {
            for pw in powers {
                let mut v = 0u64;
                for (j, &cj) in c.iter().enumerate() {
                    let cj = cj.rem_euclid(*p as i64) as u64;
                    v = (v + mulmod(cj, pw[j], *p)) % p;
                }
                if !is_root[v as usize] {
                    continue 'cand;
                }
            }
        }
        out.push(NFElem::from_i64s(c));
    }
    out
}

// ---------------------------------------------------------------------------
// exact linear algebra

/// Reduced row echelon kernel of a rational matrix.  Returns the kernel
/// basis (one vector per free column, with value 1 at its free column and 0
/// at the others) together with the free column indices.
pub fn rational_kernel(m: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let piv = (r..rows).find(|&i| a[i][c] != 0);
        let Some(piv) = piv else { continue };
        a.swap(r, piv);
        let d = a[r][c].clone();
        for j in c..cols {
            a[r][j] /= &d;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = (&a[r][j] * &f).complete();
                    a[i][j] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rational::new(); cols];
        v[fc] = Rational::from(1);
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = (-&a[row][fc]).complete();
        }
        basis.push(v);
    }
    (basis, free)
}

/// Evaluate a monic integer polynomial at an integer matrix (Horner).
pub fn poly_apply(b: &Mat, g: &[Integer]) -> Vec<Vec<Integer>> {
    let h = b.len();
    let mut cur = vec![vec![Integer::new(); h]; h];
    for (i, row) in cur.iter_mut().enumerate() {
        row[i] = g[g.len() - 1].clone();
    }
    for k in (0..g.len() - 1).rev() {
        let mut next = vec![vec![Integer::new(); h]; h];
        for i in 0..h {
            for l in 0..h {
                if cur[i][l] == 0 {
                    continue;
                }
                for j in 0..h {
                    if b[l][j] != 0 {
                        next[i][j] += (&cur[i][l] * b[l][j]).complete();
                    }
                }
            }
        }
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &g[k];
        }
        cur = next;
    }
    cur
}

/// Restriction of b to the span of the kernel basis, using the free-column
/// structure: column k of C is read off the free coordinates of b·w_k, and
/// b·w_k = sum_l C[l][k] w_l is then asserted exactly.
pub fn restriction(b: &Mat, basis: &[Vec<Rational>], free: &[usize]) -> Vec<Vec<Rational>> {
    let h = b.len();
    let d = basis.len();
    let mut c = vec![vec![Rational::new(); d]; d];
    for (k, w) in basis.iter().enumerate() {
        let mut y = vec![Rational::new(); h];
        for i in 0..h {
            let mut s = Rational::new();
            for (j, wj) in w.iter().enumerate() {
                if b[i][j] != 0 && *wj != 0 {
                    s += (wj * Rational::from(b[i][j])).complete();
                }
            }
            y[i] = s;
        }
        for (l, &fc) in free.iter().enumerate() {
            c[l][k] = y[fc].clone();
        }
        for i in 0..h {
            let mut s = Rational::new();
            for (l, wl) in basis.iter().enumerate() {
                if c[l][k] != 0 {
                    s += (&c[l][k] * &wl[i]).complete();
                }
            }
            assert_eq!(s, y[i], "kernel is not stable under the operator");
        }
    }
    c
}

/// Kernel basis of a matrix over the number field, by Gauss-Jordan.
pub fn nf_kernel(nf: &NumberField, m: &[Vec<NFElem>]) -> Vec<Vec<NFElem>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<NFElem>> = m.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let piv = (r..rows).find(|&i| !a[i][c].is_zero());
        let Some(piv) = piv else { continue };
        a.swap(r, piv);
        let d = a[r][c].clone();
        for j in c..cols {
            a[r][j] = nf.div(&a[r][j], &d).unwrap();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = nf.mul(&a[r][j], &f);
                    a[i][j] = nf.sub(&a[i][j], &t);
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![nf.zero(); cols];
        v[fc] = nf.one();
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = nf.neg(&a[row][fc]);
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// exact eigensystem extraction

/// A certified eigensystem: `vec` spans the simultaneous eigenspace over the
/// coefficient field inside the rational kernel of minpoly(a_seed)(B).
pub struct ExactSystem {
    pub a_seed: NFElem,
    pub vec: Vec<NFElem>,
    pub pivot: usize,
}

/// Exact eigensystem for the eigenvalue `a` (which must generate the field):
/// rational kernel W of minpoly(a)(b) with dim W = deg(nf), restriction C of
/// b to W, and the one-dimensional kernel of C - a over the field.  Any
/// operator commuting with b acts on W as a polynomial in the (cyclic)
/// restriction, so the returned vector is a simultaneous eigenvector of the
/// whole commutant.
pub fn extract_system(b: &Mat, nf: &NumberField, a: &NFElem) -> Option<ExactSystem> {
    let g = nf.degree;
    let cp = nf.charpoly(a);
    let gi: Vec<Integer> = cp
        .iter()
        .map(|c| {
            assert_eq!(*c.denom(), 1, "eigenvalue candidate must be integral");
            c.numer().clone()
        })
        .collect();
    // primitivity: the characteristic polynomial must be squarefree, i.e.
    // gcd with its derivative trivial; equivalently 1, a, .., a^{g-1}
    // independent.  A non-primitive candidate is skipped.
    {
        let mut pows = Vec::with_capacity(g);
        let mut cur = nf.one();
        for _ in 0..g {
            pows.push(cur.coeffs.clone());
            cur = nf.mul(&cur, a);
        }
        let mat: Vec<Vec<Rational>> = (0..g)
            .map(|i| (0..g).map(|j| pows[j][i].clone()).collect())
            .collect();
        if numfield::linalg::det_rational(&mat) == 0 {
            return None;
        }
    }
    let gb = poly_apply(b, &gi);
    let gb_rat: Vec<Vec<Rational>> = gb
        .iter()
        .map(|row| row.iter().map(|e| Rational::from(e)).collect())
        .collect();
    let (basis, free) = rational_kernel(&gb_rat);
    if basis.len() != g {
        return None;
    }
    let c = restriction(b, &basis, &free);
    let mut m = vec![vec![nf.zero(); g]; g];
    for i in 0..g {
        for j in 0..g {
            let mut e = NFElem::from_rational(c[i][j].clone(), g);
            if i == j {
                e = nf.sub(&e, a);
            }
            m[i][j] = e;
        }
    }
    let kern = nf_kernel(nf, &m);
    if kern.len() != 1 {
        return None;
    }
    let v = &kern[0];
    let mut vec = vec![nf.zero(); b.len()];
    for (k, wk) in basis.iter().enumerate() {
        for (i, wki) in wk.iter().enumerate() {
            if *wki != 0 {
                let t = nf.scale(&v[k], wki);
                vec[i] = nf.add(&vec[i], &t);
            }
        }
    }
    let pivot = vec.iter().position(|e| !e.is_zero()).expect("zero eigenvector");
    Some(ExactSystem { a_seed: a.clone(), vec, pivot })
}

impl ExactSystem {
    /// Eigenvalue of a commuting operator on this eigenvector, certified by
    /// checking M v = lambda v exactly in every coordinate.
    pub fn certified_eigenvalue(&self, nf: &NumberField, m: &Mat) -> NFElem {
        let h = self.vec.len();
        assert_eq!(m.len(), h);
        let mut w = vec![nf.zero(); h];
        for i in 0..h {
            let mut s = nf.zero();
            for (j, vj) in self.vec.iter().enumerate() {
                if m[i][j] != 0 && !vj.is_zero() {
                    let t = nf.scale(vj, &Rational::from(m[i][j]));
                    s = nf.add(&s, &t);
                }
            }
            w[i] = s;
        }
        let lam = nf.div(&w[self.pivot], &self.vec[self.pivot]).unwrap();
        for (wi, vi) in w.iter().zip(self.vec.iter()) {
            assert_eq!(*wi, nf.mul(&lam, vi), "not an exact eigenvector");
        }
        lam
    }
}
