//! Small exact linear algebra helpers: fraction-free integer
//! determinants (Bareiss), rational determinants and solves by
//! fraction-free elimination on a cleared-denominator matrix, the
//! Faddeev-LeVerrier characteristic polynomial, and the polynomial
//! discriminant via the Sylvester resultant.

use rug::ops::Pow;
use rug::{Complete, Integer, Rational};

/// Bareiss fraction-free determinant of an integer matrix.
pub fn det_bareiss(m: &[Vec<Integer>]) -> Integer {
    let n = m.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut a: Vec<Vec<Integer>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            // pivot search
            let mut found = None;
            for i in k + 1..n {
                if a[i][k] != 0 {
                    found = Some(i);
                    break;
                }
            }
            match found {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = (&a[i][j] * &a[k][k]).complete() - (&a[i][k] * &a[k][j]).complete();
                a[i][j] = num / &prev;
            }
            a[i][k] = Integer::new();
        }
        prev = a[k][k].clone();
    }
    let mut d = a[n - 1][n - 1].clone();
    if sign < 0 {
        d = -d;
    }
    d
}

/// Determinant of a rational matrix: clear denominators per row, use
/// Bareiss, divide back.
pub fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::from(1);
    }
    let mut scaled: Vec<Vec<Integer>> = Vec::with_capacity(n);
    let mut denom = Integer::from(1);
    for row in m {
        let mut l = Integer::from(1);
        for x in row {
            l = l.lcm(x.denom());
        }
        let lr = Rational::from(&l);
        let irow: Vec<Integer> = row
            .iter()
            .map(|x| {
                let v = (x * &lr).complete();
                debug_assert_eq!(*v.denom(), 1);
                v.numer().clone()
            })
            .collect();
        scaled.push(irow);
        denom *= &l;
    }
    Rational::from((det_bareiss(&scaled), denom))
}

/// Solve M x = b over the rationals by Gaussian elimination.
/// Returns None when M is singular.
pub fn solve_rational(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| a[i][k].cmp0() != std::cmp::Ordering::Equal)?;
        a.swap(k, piv);
        let inv = Rational::from(1) / a[k][k].clone();
        for j in k..=n {
            let v = (&a[k][j] * &inv).complete();
            a[k][j] = v;
        }
        for i in 0..n {
            if i == k || a[i][k].cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let f = a[i][k].clone();
            for j in k..=n {
                let sub = (&a[k][j] * &f).complete();
                a[i][j] -= sub;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Characteristic polynomial of a rational square matrix,
/// low-to-high, monic of degree n, by the Faddeev-LeVerrier
/// recursion:  M_1 = A, c_{n-1} = -tr(M_1),
/// M_{k+1} = A (M_k + c_{n-k} I), c_{n-k-1} = -tr(M_{k+1})/(k+1).
pub fn charpoly_rational(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    for k in 1..=n {
        let mut tr = Rational::new();
        for i in 0..n {
            tr += &m[i][i];
        }
        let c = -tr / Rational::from(k as i64);
        coeffs[n - k] = c.clone();
        if k == n {
            break;
        }
        // m = a * (m + c I)
        let mut shifted = m.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] += &c;
        }
        let mut next = vec![vec![Rational::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::new();
                for l in 0..n {
                    s += (&a[i][l] * &shifted[l][j]).complete();
                }
                next[i][j] = s;
            }
        }
        m = next;
    }
    coeffs
}

/// Resultant of two integer polynomials (low-to-high) via the
/// Sylvester matrix and Bareiss.
pub fn resultant(f: &[Integer], g: &[Integer]) -> Integer {
    let df = f.len() - 1;
    let dg = g.len() - 1;
    if df == 0 {
        return f[0].clone().pow(dg as u32);
    }
    if dg == 0 {
        return g[0].clone().pow(df as u32);
    }
    let n = df + dg;
    let mut s = vec![vec![Integer::new(); n]; n];
    for i in 0..dg {
        for (j, c) in f.iter().enumerate() {
            s[i][i + (df - j)] = c.clone();
        }
    }
    for i in 0..df {
        for (j, c) in g.iter().enumerate() {
            s[dg + i][i + (dg - j)] = c.clone();
        }
    }
    det_bareiss(&s)
}

/// Discriminant of a monic integer polynomial f (low-to-high):
/// disc(f) = (-1)^{n(n-1)/2} Res(f, f').
pub fn poly_discriminant(f: &[Integer]) -> Integer {
    let n = f.len() - 1;
    if n == 1 {
        return Integer::from(1);
    }
    let fp: Vec<Integer> = (1..=n).map(|i| f[i].clone() * Integer::from(i)).collect();
    let r = resultant(f, &fp);
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}
