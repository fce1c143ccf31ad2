//! Exact LLL reduction on a Gram matrix with rational arithmetic
//! (Lovász parameter 3/4).  Works entirely through the Gram matrix,
//! so callers can reduce lattices given by inner products without
//! ever materializing basis vectors; the unimodular transform is
//! returned for reuse.

use rug::{Complete, Integer, Rational};

#[derive(Debug, Clone)]
pub struct LllResult {
    /// Unimodular transform U: row i gives the new basis vector i in
    /// terms of the old basis.
    pub transform: Vec<Vec<Integer>>,
    /// Reduced Gram matrix U G U^T.
    pub reduced: Vec<Vec<Rational>>,
}

fn gram_apply(g: &[Vec<Rational>], u: &[Vec<Integer>]) -> Vec<Vec<Rational>> {
    let n = g.len();
    let mut ug = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Rational::new();
            for k in 0..n {
                if u[i][k] != 0 {
                    s += (&g[k][j] * &u[i][k]).complete();
                }
            }
            ug[i][j] = s;
        }
    }
    let mut out = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Rational::new();
            for k in 0..n {
                if u[j][k] != 0 {
                    s += (&ug[i][k] * &u[j][k]).complete();
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Inner product of transformed rows i and j under the original Gram.
fn ip(g: &[Vec<Rational>], u: &[Vec<Integer>], i: usize, j: usize) -> Rational {
    let n = g.len();
    let mut s = Rational::new();
    for a in 0..n {
        if u[i][a] == 0 {
            continue;
        }
        for b in 0..n {
            if u[j][b] == 0 {
                continue;
            }
            let t = (&g[a][b] * &u[i][a]).complete();
            s += t * &u[j][b];
        }
    }
    s
}

/// LLL-reduce a positive definite rational Gram matrix.  Returns the
/// unimodular transform and the reduced Gram.
pub fn lll_gram(gram: &[Vec<Rational>]) -> LllResult {
    let n = gram.len();
    let mut u: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Integer::from((i == j) as u32))
                .collect()
        })
        .collect();
    if n == 0 {
        return LllResult {
            transform: u,
            reduced: vec![],
        };
    }
    let delta = Rational::from((3, 4));
    // Gram-Schmidt data recomputed from scratch on each pass; fine at
    // the tiny dimensions in scope (<= 8).
    let gs = |u: &Vec<Vec<Integer>>| -> (Vec<Rational>, Vec<Vec<Rational>>) {
        let mut bstar = vec![Rational::new(); n];
        let mut mu = vec![vec![Rational::new(); n]; n];
        for i in 0..n {
            let mut bi = ip(gram, u, i, i);
            for j in 0..i {
                let mut pij = ip(gram, u, i, j);
                for k in 0..j {
                    let t = (&mu[i][k] * &mu[j][k]).complete() * &bstar[k];
                    pij -= t;
                }
                mu[i][j] = if bstar[j].cmp0() == std::cmp::Ordering::Equal {
                    Rational::new()
                } else {
                    pij / &bstar[j]
                };
                let t = (&mu[i][j] * &mu[i][j]).complete() * &bstar[j];
                bi -= t;
            }
            bstar[i] = bi;
        }
        (bstar, mu)
    };
    let mut k = 1usize;
    let mut guard = 0u32;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "LLL failed to terminate");
        let (bstar, mu) = gs(&u);
        // size-reduce row k against rows k-1 .. 0
        let mut mu_k = mu[k].clone();
        for j in (0..k).rev() {
            let half = Rational::from((1, 2));
            if mu_k[j].clone().abs() > half {
                let q = {
                    // nearest integer: floor((2*num + den) / (2*den))
                    let (num, den) = (mu_k[j].numer().clone(), mu_k[j].denom().clone());
                    let twice: Integer = num * Integer::from(2) + &den;
                    twice.div_rem_floor(den * Integer::from(2)).0
                };
                if q != 0 {
                    for c in 0..n {
                        let t = (&u[j][c] * &q).complete();
                        u[k][c] -= t;
                    }
                    for j2 in 0..=j {
                        let t = (&mu[j][j2] * &q).complete();
                        mu_k[j2] -= t;
                    }
                }
            }
        }
        let (bstar2, mu2) = gs(&u);
        let lhs = bstar2[k].clone();
        let musq = (&mu2[k][k - 1] * &mu2[k][k - 1]).complete();
        let rhs = (delta.clone() - musq) * &bstar2[k - 1];
        let _ = bstar;
        if lhs >= rhs {
            k += 1;
        } else {
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    let reduced = gram_apply(gram, &u);
    LllResult {
        transform: u,
        reduced,
    }
}

#[cfg(test)]
mod unit {
    use super::*;

    fn gram_of(basis: &[Vec<i64>]) -> Vec<Vec<Rational>> {
        let n = basis.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        Rational::from(
                            basis[i]
                                .iter()
                                .zip(&basis[j])
                                .map(|(a, b)| a * b)
                                .sum::<i64>(),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn reduces_skewed_plane() {
        // basis (1, 0), (1000, 1): shortest vector has norm 1
        let g = gram_of(&[vec![1, 0], vec![1000, 1]]);
        let r = lll_gram(&g);
        assert_eq!(r.reduced[0][0], Rational::from(1));
        // transform is unimodular
        let det = (&r.transform[0][0] * &r.transform[1][1]).complete()
            - (&r.transform[0][1] * &r.transform[1][0]).complete();
        assert!(det == 1 || det == -1);
    }

    #[test]
    fn identity_fixed() {
        let g = gram_of(&[vec![1, 0], vec![0, 1]]);
        let r = lll_gram(&g);
        assert_eq!(r.reduced, g);
    }
}
