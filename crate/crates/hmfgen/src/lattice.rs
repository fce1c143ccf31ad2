//! Full-rank `Z`-lattices in the quaternion algebra, stored as Hermite
//! normal form bases in quarter coordinates.
//!
//! The HNF is the canonical representative, so lattice equality is row
//! equality.  Enumeration never runs on the HNF basis directly; callers ask
//! for an LLL-reduced basis first.

use crate::quat::{Alg, Vec8};
use rug::{Integer, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lat {
    /// Upper triangular, positive pivots on the diagonal, entries above a
    /// pivot reduced into `[0, pivot)`.  Always 8 rows.
    pub rows: Vec<[Integer; 8]>,
}

fn zero_row() -> [Integer; 8] {
    core::array::from_fn(|_| Integer::new())
}

/// Hermite normal form of the row span; panics unless the span has full
/// rank 8.
pub fn hnf(mut rows: Vec<[Integer; 8]>) -> Lat {
    let mut out: Vec<[Integer; 8]> = Vec::with_capacity(8);
    let mut r = 0usize;
    for col in 0..8 {
        loop {
            let mut best: Option<usize> = None;
            for (idx, row) in rows.iter().enumerate().skip(r) {
                if row[col] != 0 {
                    let better = match best {
                        None => true,
                        Some(b) => row[col].clone().abs() < rows[b][col].clone().abs(),
                    };
                    if better {
                        best = Some(idx);
                    }
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for idx in r + 1..rows.len() {
                if rows[idx][col] != 0 {
                    let q = Integer::from(&rows[idx][col] / &rows[r][col]);
                    if q != 0 {
                        for c in col..8 {
                            let sub = Integer::from(&q * &rows[r][c]);
                            rows[idx][c] -= sub;
                        }
                    }
                    if rows[idx][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && rows[r][col] != 0 {
            if rows[r][col] < 0 {
                for c in col..8 {
                    let neg = -rows[r][c].clone();
                    rows[r][c] = neg;
                }
            }
            r += 1;
        }
    }
    assert_eq!(r, 8, "lattice does not have full rank");
    rows.truncate(8);
    // reduce entries above each pivot
    for i in (0..8).rev() {
        for j in 0..i {
            let q = Integer::from(rows[j][i].div_euc_ref(&rows[i][i]));
            if q != 0 {
                for c in i..8 {
                    let sub = Integer::from(&q * &rows[i][c]);
                    rows[j][c] -= sub;
                }
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate().take(i) {
            debug_assert_eq!(*v, 0, "row {i} col {c} below diagonal");
        }
    }
    out.extend(rows.into_iter());
    Lat { rows: out }
}

pub fn from_i128_rows(rows: &[Vec8]) -> Lat {
    hnf(rows
        .iter()
        .map(|r| core::array::from_fn(|m| Integer::from(r[m])))
        .collect())
}

impl Lat {
    pub fn det(&self) -> Integer {
        let mut d = Integer::from(1);
        for (i, row) in self.rows.iter().enumerate() {
            d *= &row[i];
        }
        d
    }

    pub fn rows_i128(&self) -> Vec<Vec8> {
        self.rows
            .iter()
            .map(|r| {
                core::array::from_fn(|m| {
                    r[m].to_i128().expect("lattice coordinate exceeds i128")
                })
            })
            .collect()
    }

    /// Exact membership test via back substitution on the triangular basis.
    pub fn contains(&self, v: &[Integer; 8]) -> bool {
        let mut w: [Integer; 8] = v.clone();
        for i in 0..8 {
            if w[i] == 0 {
                continue;
            }
            let (q, rem) = w[i].clone().div_rem(self.rows[i][i].clone());
            if rem != 0 {
                return false;
            }
            for c in i..8 {
                let sub = Integer::from(&q * &self.rows[i][c]);
                w[c] -= sub;
            }
        }
        w.iter().all(|x| *x == 0)
    }

    pub fn contains_vec8(&self, v: &Vec8) -> bool {
        let w: [Integer; 8] = core::array::from_fn(|m| Integer::from(v[m]));
        self.contains(&w)
    }
}

/// Span of all pairwise products of the two bases.
pub fn mul(alg: &Alg, a: &Lat, b: &Lat) -> Lat {
    let ra = a.rows_i128();
    let rb = b.rows_i128();
    let mut rows = Vec::with_capacity(64);
    for x in &ra {
        for y in &rb {
            rows.push(alg.mul(x, y));
        }
    }
    from_i128_rows(&rows)
}

pub fn conj(alg: &Alg, a: &Lat) -> Lat {
    let rows: Vec<Vec8> = a.rows_i128().iter().map(|r| alg.conj(r)).collect();
    from_i128_rows(&rows)
}

pub fn scale_felt(alg: &Alg, a: &Lat, c: crate::field::FElt) -> Lat {
    let rows: Vec<Vec8> = a.rows_i128().iter().map(|r| alg.scale_felt(r, c)).collect();
    from_i128_rows(&rows)
}

pub fn div_felt(alg: &Alg, a: &Lat, c: crate::field::FElt) -> Lat {
    let rows: Vec<Vec8> = a.rows_i128().iter().map(|r| alg.div_felt(r, c)).collect();
    from_i128_rows(&rows)
}

/// Gram matrix of the trace pairing `Tr_F(Trd(x conj(y)))` on the HNF basis.
/// Entries are exact integers for every lattice contained in an order;
/// computed in big integers to be safe against large HNF pivots.
pub fn gram(alg: &Alg, a: &Lat) -> Vec<Vec<Integer>> {
    let f = &alg.f;
    let (t, n) = (Integer::from(f.t), Integer::from(f.n));
    // field coefficients of a row: four (a, b) pairs over Integer
    let coeffs = |r: &[Integer; 8]| -> Vec<(Integer, Integer)> {
        (0..4)
            .map(|m| (r[2 * m].clone(), r[2 * m + 1].clone()))
            .collect()
    };
    let rows: Vec<Vec<(Integer, Integer)>> = a.rows.iter().map(coeffs).collect();
    let mut g = vec![vec![Integer::new(); 8]; 8];
    for i in 0..8 {
        for j in 0..=i {
            // z0 coefficient of x * conj(y): sum over the four components of
            // the field products x_m * y_m (conjugation flips the sign of the
            // i, j, k parts twice).
            let mut za = Integer::new();
            let mut zb = Integer::new();
            for m in 0..4 {
                let (xa, xb) = &rows[i][m];
                let (ya, yb) = &rows[j][m];
                let bd = Integer::from(xb * yb);
                za += Integer::from(xa * ya) + Integer::from(&n * &bd);
                zb += Integer::from(xa * yb) + Integer::from(xb * ya) + Integer::from(&t * &bd);
            }
            // pairing*8 = 2 za + t zb; entries of the Gram divide by 8
            let p8 = Integer::from(2) * za + Integer::from(&t * &zb);
            let (q, rem) = p8.div_rem(Integer::from(8));
            assert_eq!(rem, 0, "trace pairing is not integral on this lattice");
            g[i][j] = q.clone();
            g[j][i] = q;
        }
    }
    g
}

/// LLL-reduced basis of the lattice (rows in reduced order, not HNF).
pub fn lll_basis(alg: &Alg, a: &Lat) -> Vec<Vec8> {
    let g = gram(alg, a);
    let gq: Vec<Vec<Rational>> = g
        .iter()
        .map(|row| row.iter().map(|x| Rational::from(x)).collect())
        .collect();
    let res = numfield::lll::lll_gram(&gq);
    let rows = a.rows_i128();
    let mut out = Vec::with_capacity(8);
    for trow in &res.transform {
        let mut acc = [0i128; 8];
        for (c, row) in trow.iter().zip(rows.iter()) {
            let ci = c.to_i128().expect("transform entry fits");
            for m in 0..8 {
                acc[m] += ci * row[m];
            }
        }
        out.push(acc);
    }
    out
}
