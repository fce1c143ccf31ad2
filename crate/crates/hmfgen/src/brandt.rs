//! Hecke operators on the right-ideal-class module of a definite quaternion
//! order, computed by two independent routes and cross-certified.
//!
//! Route N ("neighbors") applies the p-neighbor construction line by line and
//! classifies each image ideal.  It yields the Hecke operator at a good prime
//! directly as a nonnegative integer matrix whose rows sum to `Nm(p) + 1`,
//! with no normalization ambiguity.
//!
//! Route T ("theta") counts, in each pair lattice `I_i conj(I_j)`, the
//! unit-orbits of vectors whose reduced norm generates the prescribed ideal.
//! Dividing the orbit count by the unit order `u_j` counts sublattices of
//! `I_i` isomorphic to `I_j` of the prescribed index, which is the same
//! operator.  Route T also covers primes dividing the level, where the
//! neighbor construction does not apply and the rows sum to `Nm(p)`.
//!
//! `certify_good_prime` runs both routes and demands exact agreement; the
//! remaining checks (identity, commutativity, the quadratic Hecke recursion)
//! pin the multiplicative structure.

use crate::classset::{pair_lattice, ClassSet};
use crate::field::FElt;
use crate::order::FPrime;
use crate::residue::{ResQuot, Splitting};
use crate::theta::ThetaTable;

pub type Mat = Vec<Vec<i64>>;

/// Hecke operator at a good prime via the neighbor construction.
pub fn hecke_neighbors(cs: &ClassSet, pr: &FPrime) -> Mat {
    let alg = &cs.alg;
    let quot = ResQuot::new(alg, &cs.order, pr.gen, pr.fq);
    let sp = Splitting::new(quot);
    let h = cs.len();
    let mut t = vec![vec![0i64; h]; h];
    for i in 0..h {
        let rep = &cs.ideals[i];
        let g_nb = alg.f.mul(rep.g, pr.gen);
        for nb in sp.neighbors(&rep.lat, rep.g) {
            let j = cs.classify(nb, g_nb);
            t[i][j] += 1;
        }
    }
    for row in &t {
        assert_eq!(
            row.iter().sum::<i64>(),
            pr.norm as i64 + 1,
            "neighbor route row sum"
        );
    }
    t
}

/// Vector-count tables for every unordered pair of classes, up to a shared
/// norm bound.  The orbit count is symmetric in (i, j) because conjugation
/// maps `I_i conj(I_j)` onto `I_j conj(I_i)` preserving reduced norms.
pub struct PairTables {
    h: usize,
    tabs: Vec<ThetaTable>,
}

impl PairTables {
    pub fn build(cs: &ClassSet, norm_bound: i128) -> PairTables {
        let h = cs.len();
        let mut tabs = Vec::with_capacity(h * (h + 1) / 2);
        for i in 0..h {
            for j in i..h {
                let (prod, gamma) = pair_lattice(&cs.alg, &cs.ideals[i], &cs.ideals[j]);
                tabs.push(ThetaTable::build(&cs.alg, &prod.rows_i128(), gamma, norm_bound));
            }
        }
        PairTables { h, tabs }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.h - a * (a - 1) / 2 + (b - a)
    }

    /// Orbit count of vectors of reduced norm ideal `(value)` in the (i, j)
    /// pair lattice.
    pub fn count(&self, cs: &ClassSet, i: usize, j: usize, value: FElt) -> u64 {
        self.tabs[self.idx(i, j)].value_count(&cs.alg.f, value)
    }
}

/// Hecke operator at the ideal generated by `value`, from the theta route.
pub fn hecke_theta(cs: &ClassSet, tabs: &PairTables, value: FElt) -> Mat {
    let h = cs.len();
    let mut t = vec![vec![0i64; h]; h];
    for i in 0..h {
        for j in 0..h {
            let cnt = tabs.count(cs, i, j, value);
            let u = cs.units[j];
            assert_eq!(cnt % u, 0, "orbit count not divisible by unit order");
            t[i][j] = (cnt / u) as i64;
        }
    }
    t
}

/// The theta route at the unit ideal must give the identity matrix: the only
/// classes admitting a norm-one vector in their pair lattice are isomorphic
/// ones, and the diagonal orbit count is exactly the unit order.
pub fn certify_identity(cs: &ClassSet, tabs: &PairTables) {
    let one = hecke_theta(cs, tabs, FElt::ONE);
    for (i, row) in one.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            assert_eq!(e, i64::from(i == j), "theta route identity");
        }
    }
}

/// Both routes at a good prime; exact agreement required.
pub fn certify_good_prime(cs: &ClassSet, tabs: &PairTables, pr: &FPrime) -> Mat {
    let via_theta = hecke_theta(cs, tabs, pr.gen);
    let via_neighbors = hecke_neighbors(cs, pr);
    assert_eq!(via_theta, via_neighbors, "route disagreement at norm {}", pr.norm);
    via_theta
}

/// Theta route at a prime dividing the level; rows sum to Nm(p).
pub fn certify_level_prime(cs: &ClassSet, tabs: &PairTables, pr: &FPrime) -> Mat {
    let t = hecke_theta(cs, tabs, pr.gen);
    for row in &t {
        assert_eq!(row.iter().sum::<i64>(), pr.norm as i64, "level prime row sum");
    }
    t
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let h = a.len();
    let mut c = vec![vec![0i64; h]; h];
    for i in 0..h {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0 {
                continue;
            }
            for (j, &bkj) in b[k].iter().enumerate() {
                c[i][j] += aik * bkj;
            }
        }
    }
    c
}

pub fn assert_commute(a: &Mat, b: &Mat) {
    assert_eq!(mat_mul(a, b), mat_mul(b, a), "Hecke operators must commute");
}

/// Quadratic Hecke recursion at a good prime: T(p)^2 = T(p^2) + Nm(p)·Id.
/// Needs table coverage up to Nm(p)^2.
pub fn certify_recursion(cs: &ClassSet, tabs: &PairTables, pr: &FPrime, t_p: &Mat) {
    let f = cs.alg.f;
    let t_p2 = hecke_theta(cs, tabs, f.mul(pr.gen, pr.gen));
    let square = mat_mul(t_p, t_p);
    let h = cs.len();
    for i in 0..h {
        for j in 0..h {
            let expect = t_p2[i][j] + i64::from(i == j) * pr.norm as i64;
            assert_eq!(square[i][j], expect, "Hecke recursion at norm {}", pr.norm);
        }
    }
}

/// One full row of every Hecke operator at once: builds the pair table
/// `I_{i0} conj(I_j)` for each class j and queries all requested values.
/// Returns `counts[j][k]` for `values[k]`, orbit counts not yet divided by
/// the unit order `u_j`.
pub fn row_counts(cs: &ClassSet, i0: usize, values: &[FElt], norm_bound: i128) -> Vec<Vec<u64>> {
    let f = cs.alg.f;
    let h = cs.len();
    let mut out = Vec::with_capacity(h);
    for j in 0..h {
        let (prod, gamma) = pair_lattice(&cs.alg, &cs.ideals[i0], &cs.ideals[j]);
        let tab = ThetaTable::build(&cs.alg, &prod.rows_i128(), gamma, norm_bound);
        out.push(values.iter().map(|&v| tab.value_count(&f, v)).collect());
        eprintln!("    pair table {}/{} done", j + 1, h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classset::class_set;
    use crate::field::{eichler_mass, QuadRing};
    use crate::order::{maximal_order, primes_over};
    use crate::quat::Alg;

    /// Class number one: every Hecke matrix is the 1x1 matrix [Nm(p)+1], so
    /// the theta route reproduces the Eisenstein bound and both routes agree.
    /// This pins the unit-orbit normalization against the mass formula.
    #[test]
    fn class_number_one_matches_eisenstein() {
        let f = QuadRing::from_disc(12);
        let alg = Alg { f };
        let omax = maximal_order(&alg);
        let neighbor = primes_over(&f, 3).remove(0);
        let mass = eichler_mass(12, &[]);
        let cs = class_set(&alg, &omax, &neighbor, &mass);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs.units, vec![12]);

        let tabs = PairTables::build(&cs, 700);
        certify_identity(&cs, &tabs);
        let mut checked = 0;
        for p in [2u64, 3, 5, 11, 13, 23] {
            for pr in primes_over(&f, p) {
                if pr.norm > 26 {
                    continue;
                }
                let t = certify_good_prime(&cs, &tabs, &pr);
                assert_eq!(t, vec![vec![pr.norm as i64 + 1]]);
                certify_recursion(&cs, &tabs, &pr, &t);
                checked += 1;
            }
        }
        assert!(checked >= 6);
    }
}
