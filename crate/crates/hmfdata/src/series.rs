//! Dirichlet coefficients of twisted L-series.
//!
//! For a fixed real embedding tau of the Hecke field and a quadratic
//! character chi on prime ideals, the coefficient at n is
//! lambda_n = sum over ideals of norm n of chi(I) tau(a_I), where a_I
//! extends the eigenvalues multiplicatively with the Hecke recursion
//! a_{p^{k+1}} = a_p a_{p^k} - Nm(p) a_{p^{k-1}} at good primes and
//! the degenerate rule a_{p^k} = a_p^k at primes dividing the level.

use std::collections::HashMap;

use rug::{Float, Rational};

use numfield::{ideals_of_norm_upto, PrimeIdeal};

use crate::{HmfError, NewformRecord};

/// Coefficients lambda_1..lambda_X of the chi-twisted Dirichlet
/// series of the record, at the given real embedding of the Hecke
/// field.  `chi` must take values in {-1, 0, +1}; primes dividing the
/// character modulus must be sent to 0.
pub fn dirichlet_coefficients<C>(
    rec: &NewformRecord,
    chi: C,
    embedding: usize,
    x: u64,
    prec: u32,
) -> Result<Vec<Float>, HmfError>
where
    C: Fn(&PrimeIdeal) -> i32,
{
    if embedding >= rec.hecke.degree {
        return Err(HmfError::BadEmbeddingIndex(embedding));
    }
    let ideals = ideals_of_norm_upto(&rec.base, x)?;

    // per-prime maximal exponent appearing below x
    let mut max_exp: HashMap<(u64, u32), (PrimeIdeal, u32)> = HashMap::new();
    for (factors, _) in ideals.iter() {
        for (pr, e) in factors {
            let slot = max_exp
                .entry((pr.p, pr.index))
                .or_insert_with(|| ((*pr).clone(), 0));
            slot.1 = slot.1.max(e);
        }
    }

    // coverage: the table must know a_p at every needed prime
    let mut missing_norm: Option<u64> = None;
    for (pr, _) in max_exp.values() {
        if !rec.eigen.contains_key(&(pr.p, pr.index)) {
            missing_norm = Some(match missing_norm {
                Some(m) => m.min(pr.norm),
                None => pr.norm,
            });
        }
    }
    if let Some(norm) = missing_norm {
        return Err(HmfError::CoverageGap { norm });
    }

    // prime-power eigenvalues, embedded, with the character value
    let mut table: HashMap<(u64, u32), (i32, Vec<Float>)> = HashMap::new();
    for (key, (pr, emax)) in &max_exp {
        let c = chi(pr);
        assert!((-1..=1).contains(&c), "character value out of range");
        let ap = &rec.eigen[key].ap;
        let degenerate = rec.divides_level(pr);
        let mut powers = vec![rec.hecke.one(), ap.clone()];
        for k in 1..*emax as usize {
            let next = if degenerate {
                rec.hecke.mul(ap, &powers[k])
            } else {
                let t = rec.hecke.mul(ap, &powers[k]);
                let back = rec.hecke.scale(&powers[k - 1], &Rational::from(pr.norm));
                rec.hecke.sub(&t, &back)
            };
            powers.push(next);
        }
        let mut vals = Vec::with_capacity(powers.len());
        for a in &powers {
            vals.push(rec.hecke.embed(a, prec)?[embedding].clone());
        }
        table.insert(*key, (c, vals));
    }

    let mut out = vec![Float::with_val(prec, 0); x as usize];
    for (factors, n) in ideals.iter() {
        let mut sign = 1i32;
        for (pr, e) in &factors {
            let c = table[&(pr.p, pr.index)].0;
            if c == 0 {
                sign = 0;
                break;
            }
            if c == -1 && e % 2 == 1 {
                sign = -sign;
            }
        }
        if sign == 0 {
            continue;
        }
        let mut term = Float::with_val(prec, sign);
        for (pr, e) in &factors {
            let (_, vals) = &table[&(pr.p, pr.index)];
            term *= &vals[*e as usize];
        }
        out[(n - 1) as usize] += term;
    }
    Ok(out)
}
