//! Fixture generation drivers.
//!
//! Each driver builds the certified ideal-class module for its level,
//! extracts the exact Hecke eigensystems of interest, evaluates one full
//! eigenvector row of the Brandt pairing per prime of the base field up to
//! the requested norm bound, validates the arithmetic anchors (level
//! eigenvalues, twist relations, descent congruences), and writes fixture
//! files in the newform table format.
//!
//! Everything numerically discovered is re-certified exactly before it is
//! written: eigenvalue rows come from exact rational arithmetic on orbit
//! counts, spot primes are checked against the certified Hecke matrices,
//! and the files are reloaded through the validating parser before the
//! driver reports success.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use numfield::maps::{automorphisms, residue_map_mod2, NfAutomorphism, ResidueMapMod2};
use numfield::primes::{prime_split, sieve_primes, SplitType};
use numfield::{NFElem, NumberField};
use rug::{Integer, Rational};

use hmfdata::{load_newform, write_newform_file, FixtureHeader, FixtureRow};

use crate::brandt::{self, Mat, PairTables};
use crate::classset::{class_set, ClassSet};
use crate::eigen::{self, ExactSystem};
use crate::field::{eichler_mass, FElt, QuadRing};
use crate::order::{eichler_order, maximal_order, primes_over, FPrime};
use crate::quat::Alg;

/// Norm coverage of the shared pair tables used for the certification
/// battery; must exceed the squared norm of every recursion-checked prime.
const SMALL_TABLE_BOUND: i128 = 700;

/// The certified Hecke module at a level: class set, pair tables, and the
/// exact Brandt matrices at the certification primes.
pub struct BrandtModule {
    pub alg: Alg,
    pub cs: ClassSet,
    pub tabs: PairTables,
    /// Matrices at good primes, certified by dual-route agreement.
    pub good: Vec<(FPrime, Mat)>,
    /// Matrices at the level primes (theta route, row sums Nm p).
    pub level: Vec<(FPrime, Mat)>,
}

/// Build the class set of an Eichler order and certify its Hecke module.
///
/// `level_ps` lists the rational primes under the level (each must have a
/// unique prime of the field above it here), `neighbor_p` the rational
/// prime used for the neighbor sweep that discovers the classes, and
/// `good_ps` the rational primes whose Hecke matrices are wanted; every
/// prime of the field above a good p is certified by both routes, and the
/// quadratic recursion is checked whenever the table bound covers it.
pub fn brandt_module(disc: i64, level_ps: &[u64], neighbor_p: u64, good_ps: &[u64]) -> BrandtModule {
    let f = QuadRing::from_disc(disc);
    let alg = Alg::new(f);
    let omax = maximal_order(&alg);
    let level: Vec<FPrime> = level_ps
        .iter()
        .map(|&p| {
            let v = primes_over(&f, p);
            assert_eq!(v.len(), 1, "level prime {p} must be inert or ramified");
            v[0]
        })
        .collect();
    let order = eichler_order(&alg, &omax, &level);
    let level_norms: Vec<u64> = level.iter().map(|pr| pr.norm).collect();
    let mass = eichler_mass(disc, &level_norms);
    let neighbor = primes_over(&f, neighbor_p)[0];
    let cs = class_set(&alg, &order, &neighbor, &mass);
    eprintln!(
        "disc {disc}, level norm {}: {} ideal classes (mass {mass})",
        level_norms.iter().product::<u64>(),
        cs.len()
    );
    let tabs = PairTables::build(&cs, SMALL_TABLE_BOUND);
    brandt::certify_identity(&cs, &tabs);

    let mut good = Vec::new();
    for &p in good_ps {
        for pr in primes_over(&f, p) {
            let m = brandt::certify_good_prime(&cs, &tabs, &pr);
            let n2 = (pr.norm as i128) * (pr.norm as i128);
            if n2 <= SMALL_TABLE_BOUND {
                brandt::certify_recursion(&cs, &tabs, &pr, &m);
            }
            good.push((pr, m));
        }
    }
    let mut levelm = Vec::new();
    for pr in &level {
        levelm.push((*pr, brandt::certify_level_prime(&cs, &tabs, pr)));
    }
    let all: Vec<&Mat> = good
        .iter()
        .map(|(_, m)| m)
        .chain(levelm.iter().map(|(_, m)| m))
        .collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            brandt::assert_commute(all[i], all[j]);
        }
    }
    eprintln!(
        "  certified {} good and {} level Hecke matrices (dual route, commuting)",
        good.len(),
        levelm.len()
    );
    BrandtModule { alg, cs, tabs, good, level: levelm }
}

/// Every prime of the base ring with norm up to `bound`, level primes
/// included, sorted by (norm, p, omega residue).
pub fn primes_to_norm(f: &QuadRing, bound: u64) -> Vec<FPrime> {
    let mut out = Vec::new();
    for p in sieve_primes(bound) {
        for pr in primes_over(f, p) {
            if pr.norm <= bound {
                out.push(pr);
            }
        }
    }
    out.sort_by_key(|pr| (pr.norm, pr.p, pr.omega_r.unwrap_or(0)));
    out
}

/// Index of the Galois-conjugate prime within the same list: split primes
/// map to their partner above the same p, inert and ramified to themselves.
fn conj_index(fprimes: &[FPrime], k: usize) -> usize {
    let pr = &fprimes[k];
    if pr.norm == pr.p && !pr.ramified {
        fprimes
            .iter()
            .position(|q| q.p == pr.p && q.omega_r != pr.omega_r)
            .expect("conjugate prime missing from the list")
    } else {
        k
    }
}

/// Evaluate one eigensystem on every queried value: the row `a(m) =
/// sum_j (count_{i0 j}(m) / u_j) * v_j / v_{i0}` in exact arithmetic.
/// Every entry must come out integral.
fn eigen_rows(
    module: &BrandtModule,
    nf: &NumberField,
    sys: &ExactSystem,
    i0: usize,
    counts: &[Vec<u64>],
) -> Vec<NFElem> {
    let h = module.cs.len();
    assert!(!sys.vec[i0].is_zero(), "reference coordinate vanishes");
    let weights: Vec<Option<NFElem>> = (0..h)
        .map(|j| {
            if sys.vec[j].is_zero() {
                None
            } else {
                Some(nf.div(&sys.vec[j], &sys.vec[i0]).expect("weight division"))
            }
        })
        .collect();
    let nvals = counts[0].len();
    (0..nvals)
        .map(|k| {
            let mut acc = NFElem::zero(nf.degree);
            for (j, w) in weights.iter().enumerate() {
                let Some(w) = w else { continue };
                let c = counts[j][k];
                if c == 0 {
                    continue;
                }
                let q = Rational::from((Integer::from(c), Integer::from(module.cs.units[j])));
                acc = nf.add(&acc, &nf.scale(w, &q));
            }
            assert!(acc.is_integral(), "non-integral eigenvalue at row {k}");
            acc
        })
        .collect()
}

/// Check the mod-2 descent congruence over a full row table: the residue of
/// the conjugate-prime eigenvalue must be the fourth power of the residue
/// of the prime's own eigenvalue, at every prime not dividing the level.
fn mod2_descent_holds(
    rmap: &ResidueMapMod2,
    fprimes: &[FPrime],
    rows: &[NFElem],
    level_ps: &[u64],
) -> bool {
    let mut failures = 0usize;
    for (k, pr) in fprimes.iter().enumerate() {
        if level_ps.contains(&pr.p) {
            continue;
        }
        let a = rmap.apply(&rows[k]).expect("eigenvalue integral at 2");
        let b = rmap.apply(&rows[conj_index(fprimes, k)]).expect("eigenvalue integral at 2");
        if b != a.pow(4) {
            failures += 1;
        }
    }
    failures == 0
}

/// Search for a nonidentity coefficient-field automorphism carrying every
/// eigenvalue to its conjugate-prime eigenvalue (level rows included;
/// their eigenvalues are rational and their primes self-conjugate).
fn exact_descent_witness(
    nf: &NumberField,
    fprimes: &[FPrime],
    rows: &[NFElem],
) -> Option<NfAutomorphism> {
    let auts = automorphisms(nf).expect("automorphism search");
    for t in auts {
        if t.is_identity() {
            continue;
        }
        let ok = (0..fprimes.len()).all(|k| t.apply(nf, &rows[k]) == rows[conj_index(fprimes, k)]);
        if ok {
            return Some(t);
        }
    }
    None
}

/// Distinct residues of the good-prime eigenvalues in F16.
fn residue_set_size(
    rmap: &ResidueMapMod2,
    fprimes: &[FPrime],
    rows: &[NFElem],
    level_ps: &[u64],
) -> usize {
    let mut set = HashSet::new();
    for (k, pr) in fprimes.iter().enumerate() {
        if level_ps.contains(&pr.p) {
            continue;
        }
        set.insert(rmap.apply(&rows[k]).expect("eigenvalue integral at 2"));
    }
    set.len()
}

/// Write one fixture file and reload it through the validating parser.
#[allow(clippy::too_many_arguments)]
fn write_and_reload(
    out_dir: &Path,
    filename: &str,
    label: &str,
    comment: &str,
    disc: i64,
    level_gen: FElt,
    level_norm: u64,
    min_poly: &[i64],
    bound: u64,
    fprimes: &[FPrime],
    rows: &[NFElem],
) -> PathBuf {
    let header = FixtureHeader {
        base_field_disc: disc,
        level_gen: [
            i64::try_from(level_gen.a).expect("level generator fits"),
            i64::try_from(level_gen.b).expect("level generator fits"),
        ],
        level_norm,
        hecke_min_poly: min_poly.to_vec(),
        bound,
        label: Some(label.to_string()),
        comment: Some(comment.to_string()),
    };
    let frows: Vec<FixtureRow> = fprimes
        .iter()
        .zip(rows)
        .map(|(pr, a)| FixtureRow {
            p: pr.p,
            norm: pr.norm,
            gen: [
                i64::try_from(pr.gen.a).expect("prime generator fits"),
                i64::try_from(pr.gen.b).expect("prime generator fits"),
            ],
            ap: a.coeffs.clone(),
        })
        .collect();
    let path = out_dir.join(filename);
    write_newform_file(&path, &header, &frows).expect("fixture written");
    let rec = load_newform(&path).expect("fixture reloads and validates");
    assert_eq!(rec.label, label);
    assert_eq!(rec.eigen.len(), rows.len(), "reload row count");
    eprintln!("  wrote {} ({} rows)", path.display(), rows.len());
    path
}

/// Group the screened candidates at a seed prime by characteristic
/// polynomial and extract one exact eigensystem per full Galois orbit.
/// Returns the extracted systems when exactly `expect` orbits survive.
fn systems_at_seed(nf: &NumberField, b: &Mat, norm: u64, expect: usize) -> Option<Vec<ExactSystem>> {
    let w = 2.0 * (norm as f64).sqrt();
    let cands = eigen::screened_candidates(nf, b, w);
    let mut groups: Vec<(Vec<Rational>, Vec<NFElem>)> = Vec::new();
    for c in cands {
        let key = nf.charpoly(&c);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(c),
            None => groups.push((key, vec![c])),
        }
    }
    let mut systems = Vec::new();
    for (_, mut group) in groups {
        if group.len() != nf.degree {
            continue; // not a full orbit of a degree-g primitive element
        }
        group.sort_by(|x, y| x.coeffs.cmp(&y.coeffs));
        if let Some(sys) = eigen::extract_system(b, nf, &group[0]) {
            systems.push(sys);
        }
    }
    if systems.len() == expect {
        Some(systems)
    } else {
        eprintln!(
            "  seed of norm {norm}: {} exact systems (wanted {expect}); trying next seed",
            systems.len()
        );
        None
    }
}

/// Locate the fixture-row index of a certification prime.
fn row_index(fprimes: &[FPrime], pr: &FPrime) -> usize {
    fprimes
        .iter()
        .position(|q| q.p == pr.p && q.norm == pr.norm && q.omega_r == pr.omega_r)
        .expect("certification prime inside the fixture range")
}

/// Generate the twin quartic-coefficient fixtures at level norm 578 over
/// the discriminant-12 field and return the written paths.
///
/// The two systems are quadratic twists of each other by the narrow class
/// character; the one with eigenvalue +1 at the ramified level prime above
/// 2 is labeled c, its twist d.
pub fn generate_578(bound: u64, out_dir: &Path) -> Vec<PathBuf> {
    assert!(bound >= 841, "need at least norm 841 to reach the inert prime above 29");
    let module = brandt_module(12, &[2, 17], 3, &[3, 11, 5, 7, 13, 23]);
    let f = module.alg.f;
    let nf = NumberField::new(&[1, 1, -3, -1, 1]).expect("quartic coefficient field");

    // Seed search at narrow-character-inert primes (the twins differ there).
    let mut pair: Option<Vec<ExactSystem>> = None;
    for sp in [11u64, 3, 23] {
        let (pr, m) = module
            .good
            .iter()
            .find(|(pr, _)| pr.p == sp)
            .expect("seed prime among certified matrices");
        assert_eq!(f.chi_narrow(pr.gen), -1, "seed must separate the twist pair");
        pair = systems_at_seed(&nf, m, pr.norm, 2);
        if pair.is_some() {
            eprintln!("  eigensystem pair extracted at the seed of norm {}", pr.norm);
            break;
        }
    }
    let mut pair = pair.expect("no seed prime separated the quartic pair");
    let s1 = pair.pop().unwrap();
    let s0 = pair.pop().unwrap();

    // Label by the eigenvalue at the level prime above 2.
    let one = NFElem::one(nf.degree);
    let minus_one = nf.neg(&one);
    let u2 = &module.level[0];
    let u17 = &module.level[1];
    let e0 = s0.certified_eigenvalue(&nf, &u2.1);
    let e1 = s1.certified_eigenvalue(&nf, &u2.1);
    assert!(e0 == one || e0 == minus_one, "level eigenvalue above 2 is a sign");
    assert_eq!(e1, nf.neg(&e0), "twist pair has opposite signs above 2");
    let (sys_c, sys_d) = if e0 == one { (s0, s1) } else { (s1, s0) };
    for s in [&sys_c, &sys_d] {
        assert_eq!(s.certified_eigenvalue(&nf, &u17.1), minus_one, "eigenvalue -1 above 17");
    }
    // Twist relation against the certified matrices at every good prime.
    for (pr, m) in &module.good {
        let ac = sys_c.certified_eigenvalue(&nf, m);
        let ad = sys_d.certified_eigenvalue(&nf, m);
        assert_eq!(ad, nf.scale(&ac, &Rational::from(f.chi_narrow(pr.gen))));
    }

    // One orbit-count sweep serves both systems.
    let i0 = (0..module.cs.len())
        .find(|&i| !sys_c.vec[i].is_zero() && !sys_d.vec[i].is_zero())
        .expect("common nonzero coordinate");
    let fprimes = primes_to_norm(&f, bound);
    let values: Vec<FElt> = fprimes.iter().map(|pr| pr.gen).collect();
    eprintln!("  counting norms in {} pair lattices up to norm {bound}", module.cs.len());
    let counts = brandt::row_counts(&module.cs, i0, &values, bound as i128);
    let rows_c = eigen_rows(&module, &nf, &sys_c, i0, &counts);
    let rows_d = eigen_rows(&module, &nf, &sys_d, i0, &counts);

    // Cross-validate the assembled rows against every certified matrix.
    for (pr, m) in module.good.iter().chain(module.level.iter()) {
        let k = row_index(&fprimes, pr);
        assert_eq!(rows_c[k], sys_c.certified_eigenvalue(&nf, m), "row/matrix agreement (c)");
        assert_eq!(rows_d[k], sys_d.certified_eigenvalue(&nf, m), "row/matrix agreement (d)");
    }
    // Twist relation across the whole table.
    for (k, pr) in fprimes.iter().enumerate() {
        assert_eq!(rows_d[k], nf.scale(&rows_c[k], &Rational::from(f.chi_narrow(pr.gen))));
    }
    // The eigenvalue at the inert prime above 29 satisfies x^2 + 45x + 505.
    let k29 = row_index(&fprimes, &primes_over(&f, 29)[0]);
    for rows in [&rows_c, &rows_d] {
        let a = &rows[k29];
        let z = nf.add(
            &nf.add(&nf.mul(a, a), &nf.scale(a, &Rational::from(45))),
            &NFElem::from_rational(Rational::from(505), nf.degree),
        );
        assert!(z.is_zero(), "quadratic relation at the prime above 29");
    }

    // Descent validation on the full tables.
    let rmap = residue_map_mod2(&nf).expect("2 inert in the coefficient field");
    let level_ps = [2u64, 17];
    for rows in [&rows_c, &rows_d] {
        assert!(mod2_descent_holds(&rmap, &fprimes, rows, &level_ps), "mod-2 descent");
        let t = exact_descent_witness(&nf, &fprimes, rows).expect("exact descent witness");
        let t2 = t.apply(&nf, &t.image);
        assert_eq!(t2, nf.gen(), "descent witness is an involution");
    }
    let residues = residue_set_size(&rmap, &fprimes, &rows_c, &level_ps);
    eprintln!("  residue image size {residues}/16 at bound {bound}");
    if bound >= 80000 {
        assert_eq!(residues, 16, "trace residues cover F16");
    }

    let level_gen = f.canon(f.mul(u2.0.gen, u17.0.gen));
    assert_eq!(f.norm(level_gen).unsigned_abs(), 578);
    let comment_c = "a_p computed on the ideal-class module of an Eichler order of \
                     level (1+w)*17, w^2 = 3, in the definite quaternion algebra \
                     (-1,-1) over Q(w); class set certified by the Eichler mass \
                     formula, Hecke matrices by theta-count/neighbor double route, \
                     eigenvalues by exact linear algebra over the coefficient field";
    let comment_d = "quadratic twist of the companion c table by the narrow class \
                     character of Q(w), w^2 = 3; computed from the same certified \
                     ideal-class module and eigenbasis";
    let min_poly = [1i64, 1, -3, -1, 1];
    let pc = write_and_reload(
        out_dir,
        "hmf_2.2.12.1_578.1_c.jsonl",
        "2.2.12.1-578.1-c",
        comment_c,
        12,
        level_gen,
        578,
        &min_poly,
        bound,
        &fprimes,
        &rows_c,
    );
    let pd = write_and_reload(
        out_dir,
        "hmf_2.2.12.1_578.1_d.jsonl",
        "2.2.12.1-578.1-d",
        comment_d,
        12,
        level_gen,
        578,
        &min_poly,
        bound,
        &fprimes,
        &rows_d,
    );
    vec![pc, pd]
}

/// The three monic quartics irreducible over F2, low-to-high coefficients.
fn irreducible_quartic_mod2(m: &[Integer]) -> bool {
    let bits: Vec<u8> = m.iter().map(|c| (c.clone() % 2i32 != 0) as u8).collect();
    let table: [[u8; 5]; 3] = [
        [1, 1, 0, 0, 1],
        [1, 0, 0, 1, 1],
        [1, 1, 1, 1, 1],
    ];
    table.iter().any(|t| bits == t)
}

/// Generate the quartic-coefficient fixture at level norm 99 over the
/// discriminant-77 field and return the written path.
///
/// The coefficient field is not known in advance: quartic spectral orbits
/// of the Hecke matrix at the ramified prime above 7 are recognized
/// exactly, and the fixture is the unique multiplicity-one system with 2
/// inert in its coefficient field whose eigenvalue table satisfies the
/// mod-2 descent congruence without an exact descent witness.
pub fn generate_99(bound: u64, out_dir: &Path) -> Vec<PathBuf> {
    assert!(bound >= 121, "need the level primes and a usable prime range");
    let module = brandt_module(77, &[3, 11], 7, &[7, 2, 13, 5]);
    let f = module.alg.f;
    let (b7pr, b7) = module
        .good
        .iter()
        .find(|(pr, _)| pr.p == 7)
        .expect("ramified prime above 7 among certified matrices");
    assert_eq!(b7pr.norm, 7);

    let (_, orbits) = eigen::spectrum_orbits(b7, &module.cs.units, 4);
    for o in &orbits {
        eprintln!(
            "  orbit: degree {} multiplicity {} minpoly {:?}",
            o.minpoly.len() - 1,
            o.multiplicity,
            o.minpoly
        );
    }

    let fprimes = primes_to_norm(&f, bound);
    let values: Vec<FElt> = fprimes.iter().map(|pr| pr.gen).collect();
    let level_ps = [3u64, 11];

    struct Candidate {
        min_poly: Vec<i64>,
        rows: Vec<NFElem>,
    }
    let mut passing: Vec<Candidate> = Vec::new();
    for o in &orbits {
        if o.minpoly.len() != 5 || o.multiplicity != 1 {
            continue;
        }
        if !irreducible_quartic_mod2(&o.minpoly) {
            eprintln!("  quartic orbit rejected: 2 not inert ({:?})", o.minpoly);
            continue;
        }
        let coeffs: Vec<i64> = o
            .minpoly
            .iter()
            .map(|c| c.to_i64().expect("small minimal polynomial"))
            .collect();
        let lf = NumberField::new(&coeffs).expect("irreducible mod 2 certifies the field");
        if lf.real_embeddings(64).is_err() {
            eprintln!("  quartic orbit rejected: not totally real ({coeffs:?})");
            continue;
        }
        let (ty, _) = prime_split(&lf, 2).expect("splitting of 2");
        assert!(matches!(ty, SplitType::Inert));
        let sys = eigen::extract_system(b7, &lf, &NFElem::gen(4))
            .expect("multiplicity-one quartic orbit has a clean eigensystem");
        // Level eigenvalues are signs.
        let one = NFElem::one(4);
        for (_, m) in &module.level {
            let e = sys.certified_eigenvalue(&lf, m);
            assert!(e == one || e == lf.neg(&one), "level eigenvalue is a sign");
        }
        eprintln!("  counting norms in {} pair lattices up to norm {bound}", module.cs.len());
        let counts = brandt::row_counts(&module.cs, sys.pivot, &values, bound as i128);
        let rows = eigen_rows(&module, &lf, &sys, sys.pivot, &counts);
        for (pr, m) in module.good.iter().chain(module.level.iter()) {
            let k = row_index(&fprimes, pr);
            assert_eq!(rows[k], sys.certified_eigenvalue(&lf, m), "row/matrix agreement");
        }
        let rmap = residue_map_mod2(&lf).expect("2 inert");
        let mod2 = mod2_descent_holds(&rmap, &fprimes, &rows, &level_ps);
        let exact = exact_descent_witness(&lf, &fprimes, &rows).is_some();
        eprintln!("  quartic {coeffs:?}: mod-2 descent {mod2}, exact witness {exact}");
        if mod2 && !exact {
            passing.push(Candidate { nf: lf, min_poly: coeffs, rows });
        }
    }
    assert_eq!(
        passing.len(),
        1,
        "exactly one quartic system must pass the descent filter"
    );
    let j = passing.pop().unwrap();
    let _ = &j.nf;

    let level_gen = f.canon(f.mul(module.level[0].0.gen, module.level[1].0.gen));
    assert_eq!(f.norm(level_gen).unsigned_abs(), 99);
    let comment = "a_p computed on the ideal-class module of an Eichler order of \
                   level 3*p11 in the definite quaternion algebra (-1,-1) over \
                   Q(w), w^2 = w + 19; coefficient field recognized from the exact \
                   characteristic polynomial of the Hecke matrix at the ramified \
                   prime above 7 and certified by exact division; selected as the \
                   unique quartic system whose table satisfies the mod-2 descent \
                   congruence with no exact descent witness";
    let pj = write_and_reload(
        out_dir,
        "hmf_2.2.77.1_99.1_j.jsonl",
        "2.2.77.1-99.1-j",
        comment,
        77,
        level_gen,
        99,
        &j.min_poly,
        bound,
        &fprimes,
        &j.rows,
    );
    vec![pj]
}
