//! Permutations of {0..n-1} and fully enumerated permutation groups.
//!
//! Groups here are tiny (the main one has 8160 elements), so the
//! element set is stored explicitly; normality, simplicity and cycle
//! statistics then reduce to exact finite computations.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::FfError;

/// Cycle type: partition of the degree, parts sorted descending.
pub type Partition = Vec<u32>;

/// A permutation in image form: `images[i]` is the image of i.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn new(images: Vec<u16>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&i| {
                let ok = (i as usize) < images.len() && !seen[i as usize];
                if ok {
                    seen[i as usize] = true;
                }
                ok
            })
        });
        Perm(images)
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n as u16).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> &[u16] {
        &self.0
    }

    /// (self o other)(x) = self(other(x)).
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u16;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    /// Cycle type as a descending partition of the degree.
    pub fn cycle_type(&self) -> Partition {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut parts = vec![];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.0[cur] as usize;
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }
}

/// A permutation group stored by full enumeration.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub degree: usize,
    pub gens: Vec<Perm>,
    pub elements: Vec<Perm>,
}

/// Enumeration cap: full element storage is only sensible for small
/// groups (the pipeline's largest has order 8160).
pub const GROUP_CAP: usize = 1_000_000;

impl PermGroup {
    /// Close the generator set under composition (breadth-first).
    pub fn from_gens(degree: usize, gens: Vec<Perm>) -> Result<Self, FfError> {
        for g in &gens {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
        }
        let mut seen: HashSet<Perm> = HashSet::new();
        let mut queue = VecDeque::new();
        let id = Perm::identity(degree);
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(cur) = queue.pop_front() {
            for g in &gens {
                let next = g.compose(&cur);
                if !seen.contains(&next) {
                    if seen.len() >= GROUP_CAP {
                        return Err(FfError::GroupTooLarge(GROUP_CAP));
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort_unstable();
        Ok(PermGroup {
            degree,
            gens,
            elements,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_transitive(&self) -> bool {
        let mut reach = vec![false; self.degree];
        reach[0] = true;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            for g in &self.gens {
                let j = g.apply(i);
                if !reach[j] {
                    reach[j] = true;
                    stack.push(j);
                }
            }
        }
        reach.into_iter().all(|b| b)
    }

    /// Order of the stabilizer of a point (by direct count).
    pub fn stabilizer_order(&self, point: usize) -> usize {
        self.elements
            .iter()
            .filter(|p| p.apply(point) == point)
            .count()
    }

    /// Derived subgroup: normal closure of the commutators of the
    /// generator pairs.
    pub fn derived_subgroup(&self) -> Result<PermGroup, FfError> {
        let mut comms = vec![];
        for a in &self.gens {
            for b in &self.gens {
                let c = a
                    .compose(b)
                    .compose(&a.inverse())
                    .compose(&b.inverse());
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    /// Smallest normal subgroup of `self` containing `seed`.
    ///
    /// A subgroup H is normal in G iff g h g^{-1} lies in H for every
    /// generator g of G and generator h of H, so grow the generating
    /// set with missing conjugates until that holds.
    pub fn normal_closure(&self, seed: &[Perm]) -> Result<PermGroup, FfError> {
        let mut gens: Vec<Perm> = seed.to_vec();
        loop {
            let sub = PermGroup::from_gens(self.degree, gens.clone())?;
            let mut added = false;
            for g in &self.gens {
                let gi = g.inverse();
                for h in &sub.gens {
                    let conj = g.compose(h).compose(&gi);
                    if !sub.contains(&conj) {
                        gens.push(conj);
                        added = true;
                    }
                }
            }
            if !added {
                return Ok(sub);
            }
        }
    }

    /// Conjugacy class representatives (orbit partition under
    /// conjugation by generators).
    pub fn conjugacy_class_reps(&self) -> Vec<Perm> {
        let index: HashMap<&Perm, usize> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut seen = vec![false; self.elements.len()];
        let mut reps = vec![];
        for start in 0..self.elements.len() {
            if seen[start] {
                continue;
            }
            reps.push(self.elements[start].clone());
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                for g in &self.gens {
                    let conj = g.compose(&self.elements[i]).compose(&g.inverse());
                    let j = index[&conj];
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        reps
    }

    /// Exact simplicity test by normal-closure enumeration over
    /// conjugacy class representatives.
    pub fn is_simple(&self) -> Result<bool, FfError> {
        if self.order() <= 1 {
            return Ok(false);
        }
        for rep in self.conjugacy_class_reps() {
            if rep.is_identity() {
                continue;
            }
            let nc = self.normal_closure(std::slice::from_ref(&rep))?;
            if nc.order() != self.order() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Set of cycle types arising in G.
pub fn cycle_type_set(g: &PermGroup) -> BTreeSet<Partition> {
    g.elements.iter().map(|p| p.cycle_type()).collect()
}

/// Cycle types with multiplicities.
pub fn cycle_type_multiset(g: &PermGroup) -> BTreeMap<Partition, usize> {
    let mut out = BTreeMap::new();
    for p in &g.elements {
        *out.entry(p.cycle_type()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod unit {
    use super::*;

    #[test]
    fn trivial_group_cycle_types() {
        let g = PermGroup::from_gens(17, vec![]).unwrap();
        assert_eq!(g.order(), 1);
        let set = cycle_type_set(&g);
        assert_eq!(set.len(), 1);
        assert!(set.contains(&vec![1u32; 17]));
    }

    #[test]
    fn seventeen_cycle_powers() {
        let mut imgs: Vec<u16> = (0..17).map(|i| ((i + 1) % 17) as u16).collect();
        let c17 = Perm::new(std::mem::take(&mut imgs));
        let g = PermGroup::from_gens(17, vec![c17]).unwrap();
        assert_eq!(g.order(), 17);
        let set = cycle_type_set(&g);
        assert!(set.contains(&vec![17u32]));
        assert!(set.contains(&vec![1u32; 17]));
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn s3_derived_is_a3() {
        let s = Perm::new(vec![1, 0, 2]);
        let c = Perm::new(vec![1, 2, 0]);
        let s3 = PermGroup::from_gens(3, vec![s, c]).unwrap();
        assert_eq!(s3.order(), 6);
        let a3 = s3.derived_subgroup().unwrap();
        assert_eq!(a3.order(), 3);
        assert!(!a3.is_simple().unwrap() || a3.order() == 3);
        // A3 is simple (prime order)
        assert!(a3.is_simple().unwrap());
    }
}
