//! Finite partial orders with a least element.
//!
//! A finite poset is an algebraic domain in which every element is compact,
//! so the way-below relation coincides with the order and the Scott-open sets
//! are exactly the upper sets.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// Default ceiling on poset size for exponential enumerations.
pub const ORACLE_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("duplicate element {0}")]
    DuplicateElement(String),
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("poset has {size} elements, above the enumeration bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("not an upper set")]
    NotUpperSet,
}

/// Index of an element in its poset's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub usize);

impl ElementId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    // order[x * n + y] iff x <= y
    order: Vec<bool>,
    bottom: usize,
    fingerprint: u64,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.names == other.names
            && self.order == other.order
            && self.bottom == other.bottom
    }
}

impl Eq for Poset {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub is_chain: bool,
    pub is_bounded_complete: bool,
    pub is_lattice: bool,
}

impl Poset {
    /// Builds a poset from cover (or any generating) pairs; the reflexive
    /// transitive closure is taken and antisymmetry checked afterwards.
    pub fn from_covers<S: AsRef<str>>(
        names: &[S],
        covers: &[(S, S)],
        bottom: &str,
    ) -> Result<Self, PosetError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| PosetError::UnknownElement(s.to_string()));
        let mut order = vec![false; n * n];
        for i in 0..n {
            order[i * n + i] = true;
        }
        for (lo, hi) in covers {
            let (lo, hi) = (lookup(lo.as_ref())?, lookup(hi.as_ref())?);
            order[lo * n + hi] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if order[i * n + k] {
                    for j in 0..n {
                        if order[k * n + j] {
                            order[i * n + j] = true;
                        }
                    }
                }
            }
        }
        let bottom = lookup(bottom)?;
        Self::assemble(names, index, order, bottom)
    }

    /// Builds a poset from a full order matrix, checking reflexivity,
    /// antisymmetry and transitivity directly.
    pub fn from_matrix<S: AsRef<str>>(names: &[S], matrix: Vec<bool>, bottom: &str) -> Result<Self, PosetError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        if matrix.len() != n * n {
            return Err(PosetError::OrderViolation(format!("matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if !matrix[i * n + i] {
                return Err(PosetError::OrderViolation(format!("{} is not below itself", names[i])));
            }
            for j in 0..n {
                for k in 0..n {
                    if matrix[i * n + j] && matrix[j * n + k] && !matrix[i * n + k] {
                        return Err(PosetError::OrderViolation(format!(
                            "not transitive at {} <= {} <= {}",
                            names[i], names[j], names[k]
                        )));
                    }
                }
            }
        }
        let bottom = *index.get(bottom).ok_or_else(|| PosetError::UnknownElement(bottom.to_string()))?;
        Self::assemble(names, index, matrix, bottom)
    }

    fn assemble(
        names: Vec<String>,
        index: HashMap<String, usize>,
        order: Vec<bool>,
        bottom: usize,
    ) -> Result<Self, PosetError> {
        let n = names.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if order[i * n + j] && order[j * n + i] {
                    return Err(PosetError::OrderViolation(format!(
                        "{} and {} are mutually below each other",
                        names[i], names[j]
                    )));
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| !order[bottom * n + x]) {
            return Err(PosetError::OrderViolation(format!("{} is not below {}", names[bottom], names[x])));
        }
        let mut h = DefaultHasher::new();
        names.hash(&mut h);
        order.hash(&mut h);
        bottom.hash(&mut h);
        Ok(Self { names, index, order, bottom, fingerprint: h.finish() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Structural hash; equal posets have equal fingerprints.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = ElementId> + ExactSizeIterator {
        (0..self.len()).map(ElementId)
    }

    pub fn bottom(&self) -> ElementId {
        ElementId(self.bottom)
    }

    pub fn name(&self, x: ElementId) -> &str {
        &self.names[x.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Result<ElementId, PosetError> {
        self.index.get(name).map(|&i| ElementId(i)).ok_or_else(|| PosetError::UnknownElement(name.to_string()))
    }

    pub fn contains(&self, x: ElementId) -> bool {
        x.0 < self.len()
    }

    fn check(&self, x: ElementId) -> Result<(), PosetError> {
        if self.contains(x) { Ok(()) } else { Err(PosetError::UnknownElement(format!("#{}", x.0))) }
    }

    /// Unchecked order test. Panics if either id is out of range.
    pub fn le(&self, x: ElementId, y: ElementId) -> bool {
        self.order[x.0 * self.len() + y.0]
    }

    pub fn leq(&self, x: ElementId, y: ElementId) -> Result<bool, PosetError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.le(x, y))
    }

    /// In a finite poset every element is compact, so `x ≪ y` iff `x ≤ y`.
    pub fn way_below(&self, x: ElementId, y: ElementId) -> Result<bool, PosetError> {
        self.leq(x, y)
    }

    pub fn up_set(&self, x: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&y| self.le(x, y)).collect()
    }

    pub fn down_set(&self, x: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&y| self.le(y, x)).collect()
    }

    pub fn is_maximal(&self, x: ElementId) -> bool {
        self.elements().all(|y| !self.le(x, y) || x == y)
    }

    pub fn maximal_elements(&self) -> Vec<ElementId> {
        self.elements().filter(|&x| self.is_maximal(x)).collect()
    }

    /// Hasse diagram edges `(lower, upper)` in declaration order.
    pub fn covers(&self) -> Vec<(ElementId, ElementId)> {
        let mut out = Vec::new();
        for x in self.elements() {
            for y in self.elements() {
                if x != y
                    && self.le(x, y)
                    && !self.elements().any(|z| z != x && z != y && self.le(x, z) && self.le(z, y))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// `↑A`, the least upper set containing `items`.
    pub fn up_closure(&self, items: impl IntoIterator<Item = ElementId>) -> UpperSet {
        let mut members = vec![false; self.len()];
        for x in items {
            for y in self.elements() {
                if self.le(x, y) {
                    members[y.0] = true;
                }
            }
        }
        UpperSet { members, fingerprint: self.fingerprint }
    }

    /// Wraps `items` as an upper set, failing if it is not upward closed.
    pub fn upper_set(&self, items: impl IntoIterator<Item = ElementId>) -> Result<UpperSet, PosetError> {
        let mut members = vec![false; self.len()];
        for x in items {
            self.check(x)?;
            members[x.0] = true;
        }
        let closed = self
            .elements()
            .filter(|x| members[x.0])
            .all(|x| self.elements().all(|y| !self.le(x, y) || members[y.0]));
        if !closed {
            return Err(PosetError::NotUpperSet);
        }
        Ok(UpperSet { members, fingerprint: self.fingerprint })
    }

    pub fn enumerate_upper_sets(&self) -> Result<Vec<UpperSet>, PosetError> {
        self.enumerate_upper_sets_bounded(ORACLE_BOUND)
    }

    /// Every upward-closed subset, each once, by exhaustive subset scan.
    pub fn enumerate_upper_sets_bounded(&self, bound: usize) -> Result<Vec<UpperSet>, PosetError> {
        let n = self.len();
        if n > bound || n >= 32 {
            return Err(PosetError::TooLarge { size: n, bound });
        }
        let up: Vec<u32> = self
            .elements()
            .map(|x| self.elements().filter(|&y| self.le(x, y)).fold(0u32, |m, y| m | (1 << y.0)))
            .collect();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << n) {
            if (0..n).all(|x| mask & (1 << x) == 0 || up[x] & !mask == 0) {
                let members = (0..n).map(|x| mask & (1 << x) != 0).collect();
                out.push(UpperSet { members, fingerprint: self.fingerprint });
            }
        }
        Ok(out)
    }

    /// Least upper bound of `x` and `y`, if any.
    pub fn join(&self, x: ElementId, y: ElementId) -> Option<ElementId> {
        let ubs: Vec<ElementId> = self.elements().filter(|&z| self.le(x, z) && self.le(y, z)).collect();
        ubs.iter().copied().find(|&z| ubs.iter().all(|&w| self.le(z, w)))
    }

    /// Greatest lower bound of `x` and `y`, if any.
    pub fn meet(&self, x: ElementId, y: ElementId) -> Option<ElementId> {
        let lbs: Vec<ElementId> = self.elements().filter(|&z| self.le(z, x) && self.le(z, y)).collect();
        lbs.iter().copied().find(|&z| lbs.iter().all(|&w| self.le(w, z)))
    }

    pub fn is_chain(&self) -> bool {
        self.elements().all(|x| self.elements().all(|y| self.le(x, y) || self.le(y, x)))
    }

    /// Pairwise meet/join tables. With a bottom element, pairwise bounded
    /// joins give bounded completeness for all finite subsets by induction.
    pub fn classify(&self) -> Classification {
        let mut bounded_complete = true;
        let mut lattice = true;
        for x in self.elements() {
            for y in self.elements() {
                let bounded = self.elements().any(|z| self.le(x, z) && self.le(y, z));
                let join = self.join(x, y);
                if bounded && join.is_none() {
                    bounded_complete = false;
                }
                if join.is_none() || self.meet(x, y).is_none() {
                    lattice = false;
                }
            }
        }
        Classification { is_chain: self.is_chain(), is_bounded_complete: bounded_complete, is_lattice: lattice }
    }

    /// Elements sorted into ascending order. Only meaningful for chains.
    pub fn chain_order(&self) -> Vec<ElementId> {
        let mut xs: Vec<ElementId> = self.elements().collect();
        xs.sort_by_key(|&x| self.down_set(x).len());
        xs
    }

    /// `D_⊥`: the same poset with a fresh least element appended. Existing
    /// element ids stay valid in the lifted poset.
    pub fn lifted(&self, fresh: &str) -> Result<(Poset, ElementId), PosetError> {
        let n = self.len();
        let mut names = self.names.clone();
        names.push(fresh.to_string());
        let index = index_names(&names)?;
        let m = n + 1;
        let mut order = vec![false; m * m];
        for i in 0..n {
            for j in 0..n {
                order[i * m + j] = self.order[i * n + j];
            }
        }
        for j in 0..m {
            order[n * m + j] = true;
        }
        let lifted = Self::assemble(names, index, order, n)?;
        Ok((lifted, ElementId(n)))
    }

    /// A name not yet used in this poset, derived from `base` by adding primes.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = format!("{base}'");
        while self.index.contains_key(&name) {
            name.push('\'');
        }
        name
    }

    /// Graphviz rendering of the Hasse diagram, bottom at the bottom.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph poset {\n  rankdir=BT;\n");
        for x in self.elements() {
            let _ = writeln!(s, "  n{} [label=\"{}\"];", x.0, escape(self.name(x)));
        }
        for (lo, hi) in self.covers() {
            let _ = writeln!(s, "  n{} -> n{};", lo.0, hi.0);
        }
        s.push_str("}\n");
        s
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>, PosetError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(PosetError::DuplicateElement(name.clone()));
        }
    }
    Ok(index)
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// An upward-closed subset of a specific poset; these are the Scott-open sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpperSet {
    members: Vec<bool>,
    fingerprint: u64,
}

impl UpperSet {
    pub fn contains(&self, x: ElementId) -> bool {
        self.members.get(x.0).copied().unwrap_or(false)
    }

    pub fn members(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| ElementId(i))
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn belongs_to(&self, poset: &Poset) -> bool {
        self.fingerprint == poset.fingerprint && self.members.len() == poset.len()
    }

    pub fn union(&self, other: &Self) -> Self {
        let members = self.members.iter().zip(&other.members).map(|(a, b)| *a || *b).collect();
        Self { members, fingerprint: self.fingerprint }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let members = self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect();
        Self { members, fingerprint: self.fingerprint }
    }

    /// Member names, comma separated and braced, in declaration order.
    pub fn display(&self, poset: &Poset) -> String {
        let names: Vec<&str> = self.members().map(|x| poset.name(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::fixtures;

    #[test]
    fn leq_and_way_below_on_diamond() {
        let m4 = fixtures::m4();
        let id = |s| m4.id(s).unwrap();
        assert!(m4.leq(id("bot"), id("top")).unwrap());
        assert!(!m4.leq(id("a"), id("b")).unwrap());
        assert!(m4.leq(id("a"), id("a")).unwrap());
        assert!(m4.way_below(id("bot"), id("a")).unwrap());
        assert!(!m4.way_below(id("top"), id("a")).unwrap());
        assert!(m4.way_below(id("top"), id("top")).unwrap());
        assert_eq!(m4.leq(ElementId(9), id("a")), Err(PosetError::UnknownElement("#9".into())));
    }

    // Independent brute force: test every subset of the ground set for
    // upward closure directly against the order matrix.
    fn brute_upper_sets(p: &Poset) -> Vec<Vec<ElementId>> {
        let n = p.len();
        let mut out = Vec::new();
        for mask in 0..(1usize << n) {
            let has = |x: ElementId| mask >> x.0 & 1 == 1;
            let closed = p.elements().all(|x| !has(x) || p.elements().all(|y| !p.le(x, y) || has(y)));
            if closed {
                out.push(p.elements().filter(|&x| has(x)).collect());
            }
        }
        out
    }

    #[test]
    fn upper_set_counts() {
        let m4 = fixtures::m4();
        let sets: Vec<Vec<ElementId>> =
            m4.enumerate_upper_sets().unwrap().iter().map(|u| u.members().collect()).collect();
        assert_eq!(sets.len(), 6);
        assert_eq!(sets, brute_upper_sets(&m4));
        let names: Vec<String> = m4.enumerate_upper_sets().unwrap().iter().map(|u| u.display(&m4)).collect();
        for expect in ["{}", "{top}", "{a,top}", "{b,top}", "{a,b,top}", "{bot,a,b,top}"] {
            assert!(names.contains(&expect.to_string()), "{expect} missing from {names:?}");
        }

        let one = Poset::from_covers::<&str>(&["x"], &[], "x").unwrap();
        assert_eq!(one.enumerate_upper_sets().unwrap().len(), 2);
        let c3 = fixtures::chain(3);
        assert_eq!(c3.enumerate_upper_sets().unwrap().len(), brute_upper_sets(&c3).len());
        assert_eq!(c3.enumerate_upper_sets().unwrap().len(), 4);
    }

    #[test]
    fn enumeration_bound() {
        let big = fixtures::chain(17);
        assert_eq!(big.enumerate_upper_sets(), Err(PosetError::TooLarge { size: 17, bound: 16 }));
    }

    #[test]
    fn classify_examples() {
        let m4 = fixtures::m4();
        assert_eq!(
            m4.classify(),
            Classification { is_chain: false, is_bounded_complete: true, is_lattice: true }
        );
        assert_eq!(
            fixtures::chain(3).classify(),
            Classification { is_chain: true, is_bounded_complete: true, is_lattice: true }
        );
        let vee = Poset::from_covers(&["bot", "a", "b"], &[("bot", "a"), ("bot", "b")], "bot").unwrap();
        assert_eq!(
            vee.classify(),
            Classification { is_chain: false, is_bounded_complete: true, is_lattice: false }
        );
        // Two incomparable upper bounds for {a, b}: not bounded complete.
        let bowtie = Poset::from_covers(
            &["bot", "a", "b", "c", "d"],
            &[("bot", "a"), ("bot", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
            "bot",
        )
        .unwrap();
        assert!(!bowtie.classify().is_bounded_complete);
    }

    #[test]
    fn construction_rejects_bad_orders() {
        let cyc = Poset::from_covers(&["a", "b"], &[("a", "b"), ("b", "a")], "a");
        assert!(matches!(cyc, Err(PosetError::OrderViolation(_))));
        let no_bottom = Poset::from_covers::<&str>(&["a", "b"], &[], "a");
        assert!(matches!(no_bottom, Err(PosetError::OrderViolation(_))));
        let dup = Poset::from_covers::<&str>(&["a", "a"], &[], "a");
        assert_eq!(dup, Err(PosetError::DuplicateElement("a".into())));
        let not_reflexive = Poset::from_matrix(&["a"], vec![false], "a");
        assert!(matches!(not_reflexive, Err(PosetError::OrderViolation(_))));
        // a <= b <= c but not a <= c
        let m = vec![true, true, false, false, true, true, false, false, true];
        assert!(matches!(Poset::from_matrix(&["a", "b", "c"], m, "a"), Err(PosetError::OrderViolation(_))));
    }

    #[test]
    fn upper_set_validation_and_lift() {
        let m4 = fixtures::m4();
        let id = |s| m4.id(s).unwrap();
        assert!(m4.upper_set([id("a")]).is_err());
        let u = m4.upper_set([id("a"), id("top")]).unwrap();
        assert_eq!(u, m4.up_closure([id("a")]));
        let (lifted, fresh) = m4.lifted(&m4.fresh_name("bot")).unwrap();
        assert_eq!(lifted.name(fresh), "bot'");
        assert_eq!(lifted.bottom(), fresh);
        assert!(lifted.le(fresh, id("bot")));
        assert!(lifted.le(id("a"), id("top")));
        assert!(!u.belongs_to(&lifted));
    }

    #[test]
    fn dot_lists_covers() {
        let dot = fixtures::m4().to_dot();
        assert_eq!(dot.matches("->").count(), 4);
    }

    mod props {
        use crate::testkit::random_poset;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]
            #[test]
            fn poset_invariants(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let p = random_poset(&mut rng, 7);
                let sets = p.enumerate_upper_sets().unwrap();
                for u in &sets {
                    for v in &sets {
                        prop_assert!(sets.contains(&u.union(v)));
                        prop_assert!(sets.contains(&u.intersection(v)));
                    }
                }
                prop_assert_eq!(p.up_set(p.bottom()).len(), p.len());
                for x in p.elements() {
                    let up = p.up_set(x);
                    prop_assert!(p.upper_set(up.iter().copied()).is_ok());
                    let down = p.down_set(x);
                    let complement = p.elements().filter(|y| !down.contains(y));
                    prop_assert!(p.upper_set(complement).is_ok());
                    for y in p.elements() {
                        prop_assert_eq!(p.way_below(x, y).unwrap(), p.leq(x, y).unwrap());
                    }
                }
            }
        }
    }
}
