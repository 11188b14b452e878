//! Unique-keyed sets and environments.
//!
//! A [`VarSet`] only ever stores a variable under its own unique, so a
//! successful lookup always returns a variable with the queried unique.

use std::collections::{BTreeMap, BTreeSet};

use crate::ir::{Unique, Var};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSet {
    map: BTreeMap<Unique, Var>,
}

impl VarSet {
    pub fn new() -> Self {
        VarSet::default()
    }

    pub fn unit(v: Var) -> Self {
        let mut s = VarSet::new();
        s.insert(v);
        s
    }

    /// Builds a set from a raw map without re-keying. Only useful for
    /// exercising [`VarSet::is_valid`]; every other constructor keeps keys
    /// and stored uniques in sync.
    pub fn from_raw_unchecked(map: BTreeMap<Unique, Var>) -> Self {
        VarSet { map }
    }

    /// Inserts `v`, replacing any entry with the same unique.
    pub fn insert(&mut self, v: Var) {
        self.map.insert(v.unique(), v);
    }

    pub fn insert_all<I: IntoIterator<Item = Var>>(&mut self, vs: I) {
        for v in vs {
            self.insert(v);
        }
    }

    pub fn remove(&mut self, v: &Var) {
        self.map.remove(&v.unique());
    }

    pub fn remove_unique(&mut self, u: Unique) {
        self.map.remove(&u);
    }

    pub fn remove_all<'a, I: IntoIterator<Item = &'a Var>>(&mut self, vs: I) {
        for v in vs {
            self.remove(v);
        }
    }

    pub fn extended(&self, v: Var) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn extended_list<I: IntoIterator<Item = Var>>(&self, vs: I) -> Self {
        let mut s = self.clone();
        s.insert_all(vs);
        s
    }

    pub fn without(&self, v: &Var) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn without_list<'a, I: IntoIterator<Item = &'a Var>>(&self, vs: I) -> Self {
        let mut s = self.clone();
        s.remove_all(vs);
        s
    }

    pub fn lookup(&self, v: &Var) -> Option<&Var> {
        self.map.get(&v.unique())
    }

    pub fn lookup_unique(&self, u: Unique) -> Option<&Var> {
        self.map.get(&u)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.map.contains_key(&v.unique())
    }

    pub fn contains_unique(&self, u: Unique) -> bool {
        self.map.contains_key(&u)
    }

    /// Entries of `other` override entries of `self`.
    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut s = self.clone();
        s.map.extend(other.map.iter().map(|(k, v)| (*k, v.clone())));
        s
    }

    pub fn minus(&self, other: &VarSet) -> VarSet {
        self.filter(|v| !other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.map.keys().all(|k| !big.map.contains_key(k))
    }

    /// Inclusion of unique domains.
    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.map.keys().all(|k| other.map.contains_key(k))
    }

    pub fn any(&self, pred: impl FnMut(&Var) -> bool) -> bool {
        self.map.values().any(pred)
    }

    pub fn filter(&self, mut pred: impl FnMut(&Var) -> bool) -> VarSet {
        VarSet {
            map: self
                .map
                .iter()
                .filter(|(_, v)| pred(v))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Stored variables in unique order.
    pub fn iter(&self) -> impl Iterator<Item = &Var> {
        self.map.values()
    }

    pub fn uniques(&self) -> impl Iterator<Item = Unique> + '_ {
        self.map.keys().copied()
    }

    /// Every key equals the unique of the variable stored under it.
    pub fn is_valid(&self) -> bool {
        self.map.iter().all(|(k, v)| *k == v.unique())
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        let mut s = VarSet::new();
        s.insert_all(iter);
        s
    }
}

impl Extend<Var> for VarSet {
    fn extend<I: IntoIterator<Item = Var>>(&mut self, iter: I) {
        self.insert_all(iter);
    }
}

pub fn mk_var_set<I: IntoIterator<Item = Var>>(vs: I) -> VarSet {
    vs.into_iter().collect()
}

pub fn valid_var_set(vs: &VarSet) -> bool {
    vs.is_valid()
}

/// A map keyed by the unique of a variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarEnv<V> {
    map: BTreeMap<Unique, V>,
}

impl<V> Default for VarEnv<V> {
    fn default() -> Self {
        VarEnv { map: BTreeMap::new() }
    }
}

impl<V> VarEnv<V> {
    pub fn new() -> Self {
        VarEnv::default()
    }

    pub fn lookup(&self, v: &Var) -> Option<&V> {
        self.map.get(&v.unique())
    }

    pub fn lookup_unique(&self, u: Unique) -> Option<&V> {
        self.map.get(&u)
    }

    pub fn insert(&mut self, v: &Var, payload: V) {
        self.map.insert(v.unique(), payload);
    }

    pub fn remove(&mut self, v: &Var) {
        self.map.remove(&v.unique());
    }

    pub fn contains_unique(&self, u: Unique) -> bool {
        self.map.contains_key(&u)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn domain(&self) -> BTreeSet<Unique> {
        self.map.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Unique, &V)> {
        self.map.iter().map(|(k, v)| (*k, v))
    }
}

impl<V: Clone> VarEnv<V> {
    pub fn extended(&self, v: &Var, payload: V) -> Self {
        let mut e = self.clone();
        e.insert(v, payload);
        e
    }

    pub fn without(&self, v: &Var) -> Self {
        let mut e = self.clone();
        e.remove(v);
        e
    }
}

/// `vs` restricted to the uniques outside the environment's domain.
pub fn minus_dom<V>(vs: &VarSet, env: &VarEnv<V>) -> VarSet {
    vs.filter(|v| !env.contains_unique(v.unique()))
}

/// The set of variables in scope at some point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InScopeSet(VarSet);

impl InScopeSet {
    pub fn new(vs: VarSet) -> Self {
        InScopeSet(vs)
    }

    pub fn vars(&self) -> &VarSet {
        &self.0
    }

    pub fn into_vars(self) -> VarSet {
        self.0
    }

    pub fn insert(&mut self, v: Var) {
        self.0.insert(v);
    }

    pub fn insert_all<I: IntoIterator<Item = Var>>(&mut self, vs: I) {
        self.0.insert_all(vs);
    }

    pub fn extended(&self, v: Var) -> Self {
        InScopeSet(self.0.extended(v))
    }

    pub fn extended_list<I: IntoIterator<Item = Var>>(&self, vs: I) -> Self {
        InScopeSet(self.0.extended_list(vs))
    }

    pub fn lookup(&self, v: &Var) -> Option<&Var> {
        self.0.lookup(v)
    }

    pub fn contains_unique(&self, u: Unique) -> bool {
        self.0.contains_unique(u)
    }
}

impl From<VarSet> for InScopeSet {
    fn from(vs: VarSet) -> Self {
        InScopeSet(vs)
    }
}
