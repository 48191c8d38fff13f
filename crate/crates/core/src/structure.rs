//! Finite relational structures.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::formula::RelationSymbol;

/// A finite structure over a signature of relation symbols. Elements are
/// identified by their position; names are kept for reporting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SigmaStructure {
    elements: Vec<String>,
    index: BTreeMap<String, usize>,
    relations: BTreeMap<RelationSymbol, BTreeSet<Vec<usize>>>,
}

impl SigmaStructure {
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut s = SigmaStructure::default();
        for e in elements {
            s.add_element(e.into())?;
        }
        Ok(s)
    }

    /// A structure with elements named `e0 … e{n-1}`.
    pub fn with_size(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("e{i}"))).expect("distinct names")
    }

    pub fn add_element(&mut self, name: String) -> Result<usize> {
        if self.index.contains_key(&name) {
            return Err(Error::Duplicate(name));
        }
        let i = self.elements.len();
        self.index.insert(name.clone(), i);
        self.elements.push(name);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Adds `rel` to the signature without tuples.
    pub fn declare(&mut self, rel: RelationSymbol) {
        self.relations.entry(rel).or_default();
    }

    pub fn add_tuple(&mut self, rel: &RelationSymbol, tuple: Vec<usize>) -> Result<()> {
        if tuple.len() != rel.arity() {
            return Err(Error::ArityMismatch {
                symbol: rel.name(),
                expected: rel.arity(),
                found: tuple.len(),
            });
        }
        if let Some(bad) = tuple.iter().find(|&&i| i >= self.elements.len()) {
            return Err(Error::UnknownName(bad.to_string()));
        }
        self.relations.entry(rel.clone()).or_default().insert(tuple);
        Ok(())
    }

    pub fn add_named(&mut self, rel: &RelationSymbol, names: &[&str]) -> Result<()> {
        let tuple = names
            .iter()
            .map(|n| {
                self.index_of(n)
                    .ok_or_else(|| Error::UnknownName(n.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.add_tuple(rel, tuple)
    }

    pub fn holds(&self, rel: &RelationSymbol, tuple: &[usize]) -> bool {
        self.relations
            .get(rel)
            .is_some_and(|t| t.contains(tuple))
    }

    pub fn tuples(&self, rel: &RelationSymbol) -> impl Iterator<Item = &Vec<usize>> {
        self.relations.get(rel).into_iter().flatten()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&RelationSymbol, &BTreeSet<Vec<usize>>)> {
        self.relations.iter()
    }

    pub fn signature(&self) -> BTreeSet<RelationSymbol> {
        self.relations.keys().cloned().collect()
    }

    /// Total number of tuples over all relations.
    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }

    /// The substructure induced by `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> SigmaStructure {
        let mut pos = BTreeMap::new();
        let mut out = SigmaStructure::default();
        for &i in keep {
            if pos.contains_key(&i) {
                continue;
            }
            pos.insert(i, out.elements.len());
            out.add_element(self.elements[i].clone()).expect("names are distinct");
        }
        for (rel, tuples) in &self.relations {
            out.declare(rel.clone());
            for t in tuples {
                if let Some(mapped) = t.iter().map(|i| pos.get(i).copied()).collect::<Option<Vec<_>>>() {
                    out.relations.get_mut(rel).unwrap().insert(mapped);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_query() {
        let mut s = SigmaStructure::new(["a", "b", "c"]).unwrap();
        s.add_named(&RelationSymbol::less(), &["a", "b"]).unwrap();
        s.add_named(&RelationSymbol::int_constant(0), &["c"]).unwrap();
        assert!(s.holds(&RelationSymbol::less(), &[0, 1]));
        assert!(!s.holds(&RelationSymbol::less(), &[1, 0]));
        assert_eq!(s.tuple_count(), 2);
        assert!(s.add_named(&RelationSymbol::less(), &["a"]).is_err());
        assert!(s.add_named(&RelationSymbol::less(), &["a", "z"]).is_err());
        assert!(SigmaStructure::new(["a", "a"]).is_err());
    }

    #[test]
    fn induced_substructure_keeps_internal_tuples() {
        let mut s = SigmaStructure::with_size(3);
        s.add_tuple(&RelationSymbol::less(), alloc::vec![0, 1]).unwrap();
        s.add_tuple(&RelationSymbol::less(), alloc::vec![1, 2]).unwrap();
        let sub = s.induced(&[1, 2]);
        assert_eq!(sub.len(), 2);
        assert!(sub.holds(&RelationSymbol::less(), &[0, 1]));
        assert_eq!(sub.tuple_count(), 1);
    }
}
