//! Exhaustive homomorphism search over a finite range of target values.
//!
//! This is a plain constraint-satisfaction search with arc consistency; it
//! shares no reasoning with the decision procedure and serves as its
//! reference.

use alloc::vec;
use alloc::vec::Vec;

use super::Target;
use crate::domain::Value;
use crate::error::{Error, Result};
use crate::formula::RelKind;
use crate::structure::SigmaStructure;
use crate::Rational;

/// Candidate values for the search, sorted ascending.
///
/// For the integer targets this is `[-K, K]` intersected with the target.
/// For ℚ it is the set of points dividing each gap between consecutive
/// members of `{-K, K} ∪ constants` into `n + 1` equal parts, which leaves
/// room for any chain of `n` elements between two constants.
pub fn candidate_values(a: &SigmaStructure, bound: i64, target: Target) -> Vec<Value> {
    match target {
        Target::Z => (-bound..=bound).map(Value::Int).collect(),
        Target::N => (0..=bound).map(Value::Int).collect(),
        Target::NegZ => (-bound..0).map(Value::Int).collect(),
        Target::Q => {
            let mut anchors = vec![Rational::from_integer(-bound), Rational::from_integer(bound)];
            for (r, t) in a.relations() {
                if let (Some(c), false) = (r.constant_value(), t.is_empty()) {
                    if c > anchors[0] && c < anchors[1] {
                        anchors.push(c);
                    }
                }
            }
            anchors.sort();
            anchors.dedup();
            let parts = a.len() as i64 + 1;
            let mut out = Vec::new();
            for w in anchors.windows(2) {
                let step = (w[1] - w[0]) / Rational::from_integer(parts);
                for j in 0..parts {
                    out.push(w[0] + step * Rational::from_integer(j));
                }
            }
            out.push(*anchors.last().unwrap());
            out.into_iter().map(Value::rational).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn full(n: usize) -> Bits {
        let mut w = vec![u64::MAX; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            *w.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Bits(w)
    }

    fn single(n: usize, i: usize) -> Bits {
        let mut b = Bits(vec![0; n.div_ceil(64)]);
        b.0[i / 64] |= 1 << (i % 64);
        b
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn min(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn max(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Keeps indices `< bound`.
    fn keep_below(&mut self, bound: usize) -> bool {
        let before = self.clone();
        for (i, w) in self.0.iter_mut().enumerate() {
            let lo = i * 64;
            if lo >= bound {
                *w = 0;
            } else if bound - lo < 64 {
                *w &= (1u64 << (bound - lo)) - 1;
            }
        }
        *self != before
    }

    /// Keeps indices `> bound`.
    fn keep_above(&mut self, bound: usize) -> bool {
        let before = self.clone();
        for (i, w) in self.0.iter_mut().enumerate() {
            let lo = i * 64;
            if lo + 63 <= bound {
                *w = 0;
            } else if bound >= lo {
                *w &= !((1u64 << (bound - lo)) | ((1u64 << (bound - lo)) - 1));
            }
        }
        *self != before
    }

    fn intersect(&mut self, other: &Bits) -> bool {
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let n = *a & b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

enum Binary {
    Less(usize, usize),
    Equal(usize, usize),
}

/// Searches for a homomorphism into the target using values from
/// [`candidate_values`] with the given bound. Returns the
/// lexicographically least witness in element order, if any.
pub fn brute_force_hom(a: &SigmaStructure, bound: i64, target: Target) -> Result<Option<Vec<Value>>> {
    target.check_signature(a)?;
    if bound < 0 {
        return Err(Error::InvalidValue(alloc::format!("negative bound {bound}")));
    }
    let values = candidate_values(a, bound, target);
    let nv = values.len();
    let n = a.len();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    if nv == 0 {
        return Ok(None);
    }
    let mut domains = vec![Bits::full(nv); n];
    let mut binary = Vec::new();
    for (rel, tuples) in a.relations() {
        for t in tuples {
            match rel.kind() {
                RelKind::Less => binary.push(Binary::Less(t[0], t[1])),
                RelKind::Equal => binary.push(Binary::Equal(t[0], t[1])),
                RelKind::Constant(c) => {
                    for (i, v) in values.iter().enumerate() {
                        if v.as_rational() != Some(*c) {
                            domains[t[0]].remove(i);
                        }
                    }
                }
                RelKind::Modulo { residue, modulus } => {
                    for (i, v) in values.iter().enumerate() {
                        let ok = v.as_int().is_some_and(|x| x.rem_euclid(*modulus) == *residue);
                        if !ok {
                            domains[t[0]].remove(i);
                        }
                    }
                }
                RelKind::Named(_) => unreachable!("rejected by check_signature"),
            }
        }
    }
    if binary.iter().any(|b| matches!(b, Binary::Less(x, y) if x == y)) {
        return Ok(None);
    }
    if !propagate(&mut domains, &binary) {
        return Ok(None);
    }
    let mut assignment = vec![0usize; n];
    if search(0, &domains, &binary, &mut assignment) {
        Ok(Some(assignment.into_iter().map(|i| values[i].clone()).collect()))
    } else {
        Ok(None)
    }
}

fn propagate(domains: &mut [Bits], binary: &[Binary]) -> bool {
    loop {
        let mut changed = false;
        for b in binary {
            match *b {
                Binary::Less(x, y) => {
                    let Some(max_y) = domains[y].max() else { return false };
                    changed |= domains[x].keep_below(max_y);
                    let Some(min_x) = domains[x].min() else { return false };
                    changed |= domains[y].keep_above(min_x);
                }
                Binary::Equal(x, y) => {
                    let dy = domains[y].clone();
                    changed |= domains[x].intersect(&dy);
                    let dx = domains[x].clone();
                    changed |= domains[y].intersect(&dx);
                }
            }
        }
        if domains.iter().any(Bits::is_empty) {
            return false;
        }
        if !changed {
            return true;
        }
    }
}

fn search(var: usize, domains: &[Bits], binary: &[Binary], out: &mut [usize]) -> bool {
    if var == domains.len() {
        return true;
    }
    let nv = domains[var].0.len() * 64;
    let choices: Vec<usize> = domains[var].iter().collect();
    for v in choices {
        let mut trial = domains.to_vec();
        trial[var] = Bits::single(nv, v);
        trial[var].0.truncate(domains[var].0.len());
        if propagate(&mut trial, binary) {
            out[var] = v;
            if search(var + 1, &trial, binary, out) {
                return true;
            }
        }
    }
    false
}
