//! The quotient of a structure by the equivalence generated by `eq`.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::formula::{RelKind, RelationSymbol};
use crate::structure::SigmaStructure;
use crate::Rational;

/// Equivalence classes of `eq` with the induced `<` edges and the unary
/// facts attached to each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    /// Class index of every element.
    pub class_of: Vec<usize>,
    /// Members of each class, sorted; classes ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
    /// Distinct constants asserted on members of the class.
    pub constants: Vec<Vec<Rational>>,
    /// Distinct congruences `(residue, modulus)` asserted on members.
    pub modulos: Vec<Vec<(i64, i64)>>,
    /// For each constant, an element carrying it (first by index).
    pub constant_witness: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Quotient {
    pub fn build(a: &SigmaStructure) -> Quotient {
        let n = a.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for t in a.tuples(&RelationSymbol::equal()) {
            let (x, y) = (find(&mut parent, t[0]), find(&mut parent, t[1]));
            if x != y {
                let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                parent[hi] = lo;
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for e in 0..n {
            let r = find(&mut parent, e);
            if class_of[r] == usize::MAX {
                class_of[r] = classes.len();
                classes.push(Vec::new());
            }
            let c = class_of[r];
            class_of[e] = c;
            classes[c].push(e);
        }
        let k = classes.len();
        let mut succ_sets = vec![BTreeSet::new(); k];
        for t in a.tuples(&RelationSymbol::less()) {
            succ_sets[class_of[t[0]]].insert(class_of[t[1]]);
        }
        let succ: Vec<Vec<usize>> = succ_sets.iter().map(|s| s.iter().copied().collect()).collect();
        let mut pred = vec![Vec::new(); k];
        for (c, s) in succ.iter().enumerate() {
            for &d in s {
                pred[d].push(c);
            }
        }
        let mut constants = vec![Vec::new(); k];
        let mut constant_witness = vec![Vec::new(); k];
        let mut modulos = vec![Vec::new(); k];
        for (rel, tuples) in a.relations() {
            match rel.kind() {
                RelKind::Constant(v) => {
                    for t in tuples {
                        let c = class_of[t[0]];
                        match constants[c].iter().position(|x| x == v) {
                            Some(i) => {
                                if t[0] < constant_witness[c][i] {
                                    constant_witness[c][i] = t[0];
                                }
                            }
                            None => {
                                constants[c].push(*v);
                                constant_witness[c].push(t[0]);
                            }
                        }
                    }
                }
                RelKind::Modulo { residue, modulus } => {
                    for t in tuples {
                        let c = class_of[t[0]];
                        if !modulos[c].contains(&(*residue, *modulus)) {
                            modulos[c].push((*residue, *modulus));
                        }
                    }
                }
                _ => {}
            }
        }
        Quotient {
            class_of,
            classes,
            succ,
            pred,
            constants,
            modulos,
            constant_witness,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Topological order (smallest class first among ready ones), or the
    /// classes of some cycle.
    pub fn topological_order(&self) -> core::result::Result<Vec<usize>, Vec<usize>> {
        let k = self.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..k).filter(|&c| indeg[c] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(Reverse(c)) = heap.pop() {
            order.push(c);
            for &d in &self.succ[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    heap.push(Reverse(d));
                }
            }
        }
        if order.len() == k {
            return Ok(order);
        }
        // Every class left over has a predecessor that is also left over,
        // so walking predecessors must revisit a class.
        let left: Vec<bool> = (0..k).map(|c| indeg[c] > 0).collect();
        let start = (0..k).find(|&c| left[c]).expect("some class remains");
        let mut seen = vec![usize::MAX; k];
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if seen[cur] != usize::MAX {
                let mut cycle = path[seen[cur]..].to_vec();
                cycle.reverse();
                return Err(cycle);
            }
            seen[cur] = path.len();
            path.push(cur);
            cur = *self.pred[cur]
                .iter()
                .find(|&&p| left[p])
                .expect("remaining classes have remaining predecessors");
        }
    }

    /// Members of the given classes, sorted.
    pub fn members(&self, classes: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = classes
            .iter()
            .flat_map(|&c| self.classes[c].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Classes reachable from `start` (inclusive) along `succ` or, with
    /// `backward`, along `pred`.
    pub fn closure(&self, start: &[usize], backward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(c) = stack.pop() {
            let next = if backward { &self.pred[c] } else { &self.succ[c] };
            for &d in next {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen
    }
}
