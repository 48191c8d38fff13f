//! Translation of propositional LTL to generalised Büchi automata by the
//! classical tableau construction.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// LTL in negation normal form over numbered letters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ltl {
    True,
    False,
    /// `Lit(a, true)` is letter `a`, `Lit(a, false)` its negation.
    Lit(usize, bool),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn next(a: Ltl) -> Ltl {
        Ltl::Next(Box::new(a))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    fn untils(&self, out: &mut BTreeSet<Ltl>) {
        match self {
            Ltl::True | Ltl::False | Ltl::Lit(..) => {}
            Ltl::Next(a) => a.untils(out),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Release(a, b) => {
                a.untils(out);
                b.untils(out);
            }
            Ltl::Until(a, b) => {
                out.insert(self.clone());
                a.untils(out);
                b.untils(out);
            }
        }
    }
}

/// A generalised Büchi automaton with state-based labels and acceptance.
///
/// A run reads letter valuations; at each step the current state's
/// literals must hold. A run is accepting when it visits every acceptance
/// set infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    /// Literals each state requires of the current position.
    pub labels: Vec<Vec<(usize, bool)>>,
    pub successors: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
    /// One set per until subformula; `acceptance[i][s]` tells whether
    /// state `s` belongs to set `i`.
    pub acceptance: Vec<Vec<bool>>,
}

type Node = (BTreeSet<Ltl>, BTreeSet<Ltl>);

fn expand(mut todo: Vec<Ltl>, mut old: BTreeSet<Ltl>, mut next: BTreeSet<Ltl>, out: &mut Vec<Node>) {
    loop {
        let Some(f) = todo.pop() else {
            out.push((old, next));
            return;
        };
        if old.contains(&f) {
            continue;
        }
        match &f {
            Ltl::True => {}
            Ltl::False => return,
            Ltl::Lit(a, pos) => {
                if old.contains(&Ltl::Lit(*a, !pos)) {
                    return;
                }
            }
            Ltl::And(a, b) => {
                todo.push((**a).clone());
                todo.push((**b).clone());
            }
            Ltl::Next(a) => {
                next.insert((**a).clone());
            }
            Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                // Two alternatives; the first is explored recursively.
                let (first, second, second_next): (Vec<Ltl>, Vec<Ltl>, bool) = match &f {
                    Ltl::Or(..) => (vec![(**a).clone()], vec![(**b).clone()], false),
                    Ltl::Until(..) => (vec![(**b).clone()], vec![(**a).clone()], true),
                    _ => (vec![(**a).clone(), (**b).clone()], vec![(**b).clone()], true),
                };
                old.insert(f.clone());
                let mut t1 = todo.clone();
                t1.extend(first);
                expand(t1, old.clone(), next.clone(), out);
                todo.extend(second);
                if second_next {
                    next.insert(f.clone());
                }
                continue;
            }
        }
        old.insert(f);
    }
}

/// Builds the automaton accepting the letter sequences satisfying `f`.
pub fn ltl_to_buchi(f: &Ltl) -> BuchiAutomaton {
    let mut untils = BTreeSet::new();
    f.untils(&mut untils);
    let untils: Vec<Ltl> = untils.into_iter().collect();

    let mut index: BTreeMap<Node, usize> = BTreeMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut successors: Vec<Vec<usize>> = Vec::new();
    let mut expansions: BTreeMap<BTreeSet<Ltl>, Vec<usize>> = BTreeMap::new();
    let mut queue: Vec<usize> = Vec::new();

    let mut intern = |n: Node, nodes: &mut Vec<Node>, queue: &mut Vec<usize>, succ: &mut Vec<Vec<usize>>| {
        if let Some(&i) = index.get(&n) {
            return i;
        }
        let i = nodes.len();
        index.insert(n.clone(), i);
        nodes.push(n);
        succ.push(Vec::new());
        queue.push(i);
        i
    };

    let mut init_nodes = Vec::new();
    expand(vec![f.clone()], BTreeSet::new(), BTreeSet::new(), &mut init_nodes);
    let mut initial: Vec<usize> = init_nodes
        .into_iter()
        .map(|n| intern(n, &mut nodes, &mut queue, &mut successors))
        .collect();
    initial.sort_unstable();
    initial.dedup();

    while let Some(i) = queue.pop() {
        let obligations = nodes[i].1.clone();
        let targets = match expansions.get(&obligations) {
            Some(t) => t.clone(),
            None => {
                let mut out = Vec::new();
                expand(obligations.iter().cloned().collect(), BTreeSet::new(), BTreeSet::new(), &mut out);
                let mut t: Vec<usize> = out
                    .into_iter()
                    .map(|n| intern(n, &mut nodes, &mut queue, &mut successors))
                    .collect();
                t.sort_unstable();
                t.dedup();
                expansions.insert(obligations, t.clone());
                t
            }
        };
        successors[i] = targets;
    }

    let labels = nodes
        .iter()
        .map(|(old, _)| {
            old.iter()
                .filter_map(|g| match g {
                    Ltl::Lit(a, p) => Some((*a, *p)),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let acceptance = untils
        .iter()
        .map(|u| {
            let Ltl::Until(_, b) = u else { unreachable!() };
            nodes
                .iter()
                .map(|(old, _)| !old.contains(u) || old.contains(b))
                .collect()
        })
        .collect();
    BuchiAutomaton {
        labels,
        successors,
        initial,
        acceptance,
    }
}

impl BuchiAutomaton {
    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    /// Whether the automaton accepts the word `prefix · cycle^ω`, where
    /// every position lists the letters that are true.
    pub fn accepts_lasso(&self, prefix: &[BTreeSet<usize>], cycle: &[BTreeSet<usize>]) -> bool {
        assert!(!cycle.is_empty(), "the cycle of a lasso must be nonempty");
        let positions: Vec<&BTreeSet<usize>> = prefix.iter().chain(cycle.iter()).collect();
        let len = positions.len();
        let next_pos = |p: usize| if p + 1 < len { p + 1 } else { prefix.len() };
        let graph = super::graph::ProductGraph::build(
            len,
            |p| alloc::vec![next_pos(p)],
            self,
            |p, (a, v)| positions[p].contains(&a) == v,
        );
        let good = graph.accepting_states(self);
        self.initial
            .iter()
            .any(|&q| graph.state(0, q).is_some_and(|s| good[s]))
    }
}
