//! Normal forms and the constraint abstraction.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{AtomicConstraint, PathFormula, StateFormula, Term};
use crate::domain::ConcreteDomain;
use crate::error::Result;
use crate::util::FreshNames;

/// Negation normal form of a state formula.
///
/// Negations are pushed down to propositions and constraints using the
/// dualities `¬E = A¬`, `¬(ψ U χ) = ¬ψ R ¬χ` and `¬X ψ = X ¬ψ`.
pub fn to_nnf(f: &StateFormula) -> StateFormula {
    nnf_state(f, false)
}

/// Negation normal form of a path formula.
pub fn to_nnf_path(p: &PathFormula) -> PathFormula {
    nnf_path(p, false)
}

pub(crate) fn nnf_state(f: &StateFormula, neg: bool) -> StateFormula {
    match f {
        StateFormula::True => {
            if neg {
                StateFormula::False
            } else {
                StateFormula::True
            }
        }
        StateFormula::False => {
            if neg {
                StateFormula::True
            } else {
                StateFormula::False
            }
        }
        StateFormula::Prop(_) => {
            if neg {
                StateFormula::not(f.clone())
            } else {
                f.clone()
            }
        }
        StateFormula::Not(a) => nnf_state(a, !neg),
        StateFormula::And(a, b) => {
            let (a, b) = (nnf_state(a, neg), nnf_state(b, neg));
            if neg {
                StateFormula::or(a, b)
            } else {
                StateFormula::and(a, b)
            }
        }
        StateFormula::Or(a, b) => {
            let (a, b) = (nnf_state(a, neg), nnf_state(b, neg));
            if neg {
                StateFormula::and(a, b)
            } else {
                StateFormula::or(a, b)
            }
        }
        StateFormula::Exists(p) => {
            let p = nnf_path(p, neg);
            if neg {
                StateFormula::all(p)
            } else {
                StateFormula::exists(p)
            }
        }
        StateFormula::All(p) => {
            let p = nnf_path(p, neg);
            if neg {
                StateFormula::exists(p)
            } else {
                StateFormula::all(p)
            }
        }
    }
}

pub(crate) fn nnf_path(p: &PathFormula, neg: bool) -> PathFormula {
    match p {
        PathFormula::State(s) => PathFormula::state(nnf_state(s, neg)),
        PathFormula::Constraint(_) => {
            if neg {
                PathFormula::Not(Box::new(p.clone()))
            } else {
                p.clone()
            }
        }
        PathFormula::Not(a) => nnf_path(a, !neg),
        PathFormula::And(a, b) => {
            let (a, b) = (nnf_path(a, neg), nnf_path(b, neg));
            if neg {
                PathFormula::or(a, b)
            } else {
                PathFormula::and(a, b)
            }
        }
        PathFormula::Or(a, b) => {
            let (a, b) = (nnf_path(a, neg), nnf_path(b, neg));
            if neg {
                PathFormula::and(a, b)
            } else {
                PathFormula::or(a, b)
            }
        }
        PathFormula::Next(a) => PathFormula::next(nnf_path(a, neg)),
        PathFormula::Until(a, b) => {
            let (a, b) = (nnf_path(a, neg), nnf_path(b, neg));
            if neg {
                PathFormula::release(a, b)
            } else {
                PathFormula::until(a, b)
            }
        }
        PathFormula::Release(a, b) => {
            let (a, b) = (nnf_path(a, neg), nnf_path(b, neg));
            if neg {
                PathFormula::until(a, b)
            } else {
                PathFormula::release(a, b)
            }
        }
    }
}

/// Strong negation normal form over `domain`.
///
/// The input is first brought into NNF. Each negated constraint
/// `¬r(X^{i1} x1, …)` is then replaced by the domain's positive-existential
/// definition of the complement of `r`, with its existential variables
/// instantiated by fresh register variables read at the largest offset of
/// the constraint. Occurrences of the same negated constraint share the
/// same fresh variables.
pub fn to_snnf(f: &StateFormula, domain: &ConcreteDomain) -> Result<StateFormula> {
    let nnf = to_nnf(f);
    let mut taken: BTreeSet<String> = nnf.variables().into_iter().collect();
    let mut ctx = SnnfContext {
        domain,
        fresh: FreshNames::new("__y"),
        assigned: BTreeMap::new(),
        taken: &mut taken,
    };
    ctx.state(&nnf)
}

struct SnnfContext<'a> {
    domain: &'a ConcreteDomain,
    fresh: FreshNames,
    assigned: BTreeMap<AtomicConstraint, Vec<String>>,
    taken: &'a mut BTreeSet<String>,
}

impl SnnfContext<'_> {
    fn state(&mut self, f: &StateFormula) -> Result<StateFormula> {
        Ok(match f {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => f.clone(),
            StateFormula::Not(a) => StateFormula::not(self.state(a)?),
            StateFormula::And(a, b) => StateFormula::and(self.state(a)?, self.state(b)?),
            StateFormula::Or(a, b) => StateFormula::or(self.state(a)?, self.state(b)?),
            StateFormula::Exists(p) => StateFormula::exists(self.path(p)?),
            StateFormula::All(p) => StateFormula::all(self.path(p)?),
        })
    }

    fn path(&mut self, p: &PathFormula) -> Result<PathFormula> {
        Ok(match p {
            PathFormula::State(s) => PathFormula::state(self.state(s)?),
            PathFormula::Constraint(_) => p.clone(),
            PathFormula::Not(inner) => match &**inner {
                PathFormula::Constraint(c) => self.replace(c)?,
                other => PathFormula::not(self.path(other)?),
            },
            PathFormula::And(a, b) => PathFormula::and(self.path(a)?, self.path(b)?),
            PathFormula::Or(a, b) => PathFormula::or(self.path(a)?, self.path(b)?),
            PathFormula::Next(a) => PathFormula::next(self.path(a)?),
            PathFormula::Until(a, b) => PathFormula::until(self.path(a)?, self.path(b)?),
            PathFormula::Release(a, b) => PathFormula::release(self.path(a)?, self.path(b)?),
        })
    }

    fn replace(&mut self, c: &AtomicConstraint) -> Result<PathFormula> {
        let neg = self.domain.negation_formula(c.relation())?;
        if !self.assigned.contains_key(c) {
            let mut names = Vec::with_capacity(neg.fresh);
            for _ in 0..neg.fresh {
                let n = self.fresh.next(self.taken);
                self.taken.insert(n.clone());
                names.push(n);
            }
            self.assigned.insert(c.clone(), names);
        }
        let depth = c.depth();
        let fresh: Vec<Term> = self.assigned[c]
            .iter()
            .map(|n| Term::new(depth, n))
            .collect();
        neg.instantiate(c.args(), &fresh)
    }
}

/// Which path quantifiers [`count_e`] counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CountMode {
    /// Count `E ψ` subformulas, and each `A ψ` as the `E` formula of
    /// `¬A ψ ≡ E ¬ψ` (in NNF).
    #[default]
    WithUniversal,
    /// Count only syntactic `E ψ` subformulas.
    ExistentialOnly,
}

/// Number of distinct existential path subformulas of the NNF of `f`.
pub fn count_e(f: &StateFormula, mode: CountMode) -> usize {
    let mut seen = BTreeSet::new();
    collect_e_state(&to_nnf(f), mode, &mut seen);
    seen.len()
}

fn collect_e_state(f: &StateFormula, mode: CountMode, seen: &mut BTreeSet<PathFormula>) {
    match f {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => {}
        StateFormula::Not(a) => collect_e_state(a, mode, seen),
        StateFormula::And(a, b) | StateFormula::Or(a, b) => {
            collect_e_state(a, mode, seen);
            collect_e_state(b, mode, seen);
        }
        StateFormula::Exists(p) => {
            seen.insert((**p).clone());
            collect_e_path(p, mode, seen);
        }
        StateFormula::All(p) => {
            if mode == CountMode::WithUniversal {
                seen.insert(nnf_path(p, true));
            }
            collect_e_path(p, mode, seen);
        }
    }
}

fn collect_e_path(p: &PathFormula, mode: CountMode, seen: &mut BTreeSet<PathFormula>) {
    match p {
        PathFormula::State(s) => collect_e_state(s, mode, seen),
        PathFormula::Constraint(_) => {}
        PathFormula::Not(a) | PathFormula::Next(a) => collect_e_path(a, mode, seen),
        PathFormula::And(a, b)
        | PathFormula::Or(a, b)
        | PathFormula::Until(a, b)
        | PathFormula::Release(a, b) => {
            collect_e_path(a, mode, seen);
            collect_e_path(b, mode, seen);
        }
    }
}

/// One row of an abstraction table: proposition `prop` stands for
/// `constraint`, evaluated `constraint.depth()` steps in the past.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub prop: String,
    pub constraint: AtomicConstraint,
}

impl TableEntry {
    pub fn depth(&self) -> usize {
        self.constraint.depth()
    }
}

/// Maps fresh propositions to the constraints they replace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbstractionTable {
    pub entries: Vec<TableEntry>,
}

impl AbstractionTable {
    pub fn new(entries: Vec<TableEntry>) -> Self {
        AbstractionTable { entries }
    }

    /// Largest constraint depth, 0 for an empty table.
    pub fn max_depth(&self) -> usize {
        self.entries.iter().map(TableEntry::depth).max().unwrap_or(0)
    }

    pub fn lookup_prop(&self, prop: &str) -> Option<&TableEntry> {
        self.entries.iter().find(|e| e.prop == prop)
    }

    /// Register variables used by the constraints, in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            for t in e.constraint.args() {
                if !out.contains(&t.var) {
                    out.push(t.var.clone());
                }
            }
        }
        out
    }
}

/// Replaces each constraint `R_i` of depth `d_i` by `X^{d_i} p_i` for a
/// fresh proposition `p_i`, numbering constraints by first occurrence.
pub fn abstract_constraints(f: &StateFormula) -> (StateFormula, AbstractionTable) {
    let constraints = f.constraints();
    let mut taken = f.propositions();
    let mut fresh = FreshNames::new("__p");
    let mut entries = Vec::with_capacity(constraints.len());
    for c in constraints {
        let prop = fresh.next(&taken);
        taken.insert(prop.clone());
        entries.push(TableEntry {
            prop,
            constraint: c,
        });
    }
    let table = AbstractionTable { entries };
    (abstract_state(f, &table), table)
}

fn abstract_state(f: &StateFormula, table: &AbstractionTable) -> StateFormula {
    match f {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => f.clone(),
        StateFormula::Not(a) => StateFormula::Not(Box::new(abstract_state(a, table))),
        StateFormula::And(a, b) => StateFormula::And(
            Box::new(abstract_state(a, table)),
            Box::new(abstract_state(b, table)),
        ),
        StateFormula::Or(a, b) => StateFormula::Or(
            Box::new(abstract_state(a, table)),
            Box::new(abstract_state(b, table)),
        ),
        StateFormula::Exists(p) => StateFormula::Exists(Box::new(abstract_path(p, table))),
        StateFormula::All(p) => StateFormula::All(Box::new(abstract_path(p, table))),
    }
}

// Rebuilds the tree node by node, without the canonicalising smart
// constructors, so that `concretize` can invert the result exactly.
fn abstract_path(p: &PathFormula, table: &AbstractionTable) -> PathFormula {
    let rec = |x: &PathFormula| Box::new(abstract_path(x, table));
    match p {
        PathFormula::State(s) => PathFormula::State(Box::new(abstract_state(s, table))),
        PathFormula::Constraint(c) => {
            let entry = table
                .entries
                .iter()
                .find(|e| &e.constraint == c)
                .expect("table built from the same formula");
            let mut out = PathFormula::State(Box::new(StateFormula::Prop(entry.prop.clone())));
            for _ in 0..entry.depth() {
                out = PathFormula::Next(Box::new(out));
            }
            out
        }
        PathFormula::Not(a) => PathFormula::Not(rec(a)),
        PathFormula::Next(a) => PathFormula::Next(rec(a)),
        PathFormula::And(a, b) => PathFormula::And(rec(a), rec(b)),
        PathFormula::Or(a, b) => PathFormula::Or(rec(a), rec(b)),
        PathFormula::Until(a, b) => PathFormula::Until(rec(a), rec(b)),
        PathFormula::Release(a, b) => PathFormula::Release(rec(a), rec(b)),
    }
}

/// Inverse of [`abstract_constraints`]: replaces each `X^{d_i} p_i` by `R_i`.
pub fn concretize(f: &StateFormula, table: &AbstractionTable) -> StateFormula {
    match f {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => f.clone(),
        StateFormula::Not(a) => StateFormula::Not(Box::new(concretize(a, table))),
        StateFormula::And(a, b) => StateFormula::And(
            Box::new(concretize(a, table)),
            Box::new(concretize(b, table)),
        ),
        StateFormula::Or(a, b) => {
            StateFormula::Or(Box::new(concretize(a, table)), Box::new(concretize(b, table)))
        }
        StateFormula::Exists(p) => StateFormula::Exists(Box::new(concretize_path(p, table))),
        StateFormula::All(p) => StateFormula::All(Box::new(concretize_path(p, table))),
    }
}

fn abstracted_prop(p: &PathFormula) -> Option<(usize, &str)> {
    let mut depth = 0;
    let mut cur = p;
    loop {
        match cur {
            PathFormula::Next(inner) => {
                depth += 1;
                cur = inner;
            }
            PathFormula::State(s) => {
                return match &**s {
                    StateFormula::Prop(name) => Some((depth, name)),
                    _ => None,
                }
            }
            _ => return None,
        }
    }
}

fn concretize_path(p: &PathFormula, table: &AbstractionTable) -> PathFormula {
    if let Some((depth, prop)) = abstracted_prop(p) {
        if let Some(e) = table.lookup_prop(prop) {
            if e.depth() == depth {
                return PathFormula::Constraint(e.constraint.clone());
            }
        }
    }
    let rec = |x: &PathFormula| Box::new(concretize_path(x, table));
    match p {
        PathFormula::State(s) => PathFormula::State(Box::new(concretize(s, table))),
        PathFormula::Constraint(_) => p.clone(),
        PathFormula::Not(a) => PathFormula::Not(rec(a)),
        PathFormula::Next(a) => PathFormula::Next(rec(a)),
        PathFormula::And(a, b) => PathFormula::And(rec(a), rec(b)),
        PathFormula::Or(a, b) => PathFormula::Or(rec(a), rec(b)),
        PathFormula::Until(a, b) => PathFormula::Until(rec(a), rec(b)),
        PathFormula::Release(a, b) => PathFormula::Release(rec(a), rec(b)),
    }
}
