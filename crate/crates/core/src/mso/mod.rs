//! Monadic second-order sentences over relational structures.
//!
//! Besides the usual connectives and first-order / set quantifiers the AST
//! has the bounding quantifier `B X φ` ("the finite sets satisfying φ have
//! bounded size") and two macro nodes:
//!
//! * [`Mso::Subset`] — `X ⊆ {v | φ(v)}`;
//! * [`Mso::Reach`] — reachability along a definable edge relation,
//!   optionally inside a set `Z` and relativised to a guard.
//!
//! Macros keep emitted sentences readable and let the evaluator compute
//! reachability directly. [`Mso::expand`] rewrites them into plain MSO.

mod emit;
mod eval;
mod text;
mod tree;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

pub use emit::{
    emit_core_formula, emit_hom_sentence, relativize, CoreKind, HomTarget,
};
pub use eval::{eval_finite, eval_finite_with, Assignment, EvalOptions, EvalStats, MAX_ELEMENTS};
pub use text::{parse_mso, pretty};
pub use tree::{emit_tree_encoding, tree_encoding_structure, aux_prop, succ_relation};

use crate::formula::RelationSymbol;
use crate::util::FreshNames;

/// Logic a subformula belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Logic {
    /// Monadic second-order logic, set quantifiers over arbitrary sets.
    Mso,
    /// Weak MSO, set quantifiers over finite sets.
    Wmso,
    /// Weak MSO with the bounding quantifier.
    WmsoB,
}

impl Logic {
    pub fn name(self) -> &'static str {
        match self {
            Logic::Mso => "mso",
            Logic::Wmso => "wmso",
            Logic::WmsoB => "wmsob",
        }
    }
}

/// Result of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Pure(Logic),
    /// A Boolean combination of sentences from different logics.
    BooleanCombination,
}

/// A unary formula `v ↦ body`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lambda1 {
    pub var: String,
    pub body: Mso,
}

/// A binary formula `(x, y) ↦ body`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lambda2 {
    pub x: String,
    pub y: String,
    pub body: Mso,
}

/// Reachability from `from` to `to` along `edge`.
///
/// With `within = Some(Z)` the path must stay inside `Z`, including both
/// endpoints. With a guard the node behaves like the relativisation of
/// its expansion: if `from` fails the guard the formula holds vacuously,
/// otherwise the path must stay inside the guard.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reach {
    pub edge: Lambda2,
    pub from: String,
    pub to: String,
    pub within: Option<String>,
    pub guard: Option<Lambda1>,
}

/// MSO syntax tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mso {
    True,
    False,
    Rel(RelationSymbol, Vec<String>),
    In(String, String),
    Eq(String, String),
    Not(Box<Mso>),
    And(Vec<Mso>),
    Or(Vec<Mso>),
    Implies(Box<Mso>, Box<Mso>),
    Exists(String, Box<Mso>),
    Forall(String, Box<Mso>),
    ExistsSet(String, Box<Mso>),
    ForallSet(String, Box<Mso>),
    Bound(String, Box<Mso>),
    Subset(String, Box<Lambda1>),
    Reach(Box<Reach>),
    Tag(Logic, Box<Mso>),
}

impl Lambda1 {
    pub fn new(var: &str, body: Mso) -> Self {
        Lambda1 {
            var: var.to_string(),
            body,
        }
    }

    /// `body[var := arg]`.
    pub fn apply(&self, arg: &str) -> Mso {
        self.body.substitute(&self.var, arg)
    }

    fn free_vars(&self) -> BTreeSet<String> {
        let mut s = self.body.free_vars();
        s.remove(&self.var);
        s
    }
}

impl Lambda2 {
    pub fn new(x: &str, y: &str, body: Mso) -> Self {
        Lambda2 {
            x: x.to_string(),
            y: y.to_string(),
            body,
        }
    }

    /// `body[x := a, y := b]`, performed simultaneously.
    pub fn apply(&self, a: &str, b: &str) -> Mso {
        let mut taken = self.body.all_names();
        taken.insert(a.to_string());
        taken.insert(b.to_string());
        taken.insert(self.x.clone());
        taken.insert(self.y.clone());
        let tmp = FreshNames::new("tmp").next(&taken);
        self.body
            .substitute(&self.y, &tmp)
            .substitute(&self.x, a)
            .substitute(&tmp, b)
    }

    fn free_vars(&self) -> BTreeSet<String> {
        let mut s = self.body.free_vars();
        s.remove(&self.x);
        s.remove(&self.y);
        s
    }
}

impl Mso {
    pub fn rel(r: RelationSymbol, args: &[&str]) -> Mso {
        Mso::Rel(r, args.iter().map(|s| s.to_string()).collect())
    }

    pub fn member(x: &str, set: &str) -> Mso {
        Mso::In(x.to_string(), set.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Mso) -> Mso {
        Mso::Not(Box::new(f))
    }

    pub fn implies(a: Mso, b: Mso) -> Mso {
        Mso::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, f: Mso) -> Mso {
        Mso::Exists(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: Mso) -> Mso {
        Mso::Forall(x.to_string(), Box::new(f))
    }

    pub fn exists_set(x: &str, f: Mso) -> Mso {
        Mso::ExistsSet(x.to_string(), Box::new(f))
    }

    pub fn forall_set(x: &str, f: Mso) -> Mso {
        Mso::ForallSet(x.to_string(), Box::new(f))
    }

    pub fn bound(x: &str, f: Mso) -> Mso {
        Mso::Bound(x.to_string(), Box::new(f))
    }

    pub fn subset(set: &str, guard: Lambda1) -> Mso {
        Mso::Subset(set.to_string(), Box::new(guard))
    }

    pub fn reach(edge: Lambda2, from: &str, to: &str) -> Mso {
        Mso::Reach(Box::new(Reach {
            edge,
            from: from.to_string(),
            to: to.to_string(),
            within: None,
            guard: None,
        }))
    }

    pub fn reach_within(edge: Lambda2, from: &str, to: &str, within: &str) -> Mso {
        Mso::Reach(Box::new(Reach {
            edge,
            from: from.to_string(),
            to: to.to_string(),
            within: Some(within.to_string()),
            guard: None,
        }))
    }

    pub fn tag(logic: Logic, f: Mso) -> Mso {
        Mso::Tag(logic, Box::new(f))
    }

    /// Free first-order and set variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Mso::True | Mso::False => {}
            Mso::Rel(_, args) => out.extend(args.iter().cloned()),
            Mso::In(a, b) | Mso::Eq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Mso::Not(a) | Mso::Tag(_, a) => a.collect_free(out),
            Mso::And(xs) | Mso::Or(xs) => xs.iter().for_each(|x| x.collect_free(out)),
            Mso::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Mso::Exists(v, b)
            | Mso::Forall(v, b)
            | Mso::ExistsSet(v, b)
            | Mso::ForallSet(v, b)
            | Mso::Bound(v, b) => {
                let mut inner = b.free_vars();
                inner.remove(v);
                out.extend(inner);
            }
            Mso::Subset(x, g) => {
                out.insert(x.clone());
                out.extend(g.free_vars());
            }
            Mso::Reach(r) => {
                out.insert(r.from.clone());
                out.insert(r.to.clone());
                if let Some(z) = &r.within {
                    out.insert(z.clone());
                }
                out.extend(r.edge.free_vars());
                if let Some(g) = &r.guard {
                    out.extend(g.free_vars());
                }
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Mso::True | Mso::False => {}
            Mso::Rel(_, args) => out.extend(args.iter().cloned()),
            Mso::In(a, b) | Mso::Eq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Mso::Not(a) | Mso::Tag(_, a) => a.collect_names(out),
            Mso::And(xs) | Mso::Or(xs) => xs.iter().for_each(|x| x.collect_names(out)),
            Mso::Implies(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Mso::Exists(v, b)
            | Mso::Forall(v, b)
            | Mso::ExistsSet(v, b)
            | Mso::ForallSet(v, b)
            | Mso::Bound(v, b) => {
                out.insert(v.clone());
                b.collect_names(out);
            }
            Mso::Subset(x, g) => {
                out.insert(x.clone());
                out.insert(g.var.clone());
                g.body.collect_names(out);
            }
            Mso::Reach(r) => {
                out.insert(r.from.clone());
                out.insert(r.to.clone());
                if let Some(z) = &r.within {
                    out.insert(z.clone());
                }
                out.insert(r.edge.x.clone());
                out.insert(r.edge.y.clone());
                r.edge.body.collect_names(out);
                if let Some(g) = &r.guard {
                    out.insert(g.var.clone());
                    g.body.collect_names(out);
                }
            }
        }
    }

    /// Capture-avoiding substitution of the free occurrences of `from`.
    pub fn substitute(&self, from: &str, to: &str) -> Mso {
        if from == to {
            return self.clone();
        }
        let r = |s: &String| if s == from { to.to_string() } else { s.clone() };
        match self {
            Mso::True | Mso::False => self.clone(),
            Mso::Rel(rel, args) => Mso::Rel(rel.clone(), args.iter().map(r).collect()),
            Mso::In(a, b) => Mso::In(r(a), r(b)),
            Mso::Eq(a, b) => Mso::Eq(r(a), r(b)),
            Mso::Not(a) => Mso::not(a.substitute(from, to)),
            Mso::Tag(l, a) => Mso::tag(*l, a.substitute(from, to)),
            Mso::And(xs) => Mso::And(xs.iter().map(|x| x.substitute(from, to)).collect()),
            Mso::Or(xs) => Mso::Or(xs.iter().map(|x| x.substitute(from, to)).collect()),
            Mso::Implies(a, b) => Mso::implies(a.substitute(from, to), b.substitute(from, to)),
            Mso::Exists(v, b)
            | Mso::Forall(v, b)
            | Mso::ExistsSet(v, b)
            | Mso::ForallSet(v, b)
            | Mso::Bound(v, b) => {
                let (v2, b2) = subst_binder(v, b, from, to);
                match self {
                    Mso::Exists(..) => Mso::Exists(v2, Box::new(b2)),
                    Mso::Forall(..) => Mso::Forall(v2, Box::new(b2)),
                    Mso::ExistsSet(..) => Mso::ExistsSet(v2, Box::new(b2)),
                    Mso::ForallSet(..) => Mso::ForallSet(v2, Box::new(b2)),
                    _ => Mso::Bound(v2, Box::new(b2)),
                }
            }
            Mso::Subset(x, g) => Mso::Subset(r(x), Box::new(subst_lambda1(g, from, to))),
            Mso::Reach(re) => Mso::Reach(Box::new(Reach {
                edge: subst_lambda2(&re.edge, from, to),
                from: r(&re.from),
                to: r(&re.to),
                within: re.within.as_ref().map(r),
                guard: re.guard.as_ref().map(|g| subst_lambda1(g, from, to)),
            })),
        }
    }

    /// Rewrites the macro nodes into plain MSO.
    pub fn expand(&self) -> Mso {
        let mut names = FreshNames::new("_e");
        let taken = self.all_names();
        self.expand_with(&mut names, &taken)
    }

    fn expand_with(&self, names: &mut FreshNames, taken: &BTreeSet<String>) -> Mso {
        let rec = |f: &Mso, names: &mut FreshNames| f.expand_with(names, taken);
        match self {
            Mso::True | Mso::False | Mso::Rel(..) | Mso::In(..) | Mso::Eq(..) => self.clone(),
            Mso::Not(a) => Mso::not(rec(a, names)),
            Mso::Tag(l, a) => Mso::tag(*l, rec(a, names)),
            Mso::And(xs) => Mso::And(xs.iter().map(|x| rec(x, names)).collect()),
            Mso::Or(xs) => Mso::Or(xs.iter().map(|x| rec(x, names)).collect()),
            Mso::Implies(a, b) => Mso::implies(rec(a, names), rec(b, names)),
            Mso::Exists(v, b) => Mso::exists(v, rec(b, names)),
            Mso::Forall(v, b) => Mso::forall(v, rec(b, names)),
            Mso::ExistsSet(v, b) => Mso::exists_set(v, rec(b, names)),
            Mso::ForallSet(v, b) => Mso::forall_set(v, rec(b, names)),
            Mso::Bound(v, b) => Mso::bound(v, rec(b, names)),
            Mso::Subset(x, g) => {
                let v = names.next(taken);
                Mso::forall(
                    &v,
                    Mso::implies(Mso::member(&v, x), rec(&g.apply(&v), names)),
                )
            }
            Mso::Reach(r) => {
                let (ys, xv, yv) = (names.next(taken), names.next(taken), names.next(taken));
                let edge = rec(&r.edge.apply(&xv, &yv), names);
                let guard = r.guard.as_ref().map(|g| Lambda1::new(&g.var, rec(&g.body, names)));
                let mut step = vec![Mso::member(&xv, &ys)];
                if let Some(g) = &guard {
                    step.push(g.apply(&xv));
                    step.push(g.apply(&yv));
                }
                if let Some(z) = &r.within {
                    step.push(Mso::member(&yv, z));
                }
                step.push(edge);
                let closed = Mso::forall(
                    &xv,
                    Mso::forall(&yv, Mso::implies(Mso::And(step), Mso::member(&yv, &ys))),
                );
                let premise = Mso::And(vec![Mso::member(&r.from, &ys), closed]);
                let mut body = Mso::implies(premise, Mso::member(&r.to, &ys));
                if let Some(g) = &guard {
                    let v = names.next(taken);
                    let inside = Mso::forall(&v, Mso::implies(Mso::member(&v, &ys), g.apply(&v)));
                    body = Mso::implies(inside, body);
                }
                let core = Mso::forall_set(&ys, body);
                match &r.within {
                    Some(z) => Mso::And(vec![Mso::member(&r.from, z), core]),
                    None => core,
                }
            }
        }
    }

    /// Whether a bounding quantifier occurs.
    pub fn has_bound(&self) -> bool {
        match self {
            Mso::True | Mso::False | Mso::Rel(..) | Mso::In(..) | Mso::Eq(..) => false,
            Mso::Bound(..) => true,
            Mso::Not(a) | Mso::Tag(_, a) => a.has_bound(),
            Mso::And(xs) | Mso::Or(xs) => xs.iter().any(Mso::has_bound),
            Mso::Implies(a, b) => a.has_bound() || b.has_bound(),
            Mso::Exists(_, b) | Mso::Forall(_, b) | Mso::ExistsSet(_, b) | Mso::ForallSet(_, b) => {
                b.has_bound()
            }
            Mso::Subset(_, g) => g.body.has_bound(),
            Mso::Reach(r) => {
                r.edge.body.has_bound() || r.guard.as_ref().is_some_and(|g| g.body.has_bound())
            }
        }
    }

    /// Number of syntax tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Mso::True | Mso::False | Mso::Rel(..) | Mso::In(..) | Mso::Eq(..) => 1,
            Mso::Not(a) | Mso::Tag(_, a) => 1 + a.size(),
            Mso::And(xs) | Mso::Or(xs) => 1 + xs.iter().map(Mso::size).sum::<usize>(),
            Mso::Implies(a, b) => 1 + a.size() + b.size(),
            Mso::Exists(_, b)
            | Mso::Forall(_, b)
            | Mso::ExistsSet(_, b)
            | Mso::ForallSet(_, b)
            | Mso::Bound(_, b) => 1 + b.size(),
            Mso::Subset(_, g) => 1 + g.body.size(),
            Mso::Reach(r) => 1 + r.edge.body.size() + r.guard.as_ref().map_or(0, |g| g.body.size()),
        }
    }

    /// Relation symbols used in atoms.
    pub fn relations(&self) -> BTreeSet<RelationSymbol> {
        let mut out = BTreeSet::new();
        self.collect_relations(&mut out);
        out
    }

    fn collect_relations(&self, out: &mut BTreeSet<RelationSymbol>) {
        match self {
            Mso::True | Mso::False | Mso::In(..) | Mso::Eq(..) => {}
            Mso::Rel(r, _) => {
                out.insert(r.clone());
            }
            Mso::Not(a) | Mso::Tag(_, a) => a.collect_relations(out),
            Mso::And(xs) | Mso::Or(xs) => xs.iter().for_each(|x| x.collect_relations(out)),
            Mso::Implies(a, b) => {
                a.collect_relations(out);
                b.collect_relations(out);
            }
            Mso::Exists(_, b)
            | Mso::Forall(_, b)
            | Mso::ExistsSet(_, b)
            | Mso::ForallSet(_, b)
            | Mso::Bound(_, b) => b.collect_relations(out),
            Mso::Subset(_, g) => g.body.collect_relations(out),
            Mso::Reach(r) => {
                r.edge.body.collect_relations(out);
                if let Some(g) = &r.guard {
                    g.body.collect_relations(out);
                }
            }
        }
    }
}

fn subst_binder(v: &str, body: &Mso, from: &str, to: &str) -> (String, Mso) {
    if v == from {
        return (v.to_string(), body.clone());
    }
    if v == to && body.free_vars().contains(from) {
        let mut taken = body.all_names();
        taken.insert(to.to_string());
        taken.insert(from.to_string());
        let fresh = FreshNames::new(v).next(&taken);
        let renamed = body.substitute(v, &fresh);
        return (fresh, renamed.substitute(from, to));
    }
    (v.to_string(), body.substitute(from, to))
}

fn subst_lambda1(g: &Lambda1, from: &str, to: &str) -> Lambda1 {
    let (v, b) = subst_binder(&g.var, &g.body, from, to);
    Lambda1 { var: v, body: b }
}

fn subst_lambda2(e: &Lambda2, from: &str, to: &str) -> Lambda2 {
    if e.x == from || e.y == from {
        return e.clone();
    }
    let mut x = e.x.clone();
    let mut y = e.y.clone();
    let mut body = e.body.clone();
    if body.free_vars().contains(from) {
        let mut taken = body.all_names();
        taken.insert(to.to_string());
        taken.insert(from.to_string());
        for v in [&mut x, &mut y] {
            if v == to {
                let fresh = FreshNames::new(v).next(&taken);
                taken.insert(fresh.clone());
                body = body.substitute(v, &fresh);
                *v = fresh;
            }
        }
        body = body.substitute(from, to);
    }
    Lambda2 { x, y, body }
}

/// Determines which logic a sentence belongs to. Tagged subtrees report
/// their tag; untagged leaves count as WMSO+B when they use the bounding
/// quantifier and as MSO otherwise.
pub fn classify(f: &Mso) -> Classification {
    match f {
        Mso::Tag(l, _) => Classification::Pure(*l),
        Mso::Not(a) => classify(a),
        Mso::And(xs) | Mso::Or(xs) if xs.iter().any(has_tag) => combine(xs.iter().map(classify)),
        Mso::Implies(a, b) if has_tag(a) || has_tag(b) => {
            combine([classify(a), classify(b)].into_iter())
        }
        other => Classification::Pure(if other.has_bound() { Logic::WmsoB } else { Logic::Mso }),
    }
}

fn has_tag(f: &Mso) -> bool {
    match f {
        Mso::Tag(..) => true,
        Mso::Not(a) => has_tag(a),
        Mso::And(xs) | Mso::Or(xs) => xs.iter().any(has_tag),
        Mso::Implies(a, b) => has_tag(a) || has_tag(b),
        _ => false,
    }
}

fn combine(mut it: impl Iterator<Item = Classification>) -> Classification {
    let first = match it.next() {
        Some(c) => c,
        None => return Classification::Pure(Logic::Mso),
    };
    for c in it {
        if c != first {
            return Classification::BooleanCombination;
        }
    }
    first
}

/// Whether every bounding quantifier lies inside a subtree tagged WMSO+B.
pub fn bound_only_under_wmsob(f: &Mso) -> bool {
    match f {
        Mso::Tag(Logic::WmsoB, _) => true,
        Mso::Tag(_, a) => !a.has_bound(),
        Mso::Not(a) => bound_only_under_wmsob(a),
        Mso::And(xs) | Mso::Or(xs) => xs.iter().all(bound_only_under_wmsob),
        Mso::Implies(a, b) => bound_only_under_wmsob(a) && bound_only_under_wmsob(b),
        other => !other.has_bound(),
    }
}
