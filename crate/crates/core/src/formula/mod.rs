//! CTL* formulas with constraints.
//!
//! State formulas are evaluated at a node, path formulas along an infinite
//! path. Constraints compare register values at bounded offsets along the
//! path: `lt(x, X^1 y)` says the current value of `x` is smaller than the
//! value of `y` one step later.
//!
//! Formulas built through the smart constructors ([`PathFormula::and`] and
//! friends) keep a canonical shape in which pure state subformulas of a
//! path formula are wrapped in a single [`PathFormula::State`]. The parser
//! produces canonical trees, and printing followed by reparsing is the
//! identity on them.

mod parse;
mod print;
mod rewrite;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Rational;

pub use parse::{parse_formula, parse_path_formula, ParseOptions};
pub use rewrite::{
    abstract_constraints, concretize, count_e, to_nnf, to_nnf_path, to_snnf, AbstractionTable,
    CountMode, TableEntry,
};

/// The kind of a relation symbol. Ordering puts the built-in symbols first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelKind {
    /// Binary strict order `lt`.
    Less,
    /// Binary equality `eq`.
    Equal,
    /// Unary `eqc[c]`: the value equals the constant.
    Constant(Rational),
    /// Unary `mod[a,b]`: the value is congruent to `a` modulo `b`.
    Modulo { residue: i64, modulus: i64 },
    /// Any other relation, interpreted by the concrete domain.
    Named(String),
}

/// A relation symbol with its arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSymbol {
    kind: RelKind,
    arity: usize,
}

impl RelationSymbol {
    pub fn less() -> Self {
        RelationSymbol {
            kind: RelKind::Less,
            arity: 2,
        }
    }

    pub fn equal() -> Self {
        RelationSymbol {
            kind: RelKind::Equal,
            arity: 2,
        }
    }

    pub fn constant(c: Rational) -> Self {
        RelationSymbol {
            kind: RelKind::Constant(c),
            arity: 1,
        }
    }

    pub fn int_constant(c: i64) -> Self {
        Self::constant(Rational::from_integer(c))
    }

    /// `mod[a,b]`; requires `b ≥ 2` and `0 ≤ a < b`.
    pub fn modulo(residue: i64, modulus: i64) -> Result<Self> {
        if modulus < 2 || residue < 0 || residue >= modulus {
            return Err(Error::InvalidRelation(format!(
                "mod[{residue},{modulus}] needs modulus >= 2 and 0 <= residue < modulus"
            )));
        }
        Ok(RelationSymbol {
            kind: RelKind::Modulo { residue, modulus },
            arity: 1,
        })
    }

    pub fn named(name: &str, arity: usize) -> Result<Self> {
        if !is_identifier(name) || matches!(name, "lt" | "eq" | "eqc" | "mod") {
            return Err(Error::InvalidRelation(name.to_string()));
        }
        Ok(RelationSymbol {
            kind: RelKind::Named(name.to_string()),
            arity,
        })
    }

    /// Parses a printed symbol name such as `lt`, `eqc[1/2]` or `mod[1,3]`.
    pub fn from_name(name: &str, arity: usize) -> Result<Self> {
        let sym = match name {
            "lt" => Self::less(),
            "eq" => Self::equal(),
            _ => {
                if let Some(body) = name.strip_prefix("eqc[").and_then(|s| s.strip_suffix(']')) {
                    Self::constant(parse_rational(body.trim()).ok_or_else(|| {
                        Error::InvalidRelation(name.to_string())
                    })?)
                } else if let Some(body) = name.strip_prefix("mod[").and_then(|s| s.strip_suffix(']'))
                {
                    let mut parts = body.split(',');
                    let a = parts.next().and_then(|s| s.trim().parse::<i64>().ok());
                    let b = parts.next().and_then(|s| s.trim().parse::<i64>().ok());
                    match (a, b, parts.next()) {
                        (Some(a), Some(b), None) => Self::modulo(a, b)?,
                        _ => return Err(Error::InvalidRelation(name.to_string())),
                    }
                } else {
                    Self::named(name, arity)?
                }
            }
        };
        if sym.arity != arity {
            return Err(Error::ArityMismatch {
                symbol: name.to_string(),
                expected: sym.arity,
                found: arity,
            });
        }
        Ok(sym)
    }

    pub fn kind(&self) -> &RelKind {
        &self.kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The printed name, e.g. `eqc[3]`.
    pub fn name(&self) -> String {
        match &self.kind {
            RelKind::Less => "lt".to_string(),
            RelKind::Equal => "eq".to_string(),
            RelKind::Constant(c) => format!("eqc[{c}]"),
            RelKind::Modulo { residue, modulus } => format!("mod[{residue},{modulus}]"),
            RelKind::Named(n) => n.clone(),
        }
    }

    /// The constant of an `eqc` symbol.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.kind {
            RelKind::Constant(c) => Some(c),
            _ => None,
        }
    }

    /// The `(residue, modulus)` pair of a `mod` symbol.
    pub fn modulo_value(&self) -> Option<(i64, i64)> {
        match self.kind {
            RelKind::Modulo { residue, modulus } => Some((residue, modulus)),
            _ => None,
        }
    }
}

impl core::fmt::Display for RelationSymbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.name())
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse::<i64>().ok()?;
            let d = d.trim().parse::<i64>().ok()?;
            if d == 0 {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A register variable read `offset` steps ahead on the current path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub offset: usize,
    pub var: String,
}

impl Term {
    pub fn new(offset: usize, var: &str) -> Self {
        Term {
            offset,
            var: var.to_string(),
        }
    }

    pub fn now(var: &str) -> Self {
        Self::new(0, var)
    }
}

/// An atomic constraint `r(X^{i1} x1, …, X^{ik} xk)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicConstraint {
    rel: RelationSymbol,
    args: Vec<Term>,
}

impl AtomicConstraint {
    pub fn new(rel: RelationSymbol, args: Vec<Term>) -> Result<Self> {
        if rel.arity() != args.len() {
            return Err(Error::ArityMismatch {
                symbol: rel.name(),
                expected: rel.arity(),
                found: args.len(),
            });
        }
        Ok(AtomicConstraint { rel, args })
    }

    pub fn relation(&self) -> &RelationSymbol {
        &self.rel
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    /// The largest offset among the arguments.
    pub fn depth(&self) -> usize {
        self.args.iter().map(|t| t.offset).max().unwrap_or(0)
    }
}

/// CTL* state formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateFormula {
    True,
    False,
    Prop(String),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
    Exists(Box<PathFormula>),
    All(Box<PathFormula>),
}

/// CTL* path formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathFormula {
    State(Box<StateFormula>),
    Constraint(AtomicConstraint),
    Not(Box<PathFormula>),
    And(Box<PathFormula>, Box<PathFormula>),
    Or(Box<PathFormula>, Box<PathFormula>),
    Next(Box<PathFormula>),
    Until(Box<PathFormula>, Box<PathFormula>),
    Release(Box<PathFormula>, Box<PathFormula>),
}

impl StateFormula {
    pub fn prop(name: &str) -> Self {
        StateFormula::Prop(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: StateFormula) -> Self {
        StateFormula::Not(Box::new(f))
    }

    pub fn and(a: StateFormula, b: StateFormula) -> Self {
        StateFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StateFormula, b: StateFormula) -> Self {
        StateFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(p: PathFormula) -> Self {
        StateFormula::Exists(Box::new(p))
    }

    pub fn all(p: PathFormula) -> Self {
        StateFormula::All(Box::new(p))
    }

    /// Conjunction of a list, `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = StateFormula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => StateFormula::True,
            Some(first) => it.fold(first, StateFormula::and),
        }
    }

    /// Variables occurring in constraints, in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_constraints(&mut |c| {
            for t in c.args() {
                if !out.contains(&t.var) {
                    out.push(t.var.clone());
                }
            }
        });
        out
    }

    /// Atomic propositions, sorted.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_props(&mut |p| {
            out.insert(p.to_string());
        });
        out
    }

    /// Distinct atomic constraints in order of first occurrence.
    pub fn constraints(&self) -> Vec<AtomicConstraint> {
        let mut out: Vec<AtomicConstraint> = Vec::new();
        self.visit_constraints(&mut |c| {
            if !out.contains(c) {
                out.push(c.clone());
            }
        });
        out
    }

    /// Relation symbols used in constraints.
    pub fn relations(&self) -> BTreeSet<RelationSymbol> {
        let mut out = BTreeSet::new();
        self.visit_constraints(&mut |c| {
            out.insert(c.relation().clone());
        });
        out
    }

    pub(crate) fn visit_constraints(&self, f: &mut dyn FnMut(&AtomicConstraint)) {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => {}
            StateFormula::Not(a) => a.visit_constraints(f),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => {
                a.visit_constraints(f);
                b.visit_constraints(f);
            }
            StateFormula::Exists(p) | StateFormula::All(p) => p.visit_constraints(f),
        }
    }

    pub(crate) fn visit_props(&self, f: &mut dyn FnMut(&str)) {
        match self {
            StateFormula::True | StateFormula::False => {}
            StateFormula::Prop(p) => f(p),
            StateFormula::Not(a) => a.visit_props(f),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => {
                a.visit_props(f);
                b.visit_props(f);
            }
            StateFormula::Exists(p) | StateFormula::All(p) => p.visit_props(f),
        }
    }

    /// True when negation only occurs directly in front of propositions
    /// (and of constraints inside path formulas).
    pub fn is_nnf(&self) -> bool {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => true,
            StateFormula::Not(a) => matches!(**a, StateFormula::Prop(_)),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => a.is_nnf() && b.is_nnf(),
            StateFormula::Exists(p) | StateFormula::All(p) => p.is_nnf(),
        }
    }

    /// NNF with no negated constraint anywhere.
    pub fn is_snnf(&self) -> bool {
        self.is_nnf() && !self.has_negated_constraint()
    }

    fn has_negated_constraint(&self) -> bool {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => false,
            StateFormula::Not(a) => a.has_negated_constraint(),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => {
                a.has_negated_constraint() || b.has_negated_constraint()
            }
            StateFormula::Exists(p) | StateFormula::All(p) => p.has_negated_constraint(),
        }
    }

    /// True when no path quantifier occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => true,
            StateFormula::Not(a) => a.is_propositional(),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            StateFormula::Exists(_) | StateFormula::All(_) => false,
        }
    }

    /// Number of syntax tree nodes.
    pub fn size(&self) -> usize {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => 1,
            StateFormula::Not(a) => 1 + a.size(),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => 1 + a.size() + b.size(),
            StateFormula::Exists(p) | StateFormula::All(p) => 1 + p.size(),
        }
    }
}

impl PathFormula {
    /// Wraps a state formula, keeping canonical shape.
    pub fn state(s: StateFormula) -> Self {
        PathFormula::State(Box::new(s))
    }

    pub fn constraint(c: AtomicConstraint) -> Self {
        PathFormula::Constraint(c)
    }

    /// Negation; a negated state formula stays a state formula.
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: PathFormula) -> Self {
        match p {
            PathFormula::State(s) => PathFormula::State(Box::new(StateFormula::Not(s))),
            other => PathFormula::Not(Box::new(other)),
        }
    }

    /// Conjunction; two state formulas are combined at state level.
    pub fn and(a: PathFormula, b: PathFormula) -> Self {
        match (a, b) {
            (PathFormula::State(x), PathFormula::State(y)) => {
                PathFormula::State(Box::new(StateFormula::And(x, y)))
            }
            (a, b) => PathFormula::And(Box::new(a), Box::new(b)),
        }
    }

    /// Disjunction; two state formulas are combined at state level.
    pub fn or(a: PathFormula, b: PathFormula) -> Self {
        match (a, b) {
            (PathFormula::State(x), PathFormula::State(y)) => {
                PathFormula::State(Box::new(StateFormula::Or(x, y)))
            }
            (a, b) => PathFormula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn next(p: PathFormula) -> Self {
        PathFormula::Next(Box::new(p))
    }

    pub fn until(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::Release(Box::new(a), Box::new(b))
    }

    /// `F ψ`, i.e. `true U ψ`.
    pub fn eventually(p: PathFormula) -> Self {
        Self::until(Self::state(StateFormula::True), p)
    }

    /// `G ψ`, i.e. `false R ψ`.
    pub fn globally(p: PathFormula) -> Self {
        Self::release(Self::state(StateFormula::False), p)
    }

    /// Conjunction of a list, `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = PathFormula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => PathFormula::state(StateFormula::True),
            Some(first) => it.fold(first, PathFormula::and),
        }
    }

    /// Disjunction of a list, `false` when empty.
    pub fn disjunction<I: IntoIterator<Item = PathFormula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => PathFormula::state(StateFormula::False),
            Some(first) => it.fold(first, PathFormula::or),
        }
    }

    pub(crate) fn visit_constraints(&self, f: &mut dyn FnMut(&AtomicConstraint)) {
        match self {
            PathFormula::State(s) => s.visit_constraints(f),
            PathFormula::Constraint(c) => f(c),
            PathFormula::Not(a) | PathFormula::Next(a) => a.visit_constraints(f),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Until(a, b)
            | PathFormula::Release(a, b) => {
                a.visit_constraints(f);
                b.visit_constraints(f);
            }
        }
    }

    pub(crate) fn visit_props(&self, f: &mut dyn FnMut(&str)) {
        match self {
            PathFormula::State(s) => s.visit_props(f),
            PathFormula::Constraint(_) => {}
            PathFormula::Not(a) | PathFormula::Next(a) => a.visit_props(f),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Until(a, b)
            | PathFormula::Release(a, b) => {
                a.visit_props(f);
                b.visit_props(f);
            }
        }
    }

    /// Distinct atomic constraints in order of first occurrence.
    pub fn constraints(&self) -> Vec<AtomicConstraint> {
        let mut out: Vec<AtomicConstraint> = Vec::new();
        self.visit_constraints(&mut |c| {
            if !out.contains(c) {
                out.push(c.clone());
            }
        });
        out
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            PathFormula::State(s) => s.is_nnf(),
            PathFormula::Constraint(_) => true,
            PathFormula::Not(a) => matches!(**a, PathFormula::Constraint(_)),
            PathFormula::Next(a) => a.is_nnf(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Until(a, b)
            | PathFormula::Release(a, b) => a.is_nnf() && b.is_nnf(),
        }
    }

    pub(crate) fn has_negated_constraint(&self) -> bool {
        match self {
            PathFormula::State(s) => s.has_negated_constraint(),
            PathFormula::Constraint(_) => false,
            PathFormula::Not(a) => {
                matches!(**a, PathFormula::Constraint(_)) || a.has_negated_constraint()
            }
            PathFormula::Next(a) => a.has_negated_constraint(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Until(a, b)
            | PathFormula::Release(a, b) => {
                a.has_negated_constraint() || b.has_negated_constraint()
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PathFormula::State(s) => s.size(),
            PathFormula::Constraint(_) => 1,
            PathFormula::Not(a) | PathFormula::Next(a) => 1 + a.size(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Until(a, b)
            | PathFormula::Release(a, b) => 1 + a.size() + b.size(),
        }
    }
}
