//! Positive-existential interpretations of one domain in another.
//!
//! An interpretation of width `n` represents each source element by an
//! `n`-tuple of target values. A formula over the source domain is
//! translated by splitting every register `x` into `x_1 … x_n`, replacing
//! each constraint by the defining formula of its relation, and adding
//! `A G` of the domain formula for every register.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{AllenRelation, ConcreteDomain, PosFormula, PositiveExistentialFormula, Slot, Value, LEX_LESS};
use crate::error::{Error, Result};
use crate::formula::{AtomicConstraint, PathFormula, RelKind, RelationSymbol, StateFormula, Term};
use crate::util::FreshNames;

/// A positive-existential interpretation of `source` in `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistentialInterpretation {
    pub source: ConcreteDomain,
    pub target: ConcreteDomain,
    pub width: usize,
    /// Defines which tuples encode source elements; `width` parameters.
    pub domain_formula: PositiveExistentialFormula,
    /// For a relation of arity `k`, a formula with `k * width` parameters;
    /// parameter `a * width + c` is component `c` of argument `a`.
    pub relations: BTreeMap<RelationSymbol, PositiveExistentialFormula>,
}

impl ExistentialInterpretation {
    /// The defining formula of `rel`, resolving alternative spellings.
    pub fn relation_formula(&self, rel: &RelationSymbol) -> Option<&PositiveExistentialFormula> {
        if let Some(f) = self.relations.get(rel) {
            return Some(f);
        }
        match (&self.source, rel.kind()) {
            (ConcreteDomain::AllenZ, RelKind::Named(n)) => {
                AllenRelation::from_name(n).and_then(|r| self.relations.get(&r.symbol()))
            }
            _ => None,
        }
    }

    /// Target tuple representing a source value.
    pub fn encode_value(&self, v: &Value) -> Option<Vec<Value>> {
        if !self.source.contains(v) {
            return None;
        }
        match v {
            Value::Interval(s, e) => Some(vec![Value::Int(*s), Value::Int(*e)]),
            Value::Tuple(t) => Some(t.iter().map(|x| Value::Int(*x)).collect()),
            other if self.width == 1 => Some(vec![other.clone()]),
            _ => None,
        }
    }

    /// Source value represented by a target tuple, if it encodes one.
    pub fn decode_values(&self, parts: &[Value]) -> Option<Value> {
        if parts.len() != self.width {
            return None;
        }
        let v = match self.source {
            ConcreteDomain::AllenZ => Value::Interval(parts[0].as_int()?, parts[1].as_int()?),
            ConcreteDomain::LexZ(_) => Value::Tuple(
                parts
                    .iter()
                    .map(Value::as_int)
                    .collect::<Option<Vec<_>>>()?,
            ),
            _ => parts[0].clone(),
        };
        self.source.contains(&v).then_some(v)
    }

    /// Name of component `c` (0-based) of register `x`.
    pub fn component_name(x: &str, c: usize) -> String {
        format!("{x}_{}", c + 1)
    }
}

/// Width-1 interpretation of a domain in itself mapping each listed symbol
/// to itself.
pub fn identity_interpretation(
    domain: &ConcreteDomain,
    symbols: &[RelationSymbol],
) -> Result<ExistentialInterpretation> {
    let mut relations = BTreeMap::new();
    for s in symbols {
        domain.check_symbol(s)?;
        let slots = (0..s.arity()).map(Slot::Param).collect();
        relations.insert(
            s.clone(),
            PositiveExistentialFormula::new(s.arity(), 0, PosFormula::atom(s.clone(), slots))?,
        );
    }
    Ok(ExistentialInterpretation {
        source: domain.clone(),
        target: domain.clone(),
        width: 1,
        domain_formula: PositiveExistentialFormula::new(1, 0, PosFormula::True)?,
        relations,
    })
}

/// `ℤ^n` with the lexicographic order, interpreted in `ℤ`.
pub fn lex_interpretation(n: usize) -> Result<ExistentialInterpretation> {
    if n == 0 {
        return Err(Error::UnknownDomain(String::from("lexZ[0]")));
    }
    let lt = RelationSymbol::less;
    let eq = RelationSymbol::equal;
    let (x, y) = (|c: usize| Slot::Param(c), |c: usize| Slot::Param(n + c));
    let mut disjuncts = Vec::new();
    for k in 0..n {
        let mut conj: Vec<PosFormula> = (0..k).map(|j| PosFormula::atom(eq(), vec![x(j), y(j)])).collect();
        conj.push(PosFormula::atom(lt(), vec![x(k), y(k)]));
        disjuncts.push(if conj.len() == 1 {
            conj.pop().unwrap()
        } else {
            PosFormula::And(conj)
        });
    }
    let equal = PosFormula::And((0..n).map(|j| PosFormula::atom(eq(), vec![x(j), y(j)])).collect());
    let mut relations = BTreeMap::new();
    relations.insert(
        RelationSymbol::named(LEX_LESS, 2)?,
        PositiveExistentialFormula::new(2 * n, 0, PosFormula::Or(disjuncts))?,
    );
    relations.insert(eq(), PositiveExistentialFormula::new(2 * n, 0, equal)?);
    Ok(ExistentialInterpretation {
        source: ConcreteDomain::LexZ(n),
        target: ConcreteDomain::Z,
        width: n,
        domain_formula: PositiveExistentialFormula::new(n, 0, PosFormula::True)?,
        relations,
    })
}

/// Integer intervals with Allen's relations, interpreted in `ℤ` by their
/// endpoints.
pub fn allen_interpretation() -> Result<ExistentialInterpretation> {
    use Slot::Param;
    let lt = |a: usize, b: usize| PosFormula::atom(RelationSymbol::less(), vec![Param(a), Param(b)]);
    let eq = |a: usize, b: usize| PosFormula::atom(RelationSymbol::equal(), vec![Param(a), Param(b)]);
    // Components: 0 = start of I, 1 = end of I, 2 = start of J, 3 = end of J.
    let (is, ie, js, je) = (0, 1, 2, 3);
    let mut relations = BTreeMap::new();
    for r in AllenRelation::ALL {
        let body = match r {
            AllenRelation::Before => lt(ie, js),
            AllenRelation::After => lt(je, is),
            AllenRelation::Meets => eq(ie, js),
            AllenRelation::MetBy => eq(je, is),
            AllenRelation::Overlaps => PosFormula::And(vec![lt(is, js), lt(js, ie), lt(ie, je)]),
            AllenRelation::OverlappedBy => PosFormula::And(vec![lt(js, is), lt(is, je), lt(je, ie)]),
            AllenRelation::During => PosFormula::And(vec![lt(js, is), lt(ie, je)]),
            AllenRelation::Contains => PosFormula::And(vec![lt(is, js), lt(je, ie)]),
            AllenRelation::Starts => PosFormula::And(vec![eq(is, js), lt(ie, je)]),
            AllenRelation::StartedBy => PosFormula::And(vec![eq(is, js), lt(je, ie)]),
            AllenRelation::Finishes => PosFormula::And(vec![eq(ie, je), lt(js, is)]),
            AllenRelation::FinishedBy => PosFormula::And(vec![eq(ie, je), lt(is, js)]),
        };
        relations.insert(r.symbol(), PositiveExistentialFormula::new(4, 0, body)?);
    }
    relations.insert(
        RelationSymbol::equal(),
        PositiveExistentialFormula::new(4, 0, PosFormula::And(vec![eq(is, js), eq(ie, je)]))?,
    );
    Ok(ExistentialInterpretation {
        source: ConcreteDomain::AllenZ,
        target: ConcreteDomain::Z,
        width: 2,
        domain_formula: PositiveExistentialFormula::new(2, 0, lt(0, 1))?,
        relations,
    })
}

/// Translates a formula over the source domain into one over the target.
///
/// Existentially quantified variables of a defining formula become fresh
/// registers read at the constraint's largest offset. This is only sound
/// in positive positions, so a negated occurrence of such a relation is
/// rejected.
pub fn apply_interpretation(
    interp: &ExistentialInterpretation,
    phi: &StateFormula,
) -> Result<StateFormula> {
    let vars = phi.variables();
    let mut taken: BTreeSet<String> = vars.iter().cloned().collect();
    let mut generated = BTreeSet::new();
    for x in &vars {
        for c in 0..interp.width {
            let name = ExistentialInterpretation::component_name(x, c);
            if taken.contains(&name) || !generated.insert(name.clone()) {
                return Err(Error::NameCollision(name));
            }
        }
    }
    taken.extend(generated);
    let mut tr = Translator {
        interp,
        taken,
        fresh: FreshNames::new("__z"),
        assigned: BTreeMap::new(),
    };
    let body = tr.state(phi, true)?;
    if interp.domain_formula.is_true() || vars.is_empty() {
        return Ok(body);
    }
    let mut conj = Vec::new();
    let mut dom_fresh = FreshNames::new("__w");
    for x in &vars {
        let params: Vec<Term> = (0..interp.width)
            .map(|c| Term::now(&ExistentialInterpretation::component_name(x, c)))
            .collect();
        let mut fresh = Vec::new();
        for _ in 0..interp.domain_formula.fresh {
            let n = dom_fresh.next(&tr.taken);
            tr.taken.insert(n.clone());
            fresh.push(Term::now(&n));
        }
        conj.push(interp.domain_formula.instantiate(&params, &fresh)?);
    }
    let invariant = StateFormula::all(PathFormula::globally(PathFormula::conjunction(conj)));
    Ok(StateFormula::and(body, invariant))
}

struct Translator<'a> {
    interp: &'a ExistentialInterpretation,
    taken: BTreeSet<String>,
    fresh: FreshNames,
    assigned: BTreeMap<AtomicConstraint, Vec<String>>,
}

impl Translator<'_> {
    fn state(&mut self, f: &StateFormula, positive: bool) -> Result<StateFormula> {
        Ok(match f {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => f.clone(),
            StateFormula::Not(a) => StateFormula::not(self.state(a, !positive)?),
            StateFormula::And(a, b) => {
                StateFormula::and(self.state(a, positive)?, self.state(b, positive)?)
            }
            StateFormula::Or(a, b) => {
                StateFormula::or(self.state(a, positive)?, self.state(b, positive)?)
            }
            StateFormula::Exists(p) => StateFormula::exists(self.path(p, positive)?),
            StateFormula::All(p) => StateFormula::all(self.path(p, positive)?),
        })
    }

    fn path(&mut self, p: &PathFormula, positive: bool) -> Result<PathFormula> {
        Ok(match p {
            PathFormula::State(s) => PathFormula::state(self.state(s, positive)?),
            PathFormula::Constraint(c) => self.constraint(c, positive)?,
            PathFormula::Not(a) => PathFormula::not(self.path(a, !positive)?),
            PathFormula::And(a, b) => {
                PathFormula::and(self.path(a, positive)?, self.path(b, positive)?)
            }
            PathFormula::Or(a, b) => {
                PathFormula::or(self.path(a, positive)?, self.path(b, positive)?)
            }
            PathFormula::Next(a) => PathFormula::next(self.path(a, positive)?),
            PathFormula::Until(a, b) => {
                PathFormula::until(self.path(a, positive)?, self.path(b, positive)?)
            }
            PathFormula::Release(a, b) => {
                PathFormula::release(self.path(a, positive)?, self.path(b, positive)?)
            }
        })
    }

    fn constraint(&mut self, c: &AtomicConstraint, positive: bool) -> Result<PathFormula> {
        let def = self
            .interp
            .relation_formula(c.relation())
            .ok_or_else(|| Error::UnsupportedSymbol {
                domain: self.interp.source.to_string(),
                symbol: c.relation().name(),
            })?
            .clone();
        if def.fresh > 0 && !positive {
            return Err(Error::Unsupported(format!(
                "relation {} has an existential definition and occurs negatively",
                c.relation()
            )));
        }
        let width = self.interp.width;
        let params: Vec<Term> = c
            .args()
            .iter()
            .flat_map(|t| {
                (0..width).map(move |k| {
                    Term::new(t.offset, &ExistentialInterpretation::component_name(&t.var, k))
                })
            })
            .collect();
        if !self.assigned.contains_key(c) {
            let mut names = Vec::new();
            for _ in 0..def.fresh {
                let n = self.fresh.next(&self.taken);
                self.taken.insert(n.clone());
                names.push(n);
            }
            self.assigned.insert(c.clone(), names);
        }
        let depth = c.depth();
        let fresh: Vec<Term> = self.assigned[c].iter().map(|n| Term::new(depth, n)).collect();
        def.instantiate(&params, &fresh)
    }
}
