//! Positive-existential formulas: finite conjunctions and disjunctions of
//! relation atoms over parameters and existentially quantified variables.

use alloc::vec::Vec;

use super::{ConcreteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::{AtomicConstraint, PathFormula, RelationSymbol, StateFormula, Term};

/// Argument position of an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// The i-th parameter (free variable).
    Param(usize),
    /// The i-th existentially quantified variable.
    Fresh(usize),
}

/// Quantifier-free positive body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosFormula {
    True,
    False,
    Atom(RelationSymbol, Vec<Slot>),
    And(Vec<PosFormula>),
    Or(Vec<PosFormula>),
}

impl PosFormula {
    pub fn atom(rel: RelationSymbol, slots: Vec<Slot>) -> Self {
        PosFormula::Atom(rel, slots)
    }

    fn eval(&self, dom: &ConcreteDomain, params: &[Value], fresh: &[Value]) -> Result<bool> {
        Ok(match self {
            PosFormula::True => true,
            PosFormula::False => false,
            PosFormula::Atom(rel, slots) => {
                let args: Vec<Value> = slots
                    .iter()
                    .map(|s| match *s {
                        Slot::Param(i) => params[i].clone(),
                        Slot::Fresh(i) => fresh[i].clone(),
                    })
                    .collect();
                dom.eval_relation(rel, &args)?
            }
            PosFormula::And(xs) => {
                for x in xs {
                    if !x.eval(dom, params, fresh)? {
                        return Ok(false);
                    }
                }
                true
            }
            PosFormula::Or(xs) => {
                for x in xs {
                    if x.eval(dom, params, fresh)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    fn max_slots(&self, params: &mut usize, fresh: &mut usize) {
        match self {
            PosFormula::True | PosFormula::False => {}
            PosFormula::Atom(_, slots) => {
                for s in slots {
                    match *s {
                        Slot::Param(i) => *params = (*params).max(i + 1),
                        Slot::Fresh(i) => *fresh = (*fresh).max(i + 1),
                    }
                }
            }
            PosFormula::And(xs) | PosFormula::Or(xs) => {
                xs.iter().for_each(|x| x.max_slots(params, fresh))
            }
        }
    }

    fn to_path(&self, params: &[Term], fresh: &[Term]) -> Result<PathFormula> {
        Ok(match self {
            PosFormula::True => PathFormula::state(StateFormula::True),
            PosFormula::False => PathFormula::state(StateFormula::False),
            PosFormula::Atom(rel, slots) => {
                let args = slots
                    .iter()
                    .map(|s| match *s {
                        Slot::Param(i) => params[i].clone(),
                        Slot::Fresh(i) => fresh[i].clone(),
                    })
                    .collect();
                PathFormula::Constraint(AtomicConstraint::new(rel.clone(), args)?)
            }
            PosFormula::And(xs) => PathFormula::conjunction(
                xs.iter()
                    .map(|x| x.to_path(params, fresh))
                    .collect::<Result<Vec<_>>>()?,
            ),
            PosFormula::Or(xs) => PathFormula::disjunction(
                xs.iter()
                    .map(|x| x.to_path(params, fresh))
                    .collect::<Result<Vec<_>>>()?,
            ),
        })
    }
}

/// `∃ z_1 … z_fresh . body(params, z)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositiveExistentialFormula {
    pub params: usize,
    pub fresh: usize,
    pub body: PosFormula,
}

impl PositiveExistentialFormula {
    /// Builds the formula, checking that every slot index is in range.
    pub fn new(params: usize, fresh: usize, body: PosFormula) -> Result<Self> {
        let (mut p, mut f) = (0, 0);
        body.max_slots(&mut p, &mut f);
        if p > params || f > fresh {
            return Err(Error::InvalidRelation(alloc::format!(
                "formula uses {p} parameters and {f} bound variables, declared {params} and {fresh}"
            )));
        }
        Ok(PositiveExistentialFormula {
            params,
            fresh,
            body,
        })
    }

    pub fn is_true(&self) -> bool {
        self.body == PosFormula::True
    }

    /// Evaluates the formula with the bound variables ranging over
    /// `candidates` (a finite search space chosen by the caller).
    pub fn holds(&self, dom: &ConcreteDomain, params: &[Value], candidates: &[Value]) -> Result<bool> {
        if params.len() != self.params {
            return Err(Error::ArityMismatch {
                symbol: alloc::string::String::from("positive-existential formula"),
                expected: self.params,
                found: params.len(),
            });
        }
        let mut fresh = Vec::with_capacity(self.fresh);
        self.search(dom, params, candidates, &mut fresh)
    }

    fn search(
        &self,
        dom: &ConcreteDomain,
        params: &[Value],
        candidates: &[Value],
        fresh: &mut Vec<Value>,
    ) -> Result<bool> {
        if fresh.len() == self.fresh {
            return self.body.eval(dom, params, fresh);
        }
        for c in candidates {
            fresh.push(c.clone());
            let ok = self.search(dom, params, candidates, fresh)?;
            fresh.pop();
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Substitutes terms for parameters and bound variables, producing a
    /// positive path formula.
    pub fn instantiate(&self, params: &[Term], fresh: &[Term]) -> Result<PathFormula> {
        if params.len() != self.params || fresh.len() != self.fresh {
            return Err(Error::ArityMismatch {
                symbol: alloc::string::String::from("positive-existential formula"),
                expected: self.params + self.fresh,
                found: params.len() + fresh.len(),
            });
        }
        self.body.to_path(params, fresh)
    }
}
