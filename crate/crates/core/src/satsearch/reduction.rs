//! Differential checks of the reduction to labelled trees: on a finite
//! tree, a formula using only `X` and Boolean path operators holds iff
//! its abstraction holds in the abstracted tree and the extracted
//! constraint graph maps homomorphically into the domain.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::domain::{ConcreteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::{abstract_constraints, PathFormula, StateFormula};
use crate::homcheck::{decide_hom, verify_hom, Target};
use crate::kripke::{abstract_model, extract_constraint_graph, ConstraintKripke, Shape};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionReport {
    /// Whether the concrete tree satisfies the formula at its root.
    pub concrete_holds: bool,
    /// Whether the abstract tree satisfies the abstraction at its root.
    pub abstract_holds: bool,
    /// Whether the extracted constraint graph maps into the domain.
    pub hom_exists: bool,
    /// Descriptions of every violated implication; empty when consistent.
    pub violations: Vec<String>,
}

fn target_of(dom: &ConcreteDomain) -> Result<Target> {
    Ok(match dom {
        ConcreteDomain::Z => Target::Z,
        ConcreteDomain::N => Target::N,
        ConcreteDomain::NegZ => Target::NegZ,
        ConcreteDomain::Q => Target::Q,
        other => {
            return Err(Error::Unsupported(format!(
                "no homomorphism check for the domain {other}"
            )))
        }
    })
}

fn x_depth(p: &PathFormula) -> Result<usize> {
    Ok(match p {
        PathFormula::State(s) => {
            check_flat(s)?;
            0
        }
        PathFormula::Constraint(c) => c.depth(),
        PathFormula::Not(a) => x_depth(a)?,
        PathFormula::And(a, b) | PathFormula::Or(a, b) => x_depth(a)?.max(x_depth(b)?),
        PathFormula::Next(a) => 1 + x_depth(a)?,
        PathFormula::Until(..) | PathFormula::Release(..) => {
            return Err(Error::Unsupported(
                "until and release cannot be evaluated on finite trees".into(),
            ))
        }
    })
}

/// The tree depth [`eval_bounded`] needs for `f`: the largest number of
/// steps any path quantifier looks ahead, counting constraint offsets.
pub fn required_depth(f: &StateFormula) -> Result<usize> {
    Ok(match f {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => 0,
        StateFormula::Not(a) => required_depth(a)?,
        StateFormula::And(a, b) | StateFormula::Or(a, b) => required_depth(a)?.max(required_depth(b)?),
        StateFormula::Exists(p) | StateFormula::All(p) => x_depth(p)?,
    })
}

/// State formulas inside a path formula may not quantify paths again.
fn check_flat(s: &StateFormula) -> Result<()> {
    match s {
        StateFormula::Exists(_) | StateFormula::All(_) => Err(Error::Unsupported(
            "nested path quantifiers cannot be evaluated on finite trees".into(),
        )),
        StateFormula::Not(a) => check_flat(a),
        StateFormula::And(a, b) | StateFormula::Or(a, b) => {
            check_flat(a)?;
            check_flat(b)
        }
        _ => Ok(()),
    }
}

/// Evaluates a formula whose path formulas use only `X` and Boolean
/// operators at the root of a finite tree. Path quantifiers range over
/// the branches of the tree, which must be deep enough.
pub fn eval_bounded(tree: &ConstraintKripke, f: &StateFormula, dom: &ConcreteDomain) -> Result<bool> {
    let Shape::Tree { .. } = tree.shape() else {
        return Err(Error::InvalidTree("expected a tree-shaped model".into()));
    };
    let root = tree.node_by_word(&[]).expect("trees have a root");
    state(tree, f, dom, root)
}

fn state(t: &ConstraintKripke, f: &StateFormula, dom: &ConcreteDomain, v: usize) -> Result<bool> {
    Ok(match f {
        StateFormula::True => true,
        StateFormula::False => false,
        StateFormula::Prop(p) => t.labels(v).contains(p),
        StateFormula::Not(a) => !state(t, a, dom, v)?,
        StateFormula::And(a, b) => state(t, a, dom, v)? && state(t, b, dom, v)?,
        StateFormula::Or(a, b) => state(t, a, dom, v)? || state(t, b, dom, v)?,
        StateFormula::Exists(p) | StateFormula::All(p) => {
            let len = x_depth(p)?;
            let existential = matches!(f, StateFormula::Exists(_));
            let mut found = !existential;
            let mut result = Ok(());
            branches(t, v, len, &mut Vec::new(), &mut |path| {
                if result.is_err() || found == existential {
                    return;
                }
                match path_holds(t, p, dom, path, 0) {
                    Ok(b) => {
                        if b == existential {
                            found = existential;
                        }
                    }
                    Err(e) => result = Err(e),
                }
            })?;
            result?;
            found
        }
    })
}

/// Calls `visit` on every path with `len + 1` nodes starting at `v`.
fn branches(
    t: &ConstraintKripke,
    v: usize,
    len: usize,
    path: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    path.push(v);
    if path.len() == len + 1 {
        visit(path);
    } else {
        let succ = t.successors(v);
        if succ.is_empty() {
            return Err(Error::TreeTooShallow {
                depth: path.len() - 1,
                needed: len,
            });
        }
        for &w in succ {
            branches(t, w, len, path, visit)?;
        }
    }
    path.pop();
    Ok(())
}

fn path_holds(t: &ConstraintKripke, p: &PathFormula, dom: &ConcreteDomain, path: &[usize], i: usize) -> Result<bool> {
    Ok(match p {
        PathFormula::State(s) => state(t, s, dom, path[i])?,
        PathFormula::Constraint(c) => {
            let mut vals: Vec<Value> = Vec::with_capacity(c.args().len());
            for a in c.args() {
                let x = t
                    .var_index(&a.var)
                    .ok_or_else(|| Error::MissingVariable(a.var.clone()))?;
                vals.push(t.register(path[i + a.offset], x).clone());
            }
            dom.eval_relation(c.relation(), &vals)?
        }
        PathFormula::Not(a) => !path_holds(t, a, dom, path, i)?,
        PathFormula::And(a, b) => path_holds(t, a, dom, path, i)? && path_holds(t, b, dom, path, i)?,
        PathFormula::Or(a, b) => path_holds(t, a, dom, path, i)? || path_holds(t, b, dom, path, i)?,
        PathFormula::Next(a) => path_holds(t, a, dom, path, i + 1)?,
        PathFormula::Until(..) | PathFormula::Release(..) => unreachable!("rejected by x_depth"),
    })
}

fn require_snnf(f: &StateFormula) -> Result<()> {
    if f.is_snnf() {
        Ok(())
    } else {
        Err(Error::Unsupported("the formula must be in strong negation normal form".into()))
    }
}

/// Checks both directions of the reduction on a concrete tree `c`:
///
/// * if `c` satisfies `f`, then its abstraction satisfies the abstract
///   formula and the registers of `c` form a homomorphism from the
///   extracted constraint graph into `dom`;
/// * if the abstraction satisfies the abstract formula and a
///   homomorphism exists, the tree carrying the witness values satisfies
///   `f`.
pub fn reduction_consistency(c: &ConstraintKripke, f: &StateFormula, dom: &ConcreteDomain) -> Result<ReductionReport> {
    require_snnf(f)?;
    let target = target_of(dom)?;
    let (fa, table) = abstract_constraints(f);
    let vars = c.vars().to_vec();
    let concrete = eval_bounded(c, f, dom)?;
    let t = abstract_model(c, &table, dom)?;
    let abstract_holds = eval_bounded(&t, &fa, dom)?;
    let g = extract_constraint_graph(&t, &table, &vars)?;
    let gamma: Vec<Value> = (0..c.node_count())
        .flat_map(|i| c.registers(i).iter().cloned())
        .collect();
    let mut report = ReductionReport {
        concrete_holds: concrete,
        abstract_holds,
        hom_exists: false,
        violations: Vec::new(),
    };
    if concrete {
        if !abstract_holds {
            report
                .violations
                .push("the concrete tree satisfies the formula but its abstraction does not".into());
        }
        if !verify_hom(&g, &gamma, target)? {
            report
                .violations
                .push("the registers are not a homomorphism of the extracted graph".into());
        }
    }
    let backward = reduction_backward(&t, f, dom)?;
    report.hom_exists = backward.hom_exists;
    report.violations.extend(backward.violations);
    Ok(report)
}

/// The backward direction on a labelled tree `t` (registers ignored):
/// if `t` satisfies the abstraction of `f` and the extracted graph maps
/// into `dom`, the witness registers make `t` a model of `f`.
pub fn reduction_backward(t: &ConstraintKripke, f: &StateFormula, dom: &ConcreteDomain) -> Result<ReductionReport> {
    require_snnf(f)?;
    let target = target_of(dom)?;
    let (fa, table) = abstract_constraints(f);
    let vars = t.vars().to_vec();
    let abstract_holds = eval_bounded(t, &fa, dom)?;
    let g = extract_constraint_graph(t, &table, &vars)?;
    let d = decide_hom(&g, target)?;
    let mut report = ReductionReport {
        concrete_holds: false,
        abstract_holds,
        hom_exists: d.exists,
        violations: Vec::new(),
    };
    if abstract_holds && d.exists {
        let h = d.witness.expect("positive decisions carry a witness");
        let m = vars.len();
        let rows: Vec<Vec<Value>> = (0..t.node_count())
            .map(|i| h[i * m..(i + 1) * m].to_vec())
            .collect();
        let model = t.with_registers(rows)?;
        report.concrete_holds = eval_bounded(&model, f, dom)?;
        if !report.concrete_holds {
            report
                .violations
                .push("the witness registers do not satisfy the formula".into());
        }
    }
    Ok(report)
}
