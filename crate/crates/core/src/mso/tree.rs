//! Encoding of constraint graphs inside extended Kripke trees.
//!
//! A Kripke `d`-tree over variables `x_1 … x_m` is extended to a
//! `(d+m)`-tree: child `d+t` of every original node carries only the
//! auxiliary proposition `q_t` and stands for the copy of its parent
//! for `x_t`. Subtrees below auxiliary children carry nothing.
//!
//! Trees are seen as relational structures with one binary relation
//! `succ{i}` per child index and one unary relation per proposition.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::emit::relativize_with;
use super::{Lambda1, Lambda2, Mso};
use crate::error::{Error, Result};
use crate::formula::{AbstractionTable, RelationSymbol};
use crate::kripke::{element_name, ConstraintKripke};
use crate::structure::SigmaStructure;
use crate::util::FreshNames;

/// The child relation for child index `i` (1-based).
pub fn succ_relation(i: usize) -> RelationSymbol {
    RelationSymbol::named(&format!("succ{i}"), 2).expect("valid identifier")
}

/// The auxiliary proposition `q_t` (1-based) marking copies of `x_t`.
pub fn aux_prop(t: usize) -> RelationSymbol {
    RelationSymbol::named(&format!("__q{t}"), 1).expect("valid identifier")
}

fn prop_relation(p: &str) -> Result<RelationSymbol> {
    RelationSymbol::named(p, 1)
}

/// `⋁_{i ≤ d} succ_i(x, y)`.
fn tree_edge(d: usize, x: &str, y: &str) -> Mso {
    Mso::Or((1..=d).map(|i| Mso::rel(succ_relation(i), &[x, y])).collect())
}

/// Emits `(β, α^e)` for a `d`-tree over `vars` whose labels are drawn from
/// `props`, where `table` describes how the propositions of the tree
/// encode the constraint graph that `α` talks about.
///
/// `β` holds in a `(d+m)`-tree exactly when it is the extension of a
/// `d`-tree, and `α^e` holds in the extension exactly when `α` holds in
/// the constraint graph of the original tree.
pub fn emit_tree_encoding(
    alpha: &Mso,
    table: &AbstractionTable,
    vars: &[String],
    d: usize,
    props: &[String],
) -> Result<(Mso, Mso)> {
    if d == 0 {
        return Err(Error::InvalidTree("branching must be positive".into()));
    }
    let m = vars.len();
    let mut props: BTreeSet<String> = props.iter().cloned().collect();
    for e in &table.entries {
        props.insert(e.prop.clone());
    }
    let prop_syms = props
        .iter()
        .map(|p| prop_relation(p))
        .collect::<Result<Vec<_>>>()?;

    let mut taken = alpha.all_names();
    let mut fresh = FreshNames::new("t");
    let mut name = |taken: &mut BTreeSet<String>| {
        let n = fresh.next(taken);
        taken.insert(n.clone());
        n
    };

    // β
    let (x, r, v, y) = (name(&mut taken), name(&mut taken), name(&mut taken), name(&mut taken));
    let root = Lambda1::new(
        &r,
        Mso::not(Mso::exists(
            &y,
            Mso::Or((1..=d + m).map(|i| Mso::rel(succ_relation(i), &[&y, &r])).collect()),
        )),
    );
    let main = Lambda1::new(
        &v,
        Mso::exists(
            &r,
            Mso::And(vec![
                root.apply(&r),
                Mso::reach(Lambda2::new("a", "b", tree_edge(d, "a", "b")), &r, &v),
            ]),
        ),
    );
    let aux = |t: usize| {
        Lambda1::new(
            &v,
            Mso::exists(
                &r,
                Mso::And(vec![main.apply(&r), Mso::rel(succ_relation(d + t), &[&r, &v])]),
            ),
        )
    };
    let no_props = |z: &str| Mso::And(prop_syms.iter().map(|p| Mso::not(Mso::rel(p.clone(), &[z]))).collect());
    let no_q = |z: &str, except: Option<usize>| {
        Mso::And(
            (1..=m)
                .filter(|&t| Some(t) != except)
                .map(|t| Mso::not(Mso::rel(aux_prop(t), &[z])))
                .collect(),
        )
    };
    let mut clauses = vec![Mso::implies(main.apply(&x), no_q(&x, None))];
    let mut is_aux = Vec::new();
    for t in 1..=m {
        let a = aux(t).apply(&x);
        is_aux.push(a.clone());
        clauses.push(Mso::implies(
            a,
            Mso::And(vec![Mso::rel(aux_prop(t), &[&x]), no_q(&x, Some(t)), no_props(&x)]),
        ));
    }
    let mut neither = vec![Mso::not(main.apply(&x))];
    neither.extend(is_aux.into_iter().map(Mso::not));
    clauses.push(Mso::implies(Mso::And(neither), Mso::And(vec![no_props(&x), no_q(&x, None)])));
    let beta = Mso::forall(&x, Mso::And(clauses));

    // α^e
    let q = name(&mut taken);
    let guard = Lambda1::new(
        &q,
        Mso::Or((1..=m).map(|t| Mso::rel(aux_prop(t), &[&q])).collect()),
    );
    let mut failure = None;
    let mut encode = |rel: &RelationSymbol, args: &[String]| -> Mso {
        let mut disjuncts = Vec::new();
        for entry in &table.entries {
            if entry.constraint.relation() != rel || entry.constraint.args().len() != args.len() {
                continue;
            }
            let depth = entry.depth();
            let mut local = taken.clone();
            local.extend(args.iter().cloned());
            let mut wf = FreshNames::new("w");
            let ws: Vec<String> = (0..=depth)
                .map(|_| {
                    let n = wf.next(&local);
                    local.insert(n.clone());
                    n
                })
                .collect();
            let mut conj = Vec::new();
            for i in 1..=depth {
                conj.push(tree_edge(d, &ws[i - 1], &ws[i]));
            }
            conj.push(Mso::rel(
                RelationSymbol::named(&entry.prop, 1).expect("abstraction propositions are identifiers"),
                &[&ws[depth]],
            ));
            for (term, u) in entry.constraint.args().iter().zip(args) {
                match vars.iter().position(|x| *x == term.var) {
                    Some(idx) => conj.push(Mso::rel(succ_relation(d + idx + 1), &[&ws[term.offset], u])),
                    None => failure = Some(Error::MissingVariable(term.var.clone())),
                }
            }
            let mut f = Mso::And(conj);
            for w in ws.iter().rev() {
                f = Mso::exists(w, f);
            }
            disjuncts.push(f);
        }
        if disjuncts.is_empty() {
            Mso::False
        } else {
            Mso::Or(disjuncts)
        }
    };
    let alpha_e = relativize_with(alpha, &guard, &mut encode);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((beta, alpha_e))
}

/// The finite extension of a tree-shaped model: every node keeps its
/// labels and gets one auxiliary leaf per variable, named like the
/// corresponding constraint-graph element.
pub fn tree_encoding_structure(
    tree: &ConstraintKripke,
    table: &AbstractionTable,
    vars: &[String],
    props: &[String],
) -> Result<SigmaStructure> {
    let crate::kripke::Shape::Tree { branching, .. } = tree.shape() else {
        return Err(Error::InvalidTree("expected a tree-shaped model".to_string()));
    };
    let d = branching;
    let m = vars.len();
    let n = tree.node_count();
    let mut s = SigmaStructure::new(tree.node_names().iter().cloned())?;
    for i in 1..=d + m {
        s.declare(succ_relation(i));
    }
    for t in 1..=m {
        s.declare(aux_prop(t));
    }
    let mut all_props: BTreeSet<String> = props.iter().cloned().collect();
    all_props.extend(table.entries.iter().map(|e| e.prop.clone()));
    for p in &all_props {
        s.declare(prop_relation(p)?);
    }
    for i in 0..n {
        for p in tree.labels(i) {
            let sym = prop_relation(p)?;
            s.declare(sym.clone());
            s.add_tuple(&sym, vec![i])?;
        }
        let word = tree.word(i).expect("tree models carry words");
        if !word.is_empty() {
            let parent = tree
                .node_by_word(&word[..word.len() - 1])
                .expect("prefix of a node");
            let digit = word[word.len() - 1] as usize;
            s.add_tuple(&succ_relation(digit), vec![parent, i])?;
        }
    }
    for i in 0..n {
        for (t, x) in vars.iter().enumerate() {
            let idx = s.add_element(element_name(tree.node_name(i), x))?;
            s.add_tuple(&succ_relation(d + t + 1), vec![i, idx])?;
            s.add_tuple(&aux_prop(t + 1), vec![idx])?;
        }
    }
    Ok(s)
}
