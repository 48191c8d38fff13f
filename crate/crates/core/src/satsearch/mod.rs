//! Bounded model search and a differential harness for the reduction
//! from satisfiability to labelled trees plus homomorphism checks.
//!
//! The search is sound but incomplete: a model it returns has been
//! verified by the model checker, while finding nothing only means that
//! no model exists within the bounds.

mod reduction;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

pub use reduction::{eval_bounded, required_depth, reduction_backward, reduction_consistency, ReductionReport};

use crate::domain::{ConcreteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::{to_nnf, RelKind, StateFormula};
use crate::kripke::ConstraintKripke;
use crate::modelcheck::{check_ctlstar, constraint_depth, AutomatonCache, Checker, Frame, Mode, WindowModel};
use crate::util::Tri;
use crate::Rational;

/// Largest supported node bound; the number of candidate graphs grows
/// as `2^(n²)`.
pub const MAX_SEARCH_NODES: usize = 4;

/// Satisfiable integer formulas with node and range bounds at which a
/// model exists.
pub const SATISFIABLE_SUITE: &[(&str, usize, i64)] = &[
    ("E F eqc[5](x)", 1, 5),
    ("E (lt(x, X^1 y) U eqc[100](y))", 2, 100),
    ("E G mod[1,2](x)", 1, 3),
    ("E X lt(x, X^1 x)", 2, 3),
    ("A X eqc[2](x) & E X p & E X ~p", 3, 3),
    ("E G lt(x, y)", 1, 3),
    ("E (eq(x, X^1 x) U (p & eqc[-2](x)))", 2, 3),
    ("A G (mod[0,3](x) | eq(x, X^1 y))", 2, 3),
    ("E F (lt(x, X^1 x) & E X eqc[1](x))", 2, 3),
    ("p & E X X (eqc[1](x) & ~p) & A G ~lt(x, x)", 3, 3),
];

/// Unsatisfiable integer formulas with the bounds they are searched at.
pub const UNSATISFIABLE_SUITE: &[(&str, usize, i64)] = &[
    ("E lt(x, x)", 3, 3),
    ("E X mod[1,2](x) & A X mod[0,2](x)", 3, 3),
    ("E (lt(x, y) & lt(y, x))", 3, 3),
    ("E G eqc[1](x) & E eqc[2](x)", 3, 3),
    ("E (eqc[0](x) & mod[1,2](x))", 3, 3),
    ("p & ~p", 3, 3),
    ("A G p & E F ~p", 3, 3),
    ("E (lt(x, X^1 x) & lt(X^1 x, x))", 3, 3),
    ("E (eq(x, y) & lt(x, y))", 3, 3),
    ("E F (mod[0,3](x) & mod[1,3](x))", 3, 3),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_nodes: usize,
    /// Register values are drawn from `[-range, range]`.
    pub range: i64,
    /// Try every value of the range instead of the generator set.
    pub full_sweep: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundModel {
    pub model: ConstraintKripke,
    /// The node satisfying the formula (always the first node).
    pub node: usize,
}

/// Integer constants and moduli mentioned by `f`.
fn mentioned(f: &StateFormula) -> (Vec<Rational>, Vec<i64>) {
    let mut consts = BTreeSet::new();
    let mut moduli = BTreeSet::new();
    for r in f.relations() {
        match r.kind() {
            RelKind::Constant(c) => {
                consts.insert(*c);
            }
            RelKind::Modulo { modulus, .. } => {
                moduli.insert(*modulus);
            }
            _ => {}
        }
    }
    (consts.into_iter().collect(), moduli.into_iter().collect())
}

/// Integer candidates: every value within `spread` of `0`, `±range` or a
/// mentioned constant, plus one representative per residue class of every
/// mentioned modulus, ordered by distance from zero (positive first).
fn integer_candidates(f: &StateFormula, bounds: &SearchBounds, spread: i64) -> Vec<i64> {
    let r = bounds.range.max(0);
    let mut out = BTreeSet::new();
    if bounds.full_sweep || spread >= r {
        out.extend(-r..=r);
    } else {
        let (consts, moduli) = mentioned(f);
        let mut base = vec![0, -r, r];
        for c in consts {
            base.push(c.floor().to_integer());
            base.push(c.ceil().to_integer());
        }
        for b in base {
            for v in b - spread..=b + spread {
                if (-r..=r).contains(&v) {
                    out.insert(v);
                }
            }
        }
        for m in moduli {
            for a in 0..m {
                let v = (0..=r)
                    .flat_map(|k| [k, -k])
                    .find(|v| v.rem_euclid(m) == a);
                if let Some(v) = v {
                    out.insert(v);
                }
            }
        }
    }
    let mut v: Vec<i64> = out.into_iter().collect();
    v.sort_by_key(|x| (x.unsigned_abs(), *x < 0));
    v
}

/// The register values tried for `f` over `dom`, in search order.
pub fn candidate_values(f: &StateFormula, dom: &ConcreteDomain, bounds: &SearchBounds) -> Vec<Value> {
    let vars = f.variables().len().max(1) as i64;
    let spread = bounds.max_nodes.max(1) as i64 * vars;
    let ints = integer_candidates(f, bounds, spread);
    let mut out: Vec<Value> = match dom {
        ConcreteDomain::Z | ConcreteDomain::N | ConcreteDomain::NegZ => {
            ints.iter().map(|&i| Value::Int(i)).collect()
        }
        ConcreteDomain::Q => {
            let mut points: BTreeSet<Rational> = ints.iter().map(|&i| Rational::from_integer(i)).collect();
            let (consts, _) = mentioned(f);
            points.extend(consts.iter().copied());
            let sorted: Vec<Rational> = points.iter().copied().collect();
            let steps = spread + 1;
            for w in sorted.windows(2) {
                for i in 1..steps {
                    points.insert(w[0] + (w[1] - w[0]) * Rational::new(i, steps));
                }
            }
            let mut v: Vec<Rational> = points
                .into_iter()
                .filter(|q| *q <= Rational::from_integer(bounds.range) && *q >= Rational::from_integer(-bounds.range))
                .collect();
            v.sort_by(|a, b| (abs_q(a), *a < Rational::from_integer(0)).cmp(&(abs_q(b), *b < Rational::from_integer(0))));
            v.into_iter().map(Value::rational).collect()
        }
        ConcreteDomain::AllenZ => {
            let mut v = Vec::new();
            for &a in &ints {
                for &b in &ints {
                    if a < b {
                        v.push(Value::Interval(a, b));
                    }
                }
            }
            v
        }
        ConcreteDomain::LexZ(n) => {
            let mut v: Vec<Vec<i64>> = vec![Vec::new()];
            for _ in 0..*n {
                v = v
                    .into_iter()
                    .flat_map(|t| {
                        ints.iter().map(move |&i| {
                            let mut t = t.clone();
                            t.push(i);
                            t
                        })
                    })
                    .collect();
            }
            v.into_iter().map(Value::Tuple).collect()
        }
    };
    out.retain(|v| dom.contains(v));
    out
}

/// Successor lists of the graphs with `k` nodes in search order: edge
/// sets by increasing bit mask (bit `i·k + j` is the edge `i → j`),
/// keeping those where every node has a successor and every node is
/// reachable from node 0.
pub fn rooted_graphs(k: usize) -> impl Iterator<Item = Vec<Vec<usize>>> {
    let bits = k * k;
    (0u64..1 << bits).filter_map(move |mask| {
        let succ: Vec<Vec<usize>> = (0..k)
            .map(|i| (0..k).filter(|&j| mask >> (i * k + j) & 1 == 1).collect())
            .collect();
        if succ.iter().any(Vec::is_empty) {
            return None;
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s).then_some(succ)
    })
}

/// Every candidate graph in search order, over all node counts.
pub fn candidate_graphs(max_nodes: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if max_nodes == 0 || max_nodes > MAX_SEARCH_NODES {
        return Err(Error::Unsupported(format!(
            "node bound must lie in 1..={MAX_SEARCH_NODES}, got {max_nodes}"
        )));
    }
    Ok((1..=max_nodes).flat_map(rooted_graphs).collect())
}

/// Searches for a model of `f` whose first node satisfies it.
pub fn find_model(f: &StateFormula, dom: &ConcreteDomain, bounds: &SearchBounds) -> Result<Option<FoundModel>> {
    let prepared = Prepared::new(f, dom, bounds)?;
    for succ in candidate_graphs(bounds.max_nodes)? {
        if let Some(m) = prepared.search_graph(&succ)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// A formula prepared for searching graph after graph. Graphs can be
/// searched independently, so callers may distribute them over threads
/// and keep the first hit in search order.
pub struct Prepared<'a> {
    formula: StateFormula,
    dom: &'a ConcreteDomain,
    vars: Vec<String>,
    props: Vec<String>,
    candidates: Vec<Value>,
    depth: usize,
}

enum Slot {
    Prop(usize, usize),
    Var(usize, usize),
}

impl<'a> Prepared<'a> {
    pub fn new(f: &StateFormula, dom: &'a ConcreteDomain, bounds: &SearchBounds) -> Result<Self> {
        for r in f.relations() {
            dom.check_symbol(&r)?;
        }
        Ok(Prepared {
            formula: to_nnf(f),
            dom,
            vars: f.variables(),
            props: f.propositions().into_iter().collect(),
            candidates: candidate_values(f, dom, bounds),
            depth: constraint_depth(f),
        })
    }

    pub fn candidates(&self) -> &[Value] {
        &self.candidates
    }

    /// Searches labels and registers on one graph.
    pub fn search_graph(&self, succ: &[Vec<usize>]) -> Result<Option<FoundModel>> {
        let k = succ.len();
        if !self.vars.is_empty() && self.candidates.is_empty() {
            return Ok(None);
        }
        let names: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
        let mut frame = Frame {
            names: names.clone(),
            succ: succ.to_vec(),
            vars: self.vars.clone(),
            registers: vec![vec![None; self.vars.len()]; k],
            props: self
                .props
                .iter()
                .map(|p| (p.clone(), vec![Tri::Unknown; k]))
                .collect::<BTreeMap<_, _>>(),
            completions: self.candidates.clone(),
        };
        let windows = crate::modelcheck::windows_of(&names, succ, self.depth)?;
        let mut slots = Vec::new();
        for v in 0..k {
            slots.extend((0..self.props.len()).map(|p| Slot::Prop(v, p)));
            slots.extend((0..self.vars.len()).map(|x| Slot::Var(v, x)));
        }
        let automata = RefCell::new(AutomatonCache::new());
        if !self.dfs(&mut frame, &windows, &automata, &slots, 0)? {
            return Ok(None);
        }
        let labels = (0..k)
            .map(|v| {
                self.props
                    .iter()
                    .filter(|p| frame.props[*p][v].is_true())
                    .cloned()
                    .collect::<BTreeSet<_>>()
            })
            .collect();
        let registers = frame
            .registers
            .iter()
            .map(|row| row.iter().map(|v| v.clone().expect("complete assignment")).collect())
            .collect();
        let model = ConstraintKripke::graph(names, succ.to_vec(), labels, self.vars.clone(), registers)?;
        let verified = check_ctlstar(&model, &self.formula, self.dom)?;
        if !verified.contains(&0) {
            return Err(Error::Unsupported(
                "search produced a model the checker rejects".to_string(),
            ));
        }
        Ok(Some(FoundModel { model, node: 0 }))
    }

    fn root(&self, frame: &Frame, windows: &WindowModel, automata: &RefCell<AutomatonCache>, mode: Mode) -> Result<bool> {
        let mut c = Checker::with_windows(frame, self.dom, windows).with_automata(automata);
        Ok(c.sat(&self.formula, mode)?[0])
    }

    fn set(&self, frame: &mut Frame, slot: &Slot, choice: Option<usize>) {
        match *slot {
            Slot::Prop(v, p) => {
                let t = match choice {
                    None => Tri::Unknown,
                    Some(c) => Tri::from_bool(c == 1),
                };
                frame.props.get_mut(&self.props[p]).expect("declared")[v] = t;
            }
            Slot::Var(v, x) => frame.registers[v][x] = choice.map(|c| self.candidates[c].clone()),
        }
    }

    fn choices(&self, slot: &Slot) -> usize {
        match slot {
            Slot::Prop(..) => 2,
            Slot::Var(..) => self.candidates.len(),
        }
    }

    fn dfs(
        &self,
        frame: &mut Frame,
        windows: &WindowModel,
        automata: &RefCell<AutomatonCache>,
        slots: &[Slot],
        i: usize,
    ) -> Result<bool> {
        if i == slots.len() {
            return self.root(frame, windows, automata, Mode::Exact);
        }
        if !self.root(frame, windows, automata, Mode::Optimistic)? {
            return Ok(false);
        }
        if self.root(frame, windows, automata, Mode::Pessimistic)? {
            // Any completion works; take the first choice everywhere.
            for s in &slots[i..] {
                self.set(frame, s, Some(0));
            }
            if self.root(frame, windows, automata, Mode::Exact)? {
                return Ok(true);
            }
            for s in &slots[i..] {
                self.set(frame, s, None);
            }
        }
        for c in 0..self.choices(&slots[i]) {
            self.set(frame, &slots[i], Some(c));
            if self.dfs(frame, windows, automata, slots, i + 1)? {
                return Ok(true);
            }
        }
        self.set(frame, &slots[i], None);
        Ok(false)
    }
}

fn abs_q(a: &Rational) -> Rational {
    if *a < Rational::from_integer(0) {
        -*a
    } else {
        *a
    }
}
