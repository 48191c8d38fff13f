//! CTL* model checking with constraints over finite Kripke graphs.
//!
//! A path of the graph is read through windows: the window at position
//! `i` holds the nodes `π(i) … π(i+d)` where `d` is the largest offset
//! any constraint of the formula reads. Constraints become letters of
//! the window, and each path quantifier `E ψ` is decided by checking
//! the product of the window graph with a Büchi automaton for `ψ`.
//!
//! Labels and registers may be partially unknown (see [`Frame`]). The
//! checker then computes an over- or under-approximation of the
//! satisfying set, which is what bounded model search relies on.

mod buchi;
mod ctl;
mod graph;

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use core::cell::RefCell;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

pub use buchi::{ltl_to_buchi, BuchiAutomaton, Ltl};
pub use ctl::check_ctl_oracle;

use crate::domain::{ConcreteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::{to_nnf, to_nnf_path, AtomicConstraint, PathFormula, StateFormula};
use crate::kripke::ConstraintKripke;
use crate::util::Tri;
use graph::ProductGraph;

/// Upper limit on the number of windows.
pub const MAX_WINDOWS: usize = 50_000;

/// A finite transition system whose labels and registers may be unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub names: Vec<String>,
    pub succ: Vec<Vec<usize>>,
    pub vars: Vec<String>,
    /// `registers[node][var]`, `None` when not yet fixed.
    pub registers: Vec<Vec<Option<Value>>>,
    /// Truth of each proposition per node; absent propositions are false
    /// everywhere.
    pub props: BTreeMap<String, Vec<Tri>>,
    /// The values an unknown register may still take. A constraint over
    /// unknown registers is decided by trying them all; with an empty
    /// list it stays unknown.
    pub completions: Vec<Value>,
}

impl Frame {
    pub fn from_model(c: &ConstraintKripke) -> Frame {
        let n = c.node_count();
        let mut props: BTreeMap<String, Vec<Tri>> = BTreeMap::new();
        for i in 0..n {
            for p in c.labels(i) {
                props.entry(p.clone()).or_insert_with(|| vec![Tri::False; n])[i] = Tri::True;
            }
        }
        Frame {
            names: c.node_names().to_vec(),
            succ: c.successor_lists().to_vec(),
            vars: c.vars().to_vec(),
            registers: (0..n)
                .map(|i| c.registers(i).iter().cloned().map(Some).collect())
                .collect(),
            props,
            completions: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    fn prop(&self, node: usize, p: &str) -> Tri {
        self.props.get(p).map_or(Tri::False, |v| v[node])
    }
}

/// How unknown labels and registers are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every value is known.
    Exact,
    /// Unknown literals count as true: the result contains every node
    /// that satisfies the formula under some completion.
    Optimistic,
    /// Unknown literals count as false: the result contains only nodes
    /// that satisfy the formula under every completion.
    Pessimistic,
}

impl Mode {
    fn flip(self) -> Mode {
        match self {
            Mode::Exact => Mode::Exact,
            Mode::Optimistic => Mode::Pessimistic,
            Mode::Pessimistic => Mode::Optimistic,
        }
    }

    fn collapse(self, t: Tri) -> bool {
        t.collapse(self == Mode::Optimistic)
    }
}

/// All paths with `d + 1` nodes and the shift relation between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowModel {
    pub depth: usize,
    pub windows: Vec<Vec<usize>>,
    pub succ: Vec<Vec<usize>>,
    /// Windows grouped by their first node.
    pub starting_at: Vec<Vec<usize>>,
}

/// Builds the window model of a model for constraint depth `d`.
pub fn expand_windows(c: &ConstraintKripke, d: usize) -> Result<WindowModel> {
    windows_of(c.node_names(), c.successor_lists(), d)
}

pub(crate) fn windows_of(names: &[String], succ: &[Vec<usize>], d: usize) -> Result<WindowModel> {
    let n = succ.len();
    if let Some(i) = (0..n).find(|&i| succ[i].is_empty()) {
        return Err(Error::NoSuccessor(names.get(i).cloned().unwrap_or_else(|| i.to_string())));
    }
    let mut windows: Vec<Vec<usize>> = Vec::new();
    let mut starting_at = vec![Vec::new(); n];
    let mut path = Vec::with_capacity(d + 1);
    fn extend(
        succ: &[Vec<usize>],
        d: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if path.len() == d + 1 {
            if out.len() >= MAX_WINDOWS {
                return Err(Error::TooManyWindows { limit: MAX_WINDOWS });
            }
            out.push(path.clone());
            return Ok(());
        }
        let last = *path.last().expect("nonempty path");
        for &w in &succ[last] {
            path.push(w);
            extend(succ, d, path, out)?;
            path.pop();
        }
        Ok(())
    }
    for (v, start) in starting_at.iter_mut().enumerate() {
        let before = windows.len();
        path.push(v);
        extend(succ, d, &mut path, &mut windows)?;
        path.pop();
        *start = (before..windows.len()).collect();
    }
    let index: HashMap<&[usize], usize> = windows
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i))
        .collect();
    let mut wsucc = Vec::with_capacity(windows.len());
    let mut key = Vec::with_capacity(d + 1);
    for w in &windows {
        let mut s = Vec::new();
        if d == 0 {
            s.extend(succ[w[0]].iter().copied());
        } else {
            for &v in &succ[w[d]] {
                key.clear();
                key.extend_from_slice(&w[1..]);
                key.push(v);
                s.push(index[key.as_slice()]);
            }
        }
        wsucc.push(s);
    }
    drop(index);
    Ok(WindowModel {
        depth: d,
        windows,
        succ: wsucc,
        starting_at,
    })
}

/// Largest offset read by a constraint of `f`.
pub fn constraint_depth(f: &StateFormula) -> usize {
    f.constraints().iter().map(AtomicConstraint::depth).max().unwrap_or(0)
}

/// The nodes of `c` satisfying `f`, in declaration order.
pub fn check_ctlstar(c: &ConstraintKripke, f: &StateFormula, dom: &ConcreteDomain) -> Result<Vec<usize>> {
    c.check_domain(dom)?;
    let frame = Frame::from_model(c);
    let sat = check_frame(&frame, f, dom, Mode::Exact)?;
    Ok((0..sat.len()).filter(|&i| sat[i]).collect())
}

/// Satisfaction of `f` at every node of `frame` under `mode`.
pub fn check_frame(frame: &Frame, f: &StateFormula, dom: &ConcreteDomain, mode: Mode) -> Result<Vec<bool>> {
    let mut checker = Checker::new(frame, dom, constraint_depth(f))?;
    checker.sat(&to_nnf(f), mode)
}

/// Büchi automata of path formulas, kept across checker instances.
///
/// The automaton of a path formula does not depend on the frame, so a
/// search that checks many partial frames can translate each formula once.
#[derive(Default)]
pub struct AutomatonCache {
    entries: BTreeMap<PathFormula, Rc<Translated>>,
}

/// Letters of a path formula and its automaton over them.
type Translated = (BTreeMap<Letter, usize>, BuchiAutomaton);

impl AutomatonCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&mut self, p: &PathFormula) -> Rc<Translated> {
        self.entries
            .entry(p.clone())
            .or_insert_with(|| {
                let mut letters = BTreeMap::new();
                let ltl = to_ltl(p, &mut letters);
                Rc::new((letters, ltl_to_buchi(&ltl)))
            })
            .clone()
    }
}

/// A reusable checker bound to one frame and window depth.
pub struct Checker<'a> {
    frame: &'a Frame,
    dom: &'a ConcreteDomain,
    windows: Cow<'a, WindowModel>,
    memo: BTreeMap<(StateFormula, bool, bool), Vec<bool>>,
    automata: Option<&'a RefCell<AutomatonCache>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Letter {
    State(StateFormula),
    Constraint(AtomicConstraint),
}

impl<'a> Checker<'a> {
    pub fn new(frame: &'a Frame, dom: &'a ConcreteDomain, depth: usize) -> Result<Self> {
        Ok(Checker {
            frame,
            dom,
            windows: Cow::Owned(windows_of(&frame.names, &frame.succ, depth)?),
            memo: BTreeMap::new(),
            automata: None,
        })
    }

    /// A checker reusing a window model built for the same successor
    /// lists.
    pub fn with_windows(frame: &'a Frame, dom: &'a ConcreteDomain, windows: &'a WindowModel) -> Self {
        Checker {
            frame,
            dom,
            windows: Cow::Borrowed(windows),
            memo: BTreeMap::new(),
            automata: None,
        }
    }

    /// Takes automata from `cache` instead of translating every path
    /// formula afresh.
    pub fn with_automata(mut self, cache: &'a RefCell<AutomatonCache>) -> Self {
        self.automata = Some(cache);
        self
    }

    pub fn windows(&self) -> &WindowModel {
        &self.windows
    }

    /// Satisfaction per node of a formula in negation normal form.
    pub fn sat(&mut self, f: &StateFormula, mode: Mode) -> Result<Vec<bool>> {
        let key = (f.clone(), mode == Mode::Optimistic, mode == Mode::Pessimistic);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let n = self.frame.node_count();
        let out = match f {
            StateFormula::True => vec![true; n],
            StateFormula::False => vec![false; n],
            StateFormula::Prop(p) => (0..n).map(|i| mode.collapse(self.frame.prop(i, p))).collect(),
            StateFormula::Not(inner) => match &**inner {
                StateFormula::Prop(p) => (0..n)
                    .map(|i| mode.collapse(self.frame.prop(i, p).not()))
                    .collect(),
                other => {
                    let g = to_nnf(&StateFormula::Not(alloc::boxed::Box::new(other.clone())));
                    self.sat(&g, mode)?
                }
            },
            StateFormula::And(a, b) => {
                let (x, y) = (self.sat(a, mode)?, self.sat(b, mode)?);
                x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
            }
            StateFormula::Or(a, b) => {
                let (x, y) = (self.sat(a, mode)?, self.sat(b, mode)?);
                x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
            }
            StateFormula::Exists(p) => self.exists(p, mode)?,
            StateFormula::All(p) => {
                let neg = to_nnf_path(&PathFormula::Not(alloc::boxed::Box::new((**p).clone())));
                self.exists(&neg, mode.flip())?.into_iter().map(|b| !b).collect()
            }
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn exists(&mut self, p: &PathFormula, mode: Mode) -> Result<Vec<bool>> {
        let translated = match self.automata {
            Some(cache) => cache.borrow_mut().get(p),
            None => AutomatonCache::new().get(p),
        };
        let (letters, aut) = &*translated;
        // Literal tables over windows, by letter and polarity.
        let w = self.windows.windows.len();
        let mut table: Vec<[Vec<bool>; 2]> = vec![[Vec::new(), Vec::new()]; letters.len()];
        for (letter, &i) in letters {
            match letter {
                Letter::State(s) => {
                    let sat = self.sat(s, mode)?;
                    let pos: Vec<bool> = self.windows.windows.iter().map(|win| sat[win[0]]).collect();
                    table[i] = [Vec::new(), pos];
                }
                Letter::Constraint(c) => {
                    let mut pos = Vec::with_capacity(w);
                    let mut neg = Vec::with_capacity(w);
                    for win in &self.windows.windows {
                        let t = self.constraint(c, win)?;
                        pos.push(mode.collapse(t));
                        neg.push(mode.collapse(t.not()));
                    }
                    table[i] = [neg, pos];
                }
            }
        }
        let windows: &WindowModel = &self.windows;
        let product = ProductGraph::build(
            w,
            |x| windows.succ[x].clone(),
            aut,
            |x, (a, v)| table[a][v as usize][x],
        );
        let good = product.accepting_states(aut);
        let accepted = |x: usize| {
            aut.initial
                .iter()
                .any(|&q| product.state(x, q).is_some_and(|s| good[s]))
        };
        Ok(self
            .windows
            .starting_at
            .iter()
            .map(|ws| ws.iter().any(|&x| accepted(x)))
            .collect())
    }

    fn constraint(&self, c: &AtomicConstraint, win: &[usize]) -> Result<Tri> {
        constraint_on_window(self.frame, self.dom, c, win)
    }
}

pub(crate) fn constraint_on_window(
    frame: &Frame,
    dom: &ConcreteDomain,
    c: &AtomicConstraint,
    win: &[usize],
) -> Result<Tri> {
    /// Largest number of completions tried for one constraint.
    const COMPLETION_LIMIT: usize = 4096;
    let mut vals = Vec::with_capacity(c.args().len());
    // argument position -> index into `open`
    let mut holes: Vec<(usize, usize)> = Vec::new();
    let mut open: Vec<(usize, usize)> = Vec::new();
    for (k, t) in c.args().iter().enumerate() {
        let var = frame
            .vars
            .iter()
            .position(|v| *v == t.var)
            .ok_or_else(|| Error::MissingVariable(t.var.clone()))?;
        let node = win[t.offset];
        match &frame.registers[node][var] {
            Some(v) => vals.push(v.clone()),
            None => {
                let slot = open.iter().position(|&o| o == (node, var)).unwrap_or_else(|| {
                    open.push((node, var));
                    open.len() - 1
                });
                holes.push((k, slot));
                vals.push(Value::Int(0));
            }
        }
    }
    if open.is_empty() {
        return Ok(Tri::from_bool(dom.eval_relation(c.relation(), &vals)?));
    }
    let width = frame.completions.len();
    let total = (0..open.len()).try_fold(1usize, |acc, _| acc.checked_mul(width).filter(|&t| t <= COMPLETION_LIMIT));
    let total = match total {
        Some(t) if t > 0 => t,
        _ => return Ok(Tri::Unknown),
    };
    let (mut seen_true, mut seen_false) = (false, false);
    for code in 0..total {
        let mut rest = code;
        let mut choice = vec![0usize; open.len()];
        for ch in choice.iter_mut() {
            *ch = rest % width;
            rest /= width;
        }
        for &(k, slot) in &holes {
            vals[k] = frame.completions[choice[slot]].clone();
        }
        if dom.eval_relation(c.relation(), &vals)? {
            seen_true = true;
        } else {
            seen_false = true;
        }
        if seen_true && seen_false {
            return Ok(Tri::Unknown);
        }
    }
    Ok(Tri::from_bool(seen_true))
}

fn letter(l: Letter, letters: &mut BTreeMap<Letter, usize>) -> usize {
    let next = letters.len();
    *letters.entry(l).or_insert(next)
}

fn to_ltl(p: &PathFormula, letters: &mut BTreeMap<Letter, usize>) -> Ltl {
    match p {
        PathFormula::State(s) => match &**s {
            StateFormula::True => Ltl::True,
            StateFormula::False => Ltl::False,
            other => Ltl::Lit(letter(Letter::State(other.clone()), letters), true),
        },
        PathFormula::Constraint(c) => Ltl::Lit(letter(Letter::Constraint(c.clone()), letters), true),
        PathFormula::Not(inner) => match &**inner {
            PathFormula::Constraint(c) => Ltl::Lit(letter(Letter::Constraint(c.clone()), letters), false),
            PathFormula::State(s) => {
                let neg = to_nnf(&StateFormula::Not(s.clone()));
                to_ltl(&PathFormula::State(alloc::boxed::Box::new(neg)), letters)
            }
            other => to_ltl(&to_nnf_path(&PathFormula::Not(alloc::boxed::Box::new(other.clone()))), letters),
        },
        PathFormula::And(a, b) => Ltl::and(to_ltl(a, letters), to_ltl(b, letters)),
        PathFormula::Or(a, b) => Ltl::or(to_ltl(a, letters), to_ltl(b, letters)),
        PathFormula::Next(a) => Ltl::next(to_ltl(a, letters)),
        PathFormula::Until(a, b) => Ltl::until(to_ltl(a, letters), to_ltl(b, letters)),
        PathFormula::Release(a, b) => Ltl::release(to_ltl(a, letters), to_ltl(b, letters)),
    }
}
