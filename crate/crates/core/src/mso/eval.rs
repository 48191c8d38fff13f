//! Brute-force evaluation of MSO sentences over finite structures.
//!
//! Set quantifiers range over all subsets. Consecutive set quantifiers of
//! the same kind are searched jointly, element by element, under Kleene
//! three-valued semantics: a partially built set leaves membership of the
//! undecided elements unknown, and a branch is cut as soon as the body is
//! decided. The bounding quantifier is true on every finite structure.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{Lambda1, Lambda2, Mso, Reach};
use crate::error::{Error, Result};
use crate::structure::SigmaStructure;
use crate::util::Tri;

/// Default cap on the number of elements.
pub const MAX_ELEMENTS: usize = 12;

/// Values of the free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub fo: BTreeMap<String, usize>,
    /// Sets as bit masks over element indices.
    pub sets: BTreeMap<String, u64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_element(mut self, var: &str, element: usize) -> Self {
        self.fo.insert(var.to_string(), element);
        self
    }

    pub fn with_set(mut self, var: &str, members: &[usize]) -> Self {
        let mask = members.iter().fold(0u64, |m, &i| m | (1 << i));
        self.sets.insert(var.to_string(), mask);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub max_elements: usize,
    /// Enumerate the sets under each bounding quantifier and record the
    /// largest one satisfying its body.
    pub bound_diagnostics: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            max_elements: MAX_ELEMENTS,
            bound_diagnostics: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Search nodes visited by the set-quantifier search.
    pub set_search_nodes: u64,
    /// Bounding quantifiers encountered.
    pub bound_evaluations: u64,
    /// Largest set found satisfying the body of a bounding quantifier
    /// (only with diagnostics on).
    pub max_bound_witness: Option<usize>,
}

/// Evaluates `f` on `a` under `assignment` with default options.
pub fn eval_finite(f: &Mso, a: &SigmaStructure, assignment: &Assignment) -> Result<bool> {
    eval_finite_with(f, a, assignment, &EvalOptions::default()).map(|(b, _)| b)
}

pub fn eval_finite_with(
    f: &Mso,
    a: &SigmaStructure,
    assignment: &Assignment,
    options: &EvalOptions,
) -> Result<(bool, EvalStats)> {
    let limit = options.max_elements.min(63);
    if a.len() > limit {
        return Err(Error::StructureTooLarge {
            size: a.len(),
            limit,
        });
    }
    let full = if a.is_empty() { 0 } else { u64::MAX >> (64 - a.len()) };
    let mut env = Env::default();
    for v in f.free_vars() {
        if let Some(&e) = assignment.fo.get(&v) {
            if e >= a.len() {
                return Err(Error::InvalidValue(format_args_str("element index", e)));
            }
            env.push(v, Val::Elem(e));
        } else if let Some(&m) = assignment.sets.get(&v) {
            env.push(v, Val::Set { inn: m & full, known: full });
        } else {
            return Err(Error::UnboundVariable(v));
        }
    }
    let mut ev = Evaluator {
        a,
        n: a.len(),
        full,
        options,
        stats: EvalStats::default(),
        reach_cache: HashMap::new(),
        free_cache: HashMap::new(),
        memo: HashMap::new(),
    };
    let r = ev.eval(f, &mut env)?;
    // With every free variable fully known the result is decided.
    debug_assert!(r != Tri::Unknown);
    Ok((r.is_true(), ev.stats))
}

fn format_args_str(what: &str, v: usize) -> String {
    alloc::format!("{what} {v} is out of range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Val {
    Elem(usize),
    /// `inn` holds the members among the `known` elements.
    Set { inn: u64, known: u64 },
}

#[derive(Default)]
struct Env {
    stack: Vec<(String, Val)>,
}

impl Env {
    fn push(&mut self, name: String, v: Val) {
        self.stack.push((name, v));
    }

    fn pop(&mut self) {
        self.stack.pop();
    }

    fn get(&self, name: &str) -> Result<Val> {
        self.stack
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::UnboundVariable(name.to_string()))
    }

    fn elem(&self, name: &str) -> Result<usize> {
        match self.get(name)? {
            Val::Elem(e) => Ok(e),
            Val::Set { .. } => Err(Error::InvalidValue(alloc::format!(
                "`{name}` is a set variable used as an element"
            ))),
        }
    }

    fn set(&self, name: &str) -> Result<(u64, u64)> {
        match self.get(name)? {
            Val::Set { inn, known } => Ok((inn, known)),
            Val::Elem(_) => Err(Error::InvalidValue(alloc::format!(
                "`{name}` is an element variable used as a set"
            ))),
        }
    }

    fn set_mut(&mut self, name: &str) -> &mut Val {
        &mut self
            .stack
            .iter_mut()
            .rev()
            .find(|(n, _)| n == name)
            .expect("bound by the caller")
            .1
    }
}

fn member(inn: u64, known: u64, e: usize) -> Tri {
    if known >> e & 1 == 0 {
        Tri::Unknown
    } else {
        Tri::from_bool(inn >> e & 1 == 1)
    }
}

/// Closures under an edge relation: for each source, the nodes reachable
/// for sure and the nodes possibly reachable.
type Closures = Vec<(u64, u64)>;

struct Evaluator<'a> {
    a: &'a SigmaStructure,
    n: usize,
    full: u64,
    options: &'a EvalOptions,
    stats: EvalStats,
    reach_cache: HashMap<(usize, Vec<Val>), Closures>,
    free_cache: HashMap<usize, Vec<String>>,
    /// Values of first-order quantifier nodes whose free variables are
    /// all elements.
    memo: HashMap<(usize, Vec<usize>), Tri>,
}

/// A chain `Q X1 … Q Xk` of equal set quantifiers with the side
/// conditions met on the way down.
struct Chain<'f> {
    vars: Vec<&'f str>,
    /// `(X, guard)` for every `X ⊆ {v | guard}` side condition.
    guards: Vec<(&'f str, &'f Lambda1)>,
    side: Vec<&'f Mso>,
    body: &'f Mso,
}

fn collect_chain(f: &Mso, existential: bool) -> Chain<'_> {
    let mut chain = Chain {
        vars: Vec::new(),
        guards: Vec::new(),
        side: Vec::new(),
        body: f,
    };
    let mut cur = f;
    while let (Mso::ExistsSet(v, b), true) | (Mso::ForallSet(v, b), false) = (cur, existential) {
        let (v, inner) = (v.as_str(), &**b);
        if chain.vars.contains(&v) || chain.side.iter().any(|s| s.free_vars().contains(v)) {
            break;
        }
        chain.vars.push(v);
        chain.body = inner;
        cur = inner;
        // `∃X (X ⊆ g ∧ … ∧ rest)` and `∀X (X ⊆ g → rest)`.
        match (inner, existential) {
            (Mso::And(xs), true) if xs.len() >= 2 => {
                let (last, init) = xs.split_last().expect("nonempty");
                if !init.iter().any(|s| s.free_vars().iter().any(|n| chain.vars.contains(&n.as_str()) && n != v))
                    && matches!(last, Mso::ExistsSet(..))
                {
                    for s in init {
                        if let Mso::Subset(x, g) = s {
                            if x == v {
                                chain.guards.push((x.as_str(), g));
                            }
                        }
                        chain.side.push(s);
                    }
                    chain.body = last;
                    cur = last;
                }
            }
            (Mso::Implies(p, rest), false) => {
                if let (Mso::Subset(x, g), Mso::ForallSet(..)) = (&**p, &**rest) {
                    if x == v {
                        chain.guards.push((x.as_str(), g));
                        chain.side.push(p);
                        chain.body = rest;
                        cur = rest;
                    }
                }
            }
            _ => {}
        }
    }
    chain
}

impl<'a> Evaluator<'a> {
    fn eval(&mut self, f: &Mso, env: &mut Env) -> Result<Tri> {
        Ok(match f {
            Mso::True => Tri::True,
            Mso::False => Tri::False,
            Mso::Rel(r, args) => {
                let mut t = Vec::with_capacity(args.len());
                for x in args {
                    t.push(env.elem(x)?);
                }
                Tri::from_bool(self.a.holds(r, &t))
            }
            Mso::In(x, s) => {
                let e = env.elem(x)?;
                let (inn, known) = env.set(s)?;
                member(inn, known, e)
            }
            Mso::Eq(x, y) => Tri::from_bool(env.elem(x)? == env.elem(y)?),
            Mso::Not(a) => self.eval(a, env)?.not(),
            Mso::Tag(_, a) => self.eval(a, env)?,
            Mso::And(xs) => {
                let mut acc = Tri::True;
                for x in xs {
                    acc = acc.and(self.eval(x, env)?);
                    if acc.is_false() {
                        break;
                    }
                }
                acc
            }
            Mso::Or(xs) => {
                let mut acc = Tri::False;
                for x in xs {
                    acc = acc.or(self.eval(x, env)?);
                    if acc.is_true() {
                        break;
                    }
                }
                acc
            }
            Mso::Implies(a, b) => {
                let l = self.eval(a, env)?;
                if l.is_false() {
                    Tri::True
                } else {
                    l.not().or(self.eval(b, env)?)
                }
            }
            Mso::Exists(v, b) | Mso::Forall(v, b) => {
                let key = self.memo_key(f, env)?;
                if let Some(k) = &key {
                    if let Some(&t) = self.memo.get(k) {
                        return Ok(t);
                    }
                }
                let t = self.quantify(v, b, env, matches!(f, Mso::Exists(..)))?;
                if let Some(k) = key {
                    self.memo.insert(k, t);
                }
                t
            }
            Mso::ExistsSet(..) => self.set_search(f, env, true)?,
            Mso::ForallSet(..) => self.set_search(f, env, false)?,
            Mso::Bound(v, b) => {
                self.stats.bound_evaluations += 1;
                if self.options.bound_diagnostics {
                    self.bound_diagnostics(v, b, env)?;
                }
                Tri::True
            }
            Mso::Subset(x, g) => {
                let (inn, known) = env.set(x)?;
                let mut acc = Tri::True;
                for e in 0..self.n {
                    let m = member(inn, known, e);
                    if m.is_false() {
                        continue;
                    }
                    let ge = self.apply1(g, e, env)?;
                    acc = acc.and(m.not().or(ge));
                    if acc.is_false() {
                        break;
                    }
                }
                acc
            }
            Mso::Reach(r) => self.reach(f, r, env)?,
        })
    }

    fn quantify(&mut self, v: &str, b: &Mso, env: &mut Env, existential: bool) -> Result<Tri> {
        let (unit, absorbing) = if existential {
            (Tri::False, Tri::True)
        } else {
            (Tri::True, Tri::False)
        };
        let mut acc = unit;
        for e in 0..self.n {
            env.push(v.to_string(), Val::Elem(e));
            let r = self.eval(b, env);
            env.pop();
            let r = r?;
            acc = if existential { acc.or(r) } else { acc.and(r) };
            if acc == absorbing {
                break;
            }
        }
        Ok(acc)
    }

    fn apply1(&mut self, g: &Lambda1, e: usize, env: &mut Env) -> Result<Tri> {
        env.push(g.var.clone(), Val::Elem(e));
        let r = self.eval(&g.body, env);
        env.pop();
        r
    }

    fn apply2(&mut self, l: &Lambda2, x: usize, y: usize, env: &mut Env) -> Result<Tri> {
        env.push(l.x.clone(), Val::Elem(x));
        env.push(l.y.clone(), Val::Elem(y));
        let r = self.eval(&l.body, env);
        env.pop();
        env.pop();
        r
    }

    /// Evaluates a chain of set quantifiers by a joint search. For `∃` a
    /// branch succeeds when the matrix becomes true and is cut when it
    /// becomes false; `∀` is the dual search for a counterexample.
    fn set_search(&mut self, f: &Mso, env: &mut Env, existential: bool) -> Result<Tri> {
        let chain = collect_chain(f, existential);
        for v in &chain.vars {
            env.push(v.to_string(), Val::Set { inn: 0, known: 0 });
        }
        let r = self.search_level(&chain, 0, env, existential);
        for _ in &chain.vars {
            env.pop();
        }
        r
    }

    fn matrix(&mut self, chain: &Chain<'_>, env: &mut Env, existential: bool) -> Result<Tri> {
        if existential {
            let mut acc = Tri::True;
            for s in &chain.side {
                acc = acc.and(self.eval(s, env)?);
                if acc.is_false() {
                    return Ok(acc);
                }
            }
            Ok(acc.and(self.eval(chain.body, env)?))
        } else {
            let mut premise = Tri::True;
            for s in &chain.side {
                premise = premise.and(self.eval(s, env)?);
                if premise.is_false() {
                    return Ok(Tri::True);
                }
            }
            Ok(premise.not().or(self.eval(chain.body, env)?))
        }
    }

    fn search_level(
        &mut self,
        chain: &Chain<'_>,
        e: usize,
        env: &mut Env,
        existential: bool,
    ) -> Result<Tri> {
        self.stats.set_search_nodes += 1;
        let here = self.matrix(chain, env, existential)?;
        let goal = Tri::from_bool(existential);
        if here != Tri::Unknown || e == self.n {
            return Ok(here);
        }
        // Elements excluded by a side condition are never added.
        let mut allowed = (1u64 << chain.vars.len()) - 1;
        for (x, g) in &chain.guards {
            if self.apply1(g, e, env)?.is_false() {
                let idx = chain.vars.iter().position(|v| v == x).expect("chain variable");
                allowed &= !(1u64 << idx);
            }
        }
        let mut acc = goal.not();
        let mut combo = allowed;
        loop {
            for (i, v) in chain.vars.iter().enumerate() {
                if let Val::Set { inn, known } = env.set_mut(v) {
                    *known |= 1 << e;
                    if combo >> i & 1 == 1 {
                        *inn |= 1 << e;
                    } else {
                        *inn &= !(1 << e);
                    }
                }
            }
            let r = self.search_level(chain, e + 1, env, existential);
            let r = match r {
                Ok(r) => r,
                Err(err) => {
                    self.undo(chain, e, env);
                    return Err(err);
                }
            };
            acc = if existential { acc.or(r) } else { acc.and(r) };
            if acc == goal || combo == 0 {
                break;
            }
            combo = (combo - 1) & allowed;
        }
        self.undo(chain, e, env);
        Ok(acc)
    }

    fn undo(&self, chain: &Chain<'_>, e: usize, env: &mut Env) {
        for v in &chain.vars {
            if let Val::Set { inn, known } = env.set_mut(v) {
                *known &= !(1 << e);
                *inn &= !(1 << e);
            }
        }
    }

    fn bound_diagnostics(&mut self, v: &str, b: &Mso, env: &mut Env) -> Result<()> {
        let mut best: Option<usize> = None;
        for mask in 0..=self.full {
            env.push(v.to_string(), Val::Set { inn: mask, known: self.full });
            let r = self.eval(b, env);
            env.pop();
            if r?.is_true() {
                let size = mask.count_ones() as usize;
                best = Some(best.map_or(size, |m| m.max(size)));
            }
        }
        if let Some(s) = best {
            self.stats.max_bound_witness = Some(self.stats.max_bound_witness.map_or(s, |m| m.max(s)));
        }
        Ok(())
    }

    fn memo_key(&mut self, f: &Mso, env: &Env) -> Result<Option<(usize, Vec<usize>)>> {
        let key = f as *const Mso as usize;
        if !self.free_cache.contains_key(&key) {
            self.free_cache.insert(key, f.free_vars().into_iter().collect());
        }
        let mut vals = Vec::new();
        for v in &self.free_cache[&key] {
            match env.get(v)? {
                Val::Elem(e) => vals.push(e),
                Val::Set { .. } => return Ok(None),
            }
        }
        Ok(Some((key, vals)))
    }

    fn free_of(&mut self, f: &Mso) -> Vec<String> {
        let key = f as *const Mso as usize;
        if let Some(v) = self.free_cache.get(&key) {
            return v.clone();
        }
        let Mso::Reach(r) = f else { unreachable!() };
        // Endpoints only select an entry of the closure.
        let mut free = r.edge.free_vars();
        if let Some(g) = &r.guard {
            free.extend(g.free_vars());
        }
        if let Some(z) = &r.within {
            free.insert(z.clone());
        }
        let free: Vec<String> = free.into_iter().collect();
        self.free_cache.insert(key, free.clone());
        free
    }

    fn reach(&mut self, f: &Mso, r: &Reach, env: &mut Env) -> Result<Tri> {
        let from = env.elem(&r.from)?;
        let to = env.elem(&r.to)?;
        let free = self.free_of(f);
        let mut ctx = Vec::with_capacity(free.len());
        for v in &free {
            ctx.push(env.get(v)?);
        }
        let key = (f as *const Mso as usize, ctx);
        if !self.reach_cache.contains_key(&key) {
            let c = self.closures(r, env)?;
            self.reach_cache.insert(key.clone(), c);
        }
        let (sure, maybe) = {
            let c = &self.reach_cache[&key][from];
            (c.0 >> to & 1 == 1, c.1 >> to & 1 == 1)
        };
        let within_from = match &r.within {
            Some(z) => {
                let (inn, known) = env.set(z)?;
                member(inn, known, from)
            }
            None => Tri::True,
        };
        let guard_from = match &r.guard {
            Some(g) => self.apply1(g, from, env)?,
            None => Tri::True,
        };
        let path = if sure {
            Tri::True
        } else if !maybe {
            Tri::False
        } else {
            Tri::Unknown
        };
        // A guard failing at `from` makes the relativised formula vacuous.
        let guarded = guard_from.not().or(path);
        Ok(within_from.and(guarded))
    }

    /// For every source `s`, the nodes reachable from `s` along edges
    /// whose target lies in `within` and the guard, through nodes in the
    /// guard; the source itself is always included.
    fn closures(&mut self, r: &Reach, env: &mut Env) -> Result<Closures> {
        let n = self.n;
        let mut node_sure = self.full;
        let mut node_maybe = self.full;
        for e in 0..n {
            let mut t = Tri::True;
            if let Some(z) = &r.within {
                let (inn, known) = env.set(z)?;
                t = t.and(member(inn, known, e));
            }
            if let Some(g) = &r.guard {
                t = t.and(self.apply1(g, e, env)?);
            }
            if t.is_false() {
                node_sure &= !(1 << e);
                node_maybe &= !(1 << e);
            } else if t == Tri::Unknown {
                node_sure &= !(1 << e);
            }
        }
        let mut succ_sure = alloc::vec![0u64; n];
        let mut succ_maybe = alloc::vec![0u64; n];
        for x in 0..n {
            if node_maybe >> x & 1 == 0 && r.guard.is_some() {
                continue;
            }
            for y in 0..n {
                if node_maybe >> y & 1 == 0 {
                    continue;
                }
                match self.apply2(&r.edge, x, y, env)? {
                    Tri::True => {
                        succ_maybe[x] |= 1 << y;
                        if node_sure >> y & 1 == 1 {
                            succ_sure[x] |= 1 << y;
                        }
                    }
                    Tri::Unknown => succ_maybe[x] |= 1 << y,
                    Tri::False => {}
                }
            }
        }
        let guard_sure = if r.guard.is_some() { node_sure } else { self.full };
        let guard_maybe = if r.guard.is_some() { node_maybe } else { self.full };
        let close = |succ: &[u64], s: usize, inner: u64| -> u64 {
            let mut seen = 1u64 << s;
            let mut frontier = seen;
            while frontier != 0 {
                let x = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                if x != s && inner >> x & 1 == 0 {
                    continue;
                }
                let next = succ[x] & !seen;
                seen |= next;
                frontier |= next;
            }
            seen
        };
        let mut out = Vec::with_capacity(n);
        for s in 0..n {
            let sure = close(&succ_sure, s, guard_sure);
            let maybe = close(&succ_maybe, s, guard_maybe);
            out.push((sure, maybe));
        }
        Ok(out)
    }
}
