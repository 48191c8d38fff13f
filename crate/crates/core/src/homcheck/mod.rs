//! Deciding homomorphisms from finite structures into ℤ, ℕ, ℤ∖ℕ and ℚ.
//!
//! Structures are over `lt`, `eq`, unary constants `eqc[c]` and, for the
//! integer targets, congruences `mod[a,b]`. The decision procedure
//! quotients by `eq`, rules out inconsistent congruences and `<`-cycles,
//! splits the elements into a bounded part (squeezed between constants) and
//! three unbounded parts, solves the bounded part by a greedy pass and
//! places the unbounded parts with longest-path potentials.

mod brute;
mod quotient;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use brute::{brute_force_hom, candidate_values};
pub use quotient::Quotient;

use crate::domain::{ConcreteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::RelKind;
use crate::structure::SigmaStructure;
use crate::util::{congruences_compatible, solve_congruences};
use crate::Rational;

/// Target structure of a homomorphism question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Z,
    N,
    NegZ,
    Q,
}

impl Target {
    pub fn domain(self) -> ConcreteDomain {
        match self {
            Target::Z => ConcreteDomain::Z,
            Target::N => ConcreteDomain::N,
            Target::NegZ => ConcreteDomain::NegZ,
            Target::Q => ConcreteDomain::Q,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "Z" => Ok(Target::Z),
            "N" => Ok(Target::N),
            "negZ" => Ok(Target::NegZ),
            "Q" => Ok(Target::Q),
            _ => Err(Error::UnknownDomain(name.to_string())),
        }
    }

    /// Checks that every relation of `a` is allowed for this target.
    pub fn check_signature(self, a: &SigmaStructure) -> Result<()> {
        for (rel, _) in a.relations() {
            let ok = match (self, rel.kind()) {
                (_, RelKind::Less | RelKind::Equal) => true,
                (Target::Z, RelKind::Constant(c)) => c.is_integer(),
                (Target::Q, RelKind::Constant(_)) => true,
                (Target::Z | Target::N | Target::NegZ, RelKind::Modulo { .. }) => true,
                _ => false,
            };
            if !ok {
                return Err(Error::UnsupportedSymbol {
                    domain: self.to_string(),
                    symbol: rel.name(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.domain(), f)
    }
}

/// Why no homomorphism exists. Element indices refer to the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// The listed elements lie on a cycle of `<` modulo `eq`.
    Cycle { elements: Vec<usize> },
    /// Two congruences on one class have no common solution.
    ModuloContradiction {
        class: Vec<usize>,
        first: (i64, i64),
        second: (i64, i64),
    },
    /// The bounded part admits no assignment; the class is where the
    /// greedy assignment got stuck.
    BoundedInfeasible { class: Vec<usize> },
    /// One class carries two different constants.
    ConstantClash {
        class: Vec<usize>,
        first: Rational,
        second: Rational,
    },
    /// `lower` carries a constant that is not below the constant of
    /// `upper`, although `lower <⁺ upper`.
    OrderConstantConflict { lower: usize, upper: usize },
}

impl FailureReason {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            FailureReason::Cycle { .. } => "cycle",
            FailureReason::ModuloContradiction { .. } => "modulo_contradiction",
            FailureReason::BoundedInfeasible { .. } => "bounded_infeasible",
            FailureReason::ConstantClash { .. } => "constant_clash",
            FailureReason::OrderConstantConflict { .. } => "order_constant_conflict",
        }
    }

    /// Human readable description using the element names of `a`.
    pub fn describe(&self, a: &SigmaStructure) -> String {
        let names = |xs: &[usize]| {
            xs.iter()
                .map(|&i| a.element_name(i))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            FailureReason::Cycle { elements } => format!("cycle through {}", names(elements)),
            FailureReason::ModuloContradiction { class, first, second } => format!(
                "class {{{}}} must be {} mod {} and {} mod {}",
                names(class),
                first.0,
                first.1,
                second.0,
                second.1
            ),
            FailureReason::BoundedInfeasible { class } => {
                format!("no value between the constants fits class {{{}}}", names(class))
            }
            FailureReason::ConstantClash { class, first, second } => format!(
                "class {{{}}} equals both {} and {}",
                names(class),
                first,
                second
            ),
            FailureReason::OrderConstantConflict { lower, upper } => format!(
                "{} <⁺ {} contradicts their constants",
                a.element_name(*lower),
                a.element_name(*upper)
            ),
        }
    }
}

/// Outcome of [`decide_hom`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomDecision {
    pub exists: bool,
    /// A homomorphism, one value per element, when one exists.
    pub witness: Option<Vec<Value>>,
    pub reason: Option<FailureReason>,
}

impl HomDecision {
    fn yes(witness: Vec<Value>) -> Self {
        HomDecision {
            exists: true,
            witness: Some(witness),
            reason: None,
        }
    }

    fn no(reason: FailureReason) -> Self {
        HomDecision {
            exists: false,
            witness: None,
            reason: Some(reason),
        }
    }
}

/// The four parts of an integer structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    /// Between two constants: `c ≤* x ≤* c'`.
    Bounded,
    /// Above some constant but below none.
    Greater,
    /// Below some constant but above none.
    Smaller,
    /// Unrelated to every constant.
    Rest,
}

/// Product of the distinct moduli occurring in `a`.
pub fn modulus_product(a: &SigmaStructure) -> Result<i64> {
    let mut moduli: Vec<i64> = a
        .relations()
        .filter_map(|(r, t)| {
            if t.is_empty() {
                None
            } else {
                r.modulo_value().map(|(_, b)| b)
            }
        })
        .collect();
    moduli.sort_unstable();
    moduli.dedup();
    moduli.iter().try_fold(1i64, |acc, &b| {
        acc.checked_mul(b)
            .ok_or_else(|| Error::Overflow("the product of the moduli".to_string()))
    })
}

/// Smallest and largest integer constant of `a`, each compared with 0.
pub fn constant_window(a: &SigmaStructure) -> (i64, i64) {
    let mut lo = 0i64;
    let mut hi = 0i64;
    for (r, t) in a.relations() {
        if let (Some(c), false) = (r.constant_value(), t.is_empty()) {
            lo = lo.min(c.floor().to_integer());
            hi = hi.max(c.ceil().to_integer());
        }
    }
    (lo, hi)
}

/// Range bound for the brute-force search: `δ · (n + |m| + |M| + 3)`.
///
/// Every witness produced by [`decide_hom`] lies in `[-K, K]`.
pub fn witness_bound(a: &SigmaStructure) -> Result<i64> {
    let delta = modulus_product(a)?;
    let (m, big_m) = constant_window(a);
    let n = a.len() as i64;
    delta
        .checked_mul(n + m.abs() + big_m.abs() + 3)
        .ok_or_else(|| Error::Overflow("the witness bound".to_string()))
}

/// Splits the classes of an integer structure into the four parts.
pub fn partition(a: &SigmaStructure) -> Vec<Part> {
    let q = Quotient::build(a);
    let parts = class_parts(&q);
    (0..a.len()).map(|e| parts[q.class_of[e]]).collect()
}

fn class_parts(q: &Quotient) -> Vec<Part> {
    let pinned: Vec<usize> = (0..q.len()).filter(|&c| !q.constants[c].is_empty()).collect();
    let up = q.closure(&pinned, false);
    let down = q.closure(&pinned, true);
    (0..q.len())
        .map(|c| match (up[c], down[c]) {
            (true, true) => Part::Bounded,
            (true, false) => Part::Greater,
            (false, true) => Part::Smaller,
            (false, false) => Part::Rest,
        })
        .collect()
}

/// Decides whether `a` maps homomorphically into the target and returns a
/// witness or the reason for failure.
pub fn decide_hom(a: &SigmaStructure, target: Target) -> Result<HomDecision> {
    target.check_signature(a)?;
    let q = Quotient::build(a);
    if let Some(r) = constant_clash(&q) {
        return Ok(HomDecision::no(r));
    }
    if target != Target::Q {
        if let Some(r) = modulo_contradiction(&q) {
            return Ok(HomDecision::no(r));
        }
    }
    let order = match q.topological_order() {
        Ok(o) => o,
        Err(cycle) => {
            return Ok(HomDecision::no(FailureReason::Cycle {
                elements: q.members(&cycle),
            }))
        }
    };
    let class_values = match target {
        Target::Z => match integer_assignment(a, &q, &order)? {
            Ok(v) => v,
            Err(r) => return Ok(HomDecision::no(r)),
        },
        Target::N | Target::NegZ => {
            let delta = modulus_product(a)?;
            let residues = class_residues(&q)?;
            let all = vec![true; q.len()];
            let lengths = if target == Target::N {
                longest_ending(&q, &order, &all)
            } else {
                longest_starting(&q, &order, &all)
                    .into_iter()
                    .map(|l| -1 - l)
                    .collect()
            };
            (0..q.len())
                .map(|c| scaled(delta, lengths[c], residues[c]))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .map(Value::Int)
                .collect()
        }
        Target::Q => match rational_assignment(&q, &order) {
            Ok(v) => v,
            Err(r) => return Ok(HomDecision::no(r)),
        },
    };
    let witness: Vec<Value> = (0..a.len())
        .map(|e| class_values[q.class_of[e]].clone())
        .collect();
    debug_assert!(verify_hom(a, &witness, target).unwrap_or(false));
    Ok(HomDecision::yes(witness))
}

fn scaled(delta: i64, length: i64, residue: i64) -> Result<i64> {
    delta
        .checked_mul(length)
        .and_then(|x| x.checked_add(residue))
        .ok_or_else(|| Error::Overflow("a potential".to_string()))
}

/// Checks that `h` maps every element into the target and preserves every
/// relation of `a`.
pub fn verify_hom(a: &SigmaStructure, h: &[Value], target: Target) -> Result<bool> {
    target.check_signature(a)?;
    if h.len() != a.len() {
        return Ok(false);
    }
    let dom = target.domain();
    if !h.iter().all(|v| dom.contains(v)) {
        return Ok(false);
    }
    for (rel, tuples) in a.relations() {
        for t in tuples {
            let args: Vec<Value> = t.iter().map(|&i| h[i].clone()).collect();
            if !dom.eval_relation(rel, &args)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn constant_clash(q: &Quotient) -> Option<FailureReason> {
    (0..q.len()).find_map(|c| {
        (q.constants[c].len() > 1).then(|| FailureReason::ConstantClash {
            class: q.classes[c].clone(),
            first: q.constants[c][0],
            second: q.constants[c][1],
        })
    })
}

fn modulo_contradiction(q: &Quotient) -> Option<FailureReason> {
    for c in 0..q.len() {
        let mods = &q.modulos[c];
        for i in 0..mods.len() {
            for j in i + 1..mods.len() {
                let ((a, b), (x, y)) = (mods[i], mods[j]);
                if !congruences_compatible(a, b, x, y) {
                    return Some(FailureReason::ModuloContradiction {
                        class: q.classes[c].clone(),
                        first: mods[i],
                        second: mods[j],
                    });
                }
            }
        }
    }
    None
}

/// Least non-negative residue satisfying each class's congruences.
fn class_residues(q: &Quotient) -> Result<Vec<i64>> {
    (0..q.len())
        .map(|c| {
            solve_congruences(q.modulos[c].iter().copied())
                .map(|(r, _)| r)
                .ok_or_else(|| Error::Overflow("a congruence system".to_string()))
        })
        .collect()
}

/// Longest `<`-path ending in each class, using only classes in `within`.
fn longest_ending(q: &Quotient, order: &[usize], within: &[bool]) -> Vec<i64> {
    let mut len = vec![0i64; q.len()];
    for &c in order {
        if !within[c] {
            continue;
        }
        for &p in &q.pred[c] {
            if within[p] {
                len[c] = len[c].max(len[p] + 1);
            }
        }
    }
    len
}

/// Longest `<`-path starting in each class, using only classes in `within`.
fn longest_starting(q: &Quotient, order: &[usize], within: &[bool]) -> Vec<i64> {
    let mut len = vec![0i64; q.len()];
    for &c in order.iter().rev() {
        if !within[c] {
            continue;
        }
        for &s in &q.succ[c] {
            if within[s] {
                len[c] = len[c].max(len[s] + 1);
            }
        }
    }
    len
}

fn integer_assignment(
    a: &SigmaStructure,
    q: &Quotient,
    order: &[usize],
) -> Result<core::result::Result<Vec<Value>, FailureReason>> {
    let delta = modulus_product(a)?;
    let (m, big_m) = constant_window(a);
    let parts = class_parts(q);
    let residues = class_residues(q)?;
    let lcms: Vec<i64> = (0..q.len())
        .map(|c| {
            solve_congruences(q.modulos[c].iter().copied())
                .map(|(_, l)| l)
                .unwrap_or(1)
        })
        .collect();

    // Bounded part: least values in [m, M], in topological order.
    let mut value = vec![0i64; q.len()];
    for &c in order {
        if parts[c] != Part::Bounded {
            continue;
        }
        let lower = q.pred[c]
            .iter()
            .filter(|&&p| parts[p] == Part::Bounded)
            .map(|&p| value[p] + 1)
            .fold(m, i64::max);
        let chosen = match q.constants[c].first() {
            Some(k) => {
                let k = k.to_integer();
                let fits = q.modulos[c].iter().all(|&(r, b)| k.rem_euclid(b) == r);
                (k >= lower && fits).then_some(k)
            }
            None => {
                let (r, l) = (residues[c], lcms[c]);
                let v = lower + (r - lower).rem_euclid(l);
                (v <= big_m).then_some(v)
            }
        };
        match chosen {
            Some(v) => value[c] = v,
            None => {
                return Ok(Err(FailureReason::BoundedInfeasible {
                    class: q.classes[c].clone(),
                }))
            }
        }
    }

    // Unbounded parts: longest-path potentials, shifted clear of [m, M].
    let in_parts = |ps: &[Part]| -> Vec<bool> { parts.iter().map(|p| ps.contains(p)).collect() };
    let unbounded = in_parts(&[Part::Greater, Part::Smaller, Part::Rest]);
    let h_r = longest_ending(q, order, &unbounded);
    let h_g = longest_ending(q, order, &in_parts(&[Part::Greater]));
    let h_s = longest_starting(q, order, &in_parts(&[Part::Smaller]));
    for c in 0..q.len() {
        let r = residues[c];
        let hr = scaled(delta, h_r[c], r)?;
        value[c] = match parts[c] {
            Part::Bounded => value[c],
            Part::Rest => hr,
            Part::Greater => {
                let hg = scaled(delta, h_g[c], r)?;
                hr.max(hg) + scaled(delta, big_m + 1, 0)?
            }
            Part::Smaller => {
                let hs = scaled(delta, -1 - h_s[c], r)?;
                hr.min(hs) + scaled(delta, m - 1, 0)?
            }
        };
    }
    Ok(Ok(value.into_iter().map(Value::Int).collect()))
}

fn rational_assignment(
    q: &Quotient,
    order: &[usize],
) -> core::result::Result<Vec<Value>, FailureReason> {
    let k = q.len();
    let pinned: Vec<Option<Rational>> = (0..k).map(|c| q.constants[c].first().copied()).collect();
    // Smallest constant strictly above each class.
    let mut bound_above: Vec<Option<(Rational, usize)>> = vec![None; k];
    for &c in order.iter().rev() {
        let mut best: Option<(Rational, usize)> = None;
        for &s in &q.succ[c] {
            let cands = [pinned[s].map(|v| (v, s)), bound_above[s]];
            for (v, w) in cands.into_iter().flatten() {
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, w));
                }
            }
        }
        bound_above[c] = best;
    }
    for &c in order {
        if let (Some(p), Some((v, w))) = (pinned[c], bound_above[c]) {
            if v <= p {
                return Err(FailureReason::OrderConstantConflict {
                    lower: q.constant_witness[c][0],
                    upper: q.constant_witness[w][0],
                });
            }
        }
    }
    let mut value: Vec<Rational> = vec![Rational::from_integer(0); k];
    for &c in order {
        if let Some(p) = pinned[c] {
            value[c] = p;
            continue;
        }
        let lower = q.pred[c].iter().map(|&p| value[p]).max();
        let upper = bound_above[c].map(|(v, _)| v);
        let one = Rational::from_integer(1);
        value[c] = match (lower, upper) {
            (Some(l), Some(u)) => (l + u) / Rational::from_integer(2),
            (Some(l), None) => l + one,
            (None, Some(u)) => u - one,
            (None, None) => Rational::from_integer(0),
        };
    }
    Ok(value.into_iter().map(Value::rational).collect())
}
