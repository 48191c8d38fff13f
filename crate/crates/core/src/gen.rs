//! Seedable random generators for structures, models and formulas.
//!
//! These feed the differential test suites and the command-line self
//! test. All functions are deterministic given the generator state.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::Value;
use crate::formula::{AtomicConstraint, PathFormula, RelationSymbol, StateFormula, Term};
use crate::kripke::ConstraintKripke;
use crate::structure::SigmaStructure;

/// The test signature: `<`, `=`, `=_0`, `=_2`, `≡_{0,2}`, `≡_{1,2}`,
/// `≡_{1,3}`.
pub fn sigma0() -> Vec<RelationSymbol> {
    vec![
        RelationSymbol::less(),
        RelationSymbol::equal(),
        RelationSymbol::int_constant(0),
        RelationSymbol::int_constant(2),
        RelationSymbol::modulo(0, 2).expect("valid modulus"),
        RelationSymbol::modulo(1, 2).expect("valid modulus"),
        RelationSymbol::modulo(1, 3).expect("valid modulus"),
    ]
}

/// Number of possible σ₀ tuples over `n` elements.
pub fn sigma0_tuple_slots(n: usize) -> usize {
    2 * n * n + 5 * n
}

/// The σ₀ structure on `n` elements whose tuples are selected by `bits`:
/// first the `<` pairs in row-major order, then the `=` pairs, then each
/// unary symbol per element.
pub fn sigma0_structure_from_bits(n: usize, bits: u64) -> SigmaStructure {
    let sig = sigma0();
    let mut a = SigmaStructure::with_size(n);
    for r in &sig {
        a.declare(r.clone());
    }
    let mut k = 0;
    let mut take = || {
        let b = bits >> k & 1 == 1;
        k += 1;
        b
    };
    for r in &sig[..2] {
        for x in 0..n {
            for y in 0..n {
                if take() {
                    a.add_tuple(r, vec![x, y]).expect("arity matches");
                }
            }
        }
    }
    for r in &sig[2..] {
        for x in 0..n {
            if take() {
                a.add_tuple(r, vec![x]).expect("arity matches");
            }
        }
    }
    a
}

/// A random σ₀ structure with sparse relations.
pub fn random_sigma0_structure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SigmaStructure {
    let sig = sigma0();
    let mut a = SigmaStructure::with_size(n);
    for r in &sig {
        a.declare(r.clone());
    }
    for x in 0..n {
        for y in 0..n {
            if rng.gen_bool(0.18) {
                a.add_tuple(&sig[0], vec![x, y]).expect("arity matches");
            }
            if x < y && rng.gen_bool(0.07) {
                a.add_tuple(&sig[1], vec![x, y]).expect("arity matches");
            }
        }
        for r in &sig[2..] {
            if rng.gen_bool(0.08) {
                a.add_tuple(r, vec![x]).expect("arity matches");
            }
        }
    }
    a
}

/// A random total graph on `n` nodes given as successor lists.
pub fn random_total_graph<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
            if s.is_empty() {
                s.push(rng.gen_range(0..n));
            }
            s
        })
        .collect()
}

fn random_labels<R: Rng + ?Sized>(rng: &mut R, props: &[&str]) -> BTreeSet<String> {
    props
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|p| p.to_string())
        .collect()
}

/// A random total integer model with nodes `s0, s1, …` and register
/// values in `[-range, range]`.
pub fn random_model<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    vars: &[&str],
    props: &[&str],
    range: i64,
) -> ConstraintKripke {
    let succ = random_total_graph(rng, n);
    let labels = (0..n).map(|_| random_labels(rng, props)).collect();
    let registers = (0..n)
        .map(|_| {
            vars.iter()
                .map(|_| Value::Int(rng.gen_range(-range..=range)))
                .collect()
        })
        .collect();
    ConstraintKripke::graph(
        (0..n).map(|i| format!("s{i}")).collect(),
        succ,
        labels,
        vars.iter().map(|v| v.to_string()).collect(),
        registers,
    )
    .expect("generated models are valid")
}

/// A random full integer tree.
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    branching: usize,
    depth: usize,
    vars: &[&str],
    props: &[&str],
    range: i64,
) -> ConstraintKripke {
    let mut labels = Vec::new();
    let mut regs = Vec::new();
    for _ in crate::kripke::tree_words(branching, depth) {
        labels.push(random_labels(rng, props));
        regs.push(
            vars.iter()
                .map(|_| Value::Int(rng.gen_range(-range..=range)))
                .collect::<Vec<_>>(),
        );
    }
    let (mut li, mut ri) = (labels.into_iter(), regs.into_iter());
    ConstraintKripke::full_tree(
        branching,
        depth,
        vars.iter().map(|v| v.to_string()).collect(),
        |_| li.next().expect("one label set per node"),
        |_| ri.next().expect("one register row per node"),
    )
    .expect("generated trees are valid")
}

/// Symbols and names used by the formula generators.
#[derive(Clone, Debug)]
pub struct FormulaAlphabet {
    pub props: Vec<String>,
    pub vars: Vec<String>,
    /// Unary symbols, such as constants and congruences.
    pub unary: Vec<RelationSymbol>,
    /// Binary symbols, such as `<` and `=`.
    pub binary: Vec<RelationSymbol>,
    /// Largest offset `X^i` inside a constraint.
    pub max_offset: usize,
}

impl FormulaAlphabet {
    /// Propositions `p`, `q`, variables `x`, `y` and the σ₀ symbols.
    pub fn sigma0(max_offset: usize) -> Self {
        let sig = sigma0();
        FormulaAlphabet {
            props: vec!["p".into(), "q".into()],
            vars: vec!["x".into(), "y".into()],
            binary: sig[..2].to_vec(),
            unary: sig[2..].to_vec(),
            max_offset,
        }
    }

    /// No constraints at all.
    pub fn propositional(props: &[&str]) -> Self {
        FormulaAlphabet {
            props: props.iter().map(|p| p.to_string()).collect(),
            vars: Vec::new(),
            unary: Vec::new(),
            binary: Vec::new(),
            max_offset: 0,
        }
    }

    fn has_constraints(&self) -> bool {
        !self.vars.is_empty() && !(self.unary.is_empty() && self.binary.is_empty())
    }

    fn term<R: Rng + ?Sized>(&self, rng: &mut R) -> Term {
        let v = self.vars.choose(rng).expect("variables exist");
        Term::new(rng.gen_range(0..=self.max_offset), v)
    }

    /// A random atomic constraint.
    pub fn constraint<R: Rng + ?Sized>(&self, rng: &mut R) -> AtomicConstraint {
        let use_binary = self.unary.is_empty() || (!self.binary.is_empty() && rng.gen_bool(0.6));
        if use_binary {
            let r = self.binary.choose(rng).expect("nonempty").clone();
            let args = vec![self.term(rng), self.term(rng)];
            AtomicConstraint::new(r, args).expect("arity matches")
        } else {
            let r = self.unary.choose(rng).expect("nonempty").clone();
            AtomicConstraint::new(r, vec![self.term(rng)]).expect("arity matches")
        }
    }

    fn prop<R: Rng + ?Sized>(&self, rng: &mut R) -> StateFormula {
        match self.props.choose(rng) {
            Some(p) => StateFormula::Prop(p.clone()),
            None => {
                if rng.gen_bool(0.5) {
                    StateFormula::True
                } else {
                    StateFormula::False
                }
            }
        }
    }

    /// A CTL-shaped state formula: every temporal operator sits directly
    /// under a path quantifier, with operands built from state formulas
    /// and (if available) constraints.
    pub fn ctl_formula<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> StateFormula {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.prop(rng);
        }
        let sub = |rng: &mut R| self.ctl_formula(rng, depth - 1);
        match rng.gen_range(0..7) {
            0 => StateFormula::not(sub(rng)),
            1 => StateFormula::and(sub(rng), sub(rng)),
            2 => StateFormula::or(sub(rng), sub(rng)),
            k => {
                let body = match rng.gen_range(0..3) {
                    0 => PathFormula::next(self.ctl_operand(rng, depth - 1)),
                    1 => PathFormula::until(self.ctl_operand(rng, depth - 1), self.ctl_operand(rng, depth - 1)),
                    _ => PathFormula::release(self.ctl_operand(rng, depth - 1), self.ctl_operand(rng, depth - 1)),
                };
                if k % 2 == 0 {
                    StateFormula::exists(body)
                } else {
                    StateFormula::all(body)
                }
            }
        }
    }

    fn ctl_operand<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> PathFormula {
        if self.has_constraints() && rng.gen_bool(0.3) {
            let c = PathFormula::constraint(self.constraint(rng));
            return match rng.gen_range(0..3) {
                0 => PathFormula::not(c),
                1 => PathFormula::and(c, PathFormula::state(self.ctl_formula(rng, depth))),
                _ => c,
            };
        }
        PathFormula::state(self.ctl_formula(rng, depth))
    }

    /// A CTL* state formula with arbitrary nesting of path operators.
    pub fn ctlstar_formula<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> StateFormula {
        if depth == 0 || rng.gen_bool(0.15) {
            return self.prop(rng);
        }
        match rng.gen_range(0..6) {
            0 => StateFormula::not(self.ctlstar_formula(rng, depth - 1)),
            1 => StateFormula::and(self.ctlstar_formula(rng, depth - 1), self.ctlstar_formula(rng, depth - 1)),
            2 => StateFormula::or(self.ctlstar_formula(rng, depth - 1), self.ctlstar_formula(rng, depth - 1)),
            3 => StateFormula::all(self.path_formula(rng, depth - 1)),
            _ => StateFormula::exists(self.path_formula(rng, depth - 1)),
        }
    }

    /// A CTL* path formula.
    pub fn path_formula<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> PathFormula {
        if depth == 0 || rng.gen_bool(0.15) {
            if self.has_constraints() && rng.gen_bool(0.5) {
                return PathFormula::constraint(self.constraint(rng));
            }
            return PathFormula::state(self.prop(rng));
        }
        let sub = |rng: &mut R| self.path_formula(rng, depth - 1);
        match rng.gen_range(0..8) {
            0 => PathFormula::not(sub(rng)),
            1 => PathFormula::and(sub(rng), sub(rng)),
            2 => PathFormula::or(sub(rng), sub(rng)),
            3 => PathFormula::next(sub(rng)),
            4 => PathFormula::until(sub(rng), sub(rng)),
            5 => PathFormula::release(sub(rng), sub(rng)),
            _ => PathFormula::state(self.ctlstar_formula(rng, depth - 1)),
        }
    }

    /// A formula in strong negation normal form whose path formulas use
    /// only `X`, `∧` and `∨`, with path quantifiers only at the top.
    pub fn next_only_formula<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> StateFormula {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.literal(rng);
        }
        match rng.gen_range(0..4) {
            0 => StateFormula::and(self.next_only_formula(rng, depth - 1), self.next_only_formula(rng, depth - 1)),
            1 => StateFormula::or(self.next_only_formula(rng, depth - 1), self.next_only_formula(rng, depth - 1)),
            2 => StateFormula::exists(self.next_only_path(rng, depth - 1)),
            _ => StateFormula::all(self.next_only_path(rng, depth - 1)),
        }
    }

    fn literal<R: Rng + ?Sized>(&self, rng: &mut R) -> StateFormula {
        let p = self.prop(rng);
        if rng.gen_bool(0.3) {
            StateFormula::not(p)
        } else {
            p
        }
    }

    fn next_only_path<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> PathFormula {
        if depth == 0 || rng.gen_bool(0.25) {
            if self.has_constraints() && rng.gen_bool(0.7) {
                return PathFormula::constraint(self.constraint(rng));
            }
            return PathFormula::state(self.literal(rng));
        }
        let sub = |rng: &mut R| self.next_only_path(rng, depth - 1);
        match rng.gen_range(0..3) {
            0 => PathFormula::and(sub(rng), sub(rng)),
            1 => PathFormula::or(sub(rng), sub(rng)),
            _ => PathFormula::next(sub(rng)),
        }
    }

    /// A CTL* formula in negation normal form whose constraints are
    /// negated at most `max_negated` times.
    pub fn nnf_formula<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize, max_negated: usize) -> StateFormula {
        let mut budget = max_negated;
        self.nnf_state(rng, depth, &mut budget)
    }

    fn nnf_state<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize, budget: &mut usize) -> StateFormula {
        if depth == 0 || rng.gen_bool(0.15) {
            return self.literal(rng);
        }
        match rng.gen_range(0..5) {
            0 => StateFormula::and(self.nnf_state(rng, depth - 1, budget), self.nnf_state(rng, depth - 1, budget)),
            1 => StateFormula::or(self.nnf_state(rng, depth - 1, budget), self.nnf_state(rng, depth - 1, budget)),
            2 => StateFormula::all(self.nnf_path(rng, depth - 1, budget)),
            _ => StateFormula::exists(self.nnf_path(rng, depth - 1, budget)),
        }
    }

    fn nnf_path<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize, budget: &mut usize) -> PathFormula {
        if depth == 0 || rng.gen_bool(0.2) {
            if self.has_constraints() && rng.gen_bool(0.7) {
                let c = PathFormula::constraint(self.constraint(rng));
                if *budget > 0 && rng.gen_bool(0.4) {
                    *budget -= 1;
                    return PathFormula::not(c);
                }
                return c;
            }
            return PathFormula::state(self.literal(rng));
        }
        match rng.gen_range(0..7) {
            0 => PathFormula::and(self.nnf_path(rng, depth - 1, budget), self.nnf_path(rng, depth - 1, budget)),
            1 => PathFormula::or(self.nnf_path(rng, depth - 1, budget), self.nnf_path(rng, depth - 1, budget)),
            2 => PathFormula::next(self.nnf_path(rng, depth - 1, budget)),
            3 => PathFormula::until(self.nnf_path(rng, depth - 1, budget), self.nnf_path(rng, depth - 1, budget)),
            4 => PathFormula::release(self.nnf_path(rng, depth - 1, budget), self.nnf_path(rng, depth - 1, budget)),
            _ => PathFormula::state(self.nnf_state(rng, depth - 1, budget)),
        }
    }
}

/// A binary constraint tree of depth 3 over the registers `x1`, `x2`
/// with natural-number values, used as a worked example of abstraction
/// and constraint-graph extraction under `lt(x1, X^1 x2)` and
/// `eq(X^1 x1, X^1 x2)`.
pub fn example_constraint_tree() -> ConstraintKripke {
    const VALUES: [(&str, i64, i64); 15] = [
        ("", 1, 2),
        ("1", 2, 2),
        ("2", 1, 3),
        ("11", 3, 3),
        ("12", 2, 0),
        ("21", 2, 0),
        ("22", 3, 0),
        ("111", 0, 4),
        ("112", 2, 2),
        ("121", 0, 2),
        ("122", 0, 3),
        ("211", 0, 2),
        ("212", 0, 0),
        ("221", 4, 4),
        ("222", 3, 3),
    ];
    ConstraintKripke::full_tree(
        2,
        3,
        vec!["x1".into(), "x2".into()],
        |_| BTreeSet::new(),
        |w| {
            let name: String = w.iter().map(|d| char::from(b'0' + d)).collect();
            let (_, a, b) = VALUES
                .iter()
                .find(|(n, _, _)| *n == name)
                .expect("every node has values");
            vec![Value::Int(*a), Value::Int(*b)]
        },
    )
    .expect("the example tree is valid")
}
