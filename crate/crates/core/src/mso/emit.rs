//! Emission of the sentences that characterise homomorphisms into ℤ, ℕ and
//! ℤ∖ℕ, and of their building blocks.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Lambda1, Lambda2, Logic, Mso, Reach};
use crate::error::{Error, Result};
use crate::formula::{RelKind, RelationSymbol};
use crate::util::{congruences_compatible, FreshNames};

/// Building blocks parameterised by an edge formula `φ(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreKind {
    /// `reach_φ(a, b)`.
    Reach,
    /// `reach^Z_φ(a, b, Z)`: reachability inside `Z`.
    ReachWithin,
    /// `ECycle_φ`: some `φ`-edge closes a cycle.
    ECycle,
    /// `Path_φ(a, b, Z)`: `Z` is a `φ`-path from `a` to `b`.
    Path,
    /// `BPaths_φ(a, b)`: paths from `a` to `b` have bounded length.
    BPaths,
}

/// Sentence targets of [`emit_hom_sentence`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomTarget {
    /// `(ℤ, <)` for structures over `lt` only.
    ZOrder,
    Z,
    N,
    NegZ,
}

/// Emits a building block. The free variables of the result are `a`, `b`
/// (and `Z` where applicable); the edge formula may only have its two
/// parameters free.
pub fn emit_core_formula(kind: CoreKind, edge: &Lambda2) -> Result<Mso> {
    let free = edge.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariableMismatch(format!(
            "edge formula has free variables {:?} besides its parameters",
            free
        )));
    }
    let mut e = Emitter::new(edge.body.all_names());
    Ok(match kind {
        CoreKind::Reach => Mso::reach(edge.clone(), "a", "b"),
        CoreKind::ReachWithin => Mso::reach_within(edge.clone(), "a", "b", "Z"),
        CoreKind::ECycle => e.ecycle(edge),
        CoreKind::Path => e.path(edge, "a", "b", "Z"),
        CoreKind::BPaths => e.bpaths(edge, "a", "b"),
    })
}

/// Relativises every quantifier of `f` to the elements satisfying `guard`.
pub fn relativize(f: &Mso, guard: &Lambda1) -> Mso {
    relativize_with(f, guard, &mut |r, args| Mso::Rel(r.clone(), args.to_vec()))
}

/// [`relativize`], additionally replacing every relation atom by the
/// result of `atom`. The replacements are not relativised.
pub(crate) fn relativize_with(
    f: &Mso,
    guard: &Lambda1,
    atom: &mut dyn FnMut(&RelationSymbol, &[String]) -> Mso,
) -> Mso {
    let mut rec = |x: &Mso| relativize_with(x, guard, atom);
    match f {
        Mso::True | Mso::False | Mso::In(..) | Mso::Eq(..) => f.clone(),
        Mso::Rel(r, args) => atom(r, args),
        Mso::Not(a) => Mso::not(rec(a)),
        Mso::Tag(l, a) => Mso::tag(*l, rec(a)),
        Mso::And(xs) => Mso::And(xs.iter().map(rec).collect()),
        Mso::Or(xs) => Mso::Or(xs.iter().map(rec).collect()),
        Mso::Implies(a, b) => {
            let a = rec(a);
            Mso::implies(a, rec(b))
        }
        Mso::Exists(v, b) => Mso::exists(v, Mso::And(vec![guard.apply(v), rec(b)])),
        Mso::Forall(v, b) => Mso::forall(v, Mso::implies(guard.apply(v), rec(b))),
        Mso::ExistsSet(v, b) => {
            Mso::exists_set(v, Mso::And(vec![Mso::subset(v, guard.clone()), rec(b)]))
        }
        Mso::ForallSet(v, b) => {
            Mso::forall_set(v, Mso::implies(Mso::subset(v, guard.clone()), rec(b)))
        }
        Mso::Bound(v, b) => Mso::bound(v, Mso::And(vec![Mso::subset(v, guard.clone()), rec(b)])),
        Mso::Subset(x, g) => {
            let body = Mso::implies(guard.apply(&g.var), rec(&g.body));
            Mso::subset(x, Lambda1::new(&g.var, body))
        }
        Mso::Reach(r) => {
            let combined = match &r.guard {
                None => guard.clone(),
                Some(old) => {
                    let v = old.var.clone();
                    Lambda1::new(&v, Mso::And(vec![guard.apply(&v), rec(&old.body)]))
                }
            };
            let edge = Lambda2::new(&r.edge.x, &r.edge.y, rec(&r.edge.body));
            Mso::Reach(Box::new(Reach {
                edge,
                from: r.from.clone(),
                to: r.to.clone(),
                within: r.within.clone(),
                guard: Some(combined),
            }))
        }
    }
}

struct Emitter {
    taken: BTreeSet<String>,
    fo: FreshNames,
    sets: FreshNames,
}

impl Emitter {
    fn new(taken: BTreeSet<String>) -> Self {
        let mut taken = taken;
        for n in ["a", "b", "Z"] {
            taken.insert(n.to_string());
        }
        Emitter {
            taken,
            fo: FreshNames::new("v"),
            sets: FreshNames::new("S"),
        }
    }

    fn var(&mut self) -> String {
        let v = self.fo.next(&self.taken);
        self.taken.insert(v.clone());
        v
    }

    fn set(&mut self) -> String {
        let v = self.sets.next(&self.taken);
        self.taken.insert(v.clone());
        v
    }

    fn ecycle(&mut self, edge: &Lambda2) -> Mso {
        let (x, y) = (self.var(), self.var());
        Mso::exists(
            &x,
            Mso::exists(
                &y,
                Mso::And(vec![Mso::reach(edge.clone(), &x, &y), edge.apply(&y, &x)]),
            ),
        )
    }

    fn path(&mut self, edge: &Lambda2, a: &str, b: &str, z: &str) -> Mso {
        let (x, y) = (self.var(), self.var());
        let rz = |p: &str, q: &str| Mso::reach_within(edge.clone(), p, q, z);
        Mso::forall(
            &x,
            Mso::implies(
                Mso::member(&x, z),
                Mso::forall(
                    &y,
                    Mso::implies(
                        Mso::member(&y, z),
                        Mso::And(vec![
                            Mso::Or(vec![rz(&x, &y), rz(&y, &x)]),
                            rz(a, &x),
                            rz(&x, b),
                        ]),
                    ),
                ),
            ),
        )
    }

    fn bpaths(&mut self, edge: &Lambda2, a: &str, b: &str) -> Mso {
        let z = self.set();
        let p = self.path(edge, a, b, &z);
        Mso::bound(&z, p)
    }

    /// `¬ECycle ∧ ∀x ∀y BPaths(x, y)`.
    fn phi_z(&mut self, edge: &Lambda2) -> Mso {
        let (x, y) = (self.var(), self.var());
        let bp = self.bpaths(edge, &x, &y);
        Mso::And(vec![
            Mso::not(self.ecycle(edge)),
            Mso::forall(&x, Mso::forall(&y, bp)),
        ])
    }

    /// `¬ECycle ∧ ∀y B Z ∃x Path(x, y, Z)` (or with the roles of the
    /// endpoints swapped for the negative integers).
    fn phi_half(&mut self, edge: &Lambda2, upward: bool) -> Mso {
        let (x, y) = (self.var(), self.var());
        let z = self.set();
        let path = if upward {
            self.path(edge, &x, &y, &z)
        } else {
            self.path(edge, &y, &x, &z)
        };
        Mso::And(vec![
            Mso::not(self.ecycle(edge)),
            Mso::forall(&y, Mso::bound(&z, Mso::exists(&x, path))),
        ])
    }
}

fn eq_sym(a: &str, b: &str) -> Mso {
    Mso::Or(vec![
        Mso::rel(RelationSymbol::equal(), &[a, b]),
        Mso::rel(RelationSymbol::equal(), &[b, a]),
    ])
}

/// `a ∼ b`: reachability along `eq` in either direction.
fn sim(a: &str, b: &str) -> Mso {
    Mso::reach(Lambda2::new("x", "y", eq_sym("x", "y")), a, b)
}

/// The edge formula `φ_<(x, y) = ∃u ∃v (x ∼ u ∧ u < v ∧ v ∼ y)`.
fn less_mod_sim() -> Lambda2 {
    Lambda2::new(
        "x",
        "y",
        Mso::exists(
            "u",
            Mso::exists(
                "w",
                Mso::And(vec![
                    sim("x", "u"),
                    Mso::rel(RelationSymbol::less(), &["u", "w"]),
                    sim("w", "y"),
                ]),
            ),
        ),
    )
}

/// The edge formula of `≤`: `x < y ∨ E_=(x, y) ∨ E_=(y, x)`.
fn le_edge() -> Lambda2 {
    Lambda2::new(
        "x",
        "y",
        Mso::Or(vec![
            Mso::rel(RelationSymbol::less(), &["x", "y"]),
            eq_sym("x", "y"),
        ]),
    )
}

struct Signature {
    constants: Vec<i64>,
    moduli: Vec<(i64, i64)>,
    has_less: bool,
    has_equal: bool,
}

fn analyse(sig: &BTreeSet<RelationSymbol>, target: HomTarget) -> Result<Signature> {
    let mut s = Signature {
        constants: Vec::new(),
        moduli: Vec::new(),
        has_less: false,
        has_equal: false,
    };
    let unsupported = |r: &RelationSymbol| Error::UnsupportedSymbol {
        domain: format!("{target:?}"),
        symbol: r.name(),
    };
    for r in sig {
        match (r.kind(), target) {
            (RelKind::Less, _) => s.has_less = true,
            (RelKind::Equal, HomTarget::Z | HomTarget::N | HomTarget::NegZ) => s.has_equal = true,
            (RelKind::Constant(c), HomTarget::Z) if c.is_integer() => s.constants.push(c.to_integer()),
            (RelKind::Modulo { residue, modulus }, HomTarget::Z | HomTarget::N | HomTarget::NegZ) => {
                s.moduli.push((*residue, *modulus))
            }
            _ => return Err(unsupported(r)),
        }
    }
    let _ = (s.has_less, s.has_equal);
    Ok(s)
}

/// The sentence that holds in a finite structure over `sig` iff the
/// structure maps homomorphically into the target.
pub fn emit_hom_sentence(sig: &BTreeSet<RelationSymbol>, target: HomTarget) -> Result<Mso> {
    let s = analyse(sig, target)?;
    let mut taken = BTreeSet::new();
    for n in ["x", "y", "u", "w"] {
        taken.insert(n.to_string());
    }
    let mut e = Emitter::new(taken);
    if target == HomTarget::ZOrder {
        let lt = Lambda2::new("x", "y", Mso::rel(RelationSymbol::less(), &["x", "y"]));
        return Ok(Mso::tag(Logic::WmsoB, e.phi_z(&lt)));
    }
    let edge = less_mod_sim();
    let modcon = Mso::tag(Logic::Wmso, Mso::not(modcon(&mut e, &s.moduli)));
    match target {
        HomTarget::N => Ok(Mso::And(vec![
            Mso::tag(Logic::WmsoB, e.phi_half(&edge, true)),
            modcon,
        ])),
        HomTarget::NegZ => Ok(Mso::And(vec![
            Mso::tag(Logic::WmsoB, e.phi_half(&edge, false)),
            modcon,
        ])),
        _ => {
            let parts = PartFormulas::new(&mut e, &s.constants);
            let unbounded = Lambda1::new(
                "x",
                Mso::Or(vec![
                    parts.greater.apply("x"),
                    parts.smaller.apply("x"),
                    parts.rest.apply("x"),
                ]),
            );
            let phi_b = Mso::tag(Logic::Mso, bounded_part(&mut e, &s, &parts.bounded));
            let phi_z = e.phi_z(&edge);
            let phi_n = e.phi_half(&edge, true);
            let phi_negz = e.phi_half(&edge, false);
            Ok(Mso::And(vec![
                phi_b,
                Mso::tag(Logic::WmsoB, relativize(&phi_z, &unbounded)),
                Mso::tag(Logic::WmsoB, relativize(&phi_n, &parts.greater)),
                Mso::tag(Logic::WmsoB, relativize(&phi_negz, &parts.smaller)),
                modcon,
            ]))
        }
    }
}

/// Unary formulas selecting the four parts of a structure.
struct PartFormulas {
    bounded: Lambda1,
    greater: Lambda1,
    smaller: Lambda1,
    rest: Lambda1,
}

impl PartFormulas {
    fn new(e: &mut Emitter, constants: &[i64]) -> Self {
        let has_const = |v: &str| {
            Mso::Or(
                constants
                    .iter()
                    .map(|&c| Mso::rel(RelationSymbol::int_constant(c), &[v]))
                    .collect(),
            )
        };
        let x = "x";
        let (y, z) = (e.var(), e.var());
        let above = |e: &mut Emitter| {
            let y = e.var();
            Mso::exists(&y, Mso::And(vec![has_const(&y), Mso::reach(le_edge(), &y, x)]))
        };
        let below = |e: &mut Emitter| {
            let z = e.var();
            Mso::exists(&z, Mso::And(vec![has_const(&z), Mso::reach(le_edge(), x, &z)]))
        };
        let bounded = Mso::exists(
            &y,
            Mso::exists(
                &z,
                Mso::And(vec![
                    has_const(&y),
                    has_const(&z),
                    Mso::reach(le_edge(), &y, x),
                    Mso::reach(le_edge(), x, &z),
                ]),
            ),
        );
        let greater = Mso::And(vec![Mso::not(bounded.clone()), above(e)]);
        let smaller = Mso::And(vec![Mso::not(bounded.clone()), below(e)]);
        let r = e.var();
        let rest = Mso::not(Mso::exists(
            &r,
            Mso::And(vec![
                has_const(&r),
                Mso::Or(vec![Mso::reach(le_edge(), &r, x), Mso::reach(le_edge(), x, &r)]),
            ]),
        ));
        PartFormulas {
            bounded: Lambda1::new(x, bounded),
            greater: Lambda1::new(x, greater),
            smaller: Lambda1::new(x, smaller),
            rest: Lambda1::new(x, rest),
        }
    }
}

fn window_set(i: i64) -> String {
    if i < 0 {
        format!("X_m{}", -i)
    } else {
        format!("X_{i}")
    }
}

/// `φ_B`: the bounded part can be partitioned into sets `X_m … X_M`, one
/// per value of the window, respecting every relation.
fn bounded_part(e: &mut Emitter, s: &Signature, bounded: &Lambda1) -> Mso {
    let lo = s.constants.iter().copied().chain([0]).min().unwrap();
    let hi = s.constants.iter().copied().chain([0]).max().unwrap();
    let window: Vec<i64> = (lo..=hi).collect();
    let sets: Vec<String> = window.iter().map(|&i| window_set(i)).collect();
    for n in &sets {
        e.taken.insert(n.clone());
    }
    let (x, y) = (e.var(), e.var());
    let member = |v: &str, i: usize| Mso::member(v, &sets[i]);
    let k = window.len();

    let mut exclusive = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            exclusive.push(Mso::not(Mso::And(vec![member(&x, i), member(&x, j)])));
        }
    }
    let partition = Mso::forall(
        &x,
        Mso::And(vec![Mso::Or((0..k).map(|i| member(&x, i)).collect()), Mso::And(exclusive)]),
    );

    let mut order = Vec::new();
    for i in 0..k {
        for j in 0..=i {
            order.push(Mso::not(Mso::And(vec![member(&x, i), member(&y, j)])));
        }
    }
    let less = Mso::forall(
        &x,
        Mso::forall(
            &y,
            Mso::implies(Mso::rel(RelationSymbol::less(), &[&x, &y]), Mso::And(order)),
        ),
    );
    let equal = Mso::forall(
        &x,
        Mso::forall(
            &y,
            Mso::implies(
                Mso::rel(RelationSymbol::equal(), &[&x, &y]),
                Mso::And((0..k).map(|i| Mso::implies(member(&x, i), member(&y, i))).collect()),
            ),
        ),
    );
    let constants = Mso::forall(
        &x,
        Mso::And(
            s.constants
                .iter()
                .map(|&c| {
                    let i = (c - lo) as usize;
                    Mso::implies(Mso::rel(RelationSymbol::int_constant(c), &[&x]), member(&x, i))
                })
                .collect(),
        ),
    );
    let moduli = if s.moduli.is_empty() {
        Mso::True
    } else {
        Mso::forall(
            &x,
            Mso::And(
                s.moduli
                    .iter()
                    .map(|&(a, b)| {
                        let sym = RelationSymbol::modulo(a, b).expect("validated symbol");
                        let slots = window
                            .iter()
                            .enumerate()
                            .filter(|(_, &v)| v.rem_euclid(b) == a)
                            .map(|(i, _)| member(&x, i))
                            .collect();
                        Mso::implies(Mso::rel(sym, &[&x]), Mso::Or(slots))
                    })
                    .collect(),
            ),
        )
    };
    let mut body = Mso::And(vec![partition, less, equal, constants, moduli]);
    for n in sets.iter().rev() {
        body = Mso::exists_set(n, body);
    }
    relativize(&body, bounded)
}

/// `φ_modcon`: two `∼`-equivalent elements carry incompatible congruences.
fn modcon(e: &mut Emitter, moduli: &[(i64, i64)]) -> Mso {
    let mut disjuncts = Vec::new();
    for (i, &(a, b)) in moduli.iter().enumerate() {
        for &(c, d) in &moduli[i + 1..] {
            if congruences_compatible(a, b, c, d) {
                continue;
            }
            let (x1, x2) = (e.var(), e.var());
            let xs = [x1.clone(), x2.clone()];
            let mut conj = Vec::new();
            for p in &xs {
                for q in &xs {
                    conj.push(sim(p, q));
                }
            }
            conj.push(Mso::rel(RelationSymbol::modulo(a, b).expect("valid"), &[&x1]));
            conj.push(Mso::rel(RelationSymbol::modulo(c, d).expect("valid"), &[&x2]));
            disjuncts.push(Mso::exists(&x1, Mso::exists(&x2, Mso::And(conj))));
        }
    }
    if disjuncts.is_empty() {
        Mso::False
    } else {
        Mso::Or(disjuncts)
    }
}
