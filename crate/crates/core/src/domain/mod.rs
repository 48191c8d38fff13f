//! Concrete domains and their relations.
//!
//! Supported domains: the integers `Z`, the naturals `N`, the negative
//! integers `negZ`, the rationals `Q`, integer intervals with Allen's
//! relations `allenZ`, and integer tuples under the lexicographic order
//! `lexZ[n]`.

mod allen;
mod interp;
mod posform;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use allen::AllenRelation;
pub use interp::{
    allen_interpretation, apply_interpretation, identity_interpretation, lex_interpretation,
    ExistentialInterpretation,
};
pub use posform::{PosFormula, PositiveExistentialFormula, Slot};

use crate::error::{Error, Result};
use crate::formula::{parse_rational, RelKind, RelationSymbol};
use crate::Rational;

/// A domain value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    /// A non-integral rational. Use [`Value::rational`] to normalise.
    Rat(Rational),
    /// Closed interval `[start, end]` with `start < end`.
    Interval(i64, i64),
    Tuple(Vec<i64>),
}

impl Value {
    /// Normalises integral rationals to [`Value::Int`].
    pub fn rational(r: Rational) -> Value {
        if r.is_integer() {
            Value::Int(*r.numer())
        } else {
            Value::Rat(r)
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Value::Int(i) => Some(Rational::from_integer(*i)),
            Value::Rat(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Parses `3`, `-1/2`, `[0,4]` or `(1,2,3)`.
    pub fn parse(text: &str) -> Result<Value> {
        let t = text.trim();
        let bad = || Error::InvalidValue(text.to_string());
        let ints = |body: &str| -> Result<Vec<i64>> {
            body.split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| bad()))
                .collect()
        };
        if let Some(body) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let v = ints(body)?;
            if v.len() != 2 {
                return Err(bad());
            }
            return Ok(Value::Interval(v[0], v[1]));
        }
        if let Some(body) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            return Ok(Value::Tuple(ints(body)?));
        }
        parse_rational(t).map(Value::rational).ok_or_else(bad)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(r) => write!(f, "{r}"),
            Value::Interval(s, e) => write!(f, "[{s},{e}]"),
            Value::Tuple(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Name of the lexicographic order relation over tuples.
pub const LEX_LESS: &str = "ltlex";

/// The concrete domains known to the library.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConcreteDomain {
    Z,
    N,
    NegZ,
    Q,
    AllenZ,
    LexZ(usize),
}

impl fmt::Display for ConcreteDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcreteDomain::Z => f.write_str("Z"),
            ConcreteDomain::N => f.write_str("N"),
            ConcreteDomain::NegZ => f.write_str("negZ"),
            ConcreteDomain::Q => f.write_str("Q"),
            ConcreteDomain::AllenZ => f.write_str("allenZ"),
            ConcreteDomain::LexZ(n) => write!(f, "lexZ[{n}]"),
        }
    }
}

impl ConcreteDomain {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "Z" => ConcreteDomain::Z,
            "N" => ConcreteDomain::N,
            "negZ" => ConcreteDomain::NegZ,
            "Q" => ConcreteDomain::Q,
            "allenZ" => ConcreteDomain::AllenZ,
            _ => {
                let n = name
                    .strip_prefix("lexZ[")
                    .and_then(|s| s.strip_suffix(']'))
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| Error::UnknownDomain(name.to_string()))?;
                ConcreteDomain::LexZ(n)
            }
        })
    }

    /// Whether `v` is an element of the domain.
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (ConcreteDomain::Z, Value::Int(_)) => true,
            (ConcreteDomain::N, Value::Int(i)) => *i >= 0,
            (ConcreteDomain::NegZ, Value::Int(i)) => *i < 0,
            (ConcreteDomain::Q, Value::Int(_) | Value::Rat(_)) => true,
            (ConcreteDomain::AllenZ, Value::Interval(s, e)) => s < e,
            (ConcreteDomain::LexZ(n), Value::Tuple(t)) => t.len() == *n,
            _ => false,
        }
    }

    /// Whether the relation symbol has an interpretation in this domain.
    pub fn supports(&self, rel: &RelationSymbol) -> bool {
        match (self, rel.kind()) {
            (ConcreteDomain::Z | ConcreteDomain::N | ConcreteDomain::NegZ, RelKind::Less)
            | (ConcreteDomain::Z | ConcreteDomain::N | ConcreteDomain::NegZ, RelKind::Equal)
            | (ConcreteDomain::Z | ConcreteDomain::N | ConcreteDomain::NegZ, RelKind::Modulo { .. }) => true,
            (ConcreteDomain::Z, RelKind::Constant(c)) => c.is_integer(),
            (ConcreteDomain::N, RelKind::Constant(c)) => c.is_integer() && *c.numer() >= 0,
            (ConcreteDomain::NegZ, RelKind::Constant(c)) => c.is_integer() && *c.numer() < 0,
            (ConcreteDomain::Q, RelKind::Less | RelKind::Equal | RelKind::Constant(_)) => true,
            (ConcreteDomain::AllenZ, RelKind::Equal) => true,
            (ConcreteDomain::AllenZ, RelKind::Named(n)) => {
                rel.arity() == 2 && AllenRelation::from_name(n).is_some()
            }
            (ConcreteDomain::LexZ(_), RelKind::Equal) => true,
            (ConcreteDomain::LexZ(_), RelKind::Named(n)) => rel.arity() == 2 && n == LEX_LESS,
            _ => false,
        }
    }

    pub fn check_symbol(&self, rel: &RelationSymbol) -> Result<()> {
        if self.supports(rel) {
            Ok(())
        } else {
            Err(Error::UnsupportedSymbol {
                domain: self.to_string(),
                symbol: rel.name(),
            })
        }
    }

    /// Evaluates `rel(args)`.
    pub fn eval_relation(&self, rel: &RelationSymbol, args: &[Value]) -> Result<bool> {
        self.check_symbol(rel)?;
        if args.len() != rel.arity() {
            return Err(Error::ArityMismatch {
                symbol: rel.name(),
                expected: rel.arity(),
                found: args.len(),
            });
        }
        for a in args {
            if !self.contains(a) {
                return Err(Error::ValueOutOfDomain {
                    value: a.to_string(),
                    domain: self.to_string(),
                });
            }
        }
        Ok(match self {
            ConcreteDomain::Z | ConcreteDomain::N | ConcreteDomain::NegZ | ConcreteDomain::Q => {
                let v: Vec<Rational> = args.iter().map(|a| a.as_rational().unwrap()).collect();
                match rel.kind() {
                    RelKind::Less => v[0] < v[1],
                    RelKind::Equal => v[0] == v[1],
                    RelKind::Constant(c) => v[0] == *c,
                    RelKind::Modulo { residue, modulus } => {
                        v[0].numer().rem_euclid(*modulus) == *residue
                    }
                    RelKind::Named(_) => unreachable!("rejected by check_symbol"),
                }
            }
            ConcreteDomain::AllenZ => {
                let (Value::Interval(s1, e1), Value::Interval(s2, e2)) = (&args[0], &args[1]) else {
                    unreachable!("checked by contains")
                };
                match rel.kind() {
                    RelKind::Equal => s1 == s2 && e1 == e2,
                    RelKind::Named(n) => AllenRelation::from_name(n)
                        .unwrap()
                        .holds((*s1, *e1), (*s2, *e2)),
                    _ => unreachable!("rejected by check_symbol"),
                }
            }
            ConcreteDomain::LexZ(_) => match rel.kind() {
                RelKind::Equal => args[0] == args[1],
                _ => args[0] < args[1],
            },
        })
    }

    /// Positive-existential definition of the complement of `rel`.
    ///
    /// The formula has `rel.arity()` parameters; its existential variables
    /// become fresh registers when used by the strong negation normal form.
    pub fn negation_formula(&self, rel: &RelationSymbol) -> Result<PositiveExistentialFormula> {
        self.check_symbol(rel)?;
        use Slot::{Fresh, Param};
        let lt = RelationSymbol::less;
        let body = match (self, rel.kind()) {
            (ConcreteDomain::AllenZ, _) => {
                let own = match rel.kind() {
                    RelKind::Named(n) => AllenRelation::from_name(n),
                    _ => None,
                };
                let mut disjuncts = Vec::new();
                if own.is_some() {
                    disjuncts.push(PosFormula::atom(
                        RelationSymbol::equal(),
                        vec![Param(0), Param(1)],
                    ));
                }
                for r in AllenRelation::ALL {
                    if Some(r) != own {
                        disjuncts.push(PosFormula::atom(r.symbol(), vec![Param(0), Param(1)]));
                    }
                }
                return PositiveExistentialFormula::new(2, 0, PosFormula::Or(disjuncts));
            }
            (ConcreteDomain::LexZ(_), RelKind::Equal) => {
                let ltlex = RelationSymbol::named(LEX_LESS, 2)?;
                PosFormula::Or(vec![
                    PosFormula::atom(ltlex.clone(), vec![Param(0), Param(1)]),
                    PosFormula::atom(ltlex, vec![Param(1), Param(0)]),
                ])
            }
            (ConcreteDomain::LexZ(_), _) => PosFormula::Or(vec![
                PosFormula::atom(rel.clone(), vec![Param(1), Param(0)]),
                PosFormula::atom(RelationSymbol::equal(), vec![Param(0), Param(1)]),
            ]),
            (_, RelKind::Less) => PosFormula::Or(vec![
                PosFormula::atom(lt(), vec![Param(1), Param(0)]),
                PosFormula::atom(RelationSymbol::equal(), vec![Param(0), Param(1)]),
            ]),
            (_, RelKind::Equal) => PosFormula::Or(vec![
                PosFormula::atom(lt(), vec![Param(0), Param(1)]),
                PosFormula::atom(lt(), vec![Param(1), Param(0)]),
            ]),
            (_, RelKind::Constant(_)) => {
                let body = PosFormula::And(vec![
                    PosFormula::atom(rel.clone(), vec![Fresh(0)]),
                    PosFormula::Or(vec![
                        PosFormula::atom(lt(), vec![Param(0), Fresh(0)]),
                        PosFormula::atom(lt(), vec![Fresh(0), Param(0)]),
                    ]),
                ]);
                return PositiveExistentialFormula::new(1, 1, body);
            }
            (_, RelKind::Modulo { residue, modulus }) => PosFormula::Or(
                (0..*modulus)
                    .filter(|c| c != residue)
                    .map(|c| {
                        Ok(PosFormula::atom(
                            RelationSymbol::modulo(c, *modulus)?,
                            vec![Param(0)],
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            (_, RelKind::Named(n)) => {
                return Err(Error::UnsupportedSymbol {
                    domain: self.to_string(),
                    symbol: n.clone(),
                })
            }
        };
        PositiveExistentialFormula::new(rel.arity(), 0, body)
    }

    /// One-line human readable description.
    pub fn describe(&self) -> String {
        match self {
            ConcreteDomain::Z => "integers with <, =, constants and congruences".to_string(),
            ConcreteDomain::N => "natural numbers with <, =, constants and congruences".to_string(),
            ConcreteDomain::NegZ => "negative integers with <, =, constants and congruences".to_string(),
            ConcreteDomain::Q => "rationals with <, = and constants".to_string(),
            ConcreteDomain::AllenZ => "integer intervals with Allen's relations".to_string(),
            ConcreteDomain::LexZ(n) => format!("{n}-tuples of integers, lexicographic order"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64) -> Value {
        Value::Int(v)
    }

    #[test]
    fn integer_relations() {
        let d = ConcreteDomain::Z;
        assert!(d.eval_relation(&RelationSymbol::less(), &[z(3), z(5)]).unwrap());
        assert!(!d.eval_relation(&RelationSymbol::less(), &[z(5), z(5)]).unwrap());
        let m = RelationSymbol::modulo(1, 3).unwrap();
        assert!(d.eval_relation(&m, &[z(-2)]).unwrap());
        assert!(!d.eval_relation(&m, &[z(2)]).unwrap());
        assert!(d.eval_relation(&RelationSymbol::int_constant(-4), &[z(-4)]).unwrap());
    }

    #[test]
    fn domain_membership_is_checked() {
        let err = ConcreteDomain::N
            .eval_relation(&RelationSymbol::less(), &[z(-1), z(0)])
            .unwrap_err();
        assert!(matches!(err, Error::ValueOutOfDomain { .. }));
        assert!(ConcreteDomain::Q
            .eval_relation(&RelationSymbol::modulo(0, 2).unwrap(), &[z(0)])
            .is_err());
    }

    #[test]
    fn allen_before() {
        let d = ConcreteDomain::AllenZ;
        let before = RelationSymbol::named("before", 2).unwrap();
        assert!(d
            .eval_relation(&before, &[Value::Interval(0, 1), Value::Interval(2, 3)])
            .unwrap());
        assert!(d
            .eval_relation(&RelationSymbol::named("m", 2).unwrap(), &[Value::Interval(0, 2), Value::Interval(2, 3)])
            .unwrap());
    }

    #[test]
    fn lex_order() {
        let d = ConcreteDomain::LexZ(2);
        let lt = RelationSymbol::named(LEX_LESS, 2).unwrap();
        assert!(d
            .eval_relation(&lt, &[Value::Tuple(vec![1, 9]), Value::Tuple(vec![2, 0])])
            .unwrap());
        assert!(d
            .eval_relation(&lt, &[Value::Tuple(vec![1, 0]), Value::Tuple(vec![1, 1])])
            .unwrap());
        assert!(!d
            .eval_relation(&lt, &[Value::Tuple(vec![1, 1]), Value::Tuple(vec![1, 1])])
            .unwrap());
    }

    #[test]
    fn value_round_trip() {
        for s in ["3", "-7", "1/2", "-3/4", "[0,4]", "(1,-2,3)"] {
            assert_eq!(Value::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Value::parse("4/2").unwrap(), Value::Int(2));
        assert!(Value::parse("1/0").is_err());
    }

    #[test]
    fn domain_names_round_trip() {
        for d in [
            ConcreteDomain::Z,
            ConcreteDomain::N,
            ConcreteDomain::NegZ,
            ConcreteDomain::Q,
            ConcreteDomain::AllenZ,
            ConcreteDomain::LexZ(3),
        ] {
            assert_eq!(ConcreteDomain::from_name(&d.to_string()).unwrap(), d);
        }
        assert!(ConcreteDomain::from_name("lexZ[0]").is_err());
    }

    fn sample_values(d: &ConcreteDomain) -> Vec<Value> {
        match d {
            ConcreteDomain::Z => (-6..=6).map(Value::Int).collect(),
            ConcreteDomain::N => (0..=8).map(Value::Int).collect(),
            ConcreteDomain::NegZ => (-8..=-1).map(Value::Int).collect(),
            ConcreteDomain::Q => (-8..=8)
                .map(|i| Value::rational(Rational::new(i, 2)))
                .collect(),
            ConcreteDomain::AllenZ => {
                let mut v = Vec::new();
                for s in 0..4 {
                    for e in s + 1..5 {
                        v.push(Value::Interval(s, e));
                    }
                }
                v
            }
            ConcreteDomain::LexZ(_) => {
                let mut v = Vec::new();
                for a in -1..=1 {
                    for b in -1..=1 {
                        v.push(Value::Tuple(vec![a, b]));
                    }
                }
                v
            }
        }
    }

    fn symbols(d: &ConcreteDomain) -> Vec<RelationSymbol> {
        let mut out = vec![RelationSymbol::equal()];
        match d {
            ConcreteDomain::AllenZ => out.extend(AllenRelation::ALL.iter().map(|r| r.symbol())),
            ConcreteDomain::LexZ(_) => out.push(RelationSymbol::named(LEX_LESS, 2).unwrap()),
            ConcreteDomain::Q => {
                out.push(RelationSymbol::less());
                out.push(RelationSymbol::constant(Rational::new(1, 2)));
                out.push(RelationSymbol::int_constant(-2));
            }
            ConcreteDomain::N => {
                out.push(RelationSymbol::less());
                out.push(RelationSymbol::int_constant(3));
                out.push(RelationSymbol::modulo(1, 3).unwrap());
            }
            ConcreteDomain::NegZ => {
                out.push(RelationSymbol::less());
                out.push(RelationSymbol::int_constant(-3));
                out.push(RelationSymbol::modulo(0, 2).unwrap());
            }
            ConcreteDomain::Z => {
                out.push(RelationSymbol::less());
                out.push(RelationSymbol::int_constant(2));
                out.push(RelationSymbol::modulo(2, 4).unwrap());
            }
        }
        out
    }

    fn tuples(values: &[Value], arity: usize) -> Vec<Vec<Value>> {
        let mut out = vec![Vec::new()];
        for _ in 0..arity {
            let mut next = Vec::new();
            for t in &out {
                for v in values {
                    let mut t2 = t.clone();
                    t2.push(v.clone());
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn negation_formulas_define_complements() {
        for d in [
            ConcreteDomain::Z,
            ConcreteDomain::N,
            ConcreteDomain::NegZ,
            ConcreteDomain::Q,
            ConcreteDomain::AllenZ,
            ConcreteDomain::LexZ(2),
        ] {
            let values = sample_values(&d);
            for rel in symbols(&d) {
                let neg = d.negation_formula(&rel).unwrap();
                for args in tuples(&values, rel.arity()) {
                    let direct = d.eval_relation(&rel, &args).unwrap();
                    let negated = neg.holds(&d, &args, &values).unwrap();
                    assert_ne!(direct, negated, "{d} {rel} {args:?}");
                }
            }
        }
    }

    #[test]
    fn allen_relations_partition_interval_pairs() {
        let values = sample_values(&ConcreteDomain::AllenZ);
        for a in &values {
            for b in &values {
                let (Value::Interval(s1, e1), Value::Interval(s2, e2)) = (a, b) else {
                    unreachable!()
                };
                let hits = AllenRelation::ALL
                    .iter()
                    .filter(|r| r.holds((*s1, *e1), (*s2, *e2)))
                    .count()
                    + usize::from(a == b);
                assert_eq!(hits, 1, "{a} {b}");
            }
        }
    }
}
