//! Printing formulas in the syntax accepted by the parser.

use alloc::string::String;
use core::fmt::{self, Display, Formatter, Write};

use super::{AtomicConstraint, PathFormula, StateFormula, Term};

const OR: u8 = 1;
const AND: u8 = 2;
const UNTIL: u8 = 3;
const UNARY: u8 = 4;
const ATOM: u8 = 5;

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.offset == 0 {
            f.write_str(&self.var)
        } else {
            write!(f, "X^{} {}", self.offset, self.var)
        }
    }
}

impl Display for AtomicConstraint {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation())?;
        for (i, t) in self.args().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_char(')')
    }
}

impl Display for StateFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_state(&mut out, self, 0);
        f.write_str(&out)
    }
}

impl Display for PathFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_path(&mut out, self, 0);
        f.write_str(&out)
    }
}

fn state_prec(s: &StateFormula) -> u8 {
    match s {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => ATOM,
        StateFormula::Not(_) | StateFormula::Exists(_) | StateFormula::All(_) => UNARY,
        StateFormula::And(..) => AND,
        StateFormula::Or(..) => OR,
    }
}

fn path_prec(p: &PathFormula) -> u8 {
    match p {
        PathFormula::State(s) => state_prec(s),
        PathFormula::Constraint(_) => ATOM,
        PathFormula::Not(_) | PathFormula::Next(_) => UNARY,
        PathFormula::Until(a, _) if is_const(a, true) => UNARY,
        PathFormula::Release(a, _) if is_const(a, false) => UNARY,
        PathFormula::Until(..) | PathFormula::Release(..) => UNTIL,
        PathFormula::And(..) => AND,
        PathFormula::Or(..) => OR,
    }
}

fn is_const(p: &PathFormula, value: bool) -> bool {
    match p {
        PathFormula::State(s) => {
            matches!((&**s, value), (StateFormula::True, true) | (StateFormula::False, false))
        }
        _ => false,
    }
}

fn write_state(out: &mut String, s: &StateFormula, min: u8) {
    let prec = state_prec(s);
    if prec < min {
        out.push('(');
        write_state(out, s, 0);
        out.push(')');
        return;
    }
    match s {
        StateFormula::True => out.push_str("true"),
        StateFormula::False => out.push_str("false"),
        StateFormula::Prop(p) => out.push_str(p),
        StateFormula::Not(a) => {
            out.push('~');
            write_state(out, a, UNARY);
        }
        StateFormula::And(a, b) => {
            write_state(out, a, AND);
            out.push_str(" & ");
            write_state(out, b, AND + 1);
        }
        StateFormula::Or(a, b) => {
            write_state(out, a, OR);
            out.push_str(" | ");
            write_state(out, b, OR + 1);
        }
        StateFormula::Exists(p) => {
            out.push_str("E ");
            write_path(out, p, UNARY);
        }
        StateFormula::All(p) => {
            out.push_str("A ");
            write_path(out, p, UNARY);
        }
    }
}

fn write_path(out: &mut String, p: &PathFormula, min: u8) {
    if let PathFormula::State(s) = p {
        write_state(out, s, min);
        return;
    }
    let prec = path_prec(p);
    if prec < min {
        out.push('(');
        write_path(out, p, 0);
        out.push(')');
        return;
    }
    match p {
        PathFormula::State(_) => unreachable!(),
        PathFormula::Constraint(c) => {
            let _ = write!(out, "{c}");
        }
        PathFormula::Not(a) => {
            out.push('~');
            write_path(out, a, UNARY);
        }
        PathFormula::Next(a) => {
            out.push_str("X ");
            write_path(out, a, UNARY);
        }
        PathFormula::And(a, b) => {
            write_path(out, a, AND);
            out.push_str(" & ");
            write_path(out, b, AND + 1);
        }
        PathFormula::Or(a, b) => {
            write_path(out, a, OR);
            out.push_str(" | ");
            write_path(out, b, OR + 1);
        }
        PathFormula::Until(a, b) if is_const(a, true) => {
            out.push_str("F ");
            write_path(out, b, UNARY);
        }
        PathFormula::Release(a, b) if is_const(a, false) => {
            out.push_str("G ");
            write_path(out, b, UNARY);
        }
        PathFormula::Until(a, b) => {
            write_path(out, a, UNTIL + 1);
            out.push_str(" U ");
            write_path(out, b, UNTIL);
        }
        PathFormula::Release(a, b) => {
            write_path(out, a, UNTIL + 1);
            out.push_str(" R ");
            write_path(out, b, UNTIL);
        }
    }
}
