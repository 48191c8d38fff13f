//! Parenthesised prefix syntax for MSO sentences.
//!
//! ```text
//! φ ::= true | false
//!     | (REL x …)               relation atom, e.g. (lt x y), (eqc[0] x)
//!     | (rel NAME x …)          relation atom whose name is a keyword
//!     | (in x X) | (= x y)
//!     | (not φ) | (and φ …) | (or φ …) | (-> φ φ)
//!     | (exists x φ) | (forall x φ) | (existsset X φ) | (forallset X φ)
//!     | (B X φ)
//!     | (subset X (v φ))
//!     | (reach (x y φ) a b [(within Z)] [(guard (v φ))])
//!     | (mso φ) | (wmso φ) | (wmsob φ)
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Lambda1, Lambda2, Logic, Mso, Reach};
use crate::error::{Error, Result};
use crate::formula::RelationSymbol;

const KEYWORDS: &[&str] = &[
    "true", "false", "rel", "in", "=", "not", "and", "or", "->", "exists", "forall", "existsset",
    "forallset", "B", "subset", "reach", "within", "guard", "mso", "wmso", "wmsob",
];

const WIDTH: usize = 72;

#[derive(Clone, Debug)]
enum Sx {
    Atom(String, usize, usize),
    List(Vec<Sx>, usize, usize),
}

impl Sx {
    fn atom(s: &str) -> Sx {
        Sx::Atom(s.to_string(), 0, 0)
    }

    fn list(xs: Vec<Sx>) -> Sx {
        Sx::List(xs, 0, 0)
    }

    fn pos(&self) -> (usize, usize) {
        match self {
            Sx::Atom(_, l, c) | Sx::List(_, l, c) => (*l, *c),
        }
    }

    fn flat(&self, out: &mut String) {
        match self {
            Sx::Atom(s, ..) => out.push_str(s),
            Sx::List(xs, ..) => {
                out.push('(');
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    x.flat(out);
                }
                out.push(')');
            }
        }
    }

    fn pretty(&self, indent: usize, out: &mut String) {
        let mut flat = String::new();
        self.flat(&mut flat);
        let Sx::List(xs, ..) = self else {
            out.push_str(&flat);
            return;
        };
        if indent + flat.len() <= WIDTH {
            out.push_str(&flat);
            return;
        }
        out.push('(');
        let head = xs.iter().take_while(|x| matches!(x, Sx::Atom(..))).count().max(1);
        for (i, x) in xs[..head].iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            x.pretty(indent + 1, out);
        }
        for x in &xs[head..] {
            out.push('\n');
            for _ in 0..indent + 2 {
                out.push(' ');
            }
            x.pretty(indent + 2, out);
        }
        out.push(')');
    }
}

fn to_sx(f: &Mso) -> Sx {
    let a = |s: &str| Sx::atom(s);
    match f {
        Mso::True => a("true"),
        Mso::False => a("false"),
        Mso::Rel(r, args) => {
            let name = r.name();
            let mut xs = Vec::new();
            if KEYWORDS.contains(&name.as_str()) {
                xs.push(a("rel"));
            }
            xs.push(Sx::Atom(name, 0, 0));
            xs.extend(args.iter().map(|x| a(x)));
            Sx::list(xs)
        }
        Mso::In(x, s) => Sx::list(vec![a("in"), a(x), a(s)]),
        Mso::Eq(x, y) => Sx::list(vec![a("="), a(x), a(y)]),
        Mso::Not(b) => Sx::list(vec![a("not"), to_sx(b)]),
        Mso::And(xs) => Sx::list(core::iter::once(a("and")).chain(xs.iter().map(to_sx)).collect()),
        Mso::Or(xs) => Sx::list(core::iter::once(a("or")).chain(xs.iter().map(to_sx)).collect()),
        Mso::Implies(p, q) => Sx::list(vec![a("->"), to_sx(p), to_sx(q)]),
        Mso::Exists(v, b) => Sx::list(vec![a("exists"), a(v), to_sx(b)]),
        Mso::Forall(v, b) => Sx::list(vec![a("forall"), a(v), to_sx(b)]),
        Mso::ExistsSet(v, b) => Sx::list(vec![a("existsset"), a(v), to_sx(b)]),
        Mso::ForallSet(v, b) => Sx::list(vec![a("forallset"), a(v), to_sx(b)]),
        Mso::Bound(v, b) => Sx::list(vec![a("B"), a(v), to_sx(b)]),
        Mso::Subset(x, g) => Sx::list(vec![a("subset"), a(x), lambda1(g)]),
        Mso::Reach(r) => {
            let mut xs = vec![
                a("reach"),
                Sx::list(vec![a(&r.edge.x), a(&r.edge.y), to_sx(&r.edge.body)]),
                a(&r.from),
                a(&r.to),
            ];
            if let Some(z) = &r.within {
                xs.push(Sx::list(vec![a("within"), a(z)]));
            }
            if let Some(g) = &r.guard {
                xs.push(Sx::list(vec![a("guard"), lambda1(g)]));
            }
            Sx::list(xs)
        }
        Mso::Tag(l, b) => Sx::list(vec![a(l.name()), to_sx(b)]),
    }
}

fn lambda1(g: &Lambda1) -> Sx {
    Sx::list(vec![Sx::atom(&g.var), to_sx(&g.body)])
}

impl core::fmt::Display for Mso {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let mut s = String::new();
        to_sx(self).flat(&mut s);
        f.write_str(&s)
    }
}

/// Multi-line rendering with two-space indentation; lists that fit in the
/// line width stay on one line.
pub fn pretty(f: &Mso) -> String {
    let mut out = String::new();
    to_sx(f).pretty(0, &mut out);
    out
}

fn read(text: &str) -> Result<Sx> {
    let mut stack: Vec<(Vec<Sx>, usize, usize)> = Vec::new();
    let mut done: Option<Sx> = None;
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = text.chars().peekable();
    let err = |l, c, m: &str| Error::Parse {
        line: l,
        col: c,
        message: m.to_string(),
    };
    while let Some(&ch) = chars.peek() {
        let (l0, c0) = (line, col);
        let finished = match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
                continue;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            '(' => {
                chars.next();
                col += 1;
                if done.is_some() && stack.is_empty() {
                    return Err(err(l0, c0, "unexpected text after the formula"));
                }
                stack.push((Vec::new(), l0, c0));
                None
            }
            ')' => {
                chars.next();
                col += 1;
                let (xs, l, c) = stack.pop().ok_or_else(|| err(l0, c0, "unbalanced `)`"))?;
                Some(Sx::List(xs, l, c))
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                Some(Sx::Atom(s, l0, c0))
            }
        };
        if let Some(x) = finished {
            match stack.last_mut() {
                Some((xs, ..)) => xs.push(x),
                None => {
                    if done.is_some() {
                        return Err(err(l0, c0, "unexpected text after the formula"));
                    }
                    done = Some(x);
                }
            }
        }
    }
    if let Some((_, l, c)) = stack.last() {
        return Err(err(*l, *c, "unclosed `(`"));
    }
    done.ok_or_else(|| err(line, col, "empty input"))
}

/// Parses the prefix syntax produced by the printer.
pub fn parse_mso(text: &str) -> Result<Mso> {
    from_sx(&read(text)?)
}

fn fail(x: &Sx, m: &str) -> Error {
    let (line, col) = x.pos();
    Error::Parse {
        line,
        col,
        message: m.to_string(),
    }
}

fn name(x: &Sx) -> Result<String> {
    match x {
        Sx::Atom(s, ..) if !KEYWORDS.contains(&s.as_str()) => Ok(s.clone()),
        _ => Err(fail(x, "expected a variable name")),
    }
}

fn lambda1_from(x: &Sx) -> Result<Lambda1> {
    match x {
        Sx::List(xs, ..) if xs.len() == 2 => Ok(Lambda1::new(&name(&xs[0])?, from_sx(&xs[1])?)),
        _ => Err(fail(x, "expected (v φ)")),
    }
}

fn from_sx(x: &Sx) -> Result<Mso> {
    let xs = match x {
        Sx::Atom(s, ..) => {
            return match s.as_str() {
                "true" => Ok(Mso::True),
                "false" => Ok(Mso::False),
                _ => Err(fail(x, "expected a formula")),
            }
        }
        Sx::List(xs, ..) => xs,
    };
    let Some(Sx::Atom(head, ..)) = xs.first() else {
        return Err(fail(x, "expected an operator"));
    };
    let args = &xs[1..];
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(fail(x, &alloc::format!("`{head}` expects {n} arguments")))
        }
    };
    let binder = |mk: fn(&str, Mso) -> Mso| -> Result<Mso> {
        arity(2)?;
        Ok(mk(&name(&args[0])?, from_sx(&args[1])?))
    };
    let tag = |l: Logic| -> Result<Mso> {
        arity(1)?;
        Ok(Mso::tag(l, from_sx(&args[0])?))
    };
    match head.as_str() {
        "in" => {
            arity(2)?;
            Ok(Mso::In(name(&args[0])?, name(&args[1])?))
        }
        "=" => {
            arity(2)?;
            Ok(Mso::Eq(name(&args[0])?, name(&args[1])?))
        }
        "not" => {
            arity(1)?;
            Ok(Mso::not(from_sx(&args[0])?))
        }
        "and" => Ok(Mso::And(args.iter().map(from_sx).collect::<Result<_>>()?)),
        "or" => Ok(Mso::Or(args.iter().map(from_sx).collect::<Result<_>>()?)),
        "->" => {
            arity(2)?;
            Ok(Mso::implies(from_sx(&args[0])?, from_sx(&args[1])?))
        }
        "exists" => binder(Mso::exists),
        "forall" => binder(Mso::forall),
        "existsset" => binder(Mso::exists_set),
        "forallset" => binder(Mso::forall_set),
        "B" => binder(Mso::bound),
        "subset" => {
            arity(2)?;
            Ok(Mso::subset(&name(&args[0])?, lambda1_from(&args[1])?))
        }
        "reach" => reach_from(x, args),
        "mso" => tag(Logic::Mso),
        "wmso" => tag(Logic::Wmso),
        "wmsob" => tag(Logic::WmsoB),
        "rel" => match args.split_first() {
            Some((Sx::Atom(r, ..), rest)) => relation(x, r, rest),
            _ => Err(fail(x, "expected a relation name")),
        },
        "true" | "false" | "within" | "guard" => Err(fail(x, "misplaced keyword")),
        r => relation(x, r, args),
    }
}

fn relation(x: &Sx, r: &str, args: &[Sx]) -> Result<Mso> {
    let sym = RelationSymbol::from_name(r, args.len()).map_err(|e| fail(x, &alloc::format!("{e}")))?;
    let names = args.iter().map(name).collect::<Result<Vec<_>>>()?;
    Ok(Mso::Rel(sym, names))
}

fn reach_from(x: &Sx, args: &[Sx]) -> Result<Mso> {
    if args.len() < 3 {
        return Err(fail(x, "reach expects an edge and two endpoints"));
    }
    let edge = match &args[0] {
        Sx::List(e, ..) if e.len() == 3 => Lambda2::new(&name(&e[0])?, &name(&e[1])?, from_sx(&e[2])?),
        other => return Err(fail(other, "expected (x y φ)")),
    };
    let mut r = Reach {
        edge,
        from: name(&args[1])?,
        to: name(&args[2])?,
        within: None,
        guard: None,
    };
    for opt in &args[3..] {
        match opt {
            Sx::List(o, ..) if o.len() == 2 && is_atom(&o[0], "within") && r.within.is_none() => {
                r.within = Some(name(&o[1])?)
            }
            Sx::List(o, ..) if o.len() == 2 && is_atom(&o[0], "guard") && r.guard.is_none() => {
                r.guard = Some(lambda1_from(&o[1])?)
            }
            other => return Err(fail(other, "expected (within Z) or (guard (v φ))")),
        }
    }
    Ok(Mso::Reach(Box::new(r)))
}

fn is_atom(x: &Sx, s: &str) -> bool {
    matches!(x, Sx::Atom(a, ..) if a == s)
}
