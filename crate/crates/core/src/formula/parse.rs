//! Recursive-descent parser for the textual formula syntax.
//!
//! ```text
//! φ ::= p | true | false | ~φ | φ & φ | φ | φ | E ψ | A ψ
//! ψ ::= φ | r(t, …) | ~ψ | ψ & ψ | ψ | ψ | X ψ | ψ U ψ | ψ R ψ | F ψ | G ψ
//! t ::= x | X^k x
//! r ::= lt | eq | eqc[c] | mod[a,b] | name
//! ```
//!
//! Unary operators bind tightest, then `U`/`R` (right associative), then
//! `&`, then `|`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AtomicConstraint, PathFormula, RelationSymbol, StateFormula, Term};
use crate::error::{Error, Result};
use crate::Rational;

/// Parser switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept identifiers starting with `__`, which are normally reserved
    /// for names generated by rewriting passes.
    pub allow_reserved: bool,
}

/// Parses a state formula.
pub fn parse_formula(input: &str, options: ParseOptions) -> Result<StateFormula> {
    let raw = parse_raw(input, options)?;
    to_state(&raw)
}

/// Parses a path formula. State formulas are accepted as well.
pub fn parse_path_formula(input: &str, options: ParseOptions) -> Result<PathFormula> {
    let raw = parse_raw(input, options)?;
    to_path(&raw)
}

fn parse_raw(input: &str, options: ParseOptions) -> Result<Raw> {
    let tokens = lex(input)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        options,
    };
    let raw = p.parse_or()?;
    let tok = p.peek();
    if tok.tok != Tok::Eof {
        return Err(p.error_at(tok, &format!("unexpected {}", tok.tok.describe())));
    }
    Ok(raw)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Slash,
    Caret,
    Tilde,
    Amp,
    Bar,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBrack => "`[`".to_string(),
            Tok::RBrack => "`]`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Slash => "`/`".to_string(),
            Tok::Caret => "`^`".to_string(),
            Tok::Tilde => "`~`".to_string(),
            Tok::Amp => "`&`".to_string(),
            Tok::Bar => "`|`".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(input: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                line: tl,
                col: tc,
            });
            i += 1;
            col += 1;
            continue;
        }
        let negative = c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit());
        if c.is_ascii_digit() || negative {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<i64>().map_err(|_| Error::Parse {
                line: tl,
                col: tc,
                message: format!("integer `{text}` out of range"),
            })?;
            col += i - start;
            out.push(Token {
                tok: Tok::Int(value),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(Error::Parse {
            line: tl,
            col: tc,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: [&str; 9] = ["E", "A", "X", "U", "R", "F", "G", "true", "false"];
const BUILTIN_RELATIONS: [&str; 4] = ["lt", "eq", "eqc", "mod"];

/// Syntax tree before the state/path split.
#[derive(Clone, Debug)]
enum Raw {
    True,
    False,
    Prop(String),
    Constraint(AtomicConstraint, usize, usize),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Exists(Box<Raw>),
    All(Box<Raw>),
    Next(Box<Raw>, usize, usize),
    Until(Box<Raw>, Box<Raw>, usize, usize),
    Release(Box<Raw>, Box<Raw>, usize, usize),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    options: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, message: &str) -> Error {
        Error::Parse {
            line: tok.line,
            col: tok.col,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Token> {
        let tok = self.advance();
        if tok.tok == want {
            Ok(tok)
        } else {
            Err(self.error_at(
                &tok,
                &format!("expected {}, found {}", want.describe(), tok.tok.describe()),
            ))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn parse_or(&mut self) -> Result<Raw> {
        let mut left = self.parse_and()?;
        while self.peek().tok == Tok::Bar {
            self.advance();
            let right = self.parse_and()?;
            left = Raw::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Raw> {
        let mut left = self.parse_until()?;
        while self.peek().tok == Tok::Amp {
            self.advance();
            let right = self.parse_until()?;
            left = Raw::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_until(&mut self) -> Result<Raw> {
        let left = self.parse_unary()?;
        if self.is_keyword("U") || self.is_keyword("R") {
            let op = self.advance();
            let right = self.parse_until()?;
            let (l, r) = (Box::new(left), Box::new(right));
            return Ok(match op.tok {
                Tok::Ident(ref s) if s == "U" => Raw::Until(l, r, op.line, op.col),
                _ => Raw::Release(l, r, op.line, op.col),
            });
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Raw> {
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Tilde => {
                self.advance();
                Ok(Raw::Not(Box::new(self.parse_unary()?)))
            }
            Tok::Ident(s) if matches!(s.as_str(), "E" | "A" | "X" | "F" | "G") => {
                self.advance();
                let inner = Box::new(self.parse_unary()?);
                Ok(match s.as_str() {
                    "E" => Raw::Exists(inner),
                    "A" => Raw::All(inner),
                    "X" => Raw::Next(inner, tok.line, tok.col),
                    "F" => Raw::Until(Box::new(Raw::True), inner, tok.line, tok.col),
                    _ => Raw::Release(Box::new(Raw::False), inner, tok.line, tok.col),
                })
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Raw> {
        let tok = self.advance();
        match &tok.tok {
            Tok::LParen => {
                let inner = self.parse_or()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(s) if s == "true" => Ok(Raw::True),
            Tok::Ident(s) if s == "false" => Ok(Raw::False),
            Tok::Ident(s) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return Err(self.error_at(&tok, &format!("unexpected keyword `{s}`")));
                }
                let next = &self.peek().tok;
                let is_constraint = *next == Tok::LParen
                    || (*next == Tok::LBrack && (s == "eqc" || s == "mod"));
                if is_constraint {
                    let c = self.parse_constraint(s, &tok)?;
                    Ok(Raw::Constraint(c, tok.line, tok.col))
                } else {
                    if BUILTIN_RELATIONS.contains(&s.as_str()) {
                        return Err(self.error_at(
                            &tok,
                            &format!("relation `{s}` needs an argument list"),
                        ));
                    }
                    self.check_reserved(s, &tok)?;
                    Ok(Raw::Prop(s.clone()))
                }
            }
            other => Err(self.error_at(&tok, &format!("unexpected {}", other.describe()))),
        }
    }

    fn check_reserved(&self, name: &str, tok: &Token) -> Result<()> {
        if name.starts_with("__") && !self.options.allow_reserved {
            return Err(self.error_at(
                tok,
                &format!("identifier `{name}` is reserved for generated names"),
            ));
        }
        Ok(())
    }

    fn parse_int(&mut self) -> Result<i64> {
        let tok = self.advance();
        match tok.tok {
            Tok::Int(i) => Ok(i),
            ref other => Err(self.error_at(
                &tok,
                &format!("expected an integer, found {}", other.describe()),
            )),
        }
    }

    fn parse_constraint(&mut self, name: &str, at: &Token) -> Result<AtomicConstraint> {
        let rel_kind = match name {
            "eqc" => {
                self.expect(Tok::LBrack)?;
                let num = self.parse_int()?;
                let value = if self.peek().tok == Tok::Slash {
                    self.advance();
                    let den_tok = self.peek().clone();
                    let den = self.parse_int()?;
                    if den == 0 {
                        return Err(self.error_at(&den_tok, "zero denominator"));
                    }
                    Rational::new(num, den)
                } else {
                    Rational::from_integer(num)
                };
                self.expect(Tok::RBrack)?;
                Some(RelationSymbol::constant(value))
            }
            "mod" => {
                self.expect(Tok::LBrack)?;
                let a = self.parse_int()?;
                self.expect(Tok::Comma)?;
                let b = self.parse_int()?;
                self.expect(Tok::RBrack)?;
                Some(RelationSymbol::modulo(a, b).map_err(|_| {
                    self.error_at(
                        at,
                        &format!("malformed modulo parameters mod[{a},{b}]: need 0 <= a < b and b >= 2"),
                    )
                })?)
            }
            _ => None,
        };
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            args.push(self.parse_term()?);
            if self.peek().tok == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        let rel = match rel_kind {
            Some(r) => r,
            None => match name {
                "lt" => RelationSymbol::less(),
                "eq" => RelationSymbol::equal(),
                _ => {
                    self.check_reserved(name, at)?;
                    RelationSymbol::named(name, args.len())
                        .map_err(|e| self.error_at(at, &format!("{e}")))?
                }
            },
        };
        AtomicConstraint::new(rel, args).map_err(|e| self.error_at(at, &format!("{e}")))
    }

    fn parse_term(&mut self) -> Result<Term> {
        let tok = self.advance();
        let name = match &tok.tok {
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(self.error_at(
                    &tok,
                    &format!("expected a variable, found {}", other.describe()),
                ))
            }
        };
        if name == "X" && self.peek().tok == Tok::Caret {
            self.advance();
            let k_tok = self.peek().clone();
            let k = self.parse_int()?;
            if k < 0 {
                return Err(self.error_at(&k_tok, "negative offset"));
            }
            let var_tok = self.advance();
            match &var_tok.tok {
                Tok::Ident(v) if !KEYWORDS.contains(&v.as_str()) => {
                    self.check_reserved(v, &var_tok)?;
                    Ok(Term::new(k as usize, v))
                }
                other => Err(self.error_at(
                    &var_tok,
                    &format!("expected a variable, found {}", other.describe()),
                )),
            }
        } else if KEYWORDS.contains(&name.as_str()) {
            Err(self.error_at(&tok, &format!("keyword `{name}` cannot be a variable")))
        } else {
            self.check_reserved(&name, &tok)?;
            Ok(Term::now(&name))
        }
    }
}

fn is_pure_state(raw: &Raw) -> bool {
    match raw {
        Raw::True | Raw::False | Raw::Prop(_) | Raw::Exists(_) | Raw::All(_) => true,
        Raw::Not(a) => is_pure_state(a),
        Raw::And(a, b) | Raw::Or(a, b) => is_pure_state(a) && is_pure_state(b),
        Raw::Constraint(..) | Raw::Next(..) | Raw::Until(..) | Raw::Release(..) => false,
    }
}

fn outside_quantifier(line: usize, col: usize, what: &str) -> Error {
    Error::Parse {
        line,
        col,
        message: format!("{what} must appear under a path quantifier E or A"),
    }
}

fn to_state(raw: &Raw) -> Result<StateFormula> {
    Ok(match raw {
        Raw::True => StateFormula::True,
        Raw::False => StateFormula::False,
        Raw::Prop(p) => StateFormula::Prop(p.clone()),
        Raw::Not(a) => StateFormula::not(to_state(a)?),
        Raw::And(a, b) => StateFormula::and(to_state(a)?, to_state(b)?),
        Raw::Or(a, b) => StateFormula::or(to_state(a)?, to_state(b)?),
        Raw::Exists(p) => StateFormula::exists(to_path(p)?),
        Raw::All(p) => StateFormula::all(to_path(p)?),
        Raw::Constraint(_, l, c) => return Err(outside_quantifier(*l, *c, "a constraint")),
        Raw::Next(_, l, c) | Raw::Until(_, _, l, c) | Raw::Release(_, _, l, c) => {
            return Err(outside_quantifier(*l, *c, "a temporal operator"))
        }
    })
}

fn to_path(raw: &Raw) -> Result<PathFormula> {
    if is_pure_state(raw) {
        return Ok(PathFormula::state(to_state(raw)?));
    }
    Ok(match raw {
        Raw::Constraint(c, _, _) => PathFormula::Constraint(c.clone()),
        Raw::Not(a) => PathFormula::not(to_path(a)?),
        Raw::And(a, b) => PathFormula::and(to_path(a)?, to_path(b)?),
        Raw::Or(a, b) => PathFormula::or(to_path(a)?, to_path(b)?),
        Raw::Next(a, _, _) => PathFormula::next(to_path(a)?),
        Raw::Until(a, b, _, _) => PathFormula::until(to_path(a)?, to_path(b)?),
        Raw::Release(a, b, _, _) => PathFormula::release(to_path(a)?, to_path(b)?),
        _ => unreachable!("pure state formulas handled above"),
    })
}
