//! Line-oriented text formats for models and finite structures.
//!
//! Both formats use section headers on lines of their own. Blank lines
//! and everything after `#` are ignored.
//!
//! Model files:
//!
//! ```text
//! VARS x y
//! SHAPE graph            # or: SHAPE tree <depth> <branching>
//! NODES
//! a
//! b
//! EDGES
//! a b
//! b a
//! LABELS
//! a p q
//! REGISTERS
//! a x 3
//! a y -1
//! ```
//!
//! In tree files the node names are words over `1..branching` with `e`
//! for the root, and the `EDGES` section may be left out.
//!
//! Structure files:
//!
//! ```text
//! ELEMENTS
//! a
//! b
//! RELATION lt
//! a b
//! RELATION eqc[0]
//! a
//! RELATION before/2      # arity suffix, needed for empty relations
//! ```

use std::collections::BTreeSet;
use std::fmt::Write;

use ctlz_core::domain::Value;
use ctlz_core::formula::RelationSymbol;
use ctlz_core::kripke::{ConstraintKripke, ModelSpec, Shape};
use ctlz_core::structure::SigmaStructure;

/// A problem in an input file, with its 1-based line number.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ctlz_core::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments removed, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ModelSection {
    None,
    Nodes,
    Edges,
    Labels,
    Registers,
}

/// Parses a model file into an unvalidated description.
pub fn parse_model_spec(text: &str) -> Result<ModelSpec, FormatError> {
    let mut spec = ModelSpec {
        shape: Shape::Graph,
        vars: Vec::new(),
        nodes: Vec::new(),
        edges: Vec::new(),
        labels: Vec::new(),
        registers: Vec::new(),
        allow_reserved: false,
    };
    let mut section = ModelSection::None;
    let (mut seen_vars, mut seen_shape) = (false, false);
    for (no, line) in lines(text) {
        let mut words = line.split_whitespace();
        let head = words.next().expect("line is not empty");
        let rest: Vec<&str> = words.collect();
        match head {
            "VARS" => {
                if seen_vars {
                    return Err(syntax(no, "VARS given twice"));
                }
                seen_vars = true;
                spec.vars = rest.iter().map(|s| s.to_string()).collect();
                section = ModelSection::None;
            }
            "SHAPE" => {
                if seen_shape {
                    return Err(syntax(no, "SHAPE given twice"));
                }
                seen_shape = true;
                spec.shape = match rest.as_slice() {
                    ["graph"] => Shape::Graph,
                    ["tree", d, b] => Shape::Tree {
                        branching: b.parse().map_err(|_| syntax(no, "tree branching must be a number"))?,
                        depth: d.parse().map_err(|_| syntax(no, "tree depth must be a number"))?,
                    },
                    _ => return Err(syntax(no, "expected `SHAPE graph` or `SHAPE tree <depth> <branching>`")),
                };
                section = ModelSection::None;
            }
            "NODES" | "EDGES" | "LABELS" | "REGISTERS" if rest.is_empty() => {
                section = match head {
                    "NODES" => ModelSection::Nodes,
                    "EDGES" => ModelSection::Edges,
                    "LABELS" => ModelSection::Labels,
                    _ => ModelSection::Registers,
                };
            }
            _ => {
                let mut fields = vec![head];
                fields.extend(&rest);
                match section {
                    ModelSection::None => return Err(syntax(no, format!("unexpected `{line}` outside a section"))),
                    ModelSection::Nodes => {
                        if fields.len() != 1 {
                            return Err(syntax(no, "expected one node name per line"));
                        }
                        spec.nodes.push(head.to_string());
                    }
                    ModelSection::Edges => match fields.as_slice() {
                        [a, b] => spec.edges.push((a.to_string(), b.to_string())),
                        _ => return Err(syntax(no, "expected `<source> <target>`")),
                    },
                    ModelSection::Labels => {
                        spec.labels
                            .push((head.to_string(), rest.iter().map(|s| s.to_string()).collect()));
                    }
                    ModelSection::Registers => match fields.as_slice() {
                        [n, x, v] => {
                            let v = Value::parse(v).map_err(|e| syntax(no, e.to_string()))?;
                            spec.registers.push((n.to_string(), x.to_string(), v));
                        }
                        _ => return Err(syntax(no, "expected `<node> <variable> <value>`")),
                    },
                }
            }
        }
    }
    Ok(spec)
}

/// Parses and validates a model file.
pub fn parse_model(text: &str, allow_reserved: bool) -> Result<ConstraintKripke, FormatError> {
    let mut spec = parse_model_spec(text)?;
    spec.allow_reserved = allow_reserved;
    Ok(ConstraintKripke::from_spec(&spec)?)
}

/// Writes a model in the model file format.
pub fn write_model(m: &ConstraintKripke) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "VARS {}", m.vars().join(" ").trim_end());
    match m.shape() {
        Shape::Graph => out.push_str("SHAPE graph\n"),
        Shape::Tree { branching, depth } => {
            let _ = writeln!(out, "SHAPE tree {depth} {branching}");
        }
    }
    out.push_str("NODES\n");
    for n in m.node_names() {
        let _ = writeln!(out, "{n}");
    }
    out.push_str("EDGES\n");
    for i in 0..m.node_count() {
        for &j in m.successors(i) {
            let _ = writeln!(out, "{} {}", m.node_name(i), m.node_name(j));
        }
    }
    out.push_str("LABELS\n");
    for i in 0..m.node_count() {
        if !m.labels(i).is_empty() {
            let props: Vec<&str> = m.labels(i).iter().map(String::as_str).collect();
            let _ = writeln!(out, "{} {}", m.node_name(i), props.join(" "));
        }
    }
    out.push_str("REGISTERS\n");
    for i in 0..m.node_count() {
        for (x, v) in m.vars().iter().zip(m.registers(i)) {
            let _ = writeln!(out, "{} {x} {v}", m.node_name(i));
        }
    }
    out
}

fn relation_header(no: usize, text: &str) -> Result<(String, Option<usize>), FormatError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(syntax(no, "RELATION needs a symbol"));
    }
    match compact.rsplit_once('/') {
        Some((name, k)) if !name.contains('[') || name.ends_with(']') => {
            let k = k.parse().map_err(|_| syntax(no, format!("bad arity `{k}`")))?;
            Ok((name.to_string(), Some(k)))
        }
        _ => Ok((compact, None)),
    }
}

/// Parses and validates a structure file.
pub fn parse_structure(text: &str) -> Result<SigmaStructure, FormatError> {
    enum Section {
        None,
        Elements,
        Relation(usize),
    }
    let mut elements: Vec<String> = Vec::new();
    // relation name, declared arity, header line, tuples with line numbers
    type Pending = (String, Option<usize>, usize, Vec<(usize, Vec<String>)>);
    let mut relations: Vec<Pending> = Vec::new();
    let mut section = Section::None;
    let mut seen_elements = false;
    for (no, line) in lines(text) {
        if line == "ELEMENTS" {
            if seen_elements {
                return Err(syntax(no, "ELEMENTS given twice"));
            }
            seen_elements = true;
            section = Section::Elements;
        } else if let Some(rest) = line.strip_prefix("RELATION").filter(|r| r.is_empty() || r.starts_with(' ')) {
            let (name, arity) = relation_header(no, rest)?;
            relations.push((name, arity, no, Vec::new()));
            section = Section::Relation(relations.len() - 1);
        } else {
            let fields: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            match section {
                Section::None => return Err(syntax(no, format!("unexpected `{line}` outside a section"))),
                Section::Elements => {
                    if fields.len() != 1 {
                        return Err(syntax(no, "expected one element name per line"));
                    }
                    elements.push(fields[0].clone());
                }
                Section::Relation(r) => relations[r].3.push((no, fields)),
            }
        }
    }
    let mut a = SigmaStructure::new(elements.iter().map(String::as_str))?;
    let mut declared = BTreeSet::new();
    for (name, arity, header, tuples) in relations {
        let arity = match (arity, tuples.first()) {
            (Some(k), _) => k,
            (None, Some((_, t))) => t.len(),
            (None, None) => RelationSymbol::from_name(&name, 1)
                .or_else(|_| RelationSymbol::from_name(&name, 2))
                .map_err(|_| syntax(header, format!("give the arity of the empty relation as `{name}/<k>`")))?
                .arity(),
        };
        let sym = RelationSymbol::from_name(&name, arity).map_err(|e| syntax(header, e.to_string()))?;
        if !declared.insert(sym.clone()) {
            return Err(syntax(header, format!("relation {sym} listed twice")));
        }
        a.declare(sym.clone());
        for (no, t) in tuples {
            if t.len() != arity {
                return Err(syntax(no, format!("{sym} expects {arity} element(s)")));
            }
            let refs: Vec<&str> = t.iter().map(String::as_str).collect();
            a.add_named(&sym, &refs).map_err(|e| syntax(no, e.to_string()))?;
        }
    }
    Ok(a)
}

/// Writes a structure in the structure file format.
pub fn write_structure(a: &SigmaStructure) -> String {
    let mut out = String::from("ELEMENTS\n");
    for e in a.elements() {
        let _ = writeln!(out, "{e}");
    }
    for (rel, tuples) in a.relations() {
        let _ = writeln!(out, "RELATION {rel}/{}", rel.arity());
        for t in tuples {
            let names: Vec<&str> = t.iter().map(|&i| a.element_name(i)).collect();
            let _ = writeln!(out, "{}", names.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_headers() {
        assert_eq!(relation_header(1, " lt").unwrap(), ("lt".into(), None));
        assert_eq!(relation_header(1, " mod[1, 3]").unwrap(), ("mod[1,3]".into(), None));
        assert_eq!(relation_header(1, " eqc[1/2]").unwrap(), ("eqc[1/2]".into(), None));
        assert_eq!(relation_header(1, " eqc[1/2]/1").unwrap(), ("eqc[1/2]".into(), Some(1)));
        assert_eq!(relation_header(1, " before/2").unwrap(), ("before".into(), Some(2)));
        assert!(relation_header(1, "").is_err());
    }
}
