//! Constraint Kripke models and constraint trees.
//!
//! A constraint Kripke model is a finite graph whose nodes carry a set of
//! propositions and a value for every register variable. A constraint tree
//! is the full `d`-ary tree of some finite depth, with nodes named by words
//! over `1..=d` and the root named `e`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{ConcreteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::AbstractionTable;
use crate::structure::SigmaStructure;

/// Name of the root of a constraint tree.
pub const ROOT: &str = "e";

/// Whether a model is an arbitrary graph or a finite full tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Graph,
    Tree { branching: usize, depth: usize },
}

/// Declarative description of a model, as read from a model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub shape: Shape,
    pub vars: Vec<String>,
    pub nodes: Vec<String>,
    /// For trees the edges may be omitted; they are then derived from the
    /// node names.
    pub edges: Vec<(String, String)>,
    pub labels: Vec<(String, Vec<String>)>,
    pub registers: Vec<(String, String, Value)>,
    /// Accept node, proposition and variable names starting with `__`.
    pub allow_reserved: bool,
}

/// A validated constraint Kripke model or tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintKripke {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    succ: Vec<Vec<usize>>,
    labels: Vec<BTreeSet<String>>,
    vars: Vec<String>,
    registers: Vec<Vec<Value>>,
    shape: Shape,
    words: Option<Vec<Vec<u8>>>,
}

fn reserved(name: &str, allow: bool) -> Result<()> {
    if !allow && name.starts_with("__") {
        return Err(Error::ReservedIdentifier(name.to_string()));
    }
    Ok(())
}

/// Parses a tree node name into its word of child indices.
pub fn parse_word(name: &str, branching: usize) -> Result<Vec<u8>> {
    if name == ROOT {
        return Ok(Vec::new());
    }
    name.chars()
        .map(|c| match c.to_digit(10) {
            Some(k) if k >= 1 && (k as usize) <= branching => Ok(k as u8),
            _ => Err(Error::InvalidTree(format!(
                "node name `{name}` is not a word over 1..{branching}"
            ))),
        })
        .collect()
}

/// The name of the tree node with the given word.
pub fn word_name(word: &[u8]) -> String {
    if word.is_empty() {
        ROOT.to_string()
    } else {
        word.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

/// All words of length at most `depth` over `1..=branching`, shortest first
/// and lexicographically within a length.
pub fn tree_words(branching: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &level {
            for k in 1..=branching as u8 {
                let mut w2: Vec<u8> = w.clone();
                w2.push(k);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

impl ConstraintKripke {
    /// Validates a model description.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let allow = spec.allow_reserved;
        let mut index = BTreeMap::new();
        for (i, n) in spec.nodes.iter().enumerate() {
            reserved(n, allow)?;
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Duplicate(n.clone()));
            }
        }
        let mut var_set = BTreeSet::new();
        for v in &spec.vars {
            reserved(v, allow)?;
            if !var_set.insert(v) {
                return Err(Error::Duplicate(v.clone()));
            }
        }
        let n = spec.nodes.len();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownName(name.to_string()))
        };
        let mut succ = vec![Vec::new(); n];
        for (a, b) in &spec.edges {
            match (index.get(a), index.get(b)) {
                (Some(&i), Some(&j)) => {
                    if !succ[i].contains(&j) {
                        succ[i].push(j);
                    }
                }
                _ => {
                    return Err(Error::DanglingEdge {
                        from: a.clone(),
                        to: b.clone(),
                    })
                }
            }
        }
        let mut labels = vec![BTreeSet::new(); n];
        for (node, props) in &spec.labels {
            let i = lookup(node)?;
            for p in props {
                reserved(p, allow)?;
                labels[i].insert(p.clone());
            }
        }
        let mut regs: Vec<Vec<Option<Value>>> = vec![vec![None; spec.vars.len()]; n];
        for (node, var, value) in &spec.registers {
            let i = lookup(node)?;
            let v = spec
                .vars
                .iter()
                .position(|x| x == var)
                .ok_or_else(|| Error::MissingVariable(var.clone()))?;
            regs[i][v] = Some(value.clone());
        }
        let mut registers = Vec::with_capacity(n);
        for (i, row) in regs.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (v, val) in row.into_iter().enumerate() {
                out.push(val.ok_or_else(|| Error::MissingRegister {
                    node: spec.nodes[i].clone(),
                    var: spec.vars[v].clone(),
                })?);
            }
            registers.push(out);
        }
        let mut words = None;
        match spec.shape {
            Shape::Graph => {
                if let Some(i) = (0..n).find(|&i| succ[i].is_empty()) {
                    return Err(Error::NoSuccessor(spec.nodes[i].clone()));
                }
            }
            Shape::Tree { branching, depth } => {
                if !(1..=9).contains(&branching) {
                    return Err(Error::InvalidTree(format!(
                        "branching degree {branching} outside 1..9"
                    )));
                }
                let mut ws = Vec::with_capacity(n);
                for name in &spec.nodes {
                    let w = parse_word(name, branching)?;
                    if w.len() > depth {
                        return Err(Error::InvalidTree(format!(
                            "node `{name}` is deeper than {depth}"
                        )));
                    }
                    ws.push(w);
                }
                let expected = tree_words(branching, depth).len();
                if n != expected {
                    return Err(Error::InvalidTree(format!(
                        "a full tree of branching {branching} and depth {depth} has {expected} nodes, found {n}"
                    )));
                }
                let mut derived = vec![Vec::new(); n];
                for (i, w) in ws.iter().enumerate() {
                    if w.len() < depth {
                        for k in 1..=branching as u8 {
                            let mut c = w.clone();
                            c.push(k);
                            derived[i].push(index[&word_name(&c)]);
                        }
                    }
                }
                if !spec.edges.is_empty() {
                    let mut given: Vec<Vec<usize>> = succ.clone();
                    for (g, d) in given.iter_mut().zip(&derived) {
                        g.sort_unstable();
                        let mut d = d.clone();
                        d.sort_unstable();
                        if *g != d {
                            return Err(Error::InvalidTree(
                                "edges do not match the parent/child structure of the node names"
                                    .to_string(),
                            ));
                        }
                    }
                }
                succ = derived;
                words = Some(ws);
            }
        }
        Ok(ConstraintKripke {
            nodes: spec.nodes.clone(),
            index,
            succ,
            labels,
            vars: spec.vars.clone(),
            registers,
            shape: spec.shape,
            words,
        })
    }

    /// A graph-shaped model from index-based parts.
    pub fn graph(
        nodes: Vec<String>,
        succ: Vec<Vec<usize>>,
        labels: Vec<BTreeSet<String>>,
        vars: Vec<String>,
        registers: Vec<Vec<Value>>,
    ) -> Result<Self> {
        let spec = ModelSpec {
            shape: Shape::Graph,
            edges: succ
                .iter()
                .enumerate()
                .flat_map(|(i, s)| {
                    let nodes = &nodes;
                    s.iter().map(move |&j| (nodes[i].clone(), nodes[j].clone()))
                })
                .collect(),
            labels: labels
                .iter()
                .enumerate()
                .map(|(i, l)| (nodes[i].clone(), l.iter().cloned().collect()))
                .collect(),
            registers: registers
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    let (nodes, vars) = (&nodes, &vars);
                    row.iter()
                        .enumerate()
                        .map(move |(v, val)| (nodes[i].clone(), vars[v].clone(), val.clone()))
                })
                .collect(),
            nodes,
            vars,
            allow_reserved: true,
        };
        Self::from_spec(&spec)
    }

    /// The full tree of the given branching and depth; `label` and
    /// `registers` are called with each node's word.
    pub fn full_tree(
        branching: usize,
        depth: usize,
        vars: Vec<String>,
        mut label: impl FnMut(&[u8]) -> BTreeSet<String>,
        mut registers: impl FnMut(&[u8]) -> Vec<Value>,
    ) -> Result<Self> {
        let words = tree_words(branching, depth);
        let mut spec = ModelSpec {
            shape: Shape::Tree { branching, depth },
            vars: vars.clone(),
            nodes: words.iter().map(|w| word_name(w)).collect(),
            edges: Vec::new(),
            labels: Vec::new(),
            registers: Vec::new(),
            allow_reserved: true,
        };
        for w in &words {
            let name = word_name(w);
            spec.labels
                .push((name.clone(), label(w).into_iter().collect()));
            let row = registers(w);
            if row.len() != vars.len() {
                return Err(Error::InvalidTree(format!(
                    "node `{name}` has {} register values for {} variables",
                    row.len(),
                    vars.len()
                )));
            }
            for (v, val) in vars.iter().zip(row) {
                spec.registers.push((name.clone(), v.clone(), val));
            }
        }
        Self::from_spec(&spec)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn successor_lists(&self) -> &[Vec<usize>] {
        &self.succ
    }

    pub fn labels(&self, i: usize) -> &BTreeSet<String> {
        &self.labels[i]
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn register(&self, node: usize, var: usize) -> &Value {
        &self.registers[node][var]
    }

    pub fn registers(&self, node: usize) -> &[Value] {
        &self.registers[node]
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// The word of a tree node.
    pub fn word(&self, i: usize) -> Option<&[u8]> {
        self.words.as_ref().map(|w| w[i].as_slice())
    }

    /// The tree node with the given word.
    pub fn node_by_word(&self, word: &[u8]) -> Option<usize> {
        self.node_index(&word_name(word))
    }

    /// Checks that every register value belongs to `domain`.
    /// The same model with every register replaced; `registers[node]`
    /// lists the values of the variables in declaration order.
    pub fn with_registers(&self, registers: Vec<Vec<Value>>) -> Result<Self> {
        if registers.len() != self.nodes.len() {
            return Err(Error::InvalidValue("one register row per node expected".to_string()));
        }
        for (i, row) in registers.iter().enumerate() {
            if row.len() != self.vars.len() {
                let var = self.vars.get(row.len()).cloned().unwrap_or_default();
                return Err(Error::MissingRegister {
                    node: self.nodes[i].clone(),
                    var,
                });
            }
        }
        let mut out = self.clone();
        out.registers = registers;
        Ok(out)
    }

    /// The same model with new labels, one set per node.
    pub fn with_labels(&self, labels: Vec<BTreeSet<String>>) -> Result<Self> {
        if labels.len() != self.nodes.len() {
            return Err(Error::InvalidValue("one label set per node expected".to_string()));
        }
        let mut out = self.clone();
        out.labels = labels;
        Ok(out)
    }

    pub fn check_domain(&self, domain: &ConcreteDomain) -> Result<()> {
        for (i, row) in self.registers.iter().enumerate() {
            for (v, val) in row.iter().enumerate() {
                if !domain.contains(val) {
                    return Err(Error::ValueOutOfDomain {
                        value: format!("{val} (register {} at node {})", self.vars[v], self.nodes[i]),
                        domain: domain.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    fn tree_words_or_err(&self) -> Result<(&Vec<Vec<u8>>, usize)> {
        match (&self.words, self.shape) {
            (Some(w), Shape::Tree { depth, .. }) => Ok((w, depth)),
            _ => Err(Error::InvalidTree("expected a tree-shaped model".to_string())),
        }
    }

    /// Node reached from the constraint's anchor: for a node with word `w`
    /// and a constraint of depth `d`, the anchor is the ancestor `d` levels
    /// up and offset `j` selects the node `j` steps down towards `w`.
    fn anchored(&self, word: &[u8], depth: usize, offset: usize) -> usize {
        let base = word.len() - depth;
        self.node_by_word(&word[..base + offset])
            .expect("prefixes of tree nodes are tree nodes")
    }
}

/// Labels every node of a constraint tree with the propositions `p_i` whose
/// constraints hold, reading registers `d_i` levels up the tree.
pub fn abstract_model(
    tree: &ConstraintKripke,
    table: &AbstractionTable,
    domain: &ConcreteDomain,
) -> Result<ConstraintKripke> {
    let (words, depth) = tree.tree_words_or_err()?;
    let needed = table.max_depth();
    if depth < needed {
        return Err(Error::TreeTooShallow { depth, needed });
    }
    let var_idx = resolve_vars(tree, table)?;
    let mut out = tree.clone();
    for (i, w) in words.iter().enumerate() {
        for (e, entry) in table.entries.iter().enumerate() {
            let d = entry.depth();
            if w.len() < d {
                continue;
            }
            let args: Vec<Value> = entry
                .constraint
                .args()
                .iter()
                .zip(&var_idx[e])
                .map(|(t, &v)| tree.register(tree.anchored(w, d, t.offset), v).clone())
                .collect();
            if domain.eval_relation(entry.constraint.relation(), &args)? {
                out.labels[i].insert(entry.prop.clone());
            }
        }
    }
    Ok(out)
}

fn resolve_vars(tree: &ConstraintKripke, table: &AbstractionTable) -> Result<Vec<Vec<usize>>> {
    table
        .entries
        .iter()
        .map(|e| {
            e.constraint
                .args()
                .iter()
                .map(|t| {
                    tree.var_index(&t.var)
                        .ok_or_else(|| Error::MissingVariable(t.var.clone()))
                })
                .collect()
        })
        .collect()
}

/// Name of the constraint-graph element for register `var` at `node`.
pub fn element_name(node: &str, var: &str) -> String {
    format!("{node}:{var}")
}

/// Builds the constraint graph `G_T` of a labelled tree: one element per
/// (node, variable) pair, and for each node carrying `p_i` one tuple of
/// `R_i` connecting the registers it constrains.
pub fn extract_constraint_graph(
    tree: &ConstraintKripke,
    table: &AbstractionTable,
    vars: &[String],
) -> Result<SigmaStructure> {
    let (words, _) = tree.tree_words_or_err()?;
    let m = vars.len();
    let mut g = SigmaStructure::new(
        tree.nodes
            .iter()
            .flat_map(|n| vars.iter().map(move |v| element_name(n, v))),
    )?;
    for e in &table.entries {
        g.declare(e.constraint.relation().clone());
    }
    for (i, w) in words.iter().enumerate() {
        for entry in &table.entries {
            if !tree.labels[i].contains(&entry.prop) {
                continue;
            }
            let d = entry.depth();
            if w.len() < d {
                return Err(Error::LabelTooShallow {
                    node: tree.nodes[i].clone(),
                    prop: entry.prop.clone(),
                    needed: d,
                });
            }
            let tuple = entry
                .constraint
                .args()
                .iter()
                .map(|t| {
                    let v = vars
                        .iter()
                        .position(|x| *x == t.var)
                        .ok_or_else(|| Error::MissingVariable(t.var.clone()))?;
                    Ok(tree.anchored(w, d, t.offset) * m + v)
                })
                .collect::<Result<Vec<_>>>()?;
            g.add_tuple(entry.constraint.relation(), tuple)?;
        }
    }
    Ok(g)
}
