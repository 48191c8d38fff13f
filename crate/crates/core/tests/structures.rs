use std::collections::BTreeSet;

use ctlz_core::domain::{ConcreteDomain, Value};
use ctlz_core::formula::{abstract_constraints, parse_formula, AbstractionTable, ParseOptions, RelationSymbol};
use ctlz_core::gen::{example_constraint_tree, random_tree, FormulaAlphabet};
use ctlz_core::homcheck::{verify_hom, Target};
use ctlz_core::kripke::{
    abstract_model, element_name, extract_constraint_graph, parse_word, ConstraintKripke, ModelSpec, Shape,
};
use ctlz_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn table(text: &str) -> AbstractionTable {
    abstract_constraints(&parse_formula(text, ParseOptions::default()).unwrap()).1
}

fn example_table() -> AbstractionTable {
    table("E X (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))")
}

fn labels_of(t: &ConstraintKripke, node: &str, table: &AbstractionTable) -> BTreeSet<String> {
    let i = t.node_index(node).unwrap();
    // report the propositions as 1-based constraint numbers
    t.labels(i)
        .iter()
        .map(|p| {
            let k = table.entries.iter().position(|e| &e.prop == p).unwrap();
            format!("p{}", k + 1)
        })
        .collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn example_tree_abstraction_matches_hand_labels() {
    let c = example_constraint_tree();
    let tab = example_table();
    let t = abstract_model(&c, &tab, &ConcreteDomain::N).unwrap();
    let expected: [(&str, &[&str]); 15] = [
        ("e", &[]),
        ("1", &["p1", "p2"]),
        ("2", &["p1"]),
        ("11", &["p1", "p2"]),
        ("12", &[]),
        ("21", &[]),
        ("22", &[]),
        ("111", &["p1"]),
        ("112", &["p2"]),
        ("121", &[]),
        ("122", &["p1"]),
        ("211", &[]),
        ("212", &["p2"]),
        ("221", &["p1", "p2"]),
        ("222", &["p2"]),
    ];
    for (node, labels) in expected {
        assert_eq!(labels_of(&t, node, &tab), set(labels), "labels at {node}");
    }
}

#[test]
fn example_tree_constraint_graph_matches_hand_edges() {
    let c = example_constraint_tree();
    let tab = example_table();
    let t = abstract_model(&c, &tab, &ConcreteDomain::N).unwrap();
    let vars = vec!["x1".to_string(), "x2".to_string()];
    let g = extract_constraint_graph(&t, &tab, &vars).unwrap();
    assert_eq!(g.len(), 15 * 2);
    let named = |rel: &RelationSymbol| -> BTreeSet<(String, String)> {
        g.tuples(rel)
            .map(|t| (g.element_name(t[0]).to_string(), g.element_name(t[1]).to_string()))
            .collect()
    };
    let pairs = |items: &[(&str, &str)]| -> BTreeSet<(String, String)> {
        items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    };
    assert_eq!(
        named(&RelationSymbol::less()),
        pairs(&[
            ("e:x1", "1:x2"),
            ("e:x1", "2:x2"),
            ("1:x1", "11:x2"),
            ("11:x1", "111:x2"),
            ("12:x1", "122:x2"),
            ("22:x1", "221:x2"),
        ])
    );
    assert_eq!(
        named(&RelationSymbol::equal()),
        pairs(&[
            ("1:x1", "1:x2"),
            ("11:x1", "11:x2"),
            ("112:x1", "112:x2"),
            ("212:x1", "212:x2"),
            ("221:x1", "221:x2"),
            ("222:x1", "222:x2"),
        ])
    );
    let gamma: Vec<Value> = (0..c.node_count()).flat_map(|i| c.registers(i).to_vec()).collect();
    assert!(verify_hom(&g, &gamma, Target::N).unwrap());
}

fn spec(nodes: &[&str], edges: &[(&str, &str)], shape: Shape) -> ModelSpec {
    ModelSpec {
        shape,
        vars: vec!["x".into()],
        nodes: nodes.iter().map(|s| s.to_string()).collect(),
        edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        labels: Vec::new(),
        registers: nodes.iter().map(|n| (n.to_string(), "x".to_string(), Value::Int(3))).collect(),
        allow_reserved: false,
    }
}

#[test]
fn model_validation_examples() {
    assert!(ConstraintKripke::from_spec(&spec(&["v"], &[("v", "v")], Shape::Graph)).is_ok());
    assert!(matches!(
        ConstraintKripke::from_spec(&spec(&["a", "b"], &[("a", "b")], Shape::Graph)),
        Err(Error::NoSuccessor(n)) if n == "b"
    ));
    assert!(matches!(
        ConstraintKripke::from_spec(&spec(&["a"], &[("a", "z")], Shape::Graph)),
        Err(Error::DanglingEdge { .. })
    ));
    assert!(matches!(
        ConstraintKripke::from_spec(&spec(&["a", "a"], &[("a", "a")], Shape::Graph)),
        Err(Error::Duplicate(_))
    ));
    let mut missing = spec(&["a"], &[("a", "a")], Shape::Graph);
    missing.registers.clear();
    assert!(matches!(ConstraintKripke::from_spec(&missing), Err(Error::MissingRegister { .. })));
    let reserved = spec(&["__a"], &[("__a", "__a")], Shape::Graph);
    assert!(matches!(ConstraintKripke::from_spec(&reserved), Err(Error::ReservedIdentifier(_))));
}

#[test]
fn depth_three_binary_tree_has_fifteen_nodes() {
    let words = ctlz_core::kripke::tree_words(2, 3);
    let names: Vec<String> = words.iter().map(|w| ctlz_core::kripke::word_name(w)).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let t = ConstraintKripke::from_spec(&spec(&refs, &[], Shape::Tree { branching: 2, depth: 3 })).unwrap();
    assert_eq!(t.node_count(), 15);
    assert_eq!(parse_word("121", 2).unwrap(), vec![1, 2, 1]);
    assert!(parse_word("13", 2).is_err());
}

fn chain() -> ConstraintKripke {
    ConstraintKripke::full_tree(1, 1, vec!["x".into()], |_| BTreeSet::new(), |w| vec![Value::Int(w.len() as i64)])
        .unwrap()
}

#[test]
fn chain_abstraction_and_extraction() {
    let tab = table("E lt(x, X^1 x)");
    let t = abstract_model(&chain(), &tab, &ConcreteDomain::Z).unwrap();
    assert!(t.labels(0).is_empty());
    assert_eq!(t.labels(1), &set(&[tab.entries[0].prop.as_str()]));
    let g = extract_constraint_graph(&t, &tab, &["x".to_string()]).unwrap();
    let lt: Vec<_> = g.tuples(&RelationSymbol::less()).cloned().collect();
    assert_eq!(lt, vec![vec![0, 1]]);
    assert_eq!(g.element_name(0), element_name("e", "x"));

    let empty = AbstractionTable::new(Vec::new());
    let same = abstract_model(&chain(), &empty, &ConcreteDomain::Z).unwrap();
    assert_eq!(same, chain());
    let g = extract_constraint_graph(&same, &empty, &["x".to_string()]).unwrap();
    assert_eq!(g.tuple_count(), 0);
}

#[test]
fn shallow_trees_are_rejected() {
    let tab = table("E lt(x, X^2 x)");
    assert!(matches!(
        abstract_model(&chain(), &tab, &ConcreteDomain::Z),
        Err(Error::TreeTooShallow { .. })
    ));
    let tab = table("E lt(x, X^1 x)");
    let root_labelled = chain().with_labels(vec![set(&[tab.entries[0].prop.as_str()]), BTreeSet::new()]).unwrap();
    assert!(matches!(
        extract_constraint_graph(&root_labelled, &tab, &["x".to_string()]),
        Err(Error::LabelTooShallow { .. })
    ));
}

#[test]
fn registers_are_a_homomorphism_of_the_extracted_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alpha = FormulaAlphabet::sigma0(2);
    for _ in 0..300 {
        let f = alpha.next_only_formula(&mut rng, 4);
        let (_, tab) = abstract_constraints(&f);
        let depth = tab.max_depth().max(1) + rng.gen_range(0..2);
        let c = random_tree(&mut rng, 2, depth, &["x", "y"], &["p"], 3);
        let t = abstract_model(&c, &tab, &ConcreteDomain::Z).unwrap();
        for i in 0..c.node_count() {
            assert!(c.labels(i).is_subset(t.labels(i)));
        }
        let vars = vec!["x".to_string(), "y".to_string()];
        let g = extract_constraint_graph(&t, &tab, &vars).unwrap();
        assert_eq!(g.len(), c.node_count() * 2);
        let gamma: Vec<Value> = (0..c.node_count()).flat_map(|i| c.registers(i).to_vec()).collect();
        assert!(verify_hom(&g, &gamma, Target::Z).unwrap(), "{f}");
    }
}
