use std::time::Instant;

use ctlz_core::domain::{ConcreteDomain, Value};
use ctlz_core::formula::{parse_formula, to_nnf, to_snnf, ParseOptions, StateFormula};
use ctlz_core::gen::{example_constraint_tree, random_tree, FormulaAlphabet};
use ctlz_core::modelcheck::check_ctlstar;
use ctlz_core::satsearch::{
    candidate_graphs, candidate_values, eval_bounded, find_model, reduction_backward, reduction_consistency,
    required_depth, rooted_graphs, SearchBounds, SATISFIABLE_SUITE, UNSATISFIABLE_SUITE,
};
use ctlz_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn parse(s: &str) -> StateFormula {
    parse_formula(s, ParseOptions::default()).unwrap()
}

fn bounds(max_nodes: usize, range: i64) -> SearchBounds {
    SearchBounds {
        max_nodes,
        range,
        full_sweep: false,
    }
}

#[test]
fn smallest_model_for_eventual_constant() {
    let m = find_model(&parse("E F eqc[5](x)"), &ConcreteDomain::Z, &bounds(1, 5))
        .unwrap()
        .unwrap();
    assert_eq!(m.node, 0);
    assert_eq!(m.model.node_count(), 1);
    assert_eq!(m.model.successors(0), &[0]);
    assert_eq!(m.model.registers(0), &[Value::Int(5)]);
}

#[test]
fn irreflexive_order_has_no_model() {
    for n in 1..=3 {
        assert!(find_model(&parse("E lt(x, x)"), &ConcreteDomain::Z, &bounds(n, 4)).unwrap().is_none());
    }
}

#[test]
fn parity_contradiction_has_no_model() {
    let f = parse("E X mod[1,2](x) & A X mod[0,2](x)");
    for n in 1..=3 {
        for r in 0..=3 {
            assert!(find_model(&f, &ConcreteDomain::Z, &bounds(n, r)).unwrap().is_none());
        }
    }
}

#[test]
fn full_sweep_finds_the_same_first_model() {
    let f = parse("E (eq(x, X^1 x) U (p & eqc[-2](x)))");
    let a = find_model(&f, &ConcreteDomain::Z, &bounds(2, 3)).unwrap().unwrap();
    let b = find_model(&f, &ConcreteDomain::Z, &SearchBounds { full_sweep: true, ..bounds(2, 3) })
        .unwrap()
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn candidate_values_cover_constants_and_residues() {
    let f = parse("E (eqc[40](x) & mod[2,7](y))");
    let v = candidate_values(&f, &ConcreteDomain::Z, &bounds(1, 100));
    assert!(v.contains(&Value::Int(40)));
    assert!(v.contains(&Value::Int(100)) && v.contains(&Value::Int(-100)));
    for a in 0..7 {
        assert!(v.iter().any(|x| x.as_int().unwrap().rem_euclid(7) == a));
    }
    assert!(v.len() < 40);
    let nat = candidate_values(&f, &ConcreteDomain::N, &bounds(1, 5));
    assert!(nat.iter().all(|x| x.as_int().unwrap() >= 0));
}

#[test]
fn graph_enumeration_is_rooted_and_total() {
    assert_eq!(rooted_graphs(1).count(), 1);
    // two nodes: 0 -> 1 is forced; 0 -> 0 optional; 1 needs a successor
    assert_eq!(rooted_graphs(2).count(), 6);
    for g in candidate_graphs(3).unwrap() {
        assert!(g.iter().all(|s| !s.is_empty()));
        let mut seen = vec![false; g.len()];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend(&g[v]);
            }
        }
        assert!(seen.iter().all(|&b| b));
    }
    assert!(candidate_graphs(0).is_err());
    assert!(candidate_graphs(5).is_err());
}

#[test]
fn documented_suites() {
    let start = Instant::now();
    for &(text, n, r) in SATISFIABLE_SUITE {
        let f = parse(text);
        let m = find_model(&f, &ConcreteDomain::Z, &bounds(n, r)).unwrap();
        let m = m.unwrap_or_else(|| panic!("no model for {text}"));
        assert!(check_ctlstar(&m.model, &f, &ConcreteDomain::Z).unwrap().contains(&m.node));
    }
    for &(text, n, r) in UNSATISFIABLE_SUITE {
        assert!(find_model(&parse(text), &ConcreteDomain::Z, &bounds(n, r)).unwrap().is_none(), "{text}");
    }
    eprintln!("suites took {:?}", start.elapsed());
}

#[test]
fn bounded_evaluation_on_the_example_tree() {
    let c = example_constraint_tree();
    let n = ConcreteDomain::N;
    assert!(eval_bounded(&c, &parse("E X (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))"), &n).unwrap());
    assert!(!eval_bounded(&c, &parse("A X X eq(x1, x2)"), &n).unwrap());
    assert!(eval_bounded(&c, &parse("E X X eq(x1, x2)"), &n).unwrap());
    assert!(matches!(
        eval_bounded(&c, &parse("E X X X X eq(x1, x2)"), &n),
        Err(Error::TreeTooShallow { .. })
    ));
    assert!(eval_bounded(&c, &parse("E F eq(x1, x2)"), &n).is_err());
    assert!(eval_bounded(&c, &parse("E X E X eq(x1, x2)"), &n).is_err());
}

#[test]
fn reduction_holds_on_the_example_tree() {
    let c = example_constraint_tree();
    let f = parse("E X (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))");
    let r = reduction_consistency(&c, &f, &ConcreteDomain::N).unwrap();
    assert!(r.concrete_holds && r.abstract_holds && r.hom_exists);
    assert!(r.violations.is_empty(), "{:?}", r.violations);

    let plain = parse("p | E X ~p");
    let r = reduction_consistency(&c, &plain, &ConcreteDomain::N).unwrap();
    assert_eq!(r.concrete_holds, r.abstract_holds);
    assert!(r.violations.is_empty());
}

#[test]
fn reduction_requires_snnf() {
    let c = example_constraint_tree();
    assert!(reduction_consistency(&c, &parse("E X ~lt(x1, x2)"), &ConcreteDomain::N).is_err());
}

fn shallow_formula(rng: &mut ChaCha8Rng, alpha: &FormulaAlphabet, depth: usize) -> StateFormula {
    loop {
        let f = to_snnf(&to_nnf(&alpha.next_only_formula(rng, 4)), &ConcreteDomain::Z).unwrap();
        if required_depth(&f).unwrap() <= depth {
            return f;
        }
    }
}

#[test]
fn reduction_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let alpha = FormulaAlphabet::sigma0(1);
    let mut both = 0;
    for _ in 0..200 {
        let f = shallow_formula(&mut rng, &alpha, 3);
        let c = random_tree(&mut rng, 2, 3, &["x", "y"], &["p", "q"], 3);
        let r = reduction_consistency(&c, &f, &ConcreteDomain::Z).unwrap();
        assert!(r.violations.is_empty(), "{f}: {:?}", r.violations);
        if r.abstract_holds && r.hom_exists {
            both += 1;
        }
    }
    assert!(both > 10, "only {both} trees exercised the backward direction");
}

#[test]
fn backward_direction_on_arbitrary_labellings() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let alpha = FormulaAlphabet::sigma0(1);
    for _ in 0..200 {
        let f = shallow_formula(&mut rng, &alpha, 3);
        let (_, table) = ctlz_core::formula::abstract_constraints(&f);
        let props: Vec<&str> = table.entries.iter().map(|e| e.prop.as_str()).chain(["p", "q"]).collect();
        let mut t = random_tree(&mut rng, 2, 3, &["x", "y"], &props, 0);
        // labels on nodes too shallow for their constraint cannot be extracted
        let cleaned: Vec<_> = (0..t.node_count())
            .map(|i| {
                let depth = t.word(i).unwrap().len();
                t.labels(i)
                    .iter()
                    .filter(|p| table.lookup_prop(p).is_none_or(|e| e.depth() <= depth))
                    .cloned()
                    .collect()
            })
            .collect();
        t = t.with_labels(cleaned).unwrap();
        let r = reduction_backward(&t, &f, &ConcreteDomain::Z).unwrap();
        assert!(r.violations.is_empty(), "{f}: {:?}", r.violations);
    }
}
