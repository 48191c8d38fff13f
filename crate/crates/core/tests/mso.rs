use std::collections::BTreeSet;

use ctlz_core::formula::{abstract_constraints, parse_formula, ParseOptions, RelationSymbol};
use ctlz_core::homcheck::{brute_force_hom, decide_hom, witness_bound, Target};
use ctlz_core::kripke::{extract_constraint_graph, ConstraintKripke};
use ctlz_core::domain::Value;
use ctlz_core::mso::{
    aux_prop, bound_only_under_wmsob, classify, emit_core_formula, emit_hom_sentence,
    emit_tree_encoding, eval_finite, eval_finite_with, parse_mso, pretty, relativize,
    succ_relation, tree_encoding_structure, Assignment, Classification, CoreKind, EvalOptions,
    HomTarget, Lambda1, Lambda2, Logic, Mso,
};
use ctlz_core::structure::SigmaStructure;
use ctlz_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lt() -> RelationSymbol {
    RelationSymbol::less()
}

fn lt_edge() -> Lambda2 {
    Lambda2::new("x", "y", Mso::rel(lt(), &["x", "y"]))
}

fn sentence(kind: CoreKind, a: &str, b: &str) -> Mso {
    let f = emit_core_formula(kind, &lt_edge()).unwrap();
    f.substitute("a", a).substitute("b", b)
}

fn chain(n: usize) -> SigmaStructure {
    let mut s = SigmaStructure::with_size(n);
    for i in 0..n.saturating_sub(1) {
        s.add_tuple(&lt(), vec![i, i + 1]).unwrap();
    }
    s
}

fn sigma0() -> BTreeSet<RelationSymbol> {
    [
        RelationSymbol::less(),
        RelationSymbol::equal(),
        RelationSymbol::int_constant(0),
        RelationSymbol::int_constant(2),
        RelationSymbol::modulo(0, 2).unwrap(),
        RelationSymbol::modulo(1, 2).unwrap(),
        RelationSymbol::modulo(1, 3).unwrap(),
    ]
    .into_iter()
    .collect()
}

fn random_sigma0(rng: &mut ChaCha8Rng, n: usize) -> SigmaStructure {
    let mut a = SigmaStructure::with_size(n);
    let sig: Vec<_> = sigma0().into_iter().collect();
    for x in 0..n {
        for y in 0..n {
            if rng.gen_bool(0.18) {
                a.add_tuple(&sig[0], vec![x, y]).unwrap();
            }
            if x < y && rng.gen_bool(0.07) {
                a.add_tuple(&RelationSymbol::equal(), vec![x, y]).unwrap();
            }
        }
        for r in sig.iter().filter(|r| r.arity() == 1) {
            if rng.gen_bool(0.08) {
                a.add_tuple(r, vec![x]).unwrap();
            }
        }
    }
    a
}

#[test]
fn reach_follows_chains_forward_only() {
    let a = chain(3);
    let env = Assignment::new().with_element("p", 0).with_element("q", 2);
    assert!(eval_finite(&sentence(CoreKind::Reach, "p", "q"), &a, &env).unwrap());
    assert!(!eval_finite(&sentence(CoreKind::Reach, "q", "p"), &a, &env).unwrap());
}

#[test]
fn reach_within_respects_the_set() {
    let a = chain(3);
    let f = sentence(CoreKind::ReachWithin, "p", "q");
    let full = Assignment::new()
        .with_element("p", 0)
        .with_element("q", 2)
        .with_set("Z", &[0, 1, 2]);
    assert!(eval_finite(&f, &a, &full).unwrap());
    let gap = Assignment::new()
        .with_element("p", 0)
        .with_element("q", 2)
        .with_set("Z", &[0, 2]);
    assert!(!eval_finite(&f, &a, &gap).unwrap());
}

#[test]
fn ecycle_detects_two_cycles() {
    let mut a = chain(2);
    let f = emit_core_formula(CoreKind::ECycle, &lt_edge()).unwrap();
    assert!(!eval_finite(&f, &a, &Assignment::new()).unwrap());
    a.add_tuple(&lt(), vec![1, 0]).unwrap();
    assert!(eval_finite(&f, &a, &Assignment::new()).unwrap());
}

#[test]
fn path_recognises_exact_node_sets() {
    let a = chain(4);
    let f = sentence(CoreKind::Path, "p", "q");
    let env = |set: &[usize]| Assignment::new().with_element("p", 0).with_element("q", 3).with_set("Z", set);
    assert!(eval_finite(&f, &a, &env(&[0, 1, 2, 3])).unwrap());
    assert!(!eval_finite(&f, &a, &env(&[0, 1, 3])).unwrap());
}

#[test]
fn bounded_paths_hold_on_finite_structures() {
    let f = sentence(CoreKind::BPaths, "p", "q");
    let a = chain(4);
    let env = Assignment::new().with_element("p", 0).with_element("q", 3);
    let opts = EvalOptions {
        bound_diagnostics: true,
        ..EvalOptions::default()
    };
    let (v, stats) = eval_finite_with(&f, &a, &env, &opts).unwrap();
    assert!(v);
    assert_eq!(stats.bound_evaluations, 1);
    assert_eq!(stats.max_bound_witness, Some(4));
}

#[test]
fn edge_with_extra_free_variable_is_rejected() {
    let edge = Lambda2::new("x", "y", Mso::rel(lt(), &["x", "w"]));
    assert!(matches!(
        emit_core_formula(CoreKind::Reach, &edge),
        Err(Error::FreeVariableMismatch(_))
    ));
}

#[test]
fn unassigned_free_variable_is_an_error() {
    let f = Mso::rel(lt(), &["x", "y"]);
    assert!(matches!(
        eval_finite(&f, &chain(2), &Assignment::new().with_element("x", 0)),
        Err(Error::UnboundVariable(v)) if v == "y"
    ));
}

#[test]
fn evaluator_enforces_element_limit() {
    let a = SigmaStructure::with_size(13);
    assert!(matches!(
        eval_finite(&Mso::True, &a, &Assignment::new()),
        Err(Error::StructureTooLarge { size: 13, limit: 12 })
    ));
}

fn conjuncts(f: &Mso) -> &[Mso] {
    match f {
        Mso::Tag(_, b) => conjuncts(b),
        Mso::And(xs) => xs,
        _ => std::slice::from_ref(f),
    }
}

fn count_set_binders(f: &Mso) -> usize {
    match f {
        Mso::ExistsSet(_, b) => 1 + count_set_binders(b),
        Mso::And(xs) => xs.iter().map(count_set_binders).max().unwrap_or(0),
        Mso::Tag(_, b) | Mso::Not(b) => count_set_binders(b),
        _ => 0,
    }
}

#[test]
fn order_only_sentence_has_two_conjuncts() {
    let sig: BTreeSet<_> = [lt()].into_iter().collect();
    let f = emit_hom_sentence(&sig, HomTarget::ZOrder).unwrap();
    assert_eq!(conjuncts(&f).len(), 2);
    assert!(emit_hom_sentence(&sigma0(), HomTarget::ZOrder).is_err());
}

#[test]
fn bounded_part_quantifies_one_set_per_window_value() {
    let sig: BTreeSet<_> = [lt(), RelationSymbol::int_constant(0)].into_iter().collect();
    let f = emit_hom_sentence(&sig, HomTarget::Z).unwrap();
    let phi_b = &conjuncts(&f)[0];
    assert_eq!(count_set_binders(phi_b), 1);
    // φ_mod is the last conjunct of the matrix and is constant true.
    let text = phi_b.to_string();
    assert!(text.contains("X_0"));

    let sig: BTreeSet<_> = [
        lt(),
        RelationSymbol::int_constant(0),
        RelationSymbol::int_constant(3),
        RelationSymbol::modulo(0, 2).unwrap(),
    ]
    .into_iter()
    .collect();
    let f = emit_hom_sentence(&sig, HomTarget::Z).unwrap();
    assert_eq!(count_set_binders(&conjuncts(&f)[0]), 4);
    for i in 0..4 {
        assert!(f.to_string().contains(&format!("X_{i}")));
    }
}

#[test]
fn modulo_conjunct_is_true_without_moduli() {
    fn innermost_and(f: &Mso) -> Option<&Vec<Mso>> {
        match f {
            Mso::ExistsSet(_, b) | Mso::Tag(_, b) => innermost_and(b),
            Mso::And(xs) => xs.iter().rev().find_map(innermost_and).or(Some(xs)),
            _ => None,
        }
    }
    let sig: BTreeSet<_> = [lt(), RelationSymbol::int_constant(0)].into_iter().collect();
    let f = emit_hom_sentence(&sig, HomTarget::Z).unwrap();
    let matrix = innermost_and(&conjuncts(&f)[0]).unwrap();
    assert_eq!(matrix.last(), Some(&Mso::True));
}

#[test]
fn hom_sentence_is_a_boolean_combination() {
    let f = emit_hom_sentence(&sigma0(), HomTarget::Z).unwrap();
    assert_eq!(classify(&f), Classification::BooleanCombination);
    assert!(bound_only_under_wmsob(&f));
    let sig: BTreeSet<_> = [lt()].into_iter().collect();
    let g = emit_hom_sentence(&sig, HomTarget::ZOrder).unwrap();
    assert_eq!(classify(&g), Classification::Pure(Logic::WmsoB));
}

#[test]
fn constants_are_rejected_for_half_lines() {
    assert!(emit_hom_sentence(&sigma0(), HomTarget::N).is_err());
    let sig: BTreeSet<_> = [lt(), RelationSymbol::equal(), RelationSymbol::modulo(1, 2).unwrap()]
        .into_iter()
        .collect();
    assert!(emit_hom_sentence(&sig, HomTarget::NegZ).is_ok());
}

#[test]
fn chain_between_adjacent_constants_is_rejected() {
    let mut a = SigmaStructure::new(["a", "x", "b"]).unwrap();
    a.add_named(&RelationSymbol::int_constant(0), &["a"]).unwrap();
    a.add_named(&RelationSymbol::int_constant(1), &["b"]).unwrap();
    a.add_named(&lt(), &["a", "x"]).unwrap();
    a.add_named(&lt(), &["x", "b"]).unwrap();
    let f = emit_hom_sentence(&a.signature(), HomTarget::Z).unwrap();
    assert!(!eval_finite(&f, &a, &Assignment::new()).unwrap());
}

#[test]
fn hom_sentence_agrees_with_decision_and_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z = emit_hom_sentence(&sigma0(), HomTarget::Z).unwrap();
    let half_sig: BTreeSet<_> = sigma0().into_iter().filter(|r| r.constant_value().is_none()).collect();
    let n_sentence = emit_hom_sentence(&half_sig, HomTarget::N).unwrap();
    let negz_sentence = emit_hom_sentence(&half_sig, HomTarget::NegZ).unwrap();
    for round in 0..150 {
        let n = rng.gen_range(1..=6);
        let a = random_sigma0(&mut rng, n);
        let k = witness_bound(&a).unwrap();
        let by_sentence = eval_finite(&z, &a, &Assignment::new()).unwrap();
        let by_decision = decide_hom(&a, Target::Z).unwrap().exists;
        let by_search = brute_force_hom(&a, k, Target::Z).unwrap().is_some();
        assert_eq!(by_sentence, by_decision, "round {round}: {a:?}");
        assert_eq!(by_decision, by_search, "round {round}: {a:?}");

        let keep: Vec<_> = (0..n).collect();
        let mut b = a.induced(&keep);
        b = strip_constants(&b);
        for (f, t) in [(&n_sentence, Target::N), (&negz_sentence, Target::NegZ)] {
            let s = eval_finite(f, &b, &Assignment::new()).unwrap();
            assert_eq!(s, decide_hom(&b, t).unwrap().exists, "{t} {b:?}");
        }
    }
}

fn strip_constants(a: &SigmaStructure) -> SigmaStructure {
    let mut b = SigmaStructure::new(a.elements().iter().cloned()).unwrap();
    for (r, ts) in a.relations() {
        if r.constant_value().is_some() {
            continue;
        }
        b.declare(r.clone());
        for t in ts {
            b.add_tuple(r, t.clone()).unwrap();
        }
    }
    b
}

#[test]
fn order_only_sentence_matches_acyclicity() {
    let sig: BTreeSet<_> = [lt()].into_iter().collect();
    let f = emit_hom_sentence(&sig, HomTarget::ZOrder).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let mut a = SigmaStructure::with_size(n);
        a.declare(lt());
        for x in 0..n {
            for y in 0..n {
                if rng.gen_bool(0.15) {
                    a.add_tuple(&lt(), vec![x, y]).unwrap();
                }
            }
        }
        assert_eq!(
            eval_finite(&f, &a, &Assignment::new()).unwrap(),
            decide_hom(&a, Target::Z).unwrap().exists
        );
    }
}

// Random formulas over {lt, p} for the semantic properties below.

fn random_formula(rng: &mut ChaCha8Rng, depth: usize, fo: &mut Vec<String>, so: &mut Vec<String>) -> Mso {
    let p = RelationSymbol::named("p", 1).unwrap();
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        if fo.is_empty() {
            return if rng.gen_bool(0.5) { Mso::True } else { Mso::False };
        }
        let pick = |rng: &mut ChaCha8Rng, v: &Vec<String>| v[rng.gen_range(0..v.len())].clone();
        return match rng.gen_range(0..4) {
            0 => Mso::rel(lt(), &[&pick(rng, fo), &pick(rng, fo)]),
            1 => Mso::rel(p, &[&pick(rng, fo)]),
            2 if !so.is_empty() => Mso::member(&pick(rng, fo), &pick(rng, so)),
            _ => Mso::Eq(pick(rng, fo), pick(rng, fo)),
        };
    }
    match rng.gen_range(0..9) {
        0 => Mso::not(random_formula(rng, depth - 1, fo, so)),
        1 => Mso::And(vec![random_formula(rng, depth - 1, fo, so), random_formula(rng, depth - 1, fo, so)]),
        2 => Mso::Or(vec![random_formula(rng, depth - 1, fo, so), random_formula(rng, depth - 1, fo, so)]),
        3 | 4 => {
            let v = format!("x{}", fo.len());
            fo.push(v.clone());
            let b = random_formula(rng, depth - 1, fo, so);
            fo.pop();
            if rng.gen_bool(0.5) { Mso::exists(&v, b) } else { Mso::forall(&v, b) }
        }
        5 | 6 => {
            let v = format!("S{}", so.len());
            so.push(v.clone());
            let b = random_formula(rng, depth - 1, fo, so);
            so.pop();
            if rng.gen_bool(0.5) { Mso::exists_set(&v, b) } else { Mso::forall_set(&v, b) }
        }
        7 if fo.len() >= 2 => {
            let (a, b) = (fo[rng.gen_range(0..fo.len())].clone(), fo[rng.gen_range(0..fo.len())].clone());
            Mso::reach(lt_edge(), &a, &b)
        }
        _ if !so.is_empty() && fo.len() >= 2 => {
            let (a, b) = (fo[0].clone(), fo[fo.len() - 1].clone());
            let z = so[rng.gen_range(0..so.len())].clone();
            Mso::reach_within(lt_edge(), &a, &b, &z)
        }
        _ => random_formula(rng, depth - 1, fo, so),
    }
}

fn random_structure(rng: &mut ChaCha8Rng, n: usize) -> SigmaStructure {
    let p = RelationSymbol::named("p", 1).unwrap();
    let q = RelationSymbol::named("q", 1).unwrap();
    let mut a = SigmaStructure::with_size(n);
    a.declare(lt());
    a.declare(p.clone());
    a.declare(q.clone());
    for x in 0..n {
        for y in 0..n {
            if rng.gen_bool(0.25) {
                a.add_tuple(&lt(), vec![x, y]).unwrap();
            }
        }
        if rng.gen_bool(0.4) {
            a.add_tuple(&p, vec![x]).unwrap();
        }
        if rng.gen_bool(0.6) {
            a.add_tuple(&q, vec![x]).unwrap();
        }
    }
    a
}

#[test]
fn relativisation_matches_induced_substructure() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = RelationSymbol::named("q", 1).unwrap();
    let guard = Lambda1::new("g", Mso::rel(q.clone(), &["g"]));
    for _ in 0..500 {
        let f = random_formula(&mut rng, 4, &mut Vec::new(), &mut Vec::new());
        let n = rng.gen_range(1..=5);
        let a = random_structure(&mut rng, n);
        let keep: Vec<usize> = (0..a.len()).filter(|&i| a.holds(&q, &[i])).collect();
        let sub = a.induced(&keep);
        let rel = relativize(&f, &guard);
        assert_eq!(
            eval_finite(&rel, &a, &Assignment::new()).unwrap(),
            eval_finite(&f, &sub, &Assignment::new()).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn macro_expansion_preserves_meaning() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = RelationSymbol::named("q", 1).unwrap();
    let guard = Lambda1::new("g", Mso::rel(q, &["g"]));
    for i in 0..300 {
        let mut f = random_formula(&mut rng, 3, &mut Vec::new(), &mut Vec::new());
        if i % 2 == 0 {
            f = relativize(&f, &guard);
        }
        let n = rng.gen_range(1..=4);
        let a = random_structure(&mut rng, n);
        assert_eq!(
            eval_finite(&f, &a, &Assignment::new()).unwrap(),
            eval_finite(&f.expand(), &a, &Assignment::new()).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn emitted_sentences_round_trip_through_text() {
    for target in [HomTarget::Z, HomTarget::N] {
        let sig = match target {
            HomTarget::Z => sigma0(),
            _ => [lt(), RelationSymbol::equal()].into_iter().collect(),
        };
        let f = emit_hom_sentence(&sig, target).unwrap();
        assert_eq!(parse_mso(&f.to_string()).unwrap(), f);
        assert_eq!(parse_mso(&pretty(&f)).unwrap(), f);
    }
}

#[test]
fn pretty_printer_indents_long_formulas() {
    let f = emit_hom_sentence(&sigma0(), HomTarget::Z).unwrap();
    let text = pretty(&f);
    assert!(text.lines().count() > 10);
    assert!(text.lines().all(|l| l.len() <= 200));
    let short = parse_mso("(exists x (lt x x))").unwrap();
    assert_eq!(pretty(&short), "(exists x (lt x x))");
}

#[test]
fn parse_errors_carry_positions() {
    match parse_mso("(and true\n  (in x))") {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
        other => panic!("{other:?}"),
    }
    assert!(parse_mso("(and true").is_err());
    assert!(parse_mso("true false").is_err());
    assert!(parse_mso("(exists and true)").is_err());
}

proptest! {
    #[test]
    fn random_formulas_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, 5, &mut Vec::new(), &mut Vec::new());
        prop_assert_eq!(parse_mso(&f.to_string()).unwrap(), f.clone());
        prop_assert_eq!(parse_mso(&pretty(&f)).unwrap(), f);
    }
}

#[test]
fn relativize_wraps_quantifiers() {
    let q = Lambda1::new("v", Mso::rel(RelationSymbol::named("q", 1).unwrap(), &["v"]));
    let f = parse_mso("(exists x (lt x x))").unwrap();
    assert_eq!(relativize(&f, &q).to_string(), "(exists x (and (q x) (lt x x)))");
    let g = parse_mso("(forallset X true)").unwrap();
    assert_eq!(
        relativize(&g, &q).to_string(),
        "(forallset X (-> (subset X (v (q v))) true))"
    );
}

// Tree encoding.

#[test]
fn tree_encoding_shapes() {
    let (_, table) = abstract_constraints(&parse_formula("E X lt(x, X^1 x)", ParseOptions::default()).unwrap());
    let vars = vec!["x".to_string()];
    let (beta, alpha_e) = emit_tree_encoding(&Mso::True, &table, &vars, 1, &[]).unwrap();
    assert_eq!(alpha_e, Mso::True);
    let rels = beta.relations();
    assert!(rels.contains(&succ_relation(2)));
    assert!(rels.contains(&aux_prop(1)));
    assert!(!rels.contains(&succ_relation(3)));

    let vars2 = vec!["x".to_string(), "y".to_string()];
    let f = parse_mso("(exists z true)").unwrap();
    let (_, alpha_e) = emit_tree_encoding(&f, &table, &vars2, 1, &[]).unwrap();
    match alpha_e {
        Mso::Exists(_, body) => match *body {
            Mso::And(ref xs) => match &xs[0] {
                Mso::Or(ds) => assert_eq!(ds.len(), 2),
                other => panic!("{other}"),
            },
            other => panic!("{other}"),
        },
        other => panic!("{other}"),
    }
}

fn random_tree(rng: &mut ChaCha8Rng, props: &[&str], depth1: &[&str]) -> ConstraintKripke {
    // Depth-1 binary trees; props needing one step sit on the leaves.
    let vars = vec!["x".to_string(), "y".to_string()];
    ConstraintKripke::full_tree(
        2,
        1,
        vars,
        |w: &[u8]| {
            let mut s = BTreeSet::new();
            for p in props.iter().chain(depth1) {
                if (!w.is_empty() || !depth1.contains(p)) && rng.gen_bool(0.4) {
                    s.insert(p.to_string());
                }
            }
            s
        },
        |_| vec![Value::Int(0); 2],
    )
    .unwrap()
}

#[test]
fn tree_encoding_agrees_with_constraint_graph() {
    let phi = parse_formula("E X (lt(x, X^1 y) & lt(X^1 y, x) & eq(x, y))", ParseOptions::default()).unwrap();
    let (_, table) = abstract_constraints(&phi);
    let vars = vec!["x".to_string(), "y".to_string()];
    let sig: BTreeSet<_> = [lt(), RelationSymbol::equal()].into_iter().collect();
    let alpha = emit_hom_sentence(&sig, HomTarget::Z).unwrap();
    let (beta, alpha_e) = emit_tree_encoding(&alpha, &table, &vars, 2, &[]).unwrap();
    let props: Vec<String> = table.entries.iter().map(|e| e.prop.clone()).collect();
    let opts = EvalOptions {
        max_elements: 40,
        ..EvalOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut seen = BTreeSet::new();
    for _ in 0..12 {
        let (shallow, deep): (Vec<&str>, Vec<&str>) = table
            .entries
            .iter()
            .map(|e| (e.prop.as_str(), e.depth()))
            .fold((vec![], vec![]), |(mut s, mut d), (p, k)| {
                if k == 0 { s.push(p) } else { d.push(p) }
                (s, d)
            });
        let tree = random_tree(&mut rng, &shallow, &deep);
        let g = extract_constraint_graph(&tree, &table, &vars).unwrap();
        let te = tree_encoding_structure(&tree, &table, &vars, &props).unwrap();
        assert!(eval_finite_with(&beta, &te, &Assignment::new(), &opts).unwrap().0);
        let on_graph = eval_finite(&alpha, &g, &Assignment::new()).unwrap();
        let on_tree = eval_finite_with(&alpha_e, &te, &Assignment::new(), &opts).unwrap().0;
        assert_eq!(on_graph, on_tree);
        seen.insert(on_graph);
    }
    assert_eq!(seen.len(), 2, "both verdicts should occur");
}

#[test]
fn beta_rejects_labelled_auxiliary_nodes() {
    let (_, table) = abstract_constraints(&parse_formula("E X lt(x, X^1 x)", ParseOptions::default()).unwrap());
    let vars = vec!["x".to_string()];
    let props: Vec<String> = table.entries.iter().map(|e| e.prop.clone()).collect();
    let (beta, _) = emit_tree_encoding(&Mso::True, &table, &vars, 1, &props).unwrap();
    let tree = ConstraintKripke::full_tree(1, 1, vars.clone(), |_| BTreeSet::new(), |_| vec![Value::Int(0)]).unwrap();
    let mut te = tree_encoding_structure(&tree, &table, &vars, &props).unwrap();
    assert!(eval_finite(&beta, &te, &Assignment::new()).unwrap());
    let aux = te.index_of("e:x").unwrap();
    let p = RelationSymbol::named(&props[0], 1).unwrap();
    te.add_tuple(&p, vec![aux]).unwrap();
    assert!(!eval_finite(&beta, &te, &Assignment::new()).unwrap());
}
