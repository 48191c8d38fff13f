use std::collections::BTreeSet;

use ctlz_core::domain::{ConcreteDomain, Value};
use ctlz_core::formula::{parse_formula, to_nnf_path, ParseOptions, PathFormula, StateFormula};
use ctlz_core::gen::{random_model, FormulaAlphabet};
use ctlz_core::kripke::ConstraintKripke;
use ctlz_core::modelcheck::{
    check_ctl_oracle, check_ctlstar, check_frame, expand_windows, ltl_to_buchi, Checker, Frame, Ltl, Mode,
};
use ctlz_core::{Error, Tri};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn parse(s: &str) -> StateFormula {
    parse_formula(s, ParseOptions::default()).unwrap()
}

fn model(names: &[&str], edges: &[(usize, usize)], xs: &[i64], labels: &[&[&str]]) -> ConstraintKripke {
    let n = names.len();
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        succ[a].push(b);
    }
    ConstraintKripke::graph(
        names.iter().map(|s| s.to_string()).collect(),
        succ,
        (0..n)
            .map(|i| labels.get(i).map_or(BTreeSet::new(), |l| l.iter().map(|p| p.to_string()).collect()))
            .collect(),
        vec!["x".into()],
        xs.iter().map(|&v| vec![Value::Int(v)]).collect(),
    )
    .unwrap()
}

#[test]
fn window_expansion_examples() {
    let v = model(&["v"], &[(0, 0)], &[0], &[]);
    let w = expand_windows(&v, 1).unwrap();
    assert_eq!(w.windows, vec![vec![0, 0]]);
    assert_eq!(w.succ, vec![vec![0]]);

    let ab = model(&["a", "b"], &[(0, 1), (1, 0)], &[0, 1], &[]);
    let w = expand_windows(&ab, 1).unwrap();
    assert_eq!(w.windows, vec![vec![0, 1], vec![1, 0]]);
    assert_eq!(w.succ, vec![vec![1], vec![0]]);

    let w = expand_windows(&ab, 0).unwrap();
    assert_eq!(w.windows, vec![vec![0], vec![1]]);
    assert_eq!(w.succ, vec![vec![1], vec![0]]);
}

#[test]
fn window_limit_is_enforced() {
    let n = 8;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let m = model(&refs, &edges, &[0; 8], &[]);
    assert!(matches!(expand_windows(&m, 5), Err(Error::TooManyWindows { .. })));
}

#[test]
fn constant_held_forever_on_a_loop() {
    let v = model(&["v"], &[(0, 0)], &[3], &[]);
    let dom = ConcreteDomain::Z;
    assert_eq!(check_ctlstar(&v, &parse("E G eqc[3](x)"), &dom).unwrap(), vec![0]);
    assert!(check_ctlstar(&v, &parse("E G eqc[4](x)"), &dom).unwrap().is_empty());
}

#[test]
fn until_on_two_cycle() {
    let ab = model(&["a", "b"], &[(0, 1), (1, 0)], &[0, 1], &[]);
    let dom = ConcreteDomain::Z;
    let f = parse("E (lt(x, X^1 x) U eqc[1](x))");
    assert_eq!(check_ctlstar(&ab, &f, &dom).unwrap(), vec![0, 1]);
    // from b the first step goes down, so waiting for the constant fails
    let g = parse("E (lt(x, X^1 x) U eqc[2](x))");
    assert!(check_ctlstar(&ab, &g, &dom).unwrap().is_empty());
}

#[test]
fn tautology_and_simple_ctl() {
    let m = model(&["a", "b", "c"], &[(0, 1), (1, 2), (2, 2)], &[0, 0, 0], &[&[], &["p"], &[]]);
    let dom = ConcreteDomain::Z;
    assert_eq!(check_ctlstar(&m, &parse("p | ~p"), &dom).unwrap(), vec![0, 1, 2]);
    assert_eq!(check_ctlstar(&m, &parse("E X p"), &dom).unwrap(), vec![0]);
    assert_eq!(check_ctl_oracle(&m, &parse("E X p"), &dom).unwrap(), vec![0]);
    assert!(check_ctlstar(&m, &parse("E G false"), &dom).unwrap().is_empty());
    assert!(check_ctl_oracle(&m, &parse("E G false"), &dom).unwrap().is_empty());
}

#[test]
fn oracle_rejects_nested_temporal_operators() {
    let m = model(&["a"], &[(0, 0)], &[0], &[]);
    let r = check_ctl_oracle(&m, &parse("E X X p"), &ConcreteDomain::Z);
    assert!(matches!(r, Err(Error::NotCtl(_))));
}

#[test]
fn state_subformulas_requantify_over_all_paths() {
    // a branches to b (x = 5) and c (x = 0); E X (E eqc[5](x)) only needs
    // one successor and the inner E looks at that successor alone
    let m = model(&["a", "b", "c"], &[(0, 1), (0, 2), (1, 1), (2, 2)], &[0, 5, 0], &[]);
    let dom = ConcreteDomain::Z;
    assert_eq!(check_ctlstar(&m, &parse("E X E eqc[5](x)"), &dom).unwrap(), vec![0, 1]);
    assert_eq!(check_ctlstar(&m, &parse("A X E eqc[5](x)"), &dom).unwrap(), vec![1]);
    // path formula with a nested path quantifier mixing both branches
    assert_eq!(
        check_ctlstar(&m, &parse("E (X eqc[0](x) & E X eqc[5](x))"), &dom).unwrap(),
        vec![0]
    );
}

#[test]
fn registers_outside_the_domain_are_rejected() {
    let m = model(&["a"], &[(0, 0)], &[-1], &[]);
    assert!(check_ctlstar(&m, &parse("p"), &ConcreteDomain::N).is_err());
}

// --- Büchi translation against direct evaluation on lassos ---------------

fn eval_lasso(f: &Ltl, word: &[BTreeSet<usize>], loop_start: usize) -> Vec<bool> {
    let n = word.len();
    let next = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
    match f {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Lit(a, pos) => word.iter().map(|w| w.contains(a) == *pos).collect(),
        Ltl::And(a, b) => {
            let (x, y) = (eval_lasso(a, word, loop_start), eval_lasso(b, word, loop_start));
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Ltl::Or(a, b) => {
            let (x, y) = (eval_lasso(a, word, loop_start), eval_lasso(b, word, loop_start));
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        Ltl::Next(a) => {
            let x = eval_lasso(a, word, loop_start);
            (0..n).map(|i| x[next(i)]).collect()
        }
        Ltl::Until(a, b) | Ltl::Release(a, b) => {
            let until = matches!(f, Ltl::Until(..));
            let (x, y) = (eval_lasso(a, word, loop_start), eval_lasso(b, word, loop_start));
            // least fixpoint for U, greatest for R
            let mut cur = vec![!until; n];
            for _ in 0..=n {
                cur = (0..n)
                    .map(|i| {
                        if until {
                            y[i] || (x[i] && cur[next(i)])
                        } else {
                            y[i] && (x[i] || cur[next(i)])
                        }
                    })
                    .collect();
            }
            cur
        }
    }
}

fn random_ltl(rng: &mut ChaCha8Rng, depth: usize) -> Ltl {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..6) {
            0 => Ltl::True,
            1 => Ltl::False,
            k => Ltl::Lit(k % 2, k < 4),
        };
    }
    let op = rng.gen_range(0..5);
    let mut sub = || random_ltl(rng, depth - 1);
    match op {
        0 => Ltl::and(sub(), sub()),
        1 => Ltl::or(sub(), sub()),
        2 => Ltl::next(sub()),
        3 => Ltl::until(sub(), sub()),
        _ => Ltl::release(sub(), sub()),
    }
}

fn all_lassos(max_len: usize) -> Vec<(Vec<BTreeSet<usize>>, usize)> {
    let letters: Vec<BTreeSet<usize>> = (0..4u8)
        .map(|m| (0..2).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        loop {
            let word: Vec<_> = idx.iter().map(|&i| letters[i].clone()).collect();
            for start in 0..len {
                out.push((word.clone(), start));
            }
            let mut k = 0;
            while k < len && idx[k] == 3 {
                idx[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
            idx[k] += 1;
        }
    }
    out
}

fn check_automaton_on_lassos(f: &Ltl, lassos: &[(Vec<BTreeSet<usize>>, usize)]) {
    let aut = ltl_to_buchi(f);
    for (word, start) in lassos {
        let expected = eval_lasso(f, word, *start)[0];
        let got = aut.accepts_lasso(&word[..*start], &word[*start..]);
        assert_eq!(got, expected, "{f:?} on {word:?} looping at {start}");
    }
}

#[test]
fn textbook_automata_match_lasso_semantics() {
    let lassos = all_lassos(4);
    let p = Ltl::Lit(0, true);
    let q = Ltl::Lit(1, true);
    check_automaton_on_lassos(&Ltl::next(p.clone()), &lassos);
    check_automaton_on_lassos(&Ltl::release(Ltl::False, p.clone()), &lassos);
    check_automaton_on_lassos(&Ltl::until(p.clone(), q.clone()), &lassos);
    let g = ltl_to_buchi(&Ltl::release(Ltl::False, p));
    assert_eq!(g.acceptance.len(), 0);
    let u = ltl_to_buchi(&Ltl::until(Ltl::Lit(0, true), q));
    assert_eq!(u.acceptance.len(), 1);
}

#[test]
fn random_automata_match_lasso_semantics() {
    let lassos = all_lassos(3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let f = random_ltl(&mut rng, 4);
        check_automaton_on_lassos(&f, &lassos);
    }
}

// --- laws on random inputs -------------------------------------------------

fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !s.contains(i)).collect()
}

#[test]
fn path_quantifier_and_release_dualities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alpha = FormulaAlphabet::sigma0(1);
    let dom = ConcreteDomain::Z;
    for _ in 0..500 {
        let n = rng.gen_range(1..=6);
        let m = random_model(&mut rng, n, &["x", "y"], &["p", "q"], 3);
        let psi = alpha.path_formula(&mut rng, 4);
        let all = check_ctlstar(&m, &StateFormula::all(psi.clone()), &dom).unwrap();
        let ex_neg = check_ctlstar(&m, &StateFormula::exists(to_nnf_path(&PathFormula::not(psi.clone()))), &dom).unwrap();
        assert_eq!(all, complement(n, &ex_neg), "{psi}");

        let a = alpha.path_formula(&mut rng, 2);
        let b = alpha.path_formula(&mut rng, 2);
        let release = check_ctlstar(&m, &StateFormula::exists(PathFormula::release(a.clone(), b.clone())), &dom).unwrap();
        let dual = StateFormula::exists(PathFormula::not(PathFormula::until(
            PathFormula::not(a.clone()),
            PathFormula::not(b.clone()),
        )));
        assert_eq!(release, check_ctlstar(&m, &dual, &dom).unwrap(), "{a} R {b}");

        let phi = alpha.ctlstar_formula(&mut rng, 4);
        let contradiction = StateFormula::and(phi.clone(), StateFormula::not(phi.clone()));
        assert!(check_ctlstar(&m, &contradiction, &dom).unwrap().is_empty(), "{phi}");
    }
}

/// Release unrolled as a fixpoint over windows: `a R b` holds now iff
/// `b` holds and either `a` holds or `a R b` holds at the next position.
#[test]
fn release_matches_its_unfolding() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let alpha = FormulaAlphabet::sigma0(1);
    let dom = ConcreteDomain::Z;
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let m = random_model(&mut rng, n, &["x", "y"], &["p", "q"], 3);
        let a = alpha.path_formula(&mut rng, 2);
        let b = alpha.path_formula(&mut rng, 2);
        let r = PathFormula::release(a.clone(), b.clone());
        let unfolded = PathFormula::and(b, PathFormula::or(a, PathFormula::next(r.clone())));
        assert_eq!(
            check_ctlstar(&m, &StateFormula::exists(r.clone()), &dom).unwrap(),
            check_ctlstar(&m, &StateFormula::exists(unfolded), &dom).unwrap(),
            "{r}"
        );
    }
}

#[test]
fn automata_checker_agrees_with_fixpoint_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let alpha = FormulaAlphabet::sigma0(1);
    let dom = ConcreteDomain::Z;
    for _ in 0..500 {
        let n = rng.gen_range(1..=6);
        let m = random_model(&mut rng, n, &["x", "y"], &["p", "q"], 3);
        let f = alpha.ctl_formula(&mut rng, 4);
        assert_eq!(
            check_ctlstar(&m, &f, &dom).unwrap(),
            check_ctl_oracle(&m, &f, &dom).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn window_depth_does_not_matter_without_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alpha = FormulaAlphabet::propositional(&["p", "q"]);
    let dom = ConcreteDomain::Z;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = random_model(&mut rng, n, &[], &["p", "q"], 0);
        let frame = Frame::from_model(&m);
        let f = alpha.ctlstar_formula(&mut rng, 4);
        let base = Checker::new(&frame, &dom, 0).unwrap().sat(&f, Mode::Exact).unwrap();
        for d in 1..=2 {
            let other = Checker::new(&frame, &dom, d).unwrap().sat(&f, Mode::Exact).unwrap();
            assert_eq!(base, other, "{f} at depth {d}");
        }
    }
}

#[test]
fn partial_frames_bracket_every_completion() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let alpha = FormulaAlphabet::sigma0(1);
    let dom = ConcreteDomain::Z;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let m = random_model(&mut rng, n, &["x", "y"], &["p", "q"], 2);
        let f = alpha.ctlstar_formula(&mut rng, 3);
        let full = Frame::from_model(&m);
        let mut partial = full.clone();
        // the registers lie in [-2, 2], so these completions include the
        // actual values
        if rng.gen_bool(0.5) {
            partial.completions = (-2..=2).map(Value::Int).collect();
        }
        for row in &mut partial.registers {
            for v in row.iter_mut() {
                if rng.gen_bool(0.3) {
                    *v = None;
                }
            }
        }
        for p in ["p", "q"] {
            let col = partial.props.entry(p.to_string()).or_insert_with(|| vec![Tri::False; n]);
            for t in col.iter_mut() {
                if rng.gen_bool(0.3) {
                    *t = Tri::Unknown;
                }
            }
        }
        let exact = check_frame(&full, &f, &dom, Mode::Exact).unwrap();
        let opt = check_frame(&partial, &f, &dom, Mode::Optimistic).unwrap();
        let pes = check_frame(&partial, &f, &dom, Mode::Pessimistic).unwrap();
        for i in 0..n {
            assert!(!pes[i] || exact[i], "pessimistic overshoots on {f}");
            assert!(!exact[i] || opt[i], "optimistic undershoots on {f}");
        }
    }
}

#[test]
fn completions_decide_constraints_over_unknown_registers() {
    let m = model(&["a", "b"], &[(0, 1), (1, 1)], &[0, 0], &[]);
    let mut frame = Frame::from_model(&m);
    frame.registers[1][0] = None;
    let dom = ConcreteDomain::Z;
    let at_root = |frame: &Frame, f: &str, mode| check_frame(frame, &parse(f), &dom, mode).unwrap()[0];
    // without completions every constraint on b stays open
    assert!(at_root(&frame, "E X lt(x, x)", Mode::Optimistic));
    frame.completions = vec![Value::Int(1), Value::Int(2)];
    // the same unknown register on both sides
    assert!(!at_root(&frame, "E X lt(x, x)", Mode::Optimistic));
    assert!(at_root(&frame, "E X eq(x, x)", Mode::Pessimistic));
    // every completion exceeds the known 0
    assert!(at_root(&frame, "E lt(x, X^1 x)", Mode::Pessimistic));
    // 5 is not among the completions, 2 is but 1 is too
    assert!(!at_root(&frame, "E X eqc[5](x)", Mode::Optimistic));
    assert!(at_root(&frame, "E X eqc[2](x)", Mode::Optimistic));
    assert!(!at_root(&frame, "E X eqc[2](x)", Mode::Pessimistic));
}
