use ctlz_core::domain::ConcreteDomain;
use ctlz_core::formula::{
    abstract_constraints, concretize, count_e, parse_formula, to_nnf, to_snnf, AtomicConstraint, CountMode,
    ParseOptions, PathFormula, RelationSymbol, StateFormula, Term,
};
use ctlz_core::gen::FormulaAlphabet;
use ctlz_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn parse(s: &str) -> StateFormula {
    parse_formula(s, ParseOptions::default()).unwrap()
}

fn constraint(rel: RelationSymbol, args: &[(usize, &str)]) -> PathFormula {
    PathFormula::constraint(AtomicConstraint::new(rel, args.iter().map(|&(o, v)| Term::new(o, v)).collect()).unwrap())
}

#[test]
fn parses_until_with_offsets() {
    let f = parse("E (lt(x, X^1 y) U eqc[100](y))");
    let expected = StateFormula::exists(PathFormula::until(
        constraint(RelationSymbol::less(), &[(0, "x"), (1, "y")]),
        constraint(RelationSymbol::int_constant(100), &[(0, "y")]),
    ));
    assert_eq!(f, expected);
    assert_eq!(parse("p"), StateFormula::prop("p"));
    assert_eq!(
        parse("A X mod[1,2](x)"),
        StateFormula::all(PathFormula::next(constraint(RelationSymbol::modulo(1, 2).unwrap(), &[(0, "x")])))
    );
}

#[test]
fn parse_rejects_bad_input() {
    let opts = ParseOptions::default();
    assert!(matches!(parse_formula("E (p U", opts), Err(Error::Parse { .. })));
    assert!(parse_formula("E lt(x)", opts).is_err());
    assert!(parse_formula("E mod[2,2](x)", opts).is_err());
    assert!(parse_formula("E mod[3,2](x)", opts).is_err());
    assert!(parse_formula("__p0", opts).is_err());
    assert!(parse_formula("__p0", ParseOptions { allow_reserved: true }).is_ok());
    match parse_formula("p &\n  & q", opts) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn eventually_and_globally_desugar() {
    assert_eq!(parse("E F p"), parse("E (true U p)"));
    assert_eq!(parse("A G p"), parse("A (false R p)"));
}

#[test]
fn precedence_and_associativity() {
    assert_eq!(parse("p | q & r"), parse("p | (q & r)"));
    assert_eq!(parse("E (p U q U r)"), parse("E (p U (q U r))"));
    assert_eq!(parse("E (X p U q)"), parse("E ((X p) U q)"));
    assert_eq!(parse("E (p U q & r)"), parse("E ((p U q) & r)"));
}

#[test]
fn nnf_examples() {
    assert_eq!(to_nnf(&parse("~(p & E X q)")), parse("~p | A X ~q"));
    assert_eq!(to_nnf(&parse("~E (p U q)")), parse("A (~p R ~q)"));
    assert_eq!(to_nnf(&parse("E ~(lt(x, y) U ~p)")), parse("E (~lt(x, y) R p)"));
    let already = parse("E (p U ~q) | A X lt(x, X^1 y)");
    assert_eq!(to_nnf(&already), already);
}

#[test]
fn snnf_examples() {
    let z = ConcreteDomain::Z;
    let f = to_snnf(&to_nnf(&parse("E ~eq(x, X^1 y)")), &z).unwrap();
    assert_eq!(f.to_string(), "E (lt(x, X^1 y) | lt(X^1 y, x))");
    let f = to_snnf(&to_nnf(&parse("E ~eqc[5](x)")), &z).unwrap();
    assert_eq!(f.to_string(), "E (eqc[5](__y0) & (lt(x, __y0) | lt(__y0, x)))");
    let f = to_snnf(&to_nnf(&parse("E ~mod[1,3](x)")), &z).unwrap();
    assert_eq!(f.to_string(), "E (mod[0,3](x) | mod[2,3](x))");
    // the fresh variable sits at the constraint's depth
    let f = to_snnf(&to_nnf(&parse("E ~eqc[5](X^2 x)")), &z).unwrap();
    assert_eq!(f.to_string(), "E (eqc[5](X^2 __y0) & (lt(X^2 x, X^2 __y0) | lt(X^2 __y0, X^2 x)))");
}

#[test]
fn snnf_reuses_fresh_names_per_constraint() {
    let z = ConcreteDomain::Z;
    let f = to_snnf(&to_nnf(&parse("E ~eqc[5](x) & A X ~eqc[5](x) & E ~eqc[1](x)")), &z).unwrap();
    let mut vars = f.variables();
    vars.sort();
    assert_eq!(vars, vec!["__y0".to_string(), "__y1".to_string(), "x".to_string()]);
}

#[test]
fn snnf_avoids_existing_names() {
    let f = parse_formula("E (~eqc[5](x) & eq(__y0, x))", ParseOptions { allow_reserved: true }).unwrap();
    let g = to_snnf(&to_nnf(&f), &ConcreteDomain::Z).unwrap();
    assert!(g.variables().contains(&"__y1".to_string()));
}

#[test]
fn snnf_needs_a_negation_entry() {
    let f = parse("E ~frob(x, X^1 y)");
    assert!(to_snnf(&to_nnf(&f), &ConcreteDomain::Z).is_err());
    let g = to_snnf(&to_nnf(&parse("E ~before(i, X^1 j)")), &ConcreteDomain::AllenZ).unwrap();
    assert!(g.is_snnf());
    assert!(to_snnf(&to_nnf(&parse("E ~lt(x, y)")), &ConcreteDomain::Q).is_ok());
}

#[test]
fn counting_existential_subformulas() {
    assert_eq!(count_e(&parse("p"), CountMode::default()), 0);
    assert_eq!(count_e(&parse("E X p & E X p"), CountMode::default()), 1);
    assert_eq!(count_e(&parse("E (p U E X q)"), CountMode::default()), 2);
    assert_eq!(count_e(&parse("A X p"), CountMode::ExistentialOnly), 0);
    assert_eq!(count_e(&parse("A X p"), CountMode::WithUniversal), 1);
    // A X p and E X ~p share one E formula
    assert_eq!(count_e(&parse("A X p | E X ~p"), CountMode::WithUniversal), 1);
}

#[test]
fn abstraction_examples() {
    let f = parse("E X (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))");
    let (a, table) = abstract_constraints(&f);
    assert_eq!(a.to_string(), "E X (X __p0 & X __p1)");
    assert_eq!(table.entries.len(), 2);
    assert_eq!(table.entries[0].constraint.to_string(), "lt(x1, X^1 x2)");
    assert_eq!(table.entries[0].depth(), 1);
    assert_eq!(table.entries[1].constraint.to_string(), "eq(X^1 x1, X^1 x2)");
    assert_eq!(table.entries[1].depth(), 1);
    assert_eq!(concretize(&a, &table), f);

    let plain = parse("E (p U A X q)");
    let (a, table) = abstract_constraints(&plain);
    assert_eq!(a, plain);
    assert!(table.entries.is_empty());
}

#[test]
fn abstraction_avoids_formula_propositions() {
    let f = parse_formula("__p0 & E lt(x, y)", ParseOptions { allow_reserved: true }).unwrap();
    let (a, table) = abstract_constraints(&f);
    assert_eq!(table.entries[0].prop, "__p1");
    assert_eq!(a.to_string(), "__p0 & E __p1");
}

#[test]
fn repeated_constraints_share_a_proposition() {
    let (_, table) = abstract_constraints(&parse("E lt(x, y) & A G lt(x, y)"));
    assert_eq!(table.entries.len(), 1);
}

fn alphabet() -> FormulaAlphabet {
    FormulaAlphabet::sigma0(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = alphabet().ctlstar_formula(&mut rng, 5);
        let text = f.to_string();
        prop_assert_eq!(parse(&text), f, "{}", text);
    }

    #[test]
    fn normal_forms_are_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = alphabet().ctlstar_formula(&mut rng, 5);
        let n = to_nnf(&f);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(to_nnf(&n), n.clone());
        let s = to_snnf(&n, &ConcreteDomain::Z).unwrap();
        prop_assert!(s.is_snnf());
        prop_assert_eq!(to_snnf(&s, &ConcreteDomain::Z).unwrap(), s.clone());
        for v in f.variables() {
            prop_assert!(s.variables().contains(&v));
        }
    }

    #[test]
    fn abstraction_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = to_snnf(&to_nnf(&alphabet().ctlstar_formula(&mut rng, 5)), &ConcreteDomain::Z).unwrap();
        let (a, table) = abstract_constraints(&f);
        prop_assert!(a.constraints().is_empty());
        prop_assert_eq!(table.entries.len(), f.constraints().len());
        let props = f.propositions();
        for e in &table.entries {
            prop_assert!(!props.contains(&e.prop));
        }
        prop_assert_eq!(concretize(&a, &table), f);
    }
}
