//! The bundled acceptance suites.
//!
//! Each criterion builds its corpus from a fixed seed, runs the decision
//! procedures against their reference implementations and reports a
//! single pass/fail line. Quick mode shrinks every corpus so the whole run
//! takes seconds.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ctlz_core::domain::{allen_interpretation, apply_interpretation, lex_interpretation, ConcreteDomain, Value};
use ctlz_core::formula::{
    abstract_constraints, parse_formula, to_nnf, to_snnf, AbstractionTable, ParseOptions, PathFormula,
    RelationSymbol, StateFormula,
};
use ctlz_core::gen::{
    example_constraint_tree, random_model, random_sigma0_structure, random_tree, sigma0, sigma0_structure_from_bits,
    sigma0_tuple_slots, FormulaAlphabet,
};
use ctlz_core::homcheck::{brute_force_hom, decide_hom, verify_hom, witness_bound, Target};
use ctlz_core::kripke::{abstract_model, extract_constraint_graph, ConstraintKripke};
use ctlz_core::modelcheck::{check_ctl_oracle, check_ctlstar};
use ctlz_core::mso::{emit_hom_sentence, eval_finite, Assignment, HomTarget};
use ctlz_core::satsearch::{
    find_model, reduction_consistency, required_depth, FoundModel, SearchBounds, SATISFIABLE_SUITE,
    UNSATISFIABLE_SUITE,
};
use ctlz_core::structure::SigmaStructure;
use ctlz_core::Rational;

/// Random three-element σ₀ structures checked in criterion 1 (the full
/// space has 2³³ members).
pub const THREE_ELEMENT_SAMPLE: usize = 500_000;

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub quick: bool,
    pub threads: Option<usize>,
    /// Criteria to run; empty means all.
    pub only: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<32} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const NAMES: [&str; 10] = [
    "homcheck vs brute force",
    "witness soundness",
    "three-way oracle",
    "tree abstraction golden",
    "model-checker laws",
    "sat-search suites",
    "snnf preservation",
    "integer/rational contrast",
    "interpretation round trip",
    "reduction harness",
];

/// Runs the selected criteria in order, calling `report` after each.
pub fn run_all(cfg: &Config, report: &mut dyn FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = cfg.threads {
            b = b.num_threads(k.max(1));
        }
        b.build().expect("thread pool")
    };
    let mut corpus: Option<(CorpusOutcome, Duration)> = None;
    let mut results = Vec::new();
    for id in 1..=10 {
        if !cfg.only.is_empty() && !cfg.only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (passed, detail) = pool.install(|| match id {
            1 | 2 => {
                let (c, took) = corpus.get_or_insert_with(|| {
                    let t = Instant::now();
                    let c = homcheck_corpus(cfg.quick);
                    (c, t.elapsed())
                });
                if id == 1 {
                    c.agreement_verdict(*took)
                } else {
                    c.soundness_verdict()
                }
            }
            3 => three_way(cfg.quick),
            4 => tree_golden(),
            5 => model_checker_laws(cfg.quick),
            6 => sat_suites(),
            7 => snnf_preservation(cfg.quick),
            8 => integer_rational_contrast(),
            9 => interpretation_round_trip(cfg.quick),
            _ => reduction_harness(cfg.quick),
        });
        let r = CriterionResult {
            id,
            name: NAMES[id - 1],
            passed,
            detail,
            elapsed: start.elapsed(),
        };
        report(&r);
        results.push(r);
    }
    results
}

fn seeded(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i as u64)
}

type Verdict = (bool, String);

fn first_failures(v: &[String]) -> String {
    v.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

// Criteria 1 and 2 ------------------------------------------------------

#[derive(Default)]
struct CorpusOutcome {
    checked: usize,
    by_size: [usize; 6],
    yes: usize,
    disagreements: Vec<String>,
    unsound: Vec<String>,
}

impl CorpusOutcome {
    fn merge(mut self, other: CorpusOutcome) -> CorpusOutcome {
        self.checked += other.checked;
        for (a, b) in self.by_size.iter_mut().zip(other.by_size) {
            *a += b;
        }
        self.yes += other.yes;
        self.disagreements.extend(other.disagreements);
        self.unsound.extend(other.unsound);
        self
    }

    fn agreement_verdict(&self, took: Duration) -> Verdict {
        let in_time = took <= Duration::from_secs(600);
        let ok = self.disagreements.is_empty() && in_time;
        let mut d = format!(
            "{} structures (sizes 1..5: {:?}), {} yes, {} disagreements",
            self.checked,
            &self.by_size[1..],
            self.yes,
            self.disagreements.len()
        );
        if !in_time {
            d.push_str(&format!(", took {:.0}s > 600s", took.as_secs_f64()));
        }
        if !self.disagreements.is_empty() {
            d.push_str(&format!(": {}", first_failures(&self.disagreements)));
        }
        (ok, d)
    }

    fn soundness_verdict(&self) -> Verdict {
        let mut d = format!("{} witnesses checked, {} violations", self.yes, self.unsound.len());
        if !self.unsound.is_empty() {
            d.push_str(&format!(": {}", first_failures(&self.unsound)));
        }
        (self.unsound.is_empty(), d)
    }
}

fn check_structure(a: &SigmaStructure) -> CorpusOutcome {
    let mut out = CorpusOutcome {
        checked: 1,
        ..CorpusOutcome::default()
    };
    out.by_size[a.len().min(5)] += 1;
    let show = || write_facts(a);
    let (d, k) = match (decide_hom(a, Target::Z), witness_bound(a)) {
        (Ok(d), Ok(k)) => (d, k),
        (d, k) => {
            out.disagreements.push(format!("{}: error {:?} {:?}", show(), d.err(), k.err()));
            return out;
        }
    };
    let brute = match brute_force_hom(a, k, Target::Z) {
        Ok(b) => b,
        Err(e) => {
            out.disagreements.push(format!("{}: brute force error {e}", show()));
            return out;
        }
    };
    if d.exists != brute.is_some() {
        out.disagreements
            .push(format!("{}: decision {} but search {}", show(), d.exists, brute.is_some()));
    }
    if d.exists {
        out.yes += 1;
        match &d.witness {
            None => out.unsound.push(format!("{}: yes without witness", show())),
            Some(w) => {
                if !verify_hom(a, w, Target::Z).unwrap_or(false) {
                    out.unsound.push(format!("{}: witness fails verification", show()));
                }
                let kq = Rational::from_integer(k);
                if w.iter().any(|v| v.as_rational().is_none_or(|r| r > kq || r < -kq)) {
                    out.unsound.push(format!("{}: witness outside ±{k}", show()));
                }
            }
        }
    }
    out
}

fn write_facts(a: &SigmaStructure) -> String {
    let mut facts = Vec::new();
    for (r, ts) in a.relations() {
        for t in ts {
            let args: Vec<&str> = t.iter().map(|&i| a.element_name(i)).collect();
            facts.push(format!("{r}({})", args.join(",")));
        }
    }
    format!("n={} {{{}}}", a.len(), facts.join(" "))
}

fn homcheck_corpus(quick: bool) -> CorpusOutcome {
    let check_bits = |n: usize, bits: u64| check_structure(&sigma0_structure_from_bits(n, bits));
    let mut total = CorpusOutcome::default();
    for n in 1..=2usize {
        let slots = sigma0_tuple_slots(n) as u32;
        let count = if quick { (1u64 << slots).min(4096) } else { 1u64 << slots };
        let part = (0..count)
            .into_par_iter()
            .map(|bits| check_bits(n, bits))
            .reduce(CorpusOutcome::default, CorpusOutcome::merge);
        total = total.merge(part);
    }
    let three = if quick { 2_000 } else { THREE_ELEMENT_SAMPLE };
    let slots3 = sigma0_tuple_slots(3) as u32;
    let part = (0..three)
        .into_par_iter()
        .map(|i| {
            let bits = seeded(3, i).gen_range(0..1u64 << slots3);
            check_bits(3, bits)
        })
        .reduce(CorpusOutcome::default, CorpusOutcome::merge);
    total = total.merge(part);
    let random = if quick { 1_000 } else { 10_000 };
    let part = (0..random)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(45, i);
            let n = rng.gen_range(4..=5);
            check_structure(&random_sigma0_structure(&mut rng, n))
        })
        .reduce(CorpusOutcome::default, CorpusOutcome::merge);
    total.merge(part)
}

// Criterion 3 -------------------------------------------------------------

fn three_way(quick: bool) -> Verdict {
    let sig: BTreeSet<RelationSymbol> = sigma0().into_iter().collect();
    let sentence = match emit_hom_sentence(&sig, HomTarget::Z) {
        Ok(s) => s,
        Err(e) => return (false, format!("emission failed: {e}")),
    };
    let count = if quick { 100 } else { 1_000 };
    let outcomes: Vec<Result<(usize, bool), String>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(33, i);
            let n = rng.gen_range(1..=8);
            let a = random_sigma0_structure(&mut rng, n);
            let e = |x: ctlz_core::Error| format!("{}: {x}", write_facts(&a));
            let mso = eval_finite(&sentence, &a, &Assignment::new()).map_err(e)?;
            let d = decide_hom(&a, Target::Z).map_err(e)?.exists;
            let brute = brute_force_hom(&a, witness_bound(&a).map_err(e)?, Target::Z).map_err(e)?.is_some();
            if mso == d && d == brute {
                Ok((n, d))
            } else {
                Err(format!("{}: sentence {mso}, decision {d}, search {brute}", write_facts(&a)))
            }
        })
        .collect();
    let failures: Vec<String> = outcomes.iter().filter_map(|o| o.as_ref().err().cloned()).collect();
    let yes = outcomes.iter().filter(|o| matches!(o, Ok((_, true)))).count();
    let eight = outcomes.iter().filter(|o| matches!(o, Ok((8, _)))).count();
    let mut d = format!(
        "{count} structures ({eight} with 8 elements), {yes} yes, {} disagreements",
        failures.len()
    );
    if !failures.is_empty() {
        d.push_str(&format!(": {}", first_failures(&failures)));
    }
    (failures.is_empty(), d)
}

// Criterion 4 -------------------------------------------------------------

fn example_table() -> AbstractionTable {
    let f = parse_formula("E X (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))", ParseOptions::default())
        .expect("fixed formula parses");
    abstract_constraints(&f).1
}

fn tree_golden() -> Verdict {
    const LABELS: [(&str, &[usize]); 15] = [
        ("e", &[]),
        ("1", &[1, 2]),
        ("2", &[1]),
        ("11", &[1, 2]),
        ("12", &[]),
        ("21", &[]),
        ("22", &[]),
        ("111", &[1]),
        ("112", &[2]),
        ("121", &[]),
        ("122", &[1]),
        ("211", &[]),
        ("212", &[2]),
        ("221", &[1, 2]),
        ("222", &[2]),
    ];
    const LESS: [(&str, &str); 6] = [
        ("e:x1", "1:x2"),
        ("e:x1", "2:x2"),
        ("1:x1", "11:x2"),
        ("11:x1", "111:x2"),
        ("12:x1", "122:x2"),
        ("22:x1", "221:x2"),
    ];
    const EQUAL: [(&str, &str); 6] = [
        ("1:x1", "1:x2"),
        ("11:x1", "11:x2"),
        ("112:x1", "112:x2"),
        ("212:x1", "212:x2"),
        ("221:x1", "221:x2"),
        ("222:x1", "222:x2"),
    ];
    let c = example_constraint_tree();
    let table = example_table();
    let t = match abstract_model(&c, &table, &ConcreteDomain::N) {
        Ok(t) => t,
        Err(e) => return (false, format!("abstraction failed: {e}")),
    };
    let mut mismatches = Vec::new();
    for (node, expected) in LABELS {
        let i = t.node_index(node).expect("example tree node");
        let got: BTreeSet<usize> = t
            .labels(i)
            .iter()
            .filter_map(|p| table.entries.iter().position(|e| &e.prop == p).map(|k| k + 1))
            .collect();
        let want: BTreeSet<usize> = expected.iter().copied().collect();
        if got != want {
            mismatches.push(format!("node {node}: {got:?} != {want:?}"));
        }
    }
    let g = match extract_constraint_graph(&t, &table, &["x1".to_string(), "x2".to_string()]) {
        Ok(g) => g,
        Err(e) => return (false, format!("extraction failed: {e}")),
    };
    for (rel, expected) in [(RelationSymbol::less(), LESS), (RelationSymbol::equal(), EQUAL)] {
        let got: BTreeSet<(String, String)> = g
            .tuples(&rel)
            .map(|t| (g.element_name(t[0]).to_string(), g.element_name(t[1]).to_string()))
            .collect();
        let want: BTreeSet<(String, String)> =
            expected.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        if got != want {
            mismatches.push(format!("{rel} edges {got:?} != {want:?}"));
        }
    }
    let ok = mismatches.is_empty();
    let d = if ok {
        "15 node label sets and 12 edges match".to_string()
    } else {
        first_failures(&mismatches)
    };
    (ok, d)
}

// Criterion 5 -------------------------------------------------------------

fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !s.contains(i)).collect()
}

fn model_checker_laws(quick: bool) -> Verdict {
    let count = if quick { 100 } else { 500 };
    let dom = ConcreteDomain::Z;
    let alpha = FormulaAlphabet::sigma0(1);
    let failures: Vec<String> = (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = seeded(55, i);
            let n = rng.gen_range(1..=6);
            let m = random_model(&mut rng, n, &["x", "y"], &["p", "q"], 3);
            let sat = |f: &StateFormula| check_ctlstar(&m, f, &dom).map_err(|e| format!("{f}: {e}"));
            let mut run = || -> Result<(), String> {
                let psi = alpha.path_formula(&mut rng, 4);
                let all = sat(&StateFormula::all(psi.clone()))?;
                let ex_neg = sat(&StateFormula::exists(PathFormula::not(psi.clone())))?;
                if all != complement(n, &ex_neg) {
                    return Err(format!("E/A duality fails for {psi}"));
                }
                let a = alpha.path_formula(&mut rng, 2);
                let b = alpha.path_formula(&mut rng, 2);
                let release = sat(&StateFormula::exists(PathFormula::release(a.clone(), b.clone())))?;
                let dual = StateFormula::exists(PathFormula::not(PathFormula::until(
                    PathFormula::not(a.clone()),
                    PathFormula::not(b.clone()),
                )));
                if release != sat(&dual)? {
                    return Err(format!("U/R duality fails for {a} R {b}"));
                }
                let f = alpha.ctl_formula(&mut rng, 4);
                let oracle = check_ctl_oracle(&m, &f, &dom).map_err(|e| format!("{f}: {e}"))?;
                if sat(&f)? != oracle {
                    return Err(format!("oracle disagrees on {f}"));
                }
                Ok(())
            };
            run().err()
        })
        .collect();
    let mut d = format!("{count} model/formula triples, {} failures", failures.len());
    if !failures.is_empty() {
        d.push_str(&format!(": {}", first_failures(&failures)));
    }
    (failures.is_empty(), d)
}

// Criterion 6 -------------------------------------------------------------

fn confirmed(f: &StateFormula, dom: &ConcreteDomain, m: &FoundModel) -> bool {
    check_ctlstar(&m.model, f, dom).is_ok_and(|s| s.contains(&m.node))
}

fn sat_suites() -> Verdict {
    let dom = ConcreteDomain::Z;
    let failures: Vec<String> = SATISFIABLE_SUITE
        .par_iter()
        .map(|s| (s, true))
        .chain(UNSATISFIABLE_SUITE.par_iter().map(|s| (s, false)))
        .filter_map(|(&(text, max_nodes, range), satisfiable)| {
            let f = match parse_formula(text, ParseOptions::default()) {
                Ok(f) => f,
                Err(e) => return Some(format!("{text}: {e}")),
            };
            let bounds = SearchBounds {
                max_nodes,
                range,
                full_sweep: false,
            };
            match (find_model(&f, &dom, &bounds), satisfiable) {
                (Err(e), _) => Some(format!("{text}: {e}")),
                (Ok(Some(m)), true) if confirmed(&f, &dom, &m) => None,
                (Ok(Some(_)), true) => Some(format!("{text}: model rejected by the checker")),
                (Ok(None), true) => Some(format!("{text}: no model found")),
                (Ok(None), false) => None,
                (Ok(Some(_)), false) => Some(format!("{text}: unexpected model")),
            }
        })
        .collect();
    let mut d = format!(
        "{} satisfiable and {} unsatisfiable formulas, {} failures",
        SATISFIABLE_SUITE.len(),
        UNSATISFIABLE_SUITE.len(),
        failures.len()
    );
    if !failures.is_empty() {
        d.push_str(&format!(": {}", first_failures(&failures)));
    }
    (failures.is_empty(), d)
}

// Criterion 7 -------------------------------------------------------------

/// Keeps only the registers named in `vars` (missing ones read as 0).
fn project(m: &ConstraintKripke, vars: &[String]) -> ctlz_core::Result<ConstraintKripke> {
    let n = m.node_count();
    let registers = (0..n)
        .map(|i| {
            vars.iter()
                .map(|v| m.var_index(v).map_or(Value::Int(0), |k| m.register(i, k).clone()))
                .collect()
        })
        .collect();
    ConstraintKripke::graph(
        m.node_names().to_vec(),
        m.successor_lists().to_vec(),
        (0..n).map(|i| m.labels(i).clone()).collect(),
        vars.to_vec(),
        registers,
    )
}

/// The search range for a formula: the largest constant magnitude, at
/// least 5.
fn constant_range(f: &StateFormula) -> i64 {
    f.relations()
        .iter()
        .filter_map(|r| r.constant_value())
        .map(|c| c.ceil().to_integer().abs().max(c.floor().to_integer().abs()))
        .max()
        .unwrap_or(0)
        .max(5)
}

fn snnf_preservation(quick: bool) -> Verdict {
    let count = if quick { 40 } else { 200 };
    let dom = ConcreteDomain::Z;
    let alpha = FormulaAlphabet::sigma0(1);
    let outcomes: Vec<Result<bool, String>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(77, i);
            let phi = StateFormula::and(alpha.nnf_formula(&mut rng, 3, 1), alpha.nnf_formula(&mut rng, 3, 1));
            let snnf = to_snnf(&phi, &dom).map_err(|e| format!("{phi}: {e}"))?;
            let bounds = SearchBounds {
                max_nodes: 3,
                range: constant_range(&phi),
                full_sweep: true,
            };
            let direct = find_model(&phi, &dom, &bounds).map_err(|e| format!("{phi}: {e}"))?;
            let strong = find_model(&snnf, &dom, &bounds).map_err(|e| format!("{snnf}: {e}"))?;
            if direct.is_some() != strong.is_some() {
                return Err(format!(
                    "{phi}: model {} but snnf model {}",
                    direct.is_some(),
                    strong.is_some()
                ));
            }
            if let Some(m) = &strong {
                let p = project(&m.model, &phi.variables()).map_err(|e| format!("{phi}: {e}"))?;
                if !check_ctlstar(&p, &phi, &dom).is_ok_and(|s| s.contains(&m.node)) {
                    return Err(format!("{phi}: projected snnf model fails"));
                }
            }
            Ok(direct.is_some())
        })
        .collect();
    let failures: Vec<String> = outcomes.iter().filter_map(|o| o.as_ref().err().cloned()).collect();
    let sat = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    let mut d = format!(
        "{count} formulas (up to 3 nodes, range ≥ 5, full sweep), {sat} satisfiable, {} failures",
        failures.len()
    );
    if !failures.is_empty() {
        d.push_str(&format!(": {}", first_failures(&failures)));
    }
    (failures.is_empty(), d)
}

// Criterion 8 -------------------------------------------------------------

fn integer_rational_contrast() -> Verdict {
    let build = || -> ctlz_core::Result<SigmaStructure> {
        let mut a = SigmaStructure::new(["a", "x", "b"])?;
        a.add_named(&RelationSymbol::int_constant(0), &["a"])?;
        a.add_named(&RelationSymbol::int_constant(1), &["b"])?;
        a.add_named(&RelationSymbol::less(), &["a", "x"])?;
        a.add_named(&RelationSymbol::less(), &["x", "b"])?;
        Ok(a)
    };
    let run = || -> ctlz_core::Result<Verdict> {
        let a = build()?;
        let z = decide_hom(&a, Target::Z)?;
        let q = decide_hom(&a, Target::Q)?;
        let z_code = z.reason.as_ref().map(|r| r.code());
        let z_ok = !z.exists && z_code == Some("bounded_infeasible");
        let q_ok = match &q.witness {
            Some(w) => q.exists && verify_hom(&a, w, Target::Q)?,
            None => false,
        };
        let shown = q
            .witness
            .as_ref()
            .map(|w| w.iter().map(Value::to_string).collect::<Vec<_>>().join(", "))
            .unwrap_or_default();
        Ok((
            z_ok && q_ok,
            format!("Z: {} ({}), Q: {} [{shown}]", z.exists, z_code.unwrap_or("-"), q.exists),
        ))
    };
    run().unwrap_or_else(|e| (false, format!("error: {e}")))
}

// Criterion 9 -------------------------------------------------------------

fn interpretation_round_trip(quick: bool) -> Verdict {
    let (lex_count, allen_count) = if quick { (5, 3) } else { (20, 10) };
    let lex = match lex_interpretation(2) {
        Ok(i) => i,
        Err(e) => return (false, format!("lex interpretation: {e}")),
    };
    let allen = match allen_interpretation() {
        Ok(i) => i,
        Err(e) => return (false, format!("Allen interpretation: {e}")),
    };
    let lex_alpha = FormulaAlphabet {
        props: vec!["p".into()],
        vars: vec!["x".into(), "y".into()],
        unary: Vec::new(),
        binary: vec![RelationSymbol::named("ltlex", 2).expect("name"), RelationSymbol::equal()],
        max_offset: 1,
    };
    let allen_alpha = FormulaAlphabet {
        props: vec!["p".into()],
        vars: vec!["x".into(), "y".into()],
        unary: Vec::new(),
        binary: ["before", "meets", "overlaps", "during", "starts", "finishes"]
            .iter()
            .map(|r| RelationSymbol::named(r, 2).expect("name"))
            .collect(),
        max_offset: 1,
    };
    let jobs: Vec<(usize, &FormulaAlphabet, &_, ConcreteDomain)> = (0..lex_count)
        .map(|i| (i, &lex_alpha, &lex, ConcreteDomain::LexZ(2)))
        .chain((0..allen_count).map(|i| (1000 + i, &allen_alpha, &allen, ConcreteDomain::AllenZ)))
        .collect();
    let bounds = SearchBounds {
        max_nodes: 3,
        range: 2,
        full_sweep: true,
    };
    let outcomes: Vec<Result<bool, String>> = jobs
        .par_iter()
        .map(|(i, alpha, interp, dom)| {
            let mut rng = seeded(99, *i);
            // negated relations with existential definitions cannot be
            // translated, so redraw until the formula is accepted
            let (phi, translated) = loop {
                let phi = to_nnf(&StateFormula::and(alpha.ctlstar_formula(&mut rng, 3), alpha.ctlstar_formula(&mut rng, 3)));
                if phi.constraints().is_empty() {
                    continue;
                }
                if let Ok(t) = apply_interpretation(interp, &phi) {
                    break (phi, t);
                }
            };
            let direct = find_model(&phi, dom, &bounds).map_err(|e| format!("{phi}: {e}"))?;
            let reduced = find_model(&translated, &interp.target, &bounds).map_err(|e| format!("{translated}: {e}"))?;
            if let Some(m) = &direct {
                if !confirmed(&phi, dom, m) {
                    return Err(format!("{phi}: direct model rejected by the checker"));
                }
            }
            if let Some(m) = &reduced {
                if !confirmed(&translated, &interp.target, m) {
                    return Err(format!("{translated}: translated model rejected by the checker"));
                }
            }
            if direct.is_some() == reduced.is_some() {
                Ok(direct.is_some())
            } else {
                Err(format!("{phi} on {dom}: direct {} but translated {}", direct.is_some(), reduced.is_some()))
            }
        })
        .collect();
    let failures: Vec<String> = outcomes.iter().filter_map(|o| o.as_ref().err().cloned()).collect();
    let sat = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    let mut d = format!(
        "{lex_count} lexZ[2] and {allen_count} allenZ formulas, {sat} satisfiable, {} disagreements",
        failures.len()
    );
    if !failures.is_empty() {
        d.push_str(&format!(": {}", first_failures(&failures)));
    }
    (failures.is_empty(), d)
}

// Criterion 10 ------------------------------------------------------------

fn reduction_harness(quick: bool) -> Verdict {
    let count = if quick { 200 } else { 1_000 };
    let dom = ConcreteDomain::Z;
    let alpha = FormulaAlphabet::sigma0(1);
    let outcomes: Vec<Result<bool, String>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(1010, i);
            let f = loop {
                let f = match to_snnf(&to_nnf(&alpha.next_only_formula(&mut rng, 4)), &dom) {
                    Ok(f) => f,
                    Err(e) => return Err(e.to_string()),
                };
                if required_depth(&f).is_ok_and(|d| d <= 2) {
                    break f;
                }
            };
            let c = random_tree(&mut rng, 2, 2, &["x", "y"], &["p", "q"], 3);
            let r = reduction_consistency(&c, &f, &dom).map_err(|e| format!("{f}: {e}"))?;
            if r.violations.is_empty() {
                Ok(r.abstract_holds && r.hom_exists)
            } else {
                Err(format!("{f}: {}", r.violations.join(", ")))
            }
        })
        .collect();
    let failures: Vec<String> = outcomes.iter().filter_map(|o| o.as_ref().err().cloned()).collect();
    let backward = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    let mut d = format!(
        "{count} trees of depth 2, {backward} exercised the backward direction, {} violations",
        failures.len()
    );
    if !failures.is_empty() {
        d.push_str(&format!(": {}", first_failures(&failures)));
    }
    (failures.is_empty(), d)
}

