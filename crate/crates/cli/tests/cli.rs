use std::fs;
use std::path::PathBuf;

use ctlz::format::{parse_model, parse_structure, write_model, write_structure};
use ctlz::run;
use ctlz_core::domain::ConcreteDomain;
use ctlz_core::formula::{parse_formula, ParseOptions};
use ctlz_core::modelcheck::check_ctlstar;
use serde_json::Value as Json;
use tempfile::TempDir;

struct Outcome {
    code: u8,
    out: String,
    err: String,
}

fn ctlz(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("ctlz").chain(args.iter().copied()), &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str]) -> (u8, Json) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = ctlz(&full);
    let v = serde_json::from_str(&o.out).unwrap_or_else(|e| panic!("{e}: {} {}", o.out, o.err));
    (o.code, v)
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CYCLE: &str = "ELEMENTS\na\nb\nRELATION lt\na b\nb a\n";

const CHAIN: &str = "\
ELEMENTS
a
x
b
RELATION eqc[0]
a
RELATION eqc[1]
b
RELATION lt
a x
x b
";

const LOOP_MODEL: &str = "\
VARS x
SHAPE graph
NODES
s0
s1
EDGES
s0 s1
s1 s1
LABELS
s0 p
REGISTERS
s0 x 0
s1 x 3
";

#[test]
fn homcheck_reports_a_cycle() {
    let dir = TempDir::new().unwrap();
    let s = file(&dir, "cycle.txt", CYCLE);
    let o = ctlz(&["homcheck", "--structure", &s, "--target", "Z"]);
    assert_eq!(o.code, 1);
    assert!(o.out.starts_with("no: cycle"), "{}", o.out);
    let (code, v) = json(&["homcheck", "--structure", &s, "--target", "Z"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "no");
    assert_eq!(v["reason"]["code"], "cycle");
    assert!(v["witness"].is_null());
}

#[test]
fn homcheck_witnesses_follow_declaration_order() {
    let dir = TempDir::new().unwrap();
    let s = file(&dir, "chain.txt", CHAIN);
    let (code, v) = json(&["homcheck", "--structure", &s, "--target", "Q"]);
    assert_eq!(code, 0);
    let w = v["witness"].as_array().unwrap();
    let names: Vec<&str> = w.iter().map(|p| p[0].as_str().unwrap()).collect();
    assert_eq!(names, ["a", "x", "b"]);
    assert_eq!(w[0][1], "0");
    assert_eq!(w[2][1], "1");
    let (code, v) = json(&["homcheck", "--structure", &s, "--target", "Z"]);
    assert_eq!(code, 1);
    assert_eq!(v["reason"]["code"], "bounded_infeasible");
}

#[test]
fn json_output_is_deterministic_with_sorted_keys() {
    let dir = TempDir::new().unwrap();
    let s = file(&dir, "chain.txt", CHAIN);
    let a = ctlz(&["--json", "homcheck", "--structure", &s, "--target", "Q"]).out;
    let b = ctlz(&["--json", "homcheck", "--structure", &s, "--target", "Q"]).out;
    assert_eq!(a, b);
    let (r, v, w) = (a.find("\"reason\"").unwrap(), a.find("\"verdict\"").unwrap(), a.find("\"witness\"").unwrap());
    assert!(r < v && v < w);
}

#[test]
fn brute_force_agrees_on_the_chain() {
    let dir = TempDir::new().unwrap();
    let s = file(&dir, "chain.txt", CHAIN);
    assert_eq!(ctlz(&["brutehom", "--structure", &s, "--target", "Z"]).code, 1);
    assert_eq!(ctlz(&["brutehom", "--structure", &s, "--target", "Q"]).code, 0);
    let c = file(&dir, "c.txt", "ELEMENTS\na\nb\nRELATION lt\na b\n");
    let (code, v) = json(&["brutehom", "--structure", &c, "--bound", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"], serde_json::json!([["a", "-1"], ["b", "0"]]));
}

#[test]
fn snnf_of_a_negated_equality() {
    let o = ctlz(&["snnf", "--formula", "~eq(x, X^1 y)", "--domain", "Z"]);
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(o.out.trim(), "lt(x, X^1 y) | lt(X^1 y, x)");
}

#[test]
fn formula_commands_accept_files() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "f.ctl", "~E G (p & lt(x, X^1 x))\n");
    let o = ctlz(&["nnf", "--formula", &f]);
    assert_eq!(o.out.trim(), "A F (~p | ~lt(x, X^1 x))");
    let o = ctlz(&["snnf", "--formula", &f]);
    assert_eq!(o.out.trim(), "A F (~p | (lt(X^1 x, x) | eq(x, X^1 x)))");
    let (_, v) = json(&["parse", "--formula", "E X p & A G q"]);
    assert_eq!(v["formula"], "E X p & A G q");
    assert_eq!(v["e_count"], 2);
}

#[test]
fn abstraction_and_extraction_of_a_tree() {
    let dir = TempDir::new().unwrap();
    let tree = "\
VARS x
SHAPE tree 1 2
NODES
e
1
2
REGISTERS
e x 0
1 x 5
2 x -1
";
    let t = file(&dir, "tree.txt", tree);
    let o = ctlz(&["abstract", "--formula", "E X lt(x, X^1 x)", "--model", &t]);
    assert_eq!(o.code, 0, "{}", o.err);
    let mut lines = o.out.lines();
    assert_eq!(lines.next(), Some("E X X __p0"));
    assert_eq!(lines.next(), Some("# __p0 := lt(x, X^1 x) (depth 1)"));
    let labelled_text: String = lines.map(|l| format!("{l}\n")).collect();
    let labelled = parse_model(&labelled_text, true).unwrap();
    let one = labelled.node_index("1").unwrap();
    assert!(labelled.labels(one).contains("__p0"));
    assert!(labelled.labels(labelled.node_index("2").unwrap()).is_empty());

    let lt = file(&dir, "labelled.txt", &labelled_text);
    let o = ctlz(&["extract", "--model", &lt, "--formula", "E X lt(x, X^1 x)"]);
    assert_eq!(o.code, 0, "{}", o.err);
    let g = parse_structure(&o.out).unwrap();
    assert_eq!(g.elements(), ["e:x", "1:x", "2:x"]);
    assert_eq!(g.tuple_count(), 1);
}

#[test]
fn model_checking_lists_satisfying_nodes() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.txt", LOOP_MODEL);
    let (code, v) = json(&["mc", "--model", &m, "--formula", "E X G eqc[3](x)"]);
    assert_eq!(code, 0);
    assert_eq!(v["satisfying"], serde_json::json!(["s0", "s1"]));
    let o = ctlz(&["mc", "--model", &m, "--formula", "p & E lt(x, X^1 x)"]);
    assert_eq!(o.out.trim(), "satisfying: s0");
}

#[test]
fn sat_prints_a_checkable_model() {
    let o = ctlz(&["sat", "--formula", "E F eqc[5](x)", "--max-nodes", "2", "--range", "5"]);
    assert_eq!(o.code, 0, "{}", o.err);
    let m = parse_model(&o.out, false).unwrap();
    let f = parse_formula("E F eqc[5](x)", ParseOptions::default()).unwrap();
    assert!(check_ctlstar(&m, &f, &ConcreteDomain::Z).unwrap().contains(&0));

    let o = ctlz(&["sat", "--formula", "E lt(x, x)", "--max-nodes", "2", "--range", "3"]);
    assert_eq!(o.code, 1);
    assert_eq!(o.out.trim(), "NO-MODEL-WITHIN-BOUNDS");
}

#[test]
fn sat_result_does_not_depend_on_threads() {
    let f = "E (lt(x, X^1 y) U eqc[7](y)) & A X ~p";
    let one = ctlz(&["--threads", "1", "sat", "--formula", f, "--max-nodes", "3", "--range", "7"]);
    let four = ctlz(&["--threads", "4", "sat", "--formula", f, "--max-nodes", "3", "--range", "7"]);
    assert_eq!(one.code, 0, "{}", one.err);
    assert_eq!(one.out, four.out);
}

#[test]
fn mso_emission_and_evaluation() {
    let dir = TempDir::new().unwrap();
    let sentence = ctlz(&["emit-mso", "--signature", "lt,eq", "--target", "Z"]);
    assert_eq!(sentence.code, 0, "{}", sentence.err);
    let sf = file(&dir, "hom.mso", &sentence.out);
    let cyc = file(&dir, "cycle.txt", CYCLE);
    assert_eq!(ctlz(&["eval-mso", "--structure", &cyc, "--sentence", &sf]).code, 1);
    let ok = file(&dir, "ok.txt", "ELEMENTS\na\nb\nRELATION lt\na b\n");
    let o = ctlz(&["eval-mso", "--structure", &ok, "--sentence", &sf]);
    assert_eq!((o.code, o.out.trim()), (0, "true"));

    let (_, v) = json(&["emit-mso", "--structure", &cyc, "--target", "N"]);
    assert!(v["size"].as_u64().unwrap() > 0);
    assert!(v["sentence"].as_str().unwrap().starts_with('('));
}

#[test]
fn interpretation_into_the_integers() {
    let o = ctlz(&["interp", "--formula", "E ltlex(x, X^1 x)", "--domain", "lexZ[2]", "--max-nodes", "2"]);
    assert_eq!(o.code, 0, "{}", o.err);
    assert!(o.out.starts_with("E (lt(x_1, X^1 x_1) | eq(x_1, X^1 x_1) & lt(x_2, X^1 x_2))"), "{}", o.out);
    assert!(o.out.contains("direct search: true, translated search: true"));
    let o = ctlz(&["interp", "--formula", "E lt(x, y)", "--domain", "Z"]);
    assert_eq!(o.code, 2);
}

#[test]
fn file_formats_round_trip() {
    let m = parse_model(LOOP_MODEL, false).unwrap();
    let text = write_model(&m);
    assert_eq!(parse_model(&text, false).unwrap(), m);
    assert_eq!(write_model(&parse_model(&text, false).unwrap()), text);

    let s = parse_structure(CHAIN).unwrap();
    let text = write_structure(&s);
    let back = parse_structure(&text).unwrap();
    assert_eq!(back.elements(), s.elements());
    assert_eq!(back.signature(), s.signature());
    assert_eq!(write_structure(&back), text);
}

#[test]
fn full_binary_tree_of_depth_three() {
    let mut text = String::from("VARS x\nSHAPE tree 3 2\nNODES\n");
    let words = ctlz_core::kripke::tree_words(2, 3);
    for w in &words {
        text.push_str(&ctlz_core::kripke::word_name(w));
        text.push('\n');
    }
    text.push_str("REGISTERS\n");
    for w in &words {
        text.push_str(&format!("{} x 0\n", ctlz_core::kripke::word_name(w)));
    }
    let t = parse_model(&text, false).unwrap();
    assert_eq!(t.node_count(), 15);
    assert_eq!(t.successors(t.node_index("12").unwrap()).len(), 2);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.txt", "ELEMENTS\na\nRELATION lt\na\n");
    let o = ctlz(&["homcheck", "--structure", &bad]);
    assert_eq!(o.code, 2);
    assert!(o.err.starts_with("error:"), "{}", o.err);
    assert_eq!(ctlz(&["frobnicate"]).code, 2);
    assert_eq!(ctlz(&["homcheck", "--structure", "/no/such/file"]).code, 2);
    assert_eq!(ctlz(&["parse", "--formula", "E (p"]).code, 2);
    let m = file(&dir, "m.txt", "VARS x\nSHAPE graph\nNODES\na\nEDGES\na b\n");
    assert_eq!(ctlz(&["mc", "--model", &m, "--formula", "p"]).code, 2);
    assert_eq!(ctlz(&["sat", "--formula", "p", "--max-nodes", "9"]).code, 2);
}

#[test]
fn help_and_version_succeed() {
    let o = ctlz(&["--help"]);
    assert_eq!(o.code, 0);
    assert!(o.out.contains("homcheck"));
    assert_eq!(ctlz(&["--version"]).code, 0);
}

#[test]
fn quick_selftest_passes() {
    let o = ctlz(&["selftest", "--quick", "--only", "4,6,8"]);
    assert_eq!(o.code, 0, "{}", o.out);
    assert_eq!(o.out.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}
