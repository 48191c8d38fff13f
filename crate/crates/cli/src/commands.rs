//! The `ctlz` subcommands.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use ctlz_core::domain::{allen_interpretation, apply_interpretation, lex_interpretation, ConcreteDomain, Value};
use ctlz_core::formula::{
    abstract_constraints, count_e, parse_formula, parse_path_formula, to_nnf, to_snnf, CountMode, ParseOptions,
    RelationSymbol, StateFormula,
};
use ctlz_core::homcheck::{brute_force_hom, decide_hom, witness_bound, Target};
use ctlz_core::kripke::{abstract_model, extract_constraint_graph};
use ctlz_core::modelcheck::check_ctlstar;
use ctlz_core::mso::{classify, emit_hom_sentence, eval_finite_with, parse_mso, pretty, Assignment, EvalOptions, HomTarget};
use ctlz_core::satsearch::{candidate_graphs, FoundModel, Prepared, SearchBounds};
use ctlz_core::structure::SigmaStructure;

use crate::format::{parse_model, parse_structure, write_model, write_structure};
use crate::selftest;

/// Printed by `sat` when the search space holds no model.
pub const NO_MODEL: &str = "NO-MODEL-WITHIN-BOUNDS";

#[derive(Parser, Debug)]
#[command(name = "ctlz", version, about = "CTL* with integer constraints: rewriting, homomorphism checks, model checking and bounded search")]
struct Cli {
    /// Print structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for `sat` and `selftest` (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FormulaArg {
    /// Formula text, or a path to a file containing it.
    #[arg(long)]
    formula: String,
}

#[derive(Args, Debug)]
struct DomainArg {
    /// Z, N, negZ, Q, allenZ or lexZ[n].
    #[arg(long, default_value = "Z")]
    domain: String,
}

#[derive(Args, Debug)]
struct StructureArgs {
    #[arg(long)]
    structure: PathBuf,
    /// Z, N, negZ or Q.
    #[arg(long, default_value = "Z")]
    target: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print it in canonical form.
    Parse(FormulaArg),
    /// Negation normal form.
    Nnf(FormulaArg),
    /// Strong negation normal form: no negated constraints.
    Snnf {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        domain: DomainArg,
    },
    /// Replace constraints by fresh propositions; with a tree model, also
    /// label the tree accordingly.
    Abstract {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        domain: DomainArg,
    },
    /// Extract the constraint graph of a labelled tree.
    Extract {
        /// Tree whose labels use the propositions of the formula's abstraction.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Decide whether a structure maps homomorphically into the target.
    Homcheck(StructureArgs),
    /// Exhaustive homomorphism search over a bounded value range.
    Brutehom {
        #[command(flatten)]
        structure: StructureArgs,
        /// Largest absolute value tried (default: the witness bound).
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Emit the MSO / WMSO+B sentence describing homomorphism existence.
    EmitMso {
        /// Take the signature from this structure.
        #[arg(long, conflicts_with = "signature")]
        structure: Option<PathBuf>,
        /// Comma-separated relation symbols, e.g. "lt,eq,eqc[0],mod[1,2]".
        #[arg(long)]
        signature: Option<String>,
        /// Z, N, negZ or Zorder.
        #[arg(long, default_value = "Z")]
        target: String,
    },
    /// Evaluate an MSO sentence on a finite structure.
    EvalMso {
        #[arg(long)]
        structure: PathBuf,
        /// Sentence text, or a path to a file containing it.
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        max_elements: Option<usize>,
        /// Record the largest witness of every bounding quantifier.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Model-check a formula on a finite model.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        domain: DomainArg,
    },
    /// Bounded search for a model.
    Sat {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        domain: DomainArg,
        #[arg(long, default_value_t = 2)]
        max_nodes: usize,
        #[arg(long, default_value_t = 3)]
        range: i64,
        /// Try every value in the range instead of the generator set.
        #[arg(long)]
        full_sweep: bool,
    },
    /// Translate a formula over allenZ or lexZ[n] into one over Z.
    Interp {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        domain: DomainArg,
        /// Also search for models of both formulas with these node bounds.
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long, default_value_t = 2)]
        range: i64,
    },
    /// Run the acceptance suites.
    Selftest {
        /// Scaled-down corpora for a fast smoke run.
        #[arg(long)]
        quick: bool,
        /// Comma-separated criterion numbers to run.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

/// Runs the command line `args` and returns the exit code: 0 when the
/// command completed with a positive answer, 1 for a negative verdict and
/// 2 for usage or input errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(Outcome::Positive) => 0,
        Ok(Outcome::Negative) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    fn from(b: bool) -> Outcome {
        if b {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn text_or_file(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        read_file(p)
    } else {
        Ok(arg.to_string())
    }
}

/// A parsed formula; bare path formulas such as `~eq(x, X^1 y)` are kept
/// under an `E` and printed without it.
struct Input {
    formula: StateFormula,
    bare_path: bool,
}

impl Input {
    fn read(arg: &FormulaArg, allow_reserved: bool) -> Result<Input> {
        let text = text_or_file(&arg.formula)?;
        let opts = ParseOptions { allow_reserved };
        match parse_formula(&text, opts) {
            Ok(f) => Ok(Input {
                formula: f,
                bare_path: false,
            }),
            Err(state_err) => match parse_path_formula(&text, opts) {
                Ok(p) => Ok(Input {
                    formula: StateFormula::exists(p),
                    bare_path: true,
                }),
                Err(_) => Err(state_err.into()),
            },
        }
    }

    fn show(&self, f: &StateFormula) -> String {
        match f {
            StateFormula::Exists(p) if self.bare_path => p.to_string(),
            _ => f.to_string(),
        }
    }
}

fn domain(name: &str) -> Result<ConcreteDomain> {
    Ok(ConcreteDomain::from_name(name)?)
}

fn target(name: &str) -> Result<Target> {
    Ok(Target::from_name(name)?)
}

fn emit(out: &mut dyn Write, json_mode: bool, value: Json, text: impl FnOnce() -> String) -> Result<()> {
    if json_mode {
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        let t = text();
        write!(out, "{t}")?;
        if !t.ends_with('\n') {
            writeln!(out)?;
        }
    }
    Ok(())
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            bail!("--threads must be at least 1");
        }
        b = b.num_threads(k);
    }
    Ok(b.build()?)
}

/// Searches candidate graphs in parallel, keeping the first model in
/// search order.
pub fn parallel_find_model(
    f: &StateFormula,
    dom: &ConcreteDomain,
    bounds: &SearchBounds,
    threads: Option<usize>,
) -> Result<Option<FoundModel>> {
    let prepared = Prepared::new(f, dom, bounds)?;
    let graphs = candidate_graphs(bounds.max_nodes)?;
    let found = pool(threads)?.install(|| {
        graphs
            .par_iter()
            .map(|g| prepared.search_graph(g))
            .find_map_first(|r| r.transpose())
    });
    Ok(found.transpose()?)
}

fn formula_json(f: &StateFormula, shown: String) -> Json {
    json!({
        "formula": shown,
        "variables": f.variables(),
        "propositions": f.propositions(),
        "size": f.size(),
    })
}

fn witness_json(a: &SigmaStructure, w: &[Value]) -> Json {
    Json::Array(
        a.elements()
            .iter()
            .zip(w)
            .map(|(e, v)| json!([e, v.to_string()]))
            .collect(),
    )
}

fn witness_text(a: &SigmaStructure, w: &[Value]) -> String {
    a.elements()
        .iter()
        .zip(w)
        .map(|(e, v)| format!("  {e} = {v}\n"))
        .collect()
}

fn split_signature(s: &str) -> Result<BTreeSet<RelationSymbol>> {
    let mut parts = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            parts.push(std::mem::take(&mut cur));
        } else if !c.is_whitespace() {
            cur.push(c);
        }
    }
    parts.push(cur);
    parts
        .into_iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            RelationSymbol::from_name(&p, 1)
                .or_else(|_| RelationSymbol::from_name(&p, 2))
                .map_err(|_| anyhow!("unknown relation symbol `{p}`"))
        })
        .collect()
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let j = cli.json;
    match &cli.command {
        Command::Parse(arg) => {
            let input = Input::read(arg, false)?;
            let shown = input.show(&input.formula);
            let mut v = formula_json(&input.formula, shown.clone());
            v["e_count"] = json!(count_e(&input.formula, CountMode::default()));
            emit(out, j, v, || shown)?;
        }
        Command::Nnf(arg) => {
            let input = Input::read(arg, false)?;
            let n = to_nnf(&input.formula);
            let shown = input.show(&n);
            emit(out, j, formula_json(&n, shown.clone()), || shown)?;
        }
        Command::Snnf { formula, domain: d } => {
            let input = Input::read(formula, false)?;
            let s = to_snnf(&to_nnf(&input.formula), &domain(&d.domain)?)?;
            let shown = input.show(&s);
            emit(out, j, formula_json(&s, shown.clone()), || shown)?;
        }
        Command::Abstract {
            formula,
            model,
            domain: d,
        } => {
            let input = Input::read(formula, false)?;
            let (a, table) = abstract_constraints(&input.formula);
            let labelled = match model {
                Some(path) => {
                    let tree = parse_model(&read_file(path)?, false)?;
                    Some(abstract_model(&tree, &table, &domain(&d.domain)?)?)
                }
                None => None,
            };
            let entries: Vec<Json> = table
                .entries
                .iter()
                .map(|e| json!({"prop": e.prop, "constraint": e.constraint.to_string(), "depth": e.depth()}))
                .collect();
            let shown = input.show(&a);
            let v = json!({
                "formula": shown,
                "table": entries,
                "model": labelled.as_ref().map(write_model),
            });
            emit(out, j, v, || {
                let mut t = format!("{shown}\n");
                for e in &table.entries {
                    t.push_str(&format!("# {} := {} (depth {})\n", e.prop, e.constraint, e.depth()));
                }
                if let Some(m) = &labelled {
                    t.push_str(&write_model(m));
                }
                t
            })?;
        }
        Command::Extract { model, formula } => {
            let input = Input::read(formula, false)?;
            let (_, table) = abstract_constraints(&input.formula);
            let tree = parse_model(&read_file(model)?, true)?;
            let vars = tree.vars().to_vec();
            let g = extract_constraint_graph(&tree, &table, &vars)?;
            let relations: serde_json::Map<String, Json> = g
                .relations()
                .map(|(r, ts)| {
                    let tuples: Vec<Vec<&str>> =
                        ts.iter().map(|t| t.iter().map(|&i| g.element_name(i)).collect()).collect();
                    (r.to_string(), json!(tuples))
                })
                .collect();
            let v = json!({"elements": g.elements(), "relations": relations});
            emit(out, j, v, || write_structure(&g))?;
        }
        Command::Homcheck(args) => {
            let a = parse_structure(&read_file(&args.structure)?)?;
            let t = target(&args.target)?;
            let d = decide_hom(&a, t)?;
            let v = json!({
                "verdict": if d.exists { "yes" } else { "no" },
                "witness": d.witness.as_ref().map(|w| witness_json(&a, w)),
                "reason": d.reason.as_ref().map(|r| json!({"code": r.code(), "description": r.describe(&a)})),
            });
            emit(out, j, v, || match (&d.witness, &d.reason) {
                (Some(w), _) => format!("yes\n{}", witness_text(&a, w)),
                (None, Some(r)) => format!("no: {} ({})\n", r.code(), r.describe(&a)),
                (None, None) => "no\n".to_string(),
            })?;
            return Ok(Outcome::from(d.exists));
        }
        Command::Brutehom { structure, bound } => {
            let a = parse_structure(&read_file(&structure.structure)?)?;
            let t = target(&structure.target)?;
            let k = match bound {
                Some(k) => *k,
                None => witness_bound(&a)?,
            };
            let w = brute_force_hom(&a, k, t)?;
            let v = json!({
                "verdict": if w.is_some() { "yes" } else { "no" },
                "bound": k,
                "witness": w.as_ref().map(|w| witness_json(&a, w)),
            });
            emit(out, j, v, || match &w {
                Some(w) => format!("yes (values within ±{k})\n{}", witness_text(&a, w)),
                None => format!("no homomorphism with values within ±{k}\n"),
            })?;
            return Ok(Outcome::from(w.is_some()));
        }
        Command::EmitMso {
            structure,
            signature,
            target,
        } => {
            let sig = match (structure, signature) {
                (Some(p), _) => parse_structure(&read_file(p)?)?.signature(),
                (None, Some(s)) => split_signature(s)?,
                (None, None) => bail!("give either --structure or --signature"),
            };
            let t = match target.as_str() {
                "Z" => HomTarget::Z,
                "N" => HomTarget::N,
                "negZ" => HomTarget::NegZ,
                "Zorder" => HomTarget::ZOrder,
                other => bail!("unknown sentence target `{other}` (expected Z, N, negZ or Zorder)"),
            };
            let f = emit_hom_sentence(&sig, t)?;
            let v = json!({
                "sentence": f.to_string(),
                "size": f.size(),
                "classification": format!("{:?}", classify(&f)),
            });
            emit(out, j, v, || pretty(&f))?;
        }
        Command::EvalMso {
            structure,
            sentence,
            max_elements,
            diagnostics,
        } => {
            let a = parse_structure(&read_file(structure)?)?;
            let f = parse_mso(&text_or_file(sentence)?)?;
            let mut opts = EvalOptions {
                bound_diagnostics: *diagnostics,
                ..EvalOptions::default()
            };
            if let Some(m) = max_elements {
                opts.max_elements = *m;
            }
            let (b, stats) = eval_finite_with(&f, &a, &Assignment::new(), &opts)?;
            let v = json!({
                "verdict": b,
                "set_search_nodes": stats.set_search_nodes,
                "bound_evaluations": stats.bound_evaluations,
                "max_bound_witness": stats.max_bound_witness,
            });
            emit(out, j, v, || {
                let mut t = format!("{b}\n");
                if let Some(w) = stats.max_bound_witness {
                    t.push_str(&format!("# largest bounded-quantifier witness: {w}\n"));
                }
                t
            })?;
            return Ok(Outcome::from(b));
        }
        Command::Mc {
            model,
            formula,
            domain: d,
        } => {
            let m = parse_model(&read_file(model)?, false)?;
            let input = Input::read(formula, false)?;
            let sat = check_ctlstar(&m, &input.formula, &domain(&d.domain)?)?;
            let names: Vec<&str> = sat.iter().map(|&i| m.node_name(i)).collect();
            let v = json!({"satisfying": names});
            emit(out, j, v, || format!("satisfying: {}", names.join(" ")))?;
        }
        Command::Sat {
            formula,
            domain: d,
            max_nodes,
            range,
            full_sweep,
        } => {
            let input = Input::read(formula, false)?;
            let bounds = SearchBounds {
                max_nodes: *max_nodes,
                range: *range,
                full_sweep: *full_sweep,
            };
            let found = parallel_find_model(&input.formula, &domain(&d.domain)?, &bounds, cli.threads)?;
            let v = match &found {
                Some(m) => json!({"verdict": "model", "node": m.model.node_name(m.node), "model": write_model(&m.model)}),
                None => json!({"verdict": NO_MODEL}),
            };
            emit(out, j, v, || match &found {
                Some(m) => format!("# satisfied at {}\n{}", m.model.node_name(m.node), write_model(&m.model)),
                None => NO_MODEL.to_string(),
            })?;
            return Ok(Outcome::from(found.is_some()));
        }
        Command::Interp {
            formula,
            domain: d,
            max_nodes,
            range,
        } => {
            let input = Input::read(formula, false)?;
            let dom = domain(&d.domain)?;
            let interp = match dom {
                ConcreteDomain::AllenZ => allen_interpretation()?,
                ConcreteDomain::LexZ(n) => lex_interpretation(n)?,
                other => bail!("no interpretation into Z is provided for {other}"),
            };
            let translated = apply_interpretation(&interp, &input.formula)?;
            let shown = translated.to_string();
            let mut v = json!({"formula": shown});
            let mut agree = true;
            let mut summary = String::new();
            if let Some(n) = max_nodes {
                let bounds = SearchBounds {
                    max_nodes: *n,
                    range: *range,
                    full_sweep: true,
                };
                let direct = parallel_find_model(&input.formula, &dom, &bounds, cli.threads)?.is_some();
                let reduced =
                    parallel_find_model(&translated, &interp.target, &bounds, cli.threads)?.is_some();
                agree = direct == reduced;
                v["direct_model"] = json!(direct);
                v["translated_model"] = json!(reduced);
                summary = format!("# direct search: {direct}, translated search: {reduced}\n");
            }
            emit(out, j, v, || format!("{shown}\n{summary}"))?;
            return Ok(Outcome::from(agree));
        }
        Command::Selftest { quick, only } => {
            let cfg = selftest::Config {
                quick: *quick,
                threads: cli.threads,
                only: only.clone(),
            };
            let results = selftest::run_all(&cfg, &mut |r| {
                if !j {
                    let _ = writeln!(out, "{}", r.line());
                }
            });
            if j {
                let v: Vec<Json> = results
                    .iter()
                    .map(|r| json!({"criterion": r.id, "name": r.name, "passed": r.passed, "detail": r.detail}))
                    .collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            }
            return Ok(Outcome::from(results.iter().all(|r| r.passed)));
        }
    }
    Ok(Outcome::Positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctlz_core::formula::PathFormula;

    #[test]
    fn signature_lists_keep_bracketed_commas() {
        let s = split_signature("lt, eq,mod[1,2], eqc[0]").unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.contains(&RelationSymbol::modulo(1, 2).unwrap()));
        assert!(split_signature("lt,frob[").is_err());
    }

    #[test]
    fn bare_path_formulas_print_without_quantifier() {
        let i = Input::read(&FormulaArg { formula: "~eq(x, X^1 y)".into() }, false).unwrap();
        assert!(i.bare_path);
        assert_eq!(i.show(&i.formula), "~eq(x, X^1 y)");
        let p: PathFormula = match &i.formula {
            StateFormula::Exists(p) => (**p).clone(),
            _ => unreachable!(),
        };
        assert!(matches!(p, PathFormula::Not(_)));
    }
}
