//! `bunkbed-lab`: batch front end for the bunkbed verification library.
//!
//! Every subcommand prints JSON on stdout (or JSON lines for `run` and
//! `search`) and reports problems on stderr. Exit codes: 0 ok, 1 violation
//! in a theorem suite or failed replay, 2 bad input, 3 time budget exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bunkbed_core::closedform::{all_term_ratios, asymptotic_reference, BoundedRatio, ClosedFormTerms};
use bunkbed_core::graph::io::GraphFile;
use bunkbed_core::graph::{BaseGraph, BunkbedGraph, CapacitatedNetwork, Layer, WeightRole};
use bunkbed_core::harness::{exit_code, question_search, replay, run_suite_to, ExperimentConfig, Family, HarnessError, Question, Suite};
use bunkbed_core::maxflow::{max_flow, verify_flow_inequality, MaxFlow};
use bunkbed_core::presistance::{
    dual_capacity, primal_p_resistance, verify_p_resistance_inequality, PParameter, PResistanceResult, ResistanceError, SolverConfig,
};
use bunkbed_core::saw::{census, count_saw, verify_ladder_proposition, ClassLabel, SawOptions};
use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bunkbed-lab", version, about = "Verification experiments on bunkbed graphs G x K2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact max-flow on a graph file, or the layer comparison on its bunkbed.
    Maxflow {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        source: Option<usize>,
        #[arg(long)]
        sink: Option<usize>,
        /// Compare MF(x0, y0) with MF(x0, y1) on G x K2.
        #[arg(long)]
        bunkbed: bool,
        #[arg(long)]
        x: Option<usize>,
        #[arg(long)]
        y: Option<usize>,
    },
    /// p-resistance and its dual capacity; edge weights are resistances.
    Presistance {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long)]
        p: f64,
        /// Solve only the dual problem.
        #[arg(long)]
        dual_only: bool,
        /// Convergence tolerance (objective and relative gradient).
        #[arg(long)]
        tol: Option<f64>,
        /// Compare R_p(x0, y0) with R_p(x0, y1) on G x K2.
        #[arg(long)]
        bunkbed: bool,
    },
    /// Self-avoiding walk counts, bunkbed class census, or the ladder table.
    Saw {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        u: Option<usize>,
        #[arg(long)]
        v: Option<usize>,
        /// Class counts on G x K2 instead of plain counts on G.
        #[arg(long)]
        census: bool,
        /// Also print up to N walks.
        #[arg(long, value_name = "N")]
        store_walks: Option<usize>,
        /// Check every pair on P_n x K2 (ignores --graph).
        #[arg(long, value_name = "n")]
        ladder: Option<usize>,
    },
    /// Exact A_n and B_n on K_n x K2.
    Closedform {
        #[arg(long)]
        n: usize,
        /// Include p_k, q_k and their ratio bounds.
        #[arg(long)]
        terms: bool,
        /// Include the series reference values.
        #[arg(long)]
        asymptotics: bool,
    },
    /// Run a verification suite from a JSON config.
    Run {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify one record of a run file.
    Replay {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        id: usize,
    },
    /// Counterexample search for the walk questions.
    Search {
        #[arg(long)]
        question: String,
        /// e.g. `exhaustive:6`, `path:2..8`, `cycle:3..8`, `random:5..7:0.4`, `file:g.txt`.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: exit_code::CONFIG, message: message.into() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match e {
            HarnessError::Mismatch { .. } => exit_code::VIOLATION,
            _ => exit_code::CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

macro_rules! input_err {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::input(e.to_string())
            }
        }
    )*};
}
input_err!(
    bunkbed_core::graph::GraphError,
    bunkbed_core::maxflow::FlowError,
    bunkbed_core::saw::SawError,
    bunkbed_core::closedform::ClosedFormError,
    ResistanceError,
    io::Error
);

type Outcome = Result<i32, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Maxflow { graph, source, sink, bunkbed, x, y } => cmd_maxflow(&graph, source, sink, bunkbed, x, y),
        Command::Presistance { graph, x, y, p, dual_only, tol, bunkbed } => cmd_presistance(&graph, x, y, p, dual_only, tol, bunkbed),
        Command::Saw { graph, u, v, census, store_walks, ladder } => cmd_saw(graph.as_deref(), u, v, census, store_walks, ladder),
        Command::Closedform { n, terms, asymptotics } => cmd_closedform(n, terms, asymptotics),
        Command::Run { suite, config, out } => cmd_run(suite.as_deref(), &config, out.as_deref()),
        Command::Replay { records, id } => cmd_replay(&records, id),
        Command::Search { question, family, seed, trials, budget, out } => {
            cmd_search(&question, &family, seed, trials, budget, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("bunkbed-lab: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}

fn print(value: &Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<GraphFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    GraphFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn required(value: Option<usize>, flag: &str) -> Result<usize, Failure> {
    value.ok_or_else(|| Failure::input(format!("missing --{flag}")))
}

fn cut_json(graph: &BaseGraph, flow: &MaxFlow) -> Value {
    let edges: Vec<Value> = flow
        .cut
        .crossing_edges
        .iter()
        .map(|&e| {
            let (a, b) = graph.endpoints(e);
            json!([a, b])
        })
        .collect();
    Value::Array(edges)
}

fn rat(r: &BigRational) -> Value {
    Value::String(r.to_string())
}

fn cmd_maxflow(path: &Path, source: Option<usize>, sink: Option<usize>, bunkbed: bool, x: Option<usize>, y: Option<usize>) -> Outcome {
    let file = load_graph(path)?;
    if bunkbed {
        let (x, y) = (required(x, "x")?, required(y, "y")?);
        let b = BunkbedGraph::new(file.graph.clone());
        let r = verify_flow_inequality(&file.graph, &file.bunkbed_weights(&b), x, y)?;
        print(&json!({
            "x": x,
            "y": y,
            "mf_same": rat(&r.same_layer.value),
            "mf_cross": rat(&r.cross_layer.value),
            "cut_edges_same": cut_json(b.graph(), &r.same_layer),
            "cut_edges_cross": cut_json(b.graph(), &r.cross_layer),
            "holds": r.holds,
        }))?;
        return Ok(if r.holds { exit_code::OK } else { exit_code::VIOLATION });
    }
    let (s, t) = (required(source, "source")?, required(sink, "sink")?);
    let network = CapacitatedNetwork::new(file.graph.clone(), file.weights.clone(), WeightRole::Capacity)?;
    let r = max_flow(&network, s, t)?;
    print(&json!({
        "source": s,
        "sink": t,
        "value": rat(&r.value),
        "cut_edges": cut_json(&file.graph, &r),
        "flow": r.flow.values.iter().map(rat).collect::<Vec<_>>(),
    }))?;
    Ok(exit_code::OK)
}

fn resistance_json(r: &PResistanceResult) -> Value {
    json!({
        "p": r.p,
        "Rp": r.resistance,
        "Cp": r.capacity,
        "gap": r.gap,
        "iterations": r.iterations,
        "converged": r.converged,
        "conservation_defect": r.conservation_defect,
    })
}

fn cmd_presistance(path: &Path, x: usize, y: usize, p: f64, dual_only: bool, tol: Option<f64>, bunkbed: bool) -> Outcome {
    let file = load_graph(path)?;
    let p = PParameter::new(p)?;
    let mut config = SolverConfig::default();
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::input("--tol must be positive"));
        }
        config.objective_tolerance = t;
        config.gradient_tolerance = t;
    }
    if bunkbed {
        let b = BunkbedGraph::new(file.graph.clone());
        let r = verify_p_resistance_inequality(&file.graph, &file.bunkbed_weights(&b), x, y, p, &config)?;
        print(&json!({
            "same_layer": resistance_json(&r.same_layer),
            "cross_layer": resistance_json(&r.cross_layer),
            "holds": r.holds,
        }))?;
        return Ok(if r.holds { exit_code::OK } else { exit_code::VIOLATION });
    }
    let network = CapacitatedNetwork::new(file.graph.clone(), file.weights.clone(), WeightRole::Resistance)?;
    if dual_only {
        let d = dual_capacity(&network, x, y, p, &config)?;
        print(&json!({
            "p": p.p(),
            "Cp": d.capacity,
            "Rp": d.capacity.powf(-(p.p() - 1.0)),
            "iterations": d.iterations,
            "converged": d.converged,
            "potential": d.potential.values(),
        }))?;
    } else {
        print(&resistance_json(&primal_p_resistance(&network, x, y, p, &config)?))?;
    }
    Ok(exit_code::OK)
}

fn class_json(counts: &[BigUint; 5]) -> Value {
    let names = ClassLabel::ALL.iter().map(|l| format!("{l:?}"));
    Value::Object(names.zip(counts).map(|(n, c)| (n, Value::String(c.to_string()))).collect())
}

fn cmd_saw(
    graph: Option<&Path>,
    u: Option<usize>,
    v: Option<usize>,
    with_census: bool,
    store_walks: Option<usize>,
    ladder: Option<usize>,
) -> Outcome {
    if let Some(n) = ladder {
        let r = verify_ladder_proposition(n)?;
        let pairs: Vec<Value> = r
            .pairs
            .iter()
            .map(|p| {
                json!({
                    "u": p.u,
                    "v": p.v,
                    "total_same": p.total_same.to_string(),
                    "total_cross": p.total_cross.to_string(),
                    "s5_same": p.s5_same.to_string(),
                    "s5_cross": p.s5_cross.to_string(),
                    "expected": p.expected,
                    "observed": p.observed,
                    "formula": p.formula.as_ref().map(|(a, b)| json!([a.to_string(), b.to_string()])),
                    "matches": p.relation_matches() && p.formula_matches(),
                })
            })
            .collect();
        print(&json!({
            "n": n,
            "all_relations_match": r.all_relations_match(),
            "all_formulas_match": r.all_formulas_match(),
            "pairs": pairs,
        }))?;
        return Ok(exit_code::OK);
    }
    let path = graph.ok_or_else(|| Failure::input("missing --graph (or use --ladder)"))?;
    let file = load_graph(path)?;
    let (u, v) = (required(u, "u")?, required(v, "v")?);
    if with_census {
        let c = census(&file.graph, u, v, &SawOptions::default())?;
        let (same, cross) = (c.total(Layer::Lower), c.total(Layer::Upper));
        print(&json!({
            "u": u,
            "v": v,
            "to_same": class_json(&c.to_lower),
            "to_cross": class_json(&c.to_upper),
            "total_same": same.to_string(),
            "total_cross": cross.to_string(),
            "classes_balanced": c.bijective_classes_balanced(),
        }))?;
        return Ok(exit_code::OK);
    }
    let options = match store_walks {
        Some(n) => SawOptions::storing(n),
        None => SawOptions::default(),
    };
    let r = count_saw(&file.graph, u, v, &options)?;
    let mut out = json!({ "u": u, "v": v, "count": r.count.to_string() });
    if let Some(walks) = r.walks {
        out["walks"] = walks.iter().map(|w| json!(w.vertices())).collect();
    }
    print(&out)?;
    Ok(exit_code::OK)
}

fn bound_json(b: &BoundedRatio) -> Value {
    json!({
        "ratio": b.ratio.to_string(),
        "ratio_f64": b.ratio_f64(),
        "bound_f64": b.bound_lower.to_f64(),
        "verdict": b.verdict,
    })
}

fn cmd_closedform(n: usize, terms: bool, asymptotics: bool) -> Outcome {
    let t = ClosedFormTerms::new(n)?;
    let mut out = json!({ "n": n, "A": t.a_total().to_string(), "B": t.b_total().to_string() });
    if terms {
        out["p"] = t.p.iter().map(|x| Value::String(x.to_string())).collect();
        out["q"] = t.q.iter().map(|x| Value::String(x.to_string())).collect();
        let ratios: Vec<Value> = all_term_ratios(n)?
            .iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "q_ratio": r.q_ratio.as_ref().map(bound_json),
                    "p_ratio": r.p_ratio.as_ref().map(bound_json),
                })
            })
            .collect();
        out["ratios"] = Value::Array(ratios);
    }
    if asymptotics {
        if n < 4 {
            return Err(Failure::input("--asymptotics needs n >= 4"));
        }
        out["asymptotics"] = serde_json::to_value(asymptotic_reference(n)?).map_err(|e| Failure::input(e.to_string()))?;
    }
    print(&out)?;
    Ok(exit_code::OK)
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn report_summary(outcome: &bunkbed_core::harness::RunOutcome) {
    let s = &outcome.summary;
    eprintln!(
        "{}: {} records over {} trials; holds {}, violated {}, inconclusive {}{}",
        outcome.manifest.config.suite.map_or("?", Suite::name),
        s.records,
        s.trials,
        s.holds,
        s.violated,
        s.inconclusive,
        if s.budget_exceeded { "; time budget exceeded" } else { "" }
    );
}

fn cmd_run(suite: Option<&str>, config: &Path, out: Option<&Path>) -> Outcome {
    let text = fs::read_to_string(config).map_err(|e| Failure::input(format!("{}: {e}", config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = suite {
        cfg.suite = Some(s.parse()?);
    }
    // Relative file paths in the config are resolved against the config's directory.
    if let Family::File { path } = &mut cfg.family {
        if path.is_relative() {
            if let Some(dir) = config.parent() {
                *path = dir.join(&*path);
            }
        }
    }
    cfg.validate()?;
    let mut w = open_out(out)?;
    let outcome = run_suite_to(&cfg, &mut w)?;
    drop(w);
    report_summary(&outcome);
    Ok(outcome.exit_code())
}

fn cmd_replay(records: &Path, id: usize) -> Outcome {
    let r = replay(records, id)?;
    print(&serde_json::to_value(&r).map_err(|e| Failure::input(e.to_string()))?)?;
    Ok(exit_code::OK)
}

fn cmd_search(question: &str, family: &str, seed: u64, trials: Option<usize>, budget: Option<f64>, out: Option<&Path>) -> Outcome {
    let which: Question = question.parse()?;
    let family: Family = family.parse()?;
    let mut w = open_out(out)?;
    let outcome = question_search(which, family, seed, trials, budget, &mut w)?;
    drop(w);
    report_summary(&outcome);
    Ok(outcome.exit_code())
}
