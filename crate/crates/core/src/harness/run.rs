use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use super::record::{read_run, Line, Manifest, Summary};
use super::suites::{evaluate, family_graphs, trial_instances};
use super::{digest, exit_code, ExperimentConfig, Family, HarnessError, ResultRecord, Suite, Verdict, CODE_VERSION};
use crate::graph::io::GraphFile;

/// Relative tolerance when replaying floating-point records.
pub const PRESISTANCE_REPLAY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub records: Vec<ResultRecord>,
    pub summary: Summary,
}

impl RunOutcome {
    /// A violation in a theorem suite outranks an exhausted budget.
    pub fn exit_code(&self) -> i32 {
        let suite = self.manifest.config.suite.expect("validated configs name a suite");
        if suite.is_theorem_suite() && self.summary.violated > 0 {
            exit_code::VIOLATION
        } else if self.summary.budget_exceeded {
            exit_code::BUDGET
        } else {
            exit_code::OK
        }
    }
}

fn secs(s: f64) -> Duration {
    Duration::from_secs_f64(s)
}

/// Runs a suite, collecting every line in memory.
pub fn run_suite(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    run_suite_to(config, &mut std::io::sink())
}

/// Runs a suite and streams JSON lines to `out` as trials complete, so an
/// interrupted or over-budget run keeps its partial results.
pub fn run_suite_to(config: &ExperimentConfig, out: &mut dyn Write) -> Result<RunOutcome, HarnessError> {
    config.validate()?;
    let suite = config.suite()?;
    let graphs = family_graphs(&config.family)?;
    let trials = match (&graphs, config.trials) {
        (Some(list), Some(t)) => t.min(list.len()),
        (Some(list), None) => list.len(),
        (None, t) => t.expect("validated: random family has trials"),
    };
    if suite == Suite::Complete {
        if let Family::Complete { n_min, .. } = config.family {
            if n_min < 2 {
                return Err(HarnessError::Config("complete suite needs n >= 2".into()));
            }
        }
    }
    let manifest = Manifest { code_version: CODE_VERSION.to_string(), config: config.clone() };
    writeln!(out, "{}", Line::Manifest(manifest.clone()).to_json())?;

    let start = Instant::now();
    let budget_deadline = config.time_budget_secs.map(|s| start + secs(s));
    let chunk = (rayon::current_num_threads() * 2).max(1);
    let mut records = Vec::new();
    let mut summary = Summary::default();
    let mut next = 0;
    while next < trials {
        if budget_deadline.is_some_and(|d| Instant::now() >= d) {
            summary.budget_exceeded = true;
            break;
        }
        let end = (next + chunk).min(trials);
        let batch: Vec<Result<Vec<ResultRecord>, HarnessError>> =
            (next..end).into_par_iter().map(|t| run_trial(config, suite, graphs.as_deref(), t)).collect();
        for trial_records in batch {
            for mut r in trial_records? {
                r.id = records.len();
                summary.add(&r);
                writeln!(out, "{}", Line::Record(r.clone()).to_json())?;
                records.push(r);
            }
            summary.trials += 1;
        }
        next = end;
    }
    writeln!(out, "{}", Line::Summary(summary.clone()).to_json())?;
    out.flush()?;
    Ok(RunOutcome { manifest, records, summary })
}

fn run_trial(
    config: &ExperimentConfig,
    suite: Suite,
    graphs: Option<&[GraphFile]>,
    trial: usize,
) -> Result<Vec<ResultRecord>, HarnessError> {
    let begin = Instant::now();
    let deadline = config.trial_time_cap_secs.map(|s| begin + secs(s));
    let mut out = Vec::new();
    for instance in trial_instances(config, suite, graphs, trial)? {
        let t0 = Instant::now();
        let (quantities, verdict) = if deadline.is_some_and(|d| t0 >= d) {
            (Map::from_iter([("inconclusive".to_string(), Value::from("per-trial time cap"))]), Verdict::Inconclusive)
        } else {
            evaluate(suite, &instance, deadline)?
        };
        out.push(ResultRecord {
            id: 0,
            suite,
            trial,
            digest: digest(&instance.graph),
            instance,
            quantities,
            verdict,
            runtime_ms: config.record_runtime.then(|| t0.elapsed().as_secs_f64() * 1e3),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Question {
    /// Every pair `u != v`.
    Q1,
    /// Pairs that are not cut edges, including all non-adjacent pairs.
    Q2,
}

impl std::str::FromStr for Question {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q1" | "Q1" => Ok(Question::Q1),
            "q2" | "Q2" => Ok(Question::Q2),
            _ => Err(HarnessError::Config(format!("unknown question `{s}` (expected q1 or q2)"))),
        }
    }
}

/// Records `|S(u0,v0)|` against `|S(u0,v1)|` over a family; violated records
/// (`summary.flagged`) are candidate counterexamples with full replay data.
pub fn question_search(
    which: Question,
    family: Family,
    seed: u64,
    trials: Option<usize>,
    time_budget_secs: Option<f64>,
    out: &mut dyn Write,
) -> Result<RunOutcome, HarnessError> {
    let suite = match which {
        Question::Q1 => Suite::Question1Search,
        Question::Q2 => Suite::Question2Search,
    };
    let mut config = ExperimentConfig::new(suite, family);
    config.seed = seed;
    config.trials = trials;
    config.time_budget_secs = time_budget_secs;
    run_suite_to(&config, out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub id: usize,
    pub suite: Suite,
    pub verdict: Verdict,
    pub recorded: Map<String, Value>,
    pub recomputed: Map<String, Value>,
    /// Largest relative deviation over numeric fields; 0 for exact suites.
    pub max_relative_deviation: f64,
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn compare(suite: Suite, recorded: &Map<String, Value>, recomputed: &Map<String, Value>) -> Result<f64, String> {
    if suite.is_exact() {
        return if recorded == recomputed { Ok(0.0) } else { Err("quantities differ".into()) };
    }
    if recorded.keys().ne(recomputed.keys()) {
        return Err("quantity names differ".into());
    }
    let mut worst = 0f64;
    for (k, a) in recorded {
        let b = &recomputed[k];
        match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => {
                let d = relative(x, y);
                worst = worst.max(d);
                // gaps are solver diagnostics near zero; compare them absolutely
                let limit = if k.starts_with("gap") { (x - y).abs() } else { d };
                if limit > PRESISTANCE_REPLAY_TOLERANCE {
                    return Err(format!("{k}: recorded {x}, recomputed {y}"));
                }
            }
            _ if a == b => {}
            _ => return Err(format!("{k}: recorded {a}, recomputed {b}")),
        }
    }
    Ok(worst)
}

/// Re-runs record `id` from a run file and checks it against what was stored.
pub fn replay(records: &Path, id: usize) -> Result<ReplayReport, HarnessError> {
    let file = std::fs::File::open(records)?;
    let run = read_run(std::io::BufReader::new(file))?;
    let record = run.records.into_iter().find(|r| r.id == id).ok_or(HarnessError::RecordNotFound(id))?;
    let mismatch = |detail: String| HarnessError::Mismatch { id, detail };
    let actual = digest(&record.instance.graph);
    if actual != record.digest {
        return Err(mismatch(format!("digest {} does not match instance ({actual})", record.digest)));
    }
    let (recomputed, verdict) = evaluate(record.suite, &record.instance, None)?;
    if verdict != record.verdict && record.verdict != Verdict::Inconclusive {
        return Err(mismatch(format!("verdict {:?} recomputed as {:?}", record.verdict, verdict)));
    }
    let max_relative_deviation = if record.verdict == Verdict::Inconclusive {
        0.0
    } else {
        compare(record.suite, &record.quantities, &recomputed).map_err(mismatch)?
    };
    Ok(ReplayReport { id, suite: record.suite, verdict, recorded: record.quantities, recomputed, max_relative_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theorem1(trials: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(Suite::Theorem1, Family::Random { n_min: 2, n_max: 6, edge_probability: 0.5 });
        cfg.trials = Some(trials);
        cfg.seed = 5;
        cfg
    }

    #[test]
    fn runs_are_byte_identical() {
        let cfg = theorem1(20);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let ra = run_suite_to(&cfg, &mut a).unwrap();
        run_suite_to(&cfg, &mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.summary.holds, 20);
        assert_eq!(ra.exit_code(), exit_code::OK);
        let lines: Vec<&str> = std::str::from_utf8(&a).unwrap().lines().collect();
        assert_eq!(lines.len(), 22);
        assert!(lines[0].contains("\"type\":\"manifest\""));
        assert!(lines[21].contains("\"type\":\"summary\""));
    }

    #[test]
    fn zero_budget_stops_early() {
        let mut cfg = theorem1(50);
        cfg.time_budget_secs = Some(1e-9);
        let r = run_suite(&cfg).unwrap();
        assert!(r.summary.budget_exceeded);
        assert_eq!(r.exit_code(), exit_code::BUDGET);
    }

    #[test]
    fn q1_on_p4_flags_interior_adjacent_pairs() {
        let r = question_search(Question::Q1, Family::Path { n_min: 4, n_max: 4 }, 0, None, None, &mut std::io::sink()).unwrap();
        let flagged: Vec<(usize, usize)> =
            r.summary.flagged.iter().map(|&i| (r.records[i].instance.x, r.records[i].instance.y)).collect();
        assert_eq!(flagged, vec![(1, 2), (2, 3)]);
        assert_eq!(r.exit_code(), exit_code::OK, "questions never fail a run");
    }

    #[test]
    fn replay_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.jsonl");
        let mut buf = Vec::new();
        run_suite_to(&theorem1(3), &mut buf).unwrap();
        std::fs::write(&path, &buf).unwrap();
        let rep = replay(&path, 1).unwrap();
        assert_eq!(rep.recorded, rep.recomputed);
        assert!(matches!(replay(&path, 99), Err(HarnessError::RecordNotFound(99))));

        let text = String::from_utf8(buf).unwrap();
        let first = read_run(text.as_bytes()).unwrap().records[0].digest.clone();
        let corrupted = text.replacen(&first, &"0".repeat(64), 1);
        std::fs::write(&path, corrupted).unwrap();
        assert!(matches!(replay(&path, 0), Err(HarnessError::Mismatch { id: 0, .. })));
    }

    #[test]
    fn replay_float_suite_within_tolerance() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t2.jsonl");
        let mut cfg = ExperimentConfig::new(Suite::Theorem2, Family::Random { n_min: 3, n_max: 5, edge_probability: 0.5 });
        cfg.trials = Some(2);
        let mut buf = Vec::new();
        let r = run_suite_to(&cfg, &mut buf).unwrap();
        assert_eq!(r.records.len(), 6);
        std::fs::write(&path, &buf).unwrap();
        for id in 0..6 {
            let rep = replay(&path, id).unwrap();
            assert!(rep.max_relative_deviation <= PRESISTANCE_REPLAY_TOLERANCE);
        }
    }
}
