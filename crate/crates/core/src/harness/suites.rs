use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use super::canon::connected_graphs_up_to;
use super::{ExperimentConfig, Family, HarnessError, Instance, Suite, Verdict};
use crate::closedform::{closed_form_a, closed_form_b};
use crate::graph::io::GraphFile;
use crate::graph::{random_connected_graph_with, BaseGraph, BunkbedGraph, Layer, SplitMix64};
use crate::maxflow::verify_flow_inequality;
use crate::presistance::{verify_p_resistance_inequality, PParameter, ResistanceError, SolverConfig};
use crate::saw::{census, ladder_pair_report, ClassLabel, SawError, SawOptions};

/// Graphs of an enumerated family, or `None` for the random family.
pub(crate) fn family_graphs(family: &Family) -> Result<Option<Vec<GraphFile>>, HarnessError> {
    let unweighted = |gs: Vec<BaseGraph>| Some(gs.into_iter().map(GraphFile::unweighted).collect());
    Ok(match family {
        Family::Random { .. } => None,
        Family::Exhaustive { n_max } => unweighted(connected_graphs_up_to(*n_max)),
        Family::Path { n_min, n_max } => unweighted((*n_min..=*n_max).map(BaseGraph::path).collect()),
        Family::Complete { n_min, n_max } => unweighted((*n_min..=*n_max).map(BaseGraph::complete).collect()),
        Family::Cycle { n_min, n_max } => unweighted((*n_min..=*n_max).map(BaseGraph::cycle).collect()),
        Family::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Config(format!("cannot read graph file {}: {e}", path.display())))?;
            let file = GraphFile::parse(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            if !file.graph.is_connected() {
                return Err(HarnessError::Config(format!("{}: graph is not connected", path.display())));
            }
            Some(vec![file])
        }
    })
}

fn random_weight(rng: &mut SplitMix64, cfg: &ExperimentConfig) -> BigRational {
    let num = rng.range_inclusive(1, cfg.weights.max_numerator as usize);
    let den = rng.range_inclusive(1, cfg.weights.max_denominator as usize);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn with_random_weights(graph: BaseGraph, rng: &mut SplitMix64, cfg: &ExperimentConfig) -> GraphFile {
    let weights = (0..graph.edge_count()).map(|_| random_weight(rng, cfg)).collect();
    let vertical = Some((0..graph.vertex_count()).map(|_| random_weight(rng, cfg)).collect());
    GraphFile { graph, weights, vertical }
}

fn instance(file: &GraphFile, x: usize, y: usize, p: Option<f64>) -> Instance {
    Instance { graph: file.to_text(), x, y, p }
}

/// Instances checked by one trial, in record order.
pub(crate) fn trial_instances(
    cfg: &ExperimentConfig,
    suite: Suite,
    graphs: Option<&[GraphFile]>,
    trial: usize,
) -> Result<Vec<Instance>, HarnessError> {
    let mut rng = SplitMix64::for_stream(cfg.seed, trial as u64);
    let base = match (graphs, &cfg.family) {
        (Some(list), _) => list[trial % list.len()].clone(),
        (None, Family::Random { n_min, n_max, edge_probability }) => {
            let n = rng.range_inclusive(*n_min, *n_max);
            GraphFile::unweighted(random_connected_graph_with(n, *edge_probability, &mut rng)?)
        }
        (None, _) => unreachable!("only the random family is generated on the fly"),
    };
    let n = base.graph.vertex_count();
    let from_file = matches!(cfg.family, Family::File { .. });
    Ok(match suite {
        Suite::Theorem1 | Suite::Theorem2 => {
            let file = if from_file { base } else { with_random_weights(base.graph, &mut rng, cfg) };
            let (x, y) = rng.distinct_pair(n);
            if suite == Suite::Theorem1 {
                vec![instance(&file, x, y, None)]
            } else {
                cfg.p_values.iter().map(|&p| instance(&file, x, y, Some(p))).collect()
            }
        }
        Suite::Ladder => {
            let file = GraphFile::unweighted(base.graph);
            let mut out = Vec::new();
            for u in 0..n {
                for v in (0..n).filter(|&v| v != u) {
                    out.push(instance(&file, u, v, None));
                }
            }
            out
        }
        Suite::Complete => vec![instance(&GraphFile::unweighted(base.graph), 0, 1, None)],
        Suite::Question1Search | Suite::Question2Search => {
            let file = GraphFile::unweighted(base.graph);
            let g = &file.graph;
            let mut out = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let keep =
                        suite == Suite::Question1Search || g.edge_between(u, v).is_none() || !g.is_cut_edge(u, v).unwrap_or(true);
                    if keep {
                        out.push(instance(&file, u, v, None));
                    }
                }
            }
            out
        }
    })
}

fn dec(x: &impl ToString) -> Value {
    Value::String(x.to_string())
}

fn inconclusive(reason: String) -> (Map<String, Value>, Verdict) {
    (Map::from_iter([("inconclusive".to_string(), Value::String(reason))]), Verdict::Inconclusive)
}

fn saw_options(deadline: Option<Instant>) -> SawOptions {
    SawOptions { deadline, ..SawOptions::default() }
}

/// Runs the check behind one record. `deadline` bounds walk enumeration only.
pub fn evaluate(suite: Suite, instance: &Instance, deadline: Option<Instant>) -> Result<(Map<String, Value>, Verdict), HarnessError> {
    let file = GraphFile::parse(&instance.graph)?;
    let (x, y) = (instance.x, instance.y);
    let mut q = Map::new();
    let verdict = match suite {
        Suite::Theorem1 => {
            let bunkbed = BunkbedGraph::new(file.graph.clone());
            let r = verify_flow_inequality(&file.graph, &file.bunkbed_weights(&bunkbed), x, y)?;
            q.insert("mf_same".into(), dec(&r.same_layer.value));
            q.insert("mf_cross".into(), dec(&r.cross_layer.value));
            if r.holds {
                Verdict::Holds
            } else {
                Verdict::Violated
            }
        }
        Suite::Theorem2 => {
            let p = instance.p.ok_or_else(|| HarnessError::Config("theorem2 record without p".into()))?;
            let p = PParameter::new(p).map_err(|e| HarnessError::Config(e.to_string()))?;
            let bunkbed = BunkbedGraph::new(file.graph.clone());
            match verify_p_resistance_inequality(&file.graph, &file.bunkbed_weights(&bunkbed), x, y, p, &SolverConfig::default()) {
                Ok(r) => {
                    q.insert("r_same".into(), json!(r.same_layer.resistance));
                    q.insert("r_cross".into(), json!(r.cross_layer.resistance));
                    q.insert("gap_same".into(), json!(r.same_layer.gap));
                    q.insert("gap_cross".into(), json!(r.cross_layer.gap));
                    if r.holds {
                        Verdict::Holds
                    } else {
                        Verdict::Violated
                    }
                }
                Err(e @ ResistanceError::NotConverged { .. }) => return Ok(inconclusive(e.to_string())),
                Err(e) => return Err(HarnessError::Config(e.to_string())),
            }
        }
        Suite::Ladder => {
            let n = file.graph.vertex_count() - 1;
            if file.graph != BaseGraph::path(n) {
                return Err(HarnessError::Config("ladder records must hold a path graph".into()));
            }
            let r = match ladder_pair_report(n, x, y, &saw_options(deadline)) {
                Ok(r) => r,
                Err(SawError::TimedOut) => return Ok(inconclusive("per-trial time cap".into())),
                Err(e) => return Err(e.into()),
            };
            q.insert("total_same".into(), dec(&r.total_same));
            q.insert("total_cross".into(), dec(&r.total_cross));
            q.insert("s5_same".into(), dec(&r.s5_same));
            q.insert("s5_cross".into(), dec(&r.s5_cross));
            q.insert("expected".into(), json!(r.expected));
            q.insert("observed".into(), json!(r.observed));
            if let Some((a, b)) = &r.formula {
                q.insert("formula_same".into(), dec(a));
                q.insert("formula_cross".into(), dec(b));
            }
            if r.relation_matches() && r.formula_matches() {
                Verdict::Holds
            } else {
                Verdict::Violated
            }
        }
        Suite::Complete | Suite::Question1Search | Suite::Question2Search => {
            let c = match census(&file.graph, x, y, &saw_options(deadline)) {
                Ok(c) => c,
                Err(SawError::TimedOut) => return Ok(inconclusive("per-trial time cap".into())),
                Err(e) => return Err(e.into()),
            };
            let (same, cross) = (c.total(Layer::Lower), c.total(Layer::Upper));
            let s5 = ClassLabel::S5.index();
            q.insert("total_same".into(), dec(&same));
            q.insert("total_cross".into(), dec(&cross));
            q.insert("s5_same".into(), dec(&c.to_lower[s5]));
            q.insert("s5_cross".into(), dec(&c.to_upper[s5]));
            let balanced = c.bijective_classes_balanced();
            q.insert("classes_balanced".into(), Value::Bool(balanced));
            if suite == Suite::Complete {
                let n = file.graph.vertex_count();
                if file.graph != BaseGraph::complete(n) {
                    return Err(HarnessError::Config("complete records must hold a complete graph".into()));
                }
                let mut ok = balanced;
                if n >= 3 {
                    let (a, b) = (closed_form_a(n)?, closed_form_b(n)?);
                    ok &= a == c.to_lower[s5] && b == c.to_upper[s5] && same < cross;
                    q.insert("closed_form_a".into(), dec(&a));
                    q.insert("closed_form_b".into(), dec(&b));
                } else {
                    ok &= same == cross;
                }
                if ok {
                    Verdict::Holds
                } else {
                    Verdict::Violated
                }
            } else {
                let g = &file.graph;
                let adjacent = g.edge_between(x, y).is_some();
                q.insert("adjacent".into(), Value::Bool(adjacent));
                q.insert("cut_edge".into(), Value::Bool(adjacent && g.is_cut_edge(x, y)?));
                if same <= cross {
                    Verdict::Holds
                } else {
                    Verdict::Violated
                }
            }
        }
    };
    Ok((q, verdict))
}
