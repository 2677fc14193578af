//! Exact max-flow / min-cut over rational capacities (Dinic), the potential
//! form `sum c(e) |f(u) - f(v)|`, and the bunkbed flow inequality.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{BaseGraph, BunkbedGraph, CapacitatedNetwork, EdgeId, GraphError, Layer, OrientedEdge, VertexId, WeightRole};
use crate::presistance::minmax_rearrange;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("source and sink coincide at vertex {0}")]
    SameSourceSink(VertexId),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("network carries resistances, not capacities")]
    WrongRole,
    #[error("capacities are not reflection-symmetric on horizontal edges")]
    AsymmetricCapacities,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An antisymmetric edge function. `values[e]` is the flow along edge `e` in
/// its stored orientation (low vertex id to high).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment<T = BigRational> {
    pub values: Vec<T>,
    pub sources: Vec<VertexId>,
    pub sinks: Vec<VertexId>,
}

impl<T: Clone + Signed> FlowAssignment<T> {
    pub fn zero(graph: &BaseGraph, sources: Vec<VertexId>, sinks: Vec<VertexId>) -> Self {
        FlowAssignment { values: vec![T::zero(); graph.edge_count()], sources, sinks }
    }

    pub fn on(&self, edge: OrientedEdge) -> T {
        let v = self.values[edge.edge].clone();
        if edge.reversed {
            -v
        } else {
            v
        }
    }

    /// `(d* theta)(x)`: net outflow at every vertex.
    pub fn divergence(&self, graph: &BaseGraph) -> Vec<T> {
        let mut out = vec![T::zero(); graph.vertex_count()];
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            out[a] = out[a].clone() + self.values[e].clone();
            out[b] = out[b].clone() - self.values[e].clone();
        }
        out
    }

    pub fn strength(&self, graph: &BaseGraph) -> T {
        let div = self.divergence(graph);
        self.sources.iter().fold(T::zero(), |acc, &a| acc + div[a].clone())
    }
}

impl<T: Clone + Signed + PartialOrd> FlowAssignment<T> {
    /// Largest conservation defect `|d* theta|` away from sources and sinks, and
    /// the wrong-signed part at them.
    pub fn conservation_defect(&self, graph: &BaseGraph) -> T {
        let div = self.divergence(graph);
        let mut worst = T::zero();
        for (x, d) in div.into_iter().enumerate() {
            let defect = if self.sources.contains(&x) {
                if d.is_negative() { d.abs() } else { T::zero() }
            } else if self.sinks.contains(&x) {
                if d.is_positive() { d } else { T::zero() }
            } else {
                d.abs()
            };
            if defect > worst {
                worst = defect;
            }
        }
        worst
    }
}

impl FlowAssignment<BigRational> {
    pub fn is_flow(&self, graph: &BaseGraph) -> bool {
        self.conservation_defect(graph).is_zero()
    }

    pub fn is_admissible(&self, network: &CapacitatedNetwork) -> bool {
        self.values.iter().zip(network.weights()).all(|(v, c)| v.abs() <= *c)
    }
}

/// A source-side vertex set and the edges leaving it.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCertificate {
    pub source_side: Vec<bool>,
    pub crossing_edges: Vec<EdgeId>,
    pub value: BigRational,
}

impl CutCertificate {
    pub fn from_side(network: &CapacitatedNetwork, source_side: Vec<bool>) -> Self {
        let graph = network.graph();
        let crossing_edges: Vec<EdgeId> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| source_side[a] != source_side[b])
            .map(|(e, _)| e)
            .collect();
        let value = crossing_edges.iter().fold(BigRational::zero(), |acc, &e| acc + network.weight(e));
        CutCertificate { source_side, crossing_edges, value }
    }

    /// The indicator of the source side as a potential.
    pub fn indicator(&self) -> Vec<BigRational> {
        self.source_side
            .iter()
            .map(|&s| if s { BigRational::from_integer(1.into()) } else { BigRational::zero() })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: BigRational,
    pub flow: FlowAssignment,
    pub cut: CutCertificate,
}

struct Arc {
    to: usize,
    /// Residual capacity.
    residual: BigRational,
}

/// Residual network. Undirected edge `e` is the arc pair `2e` (stored
/// orientation) and `2e + 1`; pushing on one arc frees capacity on the other.
struct Dinic {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i64>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(network: &CapacitatedNetwork) -> Self {
        let graph = network.graph();
        let mut arcs = Vec::with_capacity(2 * graph.edge_count());
        let mut out = vec![Vec::new(); graph.vertex_count()];
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            let c = network.weight(e).clone();
            out[a].push(2 * e);
            out[b].push(2 * e + 1);
            arcs.push(Arc { to: b, residual: c.clone() });
            arcs.push(Arc { to: a, residual: c });
        }
        let n = graph.vertex_count();
        Dinic { arcs, out, level: vec![-1; n], next: vec![0; n] }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &a in &self.out[x] {
                let arc = &self.arcs[a];
                if arc.residual.is_positive() && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[x] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, x: usize, t: usize, limit: &BigRational) -> BigRational {
        if x == t {
            return limit.clone();
        }
        while self.next[x] < self.out[x].len() {
            let a = self.out[x][self.next[x]];
            let to = self.arcs[a].to;
            if self.arcs[a].residual.is_positive() && self.level[to] == self.level[x] + 1 {
                let cap = if self.arcs[a].residual < *limit { self.arcs[a].residual.clone() } else { limit.clone() };
                let pushed = self.dfs(to, t, &cap);
                if pushed.is_positive() {
                    self.arcs[a].residual -= &pushed;
                    self.arcs[a ^ 1].residual += &pushed;
                    return pushed;
                }
            }
            self.next[x] += 1;
        }
        BigRational::zero()
    }

    fn run(&mut self, s: usize, t: usize, total_capacity: &BigRational) -> BigRational {
        let mut value = BigRational::zero();
        while self.bfs(s, t) {
            self.next.fill(0);
            loop {
                let pushed = self.dfs(s, t, total_capacity);
                if pushed.is_zero() {
                    break;
                }
                value += pushed;
            }
        }
        value
    }
}

/// Maximum flow from `s` to `t` with a matching minimum cut.
///
/// The cut is the set reachable from `s` in the final residual network, the
/// unique source-side-minimal minimum cut. Zero-capacity edges stay in the
/// graph but never carry flow.
pub fn max_flow(network: &CapacitatedNetwork, s: VertexId, t: VertexId) -> Result<MaxFlow, FlowError> {
    let graph = network.graph();
    for v in [s, t] {
        if !graph.contains_vertex(v) {
            return Err(FlowError::VertexOutOfRange(v));
        }
    }
    if s == t {
        return Err(FlowError::SameSourceSink(s));
    }
    if network.role() != WeightRole::Capacity {
        return Err(FlowError::WrongRole);
    }
    let total = network.total_weight();
    let mut solver = Dinic::new(network);
    let value = solver.run(s, t, &total);

    // Net flow on the stored orientation is capacity minus forward residual.
    let values = (0..graph.edge_count())
        .map(|e| network.weight(e) - &solver.arcs[2 * e].residual)
        .collect();
    let flow = FlowAssignment { values, sources: vec![s], sinks: vec![t] };

    solver.bfs(s, t);
    let side: Vec<bool> = solver.level.iter().map(|&l| l >= 0).collect();
    let cut = CutCertificate::from_side(network, side);
    debug_assert_eq!(cut.value, value);
    Ok(MaxFlow { value, flow, cut })
}

/// `sum_{e = uv} c(e) |f(u) - f(v)|`.
pub fn potential_form_value(network: &CapacitatedNetwork, potential: &[BigRational]) -> Result<BigRational, FlowError> {
    let graph = network.graph();
    if potential.len() != graph.vertex_count() {
        return Err(FlowError::LengthMismatch { expected: graph.vertex_count(), got: potential.len() });
    }
    Ok(graph
        .edges()
        .iter()
        .zip(network.weights())
        .fold(BigRational::zero(), |acc, (&(a, b), c)| acc + c * (&potential[a] - &potential[b]).abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowInequalityReport {
    /// `MF(x0, y0)`.
    pub same_layer: MaxFlow,
    /// `MF(x0, y1)`.
    pub cross_layer: MaxFlow,
    /// `MF(x0, y0) >= MF(x0, y1)`, exactly.
    pub holds: bool,
}

/// Computes both flows on the bunkbed over `base` and compares them.
/// `weights` covers every bunkbed edge in the bunkbed id order.
pub fn verify_flow_inequality(
    base: &BaseGraph,
    weights: &[BigRational],
    x: VertexId,
    y: VertexId,
) -> Result<FlowInequalityReport, FlowError> {
    let bunkbed = BunkbedGraph::new(base.clone());
    if !bunkbed.is_reflection_symmetric(weights) {
        return Err(FlowError::AsymmetricCapacities);
    }
    for v in [x, y] {
        if !base.contains_vertex(v) {
            return Err(FlowError::VertexOutOfRange(v));
        }
    }
    if x == y {
        return Err(FlowError::SameSourceSink(x));
    }
    let network = CapacitatedNetwork::new(bunkbed.graph().clone(), weights.to_vec(), WeightRole::Capacity)?;
    let source = bunkbed.vertex(x, Layer::Lower);
    let same_layer = max_flow(&network, source, bunkbed.vertex(y, Layer::Lower))?;
    let cross_layer = max_flow(&network, source, bunkbed.vertex(y, Layer::Upper))?;
    let holds = same_layer.value >= cross_layer.value;
    Ok(FlowInequalityReport { same_layer, cross_layer, holds })
}

/// Potential-form value of `f` before and after the layer min/max
/// rearrangement. The network must live on `bunkbed.graph()`.
pub fn rearrangement_value_inequality(
    bunkbed: &BunkbedGraph,
    network: &CapacitatedNetwork,
    potential: &[BigRational],
) -> Result<(BigRational, BigRational), FlowError> {
    if network.graph() != bunkbed.graph() {
        return Err(FlowError::LengthMismatch { expected: bunkbed.graph().edge_count(), got: network.graph().edge_count() });
    }
    if !bunkbed.is_reflection_symmetric(network.weights()) {
        return Err(FlowError::AsymmetricCapacities);
    }
    let before = potential_form_value(network, potential)?;
    let after = potential_form_value(network, &minmax_rearrange(bunkbed, potential))?;
    Ok((before, after))
}
