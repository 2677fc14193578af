//! p-resistance on electrical networks, its dual capacity, and the layer
//! min/max rearrangement on bunkbed graphs.
//!
//! For `p > 1` and `q = p / (p - 1)`:
//!
//! * `R_p(x, y) = inf sum_e r_e |theta_e|^p` over unit flows from `x` to `y`;
//! * `C_p(x, y) = inf sum_{e=uv} |f(u) - f(v)|^q / r_e^(1/(p-1))` over potentials
//!   with `f(x) = 1`, `f(y) = 0`.
//!
//! The optimal flow is the normalized current of the optimal potential, and
//! the two optima satisfy `R_p = C_p^-(p-1)`.
//!
//! Everything here is binary64; comparisons carry explicit tolerances.

mod solver;

use num_rational::BigRational;
use thiserror::Error;

use crate::graph::{BaseGraph, BunkbedGraph, CapacitatedNetwork, GraphError, Layer, VertexId, WeightRole};

pub use solver::{dual_capacity, primal_p_resistance, DualSolution, PResistanceResult, SolverConfig};

/// Relative slack for the bunkbed resistance comparison.
pub const INEQUALITY_SLACK: f64 = 1e-8;

/// Relative slack for the convex quadruple inequality.
pub const QUADRUPLE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResistanceError {
    #[error("p must be a finite number greater than 1, got {0}")]
    InvalidP(f64),
    #[error("x and y coincide at vertex {0}")]
    SameEndpoints(VertexId),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("{x} and {y} lie in different components")]
    DisconnectedPair { x: VertexId, y: VertexId },
    #[error("network carries capacities, not resistances")]
    WrongRole,
    #[error("resistances are not reflection-symmetric on horizontal edges")]
    AsymmetricResistances,
    #[error("solver did not converge after {} iterations", .best.iterations)]
    NotConverged { best: Box<DualSolution> },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The exponent `p > 1` with its conjugate `q = 1 + 1/(p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PParameter {
    p: f64,
    q: f64,
}

impl PParameter {
    pub fn new(p: f64) -> Result<Self, ResistanceError> {
        if !(p.is_finite() && p > 1.0) {
            return Err(ResistanceError::InvalidP(p));
        }
        Ok(PParameter { p, q: 1.0 + 1.0 / (p - 1.0) })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Edge weight in the dual objective, `r^(-1/(p-1))`.
    pub fn dual_weight(&self, resistance: f64) -> f64 {
        resistance.powf(-1.0 / (self.p - 1.0))
    }
}

/// A potential with values in `[0, 1]`, pinned to 1 at `source` and 0 at `sink`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialVector {
    values: Vec<f64>,
    source: VertexId,
    sink: VertexId,
}

impl PotentialVector {
    pub fn new(values: Vec<f64>, source: VertexId, sink: VertexId) -> Result<Self, ResistanceError> {
        if source >= values.len() || sink >= values.len() {
            return Err(ResistanceError::InvalidPotential("pin outside the vertex range".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(ResistanceError::InvalidPotential("values must lie in [0, 1]".into()));
        }
        if values[source] != 1.0 || values[sink] != 0.0 {
            return Err(ResistanceError::InvalidPotential("pins must be exactly 1 and 0".into()));
        }
        Ok(PotentialVector { values, source, sink })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }
}

/// `h(u0) = f(u0) max f(u1)`, `h(u1) = f(u0) min f(u1)` for every base vertex.
pub fn minmax_rearrange<T: PartialOrd + Clone>(bunkbed: &BunkbedGraph, values: &[T]) -> Vec<T> {
    assert_eq!(values.len(), bunkbed.graph().vertex_count(), "one value per bunkbed vertex");
    let mut out = values.to_vec();
    for u in 0..bunkbed.base().vertex_count() {
        let (lo, hi) = (bunkbed.vertex(u, Layer::Lower), bunkbed.vertex(u, Layer::Upper));
        if values[lo] < values[hi] {
            out.swap(lo, hi);
        }
    }
    out
}

/// Rearranges a potential pinned at `x0` (value 1) and `y0` (value 0). The
/// result is pinned at `x0` and `y1`.
pub fn rearrange_potential(bunkbed: &BunkbedGraph, f: &PotentialVector) -> Result<PotentialVector, ResistanceError> {
    if bunkbed.layer_of(f.source) != Layer::Lower || bunkbed.layer_of(f.sink) != Layer::Lower {
        return Err(ResistanceError::InvalidPotential("expected pins at x0 and y0".into()));
    }
    let h = minmax_rearrange(bunkbed, &f.values);
    let sink = bunkbed.reflect_vertex(f.sink);
    PotentialVector::new(h, f.source, sink)
}

/// `(f min 1) max 0`, pointwise.
pub fn clamp_unit(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

/// `sum_{e=uv} |f(u) - f(v)|^q / r_e^(1/(p-1))`.
pub fn dual_objective(network: &CapacitatedNetwork, p: PParameter, values: &[f64]) -> f64 {
    let r = network.weights_f64();
    network
        .graph()
        .edges()
        .iter()
        .zip(r)
        .map(|(&(a, b), r)| p.dual_weight(r) * (values[a] - values[b]).abs().powf(p.q()))
        .sum()
}

/// `|f(u0) - f(v0)|^q + |f(u1) - f(v1)|^q` for the base edge `uv`.
pub fn horizontal_pair_energy(bunkbed: &BunkbedGraph, values: &[f64], base_edge: usize, q: f64) -> f64 {
    let (u, v) = bunkbed.base().endpoints(base_edge);
    [Layer::Lower, Layer::Upper]
        .into_iter()
        .map(|l| (values[bunkbed.vertex(u, l)] - values[bunkbed.vertex(v, l)]).abs().powf(q))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupleCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `phi(a0 - b0) + phi(a1 - b1) >= phi(a0 max a1 - b0 max b1) + phi(a0 min a1 - b0 min b1)`
/// with `phi = |.|^q`, `q >= 1`.
pub fn convex_quadruple_inequality(q: f64, a0: f64, b0: f64, a1: f64, b1: f64) -> QuadrupleCheck {
    assert!(q >= 1.0, "phi = |x|^q is convex only for q >= 1");
    let phi = |x: f64| x.abs().powf(q);
    let lhs = phi(a0 - b0) + phi(a1 - b1);
    let rhs = phi(a0.max(a1) - b0.max(b1)) + phi(a0.min(a1) - b0.min(b1));
    let scale = 1f64.max(lhs.abs()).max(rhs.abs());
    QuadrupleCheck { lhs, rhs, holds: lhs >= rhs - QUADRUPLE_SLACK * scale }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceInequalityReport {
    /// `R_p(x0, y0)`.
    pub same_layer: PResistanceResult,
    /// `R_p(x0, y1)`.
    pub cross_layer: PResistanceResult,
    /// `R_p(x0, y1) >= R_p(x0, y0) - slack * scale`.
    pub holds: bool,
}

/// Solves both p-resistance problems on the bunkbed over `base`.
/// `resistances` covers every bunkbed edge in the bunkbed id order.
pub fn verify_p_resistance_inequality(
    base: &BaseGraph,
    resistances: &[BigRational],
    x: VertexId,
    y: VertexId,
    p: PParameter,
    config: &SolverConfig,
) -> Result<ResistanceInequalityReport, ResistanceError> {
    let bunkbed = BunkbedGraph::new(base.clone());
    if !bunkbed.is_reflection_symmetric(resistances) {
        return Err(ResistanceError::AsymmetricResistances);
    }
    for v in [x, y] {
        if !base.contains_vertex(v) {
            return Err(ResistanceError::VertexOutOfRange(v));
        }
    }
    if x == y {
        return Err(ResistanceError::SameEndpoints(x));
    }
    let network = CapacitatedNetwork::new(bunkbed.graph().clone(), resistances.to_vec(), WeightRole::Resistance)?;
    let source = bunkbed.vertex(x, Layer::Lower);
    let same_layer = primal_p_resistance(&network, source, bunkbed.vertex(y, Layer::Lower), p, config)?;
    let cross_layer = primal_p_resistance(&network, source, bunkbed.vertex(y, Layer::Upper), p, config)?;
    let (r00, r01) = (same_layer.resistance, cross_layer.resistance);
    let scale = 1f64.max(r00.abs()).max(r01.abs());
    let holds = r01 >= r00 - INEQUALITY_SLACK * scale;
    Ok(ResistanceInequalityReport { same_layer, cross_layer, holds })
}
