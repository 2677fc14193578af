use nalgebra::{DMatrix, DVector};

use super::{PParameter, PotentialVector, ResistanceError};
use crate::graph::{CapacitatedNetwork, VertexId, WeightRole};
use crate::maxflow::FlowAssignment;

/// Stopping rules for the dual solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once the objective fell by less than this (relative) over `window` iterations.
    pub objective_tolerance: f64,
    pub window: usize,
    /// Stop once `max |grad| / objective` is below this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Added to `d^2` inside the reweighting factors `|d|^(q-2)`.
    pub epsilon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            objective_tolerance: 1e-12,
            window: 5,
            gradient_tolerance: 1e-10,
            max_iterations: 10_000,
            epsilon: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// `C_p(x, y)`: the objective at `potential`.
    pub capacity: f64,
    pub potential: PotentialVector,
    pub iterations: usize,
    pub converged: bool,
    /// `max |grad| / objective` at the returned iterate.
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PResistanceResult {
    pub p: f64,
    /// `sum r_e |theta_e|^p` for the extracted unit flow.
    pub resistance: f64,
    pub capacity: f64,
    pub potential: PotentialVector,
    /// Unit flow from `x` to `y`.
    pub flow: FlowAssignment<f64>,
    /// Same as `resistance`; kept apart from the dual side for reporting.
    pub primal_value: f64,
    /// `C_p^-(p-1)`.
    pub dual_value: f64,
    /// `|primal - dual| / primal`.
    pub gap: f64,
    /// Largest `|d* theta|` off the endpoints.
    pub conservation_defect: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    edges: &'a [(VertexId, VertexId)],
    /// Dual weights `r^(-1/(p-1))`; zero for edges outside the solved component.
    weights: Vec<f64>,
    conductance: Vec<f64>,
    q: f64,
    /// Vertex -> index among the free vertices.
    slot: Vec<Option<usize>>,
    free: usize,
}

impl Problem<'_> {
    fn objective(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .zip(&self.weights)
            .map(|(&(a, b), w)| w * (f[a] - f[b]).abs().powf(self.q))
            .sum()
    }

    fn gradient(&self, f: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(self.free);
        for (&(a, b), w) in self.edges.iter().zip(&self.weights) {
            let d = f[a] - f[b];
            let s = self.q * w * d.abs().powf(self.q - 1.0) * d.signum();
            if let Some(i) = self.slot[a] {
                g[i] += s;
            }
            if let Some(j) = self.slot[b] {
                g[j] -= s;
            }
        }
        g
    }

    /// Weighted Laplacian on the free vertices with edge factors `factor(e, d)`,
    /// and the right-hand side contributed by pinned neighbors.
    fn laplacian(&self, f: &[f64], factor: impl Fn(usize, f64) -> f64) -> (DMatrix<f64>, DVector<f64>) {
        let mut m = DMatrix::zeros(self.free, self.free);
        let mut rhs = DVector::zeros(self.free);
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if self.weights[e] == 0.0 {
                continue;
            }
            let w = factor(e, f[a] - f[b]);
            match (self.slot[a], self.slot[b]) {
                (Some(i), Some(j)) => {
                    m[(i, i)] += w;
                    m[(j, j)] += w;
                    m[(i, j)] -= w;
                    m[(j, i)] -= w;
                }
                (Some(i), None) => {
                    m[(i, i)] += w;
                    rhs[i] += w * f[b];
                }
                (None, Some(j)) => {
                    m[(j, j)] += w;
                    rhs[j] += w * f[a];
                }
                (None, None) => {}
            }
        }
        (m, rhs)
    }

    fn write(&self, f: &mut [f64], free_values: &DVector<f64>) {
        for (v, slot) in self.slot.iter().enumerate() {
            if let Some(i) = slot {
                f[v] = free_values[*i].clamp(0.0, 1.0);
            }
        }
    }

    fn free_values(&self, f: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.free);
        for (v, slot) in self.slot.iter().enumerate() {
            if let Some(i) = slot {
                out[*i] = f[v];
            }
        }
        out
    }
}

fn check_endpoints(network: &CapacitatedNetwork, x: VertexId, y: VertexId) -> Result<Vec<bool>, ResistanceError> {
    let graph = network.graph();
    for v in [x, y] {
        if !graph.contains_vertex(v) {
            return Err(ResistanceError::VertexOutOfRange(v));
        }
    }
    if x == y {
        return Err(ResistanceError::SameEndpoints(x));
    }
    if network.role() != WeightRole::Resistance {
        return Err(ResistanceError::WrongRole);
    }
    let reach = graph.reachable_from(x, None);
    if !reach[y] {
        return Err(ResistanceError::DisconnectedPair { x, y });
    }
    Ok(reach)
}

/// Minimizes the dual objective over potentials with `f(x) = 1`, `f(y) = 0`.
///
/// Starts from the harmonic (`p = 2`) potential. Each step solves the
/// reweighted Laplacian system (the IRLS matrix, scaled by `q - 1`, which is
/// the regularized Hessian) and backtracks until the Armijo condition holds;
/// projected gradient steps take over when that fails. Vertices outside the
/// component of `x` are fixed at 0 and carry no energy.
pub fn dual_capacity(
    network: &CapacitatedNetwork,
    x: VertexId,
    y: VertexId,
    p: PParameter,
    config: &SolverConfig,
) -> Result<DualSolution, ResistanceError> {
    let reach = check_endpoints(network, x, y)?;
    let graph = network.graph();
    let resistances = network.weights_f64();
    let edges = graph.edges();
    let in_component = |e: usize| reach[edges[e].0];
    let weights: Vec<f64> = (0..edges.len())
        .map(|e| if in_component(e) { p.dual_weight(resistances[e]) } else { 0.0 })
        .collect();
    let conductance: Vec<f64> =
        (0..edges.len()).map(|e| if in_component(e) { 1.0 / resistances[e] } else { 0.0 }).collect();

    let mut slot = vec![None; graph.vertex_count()];
    let mut free = 0;
    for v in 0..graph.vertex_count() {
        if reach[v] && v != x && v != y {
            slot[v] = Some(free);
            free += 1;
        }
    }
    let problem = Problem { edges, weights, conductance, q: p.q(), slot, free };

    let mut f = vec![0.0; graph.vertex_count()];
    f[x] = 1.0;
    if free > 0 {
        let (m, rhs) = problem.laplacian(&f, |e, _| problem.conductance[e]);
        if let Some(ch) = m.cholesky() {
            problem.write(&mut f, &ch.solve(&rhs));
        }
    }

    let q = p.q();
    let mut value = problem.objective(&f);
    let mut history = vec![value];
    let mut iterations = 0;
    let mut converged = free == 0;
    let mut gradient_norm = 0.0;

    while !converged {
        let g = problem.gradient(&f);
        gradient_norm = g.amax() / value.max(f64::MIN_POSITIVE);
        if gradient_norm < config.gradient_tolerance {
            converged = true;
            break;
        }
        if iterations == config.max_iterations {
            break;
        }
        iterations += 1;

        let hess_factor = |e: usize, d: f64| {
            q * (q - 1.0) * problem.weights[e] * (d * d + config.epsilon).powf((q - 2.0) / 2.0)
        };
        let (h, _) = problem.laplacian(&f, hess_factor);
        let current = problem.free_values(&f);

        let mut accepted = None;
        if let Some(ch) = h.cholesky() {
            let direction = -ch.solve(&g);
            accepted = armijo(&problem, &f, &current, &g, &direction, value, 1.0);
        }
        if accepted.is_none() {
            let direction = -&g;
            let scale = value / g.norm_squared().max(f64::MIN_POSITIVE);
            accepted = armijo(&problem, &f, &current, &g, &direction, value, scale);
        }
        match accepted {
            Some((next, next_value)) => {
                f = next;
                value = next_value;
            }
            None => {
                // No representable decrease in either direction.
                converged = gradient_norm < config.gradient_tolerance.sqrt();
                break;
            }
        }
        history.push(value);
        if history.len() > config.window {
            let old = history[history.len() - 1 - config.window];
            if (old - value) / value.max(f64::MIN_POSITIVE) < config.objective_tolerance {
                converged = true;
            }
        }
    }
    if free > 0 {
        gradient_norm = problem.gradient(&f).amax() / value.max(f64::MIN_POSITIVE);
    }

    let potential = PotentialVector::new(f, x, y)?;
    let solution = DualSolution { capacity: value, potential, iterations, converged, gradient_norm };
    if converged {
        Ok(solution)
    } else {
        Err(ResistanceError::NotConverged { best: Box::new(solution) })
    }
}

fn armijo(
    problem: &Problem<'_>,
    f: &[f64],
    current: &DVector<f64>,
    gradient: &DVector<f64>,
    direction: &DVector<f64>,
    value: f64,
    initial_step: f64,
) -> Option<(Vec<f64>, f64)> {
    let slope = gradient.dot(direction);
    if slope.is_nan() || slope >= 0.0 {
        return None;
    }
    let mut step = initial_step;
    for _ in 0..60 {
        let mut trial = f.to_vec();
        problem.write(&mut trial, &(current + direction * step));
        let trial_value = problem.objective(&trial);
        if trial_value <= value + 1e-4 * step * slope && trial_value < value {
            return Some((trial, trial_value));
        }
        step *= 0.5;
    }
    None
}

/// `R_p(x, y)` through the dual optimum: the current
/// `i_e = w_e |df|^(q-1) sign(df)` is a flow, normalized to unit strength.
pub fn primal_p_resistance(
    network: &CapacitatedNetwork,
    x: VertexId,
    y: VertexId,
    p: PParameter,
    config: &SolverConfig,
) -> Result<PResistanceResult, ResistanceError> {
    let dual = dual_capacity(network, x, y, p, config)?;
    let graph = network.graph();
    let resistances = network.weights_f64();
    let f = dual.potential.values();
    let q = p.q();
    let current: Vec<f64> = graph
        .edges()
        .iter()
        .zip(&resistances)
        .map(|(&(a, b), &r)| {
            let d = f[a] - f[b];
            p.dual_weight(r) * d.abs().powf(q - 1.0) * d.signum()
        })
        .collect();
    let mut flow = FlowAssignment { values: current, sources: vec![x], sinks: vec![y] };
    let strength = flow.strength(graph);
    for v in &mut flow.values {
        *v /= strength;
    }
    let primal_value: f64 = flow.values.iter().zip(&resistances).map(|(t, r)| r * t.abs().powf(p.p())).sum();
    let dual_value = dual.capacity.powf(-(p.p() - 1.0));
    let gap = (primal_value - dual_value).abs() / primal_value;
    let conservation_defect = flow.conservation_defect(graph);
    Ok(PResistanceResult {
        p: p.p(),
        resistance: primal_value,
        capacity: dual.capacity,
        potential: dual.potential,
        flow,
        primal_value,
        dual_value,
        gap,
        conservation_defect,
        iterations: dual.iterations,
        converged: dual.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BaseGraph;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn network(n: usize, edges: &[(usize, usize)], r: Vec<BigRational>) -> CapacitatedNetwork {
        CapacitatedNetwork::new(BaseGraph::new(n, edges).unwrap(), r, WeightRole::Resistance).unwrap()
    }

    fn pp(p: f64) -> PParameter {
        PParameter::new(p).unwrap()
    }

    #[test]
    fn single_edge_any_p() {
        let net = network(2, &[(0, 1)], vec![q(1, 1)]);
        for p in [1.5, 2.0, 3.0, 10.0] {
            let d = dual_capacity(&net, 0, 1, pp(p), &SolverConfig::default()).unwrap();
            assert_eq!(d.capacity, 1.0);
            assert_eq!(d.potential.values(), &[1.0, 0.0]);
            let r = primal_p_resistance(&net, 0, 1, pp(p), &SolverConfig::default()).unwrap();
            assert_eq!(r.resistance, 1.0);
            assert_eq!(r.flow.values, vec![1.0]);
        }
    }

    #[test]
    fn single_edge_duality_exponent() {
        // r = 2: R_p = 2, C_p = 2^(-1/(p-1)), so R_p = C_p^-(p-1).
        let net = network(2, &[(0, 1)], vec![q(2, 1)]);
        let r = primal_p_resistance(&net, 0, 1, pp(3.0), &SolverConfig::default()).unwrap();
        assert!((r.resistance - 2.0).abs() < 1e-15);
        assert!((r.capacity - 2f64.powf(-0.5)).abs() < 1e-15);
        assert!((r.dual_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn series_path_p2() {
        // minimize (1-t)^2 + t^2: t = 1/2, value 1/2
        let net = network(3, &[(0, 1), (1, 2)], vec![q(1, 1), q(1, 1)]);
        let d = dual_capacity(&net, 0, 2, pp(2.0), &SolverConfig::default()).unwrap();
        assert!((d.capacity - 0.5).abs() < 1e-14);
        assert!((d.potential.values()[1] - 0.5).abs() < 1e-14);
        let r = primal_p_resistance(&net, 0, 2, pp(2.0), &SolverConfig::default()).unwrap();
        assert!((r.resistance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn series_resistances_add_for_every_p() {
        let net = network(3, &[(0, 1), (1, 2)], vec![q(3, 2), q(5, 1)]);
        for p in [1.5, 2.0, 3.0] {
            let r = primal_p_resistance(&net, 0, 2, pp(p), &SolverConfig::default()).unwrap();
            assert!((r.resistance - 6.5).abs() < 1e-9, "p = {p}: {}", r.resistance);
            for t in &r.flow.values {
                assert!((t - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_split_between_two_paths() {
        // x=0, y=3, two subdivided paths 0-1-3 and 0-2-3, each edge r = 1/2
        let e = [(0, 1), (1, 3), (0, 2), (2, 3)];
        let net = network(4, &e, vec![q(1, 2); 4]);
        for p in [2.0, 3.0, 1.5] {
            let r = primal_p_resistance(&net, 0, 3, pp(p), &SolverConfig::default()).unwrap();
            // each path carries 1/2 through total resistance 1
            let expected = 2.0 * 0.5f64.powf(p) * 1.0;
            assert!((r.resistance - expected).abs() < 1e-9 * expected, "p = {p}");
            assert!(r.gap < 1e-8);
        }
    }

    #[test]
    fn converges_on_irregular_network() {
        let g = BaseGraph::complete(5);
        let r: Vec<BigRational> = (0..10).map(|i| q(1 + i % 4, 1 + i % 3)).collect();
        let net = CapacitatedNetwork::new(g, r, WeightRole::Resistance).unwrap();
        for p in [1.5, 2.0, 3.0, 2.5, 1.2] {
            let res = primal_p_resistance(&net, 0, 3, pp(p), &SolverConfig::default()).unwrap();
            assert!(res.converged);
            assert!(res.gap < 1e-8, "p = {p}: gap {}", res.gap);
            assert!(res.conservation_defect < 1e-8, "p = {p}: defect {}", res.conservation_defect);
            assert!((res.flow.strength(net.graph()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_paths() {
        let net = network(3, &[(0, 1)], vec![q(1, 1)]);
        let cfg = SolverConfig::default();
        assert!(matches!(dual_capacity(&net, 0, 2, pp(2.0), &cfg), Err(ResistanceError::DisconnectedPair { .. })));
        assert!(matches!(dual_capacity(&net, 1, 1, pp(2.0), &cfg), Err(ResistanceError::SameEndpoints(1))));
        assert!(matches!(dual_capacity(&net, 0, 7, pp(2.0), &cfg), Err(ResistanceError::VertexOutOfRange(7))));
        let cap = CapacitatedNetwork::unit(BaseGraph::path(1), WeightRole::Capacity);
        assert!(matches!(dual_capacity(&cap, 0, 1, pp(2.0), &cfg), Err(ResistanceError::WrongRole)));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let g = BaseGraph::complete(5);
        let r: Vec<BigRational> = (0..10).map(|i| q(1 + i % 4, 1 + i % 3)).collect();
        let net = CapacitatedNetwork::new(g, r, WeightRole::Resistance).unwrap();
        let cfg = SolverConfig { max_iterations: 0, ..SolverConfig::default() };
        // p = 2 starts at the optimum; any other p needs iterations.
        assert!(dual_capacity(&net, 0, 1, pp(2.0), &cfg).is_ok());
        match dual_capacity(&net, 0, 1, pp(3.0), &SolverConfig { max_iterations: 0, ..cfg }) {
            Err(ResistanceError::NotConverged { best }) => assert!(best.capacity > 0.0),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
