//! Simple undirected graphs, their bunkbed products and weighted networks.
//!
//! Vertices are `0..vertex_count`. Edges keep the order in which they were
//! supplied; that order is the edge id, and every derived structure (bunkbed
//! products, serialized instances, enumeration order) is built on it.

mod bunkbed;
pub mod io;
mod network;
mod random;

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use thiserror::Error;

pub use bunkbed::{BunkbedEdge, BunkbedGraph, Layer};
pub use network::{parse_rational, CapacitatedNetwork, WeightRole};
pub use random::{random_connected_graph, random_connected_graph_with, SplitMix64, RANDOM_GRAPH_RETRY_CAP};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge {index} ({u}, {v}) has an endpoint outside 0..{vertex_count}")]
    EndpointOutOfRange { index: usize, u: usize, v: usize, vertex_count: usize },
    #[error("edge {index} is a self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge {index} ({u}, {v}) duplicates an earlier edge")]
    DuplicateEdge { index: usize, u: usize, v: usize },
    #[error("({u}, {v}) is not an edge")]
    NotAnEdge { u: usize, v: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight {value} on edge {edge} is not allowed for the {role:?} role")]
    InvalidWeight { edge: usize, value: String, role: WeightRole },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("no connected graph after {0} attempts")]
    GenerationExhausted(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An edge together with a direction. `tail` is where the arrow starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub reversed: bool,
    pub tail: VertexId,
    pub head: VertexId,
}

impl OrientedEdge {
    pub fn reverse(self) -> Self {
        OrientedEdge { edge: self.edge, reversed: !self.reversed, tail: self.head, head: self.tail }
    }
}

/// A finite simple undirected graph.
#[derive(Debug, Clone)]
pub struct BaseGraph {
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId)>,
    /// `(neighbor, edge id)`, sorted by neighbor.
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    connected: OnceLock<bool>,
}

impl PartialEq for BaseGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Eq for BaseGraph {}

impl BaseGraph {
    /// Builds a graph, normalizing each edge to `(min, max)` while keeping the
    /// supplied order.
    pub fn new(vertex_count: usize, edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (index, &(u, v)) in edge_list.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::EndpointOutOfRange { index, u, v, vertex_count });
            }
            if u == v {
                return Err(GraphError::SelfLoop { index, vertex: u });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { index, u, v });
            }
            adjacency[key.0].push((key.1, index));
            adjacency[key.1].push((key.0, index));
            edges.push(key);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(BaseGraph { vertex_count, edges, adjacency, connected: OnceLock::new() })
    }

    /// The path `P_n` on vertices `0..=n`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, i + 1)).collect();
        Self::new(n + 1, &edges).expect("path is simple")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges).expect("complete graph is simple")
    }

    /// The cycle `C_n`, `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least three vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle is simple")
    }

    /// The star `K_{1,leaves}` with center 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges).expect("star is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: EdgeId) -> (VertexId, VertexId) {
        self.edges[edge]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let list = self.adjacency.get(u)?;
        list.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| list[i].1)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v < self.vertex_count
    }

    /// Orientation of `edge` as stored (`reversed == false` means low id to high id).
    pub fn oriented(&self, edge: EdgeId, reversed: bool) -> OrientedEdge {
        let (a, b) = self.edges[edge];
        let (tail, head) = if reversed { (b, a) } else { (a, b) };
        OrientedEdge { edge, reversed, tail, head }
    }

    /// Both orientations of every edge.
    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        (0..self.edges.len()).flat_map(move |e| [self.oriented(e, false), self.oriented(e, true)])
    }

    /// Vertices reachable from `start`, optionally pretending `skip` is absent.
    pub fn reachable_from(&self, start: VertexId, skip: Option<EdgeId>) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &self.adjacency[x] {
                if Some(e) != skip && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        *self.connected.get_or_init(|| self.reachable_from(0, None).iter().all(|&s| s))
    }

    /// True iff deleting the edge `uv` disconnects `u` from `v`.
    pub fn is_cut_edge(&self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        let edge = self.edge_between(u, v).ok_or(GraphError::NotAnEdge { u, v })?;
        Ok(!self.reachable_from(u, Some(edge))[v])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_small_families() {
        let p2 = BaseGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!((p2.vertex_count(), p2.edge_count()), (3, 2));
        assert_eq!(p2, BaseGraph::path(2));

        let k1 = BaseGraph::new(1, &[]).unwrap();
        assert_eq!((k1.vertex_count(), k1.edge_count()), (1, 0));
        assert!(k1.is_connected());

        let k4 = BaseGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4, BaseGraph::complete(4));
        assert!((0..4).all(|v| k4.degree(v) == 3));
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(BaseGraph::new(0, &[]), Err(GraphError::Empty));
        assert!(matches!(BaseGraph::new(2, &[(0, 2)]), Err(GraphError::EndpointOutOfRange { .. })));
        assert!(matches!(BaseGraph::new(2, &[(1, 1)]), Err(GraphError::SelfLoop { .. })));
        assert!(matches!(
            BaseGraph::new(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { index: 1, .. })
        ));
    }

    #[test]
    fn normalizes_and_keeps_order() {
        let g = BaseGraph::new(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (0, 1)]);
        assert_eq!(g.neighbors(1), &[(0, 1), (2, 0)]);
        assert_eq!(g.edge_between(2, 1), Some(0));
        assert_eq!(g.edge_between(0, 2), None);
    }

    #[test]
    fn oriented_edge_reversal() {
        let g = BaseGraph::path(1);
        let e = g.oriented(0, false);
        assert_eq!((e.tail, e.head), (0, 1));
        let r = e.reverse();
        assert_eq!((r.tail, r.head, r.reversed), (1, 0, true));
        assert_eq!(r.reverse(), e);
        assert_eq!(g.oriented_edges().count(), 2);
    }

    #[test]
    fn cut_edges() {
        assert!(BaseGraph::path(3).is_cut_edge(1, 2).unwrap());
        let k4 = BaseGraph::complete(4);
        for &(u, v) in k4.edges() {
            assert!(!k4.is_cut_edge(u, v).unwrap());
        }
        // two triangles {0,1,2} and {3,4,5} bridged by 2-3
        let g = BaseGraph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
        assert!(g.is_cut_edge(2, 3).unwrap());
        assert!(!g.is_cut_edge(0, 1).unwrap());
        assert_eq!(g.is_cut_edge(0, 5), Err(GraphError::NotAnEdge { u: 0, v: 5 }));
    }

    #[test]
    fn connectivity() {
        assert!(BaseGraph::cycle(5).is_connected());
        assert!(!BaseGraph::new(3, &[(0, 1)]).unwrap().is_connected());
    }
}
