use serde::{Deserialize, Serialize};

use super::{BaseGraph, EdgeId, VertexId};

/// Which copy of the base graph a bunkbed vertex lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    Lower = 0,
    Upper = 1,
}

impl Layer {
    pub fn flip(self) -> Self {
        match self {
            Layer::Lower => Layer::Upper,
            Layer::Upper => Layer::Lower,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Layer::Lower
        } else {
            Layer::Upper
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BunkbedEdge {
    Horizontal { base_edge: EdgeId, layer: Layer },
    Vertical { vertex: VertexId },
}

/// The Cartesian product `G x K2`.
///
/// Vertex `(u, layer)` has id `layer * n + u`. Edge ids: the layer-0 copies of
/// the base edges in base order, then the layer-1 copies, then the vertical
/// edges `u0 u1` by base vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BunkbedGraph {
    base: BaseGraph,
    product: BaseGraph,
}

impl BunkbedGraph {
    pub fn new(base: BaseGraph) -> Self {
        let n = base.vertex_count();
        let m = base.edge_count();
        let mut edges = Vec::with_capacity(2 * m + n);
        for layer in 0..2 {
            edges.extend(base.edges().iter().map(|&(a, b)| (a + layer * n, b + layer * n)));
        }
        edges.extend((0..n).map(|u| (u, u + n)));
        let product = BaseGraph::new(2 * n, &edges).expect("product of a simple graph is simple");
        BunkbedGraph { base, product }
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    /// The product as a plain graph.
    pub fn graph(&self) -> &BaseGraph {
        &self.product
    }

    pub fn vertex(&self, u: VertexId, layer: Layer) -> VertexId {
        u + layer.index() * self.base.vertex_count()
    }

    pub fn base_vertex(&self, id: VertexId) -> VertexId {
        id % self.base.vertex_count()
    }

    pub fn layer_of(&self, id: VertexId) -> Layer {
        Layer::from_index(id / self.base.vertex_count())
    }

    pub fn horizontal_edge(&self, base_edge: EdgeId, layer: Layer) -> EdgeId {
        base_edge + layer.index() * self.base.edge_count()
    }

    pub fn vertical_edge(&self, u: VertexId) -> EdgeId {
        2 * self.base.edge_count() + u
    }

    pub fn edge_kind(&self, edge: EdgeId) -> BunkbedEdge {
        let m = self.base.edge_count();
        if edge < m {
            BunkbedEdge::Horizontal { base_edge: edge, layer: Layer::Lower }
        } else if edge < 2 * m {
            BunkbedEdge::Horizontal { base_edge: edge - m, layer: Layer::Upper }
        } else {
            BunkbedEdge::Vertical { vertex: edge - 2 * m }
        }
    }

    /// The automorphism `(u, i) -> (u, 1 - i)`.
    pub fn reflect_vertex(&self, id: VertexId) -> VertexId {
        let n = self.base.vertex_count();
        if id < n {
            id + n
        } else {
            id - n
        }
    }

    pub fn reflect_edge(&self, edge: EdgeId) -> EdgeId {
        match self.edge_kind(edge) {
            BunkbedEdge::Horizontal { base_edge, layer } => self.horizontal_edge(base_edge, layer.flip()),
            BunkbedEdge::Vertical { .. } => edge,
        }
    }

    /// Equal weights on the two copies of every base edge. Vertical edges are
    /// unconstrained.
    pub fn is_reflection_symmetric<T: PartialEq>(&self, weights: &[T]) -> bool {
        let m = self.base.edge_count();
        weights.len() == self.product.edge_count() && (0..m).all(|e| weights[e] == weights[e + m])
    }

    /// Full bunkbed weight vector from one weight per base edge (used on both
    /// layers) and one per vertical edge.
    pub fn symmetric_weights<T: Clone>(&self, horizontal: &[T], vertical: &[T]) -> Vec<T> {
        assert_eq!(horizontal.len(), self.base.edge_count(), "one horizontal weight per base edge");
        assert_eq!(vertical.len(), self.base.vertex_count(), "one vertical weight per base vertex");
        let mut out = Vec::with_capacity(self.product.edge_count());
        out.extend_from_slice(horizontal);
        out.extend_from_slice(horizontal);
        out.extend_from_slice(vertical);
        out
    }

    /// Applies the reflection to a weight vector.
    pub fn reflect_weights<T: Clone>(&self, weights: &[T]) -> Vec<T> {
        (0..weights.len()).map(|e| weights[self.reflect_edge(e)].clone()).collect()
    }
}
