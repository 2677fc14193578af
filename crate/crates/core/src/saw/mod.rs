//! Self-avoiding walk enumeration, the five-class decomposition on bunkbed
//! graphs, the explicit class bijections and the ladder formulas.
//!
//! Enumeration is depth-first with neighbors visited in ascending vertex id,
//! so walk streams are canonical. The search forest is split by the first
//! edge out of the start vertex and branches run in parallel; results are
//! merged by branch index, so output never depends on the thread count.

mod bijection;
mod classes;
mod ladder;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{BaseGraph, EdgeId, VertexId};

pub use bijection::{bijection_map, inverse_bijection_map, verify_bijections, BijectionCheck, BijectionReport};
pub use classes::{census, classify_walk, ClassLabel, SawCensus, SawClass};
pub use ladder::{
    ladder_expected_relation, ladder_interior_walks, ladder_pair_report, ladder_s5_adjacent, ladder_s5_distant, verify_ladder_proposition, LadderPairReport,
    LadderReport, Relation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SawError {
    #[error("walk endpoints must differ (both are {0})")]
    SameEndpoints(VertexId),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("more than {limit} walks to store")]
    WalkLimitExceeded { limit: usize },
    #[error("enumeration passed its deadline")]
    TimedOut,
    #[error("walk does not run from u0 to v0 or v1")]
    WrongEndpoints,
    #[error("walk is in class {found:?}, expected {expected:?}")]
    WrongClass { expected: SawClass, found: SawClass },
    #[error("not a self-avoiding walk: {0}")]
    InvalidWalk(String),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
}

/// `(w0, e1, w1, ..., en, wn)` with distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SawWalk {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl SawWalk {
    /// Builds the walk through `vertices`, looking the edges up in `graph`.
    pub fn from_vertices(graph: &BaseGraph, vertices: Vec<VertexId>) -> Result<Self, SawError> {
        if vertices.len() < 2 {
            return Err(SawError::InvalidWalk("needs at least one step".into()));
        }
        let mut seen = vec![false; graph.vertex_count()];
        for &v in &vertices {
            if !graph.contains_vertex(v) {
                return Err(SawError::VertexOutOfRange(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(SawError::InvalidWalk(format!("vertex {v} repeats")));
            }
        }
        let edges = vertices
            .windows(2)
            .map(|w| graph.edge_between(w[0], w[1]).ok_or_else(|| SawError::InvalidWalk(format!("{} and {} are not adjacent", w[0], w[1]))))
            .collect::<Result<_, _>>()?;
        Ok(SawWalk { vertices, edges })
    }

    fn from_parts(vertices: Vec<VertexId>, edges: Vec<EdgeId>) -> Self {
        SawWalk { vertices, edges }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("walks have at least one vertex")
    }

    pub fn reversed(&self) -> SawWalk {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.reverse();
        edges.reverse();
        SawWalk { vertices, edges }
    }
}

#[derive(Debug, Clone)]
pub struct SawOptions {
    pub store_walks: bool,
    pub max_walks: usize,
    pub deadline: Option<Instant>,
}

impl Default for SawOptions {
    fn default() -> Self {
        SawOptions { store_walks: false, max_walks: 1_000_000, deadline: None }
    }
}

impl SawOptions {
    pub fn storing(max_walks: usize) -> Self {
        SawOptions { store_walks: true, max_walks, deadline: None }
    }
}

/// A counter that stays in `u128` until it would overflow.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    small: u128,
    big: Option<BigUint>,
}

impl Tally {
    pub fn add(&mut self, amount: u128) {
        match self.small.checked_add(amount) {
            Some(s) => self.small = s,
            None => {
                let big = self.big.get_or_insert_with(BigUint::default);
                *big += self.small;
                *big += amount;
                self.small = 0;
            }
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.add(other.small);
        if let Some(b) = &other.big {
            *self.big.get_or_insert_with(BigUint::default) += b;
        }
    }

    pub fn value(&self) -> BigUint {
        let mut v = BigUint::from(self.small);
        if let Some(b) = &self.big {
            v += b;
        }
        v
    }
}

/// Receives every complete walk found by the enumerator.
pub(crate) trait WalkVisitor: Send {
    fn visit(&mut self, vertices: &[VertexId], edges: &[EdgeId], visited: &[bool]) -> Result<(), SawError>;
}

struct Search<'g, V> {
    graph: &'g BaseGraph,
    target: VertexId,
    visited: Vec<bool>,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    deadline: Option<Instant>,
    steps: u64,
    visitor: V,
}

impl<V: WalkVisitor> Search<'_, V> {
    fn descend(&mut self) -> Result<(), SawError> {
        let x = *self.vertices.last().expect("search path is never empty");
        if x == self.target {
            return self.visitor.visit(&self.vertices, &self.edges, &self.visited);
        }
        self.steps += 1;
        if self.steps & 0xFFF == 1 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(SawError::TimedOut);
                }
            }
        }
        let graph = self.graph;
        for &(y, e) in graph.neighbors(x) {
            if !self.visited[y] {
                self.visited[y] = true;
                self.vertices.push(y);
                self.edges.push(e);
                let r = self.descend();
                self.edges.pop();
                self.vertices.pop();
                self.visited[y] = false;
                r?;
            }
        }
        Ok(())
    }
}

/// Runs one visitor per first edge out of `a`, in parallel, and returns them
/// in ascending neighbor order.
pub(crate) fn enumerate<V, M>(
    graph: &BaseGraph,
    a: VertexId,
    b: VertexId,
    deadline: Option<Instant>,
    make: M,
) -> Result<Vec<V>, SawError>
where
    V: WalkVisitor,
    M: Fn() -> V + Sync,
{
    for v in [a, b] {
        if !graph.contains_vertex(v) {
            return Err(SawError::VertexOutOfRange(v));
        }
    }
    if a == b {
        return Err(SawError::SameEndpoints(a));
    }
    graph
        .neighbors(a)
        .par_iter()
        .map(|&(first, edge)| {
            let mut visited = vec![false; graph.vertex_count()];
            visited[a] = true;
            visited[first] = true;
            let mut search = Search {
                graph,
                target: b,
                visited,
                vertices: vec![a, first],
                edges: vec![edge],
                deadline,
                steps: 0,
                visitor: make(),
            };
            search.descend()?;
            Ok(search.visitor)
        })
        .collect()
}

struct CountVisitor<'a> {
    count: Tally,
    walks: Option<Vec<SawWalk>>,
    stored: &'a AtomicUsize,
    limit: usize,
}

impl WalkVisitor for CountVisitor<'_> {
    fn visit(&mut self, vertices: &[VertexId], edges: &[EdgeId], _: &[bool]) -> Result<(), SawError> {
        self.count.add(1);
        if let Some(walks) = &mut self.walks {
            if self.stored.fetch_add(1, Ordering::Relaxed) >= self.limit {
                return Err(SawError::WalkLimitExceeded { limit: self.limit });
            }
            walks.push(SawWalk::from_parts(vertices.to_vec(), edges.to_vec()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SawCount {
    pub count: BigUint,
    /// Present when walks were stored, in canonical order.
    pub walks: Option<Vec<SawWalk>>,
}

/// Counts the self-avoiding walks from `a` to `b`.
pub fn count_saw(graph: &BaseGraph, a: VertexId, b: VertexId, options: &SawOptions) -> Result<SawCount, SawError> {
    let stored = AtomicUsize::new(0);
    let branches = enumerate(graph, a, b, options.deadline, || CountVisitor {
        count: Tally::default(),
        walks: options.store_walks.then(Vec::new),
        stored: &stored,
        limit: options.max_walks,
    })?;
    let mut count = Tally::default();
    let mut walks = options.store_walks.then(Vec::new);
    for branch in branches {
        count.merge(&branch.count);
        if let (Some(all), Some(mine)) = (&mut walks, branch.walks) {
            all.extend(mine);
        }
    }
    Ok(SawCount { count: count.value(), walks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(g: &BaseGraph, a: usize, b: usize) -> u64 {
        let c = count_saw(g, a, b, &SawOptions::default()).unwrap().count;
        u64::try_from(c).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(&BaseGraph::path(2), 0, 2), 1);
        assert_eq!(count(&BaseGraph::complete(3), 0, 1), 2);
        // 1 direct + 2 via one vertex + 2 via both
        assert_eq!(count(&BaseGraph::complete(4), 0, 1), 5);
        assert_eq!(count(&BaseGraph::cycle(6), 0, 3), 2);
    }

    #[test]
    fn stored_walks_are_canonical() {
        let g = BaseGraph::complete(4);
        let r = count_saw(&g, 0, 1, &SawOptions::storing(100)).unwrap();
        let walks = r.walks.unwrap();
        let seqs: Vec<Vec<usize>> = walks.iter().map(|w| w.vertices().to_vec()).collect();
        assert_eq!(seqs, vec![vec![0, 1], vec![0, 2, 1], vec![0, 2, 3, 1], vec![0, 3, 1], vec![0, 3, 2, 1]]);
        for w in &walks {
            assert_eq!(SawWalk::from_vertices(&g, w.vertices().to_vec()).unwrap(), *w);
        }
    }

    #[test]
    fn walk_limit() {
        let g = BaseGraph::complete(5);
        assert_eq!(
            count_saw(&g, 0, 1, &SawOptions::storing(3)).unwrap_err(),
            SawError::WalkLimitExceeded { limit: 3 }
        );
    }

    #[test]
    fn rejects_degenerate_endpoints() {
        let g = BaseGraph::path(2);
        assert_eq!(count_saw(&g, 1, 1, &SawOptions::default()).unwrap_err(), SawError::SameEndpoints(1));
        assert_eq!(count_saw(&g, 0, 9, &SawOptions::default()).unwrap_err(), SawError::VertexOutOfRange(9));
    }

    #[test]
    fn deadline_in_the_past_times_out() {
        let g = BaseGraph::complete(9);
        let opts = SawOptions { deadline: Some(Instant::now()), ..SawOptions::default() };
        assert_eq!(count_saw(&g, 0, 1, &opts).unwrap_err(), SawError::TimedOut);
    }

    #[test]
    fn walk_validation() {
        let g = BaseGraph::path(3);
        assert!(SawWalk::from_vertices(&g, vec![0, 1, 2]).is_ok());
        assert!(SawWalk::from_vertices(&g, vec![0, 2]).is_err());
        assert!(SawWalk::from_vertices(&g, vec![0, 1, 0]).is_err());
        assert!(SawWalk::from_vertices(&g, vec![0]).is_err());
        let w = SawWalk::from_vertices(&g, vec![0, 1, 2]).unwrap();
        assert_eq!(w.reversed().vertices(), &[2, 1, 0]);
        assert_eq!(w.reversed().edges(), &[1, 0]);
    }

    #[test]
    fn tally_promotes_past_u128() {
        let mut t = Tally::default();
        t.add(u128::MAX);
        t.add(5);
        let mut other = Tally::default();
        other.add(u128::MAX);
        t.merge(&other);
        let expected = BigUint::from(u128::MAX) * 2u32 + 5u32;
        assert_eq!(t.value(), expected);
    }
}
