//! Canonical labeling and exhaustive generation of small connected graphs.
//!
//! Vertices are colored by iterated neighbor-multiset refinement seeded with
//! degrees. The canonical code is the smallest upper-triangle adjacency
//! bitstring over all orderings that list color cells in color order.
//! Refinement is isomorphism-invariant, so the code is a complete invariant.

use std::collections::BTreeSet;

use crate::graph::BaseGraph;

/// Largest vertex count [`canonical_code`] accepts (the code must fit a `u64`).
pub const MAX_CANON_VERTICES: usize = 11;

fn refine(n: usize, adj: &[Vec<bool>]) -> Vec<usize> {
    let mut color: Vec<usize> = (0..n).map(|v| adj[v].iter().filter(|&&b| b).count()).collect();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n).filter(|&w| adj[v][w]).map(|w| color[w]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let ranks: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sigs.iter().map(|s| ranks.binary_search(&s).expect("signature present")).collect();
        let before = color.iter().collect::<BTreeSet<_>>().len();
        if ranks.len() == before {
            return next;
        }
        color = next;
    }
}

fn code_of(order: &[usize], adj: &[Vec<bool>]) -> u64 {
    let n = order.len();
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            code = (code << 1) | u64::from(adj[order[i]][order[j]]);
        }
    }
    code
}

/// Recursively fills `order` cell by cell, trying every arrangement inside
/// each cell, and keeps the smallest code.
fn search(cells: &[Vec<usize>], ci: usize, order: &mut Vec<usize>, adj: &[Vec<bool>], best: &mut (u64, Vec<usize>)) {
    if ci == cells.len() {
        let c = code_of(order, adj);
        if c < best.0 || best.1.is_empty() {
            *best = (c, order.clone());
        }
        return;
    }
    permute(&cells[ci], &mut vec![false; cells[ci].len()], cells, ci, order, adj, best);
}

fn permute(
    cell: &[usize],
    used: &mut Vec<bool>,
    cells: &[Vec<usize>],
    ci: usize,
    order: &mut Vec<usize>,
    adj: &[Vec<bool>],
    best: &mut (u64, Vec<usize>),
) {
    let placed = used.iter().filter(|&&u| u).count();
    if placed == cell.len() {
        search(cells, ci + 1, order, adj, best);
        return;
    }
    for i in 0..cell.len() {
        if !used[i] {
            used[i] = true;
            order.push(cell[i]);
            permute(cell, used, cells, ci, order, adj, best);
            order.pop();
            used[i] = false;
        }
    }
}

/// Canonical code and the vertex ordering that attains it
/// (`order[new_label] = old_label`).
pub fn canonical_form(graph: &BaseGraph) -> (u64, Vec<usize>) {
    let n = graph.vertex_count();
    assert!(n <= MAX_CANON_VERTICES, "canonical labeling supports at most {MAX_CANON_VERTICES} vertices");
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in graph.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let color = refine(n, &adj);
    let k = color.iter().max().map_or(0, |m| m + 1);
    let mut cells = vec![Vec::new(); k];
    for (v, &c) in color.iter().enumerate() {
        cells[c].push(v);
    }
    let mut best = (0, Vec::new());
    search(&cells, 0, &mut Vec::with_capacity(n), &adj, &mut best);
    best
}

pub fn canonical_code(graph: &BaseGraph) -> u64 {
    canonical_form(graph).0
}

/// The graph relabeled into canonical order, edges listed lexicographically.
pub fn canonical_graph(graph: &BaseGraph) -> BaseGraph {
    let (_, order) = canonical_form(graph);
    let mut inv = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    let mut edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (inv[u], inv[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    BaseGraph::new(graph.vertex_count(), &edges).expect("relabeling preserves simplicity")
}

/// Every connected graph on `n` vertices up to isomorphism, in canonical form,
/// ordered by canonical code.
///
/// Each connected graph has a vertex whose removal leaves it connected, so
/// extending every `(n-1)`-vertex class by one vertex reaches every class.
pub fn connected_graphs(n: usize) -> Vec<BaseGraph> {
    assert!(n <= MAX_CANON_VERTICES);
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![BaseGraph::new(1, &[]).expect("single vertex")];
    for size in 2..=n {
        let mut seen = std::collections::BTreeMap::new();
        for g in &level {
            let old = size - 1;
            for mask in 1u32..(1 << old) {
                let mut edges = g.edges().to_vec();
                edges.extend((0..old).filter(|&v| mask >> v & 1 == 1).map(|v| (v, old)));
                let h = BaseGraph::new(size, &edges).expect("new vertex adds fresh edges");
                let (code, _) = canonical_form(&h);
                seen.entry(code).or_insert_with(|| canonical_graph(&h));
            }
        }
        level = seen.into_values().collect();
    }
    level
}

/// All connected graphs with `2 <= n <= n_max` vertices, grouped by `n`.
pub fn connected_graphs_up_to(n_max: usize) -> Vec<BaseGraph> {
    (2..=n_max).flat_map(connected_graphs).collect()
}
