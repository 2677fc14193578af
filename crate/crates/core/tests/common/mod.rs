//! Independent reference implementations. Nothing here calls the solvers
//! under test: cuts are enumerated, resistances come from an exact
//! Laplacian solve and walks from a plain adjacency-matrix search.
#![allow(dead_code)]

use bunkbed_core::graph::{BaseGraph, SplitMix64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Positive rationals `a/b` with `1 <= a <= 12`, `1 <= b <= 6`.
pub fn random_weights(rng: &mut SplitMix64, count: usize) -> Vec<BigRational> {
    (0..count).map(|_| rat(rng.below(12) as i64 + 1, rng.below(6) as i64 + 1)).collect()
}

/// Bunkbed edge list with vertex `(w, layer)` at `layer * n + w`, built
/// without the library's product construction. Order matches the library:
/// lower copies, upper copies, then verticals.
pub fn bunkbed_edges(n: usize, base: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = base.to_vec();
    out.extend(base.iter().map(|&(a, b)| (a + n, b + n)));
    out.extend((0..n).map(|w| (w, w + n)));
    out
}

/// Minimum `s`-`t` cut by enumerating every vertex subset containing `s`
/// but not `t`. Exponential; meant for at most a dozen vertices.
pub fn brute_min_cut(n: usize, edges: &[(usize, usize)], caps: &[BigRational], s: usize, t: usize) -> BigRational {
    assert!(n <= 16, "cut enumeration is exponential");
    let mut best: Option<BigRational> = None;
    for mask in 0u32..(1 << n) {
        if mask >> s & 1 == 0 || mask >> t & 1 == 1 {
            continue;
        }
        let value = edges
            .iter()
            .zip(caps)
            .filter(|(&(a, b), _)| (mask >> a & 1) != (mask >> b & 1))
            .fold(BigRational::zero(), |acc, (_, c)| acc + c);
        if best.as_ref().is_none_or(|b| value < *b) {
            best = Some(value);
        }
    }
    best.expect("s != t leaves at least one subset")
}

/// Effective resistance between `s` and `t` by exact Gaussian elimination
/// on the grounded conductance Laplacian.
pub fn laplacian_resistance(n: usize, edges: &[(usize, usize)], resistances: &[BigRational], s: usize, t: usize) -> BigRational {
    let mut lap = vec![vec![BigRational::zero(); n]; n];
    for (&(a, b), r) in edges.iter().zip(resistances) {
        let c = r.recip();
        lap[a][a] += &c;
        lap[b][b] += &c;
        lap[a][b] -= &c;
        lap[b][a] -= &c;
    }
    // drop row and column t
    let idx: Vec<usize> = (0..n).filter(|&i| i != t).collect();
    let m = idx.len();
    let mut a: Vec<Vec<BigRational>> = idx.iter().map(|&i| idx.iter().map(|&j| lap[i][j].clone()).collect()).collect();
    let mut rhs: Vec<BigRational> = idx.iter().map(|&i| if i == s { BigRational::one() } else { BigRational::zero() }).collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero()).expect("connected graph gives a nonsingular minor");
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &f * y;
                }
                let d = &f * &rhs[col];
                rhs[r] -= d;
            }
        }
    }
    let k = idx.iter().position(|&i| i == s).unwrap();
    &rhs[k] / &a[k][k]
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

fn walks(adj: &[Vec<bool>], a: usize, b: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(adj: &[Vec<bool>], b: usize, path: &mut Vec<usize>, seen: &mut [bool], visit: &mut dyn FnMut(&[usize])) {
        let here = *path.last().unwrap();
        if here == b {
            visit(path);
            return;
        }
        for next in 0..adj.len() {
            if adj[here][next] && !seen[next] {
                seen[next] = true;
                path.push(next);
                go(adj, b, path, seen, visit);
                path.pop();
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; adj.len()];
    seen[a] = true;
    go(adj, b, &mut vec![a], &mut seen, visit);
}

/// Number of self-avoiding walks from `a` to `b`.
pub fn saw_count(n: usize, edges: &[(usize, usize)], a: usize, b: usize) -> u64 {
    let mut count = 0;
    walks(&adjacency(n, edges), a, b, &mut |_| count += 1);
    count
}

/// Every self-avoiding walk from `a` to `b`, as vertex sequences.
pub fn saw_list(n: usize, edges: &[(usize, usize)], a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    walks(&adjacency(n, edges), a, b, &mut |w| out.push(w.to_vec()));
    out
}

/// Class index (0-based) of a walk from `u0` to `v0` or `v1`, read straight
/// off the five set definitions rather than a decision chain. Panics unless
/// exactly one definition matches.
pub fn oracle_class(n: usize, u: usize, v: usize, walk: &[usize]) -> usize {
    let (u1, v0, v1) = (u + n, v, v + n);
    let to_lower = *walk.last().unwrap() == v0;
    let other = if to_lower { v1 } else { v0 };
    let visits = |x: usize| walk.contains(&x);
    let first_vertical = walk[1] == u1;
    let last_vertical = walk[walk.len() - 2] == other;
    let member = if to_lower {
        [
            !visits(v1),
            last_vertical,
            visits(v1) && !last_vertical && !visits(u1),
            visits(v1) && !last_vertical && first_vertical,
            visits(v1) && visits(u1) && !first_vertical && !last_vertical,
        ]
    } else {
        [
            last_vertical,
            !visits(v0),
            visits(v0) && !last_vertical && first_vertical,
            visits(v0) && !last_vertical && !first_vertical && !visits(u1),
            visits(v0) && visits(u1) && !first_vertical && !last_vertical,
        ]
    };
    let hits: Vec<usize> = (0..5).filter(|&i| member[i]).collect();
    assert_eq!(hits.len(), 1, "walk {walk:?} matches classes {hits:?}");
    hits[0]
}

/// Per-class counts `[to v0, to v1]` on `base x K2` by brute force.
pub fn oracle_census(base: &BaseGraph, u: usize, v: usize) -> [[u64; 5]; 2] {
    let n = base.vertex_count();
    let edges = bunkbed_edges(n, base.edges());
    let adj = adjacency(2 * n, &edges);
    let mut out = [[0u64; 5]; 2];
    for (j, target) in [v, v + n].into_iter().enumerate() {
        walks(&adj, u, target, &mut |w| out[j][oracle_class(n, u, v, w)] += 1);
    }
    out
}
