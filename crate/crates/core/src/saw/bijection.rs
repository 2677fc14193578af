use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::classes::classify_walk;
use super::{count_saw, ClassLabel, SawClass, SawError, SawOptions, SawWalk};
use crate::graph::{BaseGraph, BunkbedGraph, Layer, VertexId};

fn reflect(bunkbed: &BunkbedGraph, walk: &SawWalk) -> SawWalk {
    SawWalk::from_parts(
        walk.vertices().iter().map(|&x| bunkbed.reflect_vertex(x)).collect(),
        walk.edges().iter().map(|&e| bunkbed.reflect_edge(e)).collect(),
    )
}

fn prepend(walk: &SawWalk, vertex: VertexId, edge: usize) -> SawWalk {
    let mut vertices = Vec::with_capacity(walk.vertices().len() + 1);
    vertices.push(vertex);
    vertices.extend_from_slice(walk.vertices());
    let mut edges = Vec::with_capacity(walk.edges().len() + 1);
    edges.push(edge);
    edges.extend_from_slice(walk.edges());
    SawWalk::from_parts(vertices, edges)
}

fn append(walk: &SawWalk, vertex: VertexId, edge: usize) -> SawWalk {
    let mut w = walk.clone();
    w.vertices.push(vertex);
    w.edges.push(edge);
    w
}

fn drop_first(walk: &SawWalk) -> SawWalk {
    SawWalk::from_parts(walk.vertices()[1..].to_vec(), walk.edges()[1..].to_vec())
}

fn drop_last(walk: &SawWalk) -> SawWalk {
    let k = walk.vertices().len();
    SawWalk::from_parts(walk.vertices()[..k - 1].to_vec(), walk.edges()[..k - 2].to_vec())
}

fn expect_class(bunkbed: &BunkbedGraph, u: VertexId, v: VertexId, walk: &SawWalk, expected: SawClass) -> Result<(), SawError> {
    let found = classify_walk(bunkbed, u, v, walk)?;
    if found != expected {
        return Err(SawError::WrongClass { expected, found });
    }
    Ok(())
}

fn bijective(label: ClassLabel) -> Result<(), SawError> {
    if label == ClassLabel::S5 {
        return Err(SawError::OutOfRange("S5 has no bijection".into()));
    }
    Ok(())
}

/// The map `S_i^0 -> S_i^1` for `i` in `1..=4`.
pub fn bijection_map(bunkbed: &BunkbedGraph, u: VertexId, v: VertexId, label: ClassLabel, walk: &SawWalk) -> Result<SawWalk, SawError> {
    bijective(label)?;
    expect_class(bunkbed, u, v, walk, SawClass { label, target: Layer::Lower })?;
    let (u1, v1) = (bunkbed.vertex(u, Layer::Upper), bunkbed.vertex(v, Layer::Upper));
    Ok(match label {
        ClassLabel::S1 => append(walk, v1, bunkbed.vertical_edge(v)),
        ClassLabel::S2 => drop_last(walk),
        ClassLabel::S3 => prepend(&reflect(bunkbed, walk), bunkbed.vertex(u, Layer::Lower), bunkbed.vertical_edge(u)),
        ClassLabel::S4 => {
            debug_assert_eq!(walk.vertices()[1], u1);
            reflect(bunkbed, &drop_first(walk))
        }
        ClassLabel::S5 => unreachable!(),
    })
}

/// The inverse map `S_i^1 -> S_i^0`.
pub fn inverse_bijection_map(
    bunkbed: &BunkbedGraph,
    u: VertexId,
    v: VertexId,
    label: ClassLabel,
    walk: &SawWalk,
) -> Result<SawWalk, SawError> {
    bijective(label)?;
    expect_class(bunkbed, u, v, walk, SawClass { label, target: Layer::Upper })?;
    let u0 = bunkbed.vertex(u, Layer::Lower);
    Ok(match label {
        ClassLabel::S1 => drop_last(walk),
        ClassLabel::S2 => append(walk, bunkbed.vertex(v, Layer::Lower), bunkbed.vertical_edge(v)),
        ClassLabel::S3 => reflect(bunkbed, &drop_first(walk)),
        ClassLabel::S4 => prepend(&reflect(bunkbed, walk), u0, bunkbed.vertical_edge(u)),
        ClassLabel::S5 => unreachable!(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionCheck {
    pub label: ClassLabel,
    pub source_size: usize,
    pub target_size: usize,
    /// Every image lands in `S_i^1`.
    pub class_preserving: bool,
    pub injective: bool,
    pub surjective: bool,
    /// Inverse after forward is the identity, and vice versa.
    pub inverse_ok: bool,
}

impl BijectionCheck {
    pub fn ok(&self) -> bool {
        self.class_preserving && self.injective && self.surjective && self.inverse_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub u: VertexId,
    pub v: VertexId,
    pub checks: Vec<BijectionCheck>,
}

impl BijectionReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(BijectionCheck::ok)
    }
}

/// Enumerates and stores every walk, then checks the four maps exhaustively.
pub fn verify_bijections(base: &BaseGraph, u: VertexId, v: VertexId, options: &SawOptions) -> Result<BijectionReport, SawError> {
    let bunkbed = BunkbedGraph::new(base.clone());
    let opts = SawOptions { store_walks: true, ..options.clone() };
    let mut classes: BTreeMap<(ClassLabel, usize), Vec<SawWalk>> = BTreeMap::new();
    for layer in [Layer::Lower, Layer::Upper] {
        if u >= base.vertex_count() || v >= base.vertex_count() {
            return Err(SawError::VertexOutOfRange(u.max(v)));
        }
        let walks = count_saw(bunkbed.graph(), bunkbed.vertex(u, Layer::Lower), bunkbed.vertex(v, layer), &opts)?
            .walks
            .unwrap_or_default();
        for w in walks {
            let class = classify_walk(&bunkbed, u, v, &w)?;
            classes.entry((class.label, class.target.index())).or_default().push(w);
        }
    }
    let mut checks = Vec::new();
    for label in &ClassLabel::ALL[..4] {
        let source = classes.remove(&(*label, 0)).unwrap_or_default();
        let target = classes.remove(&(*label, 1)).unwrap_or_default();
        let target_set: HashSet<&SawWalk> = target.iter().collect();
        let mut images = HashSet::new();
        let mut class_preserving = true;
        let mut inverse_ok = true;
        for w in &source {
            let image = bijection_map(&bunkbed, u, v, *label, w)?;
            match inverse_bijection_map(&bunkbed, u, v, *label, &image) {
                Ok(back) => inverse_ok &= back == *w,
                Err(_) => class_preserving = false,
            }
            class_preserving &= target_set.contains(&image);
            images.insert(image);
        }
        for w in &target {
            match inverse_bijection_map(&bunkbed, u, v, *label, w).and_then(|back| bijection_map(&bunkbed, u, v, *label, &back)) {
                Ok(again) => inverse_ok &= again == *w,
                Err(_) => inverse_ok = false,
            }
        }
        checks.push(BijectionCheck {
            label: *label,
            source_size: source.len(),
            target_size: target.len(),
            class_preserving,
            injective: images.len() == source.len(),
            surjective: target.iter().all(|w| images.contains(w)),
            inverse_ok,
        });
    }
    Ok(BijectionReport { u, v, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_on_small_graphs_are_bijections() {
        for base in [BaseGraph::complete(4), BaseGraph::cycle(5), BaseGraph::path(3), BaseGraph::star(3)] {
            let n = base.vertex_count();
            for u in 0..n {
                for v in 0..n {
                    if u != v {
                        let r = verify_bijections(&base, u, v, &SawOptions::storing(1_000_000)).unwrap();
                        assert!(r.all_ok(), "{r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_images_on_the_square() {
        // K2 x K2: u0=0 v0=1 u1=2 v1=3.
        let b = BunkbedGraph::new(BaseGraph::path(1));
        let g = b.graph();
        let s1 = SawWalk::from_vertices(g, vec![0, 1]).unwrap();
        assert_eq!(bijection_map(&b, 0, 1, ClassLabel::S1, &s1).unwrap().vertices(), &[0, 1, 3]);
        let s2 = SawWalk::from_vertices(g, vec![0, 2, 3, 1]).unwrap();
        assert_eq!(bijection_map(&b, 0, 1, ClassLabel::S2, &s2).unwrap().vertices(), &[0, 2, 3]);
        assert!(matches!(bijection_map(&b, 0, 1, ClassLabel::S3, &s1), Err(SawError::WrongClass { .. })));
        assert!(matches!(bijection_map(&b, 0, 1, ClassLabel::S5, &s1), Err(SawError::OutOfRange(_))));
    }

    #[test]
    fn s3_and_s4_use_the_reflection() {
        // C4 x K2 with u=0, v=2; x1 = x + 4.
        let b = BunkbedGraph::new(BaseGraph::cycle(4));
        let g = b.graph();
        let s3 = SawWalk::from_vertices(g, vec![0, 1, 5, 6, 7, 3, 2]).unwrap();
        let img = bijection_map(&b, 0, 2, ClassLabel::S3, &s3).unwrap();
        assert_eq!(img.vertices(), &[0, 4, 5, 1, 2, 3, 7, 6]);
        assert_eq!(classify_walk(&b, 0, 2, &img).unwrap(), SawClass { label: ClassLabel::S3, target: Layer::Upper });
        assert_eq!(inverse_bijection_map(&b, 0, 2, ClassLabel::S3, &img).unwrap(), s3);

        let s4 = SawWalk::from_vertices(g, vec![0, 4, 5, 6, 7, 3, 2]).unwrap();
        let img = bijection_map(&b, 0, 2, ClassLabel::S4, &s4).unwrap();
        assert_eq!(img.vertices(), &[0, 1, 2, 3, 7, 6]);
        assert_eq!(classify_walk(&b, 0, 2, &img).unwrap(), SawClass { label: ClassLabel::S4, target: Layer::Upper });
        assert_eq!(inverse_bijection_map(&b, 0, 2, ClassLabel::S4, &img).unwrap(), s4);
    }
}
