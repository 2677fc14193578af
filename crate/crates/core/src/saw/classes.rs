use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{enumerate, SawError, SawOptions, SawWalk, Tally, WalkVisitor};
use crate::graph::{BaseGraph, BunkbedGraph, EdgeId, Layer, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 5] = [ClassLabel::S1, ClassLabel::S2, ClassLabel::S3, ClassLabel::S4, ClassLabel::S5];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Class `S_i^j`: `label` is `i`, `target` is the layer of the end vertex `v_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SawClass {
    pub label: ClassLabel,
    pub target: Layer,
}

/// The four facts about a `u0 -> v_j` walk that decide its class.
#[derive(Debug, Clone, Copy)]
struct Features {
    target: Layer,
    visits_u1: bool,
    visits_other_v: bool,
    first_step_vertical: bool,
    last_step_vertical: bool,
}

impl Features {
    fn class(self) -> SawClass {
        use ClassLabel::*;
        let label = match self.target {
            Layer::Lower => {
                if !self.visits_other_v {
                    S1
                } else if self.last_step_vertical {
                    S2
                } else if !self.visits_u1 {
                    S3
                } else if self.first_step_vertical {
                    S4
                } else {
                    S5
                }
            }
            Layer::Upper => {
                if self.last_step_vertical {
                    S1
                } else if !self.visits_other_v {
                    S2
                } else if self.first_step_vertical {
                    S3
                } else if !self.visits_u1 {
                    S4
                } else {
                    S5
                }
            }
        };
        SawClass { label, target: self.target }
    }
}

struct Endpoints {
    u0: VertexId,
    u1: VertexId,
    v: [VertexId; 2],
}

impl Endpoints {
    fn new(bunkbed: &BunkbedGraph, u: VertexId, v: VertexId) -> Result<Self, SawError> {
        let n = bunkbed.base().vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(SawError::VertexOutOfRange(x));
            }
        }
        if u == v {
            return Err(SawError::SameEndpoints(u));
        }
        Ok(Endpoints {
            u0: bunkbed.vertex(u, Layer::Lower),
            u1: bunkbed.vertex(u, Layer::Upper),
            v: [bunkbed.vertex(v, Layer::Lower), bunkbed.vertex(v, Layer::Upper)],
        })
    }

    fn features(&self, target: Layer, vertices: &[VertexId], visited: impl Fn(VertexId) -> bool) -> Features {
        let other = self.v[target.flip().index()];
        Features {
            target,
            visits_u1: visited(self.u1),
            visits_other_v: visited(other),
            first_step_vertical: vertices[1] == self.u1,
            last_step_vertical: vertices[vertices.len() - 2] == other,
        }
    }
}

/// Class of a walk from `u0` to `v0` or `v1` in `G x K2`.
pub fn classify_walk(bunkbed: &BunkbedGraph, u: VertexId, v: VertexId, walk: &SawWalk) -> Result<SawClass, SawError> {
    let ends = Endpoints::new(bunkbed, u, v)?;
    if walk.start() != ends.u0 {
        return Err(SawError::WrongEndpoints);
    }
    let target = if walk.end() == ends.v[0] {
        Layer::Lower
    } else if walk.end() == ends.v[1] {
        Layer::Upper
    } else {
        return Err(SawError::WrongEndpoints);
    };
    let vs = walk.vertices();
    Ok(ends.features(target, vs, |x| vs.contains(&x)).class())
}

/// Class tallies for the walks `u0 -> v0` and `u0 -> v1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SawCensus {
    pub u: VertexId,
    pub v: VertexId,
    /// Indexed by `ClassLabel::index`.
    pub to_lower: [BigUint; 5],
    pub to_upper: [BigUint; 5],
}

impl SawCensus {
    pub fn counts(&self, target: Layer) -> &[BigUint; 5] {
        match target {
            Layer::Lower => &self.to_lower,
            Layer::Upper => &self.to_upper,
        }
    }

    pub fn count(&self, class: SawClass) -> &BigUint {
        &self.counts(class.target)[class.label.index()]
    }

    pub fn total(&self, target: Layer) -> BigUint {
        self.counts(target).iter().sum()
    }

    /// `|S_i^0| = |S_i^1|` for `i = 1..4`.
    pub fn bijective_classes_balanced(&self) -> bool {
        (0..4).all(|i| self.to_lower[i] == self.to_upper[i])
    }
}

struct ClassVisitor<'a> {
    ends: &'a Endpoints,
    target: Layer,
    tallies: [Tally; 5],
}

impl WalkVisitor for ClassVisitor<'_> {
    fn visit(&mut self, vertices: &[VertexId], _: &[EdgeId], visited: &[bool]) -> Result<(), SawError> {
        let class = self.ends.features(self.target, vertices, |x| visited[x]).class();
        self.tallies[class.label.index()].add(1);
        Ok(())
    }
}

/// Enumerates every self-avoiding walk `u0 -> v0` and `u0 -> v1` in `base x K2`
/// and tallies them by class. Only `options.deadline` is consulted.
pub fn census(base: &BaseGraph, u: VertexId, v: VertexId, options: &SawOptions) -> Result<SawCensus, SawError> {
    let bunkbed = BunkbedGraph::new(base.clone());
    census_on(&bunkbed, u, v, options)
}

pub(crate) fn census_on(bunkbed: &BunkbedGraph, u: VertexId, v: VertexId, options: &SawOptions) -> Result<SawCensus, SawError> {
    let ends = Endpoints::new(bunkbed, u, v)?;
    let mut out: [[BigUint; 5]; 2] = Default::default();
    for target in [Layer::Lower, Layer::Upper] {
        let branches = enumerate(bunkbed.graph(), ends.u0, ends.v[target.index()], options.deadline, || ClassVisitor {
            ends: &ends,
            target,
            tallies: Default::default(),
        })?;
        let mut merged: [Tally; 5] = Default::default();
        for b in &branches {
            for (m, t) in merged.iter_mut().zip(&b.tallies) {
                m.merge(t);
            }
        }
        out[target.index()] = merged.map(|t| t.value());
    }
    let [to_lower, to_upper] = out;
    Ok(SawCensus { u, v, to_lower, to_upper })
}
