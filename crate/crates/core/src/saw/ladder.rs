use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::Serialize;

use super::classes::census_on;
use super::{count_saw, ClassLabel, SawError, SawOptions};
use crate::graph::{BaseGraph, BunkbedGraph, Layer};

/// `|S5(u0, v0)|` on `P_n x K2` for `u = k`, `v = k + 1`; the cross count is 0.
pub fn ladder_s5_adjacent(n: usize, k: usize) -> Result<BigUint, SawError> {
    if n < 4 || k < 1 || k > n - 2 {
        return Err(SawError::OutOfRange(format!("need n >= 4 and 1 <= k <= n-2, got n={n}, k={k}")));
    }
    Ok(BigUint::from(k) * BigUint::from(n - k - 1))
}

/// Walk counts from `(0,0)` to `(m-2, 0)` and `(m-2, 1)` on `P_{m-2} x K2`, for `m >= 3`.
pub fn ladder_interior_walks(m: usize) -> Result<[BigUint; 2], SawError> {
    if m < 3 {
        return Err(SawError::OutOfRange(format!("need m >= 3, got {m}")));
    }
    let b = BunkbedGraph::new(BaseGraph::path(m - 2));
    let start = b.vertex(0, Layer::Lower);
    let mut out: [BigUint; 2] = Default::default();
    for layer in [Layer::Lower, Layer::Upper] {
        out[layer.index()] = count_saw(b.graph(), start, b.vertex(m - 2, layer), &SawOptions::default())?.count;
    }
    Ok(out)
}

/// `(|S5(u0,v0)|, |S5(u0,v1)|)` on `P_n x K2` for `u = k`, `v = k + m`, `m >= 2`.
pub fn ladder_s5_distant(n: usize, k: usize, m: usize) -> Result<(BigUint, BigUint), SawError> {
    if n < 4 || k < 1 || m < 2 || k + m > n - 1 {
        return Err(SawError::OutOfRange(format!("need n >= 4, k >= 1, m >= 2, k+m <= n-1, got n={n}, k={k}, m={m}")));
    }
    let outer = BigUint::from(k) * BigUint::from(n - k - m);
    if m == 2 {
        return Ok((outer.clone(), outer));
    }
    let [f0, f1] = ladder_interior_walks(m)?;
    Ok((&outer * f0, outer * f1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl From<Ordering> for Relation {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Relation::Less,
            Ordering::Equal => Relation::Equal,
            Ordering::Greater => Relation::Greater,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderPairReport {
    pub u: usize,
    pub v: usize,
    pub total_same: BigUint,
    pub total_cross: BigUint,
    pub s5_same: BigUint,
    pub s5_cross: BigUint,
    /// The relation the case table expects between the two totals.
    pub expected: Relation,
    pub observed: Relation,
    /// Closed-form S5 counts, when both vertices are interior and `n >= 4`.
    pub formula: Option<(BigUint, BigUint)>,
}

impl LadderPairReport {
    pub fn relation_matches(&self) -> bool {
        self.expected == self.observed
    }

    pub fn formula_matches(&self) -> bool {
        self.formula.as_ref().is_none_or(|(a, b)| *a == self.s5_same && *b == self.s5_cross)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderReport {
    pub n: usize,
    pub pairs: Vec<LadderPairReport>,
}

impl LadderReport {
    pub fn all_relations_match(&self) -> bool {
        self.pairs.iter().all(LadderPairReport::relation_matches)
    }

    pub fn all_formulas_match(&self) -> bool {
        self.pairs.iter().all(LadderPairReport::formula_matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &LadderPairReport> {
        self.pairs.iter().filter(|p| !p.relation_matches() || !p.formula_matches())
    }
}

/// Claimed relation between `|S(u0,v0)|` and `|S(u0,v1)|` on `P_n x K2`.
pub fn ladder_expected_relation(n: usize, u: usize, v: usize) -> Relation {
    let interior = |x: usize| x > 0 && x < n;
    if n >= 4 && u.abs_diff(v) == 1 && interior(u) && interior(v) {
        Relation::Greater
    } else {
        Relation::Equal
    }
}

/// Census of one ordered pair on `P_n x K2`, with the claimed relation and,
/// where defined, the closed-form S5 counts.
pub fn ladder_pair_report(n: usize, u: usize, v: usize, options: &SawOptions) -> Result<LadderPairReport, SawError> {
    let bunkbed = BunkbedGraph::new(BaseGraph::path(n));
    ladder_pair_on(&bunkbed, n, u, v, options)
}

fn ladder_pair_on(bunkbed: &BunkbedGraph, n: usize, u: usize, v: usize, options: &SawOptions) -> Result<LadderPairReport, SawError> {
    let c = census_on(bunkbed, u, v, options)?;
    let (total_same, total_cross) = (c.total(Layer::Lower), c.total(Layer::Upper));
    let s5 = ClassLabel::S5.index();
    let k = u.min(v);
    let m = u.abs_diff(v);
    let formula = if n >= 4 && k >= 1 && k + m < n {
        Some(if m == 1 { (ladder_s5_adjacent(n, k)?, BigUint::default()) } else { ladder_s5_distant(n, k, m)? })
    } else {
        None
    };
    Ok(LadderPairReport {
        u,
        v,
        observed: total_same.cmp(&total_cross).into(),
        expected: ladder_expected_relation(n, u, v),
        total_same,
        total_cross,
        s5_same: c.to_lower[s5].clone(),
        s5_cross: c.to_upper[s5].clone(),
        formula,
    })
}

/// Census of every ordered pair `u != v` on `P_n x K2`, compared with the
/// case table and with the closed-form S5 counts.
pub fn verify_ladder_proposition(n: usize) -> Result<LadderReport, SawError> {
    if n < 2 {
        return Err(SawError::OutOfRange(format!("need n >= 2, got {n}")));
    }
    let bunkbed = BunkbedGraph::new(BaseGraph::path(n));
    let mut pairs = Vec::new();
    for u in 0..=n {
        for v in (0..=n).filter(|&v| v != u) {
            pairs.push(ladder_pair_on(&bunkbed, n, u, v, &SawOptions::default())?);
        }
    }
    Ok(LadderReport { n, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_examples() {
        assert_eq!(ladder_s5_adjacent(4, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(ladder_s5_adjacent(5, 2).unwrap(), BigUint::from(4u32));
        assert!(ladder_s5_adjacent(3, 1).is_err());
        assert!(ladder_s5_adjacent(5, 4).is_err());
        assert!(ladder_s5_adjacent(5, 0).is_err());
    }

    #[test]
    fn interior_walk_counts_agree_across_layers() {
        for m in 3..=7 {
            let [f0, f1] = ladder_interior_walks(m).unwrap();
            assert_eq!(f0, f1, "m={m}");
        }
        // P1 x K2 is a 4-cycle.
        assert_eq!(ladder_interior_walks(3).unwrap(), [BigUint::from(2u32), BigUint::from(2u32)]);
        assert!(ladder_interior_walks(2).is_err());
    }

    #[test]
    fn distant_bounds() {
        let (a, b) = ladder_s5_distant(6, 1, 2).unwrap();
        assert_eq!(a, BigUint::from(3u32));
        assert_eq!(a, b);
        assert!(ladder_s5_distant(6, 2, 4).is_err());
        assert!(ladder_s5_distant(6, 1, 1).is_err());
    }

    #[test]
    fn formulas_match_census_up_to_eight() {
        for n in 4..=8 {
            let r = verify_ladder_proposition(n).unwrap();
            assert!(r.all_formulas_match(), "n={n}: {:?}", r.mismatches().collect::<Vec<_>>());
            assert!(r.all_relations_match(), "n={n}");
        }
    }

    #[test]
    fn small_ladders() {
        let r = verify_ladder_proposition(2).unwrap();
        assert!(r.all_relations_match());
        // On P3 the interior adjacent pair is strict, contrary to the stated n = 3 case.
        let r = verify_ladder_proposition(3).unwrap();
        let bad: Vec<(usize, usize)> = r.mismatches().map(|p| (p.u, p.v)).collect();
        assert_eq!(bad, vec![(1, 2), (2, 1)]);
        let p = &r.pairs.iter().find(|p| (p.u, p.v) == (1, 2)).unwrap();
        assert_eq!((p.total_same.clone(), p.total_cross.clone()), (BigUint::from(5u32), BigUint::from(4u32)));
        assert!(verify_ladder_proposition(1).is_err());
    }
}
