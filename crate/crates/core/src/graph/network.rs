use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{BaseGraph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightRole {
    /// Nonnegative finite capacities.
    Capacity,
    /// Strictly positive resistances.
    Resistance,
}

/// A graph with one exact rational weight per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitatedNetwork {
    graph: BaseGraph,
    weights: Vec<BigRational>,
    role: WeightRole,
}

impl CapacitatedNetwork {
    pub fn new(graph: BaseGraph, weights: Vec<BigRational>, role: WeightRole) -> Result<Self, GraphError> {
        if weights.len() != graph.edge_count() {
            return Err(GraphError::WeightCount { expected: graph.edge_count(), got: weights.len() });
        }
        for (edge, w) in weights.iter().enumerate() {
            let ok = match role {
                WeightRole::Capacity => !w.is_negative(),
                WeightRole::Resistance => w.is_positive(),
            };
            if !ok {
                return Err(GraphError::InvalidWeight { edge, value: w.to_string(), role });
            }
        }
        Ok(CapacitatedNetwork { graph, weights, role })
    }

    /// Every edge gets weight one.
    pub fn unit(graph: BaseGraph, role: WeightRole) -> Self {
        let weights = vec![BigRational::from_integer(BigInt::from(1)); graph.edge_count()];
        CapacitatedNetwork { graph, weights, role }
    }

    pub fn graph(&self) -> &BaseGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> &BigRational {
        &self.weights[edge]
    }

    pub fn role(&self) -> WeightRole {
        self.role
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_f64().unwrap_or(f64::INFINITY)).collect()
    }

    pub fn total_weight(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, w| acc + w)
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let numer = BigInt::from_str(&digits).ok()?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(numer, denom);
        return Some(if negative { -r } else { r });
    }
    let r = BigRational::from_str(s).ok()?;
    if r.denom().is_zero() {
        return None;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn role_validation() {
        let g = BaseGraph::path(2);
        assert!(CapacitatedNetwork::new(g.clone(), vec![q(0, 1), q(3, 2)], WeightRole::Capacity).is_ok());
        assert!(matches!(
            CapacitatedNetwork::new(g.clone(), vec![q(0, 1), q(1, 1)], WeightRole::Resistance),
            Err(GraphError::InvalidWeight { edge: 0, .. })
        ));
        assert!(matches!(
            CapacitatedNetwork::new(g.clone(), vec![q(-1, 2), q(1, 1)], WeightRole::Capacity),
            Err(GraphError::InvalidWeight { .. })
        ));
        assert!(matches!(
            CapacitatedNetwork::new(g, vec![q(1, 1)], WeightRole::Capacity),
            Err(GraphError::WeightCount { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("6/8"), Some(q(3, 4)));
        assert_eq!(parse_rational("5"), Some(q(5, 1)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(q(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
