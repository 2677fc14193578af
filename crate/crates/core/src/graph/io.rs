//! Plain-text graph files.
//!
//! ```text
//! # comment
//! n m
//! u v [w]        (m lines; w is an integer, p/q or decimal; default 1)
//! %vertical      (optional section, bunkbed only)
//! [u] w          (vertical weight of u0 u1; bare weights are taken in vertex order)
//! ```
//!
//! For bunkbed use, each base-edge weight applies to both horizontal copies.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{parse_rational, BaseGraph, BunkbedGraph, GraphError};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: BaseGraph,
    /// One weight per base edge.
    pub weights: Vec<BigRational>,
    /// One weight per base vertex, from the `%vertical` section.
    pub vertical: Option<Vec<BigRational>>,
}

fn one() -> BigRational {
    BigRational::from_integer(BigInt::from(1))
}

impl GraphFile {
    pub fn unweighted(graph: BaseGraph) -> Self {
        let weights = vec![one(); graph.edge_count()];
        GraphFile { graph, weights, vertical: None }
    }

    /// Full weight vector for the bunkbed product (verticals default to 1).
    pub fn bunkbed_weights(&self, bunkbed: &BunkbedGraph) -> Vec<BigRational> {
        let vertical = self.vertical.clone().unwrap_or_else(|| vec![one(); self.graph.vertex_count()]);
        bunkbed.symmetric_weights(&self.weights, &vertical)
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let perr = |line: usize, message: &str| GraphError::Parse { line, message: message.to_string() };
        let int = |line: usize, tok: &str| tok.parse::<usize>().map_err(|_| perr(line, &format!("bad integer `{tok}`")));
        let rat = |line: usize, tok: &str| parse_rational(tok).ok_or_else(|| perr(line, &format!("bad weight `{tok}`")));

        let (hline, header) = lines.next().ok_or_else(|| perr(0, "missing `n m` header"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(perr(hline, "header must be `n m`"));
        }
        let (n, m) = (int(hline, toks[0])?, int(hline, toks[1])?);

        let mut edges = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, l) = lines.next().ok_or_else(|| perr(0, &format!("expected {m} edge lines")))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks.as_slice() {
                [u, v] => {
                    edges.push((int(line, u)?, int(line, v)?));
                    weights.push(one());
                }
                [u, v, w] => {
                    edges.push((int(line, u)?, int(line, v)?));
                    weights.push(rat(line, w)?);
                }
                _ => return Err(perr(line, "edge line must be `u v` or `u v w`")),
            }
        }
        let graph = BaseGraph::new(n, &edges)?;

        let mut vertical = None;
        if let Some((line, l)) = lines.next() {
            if l != "%vertical" {
                return Err(perr(line, "unexpected content after edge list"));
            }
            let mut values: Vec<Option<BigRational>> = vec![None; n];
            let mut cursor = 0;
            for (line, l) in lines {
                let toks: Vec<&str> = l.split_whitespace().collect();
                let (u, w) = match toks.as_slice() {
                    [w] => {
                        cursor += 1;
                        (cursor - 1, rat(line, w)?)
                    }
                    [u, w] => (int(line, u)?, rat(line, w)?),
                    _ => return Err(perr(line, "vertical line must be `w` or `u w`")),
                };
                if u >= n {
                    return Err(perr(line, &format!("vertex {u} out of range")));
                }
                if values[u].replace(w).is_some() {
                    return Err(perr(line, &format!("vertical weight of {u} given twice")));
                }
            }
            vertical = Some(values.into_iter().map(|w| w.unwrap_or_else(one)).collect());
        }
        Ok(GraphFile { graph, weights, vertical })
    }

    /// Canonical text form; parsing it back yields an identical value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.graph.vertex_count(), self.graph.edge_count());
        for (&(u, v), w) in self.graph.edges().iter().zip(&self.weights) {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        if let Some(vertical) = &self.vertical {
            out.push_str("%vertical\n");
            for (u, w) in vertical.iter().enumerate() {
                let _ = writeln!(out, "{u} {w}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_weighted_file_with_verticals() {
        let text = "# triangle\n3 3\n0 1 1/2\n1 2\n2 0 3   # comment\n%vertical\n0 0\n2 5/3\n";
        let f = GraphFile::parse(text).unwrap();
        assert_eq!(f.graph.edges(), &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(f.weights[0], BigRational::new(1.into(), 2.into()));
        assert_eq!(f.weights[1], one());
        let vertical = f.vertical.as_ref().unwrap();
        assert_eq!(vertical[0], BigRational::from_integer(0.into()));
        assert_eq!(vertical[1], one());
        assert_eq!(vertical[2], BigRational::new(5.into(), 3.into()));

        let again = GraphFile::parse(&f.to_text()).unwrap();
        assert_eq!(again, f);

        let b = BunkbedGraph::new(f.graph.clone());
        let w = f.bunkbed_weights(&b);
        assert_eq!(w.len(), 9);
        assert!(b.is_reflection_symmetric(&w));
    }

    #[test]
    fn bare_vertical_weights_in_order() {
        let f = GraphFile::parse("2 1\n0 1\n%vertical\n2\n3\n").unwrap();
        let v = f.vertical.unwrap();
        assert_eq!(v, vec![BigRational::from_integer(2.into()), BigRational::from_integer(3.into())]);
    }

    #[test]
    fn reports_errors_with_lines() {
        assert!(matches!(GraphFile::parse(""), Err(GraphError::Parse { .. })));
        assert!(matches!(GraphFile::parse("2 1\n0 1 zz\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(GraphFile::parse("2 2\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(GraphFile::parse("2 1\n0 0\n"), Err(GraphError::SelfLoop { .. })));
        assert!(matches!(GraphFile::parse("2 1\n0 1\nextra\n"), Err(GraphError::Parse { line: 3, .. })));
        assert!(matches!(GraphFile::parse("2 1\n0 1\n%vertical\n0 1\n0 2\n"), Err(GraphError::Parse { .. })));
    }
}
