use super::{BaseGraph, GraphError};

/// Number of `G(n, p)` draws attempted before giving up on connectivity.
pub const RANDOM_GRAPH_RETRY_CAP: usize = 10_000;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 (Steele, Lea, Flood 2014): a Weyl-sequence counter with the
/// `mix64` finalizer. Output `k` is `mix64(seed + (k + 1) * GOLDEN_GAMMA)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// An independent stream for trial `stream` of an experiment seeded with `seed`.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut root = SplitMix64::new(seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
        SplitMix64::new(root.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound`, without modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// Two distinct values from `0..n`.
    pub fn distinct_pair(&mut self, n: usize) -> (usize, usize) {
        assert!(n >= 2);
        let a = self.below(n as u64) as usize;
        let mut b = self.below(n as u64 - 1) as usize;
        if b >= a {
            b += 1;
        }
        (a, b)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// `G(n, p)` conditioned on connectivity by rejection sampling, seeded.
///
/// Edges are drawn in lexicographic pair order `(0,1), (0,2), ..., (n-2,n-1)`,
/// one Bernoulli draw per pair.
pub fn random_connected_graph(n: usize, edge_probability: f64, seed: u64) -> Result<BaseGraph, GraphError> {
    random_connected_graph_with(n, edge_probability, &mut SplitMix64::new(seed))
}

pub fn random_connected_graph_with(
    n: usize,
    edge_probability: f64,
    rng: &mut SplitMix64,
) -> Result<BaseGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(edge_probability > 0.0 && edge_probability <= 1.0) {
        return Err(GraphError::InvalidParameter(format!(
            "edge probability must lie in (0, 1], got {edge_probability}"
        )));
    }
    for _ in 0..RANDOM_GRAPH_RETRY_CAP {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.bernoulli(edge_probability) {
                    edges.push((u, v));
                }
            }
        }
        let g = BaseGraph::new(n, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationExhausted(RANDOM_GRAPH_RETRY_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0, as published with the reference C code.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn forced_outcomes() {
        assert_eq!(random_connected_graph(2, 1.0, 17).unwrap(), BaseGraph::complete(2));
        assert_eq!(random_connected_graph(5, 1.0, 3).unwrap(), BaseGraph::complete(5));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = random_connected_graph(6, 0.5, 42).unwrap();
        let b = random_connected_graph(6, 0.5, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.is_connected());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(random_connected_graph(1, 0.5, 0), Err(GraphError::InvalidParameter(_))));
        assert!(matches!(random_connected_graph(4, 0.0, 0), Err(GraphError::InvalidParameter(_))));
        assert!(matches!(random_connected_graph(4, 1.5, 0), Err(GraphError::InvalidParameter(_))));
    }

    #[test]
    fn exhausts_on_hopeless_probability() {
        assert_eq!(
            random_connected_graph(40, 1e-9, 1),
            Err(GraphError::GenerationExhausted(RANDOM_GRAPH_RETRY_CAP))
        );
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..1000 {
            let (a, b) = rng.distinct_pair(3);
            assert!(a < 3 && b < 3 && a != b);
            assert!(rng.range_inclusive(2, 4) <= 4);
        }
    }
}
