mod common;

use bunkbed_core::graph::{random_connected_graph_with, BaseGraph, BunkbedGraph, CapacitatedNetwork, Layer, SplitMix64, WeightRole};
use bunkbed_core::maxflow::{max_flow, rearrangement_value_inequality, verify_flow_inequality};
use bunkbed_core::presistance::{primal_p_resistance, PParameter, SolverConfig};
use bunkbed_core::saw::{census, count_saw, SawOptions};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use common::{brute_min_cut, laplacian_resistance, random_weights, saw_count};

/// A random connected base graph with weights and a distinct vertex pair.
fn instance(n_max: usize) -> impl Strategy<Value = (BaseGraph, Vec<BigRational>, usize, usize)> {
    (2..=n_max, 0.3f64..=1.0, any::<u64>()).prop_map(|(n, prob, seed)| {
        let mut rng = SplitMix64::new(seed);
        let g = random_connected_graph_with(n, prob, &mut rng).unwrap();
        let w = random_weights(&mut rng, g.edge_count());
        let (x, y) = rng.distinct_pair(n);
        (g, w, x, y)
    })
}

fn bunkbed_network(g: &BaseGraph, horizontal: &[BigRational], rng_seed: u64, role: WeightRole) -> (BunkbedGraph, CapacitatedNetwork) {
    let b = BunkbedGraph::new(g.clone());
    let vertical = random_weights(&mut SplitMix64::new(rng_seed), g.vertex_count());
    let w = b.symmetric_weights(horizontal, &vertical);
    let net = CapacitatedNetwork::new(b.graph().clone(), w, role).unwrap();
    (b, net)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_flow_equals_brute_force_cut((g, w, x, y) in instance(6)) {
        let net = CapacitatedNetwork::new(g.clone(), w.clone(), WeightRole::Capacity).unwrap();
        let r = max_flow(&net, x, y).unwrap();
        prop_assert_eq!(&r.value, &brute_min_cut(g.vertex_count(), g.edges(), &w, x, y));
        prop_assert_eq!(&r.value, &r.cut.value);
        prop_assert!(r.flow.is_admissible(&net));
        prop_assert_eq!(r.flow.strength(&g), r.value);
    }

    #[test]
    fn bunkbed_flows_favor_the_same_layer((g, w, x, y) in instance(6), vseed in any::<u64>()) {
        let (b, net) = bunkbed_network(&g, &w, vseed, WeightRole::Capacity);
        let r = verify_flow_inequality(&g, net.weights(), x, y).unwrap();
        prop_assert!(r.holds);
        let n2 = b.graph().vertex_count();
        let s = b.vertex(x, Layer::Lower);
        prop_assert_eq!(&r.same_layer.value, &brute_min_cut(n2, b.graph().edges(), net.weights(), s, b.vertex(y, Layer::Lower)));
        prop_assert_eq!(&r.cross_layer.value, &brute_min_cut(n2, b.graph().edges(), net.weights(), s, b.vertex(y, Layer::Upper)));
    }

    #[test]
    fn rearrangement_never_raises_potential_value((g, w, _x, _y) in instance(5), vseed in any::<u64>(), bits in any::<u32>()) {
        let (b, net) = bunkbed_network(&g, &w, vseed, WeightRole::Capacity);
        let f: Vec<BigRational> = (0..b.graph().vertex_count()).map(|i| common::rat((bits >> i & 1) as i64 * 3 + (i as i64 % 2), 4)).collect();
        let (before, after) = rearrangement_value_inequality(&b, &net, &f).unwrap();
        prop_assert!(after <= before);
    }

    #[test]
    fn reflection_is_an_involution((g, _w, _x, _y) in instance(7)) {
        let b = BunkbedGraph::new(g);
        for v in 0..b.graph().vertex_count() {
            let r = b.reflect_vertex(v);
            prop_assert_eq!(b.reflect_vertex(r), v);
            prop_assert_eq!(b.base_vertex(r), b.base_vertex(v));
            prop_assert_ne!(b.layer_of(r), b.layer_of(v));
        }
        for e in 0..b.graph().edge_count() {
            let r = b.reflect_edge(e);
            prop_assert_eq!(b.reflect_edge(r), e);
            let (p, q) = b.graph().endpoints(e);
            let mut mapped = [b.reflect_vertex(p), b.reflect_vertex(q)];
            let (rp, rq) = b.graph().endpoints(r);
            let mut actual = [rp, rq];
            mapped.sort();
            actual.sort();
            prop_assert_eq!(mapped, actual);
        }
    }

    #[test]
    fn census_partitions_all_walks((g, _w, u, v) in instance(5)) {
        let c = census(&g, u, v, &SawOptions::default()).unwrap();
        let b = BunkbedGraph::new(g.clone());
        let (m, e) = (b.graph().vertex_count(), b.graph().edges());
        let u0 = b.vertex(u, Layer::Lower);
        prop_assert_eq!(c.total(Layer::Lower), BigUint::from(saw_count(m, e, u0, b.vertex(v, Layer::Lower))));
        prop_assert_eq!(c.total(Layer::Upper), BigUint::from(saw_count(m, e, u0, b.vertex(v, Layer::Upper))));
        prop_assert!(c.bijective_classes_balanced());
        let o = common::oracle_census(&g, u, v);
        for (j, layer) in [Layer::Lower, Layer::Upper].into_iter().enumerate() {
            let want: Vec<BigUint> = o[j].iter().map(|&x| BigUint::from(x)).collect();
            prop_assert_eq!(c.counts(layer).to_vec(), want);
        }
    }

    #[test]
    fn walk_counts_are_reversal_invariant((g, _w, u, v) in instance(7)) {
        let there = count_saw(&g, u, v, &SawOptions::default()).unwrap().count;
        let back = count_saw(&g, v, u, &SawOptions::default()).unwrap().count;
        prop_assert_eq!(&there, &back);
        prop_assert_eq!(there, BigUint::from(saw_count(g.vertex_count(), g.edges(), u, v)));
        let c = census(&g, u, v, &SawOptions::default()).unwrap();
        let r = census(&g, v, u, &SawOptions::default()).unwrap();
        prop_assert_eq!(c.total(Layer::Lower), r.total(Layer::Lower));
        prop_assert_eq!(c.total(Layer::Upper), r.total(Layer::Upper));
    }

    #[test]
    fn two_resistance_matches_laplacian((g, w, x, y) in instance(6)) {
        let net = CapacitatedNetwork::new(g.clone(), w.clone(), WeightRole::Resistance).unwrap();
        let r = primal_p_resistance(&net, x, y, PParameter::new(2.0).unwrap(), &SolverConfig::default()).unwrap();
        let exact = laplacian_resistance(g.vertex_count(), g.edges(), &w, x, y).to_f64().unwrap();
        prop_assert!((r.resistance - exact).abs() <= 1e-8 * exact, "{} vs {}", r.resistance, exact);
    }
}
