//! Property tests for the welfare primitives and instance formats.

use fhg::graph::{
    agent_utility, egalitarian_welfare, internal_weight, utilitarian_welfare, CoalitionStructure,
    VertexId, WeightedGraph,
};
use fhg::instances::{parse_graph, serialize_graph, Format};
use fhg::rational::{rat, Rational};
use proptest::prelude::*;

/// Random weighted graph on up to 8 vertices with nonzero rational weights.
fn graph_strategy() -> impl Strategy<Value = WeightedGraph> {
    (1usize..=8)
        .prop_flat_map(|n| {
            let pairs: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|u| ((u + 1)..n as u32).map(move |v| (u, v)))
                .collect();
            let weights =
                proptest::collection::vec((any::<bool>(), (-50i64..=50), (1i64..=6)), pairs.len());
            (Just(n), Just(pairs), weights)
        })
        .prop_map(|(n, pairs, weights)| {
            let edges: Vec<(u32, u32, Rational)> = pairs
                .into_iter()
                .zip(weights)
                .filter(|(_, (keep, num, _))| *keep && *num != 0)
                .map(|((u, v), (_, num, den))| (u, v, fhg::rational::ratio(num, den)))
                .collect();
            WeightedGraph::new(n, edges).expect("generated graph is valid")
        })
}

fn partition_strategy(n: usize) -> impl Strategy<Value = CoalitionStructure> {
    proptest::collection::vec(0usize..n.max(1), n).prop_map(|raw| {
        // squash labels into restricted-growth form
        let mut seen: Vec<usize> = Vec::new();
        let assign: Vec<usize> = raw
            .into_iter()
            .map(|r| match seen.iter().position(|&s| s == r) {
                Some(i) => i,
                None => {
                    seen.push(r);
                    seen.len() - 1
                }
            })
            .collect();
        CoalitionStructure::from_assignment(&assign)
    })
}

proptest! {
    /// Coalition welfare has two routes: sum of member utilities, and twice
    /// the internal weight over the size.
    #[test]
    fn per_coalition_utility_sum_equals_density_route(g in graph_strategy(), seed in any::<u64>()) {
        let n = g.vertex_count();
        let p = {
            let mut assign = vec![0usize; n];
            let mut state = seed;
            let mut blocks = 1usize;
            for slot in assign.iter_mut() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let pick = (state >> 33) as usize % (blocks + 1);
                *slot = pick;
                if pick == blocks {
                    blocks += 1;
                }
            }
            CoalitionStructure::from_assignment(&assign)
        };
        for c in p.blocks() {
            let by_agents: Rational = c
                .iter()
                .map(|v| agent_utility(&g, *v, c).unwrap())
                .sum();
            let by_density = rat(2) * internal_weight(&g, c) / rat(c.len() as i64);
            prop_assert_eq!(by_agents, by_density);
        }
    }

    /// The two welfare aggregates decompose as documented: sum over
    /// coalitions, and min over agents.
    #[test]
    fn welfare_aggregation((g, p) in graph_strategy().prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), partition_strategy(n))
    })) {
        let uw = utilitarian_welfare(&g, &p).unwrap();
        let by_blocks: Rational = p
            .blocks()
            .iter()
            .map(|c| rat(2) * internal_weight(&g, c) / rat(c.len() as i64))
            .sum();
        prop_assert_eq!(&uw, &by_blocks);

        let ew = egalitarian_welfare(&g, &p).unwrap();
        let gref = &g;
        let min_agent = p
            .blocks()
            .iter()
            .flat_map(|c| c.iter().map(move |v| agent_utility(gref, *v, c).unwrap()))
            .min()
            .unwrap();
        prop_assert_eq!(&ew, &min_agent);

        // a singleton pins the egalitarian welfare at or below zero
        if p.blocks().iter().any(|c| c.len() == 1) {
            prop_assert!(ew <= rat(0));
        }
    }

    /// Exact arithmetic: (p + q) - q = p.
    #[test]
    fn rational_addition_cancels(
        (pn, pd) in (-1000i64..=1000, 1i64..=60),
        (qn, qd) in (-1000i64..=1000, 1i64..=60),
    ) {
        let p = fhg::rational::ratio(pn, pd);
        let q = fhg::rational::ratio(qn, qd);
        prop_assert_eq!((&p + &q) - &q, p);
    }

    /// Both instance formats round-trip exactly.
    #[test]
    fn formats_round_trip(g in graph_strategy()) {
        for format in [Format::EdgeList, Format::Json] {
            let text = serialize_graph(&g, format);
            let back = parse_graph(&text, format).unwrap();
            prop_assert_eq!(&back, &g);
        }
    }

    /// Singleton coalitions contribute zero utility.
    #[test]
    fn singleton_utility_is_zero(g in graph_strategy()) {
        for v in g.vertices() {
            prop_assert_eq!(agent_utility(&g, v, &[v]).unwrap(), rat(0));
        }
        let _ = VertexId(0);
    }
}
