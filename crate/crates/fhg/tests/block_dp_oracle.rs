//! Oracle equivalence and structural properties of the block-graph DP.

use fhg::block_dp::{solve_block_utilitarian, solve_rooted};
use fhg::blockcut::build_block_cut_tree;
use fhg::graph::{utilitarian_welfare, WeightedGraph};
use fhg::instances::gen_random_block_graph;
use fhg::oracle::{brute_force_clique_star_only, brute_force_max_utilitarian};

/// Random small block graphs, capped at `max_n` vertices.
fn corpus(seeds: std::ops::Range<u64>, max_n: usize) -> Vec<(u64, WeightedGraph)> {
    seeds
        .map(|seed| {
            let n_blocks = 1 + (seed % 4) as usize;
            let max_clique = 2 + (seed % 3) as usize;
            let attach = [0.0, 0.3, 0.7, 1.0][(seed % 4) as usize];
            (
                seed,
                gen_random_block_graph(seed, n_blocks, max_clique, attach),
            )
        })
        .filter(|(_, g)| g.vertex_count() <= max_n)
        .collect()
}

#[test]
fn block_dp_matches_oracle_on_random_block_graphs() {
    let mut checked = 0;
    for (seed, g) in corpus(0..200, 10) {
        let dp = solve_block_utilitarian(&g).unwrap();
        let oracle = brute_force_max_utilitarian(&g).unwrap();
        assert_eq!(
            dp.value,
            oracle.value,
            "seed {seed}, n {}: dp {} vs oracle {}",
            g.vertex_count(),
            dp.value,
            oracle.value
        );
        assert_eq!(utilitarian_welfare(&g, &dp.partition).unwrap(), dp.value);
        checked += 1;
    }
    assert!(checked >= 60, "corpus too small: {checked}");
}

#[test]
fn reconstructed_coalitions_are_cliques_or_stars() {
    for (seed, g) in corpus(0..60, 12) {
        let dp = solve_block_utilitarian(&g).unwrap();
        for block in dp.partition.blocks() {
            let s = block.len();
            let mut m = 0;
            let mut degs = vec![0usize; s];
            for i in 0..s {
                for j in i + 1..s {
                    if g.has_edge(block[i], block[j]) {
                        m += 1;
                        degs[i] += 1;
                        degs[j] += 1;
                    }
                }
            }
            let clique = m == s * (s - 1) / 2;
            let star = m == s - 1 && degs.iter().any(|&d| d == s - 1);
            assert!(
                clique || star,
                "seed {seed}: coalition {block:?} is neither clique nor star"
            );
        }
    }
}

#[test]
fn clique_star_restriction_is_tight_on_block_graphs() {
    for (seed, g) in corpus(0..80, 9) {
        let restricted = brute_force_clique_star_only(&g).unwrap();
        let free = brute_force_max_utilitarian(&g).unwrap().value;
        assert!(restricted <= free);
        assert_eq!(restricted, free, "seed {seed}: characterization violated");
    }
}

#[test]
fn value_is_root_invariant() {
    for (seed, g) in corpus(0..40, 12) {
        if g.connected_components().len() != 1 {
            continue;
        }
        let tree = build_block_cut_tree(&g).unwrap();
        let base = solve_rooted(&g, 0).unwrap().value;
        for b in 1..tree.block_count() {
            assert_eq!(
                solve_rooted(&g, b).unwrap().value,
                base,
                "seed {seed} root {b}"
            );
        }
    }
}
