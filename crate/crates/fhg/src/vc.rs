//! Utilitarian-welfare maximization for graphs of small vertex cover
//! number.
//!
//! Some optimal coalition structure has at most `tau + 1` coalitions, so the
//! solver guesses the coalition count `b`, the coalition sizes, and the
//! assignment of cover vertices to coalitions; the independent-set vertices
//! are then placed by an exact bin-packing DP, each contributing
//! `sum 2 w / n_j` over its cover neighbors in the target coalition (sizes
//! are fixed up front, so the contribution is a constant per placement).

use std::collections::BTreeMap;

use crate::error::{FhgError, Result};
use crate::graph::{CoalitionStructure, Objective, VertexId, WeightedGraph, WelfareReport};
use crate::par::par_map;
use crate::rational::{rat, Rational};

/// Default cap on the vertex cover number the solver will branch for.
pub const DEFAULT_TAU_CAP: usize = 12;

/// A minimum vertex cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCover {
    pub vertices: Vec<VertexId>,
}

impl VertexCover {
    pub fn tau(&self) -> usize {
        self.vertices.len()
    }
}

fn first_uncovered(edges: &[(u32, u32)], removed: &[bool]) -> Option<(u32, u32)> {
    edges
        .iter()
        .copied()
        .find(|&(u, v)| !removed[u as usize] && !removed[v as usize])
}

fn cover_exists(
    edges: &[(u32, u32)],
    budget: usize,
    removed: &mut [bool],
    excluded: &[bool],
) -> bool {
    let Some((u, v)) = first_uncovered(edges, removed) else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    for w in [u, v] {
        if excluded[w as usize] {
            continue;
        }
        removed[w as usize] = true;
        let found = cover_exists(edges, budget - 1, removed, excluded);
        removed[w as usize] = false;
        if found {
            return true;
        }
    }
    false
}

/// Minimum vertex cover by bounded branching, refusing above `cap`;
/// among minimum covers the lexicographically smallest is returned.
pub fn min_vertex_cover(g: &WeightedGraph, cap: usize) -> Result<VertexCover> {
    let n = g.vertex_count();
    let edges: Vec<(u32, u32)> = g.edges().iter().map(|(u, v, _)| (u.0, v.0)).collect();
    let mut removed = vec![false; n];
    let excluded = vec![false; n];
    let tau = (0..=cap)
        .find(|&budget| cover_exists(&edges, budget, &mut removed, &excluded))
        .ok_or_else(|| FhgError::CapExceeded(format!("vertex cover number exceeds cap {cap}")))?;

    let mut chosen: Vec<VertexId> = Vec::with_capacity(tau);
    let mut fixed = vec![false; n];
    let mut excluded = vec![false; n];
    for v in 0..n as u32 {
        if chosen.len() == tau {
            break;
        }
        fixed[v as usize] = true;
        let mut removed = fixed.clone();
        let ok = cover_exists(&edges, tau - chosen.len() - 1, &mut removed, &excluded);
        if ok {
            chosen.push(VertexId(v));
        } else {
            fixed[v as usize] = false;
            excluded[v as usize] = true;
        }
    }
    debug_assert!(first_uncovered(&edges, &fixed).is_none());
    Ok(VertexCover { vertices: chosen })
}

/// `n` unit-size items, `k` bins with exact capacities, and a per-placement
/// value; maximize the total value filling every bin exactly.
#[derive(Clone, Debug)]
pub struct BinPackingInstance {
    pub capacities: Vec<u32>,
    /// `values[i][j]`: value of placing item `i` into bin `j`.
    pub values: Vec<Vec<Rational>>,
}

/// Exact bin-packing DP over load vectors, seeded with `DP[0; 0] = 0`:
/// `DP[i; d] = max_j DP[i-1; d - e_j] + a_{ij}`.
/// Returns the optimum and one maximizing assignment (item -> bin).
pub fn max_k_bin_packing(inst: &BinPackingInstance) -> Result<(Rational, Vec<usize>)> {
    let k = inst.capacities.len();
    let n = inst.values.len();
    let total: u32 = inst.capacities.iter().sum();
    if total as usize != n {
        return Err(FhgError::domain(format!(
            "capacities sum to {total}, but there are {n} items"
        )));
    }
    for row in &inst.values {
        if row.len() != k {
            return Err(FhgError::domain("value row length != bin count"));
        }
    }

    // layers[i]: load vector -> (best value, bin of item i-1)
    let mut layers: Vec<BTreeMap<Vec<u32>, (Rational, usize)>> = Vec::with_capacity(n + 1);
    let mut start = BTreeMap::new();
    start.insert(vec![0u32; k], (rat(0), usize::MAX));
    layers.push(start);
    for i in 0..n {
        let mut next: BTreeMap<Vec<u32>, (Rational, usize)> = BTreeMap::new();
        for (d, (value, _)) in &layers[i] {
            for j in 0..k {
                if d[j] < inst.capacities[j] {
                    let mut d2 = d.clone();
                    d2[j] += 1;
                    let v2 = value + &inst.values[i][j];
                    match next.get(&d2) {
                        Some((old, _)) if *old >= v2 => {}
                        _ => {
                            next.insert(d2, (v2, j));
                        }
                    }
                }
            }
        }
        layers.push(next);
    }

    let full = inst.capacities.clone();
    let (best, _) = layers[n]
        .get(&full)
        .ok_or_else(|| FhgError::domain("no feasible packing"))?
        .clone();
    let mut assignment = vec![0usize; n];
    let mut d = full;
    for i in (0..n).rev() {
        let (_, j) = layers[i + 1][&d];
        assignment[i] = j;
        d[j] -= 1;
    }
    Ok((best, assignment))
}

/// Nondecreasing positive integer vectors of length `b` summing to `n`.
fn size_vectors(n: u32, b: usize) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, slots: usize, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let mut s = min;
        while s * slots as u32 <= remaining {
            prefix.push(s);
            rec(remaining - s, slots - 1, s, prefix, out);
            prefix.pop();
            s += 1;
        }
    }
    let mut out = Vec::new();
    rec(n, b, 1, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct VcOptions {
    pub tau_cap: usize,
    pub jobs: Option<usize>,
}

impl Default for VcOptions {
    fn default() -> Self {
        VcOptions {
            tau_cap: DEFAULT_TAU_CAP,
            jobs: None,
        }
    }
}

/// One guessed shape: coalition count `b` and sorted coalition sizes.
fn solve_shape(
    g: &WeightedGraph,
    cover: &[VertexId],
    independent: &[VertexId],
    sizes: &[u32],
) -> Option<(Rational, CoalitionStructure)> {
    let b = sizes.len();
    let tau = cover.len();
    let mut best: Option<(Rational, CoalitionStructure)> = None;

    // assignment[c] = coalition of cover vertex c, iterated in mixed radix
    let mut assignment = vec![0usize; tau];
    loop {
        let mut counts = vec![0u32; b];
        for &a in &assignment {
            counts[a] += 1;
        }
        if (0..b).all(|j| counts[j] <= sizes[j]) {
            let mut cover_side = rat(0);
            for (x, u) in cover.iter().enumerate() {
                for (y, v) in cover.iter().enumerate().skip(x + 1) {
                    if assignment[x] == assignment[y] {
                        if let Some(w) = g.weight(*u, *v) {
                            cover_side += rat(2) * w / rat(sizes[assignment[x]] as i64);
                        }
                    }
                }
            }
            let capacities: Vec<u32> = (0..b).map(|j| sizes[j] - counts[j]).collect();
            let values: Vec<Vec<Rational>> = independent
                .iter()
                .map(|v| {
                    (0..b)
                        .map(|j| {
                            let mut a = rat(0);
                            for (x, u) in cover.iter().enumerate() {
                                if assignment[x] == j {
                                    if let Some(w) = g.weight(*v, *u) {
                                        a += rat(2) * w / rat(sizes[j] as i64);
                                    }
                                }
                            }
                            a
                        })
                        .collect()
                })
                .collect();
            let inst = BinPackingInstance { capacities, values };
            let (packing, placement) = max_k_bin_packing(&inst).expect("capacities consistent");
            let value = cover_side + packing;
            let improves = match &best {
                None => true,
                Some((bv, _)) => value > *bv,
            };
            let tie = best.as_ref().is_some_and(|(bv, _)| value == *bv);
            if improves || tie {
                let mut blocks: Vec<Vec<VertexId>> = vec![Vec::new(); b];
                for (x, u) in cover.iter().enumerate() {
                    blocks[assignment[x]].push(*u);
                }
                for (i, v) in independent.iter().enumerate() {
                    blocks[placement[i]].push(*v);
                }
                let partition =
                    CoalitionStructure::from_blocks(blocks, g.vertex_count()).expect("partition");
                match &mut best {
                    Some((bv, bp)) => {
                        if value > *bv || (value == *bv && partition < *bp) {
                            *bv = value;
                            *bp = partition;
                        }
                    }
                    None => best = Some((value, partition)),
                }
            }
        }
        // next assignment
        let mut pos = 0;
        loop {
            if pos == tau {
                return best;
            }
            assignment[pos] += 1;
            if assignment[pos] < b {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Exact maximum utilitarian welfare for graphs whose vertex cover number
/// is within the cap.
pub fn solve_vc_utilitarian(g: &WeightedGraph) -> Result<WelfareReport> {
    solve_vc_utilitarian_with(g, &VcOptions::default())
}

pub fn solve_vc_utilitarian_with(g: &WeightedGraph, opts: &VcOptions) -> Result<WelfareReport> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(WelfareReport {
            objective: Objective::Utilitarian,
            value: rat(0),
            partition: CoalitionStructure::from_assignment(&[]),
            method: "vertexcover".to_string(),
        });
    }
    let cover = min_vertex_cover(g, opts.tau_cap).map_err(|e| match e {
        FhgError::CapExceeded(_) => {
            FhgError::UnsupportedMethod(format!("vertex cover number exceeds cap {}", opts.tau_cap))
        }
        other => other,
    })?;
    let tau = cover.tau();
    let in_cover: Vec<bool> = {
        let mut m = vec![false; n];
        for v in &cover.vertices {
            m[v.index()] = true;
        }
        m
    };
    let independent: Vec<VertexId> = g.vertices().filter(|v| !in_cover[v.index()]).collect();

    let mut shapes: Vec<Vec<u32>> = Vec::new();
    for b in 1..=(tau + 1).min(n) {
        shapes.extend(size_vectors(n as u32, b));
    }
    let results = par_map(opts.jobs, shapes, |sizes| {
        solve_shape(g, &cover.vertices, &independent, &sizes)
    });
    let mut best: Option<(Rational, CoalitionStructure)> = None;
    for candidate in results.into_iter().flatten() {
        match &mut best {
            None => best = Some(candidate),
            Some((bv, bp)) => {
                if candidate.0 > *bv || (candidate.0 == *bv && candidate.1 < *bp) {
                    *bv = candidate.0;
                    *bp = candidate.1;
                }
            }
        }
    }
    let (value, partition) = best.expect("at least one shape");
    Ok(WelfareReport {
        objective: Objective::Utilitarian,
        value,
        partition,
        method: "vertexcover".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    #[test]
    fn min_cover_examples() {
        let star = WeightedGraph::unweighted(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = min_vertex_cover(&star, 12).unwrap();
        assert_eq!(c.vertices, vec![v(0)]);

        // two disjoint edges force tau = 2; {0,2} is the lex-smallest cover
        let p4 = WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = min_vertex_cover(&p4, 12).unwrap();
        assert_eq!(c.tau(), 2);
        assert_eq!(c.vertices, vec![v(0), v(2)]);

        let k4 = WeightedGraph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        assert_eq!(min_vertex_cover(&k4, 12).unwrap().tau(), 3);

        assert!(matches!(
            min_vertex_cover(&k4, 2),
            Err(FhgError::CapExceeded(_))
        ));
    }

    #[test]
    fn min_cover_is_minimum_by_enumeration() {
        for seed in 0..15u64 {
            let (g, _) = crate::instances::gen_partial_ktree(seed, 7, 2, 0.6).unwrap();
            let c = min_vertex_cover(&g, 12).unwrap();
            // exhaustive: no smaller subset covers all edges
            let n = g.vertex_count();
            for mask in 0u32..(1 << n) {
                if (mask.count_ones() as usize) < c.tau() {
                    let covers = g
                        .edges()
                        .iter()
                        .all(|(a, b, _)| mask & (1 << a.0) != 0 || mask & (1 << b.0) != 0);
                    assert!(!covers, "seed {seed}: smaller cover {mask:b} exists");
                }
            }
        }
    }

    #[test]
    fn bin_packing_examples() {
        // k = 1: everything lands in the single bin
        let inst = BinPackingInstance {
            capacities: vec![3],
            values: vec![vec![rat(1)], vec![rat(2)], vec![rat(-1)]],
        };
        let (best, assignment) = max_k_bin_packing(&inst).unwrap();
        assert_eq!(best, rat(2));
        assert_eq!(assignment, vec![0, 0, 0]);

        // 2 items, 2 bins, c = (1,1), a = [[1,0],[0,2]] -> 3
        let inst = BinPackingInstance {
            capacities: vec![1, 1],
            values: vec![vec![rat(1), rat(0)], vec![rat(0), rat(2)]],
        };
        let (best, assignment) = max_k_bin_packing(&inst).unwrap();
        assert_eq!(best, rat(3));
        assert_eq!(assignment, vec![0, 1]);

        // all zero values
        let inst = BinPackingInstance {
            capacities: vec![2, 1],
            values: vec![vec![rat(0); 2]; 3],
        };
        assert_eq!(max_k_bin_packing(&inst).unwrap().0, rat(0));

        // infeasible capacities
        let inst = BinPackingInstance {
            capacities: vec![1],
            values: vec![vec![rat(0)], vec![rat(0)]],
        };
        assert!(max_k_bin_packing(&inst).is_err());
    }

    #[test]
    fn bin_packing_matches_exhaustive_assignment() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..25 {
            let k = rng.random_range(1..=3usize);
            let mut capacities = vec![0u32; k];
            let n = rng.random_range(1..=6usize);
            for _ in 0..n {
                capacities[rng.random_range(0..k)] += 1;
            }
            let values: Vec<Vec<Rational>> = (0..n)
                .map(|_| {
                    (0..k)
                        .map(|_| ratio(rng.random_range(-9..=9), rng.random_range(1..=4)))
                        .collect()
                })
                .collect();
            let inst = BinPackingInstance {
                capacities: capacities.clone(),
                values: values.clone(),
            };
            let (dp, _) = max_k_bin_packing(&inst).unwrap();
            // exhaustive over k^n assignments respecting exact fills
            let mut best: Option<Rational> = None;
            let mut assignment = vec![0usize; n];
            'all: loop {
                let mut counts = vec![0u32; k];
                for &a in &assignment {
                    counts[a] += 1;
                }
                if counts == capacities {
                    let total: Rational = assignment
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| values[i][j].clone())
                        .sum();
                    if best.as_ref().is_none_or(|b| &total > b) {
                        best = Some(total);
                    }
                }
                let mut pos = 0;
                loop {
                    if pos == n {
                        break 'all;
                    }
                    assignment[pos] += 1;
                    if assignment[pos] < k {
                        break;
                    }
                    assignment[pos] = 0;
                    pos += 1;
                }
            }
            assert_eq!(dp, best.unwrap());
        }
    }

    #[test]
    fn vc_solver_examples() {
        let star3 = WeightedGraph::unweighted(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = solve_vc_utilitarian(&star3).unwrap();
        assert_eq!(r.value, ratio(3, 2));
        assert!(r.verify(&star3).unwrap());

        let heavy = WeightedGraph::new(2, vec![(0, 1, rat(7))]).unwrap();
        assert_eq!(solve_vc_utilitarian(&heavy).unwrap().value, rat(7));

        let p4 = WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(solve_vc_utilitarian(&p4).unwrap().value, rat(2));
    }

    #[test]
    fn negative_weights_prefer_splitting() {
        let g = WeightedGraph::new(3, vec![(0, 1, rat(-2)), (1, 2, rat(-5))]).unwrap();
        let r = solve_vc_utilitarian(&g).unwrap();
        assert_eq!(r.value, rat(0));
        // the witness uses at most tau + 1 = 2 coalitions, all edge-free
        assert!(r.partition.blocks().len() <= 2);
        assert!(r.verify(&g).unwrap());
    }
}
