//! Graph and welfare primitives shared by every solver.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{FhgError, Result};
use crate::rational::{rat, Rational};

/// Dense vertex index in `[0, n)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected simple graph with exact rational edge weights.
///
/// No self-loops, no duplicate edges, no zero-weight edges. Immutable after
/// construction; all solver operations are pure functions over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(VertexId, VertexId, Rational)>,
    adj: Vec<Vec<(VertexId, Rational)>>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples. Endpoint order is free;
    /// edges are stored with `u < v` and sorted.
    pub fn new(n: usize, edges: Vec<(u32, u32, Rational)>) -> Result<Self> {
        let mut norm: Vec<(VertexId, VertexId, Rational)> = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(FhgError::domain(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            if a == b {
                return Err(FhgError::domain(format!("self-loop at vertex {a}")));
            }
            if w.is_zero() {
                return Err(FhgError::domain(format!("edge ({a},{b}) has weight 0")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            norm.push((VertexId(u), VertexId(v), w));
        }
        norm.sort_by_key(|(u, v, _)| (*u, *v));
        if norm
            .windows(2)
            .any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(FhgError::domain("duplicate edge".to_string()));
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v, w) in &norm {
            adj[u.index()].push((*v, w.clone()));
            adj[v.index()].push((*u, w.clone()));
        }
        for list in &mut adj {
            list.sort_by_key(|(v, _)| *v);
        }
        Ok(WeightedGraph {
            n,
            edges: norm,
            adj,
        })
    }

    /// All weights 1.
    pub fn unweighted(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        Self::new(n, edges.iter().map(|&(u, v)| (u, v, rat(1))).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n as u32).map(VertexId)
    }

    pub fn edges(&self) -> &[(VertexId, VertexId, Rational)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Rational)] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<&Rational> {
        let list = &self.adj[u.index()];
        list.binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| &list[i].1)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.weight(u, v).is_some()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|(_, _, w)| w.is_one())
    }

    /// Max |weight| over edges; 0 for an edgeless graph.
    pub fn max_abs_weight(&self) -> Rational {
        self.edges
            .iter()
            .map(|(_, _, w)| w.abs())
            .max()
            .unwrap_or_else(|| rat(0))
    }

    /// Max |weight| as an integer when all weights are integers, else `None`.
    pub fn integer_weight_bound(&self) -> Option<BigInt> {
        let mut w_max = BigInt::zero();
        for (_, _, w) in &self.edges {
            if !w.denom().is_one() {
                return None;
            }
            let a = w.numer().abs();
            if a > w_max {
                w_max = a;
            }
        }
        Some(w_max)
    }

    /// True iff every biconnected component induces a complete subgraph.
    pub fn is_block_graph(&self) -> bool {
        biconnected_components(self).iter().all(|bcc| {
            let k = bcc.vertices.len();
            bcc.edge_count == k * (k - 1) / 2
        })
    }

    /// Connected components as sorted vertex lists, ordered by minimum vertex.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([VertexId(s as u32)]);
            seen[s] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for (u, _) in self.neighbors(v) {
                    if !seen[u.index()] {
                        seen[u.index()] = true;
                        queue.push_back(*u);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    }

    /// Subgraph induced by `verts` (sorted, distinct), with vertices
    /// renumbered densely; returns the new-to-old index map.
    pub fn induced_subgraph(&self, verts: &[VertexId]) -> (WeightedGraph, Vec<VertexId>) {
        let mut old_to_new = vec![u32::MAX; self.n];
        for (i, v) in verts.iter().enumerate() {
            old_to_new[v.index()] = i as u32;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(u, v, _)| {
                old_to_new[u.index()] != u32::MAX && old_to_new[v.index()] != u32::MAX
            })
            .map(|(u, v, w)| (old_to_new[u.index()], old_to_new[v.index()], w.clone()))
            .collect();
        let sub = WeightedGraph::new(verts.len(), edges).expect("induced subgraph is valid");
        (sub, verts.to_vec())
    }

    /// Longest shortest path; `None` when the graph is disconnected.
    pub fn diameter(&self) -> Option<u32> {
        if self.n == 0 {
            return Some(0);
        }
        let mut diam = 0u32;
        let mut dist = vec![u32::MAX; self.n];
        for s in 0..self.n {
            dist.fill(u32::MAX);
            dist[s] = 0;
            let mut queue = VecDeque::from([VertexId(s as u32)]);
            while let Some(v) = queue.pop_front() {
                for (u, _) in self.neighbors(v) {
                    if dist[u.index()] == u32::MAX {
                        dist[u.index()] = dist[v.index()] + 1;
                        queue.push_back(*u);
                    }
                }
            }
            match dist.iter().max() {
                Some(&d) if d == u32::MAX => return None,
                Some(&d) => diam = diam.max(d),
                None => {}
            }
        }
        Some(diam)
    }
}

/// One biconnected component: its vertex set (sorted) and edge count.
#[derive(Clone, Debug)]
pub(crate) struct Bcc {
    pub vertices: Vec<VertexId>,
    pub edge_count: usize,
}

/// Biconnected components and articulation points, by iterative lowpoint
/// search (the recursion depth must not bound instance size).
pub(crate) fn biconnected_components(g: &WeightedGraph) -> Vec<Bcc> {
    bcc_with_cuts(g).0
}

pub(crate) fn bcc_with_cuts(g: &WeightedGraph) -> (Vec<Bcc>, Vec<VertexId>) {
    let n = g.vertex_count();
    let mut disc = vec![0u32; n];
    let mut low = vec![0u32; n];
    let mut visited = vec![false; n];
    let mut is_cut = vec![false; n];
    let mut timer = 1u32;
    let mut edge_stack: Vec<(VertexId, VertexId)> = Vec::new();
    let mut bccs = Vec::new();

    // Frame: (vertex, parent, next adjacency index, children count).
    let mut stack: Vec<(usize, usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0, 0));
        while let Some(&mut (v, parent, ref mut idx, ref mut children)) = stack.last_mut() {
            if *idx < g.adj[v].len() {
                let (u, _) = g.adj[v][*idx];
                *idx += 1;
                let u = u.index();
                if !visited[u] {
                    *children += 1;
                    edge_stack.push((VertexId(v as u32), VertexId(u as u32)));
                    visited[u] = true;
                    disc[u] = timer;
                    low[u] = timer;
                    timer += 1;
                    stack.push((u, v, 0, 0));
                } else if u != parent && disc[u] < disc[v] {
                    edge_stack.push((VertexId(v as u32), VertexId(u as u32)));
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _, ref p_children)) = stack.last_mut() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        // (p, v) closes a biconnected component.
                        if p_children > &1 || stack.len() > 1 {
                            is_cut[p] = true;
                        }
                        let mut verts = Vec::new();
                        let mut edge_count = 0;
                        while let Some(&(a, b)) = edge_stack.last() {
                            edge_stack.pop();
                            edge_count += 1;
                            verts.push(a);
                            verts.push(b);
                            if (a.index(), b.index()) == (p, v) {
                                break;
                            }
                        }
                        verts.sort();
                        verts.dedup();
                        bccs.push(Bcc {
                            vertices: verts,
                            edge_count,
                        });
                    }
                }
            }
        }
    }
    let cuts = (0..n)
        .filter(|&v| is_cut[v])
        .map(|v| VertexId(v as u32))
        .collect();
    (bccs, cuts)
}

/// Which welfare to maximize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Utilitarian,
    Egalitarian,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Utilitarian => write!(f, "utilitarian"),
            Objective::Egalitarian => write!(f, "egalitarian"),
        }
    }
}

/// A partition of the vertex set, kept in canonical form: each block sorted
/// ascending, blocks ordered by their minimum element. The derived `Ord`
/// (lexicographic over the block list) is the tie-break order used by the
/// oracles: the smallest partition among optima wins.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoalitionStructure {
    blocks: Vec<Vec<VertexId>>,
}

impl CoalitionStructure {
    /// Canonicalizes and validates that `blocks` partitions `{0, .., n-1}`.
    pub fn from_blocks(blocks: Vec<Vec<VertexId>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut count = 0usize;
        for b in &blocks {
            if b.is_empty() {
                return Err(FhgError::domain("empty coalition"));
            }
            for v in b {
                if v.index() >= n {
                    return Err(FhgError::domain(format!("vertex {v} out of range")));
                }
                if seen[v.index()] {
                    return Err(FhgError::domain(format!("vertex {v} in two coalitions")));
                }
                seen[v.index()] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(FhgError::domain("partition does not cover all vertices"));
        }
        let mut blocks: Vec<Vec<VertexId>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort();
                b
            })
            .collect();
        blocks.sort();
        Ok(CoalitionStructure { blocks })
    }

    /// From a per-vertex block label array.
    pub fn from_assignment(assign: &[usize]) -> Self {
        let mut by_label: Vec<Vec<VertexId>> = Vec::new();
        for (v, &lbl) in assign.iter().enumerate() {
            if lbl >= by_label.len() {
                by_label.resize_with(lbl + 1, Vec::new);
            }
            by_label[lbl].push(VertexId(v as u32));
        }
        let mut blocks: Vec<Vec<VertexId>> =
            by_label.into_iter().filter(|b| !b.is_empty()).collect();
        blocks.sort();
        CoalitionStructure { blocks }
    }

    pub fn singletons(n: usize) -> Self {
        CoalitionStructure {
            blocks: (0..n as u32).map(|v| vec![VertexId(v)]).collect(),
        }
    }

    pub fn grand(n: usize) -> Self {
        CoalitionStructure {
            blocks: if n == 0 {
                Vec::new()
            } else {
                vec![(0..n as u32).map(VertexId).collect()]
            },
        }
    }

    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Per-vertex block index (into `blocks()`).
    pub fn assignment(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut assign = vec![0usize; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for v in b {
                assign[v.index()] = i;
            }
        }
        assign
    }

    /// Union of two partitions over disjoint vertex sets (re-canonicalized).
    pub fn union(mut self, other: CoalitionStructure) -> Self {
        self.blocks.extend(other.blocks);
        self.blocks.sort();
        self
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, v) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Solver output: the optimum value together with a witness partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WelfareReport {
    pub objective: Objective,
    pub value: Rational,
    pub partition: CoalitionStructure,
    pub method: String,
}

impl WelfareReport {
    /// Checks the defining invariant: `value` equals recomputing the
    /// objective on `partition`.
    pub fn verify(&self, g: &WeightedGraph) -> Result<bool> {
        let recomputed = match self.objective {
            Objective::Utilitarian => utilitarian_welfare(g, &self.partition)?,
            Objective::Egalitarian => egalitarian_welfare(g, &self.partition)?,
        };
        Ok(recomputed == self.value)
    }
}

fn check_partition(g: &WeightedGraph, p: &CoalitionStructure) -> Result<()> {
    if p.vertex_count() != g.vertex_count() {
        return Err(FhgError::domain(format!(
            "partition covers {} vertices, graph has {}",
            p.vertex_count(),
            g.vertex_count()
        )));
    }
    // Canonical form guarantees disjointness and range when counts match.
    for b in p.blocks() {
        if let Some(v) = b.iter().find(|v| v.index() >= g.vertex_count()) {
            return Err(FhgError::domain(format!("vertex {v} out of range")));
        }
    }
    Ok(())
}

/// Utility of `v` in coalition `c`: the sum of weights to neighbors inside
/// `c`, divided by `|c|`. A singleton yields 0.
pub fn agent_utility(g: &WeightedGraph, v: VertexId, c: &[VertexId]) -> Result<Rational> {
    if !c.contains(&v) {
        return Err(FhgError::domain(format!("vertex {v} not in its coalition")));
    }
    let mut sum = rat(0);
    for u in c {
        if *u != v {
            if let Some(w) = g.weight(v, *u) {
                sum += w;
            }
        }
    }
    Ok(sum / rat(c.len() as i64))
}

/// Total internal weight of a coalition (each edge counted once).
pub fn internal_weight(g: &WeightedGraph, c: &[VertexId]) -> Rational {
    let mut sum = rat(0);
    for (i, u) in c.iter().enumerate() {
        for v in &c[i + 1..] {
            if let Some(w) = g.weight(*u, *v) {
                sum += w;
            }
        }
    }
    sum
}

/// Sum of all agents' utilities; per coalition this equals twice its
/// internal weight over its size.
pub fn utilitarian_welfare(g: &WeightedGraph, p: &CoalitionStructure) -> Result<Rational> {
    check_partition(g, p)?;
    let mut total = rat(0);
    for c in p.blocks() {
        total += rat(2) * internal_weight(g, c) / rat(c.len() as i64);
    }
    Ok(total)
}

/// Minimum utility over all agents. Defined as 0 on the empty graph.
pub fn egalitarian_welfare(g: &WeightedGraph, p: &CoalitionStructure) -> Result<Rational> {
    check_partition(g, p)?;
    let mut min: Option<Rational> = None;
    for c in p.blocks() {
        for v in c {
            let u = agent_utility(g, *v, c)?;
            if min.as_ref().is_none_or(|m| &u < m) {
                min = Some(u);
            }
        }
    }
    Ok(min.unwrap_or_else(|| rat(0)))
}
