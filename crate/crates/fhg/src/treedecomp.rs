//! Tree decompositions: heuristic construction, validation, nice-ification,
//! and the PACE-style `.td` text format.
//!
//! Solver correctness never depends on the width of a decomposition, only on
//! its validity, so heuristics (min-fill by default, min-degree for speed)
//! are enough; exact treewidth is out of scope. Externally computed
//! decompositions can be imported from `.td` files.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{FhgError, Result};
use crate::graph::{VertexId, WeightedGraph};

/// A tree over bags of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Bags, each sorted ascending.
    pub bags: Vec<Vec<VertexId>>,
    /// Undirected tree edges between bag indices.
    pub edges: Vec<(usize, usize)>,
}

/// First violated condition found by [`validate_decomposition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotATree,
    MissingVertex(VertexId),
    UncoveredEdge(VertexId, VertexId),
    DisconnectedTrace(VertexId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree => write!(f, "bag graph is not a tree"),
            Violation::MissingVertex(v) => write!(f, "vertex {v} appears in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge ({u},{v}) is in no bag"),
            Violation::DisconnectedTrace(v) => {
                write!(f, "the bags containing vertex {v} are not connected")
            }
        }
    }
}

impl TreeDecomposition {
    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// `max |X_t| - 1`; -1 for an empty-bag-only decomposition.
    pub fn width(&self) -> i64 {
        self.bags
            .iter()
            .map(|b| b.len() as i64 - 1)
            .max()
            .unwrap_or(-1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Checks the three decomposition conditions plus tree-ness, reporting the
/// first violation with a witness.
pub fn validate_decomposition(
    g: &WeightedGraph,
    td: &TreeDecomposition,
) -> std::result::Result<(), Violation> {
    let nb = td.bags.len();
    if nb == 0 || td.edges.len() != nb - 1 {
        return Err(Violation::NotATree);
    }
    for &(a, b) in &td.edges {
        if a >= nb || b >= nb {
            return Err(Violation::NotATree);
        }
    }
    let adj = td.adjacency();
    let mut seen = vec![false; nb];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(t) = queue.pop_front() {
        for &u in &adj[t] {
            if !seen[u] {
                seen[u] = true;
                reached += 1;
                queue.push_back(u);
            }
        }
    }
    if reached != nb {
        return Err(Violation::NotATree);
    }

    let n = g.vertex_count();
    let mut bag_count = vec![0usize; n];
    for bag in &td.bags {
        for v in bag {
            if v.index() >= n {
                return Err(Violation::MissingVertex(*v));
            }
            bag_count[v.index()] += 1;
        }
    }
    if let Some(v) = (0..n).find(|&v| bag_count[v] == 0) {
        return Err(Violation::MissingVertex(VertexId(v as u32)));
    }

    for (u, v, _) in g.edges() {
        let covered = td
            .bags
            .iter()
            .any(|bag| bag.binary_search(u).is_ok() && bag.binary_search(v).is_ok());
        if !covered {
            return Err(Violation::UncoveredEdge(*u, *v));
        }
    }

    // per-vertex trace connectivity
    for v in 0..n {
        let vid = VertexId(v as u32);
        let nodes: Vec<usize> = (0..nb)
            .filter(|&t| td.bags[t].binary_search(&vid).is_ok())
            .collect();
        let mut seen = vec![false; nb];
        let mut queue = VecDeque::from([nodes[0]]);
        seen[nodes[0]] = true;
        let mut reached = 1;
        while let Some(t) = queue.pop_front() {
            for &u in &adj[t] {
                if !seen[u] && td.bags[u].binary_search(&vid).is_ok() {
                    seen[u] = true;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        if reached != nodes.len() {
            return Err(Violation::DisconnectedTrace(vid));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    MinFill,
    MinDegree,
}

/// Builds a decomposition from an elimination ordering chosen greedily by
/// `strategy` (ties to the smallest vertex id, so output is deterministic).
pub fn heuristic_decomposition(g: &WeightedGraph, strategy: Strategy) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Vec::new()],
            edges: Vec::new(),
        };
    }
    let mut adj: Vec<BTreeSet<u32>> = (0..n)
        .map(|v| {
            g.neighbors(VertexId(v as u32))
                .iter()
                .map(|(u, _)| u.0)
                .collect()
        })
        .collect();
    let mut alive: BTreeSet<u32> = (0..n as u32).collect();
    let fill_count = |adj: &Vec<BTreeSet<u32>>, v: u32| -> usize {
        let nb: Vec<u32> = adj[v as usize].iter().copied().collect();
        let mut missing = 0;
        for (i, a) in nb.iter().enumerate() {
            for b in &nb[i + 1..] {
                if !adj[*a as usize].contains(b) {
                    missing += 1;
                }
            }
        }
        missing
    };

    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut bags: Vec<Vec<VertexId>> = Vec::with_capacity(n);
    while let Some(&first) = alive.iter().next() {
        let pick = match strategy {
            Strategy::MinDegree => alive
                .iter()
                .copied()
                .min_by_key(|&v| (adj[v as usize].len(), v))
                .unwrap_or(first),
            Strategy::MinFill => alive
                .iter()
                .copied()
                .min_by_key(|&v| (fill_count(&adj, v), v))
                .unwrap_or(first),
        };
        let nb: Vec<u32> = adj[pick as usize].iter().copied().collect();
        let mut bag: Vec<VertexId> = nb.iter().map(|&u| VertexId(u)).collect();
        bag.push(VertexId(pick));
        bag.sort();
        bags.push(bag);
        for (i, a) in nb.iter().enumerate() {
            for b in &nb[i + 1..] {
                adj[*a as usize].insert(*b);
                adj[*b as usize].insert(*a);
            }
        }
        for u in &nb {
            adj[*u as usize].remove(&pick);
        }
        adj[pick as usize].clear();
        alive.remove(&pick);
        order.push(pick);
    }

    // Connect each bag to the bag of its earliest-eliminated remaining
    // neighbor; bags without one chain to the next bag to keep a tree.
    let mut pos = vec![0usize; n];
    for (i, v) in order.iter().enumerate() {
        pos[*v as usize] = i;
    }
    let mut edges = Vec::new();
    for (i, v) in order.iter().enumerate() {
        let parent = bags[i]
            .iter()
            .filter(|u| u.0 != *v)
            .map(|u| pos[u.index()])
            .min();
        match parent {
            Some(p) => edges.push((i, p)),
            None if i + 1 < n => edges.push((i, i + 1)),
            None => {}
        }
    }
    TreeDecomposition { bags, edges }
}

/// Node kinds of a nice tree decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(VertexId),
    Forget(VertexId),
    Join,
}

/// Rooted decomposition whose internal nodes are introduce/forget/join and
/// whose root and leaves carry empty bags.
#[derive(Clone, Debug)]
pub struct NiceTreeDecomposition {
    pub bags: Vec<Vec<VertexId>>,
    pub kinds: Vec<NodeKind>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn width(&self) -> i64 {
        self.bags
            .iter()
            .map(|b| b.len() as i64 - 1)
            .max()
            .unwrap_or(-1)
    }

    /// Bottom-up node order (children before parents).
    pub fn postorder(&self) -> Vec<usize> {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            order.extend(self.children[order[i]].iter().copied());
            i += 1;
        }
        order.reverse();
        order
    }

    /// Checks the nice-node grammar and the decomposition conditions.
    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        let nb = self.bags.len();
        if !self.bags[self.root].is_empty() {
            return Err(FhgError::InvalidDecomposition("root bag not empty".into()));
        }
        for t in 0..nb {
            let kids = &self.children[t];
            match self.kinds[t] {
                NodeKind::Leaf => {
                    if !kids.is_empty() || !self.bags[t].is_empty() {
                        return Err(FhgError::InvalidDecomposition(
                            "leaf node with children or a nonempty bag".into(),
                        ));
                    }
                }
                NodeKind::Introduce(v) => {
                    if kids.len() != 1 {
                        return Err(FhgError::InvalidDecomposition("introduce arity".into()));
                    }
                    let child = &self.bags[kids[0]];
                    let mut expect = child.clone();
                    expect.push(v);
                    expect.sort();
                    if child.binary_search(&v).is_ok() || expect != self.bags[t] {
                        return Err(FhgError::InvalidDecomposition(format!(
                            "introduce({v}) bag mismatch"
                        )));
                    }
                }
                NodeKind::Forget(v) => {
                    if kids.len() != 1 {
                        return Err(FhgError::InvalidDecomposition("forget arity".into()));
                    }
                    let child = &self.bags[kids[0]];
                    let expect: Vec<VertexId> = child.iter().copied().filter(|u| *u != v).collect();
                    if child.binary_search(&v).is_err() || expect != self.bags[t] {
                        return Err(FhgError::InvalidDecomposition(format!(
                            "forget({v}) bag mismatch"
                        )));
                    }
                }
                NodeKind::Join => {
                    if kids.len() != 2
                        || self.bags[kids[0]] != self.bags[t]
                        || self.bags[kids[1]] != self.bags[t]
                    {
                        return Err(FhgError::InvalidDecomposition("join bag mismatch".into()));
                    }
                }
            }
        }
        let mut parented = vec![false; nb];
        for t in 0..nb {
            for &k in &self.children[t] {
                if parented[k] {
                    return Err(FhgError::InvalidDecomposition(
                        "node has two parents".into(),
                    ));
                }
                parented[k] = true;
            }
        }
        // decomposition conditions via the generic validator
        let td = TreeDecomposition {
            bags: self.bags.clone(),
            edges: (0..nb)
                .flat_map(|t| self.children[t].iter().map(move |&k| (t, k)))
                .collect(),
        };
        validate_decomposition(g, &td)
            .map_err(|v| FhgError::InvalidDecomposition(v.to_string()))?;
        Ok(())
    }
}

/// Helper that appends nice nodes.
struct NiceBuilder {
    bags: Vec<Vec<VertexId>>,
    kinds: Vec<NodeKind>,
    children: Vec<Vec<usize>>,
}

impl NiceBuilder {
    fn push(&mut self, bag: Vec<VertexId>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.bags.push(bag);
        self.kinds.push(kind);
        self.children.push(children);
        self.bags.len() - 1
    }

    /// Chain from an empty leaf up to `target`, introducing one by one.
    fn leaf_chain(&mut self, target: &[VertexId]) -> usize {
        let mut node = self.push(Vec::new(), NodeKind::Leaf, Vec::new());
        let mut bag: Vec<VertexId> = Vec::new();
        for v in target {
            bag.push(*v);
            bag.sort();
            node = self.push(bag.clone(), NodeKind::Introduce(*v), vec![node]);
        }
        node
    }

    /// Chain from `node` (with bag `from`) to bag `to`: forgets, then
    /// introduces.
    fn morph(&mut self, mut node: usize, from: &[VertexId], to: &[VertexId]) -> usize {
        let mut bag: Vec<VertexId> = from.to_vec();
        let to_set: BTreeSet<VertexId> = to.iter().copied().collect();
        for v in from {
            if !to_set.contains(v) {
                bag.retain(|u| u != v);
                node = self.push(bag.clone(), NodeKind::Forget(*v), vec![node]);
            }
        }
        let have: BTreeSet<VertexId> = bag.iter().copied().collect();
        for v in to {
            if !have.contains(v) {
                bag.push(*v);
                bag.sort();
                node = self.push(bag.clone(), NodeKind::Introduce(*v), vec![node]);
            }
        }
        node
    }
}

/// Converts a valid decomposition into a nice one of the same width with
/// `O(width * n)` nodes. Bags that are subsets of a neighbor are contracted
/// away first.
pub fn make_nice(g: &WeightedGraph, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    validate_decomposition(g, td).map_err(|v| FhgError::InvalidDecomposition(v.to_string()))?;
    let (bags, adj) = compress(td);
    let mut builder = NiceBuilder {
        bags: Vec::new(),
        kinds: Vec::new(),
        children: Vec::new(),
    };

    // Rooted DFS over the compressed tree; children before parents.
    let root = 0usize;
    let mut parent = vec![usize::MAX; bags.len()];
    let mut dfs_order = vec![root];
    let mut seen = vec![false; bags.len()];
    seen[root] = true;
    let mut i = 0;
    while i < dfs_order.len() {
        let t = dfs_order[i];
        for &u in &adj[t] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = t;
                dfs_order.push(u);
            }
        }
        i += 1;
    }

    // Build each node's nice subtree after its children.
    let mut built: Vec<Option<usize>> = vec![None; bags.len()];
    for &t in dfs_order.iter().rev() {
        let kids: Vec<usize> = adj[t].iter().copied().filter(|&u| parent[u] == t).collect();
        let mut tops: Vec<usize> = Vec::new();
        for k in kids {
            let sub = built[k].expect("child built first");
            tops.push(builder.morph(sub, &bags[k].clone(), &bags[t].clone()));
        }
        let node = match tops.len() {
            0 => builder.leaf_chain(&bags[t].clone()),
            1 => tops[0],
            _ => {
                let mut acc = tops[0];
                for &other in &tops[1..] {
                    acc = builder.push(bags[t].clone(), NodeKind::Join, vec![acc, other]);
                }
                acc
            }
        };
        built[t] = Some(node);
    }

    let top = built[root].expect("root built");
    let root_node = builder.morph(top, &bags[root].clone(), &[]);
    let nice = NiceTreeDecomposition {
        bags: builder.bags,
        kinds: builder.kinds,
        children: builder.children,
        root: root_node,
    };
    nice.validate(g)?;
    Ok(nice)
}

/// Contracts bags that are subsets of a neighboring bag.
fn compress(td: &TreeDecomposition) -> (Vec<Vec<VertexId>>, Vec<Vec<usize>>) {
    let mut bags = td.bags.clone();
    let mut adj: Vec<BTreeSet<usize>> = {
        let mut a = vec![BTreeSet::new(); bags.len()];
        for &(x, y) in &td.edges {
            a[x].insert(y);
            a[y].insert(x);
        }
        a
    };
    let mut alive: Vec<bool> = vec![true; bags.len()];
    loop {
        let mut contracted = false;
        for t in 0..bags.len() {
            if !alive[t] {
                continue;
            }
            let target = adj[t]
                .iter()
                .copied()
                .find(|&u| alive[u] && bags[t].iter().all(|v| bags[u].binary_search(v).is_ok()));
            if let Some(u) = target {
                if alive.iter().filter(|a| **a).count() == 1 {
                    break;
                }
                let neighbors: Vec<usize> = adj[t].iter().copied().filter(|&x| x != u).collect();
                for x in neighbors {
                    adj[x].remove(&t);
                    adj[x].insert(u);
                    adj[u].insert(x);
                }
                adj[u].remove(&t);
                adj[t].clear();
                alive[t] = false;
                contracted = true;
            }
        }
        if !contracted {
            break;
        }
    }
    let keep: Vec<usize> = (0..bags.len()).filter(|&t| alive[t]).collect();
    let mut remap = vec![usize::MAX; bags.len()];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let new_bags: Vec<Vec<VertexId>> = keep.iter().map(|&t| std::mem::take(&mut bags[t])).collect();
    let mut new_adj = vec![Vec::new(); keep.len()];
    for &old in &keep {
        for &u in &adj[old] {
            new_adj[remap[old]].push(remap[u]);
        }
    }
    (new_bags, new_adj)
}

/// Reads the PACE-style format: `s td <#bags> <width+1> <n>`, `b <id>
/// <vertices...>` with 1-based ids, then tree edges as id pairs. Lines
/// starting with `c` are comments.
pub fn read_td(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut bags: Vec<Vec<VertexId>> = Vec::new();
    let mut edges = Vec::new();
    let mut declared: Option<(usize, usize)> = None; // (#bags, n)
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "s" {
            if fields.len() != 5 || fields[1] != "td" {
                return Err(FhgError::parse(
                    lineno,
                    "expected `s td <bags> <width+1> <n>`",
                ));
            }
            let nb: usize = fields[2]
                .parse()
                .map_err(|_| FhgError::parse(lineno, "bad bag count"))?;
            let n: usize = fields[4]
                .parse()
                .map_err(|_| FhgError::parse(lineno, "bad vertex count"))?;
            declared = Some((nb, n));
            bags = vec![Vec::new(); nb];
        } else if fields[0] == "b" {
            let (nb, n) = declared.ok_or_else(|| FhgError::parse(lineno, "missing s line"))?;
            let id: usize = fields
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| FhgError::parse(lineno, "bad bag id"))?;
            if id == 0 || id > nb {
                return Err(FhgError::parse(lineno, "bag id out of range"));
            }
            let mut bag = Vec::new();
            for f in &fields[2..] {
                let v: usize = f
                    .parse()
                    .map_err(|_| FhgError::parse(lineno, "bad vertex"))?;
                if v == 0 || v > n {
                    return Err(FhgError::parse(lineno, "vertex out of range"));
                }
                bag.push(VertexId((v - 1) as u32));
            }
            bag.sort();
            bag.dedup();
            bags[id - 1] = bag;
        } else {
            let (nb, _) = declared.ok_or_else(|| FhgError::parse(lineno, "missing s line"))?;
            if fields.len() != 2 {
                return Err(FhgError::parse(lineno, "expected `<id> <id>` tree edge"));
            }
            let a: usize = fields[0]
                .parse()
                .map_err(|_| FhgError::parse(lineno, "bad edge endpoint"))?;
            let b: usize = fields[1]
                .parse()
                .map_err(|_| FhgError::parse(lineno, "bad edge endpoint"))?;
            if a == 0 || a > nb || b == 0 || b > nb {
                return Err(FhgError::parse(lineno, "edge endpoint out of range"));
            }
            edges.push((a - 1, b - 1));
        }
    }
    let (_, n) = declared.ok_or_else(|| FhgError::parse(0, "missing s line"))?;
    Ok((TreeDecomposition { bags, edges }, n))
}

/// Writes the PACE-style format (1-based ids).
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "s td {} {} {}\n",
        td.bags.len(),
        td.width() + 1,
        n
    ));
    for (i, bag) in td.bags.iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for v in bag {
            out.push_str(&format!(" {}", v.0 + 1));
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    fn path(n: u32) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|x| (x, x + 1)).collect();
        WeightedGraph::unweighted(n as usize, &edges).unwrap()
    }

    fn k(n: u32) -> WeightedGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        WeightedGraph::unweighted(n as usize, &edges).unwrap()
    }

    #[test]
    fn heuristics_give_expected_widths() {
        for strategy in [Strategy::MinFill, Strategy::MinDegree] {
            let td = heuristic_decomposition(&path(6), strategy);
            assert_eq!(validate_decomposition(&path(6), &td), Ok(()));
            assert_eq!(td.width(), 1, "trees have width 1");

            let td = heuristic_decomposition(&k(4), strategy);
            assert_eq!(validate_decomposition(&k(4), &td), Ok(()));
            assert_eq!(td.width(), 3, "K4 needs one bag of size 4");

            let c4 = WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
            let td = heuristic_decomposition(&c4, strategy);
            assert_eq!(validate_decomposition(&c4, &td), Ok(()));
            assert_eq!(td.width(), 2);
        }
    }

    #[test]
    fn validator_reports_witnesses() {
        let p3 = path(3);
        let ok = TreeDecomposition {
            bags: vec![vec![v(0), v(1)], vec![v(1), v(2)]],
            edges: vec![(0, 1)],
        };
        assert_eq!(validate_decomposition(&p3, &ok), Ok(()));

        let tri = WeightedGraph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            validate_decomposition(&tri, &ok),
            Err(Violation::UncoveredEdge(v(0), v(2)))
        );

        let p4 = path(4);
        let split_trace = TreeDecomposition {
            bags: vec![vec![v(0), v(1)], vec![v(2)], vec![v(0), v(3)]],
            edges: vec![(0, 1), (1, 2)],
        };
        assert!(matches!(
            validate_decomposition(&p4, &split_trace),
            Err(Violation::DisconnectedTrace(_) | Violation::UncoveredEdge(_, _))
        ));

        let missing = TreeDecomposition {
            bags: vec![vec![v(0), v(1)]],
            edges: vec![],
        };
        assert_eq!(
            validate_decomposition(&p3, &missing),
            Err(Violation::MissingVertex(v(2)))
        );
    }

    #[test]
    fn make_nice_preserves_width_and_validates() {
        for g in [path(5), k(4), WeightedGraph::unweighted(1, &[]).unwrap()] {
            for strategy in [Strategy::MinFill, Strategy::MinDegree] {
                let td = heuristic_decomposition(&g, strategy);
                let nice = make_nice(&g, &td).unwrap();
                nice.validate(&g).unwrap();
                assert_eq!(nice.width(), td.width());
                assert!(
                    nice.node_count()
                        <= 4 * (td.width().max(1) as usize + 1) * g.vertex_count().max(1)
                );
                // every vertex is forgotten exactly once and introduced at
                // least once
                let mut forgets = vec![0usize; g.vertex_count()];
                let mut introduces = vec![0usize; g.vertex_count()];
                for kind in &nice.kinds {
                    match kind {
                        NodeKind::Forget(v) => forgets[v.index()] += 1,
                        NodeKind::Introduce(v) => introduces[v.index()] += 1,
                        _ => {}
                    }
                }
                assert!(forgets.iter().all(|&f| f == 1), "{forgets:?}");
                assert!(introduces.iter().all(|&i| i >= 1));
            }
        }
    }

    #[test]
    fn single_bag_becomes_introduce_forget_chain() {
        let g = WeightedGraph::unweighted(2, &[(0, 1)]).unwrap();
        let td = TreeDecomposition {
            bags: vec![vec![v(0), v(1)]],
            edges: vec![],
        };
        let nice = make_nice(&g, &td).unwrap();
        nice.validate(&g).unwrap();
        let mut introduces = 0;
        let mut forgets = 0;
        let mut joins = 0;
        for kind in &nice.kinds {
            match kind {
                NodeKind::Introduce(_) => introduces += 1,
                NodeKind::Forget(_) => forgets += 1,
                NodeKind::Join => joins += 1,
                NodeKind::Leaf => {}
            }
        }
        assert_eq!((introduces, forgets, joins), (2, 2, 0));
    }

    #[test]
    fn pace_round_trip() {
        let g = path(4);
        let td = heuristic_decomposition(&g, Strategy::MinFill);
        let text = write_td(&td, 4);
        let (back, n) = read_td(&text).unwrap();
        assert_eq!(n, 4);
        assert_eq!(back, td);
        assert!(text.starts_with("s td "));
    }

    #[test]
    fn pace_rejects_malformed() {
        assert!(read_td("b 1 2\n").is_err());
        assert!(read_td("s td x 2 3\n").is_err());
        assert!(read_td("s td 1 2 3\nb 2 1\n").is_err());
        assert!(read_td("s td 2 2 3\nb 1 1\nb 2 2\n1 5\n").is_err());
    }

    #[test]
    fn empty_graph_decomposition() {
        let g = WeightedGraph::unweighted(0, &[]).unwrap();
        let td = heuristic_decomposition(&g, Strategy::MinFill);
        assert_eq!(td.width(), -1);
        assert_eq!(validate_decomposition(&g, &td), Ok(()));
    }
}
