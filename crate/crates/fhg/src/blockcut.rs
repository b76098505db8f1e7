//! Block-cut trees of connected block graphs, rooted for the dynamic
//! program in [`crate::block_dp`].

use crate::error::{FhgError, Result};
use crate::graph::{bcc_with_cuts, VertexId, WeightedGraph};

/// Bipartite tree between blocks (maximal cliques) and cut vertices.
#[derive(Clone, Debug)]
pub struct BlockCutTree {
    /// Maximal cliques, each sorted; the list is sorted canonically.
    pub blocks: Vec<Vec<VertexId>>,
    /// Articulation points, sorted.
    pub cut_vertices: Vec<VertexId>,
    /// Per block: indices into `cut_vertices` of the cut vertices it contains.
    pub block_cuts: Vec<Vec<usize>>,
    /// Per cut vertex: indices into `blocks` of the blocks containing it.
    pub cut_blocks: Vec<Vec<usize>>,
}

/// Node of the (rooted) block-cut tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeId {
    Block(usize),
    Cut(usize),
}

/// Block-cut tree rooted at a block node, with the accessors the block DP
/// consumes: parent/children, the parent cut vertex `c_p` of each non-root
/// block, the non-cut vertices `R(B)` of each block, and subtree vertex
/// sets `V_x`.
#[derive(Clone, Debug)]
pub struct RootedBlockCutTree {
    pub tree: BlockCutTree,
    pub root: usize,
    /// Parent of each block node (`None` for the root); the value indexes
    /// `tree.cut_vertices`.
    pub block_parent: Vec<Option<usize>>,
    /// Parent block of each cut node.
    pub cut_parent: Vec<usize>,
    /// Children cut nodes of each block, ascending by cut vertex id.
    pub block_children: Vec<Vec<usize>>,
    /// Children block nodes of each cut node.
    pub cut_children: Vec<Vec<usize>>,
    /// `R(B)`: non-cut vertices of each block, sorted.
    pub rb: Vec<Vec<VertexId>>,
    /// Subtree vertex sets, sorted.
    pub block_subtree: Vec<Vec<VertexId>>,
    pub cut_subtree: Vec<Vec<VertexId>>,
}

impl BlockCutTree {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The cut vertex for a cut-node index.
    pub fn cut_vertex(&self, c: usize) -> VertexId {
        self.cut_vertices[c]
    }
}

/// Builds the block-cut tree of a connected block graph. Blocks are exactly
/// the maximal cliques, cut vertices exactly the articulation points.
pub fn build_block_cut_tree(g: &WeightedGraph) -> Result<BlockCutTree> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(FhgError::domain("block-cut tree of an empty graph"));
    }
    if g.connected_components().len() != 1 {
        return Err(FhgError::domain("graph is not connected"));
    }
    let (bccs, cuts) = bcc_with_cuts(g);
    let mut blocks: Vec<Vec<VertexId>> = if bccs.is_empty() {
        // single vertex: one block, no cut vertices
        vec![vec![VertexId(0)]]
    } else {
        for bcc in &bccs {
            let k = bcc.vertices.len();
            if bcc.edge_count != k * (k - 1) / 2 {
                return Err(FhgError::domain(
                    "graph is not a block graph (a biconnected component is not a clique)",
                ));
            }
        }
        bccs.into_iter().map(|b| b.vertices).collect()
    };
    blocks.sort();

    let mut cut_index = vec![usize::MAX; n];
    for (i, c) in cuts.iter().enumerate() {
        cut_index[c.index()] = i;
    }
    let mut block_cuts = vec![Vec::new(); blocks.len()];
    let mut cut_blocks = vec![Vec::new(); cuts.len()];
    for (bi, block) in blocks.iter().enumerate() {
        for v in block {
            let ci = cut_index[v.index()];
            if ci != usize::MAX {
                block_cuts[bi].push(ci);
                cut_blocks[ci].push(bi);
            }
        }
    }
    Ok(BlockCutTree {
        blocks,
        cut_vertices: cuts,
        block_cuts,
        cut_blocks,
    })
}

/// Roots the tree at block `root`, populating parents, children, `c_p`,
/// `R(B)`, and subtree vertex sets.
pub fn root_at(tree: &BlockCutTree, root: usize) -> Result<RootedBlockCutTree> {
    let nb = tree.blocks.len();
    let nc = tree.cut_vertices.len();
    if root >= nb {
        return Err(FhgError::domain(format!("no block with index {root}")));
    }
    let mut block_parent = vec![None; nb];
    let mut cut_parent = vec![usize::MAX; nc];
    let mut block_children = vec![Vec::new(); nb];
    let mut cut_children = vec![Vec::new(); nc];
    let mut order = Vec::with_capacity(nb + nc);
    let mut seen_block = vec![false; nb];
    let mut seen_cut = vec![false; nc];
    let mut stack = vec![NodeId::Block(root)];
    seen_block[root] = true;
    while let Some(node) = stack.pop() {
        order.push(node);
        match node {
            NodeId::Block(b) => {
                let mut kids: Vec<usize> = tree.block_cuts[b]
                    .iter()
                    .copied()
                    .filter(|&c| !seen_cut[c])
                    .collect();
                kids.sort_by_key(|&c| tree.cut_vertices[c]);
                for &c in &kids {
                    seen_cut[c] = true;
                    cut_parent[c] = b;
                    stack.push(NodeId::Cut(c));
                }
                block_children[b] = kids;
            }
            NodeId::Cut(c) => {
                let mut kids: Vec<usize> = tree.cut_blocks[c]
                    .iter()
                    .copied()
                    .filter(|&b| !seen_block[b])
                    .collect();
                kids.sort();
                for &b in &kids {
                    seen_block[b] = true;
                    block_parent[b] = Some(c);
                    stack.push(NodeId::Block(b));
                }
                cut_children[c] = kids;
            }
        }
    }

    let cut_set: Vec<bool> = {
        let n = tree
            .blocks
            .iter()
            .flatten()
            .map(|v| v.index())
            .max()
            .unwrap_or(0)
            + 1;
        let mut s = vec![false; n];
        for c in &tree.cut_vertices {
            s[c.index()] = true;
        }
        s
    };
    let rb = tree
        .blocks
        .iter()
        .map(|b| b.iter().copied().filter(|v| !cut_set[v.index()]).collect())
        .collect();

    // subtree vertex sets, children before parents
    let mut block_subtree: Vec<Vec<VertexId>> = vec![Vec::new(); nb];
    let mut cut_subtree: Vec<Vec<VertexId>> = vec![Vec::new(); nc];
    for node in order.iter().rev() {
        match *node {
            NodeId::Block(b) => {
                let mut vs: Vec<VertexId> = tree.blocks[b].clone();
                for &c in &block_children[b] {
                    vs.extend(cut_subtree[c].iter().copied());
                }
                vs.sort();
                vs.dedup();
                block_subtree[b] = vs;
            }
            NodeId::Cut(c) => {
                let mut vs = vec![tree.cut_vertices[c]];
                for &b in &cut_children[c] {
                    vs.extend(block_subtree[b].iter().copied());
                }
                vs.sort();
                vs.dedup();
                cut_subtree[c] = vs;
            }
        }
    }

    Ok(RootedBlockCutTree {
        tree: tree.clone(),
        root,
        block_parent,
        cut_parent,
        block_children,
        cut_children,
        rb,
        block_subtree,
        cut_subtree,
    })
}

impl RootedBlockCutTree {
    /// `c_p`: the cut vertex a non-root block shares with its parent.
    pub fn parent_cut_vertex(&self, block: usize) -> Option<VertexId> {
        self.block_parent[block].map(|c| self.tree.cut_vertices[c])
    }

    /// Nodes in bottom-up order (every child before its parent).
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut order = vec![NodeId::Block(self.root)];
        let mut i = 0;
        while i < order.len() {
            match order[i] {
                NodeId::Block(b) => {
                    order.extend(self.block_children[b].iter().map(|&c| NodeId::Cut(c)))
                }
                NodeId::Cut(c) => {
                    order.extend(self.cut_children[c].iter().map(|&b| NodeId::Block(b)))
                }
            }
            i += 1;
        }
        order.reverse();
        order
    }
}
