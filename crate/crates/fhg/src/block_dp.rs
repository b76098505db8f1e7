//! Maximum utilitarian welfare on unweighted block graphs, by dynamic
//! programming over the rooted block-cut tree.
//!
//! An optimal coalition structure exists in which every coalition induces a
//! clique or a star, so the DP tracks, per node of the block-cut tree, the
//! role of the shared cut vertex inside its coalition:
//!
//! - block tables `f*(B, type, k)`: `type` is the role of the parent cut
//!   vertex `c_p` (`iso`/`cl`/`sc`/`sl`), `k` the number of child cut
//!   vertices whose coalition uses no vertex of their own subtree;
//! - cut tables `g*(c, type)`: roles `iso`, `cl`, `sc_l` (star center with
//!   `l` leaves below), `scu` (star center that will absorb one leaf from
//!   the parent block), `sl`, and the aggregate `fin`.
//!
//! The root block has no parent; we attach a virtual parent cut vertex whose
//! role is forced to `iso` (a singleton contributing nothing), so the answer
//! is `max_k f*(B_r, iso, k)` with the published recurrences unchanged.
//!
//! Values are exact rationals; `None` is the invalid sentinel absorbing both
//! max and addition. Reconstruction follows stored branch choices top-down.

use crate::blockcut::{build_block_cut_tree, root_at, NodeId, RootedBlockCutTree};
use crate::error::{FhgError, Result};
use crate::graph::{CoalitionStructure, Objective, VertexId, WeightedGraph, WelfareReport};
use crate::par::par_map;
use crate::rational::{rat, ratio, Rational};

/// Role of a block's parent cut vertex within its coalition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockRole {
    Iso,
    Cl,
    Sc,
    Sl,
}

impl BlockRole {
    pub const ALL: [BlockRole; 4] = [BlockRole::Iso, BlockRole::Cl, BlockRole::Sc, BlockRole::Sl];

    fn index(self) -> usize {
        match self {
            BlockRole::Iso => 0,
            BlockRole::Cl => 1,
            BlockRole::Sc => 2,
            BlockRole::Sl => 3,
        }
    }
}

/// Role of a cut vertex within its coalition, seen from its cut node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutRole {
    Iso,
    Cl,
    /// Star center with `l >= 1` leaves inside the subtree.
    Sc(usize),
    /// Star center that additionally takes one leaf from the parent block.
    Scu,
    Sl,
    /// Closed: the best of `cl`, `sc_l`, `sl` (not `iso`).
    Fin,
}

/// Table value; `None` is the minus-infinity sentinel.
pub type Val = Option<Rational>;

fn vadd(a: &Val, b: &Val) -> Val {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

fn vadd_int(a: &Val, b: i64) -> Val {
    a.as_ref().map(|x| x + rat(b))
}

/// Max of candidates in preference order: on ties the earliest wins.
fn vmax_pref(candidates: &[Val]) -> (Val, usize) {
    let mut best: Val = None;
    let mut idx = 0;
    for (i, c) in candidates.iter().enumerate() {
        if let Some(v) = c {
            if best.as_ref().is_none_or(|b| v > b) {
                best = Some(v.clone());
                idx = i;
            }
        }
    }
    (best, idx)
}

/// How the parent cut vertex's coalition draws on the block-side pool
/// (available `R(B)` vertices plus open child cut vertices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Style {
    /// `c_p` is not available: its coalition takes nothing from the pool
    /// (`type = iso`, or `type = sl` with `c_p` consumed as the star leaf
    /// of a child's `scu` star). The pool forms one coalition by itself.
    Iso,
    /// `c_p` anchors a clique absorbing the whole pool.
    Cl,
    /// `c_p` pairs with exactly one pool vertex (star of size 2, either
    /// orientation); the rest of the pool forms one coalition.
    Pair,
}

fn style_of(role: BlockRole, leaf_is_cp: bool) -> Style {
    match role {
        BlockRole::Iso => Style::Iso,
        BlockRole::Cl => Style::Cl,
        BlockRole::Sc => Style::Pair,
        BlockRole::Sl => {
            if leaf_is_cp {
                Style::Iso
            } else {
                Style::Pair
            }
        }
    }
}

/// Welfare of the best block-side arrangement before any child is merged.
fn base_value(style: Style, pool: usize) -> i64 {
    if pool == 0 {
        return 0;
    }
    let pool = pool as i64;
    match style {
        Style::Iso => pool - 1,
        Style::Cl => pool,
        // a pair with c_p plus one clique of the remaining pool
        Style::Pair => 1.max(pool - 1),
    }
}

/// Whether opening one more cut vertex at count `k_eff` over `pool`
/// available `R` vertices yields no welfare increment.
fn is_special(style: Style, k_eff: usize, pool: usize) -> bool {
    match style {
        Style::Iso => k_eff == 1 && pool == 0,
        Style::Cl => false,
        Style::Pair => k_eff >= 1 && k_eff + pool == 2,
    }
}

/// Which block-side vertex the star that reaches into the block absorbs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    /// The smallest vertex of `R(B)` (all of `R(B)` is interchangeable).
    RVertex,
    ParentCut,
    /// A child cut vertex, by position in `block_children`.
    ChildCut(usize),
}

/// One `f`-style table: either Case (1) (no child plays `scu`) or one
/// Case (2) choice of `(c_center, v_leaf)`.
#[derive(Clone, Debug)]
pub struct CaseTable {
    /// Child positions in recurrence order; `seq[0]` is `c_center` for
    /// Case (2) tables.
    seq: Vec<usize>,
    /// Index of the base row (`f[i0][k_floor]` is the seed).
    i0: usize,
    /// `f[i][k]`, `i` in `0..=d`, `k` in `0..=d`.
    f: Vec<Vec<Val>>,
    /// Whether `f[i][k]` was reached by opening `seq[i-1]`.
    opened: Vec<Vec<bool>>,
}

impl CaseTable {
    pub fn value(&self, i: usize, k: usize) -> &Val {
        &self.f[i][k]
    }
}

#[derive(Clone, Debug)]
struct Case2Entry {
    center: usize,
    leaf: LeafKind,
    /// Per block role; `None` where the combination is invalid.
    tables: [Option<CaseTable>; 4],
}

/// Where an `f*` optimum came from.
#[derive(Clone, Copy, Debug)]
enum Prov {
    Case1,
    Case2(usize),
}

/// All tables of one block node.
#[derive(Clone, Debug)]
pub struct BlockTable {
    pub block: usize,
    d: usize,
    case1: [CaseTable; 4],
    case2: Vec<Case2Entry>,
    /// `f*(B, type, k)` with provenance.
    fstar: [Vec<(Val, Prov)>; 4],
    /// `max_k f*(B, type, k)` and the smallest maximizing `k`.
    h: [(Val, usize); 4],
}

impl BlockTable {
    /// `f*(B, type, k)`.
    pub fn fstar(&self, role: BlockRole, k: usize) -> &Val {
        &self.fstar[role.index()][k].0
    }

    /// `max_k f*(B, type, k)`.
    pub fn best(&self, role: BlockRole) -> &Val {
        &self.h[role.index()].0
    }

    pub fn best_k(&self, role: BlockRole) -> usize {
        self.h[role.index()].1
    }

    /// The Case (1) intermediate `f(B, type, i, k)`.
    pub fn case1_value(&self, role: BlockRole, i: usize, k: usize) -> &Val {
        &self.case1[role.index()].f[i][k]
    }

    pub fn child_count(&self) -> usize {
        self.d
    }
}

/// All tables of one cut node.
#[derive(Clone, Debug)]
pub struct CutTable {
    pub cut: usize,
    d: usize,
    g_iso: Vec<Val>,
    g_cl: Vec<Val>,
    cl_here: Vec<bool>,
    g_sl: Vec<Val>,
    sl_here: Vec<bool>,
    /// `g(c, sc_l, i)` for `l` in `1..=d` (row `l-1`).
    g_sc: Vec<Vec<Val>>,
    sc_merge: Vec<Vec<bool>>,
    scu: (Val, usize),
    fin: (Val, CutRole),
}

impl CutTable {
    /// `g*(c, type)`.
    pub fn gstar(&self, role: CutRole) -> Val {
        self.g(role, self.d)
    }

    /// Intermediate `g(c, type, i)`.
    pub fn g(&self, role: CutRole, i: usize) -> Val {
        match role {
            CutRole::Iso => self.g_iso[i].clone(),
            CutRole::Cl => self.g_cl[i].clone(),
            CutRole::Sl => self.g_sl[i].clone(),
            CutRole::Sc(l) => {
                if l == 0 {
                    self.g_iso[i].clone()
                } else if l > self.d {
                    None
                } else {
                    self.g_sc[l - 1][i].clone()
                }
            }
            CutRole::Scu => self.scu.0.clone(),
            CutRole::Fin => self.fin.0.clone(),
        }
    }
}

/// Increase in a star's welfare when its center gains one more leaf on top
/// of `l` existing ones: `2/((l+1)(l+2))`.
fn scu_increment(l: usize) -> Rational {
    ratio(2, ((l + 1) * (l + 2)) as i64)
}

/// Welfare lost by merging a star with `l-1` leaves and a star with one
/// leaf into a star with `l` leaves: `(l-1)(l+2) / (l(l+1))`.
fn merge_penalty(l: usize) -> Rational {
    ratio(((l - 1) * (l + 2)) as i64, (l * (l + 1)) as i64)
}

/// Computes the `g` tables of cut node `c` from its children's block tables.
pub fn cut_table(
    rooted: &RootedBlockCutTree,
    c: usize,
    block_tables: &[Option<BlockTable>],
) -> CutTable {
    let children = &rooted.cut_children[c];
    let d = children.len();
    let h = |j: usize, role: BlockRole| -> Val {
        block_tables[children[j]]
            .as_ref()
            .expect("child block table missing")
            .best(role)
            .clone()
    };

    let mut g_iso = vec![None; d + 1];
    g_iso[0] = Some(rat(0));
    for i in 1..=d {
        g_iso[i] = vadd(&g_iso[i - 1], &h(i - 1, BlockRole::Iso));
    }

    // cl and sl: the coalition of c lives in exactly one child block.
    let one_block = |role: BlockRole| -> (Vec<Val>, Vec<bool>) {
        let mut g = vec![None; d + 1];
        let mut here = vec![false; d + 1];
        g[0] = Some(rat(0));
        for i in 1..=d {
            if i == 1 {
                g[1] = h(0, role);
                here[1] = true;
            } else {
                let stay = vadd(&g[i - 1], &h(i - 1, BlockRole::Iso));
                let take = vadd(&g_iso[i - 1], &h(i - 1, role));
                let (best, which) = vmax_pref(&[stay, take]);
                g[i] = best;
                here[i] = which == 1;
            }
        }
        (g, here)
    };
    let (g_cl, cl_here) = one_block(BlockRole::Cl);
    let (g_sl, sl_here) = one_block(BlockRole::Sl);

    // sc_l: c is a star center collecting one leaf from each of l blocks.
    let mut g_sc: Vec<Vec<Val>> = vec![vec![None; d + 1]; d];
    let mut sc_merge = vec![vec![false; d + 1]; d];
    for l in 1..=d {
        for i in 1..=d {
            if l > i {
                continue;
            }
            let stay = if l < i {
                vadd(&g_sc[l - 1][i - 1], &h(i - 1, BlockRole::Iso))
            } else {
                None
            };
            let prev = if l == 1 {
                g_iso[i - 1].clone()
            } else {
                g_sc[l - 2][i - 1].clone()
            };
            let mut take = vadd(&prev, &h(i - 1, BlockRole::Sc));
            if l > 1 {
                take = take.map(|v| v - merge_penalty(l));
            }
            let (best, which) = vmax_pref(&[stay, take]);
            g_sc[l - 1][i] = best;
            sc_merge[l - 1][i] = which == 1;
        }
    }

    let scu_cands: Vec<Val> = (1..=d)
        .map(|l| g_sc[l - 1][d].as_ref().map(|v| v + scu_increment(l)))
        .collect();
    let (scu_val, scu_idx) = vmax_pref(&scu_cands);
    let scu = (scu_val, scu_idx + 1);

    let mut fin_roles: Vec<CutRole> = vec![CutRole::Cl];
    fin_roles.extend((1..=d).map(CutRole::Sc));
    fin_roles.push(CutRole::Sl);
    let fin_cands: Vec<Val> = fin_roles
        .iter()
        .map(|r| match r {
            CutRole::Cl => g_cl[d].clone(),
            CutRole::Sc(l) => g_sc[l - 1][d].clone(),
            CutRole::Sl => g_sl[d].clone(),
            _ => unreachable!(),
        })
        .collect();
    let (fin_val, fin_idx) = vmax_pref(&fin_cands);
    let fin = (fin_val, fin_roles[fin_idx]);

    CutTable {
        cut: c,
        d,
        g_iso,
        g_cl,
        cl_here,
        g_sl,
        sl_here,
        g_sc,
        sc_merge,
        scu,
        fin,
    }
}

/// Fills one case table given the seed entry and the child sequence.
#[allow(clippy::too_many_arguments)]
fn fill_case(
    d: usize,
    style: Style,
    pool: usize,
    i0: usize,
    k_floor: usize,
    seed: Val,
    seq: Vec<usize>,
    gstar: &dyn Fn(usize, CutRole) -> Val,
) -> CaseTable {
    let mut f = vec![vec![None; d + 1]; d + 1];
    let mut opened = vec![vec![false; d + 1]; d + 1];
    f[i0][k_floor] = seed;
    for i in i0 + 1..=d {
        let child = seq[i - 1];
        let fin = gstar(child, CutRole::Fin);
        let iso = gstar(child, CutRole::Iso);
        for k in k_floor..=i {
            if k == k_floor {
                f[i][k] = vadd(&f[i - 1][k], &fin);
                continue;
            }
            let closed = vadd(&f[i - 1][k], &fin);
            let bonus = if is_special(style, k - k_floor, pool) {
                0
            } else {
                1
            };
            let open = vadd_int(&vadd(&f[i - 1][k - 1], &iso), bonus);
            let (best, which) = vmax_pref(&[open, closed]);
            f[i][k] = best;
            opened[i][k] = which == 0;
        }
    }
    // c_p needs at least one partner for cl/sc/sl; discard final states
    // where neither an R vertex nor an open cut vertex is available.
    if style != Style::Iso && pool == 0 {
        f[d][k_floor] = None;
    }
    CaseTable { seq, i0, f, opened }
}

/// Computes all tables of block `b` from its children's cut tables.
pub fn block_table(
    rooted: &RootedBlockCutTree,
    b: usize,
    cut_tables: &[Option<CutTable>],
) -> BlockTable {
    let children = &rooted.block_children[b];
    let d = children.len();
    let r_count = rooted.rb[b].len();
    let is_root = b == rooted.root;
    let gstar = |pos: usize, role: CutRole| -> Val {
        cut_tables[children[pos]]
            .as_ref()
            .expect("child cut table missing")
            .gstar(role)
    };

    let case1: [CaseTable; 4] = BlockRole::ALL.map(|role| {
        let style = style_of(role, false);
        fill_case(
            d,
            style,
            r_count,
            0,
            0,
            Some(rat(base_value(style, r_count))),
            (0..d).collect(),
            &gstar,
        )
    });

    let mut case2 = Vec::new();
    for center in 0..d {
        let scu = gstar(center, CutRole::Scu);
        if scu.is_none() {
            continue;
        }
        let mut leaves: Vec<LeafKind> = Vec::new();
        if r_count > 0 {
            leaves.push(LeafKind::RVertex);
        }
        if !is_root {
            leaves.push(LeafKind::ParentCut);
        }
        leaves.extend((0..d).filter(|&j| j != center).map(LeafKind::ChildCut));
        for leaf in leaves {
            let tables: [Option<CaseTable>; 4] = BlockRole::ALL.map(|role| {
                let leaf_is_cp = leaf == LeafKind::ParentCut;
                if leaf_is_cp && role != BlockRole::Sl {
                    return None;
                }
                let style = style_of(role, leaf_is_cp);
                let (pool, i0, k_floor, mut seq, seed) = match leaf {
                    LeafKind::RVertex => {
                        let pool = r_count - 1;
                        let seed = vadd_int(&scu, base_value(style, pool));
                        (pool, 1, 0, vec![center], seed)
                    }
                    LeafKind::ParentCut => {
                        let seed = vadd_int(&scu, base_value(style, r_count));
                        (r_count, 1, 0, vec![center], seed)
                    }
                    LeafKind::ChildCut(j) => {
                        let seed = vadd_int(
                            &vadd(&scu, &gstar(j, CutRole::Iso)),
                            base_value(style, r_count),
                        );
                        (r_count, 2, 1, vec![center, j], seed)
                    }
                };
                let rest: Vec<usize> = (0..d).filter(|p| !seq.contains(p)).collect();
                seq.extend(rest);
                Some(fill_case(d, style, pool, i0, k_floor, seed, seq, &gstar))
            });
            case2.push(Case2Entry {
                center,
                leaf,
                tables,
            });
        }
    }

    let fstar: [Vec<(Val, Prov)>; 4] = BlockRole::ALL.map(|role| {
        (0..=d)
            .map(|k| {
                let mut best = (case1[role.index()].f[d][k].clone(), Prov::Case1);
                for (e, entry) in case2.iter().enumerate() {
                    if let Some(t) = &entry.tables[role.index()] {
                        if let Some(v) = &t.f[d][k] {
                            if best.0.as_ref().is_none_or(|b| v > b) {
                                best = (Some(v.clone()), Prov::Case2(e));
                            }
                        }
                    }
                }
                best
            })
            .collect()
    });

    let h: [(Val, usize); 4] = BlockRole::ALL.map(|role| {
        let row = &fstar[role.index()];
        let mut best: Val = None;
        let mut best_k = 0;
        for (k, (v, _)) in row.iter().enumerate() {
            if let Some(x) = v {
                if best.as_ref().is_none_or(|b| x > b) {
                    best = Some(x.clone());
                    best_k = k;
                }
            }
        }
        (best, best_k)
    });

    BlockTable {
        block: b,
        d,
        case1,
        case2,
        fstar,
        h,
    }
}

/// Tables for every node of a rooted block-cut tree, bottom-up.
pub struct DpTables {
    pub block_tables: Vec<Option<BlockTable>>,
    pub cut_tables: Vec<Option<CutTable>>,
}

pub fn run_dp(rooted: &RootedBlockCutTree) -> DpTables {
    let mut block_tables: Vec<Option<BlockTable>> = vec![None; rooted.tree.blocks.len()];
    let mut cut_tables: Vec<Option<CutTable>> = vec![None; rooted.tree.cut_vertices.len()];
    for node in rooted.postorder() {
        match node {
            NodeId::Block(b) => {
                block_tables[b] = Some(block_table(rooted, b, &cut_tables));
            }
            NodeId::Cut(c) => {
                cut_tables[c] = Some(cut_table(rooted, c, &block_tables));
            }
        }
    }
    DpTables {
        block_tables,
        cut_tables,
    }
}

/// The optimum: `max_k f*(B_r, iso, k)` under the virtual `iso` parent.
pub fn root_value(rooted: &RootedBlockCutTree, tables: &DpTables) -> Rational {
    tables.block_tables[rooted.root]
        .as_ref()
        .expect("root table")
        .best(BlockRole::Iso)
        .clone()
        .expect("root value must be finite")
}

struct Reconstructor<'a> {
    rooted: &'a RootedBlockCutTree,
    tables: &'a DpTables,
    out: Vec<Vec<VertexId>>,
}

impl Reconstructor<'_> {
    /// Emits all coalitions of `G[V_B]` except the part of `c_p`'s coalition,
    /// which is returned (without `c_p` itself).
    fn block(&mut self, b: usize, role: BlockRole, k: usize) -> Vec<VertexId> {
        let bt = self.tables.block_tables[b].as_ref().unwrap();
        let children = &self.rooted.block_children[b];
        let prov = bt.fstar[role.index()][k].1;
        let table: &CaseTable = match prov {
            Prov::Case1 => &bt.case1[role.index()],
            Prov::Case2(e) => bt.case2[e].tables[role.index()].as_ref().unwrap(),
        };

        // Unwind open/closed decisions from (d, k) down to the base row.
        let mut open_pos: Vec<usize> = Vec::new();
        let mut closed_pos: Vec<usize> = Vec::new();
        let mut kk = k;
        for i in (table.i0 + 1..=bt.d).rev() {
            if table.opened[i][kk] {
                open_pos.push(table.seq[i - 1]);
                kk -= 1;
            } else {
                closed_pos.push(table.seq[i - 1]);
            }
        }

        // Case (2): assemble the scu star of seq[0].
        let mut star: Option<Vec<VertexId>> = None;
        let mut leaf_is_cp = false;
        let mut r_avail: Vec<VertexId> = self.rooted.rb[b].clone();
        if let Prov::Case2(e) = prov {
            let entry_center = bt.case2[e].center;
            let entry_leaf = bt.case2[e].leaf;
            let center_cut = children[entry_center];
            let mut members = self.cut(center_cut, CutRole::Scu);
            match entry_leaf {
                LeafKind::RVertex => {
                    let leaf_v = r_avail.remove(0);
                    members.push(leaf_v);
                }
                LeafKind::ParentCut => {
                    leaf_is_cp = true;
                }
                LeafKind::ChildCut(j) => {
                    let leaf_cut = children[j];
                    let below = self.cut(leaf_cut, CutRole::Iso);
                    debug_assert_eq!(below.len(), 1);
                    members.extend(below);
                }
            }
            star = Some(members);
        }

        // Closed children: their coalition is finished inside the subtree.
        for pos in closed_pos {
            let cut = children[pos];
            let fin_role = self.tables.cut_tables[cut].as_ref().unwrap().fin.1;
            let own = self.cut(cut, fin_role);
            self.out.push(own);
        }

        // Open children merge into the block-side pool.
        let mut pool: Vec<VertexId> = r_avail;
        for pos in open_pos {
            let cut = children[pos];
            let own = self.cut(cut, CutRole::Iso);
            debug_assert_eq!(own.len(), 1);
            pool.extend(own);
        }
        pool.sort();

        let mut cp_partial: Vec<VertexId> = Vec::new();
        match (role, leaf_is_cp) {
            (BlockRole::Iso, _) | (BlockRole::Sl, true) => {
                if !pool.is_empty() {
                    self.out.push(pool);
                }
                if leaf_is_cp {
                    cp_partial = star.take().unwrap();
                }
            }
            (BlockRole::Cl, _) => {
                cp_partial = pool;
            }
            (BlockRole::Sc, _) | (BlockRole::Sl, false) => {
                let partner = pool.remove(0);
                cp_partial.push(partner);
                if !pool.is_empty() {
                    self.out.push(pool);
                }
            }
        }
        if let Some(members) = star {
            self.out.push(members);
        }
        cp_partial
    }

    /// Emits all finished coalitions of `G[V_c]` and returns the members of
    /// `c`'s own coalition drawn from `V_c`, including `c` itself.
    fn cut(&mut self, c: usize, role: CutRole) -> Vec<VertexId> {
        let ct = self.tables.cut_tables[c].as_ref().unwrap();
        let children = &self.rooted.cut_children[c];
        let cv = self.rooted.tree.cut_vertices[c];
        let best_k =
            |b: usize, role: BlockRole| self.tables.block_tables[b].as_ref().unwrap().best_k(role);
        let mut own = vec![cv];
        match role {
            CutRole::Iso => {
                for &b in children {
                    let part = self.block(b, BlockRole::Iso, best_k(b, BlockRole::Iso));
                    debug_assert!(part.is_empty());
                }
            }
            CutRole::Cl | CutRole::Sl => {
                let (here, brole) = if role == CutRole::Cl {
                    (&ct.cl_here, BlockRole::Cl)
                } else {
                    (&ct.sl_here, BlockRole::Sl)
                };
                let mut taken = false;
                for i in (1..=ct.d).rev() {
                    let b = children[i - 1];
                    if !taken && here[i] {
                        own.extend(self.block(b, brole, best_k(b, brole)));
                        taken = true;
                    } else {
                        let part = self.block(b, BlockRole::Iso, best_k(b, BlockRole::Iso));
                        debug_assert!(part.is_empty());
                    }
                }
                debug_assert!(taken || ct.d == 0);
            }
            CutRole::Sc(l0) => {
                let mut l = l0;
                for i in (1..=ct.d).rev() {
                    let b = children[i - 1];
                    if l >= 1 && ct.sc_merge[l - 1][i] {
                        own.extend(self.block(b, BlockRole::Sc, best_k(b, BlockRole::Sc)));
                        l -= 1;
                    } else {
                        let part = self.block(b, BlockRole::Iso, best_k(b, BlockRole::Iso));
                        debug_assert!(part.is_empty());
                    }
                }
                debug_assert_eq!(l, 0);
            }
            CutRole::Scu => {
                return self.cut(c, CutRole::Sc(ct.scu.1));
            }
            CutRole::Fin => {
                return self.cut(c, ct.fin.1);
            }
        }
        own
    }
}

/// Reconstructs the optimal coalition structure of a connected component.
fn reconstruct(rooted: &RootedBlockCutTree, tables: &DpTables) -> Vec<Vec<VertexId>> {
    let root_bt = tables.block_tables[rooted.root].as_ref().unwrap();
    let k = root_bt.best_k(BlockRole::Iso);
    let mut rec = Reconstructor {
        rooted,
        tables,
        out: Vec::new(),
    };
    let partial = rec.block(rooted.root, BlockRole::Iso, k);
    debug_assert!(partial.is_empty(), "virtual parent picked up members");
    rec.out
}

fn check_input(g: &WeightedGraph) -> Result<()> {
    if !g.is_unweighted() {
        return Err(FhgError::UnsupportedMethod(
            "block DP requires an unweighted graph".into(),
        ));
    }
    if !g.is_block_graph() {
        return Err(FhgError::UnsupportedMethod(
            "block DP requires a block graph".into(),
        ));
    }
    Ok(())
}

fn solve_component(g: &WeightedGraph, root: usize) -> Result<(Rational, Vec<Vec<VertexId>>)> {
    let tree = build_block_cut_tree(g)?;
    let rooted = root_at(&tree, root)?;
    let tables = run_dp(&rooted);
    let value = root_value(&rooted, &tables);
    let blocks = reconstruct(&rooted, &tables);
    Ok((value, blocks))
}

/// Maximum utilitarian welfare of an unweighted block graph, with a witness
/// partition whose coalitions all induce cliques or stars. Disconnected
/// inputs are solved per component.
pub fn solve_block_utilitarian(g: &WeightedGraph) -> Result<WelfareReport> {
    solve_block_utilitarian_with(g, None)
}

pub fn solve_block_utilitarian_with(
    g: &WeightedGraph,
    jobs: Option<usize>,
) -> Result<WelfareReport> {
    check_input(g)?;
    let comps = g.connected_components();
    let results = par_map(jobs, comps, |comp| {
        let (sub, back) = g.induced_subgraph(&comp);
        solve_component(&sub, 0).map(|(value, blocks)| {
            let mapped: Vec<Vec<VertexId>> = blocks
                .into_iter()
                .map(|b| b.into_iter().map(|v| back[v.index()]).collect())
                .collect();
            (value, mapped)
        })
    });
    let mut value = rat(0);
    let mut all_blocks = Vec::new();
    for r in results {
        let (v, blocks) = r?;
        value += v;
        all_blocks.extend(blocks);
    }
    let partition = CoalitionStructure::from_blocks(all_blocks, g.vertex_count())?;
    Ok(WelfareReport {
        objective: Objective::Utilitarian,
        value,
        partition,
        method: "block".to_string(),
    })
}

/// Like [`solve_block_utilitarian`] but rooted at a chosen block of a
/// connected input; the value is root-invariant.
pub fn solve_rooted(g: &WeightedGraph, root_block: usize) -> Result<WelfareReport> {
    check_input(g)?;
    if g.connected_components().len() != 1 {
        return Err(FhgError::domain("solve_rooted expects a connected graph"));
    }
    let (value, blocks) = solve_component(g, root_block)?;
    let partition = CoalitionStructure::from_blocks(blocks, g.vertex_count())?;
    Ok(WelfareReport {
        objective: Objective::Utilitarian,
        value,
        partition,
        method: "block".to_string(),
    })
}
