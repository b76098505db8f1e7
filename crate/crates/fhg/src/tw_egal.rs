//! Egalitarian-welfare maximization over a nice tree decomposition.
//!
//! States extend the utilitarian ones: per block the coalition size `n_i`
//! and the minimum finished weight-sum `b_i` over its already forgotten
//! members (`+inf` while none is forgotten), plus per bag vertex its
//! running in-coalition weight sum `u_j`. A coalition closing at a forget
//! node contributes `min(b, u_v) / n`; the table value is the minimum over
//! closed coalitions, with `+inf` as the identity.
//!
//! The forget continue-branch updates `b <- min(b, u_v)`: once `v` is
//! forgotten its weight sum is final, so the block minimum must absorb it.
//! The alternative reading, keeping `b` and only allowing the transition
//! when `u_v >= b`, is available as [`ForgetSemantics::LiteralGuard`]; the
//! oracle suite shows it loses states.

use std::collections::BTreeMap;

use crate::error::{FhgError, Result};
use crate::graph::{CoalitionStructure, Objective, VertexId, WeightedGraph, WelfareReport};
use crate::rational::{rat, Rational};
use crate::treedecomp::{NiceTreeDecomposition, NodeKind};

/// Value lattice element: the least utility among closed coalitions;
/// `None` means no coalition has closed yet (`+inf`, the identity of min).
pub type MinVal = Option<Rational>;

fn vmin(a: &MinVal, b: &MinVal) -> MinVal {
    match (a, b) {
        (None, x) => x.clone(),
        (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(x.min(y).clone()),
    }
}

/// `a > b` in the max order where `None` is `+inf`.
fn better(a: &MinVal, b: &MinVal) -> bool {
    match (a, b) {
        (None, None) => false,
        (None, Some(_)) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x > y,
    }
}

/// How the forget continue-branch treats a block minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForgetSemantics {
    /// `b <- min(b, u_v)` (default; semantically forced).
    MinUpdate,
    /// Keep `b`, generating the state only when `u_v >= b`.
    LiteralGuard,
}

/// Bag partition with per-block size `n_i` and forgotten-minimum `b_i`
/// (`None` is `+inf`), and per bag position the weight sum `u_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwEgalState {
    pub labels: Vec<u8>,
    pub sizes: Vec<u32>,
    pub usums: Vec<Rational>,
    pub mins: Vec<Option<Rational>>,
}

impl TwEgalState {
    pub fn empty() -> Self {
        TwEgalState {
            labels: Vec::new(),
            sizes: Vec::new(),
            usums: Vec::new(),
            mins: Vec::new(),
        }
    }

    fn members(&self, block: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&p| self.labels[p] as usize == block)
            .collect()
    }
}

fn relabel(raw: &[usize]) -> (Vec<u8>, Vec<usize>) {
    let mut order: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(raw.len());
    for &r in raw {
        let lbl = match order.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                order.push(r);
                order.len() - 1
            }
        };
        labels.push(lbl as u8);
    }
    (labels, order)
}

#[derive(Clone, Debug)]
enum Back {
    Leaf,
    Introduce {
        child: TwEgalState,
        joined: Option<usize>,
        map: Vec<Option<usize>>,
    },
    Forget {
        child: TwEgalState,
        closed: Option<usize>,
        map: Vec<usize>,
    },
    Join {
        left: TwEgalState,
        right: TwEgalState,
    },
}

type Entry = (TwEgalState, MinVal, Back);

struct RichTable {
    bag: Vec<VertexId>,
    states: BTreeMap<TwEgalState, (MinVal, Back)>,
}

impl RichTable {
    fn insert(&mut self, state: TwEgalState, value: MinVal, back: Back) {
        match self.states.get(&state) {
            Some((old, _)) if !better(&value, old) => {}
            _ => {
                self.states.insert(state, (value, back));
            }
        }
    }
}

fn introduce_entries(
    g: &WeightedGraph,
    child_bag: &[VertexId],
    state: &TwEgalState,
    value: &MinVal,
    v: VertexId,
) -> Vec<Entry> {
    let mut bag: Vec<VertexId> = child_bag.to_vec();
    bag.push(v);
    bag.sort();
    let vpos = bag.binary_search(&v).expect("v in new bag");
    let blocks = state.sizes.len();
    let child_pos = |p: usize| -> usize {
        if p < vpos {
            p
        } else {
            p - 1
        }
    };
    let mut out = Vec::new();
    for choice in 0..=blocks {
        let raw: Vec<usize> = (0..bag.len())
            .map(|p| {
                if p == vpos {
                    choice
                } else {
                    state.labels[child_pos(p)] as usize
                }
            })
            .collect();
        let (labels, order) = relabel(&raw);
        let sizes: Vec<u32> = order
            .iter()
            .map(|&r| {
                if r < blocks {
                    state.sizes[r] + u32::from(r == choice)
                } else {
                    1
                }
            })
            .collect();
        let mins: Vec<Option<Rational>> = order
            .iter()
            .map(|&r| {
                if r < blocks {
                    state.mins[r].clone()
                } else {
                    None
                }
            })
            .collect();
        let usums: Vec<Rational> = (0..bag.len())
            .map(|p| {
                if p == vpos {
                    if choice < blocks {
                        state
                            .members(choice)
                            .iter()
                            .filter_map(|&q| g.weight(v, child_bag[q]))
                            .sum()
                    } else {
                        rat(0)
                    }
                } else {
                    let q = child_pos(p);
                    let mut u = state.usums[q].clone();
                    if state.labels[q] as usize == choice {
                        if let Some(w) = g.weight(child_bag[q], v) {
                            u += w;
                        }
                    }
                    u
                }
            })
            .collect();
        let map: Vec<Option<usize>> = order
            .iter()
            .map(|&r| if r < blocks { Some(r) } else { None })
            .collect();
        let joined = if choice < blocks {
            Some(order.iter().position(|&r| r == choice).expect("joined"))
        } else {
            None
        };
        out.push((
            TwEgalState {
                labels,
                sizes,
                usums,
                mins,
            },
            value.clone(),
            Back::Introduce {
                child: state.clone(),
                joined,
                map,
            },
        ));
    }
    out
}

fn forget_entries(
    child_bag: &[VertexId],
    state: &TwEgalState,
    value: &MinVal,
    v: VertexId,
    semantics: ForgetSemantics,
) -> Vec<Entry> {
    let vpos = child_bag.binary_search(&v).expect("v in child bag");
    let vblock = state.labels[vpos] as usize;
    let solo = state.members(vblock).len() == 1;
    let u_v = state.usums[vpos].clone();
    let raw: Vec<usize> = (0..child_bag.len())
        .filter(|&p| p != vpos)
        .map(|p| state.labels[p] as usize)
        .collect();
    let (labels, order) = relabel(&raw);
    let usums: Vec<Rational> = (0..child_bag.len())
        .filter(|&p| p != vpos)
        .map(|p| state.usums[p].clone())
        .collect();
    if solo {
        let finished = vmin(&state.mins[vblock], &Some(u_v));
        let contribution = finished.expect("finite") / rat(state.sizes[vblock] as i64);
        let sizes = order.iter().map(|&r| state.sizes[r]).collect();
        let mins = order.iter().map(|&r| state.mins[r].clone()).collect();
        vec![(
            TwEgalState {
                labels,
                sizes,
                usums,
                mins,
            },
            vmin(value, &Some(contribution)),
            Back::Forget {
                child: state.clone(),
                closed: Some(vblock),
                map: order,
            },
        )]
    } else {
        if semantics == ForgetSemantics::LiteralGuard {
            let ok = match &state.mins[vblock] {
                None => false, // u_v >= +inf never holds
                Some(b) => u_v >= *b,
            };
            if !ok {
                return Vec::new();
            }
        }
        let sizes = order.iter().map(|&r| state.sizes[r]).collect();
        let mins: Vec<Option<Rational>> = order
            .iter()
            .map(|&r| {
                if r == vblock && semantics == ForgetSemantics::MinUpdate {
                    vmin(&state.mins[r], &Some(u_v.clone()))
                } else {
                    state.mins[r].clone()
                }
            })
            .collect();
        vec![(
            TwEgalState {
                labels,
                sizes,
                usums,
                mins,
            },
            value.clone(),
            Back::Forget {
                child: state.clone(),
                closed: None,
                map: order,
            },
        )]
    }
}

fn join_entries(
    g: &WeightedGraph,
    bag: &[VertexId],
    left: (&TwEgalState, &MinVal),
    right: (&TwEgalState, &MinVal),
) -> Option<Entry> {
    let (ls, lv) = left;
    let (rs, rv) = right;
    if ls.labels != rs.labels {
        return None;
    }
    let sizes: Vec<u32> = (0..ls.sizes.len())
        .map(|i| ls.sizes[i] + rs.sizes[i] - ls.members(i).len() as u32)
        .collect();
    let usums: Vec<Rational> = (0..bag.len())
        .map(|p| {
            let block = ls.labels[p] as usize;
            let shared: Rational = ls
                .members(block)
                .iter()
                .filter(|&&q| q != p)
                .filter_map(|&q| g.weight(bag[p], bag[q]))
                .sum();
            ls.usums[p].clone() + &rs.usums[p] - shared
        })
        .collect();
    let mins: Vec<Option<Rational>> = (0..ls.mins.len())
        .map(|i| vmin(&ls.mins[i], &rs.mins[i]))
        .collect();
    Some((
        TwEgalState {
            labels: ls.labels.clone(),
            sizes,
            usums,
            mins,
        },
        vmin(lv, rv),
        Back::Join {
            left: ls.clone(),
            right: rs.clone(),
        },
    ))
}

/// Successor states when `v` is introduced: join an existing block
/// (co-members' sums gain `w(., v)`) or open a fresh `(1, 0, +inf)` block.
pub fn egal_introduce(
    g: &WeightedGraph,
    child_bag: &[VertexId],
    state: &TwEgalState,
    v: VertexId,
) -> Vec<TwEgalState> {
    introduce_entries(g, child_bag, state, &None, v)
        .into_iter()
        .map(|(s, _, _)| s)
        .collect()
}

/// Egalitarian DP table.
#[derive(Clone, Debug)]
pub struct EgalTable {
    pub bag: Vec<VertexId>,
    pub states: BTreeMap<TwEgalState, MinVal>,
}

impl EgalTable {
    pub fn seeded(bag: Vec<VertexId>, state: TwEgalState, value: MinVal) -> Self {
        let mut states = BTreeMap::new();
        states.insert(state, value);
        EgalTable { bag, states }
    }
}

/// Forget-node table under the chosen semantics: close `v`'s coalition
/// (contributing `min(b, u_v)/n`) or drop `v` from its bag block.
pub fn egal_forget(table: &EgalTable, v: VertexId, semantics: ForgetSemantics) -> EgalTable {
    let mut bag = table.bag.clone();
    bag.retain(|u| *u != v);
    let mut out = RichTable {
        bag: bag.clone(),
        states: BTreeMap::new(),
    };
    for (state, value) in &table.states {
        for (s, val, back) in forget_entries(&table.bag, state, value, v, semantics) {
            out.insert(s, val, back);
        }
    }
    EgalTable {
        bag,
        states: out.states.into_iter().map(|(s, (v, _))| (s, v)).collect(),
    }
}

/// Join-node table: counters merge without double counting, block minima
/// and values combine by min.
pub fn egal_join(g: &WeightedGraph, left: &EgalTable, right: &EgalTable) -> EgalTable {
    assert_eq!(left.bag, right.bag, "join bags must match");
    let mut out = RichTable {
        bag: left.bag.clone(),
        states: BTreeMap::new(),
    };
    for (ls, lv) in &left.states {
        for (rs, rv) in &right.states {
            if let Some((s, val, back)) = join_entries(g, &left.bag, (ls, lv), (rs, rv)) {
                out.insert(s, val, back);
            }
        }
    }
    EgalTable {
        bag: left.bag.clone(),
        states: out.states.into_iter().map(|(s, (v, _))| (s, v)).collect(),
    }
}

/// Debug-build guard: `|u_j| <= nW` and `|b_i| <= nW` for integer weights.
#[cfg(debug_assertions)]
fn assert_state_bounds(g: &WeightedGraph, state: &TwEgalState) {
    use num_traits::Signed;
    if let Some(w) = g.integer_weight_bound() {
        let bound = Rational::from_integer(num_bigint::BigInt::from(g.vertex_count()) * w);
        for u in &state.usums {
            debug_assert!(u.abs() <= bound, "u_j out of bounds");
        }
        for b in state.mins.iter().flatten() {
            debug_assert!(b.abs() <= bound, "b_i out of bounds");
        }
        for n in &state.sizes {
            debug_assert!(*n as usize <= g.vertex_count(), "n_i out of bounds");
        }
    }
}

fn run_dp(
    g: &WeightedGraph,
    ntd: &NiceTreeDecomposition,
    semantics: ForgetSemantics,
) -> Vec<RichTable> {
    let order = ntd.postorder();
    let mut tables: Vec<Option<RichTable>> = (0..ntd.node_count()).map(|_| None).collect();
    for t in order {
        let mut bag = ntd.bags[t].clone();
        bag.sort();
        let mut table = RichTable {
            bag: bag.clone(),
            states: BTreeMap::new(),
        };
        match ntd.kinds[t] {
            NodeKind::Leaf => {
                table.insert(TwEgalState::empty(), None, Back::Leaf);
            }
            NodeKind::Introduce(v) => {
                let child = tables[ntd.children[t][0]].as_ref().expect("child table");
                for (state, (value, _)) in &child.states {
                    for (s, val, back) in introduce_entries(g, &child.bag, state, value, v) {
                        table.insert(s, val, back);
                    }
                }
            }
            NodeKind::Forget(v) => {
                let child = tables[ntd.children[t][0]].as_ref().expect("child table");
                for (state, (value, _)) in &child.states {
                    for (s, val, back) in forget_entries(&child.bag, state, value, v, semantics) {
                        table.insert(s, val, back);
                    }
                }
            }
            NodeKind::Join => {
                let left = tables[ntd.children[t][0]].as_ref().expect("left table");
                let right = tables[ntd.children[t][1]].as_ref().expect("right table");
                for (ls, (lv, _)) in &left.states {
                    for (rs, (rv, _)) in &right.states {
                        if let Some((s, val, back)) = join_entries(g, &left.bag, (ls, lv), (rs, rv))
                        {
                            table.insert(s, val, back);
                        }
                    }
                }
            }
        }
        #[cfg(debug_assertions)]
        for state in table.states.keys() {
            assert_state_bounds(g, state);
        }
        tables[t] = Some(table);
    }
    tables
        .into_iter()
        .map(|t| t.expect("all nodes visited"))
        .collect()
}

fn rebuild(
    ntd: &NiceTreeDecomposition,
    tables: &[RichTable],
    node: usize,
    state: &TwEgalState,
    out: &mut Vec<Vec<VertexId>>,
) -> Vec<Vec<VertexId>> {
    let back = &tables[node].states[state].1;
    match back {
        Back::Leaf => Vec::new(),
        Back::Introduce { child, joined, map } => {
            let live_child = rebuild(ntd, tables, ntd.children[node][0], child, out);
            let v = match ntd.kinds[node] {
                NodeKind::Introduce(v) => v,
                _ => unreachable!(),
            };
            let mut live: Vec<Vec<VertexId>> = map
                .iter()
                .map(|slot| match slot {
                    Some(j) => live_child[*j].clone(),
                    None => Vec::new(),
                })
                .collect();
            match joined {
                Some(i) => live[*i].push(v),
                None => {
                    let fresh = map.iter().position(|s| s.is_none()).expect("fresh slot");
                    live[fresh].push(v);
                }
            }
            live
        }
        Back::Forget { child, closed, map } => {
            let live_child = rebuild(ntd, tables, ntd.children[node][0], child, out);
            if let Some(cb) = closed {
                let mut members = live_child[*cb].clone();
                members.sort();
                out.push(members);
            }
            map.iter().map(|&j| live_child[j].clone()).collect()
        }
        Back::Join { left, right } => {
            let live_l = rebuild(ntd, tables, ntd.children[node][0], left, out);
            let live_r = rebuild(ntd, tables, ntd.children[node][1], right, out);
            live_l
                .into_iter()
                .zip(live_r)
                .map(|(mut a, b)| {
                    for v in b {
                        if !a.contains(&v) {
                            a.push(v);
                        }
                    }
                    a
                })
                .collect()
        }
    }
}

/// Exact maximum egalitarian welfare via the decomposition DP.
pub fn solve_tw_egalitarian(
    g: &WeightedGraph,
    ntd: &NiceTreeDecomposition,
) -> Result<WelfareReport> {
    solve_tw_egalitarian_with(g, ntd, ForgetSemantics::MinUpdate)
}

pub fn solve_tw_egalitarian_with(
    g: &WeightedGraph,
    ntd: &NiceTreeDecomposition,
    semantics: ForgetSemantics,
) -> Result<WelfareReport> {
    ntd.validate(g)?;
    let tables = run_dp(g, ntd, semantics);
    let root_state = TwEgalState::empty();
    let (value, _) = tables[ntd.root]
        .states
        .get(&root_state)
        .ok_or_else(|| FhgError::domain("no coalition structure reaches the root"))?
        .clone();
    let value = match value {
        Some(v) => v,
        None => rat(0), // empty graph: no agents
    };
    let mut blocks = Vec::new();
    let live = rebuild(ntd, &tables, ntd.root, &root_state, &mut blocks);
    debug_assert!(live.is_empty());
    let partition = CoalitionStructure::from_blocks(blocks, g.vertex_count())?;
    Ok(WelfareReport {
        objective: Objective::Egalitarian,
        value,
        partition,
        method: "treewidth".to_string(),
    })
}
