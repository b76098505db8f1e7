//! Utilitarian-welfare maximization over a nice tree decomposition.
//!
//! A DP state at node `t` is a partition of the bag into blocks, one per
//! live coalition, plus per block the vertex count `n_i` and total internal
//! weight `m_i` of the coalition accumulated so far. The stored value is the
//! welfare of coalitions already closed (fully forgotten); a coalition adds
//! `2 m / n` when its last bag vertex is forgotten. Tables are sparse and
//! ordered, so the argmax (and hence the reconstructed partition) is
//! deterministic.

use std::collections::BTreeMap;

use crate::error::{FhgError, Result};
use crate::graph::{CoalitionStructure, Objective, VertexId, WeightedGraph, WelfareReport};
use crate::rational::{rat, Rational};
use crate::treedecomp::{NiceTreeDecomposition, NodeKind};

/// Bag partition plus per-coalition counters, in canonical form: bag
/// vertices sorted, block labels in order of first appearance, counters
/// aligned with the labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwUtilState {
    pub labels: Vec<u8>,
    pub counters: Vec<(u32, Rational)>,
}

impl TwUtilState {
    pub fn empty() -> Self {
        TwUtilState {
            labels: Vec::new(),
            counters: Vec::new(),
        }
    }

    pub fn block_count(&self) -> usize {
        self.counters.len()
    }

    /// Bag positions of block `i`.
    fn members(&self, i: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&p| self.labels[p] as usize == i)
            .collect()
    }
}

/// Relabels raw block ids into first-appearance order.
/// Returns canonical labels, counters, and the canonical-to-raw map.
fn canonicalize(
    raw: &[usize],
    counters_of: impl Fn(usize) -> (u32, Rational),
) -> (Vec<u8>, Vec<(u32, Rational)>, Vec<usize>) {
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
    let counters = order.iter().map(|&r| counters_of(r)).collect();
    (labels, counters, order)
}

/// One DP table: all reachable states of a decomposition node.
#[derive(Clone, Debug)]
pub struct TwTable {
    pub bag: Vec<VertexId>,
    pub states: BTreeMap<TwUtilState, Rational>,
}

/// Backpointer for reconstruction. `map[i]` is the child block feeding
/// parent block `i` (`None` for a freshly opened singleton).
#[derive(Clone, Debug)]
enum Back {
    Leaf,
    Introduce {
        child: TwUtilState,
        joined: Option<usize>,
        map: Vec<Option<usize>>,
    },
    Forget {
        child: TwUtilState,
        closed: Option<usize>,
        map: Vec<usize>,
    },
    Join {
        left: TwUtilState,
        right: TwUtilState,
    },
}

type Entry = (TwUtilState, Rational, Back);

struct RichTable {
    bag: Vec<VertexId>,
    states: BTreeMap<TwUtilState, (Rational, Back)>,
}

impl RichTable {
    fn insert(&mut self, state: TwUtilState, value: Rational, back: Back) {
        match self.states.get(&state) {
            Some((old, _)) if *old >= value => {}
            _ => {
                self.states.insert(state, (value, back));
            }
        }
    }
}

/// Sum of weights from `v` to the bag vertices at `positions`.
fn weight_to(g: &WeightedGraph, bag: &[VertexId], v: VertexId, positions: &[usize]) -> Rational {
    let mut sum = rat(0);
    for &p in positions {
        if let Some(w) = g.weight(v, bag[p]) {
            sum += w;
        }
    }
    sum
}

/// Internal weight among the bag vertices at `positions`.
fn internal_bag_weight(g: &WeightedGraph, bag: &[VertexId], positions: &[usize]) -> Rational {
    let mut sum = rat(0);
    for (a, &p) in positions.iter().enumerate() {
        for &q in &positions[a + 1..] {
            if let Some(w) = g.weight(bag[p], bag[q]) {
                sum += w;
            }
        }
    }
    sum
}

fn introduce_entries(
    g: &WeightedGraph,
    child_bag: &[VertexId],
    state: &TwUtilState,
    value: &Rational,
    v: VertexId,
) -> Vec<Entry> {
    let mut bag: Vec<VertexId> = child_bag.to_vec();
    bag.push(v);
    bag.sort();
    let vpos = bag.binary_search(&v).expect("v in new bag");
    // raw ids: child block j keeps id j; a fresh block gets id blocks.
    let blocks = state.block_count();
    let child_raw = |p: usize| -> usize {
        // position p in the new bag; positions after vpos shift down by one
        let old_p = if p < vpos { p } else { p - 1 };
        state.labels[old_p] as usize
    };
    let mut out = Vec::new();
    for choice in 0..=blocks {
        let raw: Vec<usize> = (0..bag.len())
            .map(|p| if p == vpos { choice } else { child_raw(p) })
            .collect();
        let (labels, counters, order) = canonicalize(&raw, |r| {
            if r < blocks {
                let (n, m) = &state.counters[r];
                if r == choice {
                    let members = state.members(r);
                    (n + 1, m + weight_to(g, child_bag, v, &members))
                } else {
                    (*n, m.clone())
                }
            } else {
                (1, rat(0))
            }
        });
        let map: Vec<Option<usize>> = order
            .iter()
            .map(|&r| if r < blocks { Some(r) } else { None })
            .collect();
        let joined = if choice < blocks {
            Some(
                order
                    .iter()
                    .position(|&r| r == choice)
                    .expect("joined block present"),
            )
        } else {
            None
        };
        out.push((
            TwUtilState { labels, counters },
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
    state: &TwUtilState,
    value: &Rational,
    v: VertexId,
) -> Vec<Entry> {
    let vpos = child_bag.binary_search(&v).expect("v in child bag");
    let vblock = state.labels[vpos] as usize;
    let solo = state.members(vblock).len() == 1;
    let raw: Vec<usize> = (0..child_bag.len())
        .filter(|&p| p != vpos)
        .map(|p| state.labels[p] as usize)
        .collect();
    let (labels, counters, order) = canonicalize(&raw, |r| state.counters[r].clone());
    let map: Vec<usize> = order.clone();
    if solo {
        let (n, m) = &state.counters[vblock];
        let gained = rat(2) * m / rat(*n as i64);
        vec![(
            TwUtilState { labels, counters },
            value + gained,
            Back::Forget {
                child: state.clone(),
                closed: Some(vblock),
                map,
            },
        )]
    } else {
        vec![(
            TwUtilState { labels, counters },
            value.clone(),
            Back::Forget {
                child: state.clone(),
                closed: None,
                map,
            },
        )]
    }
}

fn join_entries(
    g: &WeightedGraph,
    bag: &[VertexId],
    left: (&TwUtilState, &Rational),
    right: (&TwUtilState, &Rational),
) -> Option<Entry> {
    let (ls, lv) = left;
    let (rs, rv) = right;
    if ls.labels != rs.labels {
        return None;
    }
    let counters: Vec<(u32, Rational)> = (0..ls.block_count())
        .map(|i| {
            let members = ls.members(i);
            let c = members.len() as u32;
            let shared = internal_bag_weight(g, bag, &members);
            let (ln, lm) = &ls.counters[i];
            let (rn, rm) = &rs.counters[i];
            (ln + rn - c, lm + rm - shared)
        })
        .collect();
    Some((
        TwUtilState {
            labels: ls.labels.clone(),
            counters,
        },
        lv + rv,
        Back::Join {
            left: ls.clone(),
            right: rs.clone(),
        },
    ))
}

/// Successor states when `v` is introduced to `state`: one per existing
/// block `v` may join, plus the fresh-singleton state.
pub fn introduce_transition(
    g: &WeightedGraph,
    child_bag: &[VertexId],
    state: &TwUtilState,
    v: VertexId,
) -> Vec<TwUtilState> {
    introduce_entries(g, child_bag, state, &rat(0), v)
        .into_iter()
        .map(|(s, _, _)| s)
        .collect()
}

/// Forget-node table: each child state either closes `v`'s coalition
/// (adding `2m/n`) or drops `v` from its block; values merge by max.
pub fn forget_transition(g: &WeightedGraph, table: &TwTable, v: VertexId) -> TwTable {
    let _ = g;
    let mut bag = table.bag.clone();
    bag.retain(|u| *u != v);
    let mut out = RichTable {
        bag: bag.clone(),
        states: BTreeMap::new(),
    };
    for (state, value) in &table.states {
        for (s, val, back) in forget_entries(&table.bag, state, value, v) {
            out.insert(s, val, back);
        }
    }
    TwTable {
        bag,
        states: out.states.into_iter().map(|(s, (v, _))| (s, v)).collect(),
    }
}

/// Join-node table: states with identical bag partitions combine; counters
/// add without double counting the shared bag part.
pub fn join_transition(g: &WeightedGraph, left: &TwTable, right: &TwTable) -> TwTable {
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
    TwTable {
        bag: left.bag.clone(),
        states: out.states.into_iter().map(|(s, (v, _))| (s, v)).collect(),
    }
}

/// Debug-build guard for the state bounds on integer-weight inputs:
/// `0 <= n_i <= n` and `|m_i| <= n^2 W`.
#[cfg(debug_assertions)]
fn assert_state_bounds(g: &WeightedGraph, state: &TwUtilState) {
    if let Some(w) = g.integer_weight_bound() {
        let n = g.vertex_count() as u32;
        let bound =
            Rational::from_integer(num_bigint::BigInt::from(n) * num_bigint::BigInt::from(n) * w);
        for (ni, mi) in &state.counters {
            debug_assert!(*ni <= n, "n_i out of bounds");
            debug_assert!(mi.abs() <= bound, "m_i out of bounds");
        }
    }
}

#[cfg(debug_assertions)]
use num_traits::Signed;

fn run_dp(g: &WeightedGraph, ntd: &NiceTreeDecomposition) -> Vec<RichTable> {
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
                table.insert(TwUtilState::empty(), rat(0), Back::Leaf);
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
                    for (s, val, back) in forget_entries(&child.bag, state, value, v) {
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

/// Rebuilds coalition member sets by replaying backpointers top-down.
fn rebuild(
    ntd: &NiceTreeDecomposition,
    tables: &[RichTable],
    node: usize,
    state: &TwUtilState,
    out: &mut Vec<Vec<VertexId>>,
) -> Vec<Vec<VertexId>> {
    let back = &tables[node].states[state].1;
    match back {
        Back::Leaf => Vec::new(),
        Back::Introduce { child, joined, map } => {
            let child_node = ntd.children[node][0];
            let live_child = rebuild(ntd, tables, child_node, child, out);
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
            let child_node = ntd.children[node][0];
            let live_child = rebuild(ntd, tables, child_node, child, out);
            if let Some(cb) = closed {
                let mut members = live_child[*cb].clone();
                members.sort();
                out.push(members);
            }
            map.iter().map(|&j| live_child[j].clone()).collect()
        }
        Back::Join { left, right } => {
            let (lnode, rnode) = (ntd.children[node][0], ntd.children[node][1]);
            let live_l = rebuild(ntd, tables, lnode, left, out);
            let live_r = rebuild(ntd, tables, rnode, right, out);
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

/// Exact maximum utilitarian welfare via the decomposition DP, with a
/// reconstructed witness partition.
pub fn solve_tw_utilitarian(
    g: &WeightedGraph,
    ntd: &NiceTreeDecomposition,
) -> Result<WelfareReport> {
    ntd.validate(g)?;
    let tables = run_dp(g, ntd);
    let root_state = TwUtilState::empty();
    let (value, _) = tables[ntd.root]
        .states
        .get(&root_state)
        .ok_or_else(|| FhgError::domain("root state missing"))?
        .clone();
    let mut blocks = Vec::new();
    let live = rebuild(ntd, &tables, ntd.root, &root_state, &mut blocks);
    debug_assert!(live.is_empty());
    let partition = CoalitionStructure::from_blocks(blocks, g.vertex_count())?;
    debug_assert_eq!(
        crate::graph::utilitarian_welfare(g, &partition)?,
        value,
        "reconstruction disagrees with DP value"
    );
    Ok(WelfareReport {
        objective: Objective::Utilitarian,
        value,
        partition,
        method: "treewidth".to_string(),
    })
}

impl TwTable {
    /// Builds a one-state table for tests and the public transitions.
    pub fn seeded(bag: Vec<VertexId>, state: TwUtilState, value: Rational) -> Self {
        let mut states = BTreeMap::new();
        states.insert(state, value);
        TwTable { bag, states }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::treedecomp::{heuristic_decomposition, make_nice, Strategy};

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    fn solve(g: &WeightedGraph) -> WelfareReport {
        let td = heuristic_decomposition(g, Strategy::MinFill);
        let ntd = make_nice(g, &td).unwrap();
        let r = solve_tw_utilitarian(g, &ntd).unwrap();
        assert!(r.verify(g).unwrap());
        r
    }

    #[test]
    fn spec_examples() {
        let c4 = WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(solve(&c4).value, rat(2));

        let neg = WeightedGraph::new(2, vec![(0, 1, rat(-3))]).unwrap();
        let r = solve(&neg);
        assert_eq!(r.value, rat(0));
        assert_eq!(r.partition, CoalitionStructure::singletons(2));

        let p4 = WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(solve(&p4).value, rat(2));
    }

    #[test]
    fn introduce_examples() {
        let g = WeightedGraph::new(3, vec![(0, 1, rat(5)), (1, 2, rat(2))]).unwrap();
        // bag {1}, block {1} with counters (1, 0); introduce 0
        let state = TwUtilState {
            labels: vec![0],
            counters: vec![(1, rat(0))],
        };
        let succ = introduce_transition(&g, &[v(1)], &state, v(0));
        assert_eq!(succ.len(), 2);
        // option (a): 0 joins the block of 1, closing the weight-5 edge
        assert!(succ.iter().any(|s| s.counters == vec![(2, rat(5))]));
        // option (b): fresh singleton
        assert!(succ
            .iter()
            .any(|s| s.counters == vec![(1, rat(0)), (1, rat(0))] && s.labels == vec![0, 1]));

        // joining a block with no edge to v leaves its weight untouched,
        // even though v has edges elsewhere
        let state = TwUtilState {
            labels: vec![0],
            counters: vec![(1, rat(0))],
        };
        let succ = introduce_transition(&g, &[v(2)], &state, v(0));
        assert!(succ.iter().any(|s| s.counters == vec![(2, rat(0))]));
    }

    #[test]
    fn forget_close_adds_coalition_welfare() {
        let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        // bag {2}: coalition block {2} carries a closed triangle (3, 3)
        let state = TwUtilState {
            labels: vec![0],
            counters: vec![(3, rat(3))],
        };
        let table = TwTable::seeded(vec![v(2)], state, rat(0));
        let out = forget_transition(&g, &table, v(2));
        let (root, value) = out.states.iter().next().unwrap();
        assert_eq!(root, &TwUtilState::empty());
        assert_eq!(value, &rat(2)); // 2 * 3 / 3

        // forgetting a singleton coalition adds 0
        let table = TwTable::seeded(
            vec![v(2)],
            TwUtilState {
                labels: vec![0],
                counters: vec![(1, rat(0))],
            },
            rat(7),
        );
        let out = forget_transition(&g, &table, v(2));
        assert_eq!(out.states.values().next().unwrap(), &rat(7));
    }

    #[test]
    fn join_combines_without_double_counting() {
        let g = WeightedGraph::unweighted(3, &[(0, 1)]).unwrap();
        let bag = vec![v(0), v(1)];
        // both children carry the bare-bag state: one block {0,1}, (2, 1)
        let bare = TwUtilState {
            labels: vec![0, 0],
            counters: vec![(2, rat(1))],
        };
        let left = TwTable::seeded(bag.clone(), bare.clone(), rat(3));
        let right = TwTable::seeded(bag.clone(), bare.clone(), rat(5));
        let out = join_transition(&g, &left, &right);
        let (s, value) = out.states.iter().next().unwrap();
        assert_eq!(s.counters, vec![(2, rat(1))]);
        assert_eq!(value, &rat(8));

        // incompatible partitions produce nothing
        let split = TwUtilState {
            labels: vec![0, 1],
            counters: vec![(1, rat(0)), (1, rat(0))],
        };
        let right = TwTable::seeded(bag.clone(), split, rat(0));
        let out = join_transition(&g, &left, &right);
        assert!(out.states.is_empty());
    }

    #[test]
    fn matches_block_dp_on_a_block_graph() {
        let g = WeightedGraph::unweighted(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]).unwrap();
        let tw = solve(&g).value;
        let block = crate::block_dp::solve_block_utilitarian(&g).unwrap().value;
        assert_eq!(tw, block);
    }

    #[test]
    fn weighted_small_case() {
        let g = WeightedGraph::new(
            3,
            vec![(0, 1, rat(4)), (1, 2, rat(4)), (0, 2, ratio(-1, 2))],
        )
        .unwrap();
        // grand: 2*(4+4-1/2)/3 = 5; {0,1},{2}: 4; {0,1,2} wins
        assert_eq!(solve(&g).value, rat(5));
    }

    #[test]
    fn rejects_invalid_decomposition() {
        let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p3 = WeightedGraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let td = heuristic_decomposition(&p3, Strategy::MinFill);
        let ntd = make_nice(&p3, &td).unwrap();
        assert!(solve_tw_utilitarian(&g, &ntd).is_err());
    }
}
