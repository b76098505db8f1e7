//! Brute-force ground truth for both objectives.
//!
//! Welfare is maintained incrementally along a depth-first walk of the
//! restricted-growth strings, in integer arithmetic scaled by the common
//! denominator of the weights times `lcm(1..=n)`. Everything stays exact;
//! the scaled engine falls back from `i128` to `BigInt` when weights are
//! large. Enumeration splits by the assignment of the first few vertices
//! across threads; results merge by exact max with the canonical-partition
//! tie-break, so the outcome never depends on the job count.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FhgError, Result};
use crate::graph::{CoalitionStructure, Objective, WeightedGraph, WelfareReport};
use crate::par::{effective_jobs, par_map};
use crate::rational::{rat, Rational};

/// Default cap on the vertex count accepted by the oracles.
pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub cap: usize,
    pub jobs: Option<usize>,
    /// Restrict the search to partitions with at most this many coalitions.
    pub max_blocks: Option<usize>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_ORACLE_CAP,
            jobs: None,
            max_blocks: None,
        }
    }
}

/// Enumerates every set partition of `{0, .., n-1}` exactly once, as
/// restricted-growth strings in lexicographic order.
///
/// A restricted-growth string assigns each element a block label such that
/// `a[0] = 0` and `a[i] <= max(a[0..i]) + 1`; labels appear in order of each
/// block's minimum element, which is the canonical block order.
pub struct PartitionIterator {
    rgs: Vec<usize>,
    prefix_max: Vec<usize>,
    state: IterState,
}

enum IterState {
    Fresh,
    Running,
    Done,
}

impl PartitionIterator {
    pub fn new(n: usize) -> Self {
        PartitionIterator {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            state: IterState::Fresh,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PartitionIterator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        match self.state {
            IterState::Fresh => {
                self.state = IterState::Running;
                Some(self.rgs.clone())
            }
            IterState::Running => {
                if self.rgs.is_empty() || !self.advance() {
                    self.state = IterState::Done;
                    None
                } else {
                    Some(self.rgs.clone())
                }
            }
            IterState::Done => None,
        }
    }
}

/// Integer arithmetic the scaled engine runs on.
trait OracleNum: Clone + Ord + Send + Sync {
    fn zero() -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn add_from(&mut self, other: &Self);
    fn sub_from(&mut self, other: &Self);
    /// `self * k`, `k` small and nonnegative.
    fn times(&self, k: u64) -> Self;
    fn to_bigint(&self) -> BigInt;
}

impl OracleNum for i128 {
    fn zero() -> Self {
        0
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_i128().expect("weight out of i128 range")
    }
    fn add_from(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_from(&mut self, other: &Self) {
        *self -= other;
    }
    fn times(&self, k: u64) -> Self {
        self * k as i128
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl OracleNum for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
    fn add_from(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_from(&mut self, other: &Self) {
        *self -= other;
    }
    fn times(&self, k: u64) -> Self {
        self * BigInt::from(k)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Graph with weights scaled to integers of type `T`. `denom` is the overall
/// scale: true welfare = scaled welfare / (denom * lcm).
struct Scaled<T> {
    n: usize,
    adj: Vec<Vec<(usize, T)>>,
    /// lcm(1..=n) / s for each coalition size s, at index s.
    lcm_over: Vec<u64>,
    lcm: u64,
    denom: BigInt,
}

fn lcm_1_to(n: usize) -> u64 {
    let mut l = 1u64;
    for k in 2..=n.max(1) as u64 {
        l = l.lcm(&k);
    }
    l
}

fn scale_weights(g: &WeightedGraph) -> (Vec<Vec<(usize, BigInt)>>, BigInt) {
    let mut denom = BigInt::one();
    for (_, _, w) in g.edges() {
        denom = denom.lcm(w.denom());
    }
    let adj = (0..g.vertex_count())
        .map(|v| {
            g.neighbors(crate::graph::VertexId(v as u32))
                .iter()
                .map(|(u, w)| (u.index(), (w * &denom).to_integer()))
                .collect()
        })
        .collect();
    (adj, denom)
}

impl<T: OracleNum> Scaled<T> {
    fn build(g: &WeightedGraph) -> Scaled<T> {
        let n = g.vertex_count();
        let (adj_big, denom) = scale_weights(g);
        let adj = adj_big
            .into_iter()
            .map(|list| {
                list.into_iter()
                    .map(|(u, w)| (u, T::from_bigint(&w)))
                    .collect()
            })
            .collect();
        let lcm = lcm_1_to(n);
        let lcm_over = (0..=n.max(1) as u64)
            .map(|s| lcm.checked_div(s).unwrap_or(0))
            .collect();
        Scaled {
            n,
            adj,
            lcm_over,
            lcm,
            denom,
        }
    }

    fn value_to_rational(&self, v: &T) -> Rational {
        Rational::new(v.to_bigint(), &self.denom * BigInt::from(self.lcm))
    }
}

fn fits_i128(g: &WeightedGraph) -> bool {
    let (adj, _) = scale_weights(g);
    let bound = BigInt::from(1i128 << 80);
    adj.iter().flatten().all(|(_, w)| w.abs() < bound)
}

/// Objective-specific bookkeeping along the partition walk.
trait Search<T: OracleNum>: Sized {
    /// Leaf value; larger is better.
    type Value: Clone + Ord + Send;

    fn new(sc: &Scaled<T>) -> Self;
    /// Returns false to prune (the block can no longer be valid).
    fn push(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) -> bool;
    fn pop(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]);
    fn open(&mut self);
    fn close(&mut self);
    fn leaf(&self, sc: &Scaled<T>, assign: &[usize]) -> Option<Self::Value>;
}

/// Shared state: per-block size/weight plus the running utilitarian sum.
struct UtilState<T> {
    sizes: Vec<u32>,
    weights: Vec<T>,
    uw: T,
}

impl<T: OracleNum> UtilState<T> {
    fn new() -> Self {
        UtilState {
            sizes: Vec::new(),
            weights: Vec::new(),
            uw: T::zero(),
        }
    }

    fn delta(&self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) -> T {
        let mut d = T::zero();
        for (u, w) in &sc.adj[v] {
            if *u < v && assign[*u] == block {
                d.add_from(w);
            }
        }
        d
    }

    fn push(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) {
        let d = self.delta(sc, v, block, assign);
        let s = self.sizes[block] as usize;
        self.uw
            .sub_from(&self.weights[block].times(2 * sc.lcm_over[s]));
        self.weights[block].add_from(&d);
        self.sizes[block] += 1;
        self.uw
            .add_from(&self.weights[block].times(2 * sc.lcm_over[s + 1]));
    }

    fn pop(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) {
        let d = self.delta(sc, v, block, assign);
        let s = self.sizes[block] as usize;
        self.uw
            .sub_from(&self.weights[block].times(2 * sc.lcm_over[s]));
        self.weights[block].sub_from(&d);
        self.sizes[block] -= 1;
        self.uw
            .add_from(&self.weights[block].times(2 * sc.lcm_over[s - 1]));
    }

    fn open(&mut self) {
        self.sizes.push(1);
        self.weights.push(T::zero());
    }

    fn close(&mut self) {
        self.sizes.pop();
        self.weights.pop();
    }
}

struct UtilSearch<T>(UtilState<T>);

impl<T: OracleNum> Search<T> for UtilSearch<T> {
    type Value = T;

    fn new(_sc: &Scaled<T>) -> Self {
        UtilSearch(UtilState::new())
    }
    fn push(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) -> bool {
        self.0.push(sc, v, block, assign);
        true
    }
    fn pop(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) {
        self.0.pop(sc, v, block, assign);
    }
    fn open(&mut self) {
        self.0.open();
    }
    fn close(&mut self) {
        self.0.close();
    }
    fn leaf(&self, _sc: &Scaled<T>, _assign: &[usize]) -> Option<T> {
        Some(self.0.uw.clone())
    }
}

/// Per-vertex in-coalition weight sums; the leaf value is the minimum
/// utility, compared at the common scale `denom * lcm`.
struct EgalSearch<T> {
    sizes: Vec<u32>,
    sums: Vec<T>,
}

impl<T: OracleNum> Search<T> for EgalSearch<T> {
    type Value = T;

    fn new(sc: &Scaled<T>) -> Self {
        EgalSearch {
            sizes: Vec::new(),
            sums: vec![T::zero(); sc.n],
        }
    }
    fn push(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) -> bool {
        for (u, w) in &sc.adj[v] {
            if *u < v && assign[*u] == block {
                self.sums[*u].add_from(w);
                self.sums[v].add_from(w);
            }
        }
        self.sizes[block] += 1;
        true
    }
    fn pop(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) {
        for (u, w) in &sc.adj[v] {
            if *u < v && assign[*u] == block {
                self.sums[*u].sub_from(w);
                self.sums[v].sub_from(w);
            }
        }
        self.sizes[block] -= 1;
    }
    fn open(&mut self) {
        self.sizes.push(1);
    }
    fn close(&mut self) {
        self.sizes.pop();
    }
    fn leaf(&self, sc: &Scaled<T>, assign: &[usize]) -> Option<T> {
        let mut min: Option<T> = None;
        for (sum, &block) in self.sums.iter().zip(assign) {
            let s = self.sizes[block] as usize;
            let u = sum.times(sc.lcm_over[s]);
            if min.as_ref().is_none_or(|m| &u < m) {
                min = Some(u);
            }
        }
        min
    }
}

/// Utilitarian search restricted to blocks that induce a clique or a star.
/// Blocks that currently induce an independent set may still gain a center,
/// so they are kept during the walk and rejected only at leaves.
struct CliqueStarSearch<T> {
    util: UtilState<T>,
    /// Per-block unweighted edge count and per-vertex in-block degree.
    block_edges: Vec<u32>,
    in_degree: Vec<u32>,
}

impl<T: OracleNum> CliqueStarSearch<T> {
    fn shape_ok(&self, block: usize, assign: &[usize], at_leaf: bool) -> bool {
        let s = self.util.sizes[block] as u64;
        let m = self.block_edges[block] as u64;
        if s <= 1 {
            return true;
        }
        if m == s * (s - 1) / 2 {
            return true; // clique
        }
        if m == s - 1 {
            // star iff some member is adjacent to all others
            let center = assign
                .iter()
                .enumerate()
                .filter(|(v, b)| **b == block && self.in_degree[*v] as u64 == s - 1)
                .count();
            if center > 0 {
                return true;
            }
        }
        // an independent set can still become a star
        m == 0 && !at_leaf
    }
}

impl<T: OracleNum> Search<T> for CliqueStarSearch<T> {
    type Value = T;

    fn new(sc: &Scaled<T>) -> Self {
        CliqueStarSearch {
            util: UtilState::new(),
            block_edges: Vec::new(),
            in_degree: vec![0; sc.n],
        }
    }
    fn push(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) -> bool {
        self.util.push(sc, v, block, assign);
        for (u, _) in &sc.adj[v] {
            if *u < v && assign[*u] == block {
                self.block_edges[block] += 1;
                self.in_degree[*u] += 1;
                self.in_degree[v] += 1;
            }
        }
        self.shape_ok(block, assign, false)
    }
    fn pop(&mut self, sc: &Scaled<T>, v: usize, block: usize, assign: &[usize]) {
        self.util.pop(sc, v, block, assign);
        for (u, _) in &sc.adj[v] {
            if *u < v && assign[*u] == block {
                self.block_edges[block] -= 1;
                self.in_degree[*u] -= 1;
                self.in_degree[v] -= 1;
            }
        }
    }
    fn open(&mut self) {
        self.util.open();
        self.block_edges.push(0);
    }
    fn close(&mut self) {
        self.util.close();
        self.block_edges.pop();
    }
    fn leaf(&self, _sc: &Scaled<T>, assign: &[usize]) -> Option<T> {
        for b in 0..self.util.sizes.len() {
            if !self.shape_ok(b, assign, true) {
                return None;
            }
        }
        Some(self.util.uw.clone())
    }
}

struct Best<V> {
    value: V,
    assign: Vec<usize>,
}

/// Canonical-partition order on two restricted-growth strings over the same
/// ground set: blocks in label order, compared lexicographically.
fn cmp_canonical(a: &[usize], b: &[usize]) -> Ordering {
    let mut label = 0;
    loop {
        let block_a: Vec<usize> = (0..a.len()).filter(|&i| a[i] == label).collect();
        let block_b: Vec<usize> = (0..b.len()).filter(|&i| b[i] == label).collect();
        if block_a.is_empty() && block_b.is_empty() {
            return Ordering::Equal;
        }
        match block_a.cmp(&block_b) {
            Ordering::Equal => label += 1,
            ord => return ord,
        }
    }
}

fn consider<V: Clone + Ord>(best: &mut Option<Best<V>>, value: V, assign: &[usize]) {
    match best {
        None => {
            *best = Some(Best {
                value,
                assign: assign.to_vec(),
            })
        }
        Some(b) => match value.cmp(&b.value) {
            Ordering::Greater => {
                b.value = value;
                b.assign = assign.to_vec();
            }
            Ordering::Equal => {
                if cmp_canonical(assign, &b.assign) == Ordering::Less {
                    b.assign = assign.to_vec();
                }
            }
            Ordering::Less => {}
        },
    }
}

fn dfs<T: OracleNum, S: Search<T>>(
    sc: &Scaled<T>,
    search: &mut S,
    assign: &mut Vec<usize>,
    open_blocks: usize,
    block_cap: usize,
    best: &mut Option<Best<S::Value>>,
) {
    let v = assign.len();
    if v == sc.n {
        if let Some(value) = search.leaf(sc, assign) {
            consider(best, value, assign);
        }
        return;
    }
    for block in 0..open_blocks {
        assign.push(block);
        if search.push(sc, v, block, assign) {
            dfs(sc, search, assign, open_blocks, block_cap, best);
        }
        search.pop(sc, v, block, assign);
        assign.pop();
    }
    if open_blocks < block_cap {
        search.open();
        assign.push(open_blocks);
        dfs(sc, search, assign, open_blocks + 1, block_cap, best);
        assign.pop();
        search.close();
    }
}

/// Replays a fixed prefix, then explores all completions.
fn run_from_prefix<T: OracleNum, S: Search<T>>(
    sc: &Scaled<T>,
    prefix: &[usize],
    block_cap: usize,
) -> Option<Best<S::Value>> {
    let mut search = S::new(sc);
    let mut assign: Vec<usize> = Vec::with_capacity(sc.n);
    let mut open_blocks = 0;
    for (v, &block) in prefix.iter().enumerate() {
        if block == open_blocks {
            if open_blocks == block_cap {
                return None;
            }
            search.open();
            open_blocks += 1;
            assign.push(block);
        } else {
            assign.push(block);
            if !search.push(sc, v, block, &assign) {
                return None;
            }
        }
    }
    let mut best = None;
    dfs(
        sc,
        &mut search,
        &mut assign,
        open_blocks,
        block_cap,
        &mut best,
    );
    best
}

fn search_all<T: OracleNum, S: Search<T>>(
    sc: &Scaled<T>,
    jobs: Option<usize>,
    block_cap: usize,
) -> Option<Best<S::Value>> {
    let jobs_n = effective_jobs(jobs);
    let prefix_len = if jobs_n <= 1 || sc.n < 4 {
        0
    } else {
        sc.n.min(5)
    };
    if prefix_len == 0 {
        return run_from_prefix::<T, S>(sc, &[], block_cap);
    }
    let prefixes: Vec<Vec<usize>> = PartitionIterator::new(prefix_len).collect();
    let results = par_map(jobs, prefixes, |p| {
        run_from_prefix::<T, S>(sc, &p, block_cap)
    });
    let mut best: Option<Best<S::Value>> = None;
    for r in results.into_iter().flatten() {
        consider(&mut best, r.value, &r.assign);
    }
    best
}

fn check_cap(g: &WeightedGraph, opts: &OracleOptions) -> Result<()> {
    if g.vertex_count() > opts.cap {
        return Err(FhgError::CapExceeded(format!(
            "oracle accepts n <= {}, got n = {}",
            opts.cap,
            g.vertex_count()
        )));
    }
    Ok(())
}

fn run_objective<S128, SBig>(
    g: &WeightedGraph,
    opts: &OracleOptions,
    objective: Objective,
    method: &str,
) -> Result<WelfareReport>
where
    S128: Search<i128, Value = i128>,
    SBig: Search<BigInt, Value = BigInt>,
{
    check_cap(g, opts)?;
    let n = g.vertex_count();
    if n == 0 {
        return Ok(WelfareReport {
            objective,
            value: rat(0),
            partition: CoalitionStructure::from_assignment(&[]),
            method: method.to_string(),
        });
    }
    let block_cap = opts.max_blocks.unwrap_or(usize::MAX).max(1);
    let (value, assign) = if fits_i128(g) {
        let sc = Scaled::<i128>::build(g);
        let best = search_all::<i128, S128>(&sc, opts.jobs, block_cap).expect("nonempty search");
        (sc.value_to_rational(&best.value), best.assign)
    } else {
        let sc = Scaled::<BigInt>::build(g);
        let best = search_all::<BigInt, SBig>(&sc, opts.jobs, block_cap).expect("nonempty search");
        (sc.value_to_rational(&best.value), best.assign)
    };
    Ok(WelfareReport {
        objective,
        value,
        partition: CoalitionStructure::from_assignment(&assign),
        method: method.to_string(),
    })
}

/// Exact maximum utilitarian welfare over all partitions; ties broken by
/// canonical partition order (smallest wins).
pub fn brute_force_max_utilitarian(g: &WeightedGraph) -> Result<WelfareReport> {
    brute_force_max_utilitarian_with(g, &OracleOptions::default())
}

pub fn brute_force_max_utilitarian_with(
    g: &WeightedGraph,
    opts: &OracleOptions,
) -> Result<WelfareReport> {
    run_objective::<UtilSearch<i128>, UtilSearch<BigInt>>(g, opts, Objective::Utilitarian, "brute")
}

/// Exact maximum egalitarian welfare over all partitions.
pub fn brute_force_max_egalitarian(g: &WeightedGraph) -> Result<WelfareReport> {
    brute_force_max_egalitarian_with(g, &OracleOptions::default())
}

pub fn brute_force_max_egalitarian_with(
    g: &WeightedGraph,
    opts: &OracleOptions,
) -> Result<WelfareReport> {
    run_objective::<EgalSearch<i128>, EgalSearch<BigInt>>(g, opts, Objective::Egalitarian, "brute")
}

/// Maximum egalitarian welfare over partitions extending a fixed
/// restricted-growth prefix on the first vertices (e.g. `[0, 0]` forces
/// vertices 0 and 1 into the same coalition). Returns `None` when the
/// prefix is not a valid restricted-growth string.
pub fn brute_force_max_egalitarian_constrained(
    g: &WeightedGraph,
    prefix: &[usize],
    opts: &OracleOptions,
) -> Result<Option<Rational>> {
    check_cap(g, opts)?;
    if prefix.len() > g.vertex_count() {
        return Err(FhgError::domain("prefix longer than the vertex count"));
    }
    let mut max = 0usize;
    for (i, &b) in prefix.iter().enumerate() {
        let limit = if i == 0 { 0 } else { max + 1 };
        if b > limit {
            return Ok(None);
        }
        max = max.max(b);
    }
    if g.vertex_count() == 0 {
        return Ok(Some(rat(0)));
    }
    let block_cap = opts.max_blocks.unwrap_or(usize::MAX).max(1);
    if fits_i128(g) {
        let sc = Scaled::<i128>::build(g);
        Ok(
            run_from_prefix::<i128, EgalSearch<i128>>(&sc, prefix, block_cap)
                .map(|b| sc.value_to_rational(&b.value)),
        )
    } else {
        let sc = Scaled::<BigInt>::build(g);
        Ok(
            run_from_prefix::<BigInt, EgalSearch<BigInt>>(&sc, prefix, block_cap)
                .map(|b| sc.value_to_rational(&b.value)),
        )
    }
}

/// Maximum utilitarian welfare over partitions in which every block induces
/// a complete graph or a star (singletons count as both).
pub fn brute_force_clique_star_only(g: &WeightedGraph) -> Result<Rational> {
    brute_force_clique_star_only_with(g, &OracleOptions::default())
}

pub fn brute_force_clique_star_only_with(
    g: &WeightedGraph,
    opts: &OracleOptions,
) -> Result<Rational> {
    let report = run_objective::<CliqueStarSearch<i128>, CliqueStarSearch<BigInt>>(
        g,
        opts,
        Objective::Utilitarian,
        "brute-clique-star",
    )?;
    Ok(report.value)
}
