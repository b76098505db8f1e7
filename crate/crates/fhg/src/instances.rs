//! Instance I/O, random generators, and the Partition-based hardness
//! construction for the egalitarian objective.
//!
//! Two graph formats:
//! - `edge_list`: one `u v w` line per edge, `w` an integer or `p/q`
//!   rational literal, omitted for weight 1. `#` starts a comment; the
//!   special comment `#n <count>` pins the vertex count when trailing
//!   vertices are isolated (otherwise `n` is the largest endpoint plus 1).
//! - `json`: `{"n": .., "edges": [[u, v, "w"], ..]}`, lossless.
//!
//! All generators are deterministic for a fixed seed.

use num_bigint::BigInt;
use num_traits::One;
use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FhgError, Result};
use crate::graph::{VertexId, WeightedGraph, WelfareReport};
use crate::rational::{format_rational, parse_rational, rat, ratio, Rational};
use crate::treedecomp::TreeDecomposition;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    EdgeList,
    Json,
}

impl std::str::FromStr for Format {
    type Err = FhgError;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "edge_list" => Ok(Format::EdgeList),
            "json" => Ok(Format::Json),
            other => Err(FhgError::domain(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    n: usize,
    edges: Vec<(u32, u32, serde_json::Value)>,
}

fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges: Vec<(u32, u32, Rational)> = Vec::new();
    let mut max_vertex: Option<u32> = None;
    let mut declared_n: Option<usize> = None;
    let mut seen: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.first() == Some(&"n") {
                declared_n = Some(
                    fields
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| FhgError::parse(lineno, "bad `#n <count>` header"))?,
                );
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(FhgError::parse(lineno, "expected `u v` or `u v w`"));
        }
        let u: u32 = fields[0]
            .parse()
            .map_err(|_| FhgError::parse(lineno, "bad vertex id"))?;
        let v: u32 = fields[1]
            .parse()
            .map_err(|_| FhgError::parse(lineno, "bad vertex id"))?;
        if u == v {
            return Err(FhgError::parse(lineno, format!("self-loop at vertex {u}")));
        }
        let w = if fields.len() == 3 {
            parse_rational(fields[2])
                .map_err(|_| FhgError::parse(lineno, format!("bad weight `{}`", fields[2])))?
        } else {
            rat(1)
        };
        if num_traits::Zero::is_zero(&w) {
            return Err(FhgError::parse(lineno, "zero-weight edge"));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(FhgError::parse(lineno, format!("duplicate edge ({u},{v})")));
        }
        max_vertex = Some(max_vertex.map_or(u.max(v), |m| m.max(u.max(v))));
        edges.push((u, v, w));
    }
    let n = declared_n.unwrap_or(max_vertex.map_or(0, |m| m as usize + 1));
    WeightedGraph::new(n, edges)
}

fn parse_json(text: &str) -> Result<WeightedGraph> {
    let parsed: JsonGraph =
        serde_json::from_str(text).map_err(|e| FhgError::parse(e.line(), e.to_string()))?;
    let mut edges = Vec::with_capacity(parsed.edges.len());
    for (u, v, w) in parsed.edges {
        let weight = match &w {
            serde_json::Value::String(s) => parse_rational(s)?,
            serde_json::Value::Number(num) => {
                let i = num
                    .as_i64()
                    .ok_or_else(|| FhgError::domain("non-integer numeric weight; use \"p/q\""))?;
                rat(i)
            }
            _ => return Err(FhgError::domain("weight must be a string or integer")),
        };
        edges.push((u, v, weight));
    }
    WeightedGraph::new(parsed.n, edges)
}

pub fn parse_graph(text: &str, format: Format) -> Result<WeightedGraph> {
    match format {
        Format::EdgeList => parse_edge_list(text),
        Format::Json => parse_json(text),
    }
}

pub fn serialize_graph(g: &WeightedGraph, format: Format) -> String {
    match format {
        Format::EdgeList => {
            let mut out = String::new();
            let implied_n = g
                .edges()
                .iter()
                .map(|(_, v, _)| v.index() + 1)
                .max()
                .unwrap_or(0);
            if implied_n != g.vertex_count() {
                out.push_str(&format!("#n {}\n", g.vertex_count()));
            }
            for (u, v, w) in g.edges() {
                if w.is_one() {
                    out.push_str(&format!("{u} {v}\n"));
                } else {
                    out.push_str(&format!("{u} {v} {}\n", format_rational(w)));
                }
            }
            out
        }
        Format::Json => {
            let edges: Vec<(u32, u32, serde_json::Value)> = g
                .edges()
                .iter()
                .map(|(u, v, w)| (u.0, v.0, serde_json::Value::String(format_rational(w))))
                .collect();
            let jg = JsonGraph {
                n: g.vertex_count(),
                edges,
            };
            let mut s = serde_json::to_string(&jg).expect("graph serializes");
            s.push('\n');
            s
        }
    }
}

/// JSON rendering of a welfare report: exact value, canonical partition,
/// method tag.
pub fn serialize_report(report: &WelfareReport) -> String {
    let partition: Vec<Vec<u32>> = report
        .partition
        .blocks()
        .iter()
        .map(|b| b.iter().map(|v| v.0).collect())
        .collect();
    let json = serde_json::json!({
        "objective": report.objective.to_string(),
        "value": format_rational(&report.value),
        "partition": partition,
        "method": report.method,
    });
    let mut s = serde_json::to_string(&json).expect("report serializes");
    s.push('\n');
    s
}

/// Random connected unweighted block graph: a tree of cliques glued at
/// shared cut vertices. Each new clique (size uniform in `[2, max_clique]`)
/// attaches to a uniformly random existing vertex with probability
/// `attach_prob`, otherwise to the most recently added vertex.
pub fn gen_random_block_graph(
    seed: u64,
    n_blocks: usize,
    max_clique: usize,
    attach_prob: f64,
) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_clique = max_clique.max(2);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut n: u32 = 0;
    for block in 0..n_blocks.max(1) {
        let size = rng.random_range(2..=max_clique) as u32;
        let glue = if block == 0 {
            let v = n;
            n += 1;
            v
        } else if rng.random_bool(attach_prob.clamp(0.0, 1.0)) {
            rng.random_range(0..n)
        } else {
            n - 1
        };
        let mut members = vec![glue];
        for _ in 1..size {
            members.push(n);
            n += 1;
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                edges.push((members[i], members[j]));
            }
        }
    }
    WeightedGraph::unweighted(n as usize, &edges).expect("generated block graph is valid")
}

/// Random partial k-tree together with the k-tree's natural width-`k`
/// decomposition (which stays valid after edges are dropped with
/// probability `1 - keep_prob`).
pub fn gen_partial_ktree(
    seed: u64,
    n: usize,
    k: usize,
    keep_prob: f64,
) -> Result<(WeightedGraph, TreeDecomposition)> {
    if k == 0 || n <= k {
        return Err(FhgError::domain("gen_partial_ktree requires n > k >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut bags: Vec<Vec<VertexId>> = Vec::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();

    let base: Vec<u32> = (0..=k as u32).collect();
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            edges.push((base[i], base[j]));
        }
    }
    bags.push(base.iter().map(|&v| VertexId(v)).collect());

    // k-cliques available for attachment, with the bag that contains them
    let mut cliques: Vec<(Vec<u32>, usize)> = (0..base.len())
        .map(|skip| {
            let q: Vec<u32> = base.iter().copied().filter(|&x| x != skip as u32).collect();
            (q, 0usize)
        })
        .collect();

    for v in (k + 1) as u32..n as u32 {
        let (clique, src_bag) = cliques.choose(&mut rng).expect("cliques nonempty").clone();
        for &u in &clique {
            edges.push((u, v));
        }
        let mut bag: Vec<VertexId> = clique.iter().map(|&u| VertexId(u)).collect();
        bag.push(VertexId(v));
        bag.sort();
        bags.push(bag);
        let new_bag = bags.len() - 1;
        tree_edges.push((new_bag, src_bag));
        for skip in 0..clique.len() {
            let mut q: Vec<u32> = clique
                .iter()
                .copied()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, x)| x)
                .collect();
            q.push(v);
            q.sort();
            cliques.push((q, new_bag));
        }
    }

    let keep_prob = keep_prob.clamp(0.0, 1.0);
    let kept: Vec<(u32, u32)> = edges
        .into_iter()
        .filter(|_| rng.random_bool(keep_prob))
        .collect();
    let g = WeightedGraph::unweighted(n, &kept)?;
    Ok((
        g,
        TreeDecomposition {
            bags,
            edges: tree_edges,
        },
    ))
}

/// Replaces every edge weight with a uniform nonzero integer in
/// `[lo, hi]`, deterministically per seed.
pub fn with_random_integer_weights(
    g: &WeightedGraph,
    seed: u64,
    lo: i64,
    hi: i64,
) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g
        .edges()
        .iter()
        .map(|(u, v, _)| {
            let mut w = 0;
            while w == 0 {
                w = rng.random_range(lo..=hi);
            }
            (u.0, v.0, rat(w))
        })
        .collect();
    WeightedGraph::new(g.vertex_count(), edges).expect("reweighted graph is valid")
}

/// An instance of Partition restricted to equal-cardinality halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionInstance {
    pub values: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if !values.len().is_multiple_of(2) {
            return Err(FhgError::domain("Partition instance needs an even count"));
        }
        if values.contains(&0) {
            return Err(FhgError::domain("Partition values must be positive"));
        }
        Ok(PartitionInstance { values })
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }
}

/// Output of the egalitarian-hardness construction.
#[derive(Clone, Debug)]
pub struct HardnessInstance {
    pub graph: WeightedGraph,
    /// Egalitarian welfare achievable iff the Partition instance is a yes
    /// instance: `(n + 7/2) W`.
    pub threshold: Rational,
    /// Magnitude standing in for the minus-infinity weight between the two
    /// hub vertices: `(n+4)^2 W + 1`.
    pub big_m: BigInt,
}

/// Vertex layout of [`gen_egal_hardness`]: hubs `v1 = 0`, `v2 = 1`, anchors
/// `w1 = 2`, `w2 = 3`, and `v_{a_i} = 4 + i`.
pub const HARDNESS_V1: u32 = 0;
pub const HARDNESS_V2: u32 = 1;
pub const HARDNESS_W1: u32 = 2;
pub const HARDNESS_W2: u32 = 3;

/// Builds the graph whose maximum egalitarian welfare reaches the threshold
/// exactly when the Partition instance has an equal-cardinality solution.
/// The vertex cover `{v1, v2, w1, w2}` has size 4.
pub fn gen_egal_hardness(inst: &PartitionInstance) -> Result<HardnessInstance> {
    let n = inst.values.len();
    if !n.is_multiple_of(2) || n == 0 {
        return Err(FhgError::domain("hardness construction needs even n >= 2"));
    }
    let w_total = rat(inst.total() as i64);
    let mult = rat((n / 2 + 2) as i64);
    let threshold = (rat(n as i64) + ratio(7, 2)) * &w_total;
    let big_m = BigInt::from((n as i64 + 4).pow(2)) * BigInt::from(inst.total()) + BigInt::one();

    let mut edges: Vec<(u32, u32, Rational)> = Vec::new();
    for (i, &a) in inst.values.iter().enumerate() {
        let va = (4 + i) as u32;
        let a = rat(a as i64);
        edges.push((HARDNESS_V1, va, &mult * &a));
        edges.push((HARDNESS_V2, va, &mult * &a));
        edges.push((HARDNESS_W1, va, &mult * (&threshold - &a)));
        edges.push((HARDNESS_W2, va, &mult * (&threshold - &a)));
    }
    let anchor = &mult * rat(n as i64 + 3) * &w_total;
    edges.push((HARDNESS_V1, HARDNESS_W1, anchor.clone()));
    edges.push((HARDNESS_V2, HARDNESS_W2, anchor));
    edges.push((
        HARDNESS_V1,
        HARDNESS_V2,
        -Rational::from_integer(big_m.clone()),
    ));

    let graph = WeightedGraph::new(4 + n, edges)?;
    Ok(HardnessInstance {
        graph,
        threshold,
        big_m,
    })
}

/// Exhaustively decides whether some half of the values (exactly `n/2` of
/// them) sums to `total/2`.
pub fn partition_has_solution(inst: &PartitionInstance) -> Result<bool> {
    let n = inst.values.len();
    if n > 20 {
        return Err(FhgError::CapExceeded(
            "partition_has_solution accepts n <= 20".into(),
        ));
    }
    let total = inst.total();
    if !total.is_multiple_of(2) {
        return Ok(false);
    }
    let target = total / 2;
    let half = n / 2;
    fn search(
        values: &[u64],
        idx: usize,
        picked: usize,
        sum: u64,
        half: usize,
        target: u64,
    ) -> bool {
        if picked == half {
            return sum == target;
        }
        if idx == values.len() || sum > target {
            return false;
        }
        if values.len() - idx < half - picked {
            return false;
        }
        search(values, idx + 1, picked + 1, sum + values[idx], half, target)
            || search(values, idx + 1, picked, sum, half, target)
    }
    Ok(search(&inst.values, 0, 0, 0, half, target))
}
