//! Method selection and cross-method checking.

use crate::block_dp::solve_block_utilitarian_with;
use crate::error::{FhgError, Result};
use crate::graph::{Objective, WeightedGraph, WelfareReport};
use crate::oracle::{
    brute_force_max_egalitarian_with, brute_force_max_utilitarian_with, OracleOptions,
    DEFAULT_ORACLE_CAP,
};
use crate::par::par_map;
use crate::treedecomp::{heuristic_decomposition, make_nice, NiceTreeDecomposition, Strategy};
use crate::tw_egal::solve_tw_egalitarian;
use crate::tw_util::solve_tw_utilitarian;
use crate::vc::{min_vertex_cover, solve_vc_utilitarian_with, VcOptions, DEFAULT_TAU_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Brute,
    Block,
    Treewidth,
    VertexCover,
}

impl std::str::FromStr for Method {
    type Err = FhgError;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "auto" => Ok(Method::Auto),
            "brute" => Ok(Method::Brute),
            "block" => Ok(Method::Block),
            "treewidth" => Ok(Method::Treewidth),
            "vertexcover" => Ok(Method::VertexCover),
            other => Err(FhgError::domain(format!("unknown method `{other}`"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Auto => "auto",
            Method::Brute => "brute",
            Method::Block => "block",
            Method::Treewidth => "treewidth",
            Method::VertexCover => "vertexcover",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub method: Method,
    pub oracle_cap: usize,
    pub tau_cap: usize,
    pub jobs: Option<usize>,
    pub strategy: Strategy,
    /// Externally supplied decomposition (already nice-ified).
    pub decomposition: Option<NiceTreeDecomposition>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Auto,
            oracle_cap: DEFAULT_ORACLE_CAP,
            tau_cap: DEFAULT_TAU_CAP,
            jobs: None,
            strategy: Strategy::MinFill,
            decomposition: None,
        }
    }
}

fn decomposition_for(g: &WeightedGraph, opts: &SolveOptions) -> Result<NiceTreeDecomposition> {
    match &opts.decomposition {
        Some(ntd) => Ok(ntd.clone()),
        None => {
            let td = heuristic_decomposition(g, opts.strategy);
            make_nice(g, &td)
        }
    }
}

fn pick_auto(g: &WeightedGraph, objective: Objective, opts: &SolveOptions) -> Method {
    match objective {
        Objective::Utilitarian => {
            if g.is_unweighted() && g.is_block_graph() {
                Method::Block
            } else if min_vertex_cover(g, opts.tau_cap).is_ok() {
                Method::VertexCover
            } else {
                Method::Treewidth
            }
        }
        Objective::Egalitarian => Method::Treewidth,
    }
}

/// Solves with the requested method; `auto` picks block for unweighted block
/// graphs, then vertexcover if the cover number is within the cap, then
/// treewidth. The egalitarian objective is served by treewidth or brute.
pub fn solve(
    g: &WeightedGraph,
    objective: Objective,
    opts: &SolveOptions,
) -> Result<WelfareReport> {
    let method = match opts.method {
        Method::Auto => pick_auto(g, objective, opts),
        m => m,
    };
    match (method, objective) {
        (Method::Brute, Objective::Utilitarian) => brute_force_max_utilitarian_with(
            g,
            &OracleOptions {
                cap: opts.oracle_cap,
                jobs: opts.jobs,
                max_blocks: None,
            },
        ),
        (Method::Brute, Objective::Egalitarian) => brute_force_max_egalitarian_with(
            g,
            &OracleOptions {
                cap: opts.oracle_cap,
                jobs: opts.jobs,
                max_blocks: None,
            },
        ),
        (Method::Block, Objective::Utilitarian) => solve_block_utilitarian_with(g, opts.jobs),
        (Method::Block, Objective::Egalitarian) => Err(FhgError::UnsupportedMethod(
            "the block DP only maximizes utilitarian welfare".into(),
        )),
        (Method::Treewidth, Objective::Utilitarian) => {
            solve_tw_utilitarian(g, &decomposition_for(g, opts)?)
        }
        (Method::Treewidth, Objective::Egalitarian) => {
            solve_tw_egalitarian(g, &decomposition_for(g, opts)?)
        }
        (Method::VertexCover, Objective::Utilitarian) => solve_vc_utilitarian_with(
            g,
            &VcOptions {
                tau_cap: opts.tau_cap,
                jobs: opts.jobs,
            },
        ),
        (Method::VertexCover, Objective::Egalitarian) => Err(FhgError::UnsupportedMethod(
            "egalitarian welfare via vertex cover is NP-hard; use treewidth or brute".into(),
        )),
        (Method::Auto, _) => unreachable!("auto resolved above"),
    }
}

/// Outcome of one method in a cross-check run.
#[derive(Clone, Debug)]
pub struct MethodOutcome {
    pub method: Method,
    pub result: std::result::Result<WelfareReport, String>,
}

/// Runs every method applicable to `(g, objective)` (including the brute
/// oracle when `n` is within the cap) in a fixed order; methods may execute
/// in parallel but the output order is by method name.
pub fn check_methods(
    g: &WeightedGraph,
    objective: Objective,
    opts: &SolveOptions,
) -> Vec<MethodOutcome> {
    let mut methods: Vec<Method> = Vec::new();
    if g.vertex_count() <= opts.oracle_cap {
        methods.push(Method::Brute);
    }
    if objective == Objective::Utilitarian {
        if g.is_unweighted() && g.is_block_graph() {
            methods.push(Method::Block);
        }
        methods.push(Method::Treewidth);
        if min_vertex_cover(g, opts.tau_cap).is_ok() {
            methods.push(Method::VertexCover);
        }
    } else {
        methods.push(Method::Treewidth);
    }
    methods.sort_by_key(|m| m.to_string());

    par_map(opts.jobs, methods, |method| {
        let mut o = opts.clone();
        o.method = method;
        MethodOutcome {
            method,
            result: solve(g, objective, &o).map_err(|e| e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn auto_picks_block_for_block_graphs() {
        let g = WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = solve(&g, Objective::Utilitarian, &SolveOptions::default()).unwrap();
        assert_eq!(r.method, "block");
        assert_eq!(r.value, rat(2));
    }

    #[test]
    fn auto_falls_back_for_weighted_graphs() {
        let g =
            WeightedGraph::new(4, vec![(0, 1, rat(2)), (1, 2, rat(3)), (2, 3, rat(-1))]).unwrap();
        let r = solve(&g, Objective::Utilitarian, &SolveOptions::default()).unwrap();
        assert_eq!(r.method, "vertexcover");
        let r = solve(&g, Objective::Egalitarian, &SolveOptions::default()).unwrap();
        assert_eq!(r.method, "treewidth");
    }

    #[test]
    fn method_objective_mismatch_is_rejected() {
        let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        for method in [Method::Block, Method::VertexCover] {
            let opts = SolveOptions {
                method,
                ..Default::default()
            };
            assert!(matches!(
                solve(&g, Objective::Egalitarian, &opts),
                Err(FhgError::UnsupportedMethod(_))
            ));
        }
    }

    #[test]
    fn check_agrees_across_methods() {
        let g = WeightedGraph::unweighted(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]).unwrap();
        let outcomes = check_methods(&g, Objective::Utilitarian, &SolveOptions::default());
        assert!(outcomes.len() >= 4); // block, brute, treewidth, vertexcover
        let values: Vec<_> = outcomes
            .iter()
            .map(|o| o.result.as_ref().unwrap().value.clone())
            .collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]));
    }
}
