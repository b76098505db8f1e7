//! Command-line front end for the fhg solvers.
//!
//! Exit codes: 0 success, 1 cross-check disagreement, 2 parse/input error,
//! 3 method/objective mismatch, 4 size cap exceeded. All timing output goes
//! to stderr so stdout is byte-identical across runs and `--jobs` settings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fhg::graph::{Objective, WeightedGraph};
use fhg::instances::{
    gen_egal_hardness, gen_partial_ktree, gen_random_block_graph, parse_graph, serialize_graph,
    serialize_report, Format, PartitionInstance,
};
use fhg::oracle::DEFAULT_ORACLE_CAP;
use fhg::rational::{approx_f64, format_rational, rat};
use fhg::solve::{check_methods, solve, Method, SolveOptions};
use fhg::treedecomp::{heuristic_decomposition, make_nice, read_td, write_td, Strategy};
use fhg::vc::DEFAULT_TAU_CAP;
use fhg::FhgError;

#[derive(Parser)]
#[command(
    name = "fhg",
    version,
    about = "Exact welfare maximization in fractional hedonic games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the optimal value and partition.
    Solve(SolveArgs),
    /// Run every applicable method plus the oracle and compare exactly.
    Check(CheckArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Compute a tree decomposition and write it as a `.td` file.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Utilitarian,
    Egalitarian,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Objective {
        match o {
            ObjectiveArg::Utilitarian => Objective::Utilitarian,
            ObjectiveArg::Egalitarian => Objective::Egalitarian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Brute,
    Block,
    Treewidth,
    Vertexcover,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Brute => Method::Brute,
            MethodArg::Block => Method::Block,
            MethodArg::Treewidth => Method::Treewidth,
            MethodArg::Vertexcover => Method::VertexCover,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    EdgeList,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    MinFill,
    MinDegree,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::MinFill => Strategy::MinFill,
            StrategyArg::MinDegree => Strategy::MinDegree,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Instance path.
    #[arg(long)]
    input: PathBuf,
    /// Graph format; inferred from the extension when omitted
    /// (`.json` means json, anything else edge_list).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct CapArgs {
    /// Largest n the brute-force oracle accepts.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,
    /// Largest vertex cover number the vertexcover method branches for.
    #[arg(long, default_value_t = DEFAULT_TAU_CAP)]
    tau_cap: usize,
    /// Worker threads; `FHG_JOBS` is the fallback, 0 means all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

impl CapArgs {
    fn jobs(&self) -> Option<usize> {
        self.jobs
            .or_else(|| std::env::var("FHG_JOBS").ok().and_then(|s| s.parse().ok()))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Externally computed tree decomposition (`.td` file).
    #[arg(long)]
    td: Option<PathBuf>,
    /// Heuristic when no `--td` is given.
    #[arg(long, value_enum, default_value = "min-fill")]
    strategy: StrategyArg,
    #[command(flatten)]
    caps: CapArgs,
    /// Also print a decimal approximation of the value.
    #[arg(long)]
    approx: bool,
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "min-fill")]
    strategy: StrategyArg,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random connected unweighted block graph (a glued tree of cliques).
    Blockgraph(GenBlockArgs),
    /// Random partial k-tree, optionally with its width-k decomposition.
    Ktree(GenKtreeArgs),
    /// Egalitarian-hardness instance from a Partition instance.
    Hardness(GenHardnessArgs),
}

#[derive(Args)]
struct GenBlockArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    blocks: usize,
    #[arg(long, default_value_t = 4)]
    max_clique: usize,
    #[arg(long, default_value_t = 0.5)]
    attach_prob: f64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct GenKtreeArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    keep_prob: f64,
    #[arg(long)]
    output: PathBuf,
    /// Also write the construction's width-k decomposition here.
    #[arg(long)]
    td_output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct GenHardnessArgs {
    /// Partition values, comma separated (even count), e.g. `--a 1,1`.
    #[arg(long = "a", value_delimiter = ',')]
    a: Vec<u64>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "min-fill")]
    strategy: StrategyArg,
    #[arg(long)]
    output: PathBuf,
}

fn resolve_format(path: &Path, arg: Option<FormatArg>) -> Format {
    match arg {
        Some(FormatArg::EdgeList) => Format::EdgeList,
        Some(FormatArg::Json) => Format::Json,
        None => {
            if path.extension().is_some_and(|e| e == "json") {
                Format::Json
            } else {
                Format::EdgeList
            }
        }
    }
}

fn load_graph(args: &InputArgs) -> Result<WeightedGraph, FhgError> {
    let text = fs::read_to_string(&args.input)?;
    parse_graph(&text, resolve_format(&args.input, args.format))
}

fn exit_code(err: &FhgError) -> i32 {
    match err {
        FhgError::Parse { .. } | FhgError::Domain(_) | FhgError::Io(_) => 2,
        FhgError::InvalidDecomposition(_) => 2,
        FhgError::UnsupportedMethod(_) => 3,
        FhgError::CapExceeded(_) => 4,
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), FhgError> {
    let g = load_graph(&args.input)?;
    let decomposition = match &args.td {
        Some(path) => {
            let (td, _) = read_td(&fs::read_to_string(path)?)?;
            Some(make_nice(&g, &td)?)
        }
        None => None,
    };
    let opts = SolveOptions {
        method: args.method.into(),
        oracle_cap: args.caps.oracle_cap,
        tau_cap: args.caps.tau_cap,
        jobs: args.caps.jobs(),
        strategy: args.strategy.into(),
        decomposition,
    };
    let started = Instant::now();
    let report = solve(&g, args.objective.into(), &opts)?;
    let elapsed = started.elapsed();
    debug_assert!(report.verify(&g).unwrap_or(false));
    if args.json {
        print!("{}", serialize_report(&report));
    } else {
        println!("objective: {}", report.objective);
        println!("method: {}", report.method);
        println!("value: {}", format_rational(&report.value));
        if args.approx {
            println!("approx: {:.6}", approx_f64(&report.value));
        }
        println!("partition: {}", report.partition);
    }
    eprintln!("wall_time_ms: {}", elapsed.as_millis());
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<bool, FhgError> {
    let g = load_graph(&args.input)?;
    let opts = SolveOptions {
        method: Method::Auto,
        oracle_cap: args.caps.oracle_cap,
        tau_cap: args.caps.tau_cap,
        jobs: args.caps.jobs(),
        strategy: args.strategy.into(),
        decomposition: None,
    };
    let started = Instant::now();
    let outcomes = check_methods(&g, args.objective.into(), &opts);
    let elapsed = started.elapsed();
    // hidden test hook: perturb one method's value to exercise the
    // disagreement path
    let corrupt = std::env::var("FHG_TEST_CORRUPT").ok();
    let mut rows: Vec<(String, Result<String, String>)> = Vec::new();
    let mut values = Vec::new();
    for outcome in outcomes {
        let name = outcome.method.to_string();
        match outcome.result {
            Ok(report) => {
                let mut value = report.value.clone();
                if corrupt.as_deref() == Some(name.as_str()) {
                    value += rat(1);
                }
                rows.push((name, Ok(format_rational(&value))));
                values.push(value);
            }
            Err(msg) => rows.push((name, Err(msg))),
        }
    }
    let agreed = !values.is_empty()
        && values.windows(2).all(|w| w[0] == w[1])
        && rows.iter().all(|(_, r)| r.is_ok());
    let mut out = String::new();
    for (name, result) in &rows {
        match result {
            Ok(value) => writeln!(out, "{name:<12} {value}").unwrap(),
            Err(msg) => writeln!(out, "{name:<12} error: {msg}").unwrap(),
        }
    }
    writeln!(out, "agreement: {}", if agreed { "ok" } else { "MISMATCH" }).unwrap();
    print!("{out}");
    eprintln!("wall_time_ms: {}", elapsed.as_millis());
    Ok(agreed)
}

fn write_graph(g: &WeightedGraph, path: &Path, format: Option<FormatArg>) -> Result<(), FhgError> {
    let format = resolve_format(path, format);
    fs::write(path, serialize_graph(g, format))?;
    Ok(())
}

fn cmd_gen(cmd: GenCommand) -> Result<(), FhgError> {
    match cmd {
        GenCommand::Blockgraph(args) => {
            if args.blocks == 0 || args.max_clique < 2 {
                return Err(FhgError::domain(
                    "blockgraph needs --blocks >= 1 and --max-clique >= 2",
                ));
            }
            let g =
                gen_random_block_graph(args.seed, args.blocks, args.max_clique, args.attach_prob);
            write_graph(&g, &args.output, args.format)?;
            println!(
                "wrote {} ({} vertices, {} edges)",
                args.output.display(),
                g.vertex_count(),
                g.edge_count()
            );
        }
        GenCommand::Ktree(args) => {
            let (g, td) = gen_partial_ktree(args.seed, args.n, args.k, args.keep_prob)?;
            write_graph(&g, &args.output, args.format)?;
            if let Some(td_path) = &args.td_output {
                fs::write(td_path, write_td(&td, g.vertex_count()))?;
            }
            println!(
                "wrote {} ({} vertices, {} edges)",
                args.output.display(),
                g.vertex_count(),
                g.edge_count()
            );
        }
        GenCommand::Hardness(args) => {
            let inst = PartitionInstance::new(args.a)?;
            let h = gen_egal_hardness(&inst)?;
            write_graph(&h.graph, &args.output, args.format)?;
            let meta = serde_json::json!({
                "threshold": format_rational(&h.threshold),
                "big_m": h.big_m.to_string(),
                "n_values": inst.values.len(),
                "vertices": {"v1": 0, "v2": 1, "w1": 2, "w2": 3, "values_from": 4},
            });
            let meta_path = sidecar_path(&args.output);
            fs::write(
                &meta_path,
                format!("{}\n", serde_json::to_string_pretty(&meta).unwrap()),
            )?;
            println!(
                "wrote {} ({} vertices) and {}",
                args.output.display(),
                h.graph.vertex_count(),
                meta_path.display()
            );
        }
    }
    Ok(())
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn cmd_decompose(args: DecomposeArgs) -> Result<(), FhgError> {
    let g = load_graph(&args.input)?;
    let td = heuristic_decomposition(&g, args.strategy.into());
    fs::write(&args.output, write_td(&td, g.vertex_count()))?;
    println!(
        "wrote {} (width {}, {} bags)",
        args.output.display(),
        td.width(),
        td.node_count()
    );
    Ok(())
}

fn main() {
    // die quietly when stdout is closed early (e.g. piped into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args).map(|()| 0),
        Command::Check(args) => cmd_check(args).map(|ok| if ok { 0 } else { 1 }),
        Command::Gen(cmd) => cmd_gen(cmd).map(|()| 0),
        Command::Decompose(args) => cmd_decompose(args).map(|()| 0),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
