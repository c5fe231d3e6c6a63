//! probelab: experiments over probe models, LLL queries, sinkless
//! orientation, ID graphs, and the fooling adversary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 infeasible parameters.

use clap::{Args, Parser, Subcommand, ValueEnum};
use probelab_core::adversary::{
    duplicate_id_rate, fool_coloring_algorithm, ConstantColorer, FoolConfig, FoolOutcome,
    GreedyBfsColorer, GuessStrategy, ParityGuess,
};
use probelab_core::bench::{bench_probe_scaling, BenchSolver, ExperimentManifest};
use probelab_core::graph::{
    gen_edge_colored_tree, gen_random_regular, graph_from_json, graph_to_json, labeling_from_json,
    labeling_to_json, power_graph, verify_solution, HalfEdgeLabeling, PortedGraph, Problem,
    Verdict,
};
use probelab_core::idgraph::{
    build_id_graph, count_h_labelings, proper_h_labeling, verify_h_labeling, verify_id_graph,
    zero_round_so_exists, IdGraph, ZeroRound,
};
use probelab_core::lll::{
    check_criterion, instance_from_json, instance_to_json, lll_query, solve_global,
    CriterionKind, LllInstance, ShatterConfig,
};
use probelab_core::local::{logstar_coloring, mis_from_coloring};
use probelab_core::sinkless::{so_as_lll, SinklessConfig, SinklessSolver};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "probelab", version, about = "Local computation algorithms lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random edge-colored tree.
    GenTree(GenTreeArgs),
    /// Generate a random regular graph with girth boosting.
    GenRegular(GenRegularArgs),
    /// ID-graph construction, verification, labelings, and checks.
    #[command(subcommand)]
    Idgraph(IdgraphCmd),
    /// LLL criterion checks, global solving, and per-event queries.
    #[command(subcommand)]
    Lll(LllCmd),
    /// The sinkless-orientation pipeline.
    Sinkless(SinklessArgs),
    /// Distance-k coloring of a graph.
    Color(ColorArgs),
    /// Maximal independent set on the power graph.
    Mis(ColorArgs),
    /// Run the fooling adversary against a built-in baseline.
    Fool(FoolArgs),
    /// Monte-Carlo probability games.
    #[command(subcommand)]
    Game(GameCmd),
    /// Probe-scaling benchmark from a manifest.
    Bench(BenchArgs),
    /// Verify a labeling file against a graph file.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenTreeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    delta: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenRegularArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    delta: usize,
    #[arg(long, default_value_t = 3)]
    girth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum IdgraphCmd {
    Build {
        #[arg(long)]
        nv: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Verify {
        file: PathBuf,
    },
    Label {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        idgraph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Count {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        idgraph: PathBuf,
    },
    Zeroround {
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum LllCmd {
    Check(LllInstanceArgs),
    Solve(LllSolveArgs),
    Query(LllQueryArgs),
}

#[derive(Args)]
struct LllInstanceArgs {
    /// Instance file (JSON), or --so-from to reduce a graph.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Build the sinkless-orientation instance of this graph file.
    #[arg(long)]
    so_from: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    min_deg: usize,
    /// poly:c, exp, or 4pd.
    #[arg(long, default_value = "poly:1")]
    criterion: String,
}

#[derive(Args)]
struct LllSolveArgs {
    #[command(flatten)]
    inst: LllInstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LllQueryArgs {
    #[command(flatten)]
    inst: LllInstanceArgs,
    #[arg(long)]
    event: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recorded model choice for the run manifest.
    #[arg(long, default_value = "volume")]
    model: String,
    #[arg(long)]
    advertised_n: Option<usize>,
    #[arg(long)]
    probe_budget: Option<usize>,
    /// Write the probe transcript dump here.
    #[arg(long)]
    transcript_out: Option<PathBuf>,
}

#[derive(Args)]
struct SinklessArgs {
    /// Generate a random delta-regular instance of this size...
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    delta: usize,
    /// ...or read a graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "global")]
    mode: SinklessMode,
    /// Query-mode half-edge.
    #[arg(long)]
    node: Option<usize>,
    #[arg(long)]
    port: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SinklessMode {
    Global,
    Query,
}

#[derive(Args)]
struct ColorArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FoolArgs {
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    alg: BaselineAlg,
    #[arg(long, default_value_t = 3)]
    id_exponent: u32,
    #[arg(long)]
    budget: Option<usize>,
    /// Prefix for the certificate files (tree + transcripts).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineAlg {
    Constant,
    GreedyBfs,
    ParityGuess,
}

#[derive(Subcommand)]
enum GameCmd {
    Duplicate {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Guess {
        #[arg(long)]
        slots: usize,
        #[arg(long)]
        marked: usize,
        #[arg(long)]
        isize: usize,
        #[arg(long, default_value = "spread")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    First,
    Spread,
    Random,
}

#[derive(Args)]
struct BenchArgs {
    /// Manifest file (JSON); inline flags build one instead.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    solver: Option<BenchSolverArg>,
    /// Comma-separated ladder, e.g. 256,512,1024.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 6)]
    delta: usize,
    #[arg(long)]
    query_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchSolverArg {
    Lll,
    Sinkless,
    Coloring,
    Constant,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    labeling: PathBuf,
    /// sinkless:<minDeg>, coloring:<c>, or edge-coloring:<c>.
    #[arg(long)]
    problem: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, message: msg.into() }
    }
    fn infeasible(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_INFEASIBLE, message: msg.into() }
    }
    fn invalid(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_INVALID, message: msg.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            eprintln!("probelab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_to_string(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_graph(path: &PathBuf) -> Result<PortedGraph, Failure> {
    graph_from_json(&read_to_string(path)?).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_criterion(s: &str) -> Result<CriterionKind, Failure> {
    match s {
        "4pd" => Ok(CriterionKind::FourPd),
        "exp" => Ok(CriterionKind::Exponential),
        _ => match s.strip_prefix("poly:") {
            Some(c) => c
                .parse::<u32>()
                .map(CriterionKind::Polynomial)
                .map_err(|e| Failure::usage(format!("bad criterion exponent: {e}"))),
            None => Err(Failure::usage(format!(
                "unknown criterion {s:?}; expected poly:<c>, exp, or 4pd"
            ))),
        },
    }
}

fn load_instance(args: &LllInstanceArgs) -> Result<LllInstance, Failure> {
    match (&args.instance, &args.so_from) {
        (Some(path), None) => {
            instance_from_json(&read_to_string(path)?).map_err(|e| Failure::usage(e.to_string()))
        }
        (None, Some(path)) => Ok(so_as_lll(&load_graph(path)?, args.min_deg)),
        _ => Err(Failure::usage("provide exactly one of --instance or --so-from")),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenTree(a) => {
            let g = gen_edge_colored_tree(a.n, a.delta, a.seed)
                .map_err(|e| Failure::infeasible(e.to_string()))?;
            emit(&a.out, &graph_to_json(&g))
        }
        Command::GenRegular(a) => {
            let g = gen_random_regular(a.n, a.delta, a.girth, a.seed)
                .map_err(|e| Failure::infeasible(e.to_string()))?;
            emit(&a.out, &graph_to_json(&g))
        }
        Command::Idgraph(cmd) => run_idgraph(cmd),
        Command::Lll(cmd) => run_lll(cmd),
        Command::Sinkless(a) => run_sinkless(a),
        Command::Color(a) => {
            let g = load_graph(&a.graph)?;
            let c = logstar_coloring(&g, a.k, g.node_count() as u128 + 1)
                .map_err(|e| Failure::usage(e.to_string()))?;
            println!("palette {} rounds {}", c.palette, c.gk_rounds);
            let lab = HalfEdgeLabeling::from_node_colors(
                &g,
                &c.colors.iter().map(|&x| x + 1).collect::<Vec<_>>(),
                c.palette as usize,
            );
            emit(&a.out, &labeling_to_json(&lab))
        }
        Command::Mis(a) => {
            let g = load_graph(&a.graph)?;
            let gk = power_graph(&g, a.k);
            let c = logstar_coloring(&g, a.k, g.node_count() as u128 + 1)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let in_set =
                mis_from_coloring(&gk, &c.colors).map_err(|e| Failure::usage(e.to_string()))?;
            let colors: Vec<u32> = in_set.iter().map(|&b| if b { 2 } else { 1 }).collect();
            println!(
                "mis size {} of {}",
                in_set.iter().filter(|&&b| b).count(),
                g.node_count()
            );
            let lab = HalfEdgeLabeling::from_node_colors(&g, &colors, 2);
            emit(&a.out, &labeling_to_json(&lab))
        }
        Command::Fool(a) => run_fool(a),
        Command::Game(cmd) => run_game(cmd),
        Command::Bench(a) => run_bench(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn run_idgraph(cmd: IdgraphCmd) -> Result<(), Failure> {
    match cmd {
        IdgraphCmd::Build { nv, delta, r, seed, out } => {
            let h = build_id_graph(nv, delta, r, seed)
                .map_err(|e| Failure::infeasible(e.to_string()))?;
            emit(&out, &h.to_text())
        }
        IdgraphCmd::Verify { file } => {
            let h = IdGraph::from_text(&read_to_string(&file)?)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let report = verify_id_graph(&h);
            println!("property 1 (common vertex set): {:?}", report.p1_common_vertex_set);
            println!("property 2 (vertex count):      {:?}", report.p2_vertex_count);
            println!("property 3 (layer degrees):     {:?}", report.p3_layer_degrees);
            println!("property 4 (union girth):       {:?}", report.p4_union_girth);
            println!("property 5 (independent sets):  {:?}", report.p5_independent_sets);
            if report.passes_desk() {
                Ok(())
            } else {
                Err(Failure::invalid("id graph fails a desk-checkable property"))
            }
        }
        IdgraphCmd::Label { tree, idgraph, seed } => {
            let t = load_graph(&tree)?;
            let h = IdGraph::from_text(&read_to_string(&idgraph)?)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let labels =
                proper_h_labeling(&t, &h, seed).map_err(|e| Failure::infeasible(e.to_string()))?;
            verify_h_labeling(&t, &h, &labels).map_err(Failure::invalid)?;
            for (v, l) in labels.iter().enumerate() {
                println!("{v} {l}");
            }
            Ok(())
        }
        IdgraphCmd::Count { tree, idgraph } => {
            let t = load_graph(&tree)?;
            let h = IdGraph::from_text(&read_to_string(&idgraph)?)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let count = count_h_labelings(&t, &h).map_err(|e| Failure::usage(e.to_string()))?;
            println!("{count}");
            Ok(())
        }
        IdgraphCmd::Zeroround { file } => {
            let h = IdGraph::from_text(&read_to_string(&file)?)
                .map_err(|e| Failure::usage(e.to_string()))?;
            match zero_round_so_exists(&h) {
                ZeroRound::Exists { out_color } => {
                    println!(
                        "exists: {}",
                        out_color
                            .iter()
                            .enumerate()
                            .map(|(v, c)| format!("{v}->{}", c + 1))
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    Ok(())
                }
                ZeroRound::Impossible(why) => {
                    println!("impossible: {why:?}");
                    Ok(())
                }
            }
        }
    }
}

fn run_lll(cmd: LllCmd) -> Result<(), Failure> {
    match cmd {
        LllCmd::Check(a) => {
            let inst = load_instance(&a)?;
            let kind = parse_criterion(&a.criterion)?;
            let r = check_criterion(&inst, kind);
            println!(
                "criterion {:?}: {} (p = {}, d = {}, binding event {:?})",
                r.kind,
                if r.holds { "holds" } else { "fails" },
                r.p,
                r.d,
                r.binding_event
            );
            if r.holds {
                Ok(())
            } else {
                Err(Failure::invalid("criterion fails"))
            }
        }
        LllCmd::Solve(a) => {
            let inst = load_instance(&a.inst)?;
            let values = solve_global(&inst, &ShatterConfig::default(), a.seed)
                .map_err(|e| Failure::infeasible(e.to_string()))?;
            let mut pairs: Vec<(u64, u32)> = values.into_iter().collect();
            pairs.sort_unstable();
            let body = serde_json::to_string_pretty(&pairs).expect("assignment serializes");
            emit(&a.out, &format!("{body}\n"))?;
            let _ = instance_to_json(&inst);
            Ok(())
        }
        LllCmd::Query(a) => {
            let inst = load_instance(&a.inst)?;
            let (res, transcript) = lll_query(&inst, &ShatterConfig::default(), a.event, a.seed);
            if let Some(path) = &a.transcript_out {
                std::fs::write(path, transcript.dump())
                    .map_err(|e| Failure::usage(e.to_string()))?;
            }
            match res {
                Ok(values) => {
                    for (x, v) in values {
                        println!("{x} = {v}");
                    }
                    println!("probes {}", transcript.probe_count());
                    Ok(())
                }
                Err(f) => Err(Failure::invalid(format!("query failed: {f}"))),
            }
        }
    }
}

fn run_sinkless(a: SinklessArgs) -> Result<(), Failure> {
    let g = match (&a.graph, a.n) {
        (Some(path), None) => load_graph(path)?,
        (None, Some(n)) => gen_random_regular(n, a.delta, 3, a.seed)
            .map_err(|e| Failure::infeasible(e.to_string()))?,
        _ => return Err(Failure::usage("provide exactly one of --graph or --n")),
    };
    let cfg = SinklessConfig { k: a.k, ..SinklessConfig::default() };
    let solver =
        SinklessSolver::new(&g, cfg, a.seed).map_err(|e| Failure::infeasible(e.to_string()))?;
    match a.mode {
        SinklessMode::Global => {
            let lab = solver.global().map_err(|e| Failure::infeasible(e.to_string()))?;
            match verify_solution(&g, &lab, Problem::Sinkless { min_deg: cfg.min_deg }) {
                Verdict::Valid => {
                    eprintln!("valid sinkless orientation (k = {})", solver.k_used);
                    emit(&a.out, &labeling_to_json(&lab))
                }
                Verdict::Invalid(v) => Err(Failure::invalid(format!("output invalid: {v}"))),
            }
        }
        SinklessMode::Query => {
            let (node, port) = match (a.node, a.port) {
                (Some(v), Some(p)) => (v, p),
                _ => return Err(Failure::usage("query mode needs --node and --port")),
            };
            let ans = solver.query(node, port).map_err(|e| Failure::invalid(e.to_string()))?;
            println!("label {} probes {}", ans.label, ans.probes);
            Ok(())
        }
    }
}

fn run_fool(a: FoolArgs) -> Result<(), Failure> {
    let cfg = FoolConfig { c: a.c, n: a.n, id_exponent: a.id_exponent, probe_budget: a.budget };
    let report = match a.alg {
        BaselineAlg::Constant => fool_coloring_algorithm(&ConstantColorer, &cfg, a.seed),
        BaselineAlg::ParityGuess => fool_coloring_algorithm(&ParityGuess, &cfg, a.seed),
        BaselineAlg::GreedyBfs => {
            let budget = a.budget.unwrap_or(a.n / 8);
            fool_coloring_algorithm(&GreedyBfsColorer { budget }, &cfg, a.seed)
        }
    }
    .map_err(|e| Failure::infeasible(e.to_string()))?;
    println!(
        "host degree {} girth {} max probes {}",
        report.delta_h, report.girth, report.max_probes
    );
    match report.outcome {
        FoolOutcome::Certificate(cert) => {
            println!(
                "certificate: core nodes {} and {} (ids {} {}) share color {}",
                cert.v_core, cert.w_core, cert.v_id, cert.w_id, cert.color
            );
            if let Some(prefix) = &a.out {
                let base = prefix.display();
                std::fs::write(format!("{base}.tree.json"), graph_to_json(&cert.tree))
                    .map_err(|e| Failure::usage(e.to_string()))?;
                std::fs::write(format!("{base}.v.transcript"), cert.v_transcript.dump())
                    .map_err(|e| Failure::usage(e.to_string()))?;
                std::fs::write(format!("{base}.w.transcript"), cert.w_transcript.dump())
                    .map_err(|e| Failure::usage(e.to_string()))?;
            }
            Ok(())
        }
        FoolOutcome::Escape { events, failed_queries } => {
            println!("escape: {events:?} (failed queries: {failed_queries})");
            Ok(())
        }
    }
}

fn run_game(cmd: GameCmd) -> Result<(), Failure> {
    match cmd {
        GameCmd::Duplicate { q, m, trials, seed } => {
            let r = duplicate_id_rate(q, m, trials, seed);
            println!("q,m,trials,rate,birthday_bound,ratio");
            println!(
                "{q},{m},{trials},{:.6},{:.6},{:.3}",
                r.rate,
                r.birthday_bound,
                if r.birthday_bound > 0.0 { r.rate / r.birthday_bound } else { 0.0 }
            );
            Ok(())
        }
        GameCmd::Guess { slots, marked, isize, strategy, trials, seed } => {
            let strategy = match strategy {
                StrategyArg::First => GuessStrategy::FirstIndices,
                StrategyArg::Spread => GuessStrategy::Spread,
                StrategyArg::Random => GuessStrategy::SeededRandom,
            };
            let r = probelab_core::adversary::guessing_game(
                slots, marked, isize, strategy, trials, seed,
            );
            println!("slots,marked,isize,trials,rate,bound,ratio");
            println!(
                "{slots},{marked},{isize},{trials},{:.6},{:.6},{:.3}",
                r.rate,
                r.bound,
                if r.bound > 0.0 { r.rate / r.bound } else { 0.0 }
            );
            Ok(())
        }
    }
}

fn run_bench(a: BenchArgs) -> Result<(), Failure> {
    let manifest = match (&a.manifest, a.solver) {
        (Some(path), None) => serde_json::from_str(&read_to_string(path)?)
            .map_err(|e| Failure::usage(format!("bad manifest: {e}")))?,
        (None, Some(solver)) => {
            if a.sizes.is_empty() || a.seeds.is_empty() {
                return Err(Failure::usage("inline bench needs --sizes and --seeds"));
            }
            let solver = match solver {
                BenchSolverArg::Lll => BenchSolver::Lll,
                BenchSolverArg::Sinkless => BenchSolver::Sinkless,
                BenchSolverArg::Coloring => BenchSolver::Coloring,
                BenchSolverArg::Constant => BenchSolver::Constant,
            };
            let mut m = ExperimentManifest::new(solver, a.sizes.clone(), a.seeds.clone(), a.delta);
            m.query_cap = a.query_cap;
            m
        }
        _ => return Err(Failure::usage("provide exactly one of --manifest or --solver")),
    };
    let result = bench_probe_scaling(&manifest).map_err(|e| Failure::infeasible(e.to_string()))?;
    eprintln!("{}", result.growth_report());
    emit(&a.out, &result.to_csv())
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let problem = parse_problem(&a.problem)?;
    let g = load_graph(&a.graph)?;
    let lab = labeling_from_json(&read_to_string(&a.labeling)?)
        .map_err(|e| Failure::usage(e.to_string()))?;
    match verify_solution(&g, &lab, problem) {
        Verdict::Valid => {
            println!("valid");
            Ok(())
        }
        Verdict::Invalid(v) => Err(Failure::invalid(format!("invalid: {v}"))),
    }
}

fn parse_problem(s: &str) -> Result<Problem, Failure> {
    let (name, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = |d: &str| {
        d.parse::<usize>().map_err(|e| Failure::usage(format!("bad problem parameter: {e}")))
    };
    match name {
        "sinkless" => Ok(Problem::Sinkless { min_deg: if arg.is_empty() { 3 } else { num(arg)? } }),
        "coloring" => Ok(Problem::NodeColoring { colors: num(arg)? }),
        "edge-coloring" => Ok(Problem::EdgeColoring { colors: num(arg)? }),
        _ => Err(Failure::usage(format!(
            "unknown problem {s:?}; expected sinkless:<minDeg>, coloring:<c>, edge-coloring:<c>"
        ))),
    }
}
