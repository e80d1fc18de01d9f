//! `shortcuts`: generate instances, build and verify shortcuts, run the
//! simulator, and sweep or calibrate experiment corpora.
//!
//! Exit status is 0 when every validator passed, 1 when a validator failed
//! and 2 on errors.

use std::error::Error as StdError;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use shortcuts_core::construct::{apex_cells, build_shortcut, ConstructorConfig, Method};
use shortcuts_core::decomp::{validate_cliquesum, CliqueSumTree};
use shortcuts_core::gates::{planar_gate, verify_gate};
use shortcuts_core::graph::{bfs_tree, Embedding};
use shortcuts_core::harness::{
    calibrate, calibration_rows, default_corpus, generate, read_csv, run_experiment, write_csv, Calibration, ExperimentOptions,
    Family, FamilySpec,
};
use shortcuts_core::io::{
    read_json, write_json, DecompositionFile, GraphFile, PartsFile, ShortcutFile, TreeFile,
};
use shortcuts_core::shortcut::{validate_parts, validate_shortcut, Partition, QualityReport, Shortcut};
use shortcuts_core::sim::{boruvka_mst, kruskal, simulate_aggregate, AggregateOp, SimConfig, TraceRow};
use shortcuts_core::{AnnotatedGraph, RootedTree};

type CliResult = Result<bool, Box<dyn StdError>>;

#[derive(Parser)]
#[command(name = "shortcuts", version, about = "Tree-restricted low-congestion shortcuts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance: graph file (with any decomposition) and parts file.
    Gen(GenArgs),
    /// Build a shortcut for a graph, parts and spanning tree.
    Build(BuildArgs),
    /// Run every applicable validator on the given files.
    Verify(VerifyArgs),
    /// Run the CONGEST simulator.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Sweep a corpus and write one CSV row per (instance, method).
    Bench(BenchArgs),
    /// Fit constants from corpus results.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Family parameter as key=value; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, u64)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Where to write the default parts (defaults to `<out>.parts.json`).
    #[arg(long)]
    parts_out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeArg {
    /// Spanning tree: `bfs:<root>` or `file:<tree.json>`.
    #[arg(long, default_value = "bfs:0")]
    tree: String,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value = "auto")]
    method: Method,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    parts: PathBuf,
    #[command(flatten)]
    tree: TreeArg,
    #[arg(long)]
    out: PathBuf,
    /// Skip clique-sum depth compression.
    #[arg(long)]
    no_compress: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rebuild and verify the gate on every contracted graph (apex route).
    #[arg(long)]
    verify_gates: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    parts: Option<PathBuf>,
    #[arg(long)]
    shortcut: Option<PathBuf>,
    /// Clique-sum decomposition file; the graph file's own is checked too.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Build the gate of the apex cells, verify it and dump it here.
    #[arg(long)]
    gate_out: Option<PathBuf>,
    #[command(flatten)]
    tree: TreeArg,
}

#[derive(Subcommand)]
enum SimCommand {
    /// Part-wise aggregation over a built shortcut.
    Aggregate(AggregateArgs),
    /// Borůvka MST with a fresh shortcut per phase.
    Mst(MstArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Min,
    Max,
    Sum,
}

#[derive(Args)]
struct SimCommon {
    /// Bits per edge direction per round (default 2 * id bits + 64).
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    max_rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write every delivered message as CSV (round, edge, part, bits).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    parts: PathBuf,
    #[arg(long)]
    shortcut: PathBuf,
    #[arg(long, value_enum, default_value = "min")]
    op: OpArg,
    /// JSON array of per-vertex values (defaults to the vertex ids).
    #[arg(long)]
    values: Option<PathBuf>,
    #[command(flatten)]
    common: SimCommon,
}

#[derive(Args)]
struct MstArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "auto")]
    method: Method,
    #[command(flatten)]
    tree: TreeArg,
    #[arg(long)]
    no_compress: bool,
    /// Use empty shortcuts, i.e. flooding inside each fragment.
    #[arg(long)]
    flood: bool,
    /// Rounds charged per phase for shortcut construction.
    #[arg(long, default_value_t = 0)]
    phase_surcharge: usize,
    #[command(flatten)]
    common: SimCommon,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON list of family specs; the default corpus when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Sweep a single family instead (with --param).
    #[arg(long, conflicts_with = "corpus")]
    family: Option<Family>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, u64)>,
    #[arg(long, value_delimiter = ',', default_value = "auto")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    no_mst: bool,
    #[arg(long)]
    no_compress: bool,
    /// Compare against the exhaustive optimum when |E_T| * parts <= this.
    #[arg(long, default_value_t = 0)]
    oracle_bits: usize,
    /// Fill the wall_ms column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Corpus results from `bench`. When absent, the default and oracle
    /// corpora are run.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Existing constants to check for regressions.
    #[arg(long)]
    stored: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, u64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v = v.parse().map_err(|_| format!("parameter {k} needs an integer value"))?;
    Ok((k.to_string(), v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Build(a) => build(a),
        Command::Verify(a) => verify(a),
        Command::Sim(SimCommand::Aggregate(a)) => sim_aggregate(a),
        Command::Sim(SimCommand::Mst(a)) => sim_mst(a),
        Command::Bench(a) => bench(a),
        Command::Calibrate(a) => calibrate_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_graph(path: &Path) -> Result<(AnnotatedGraph, Option<CliqueSumTree>), Box<dyn StdError>> {
    let file: GraphFile = read_json(path)?;
    Ok(file.to_graph()?)
}

fn load_tree(spec: &str, g: &AnnotatedGraph) -> Result<RootedTree, Box<dyn StdError>> {
    if let Some(root) = spec.strip_prefix("bfs:") {
        Ok(bfs_tree(g, root.parse()?)?)
    } else if let Some(path) = spec.strip_prefix("file:") {
        let file: TreeFile = read_json(path)?;
        Ok(file.to_tree(g.vertex_count())?)
    } else {
        Err(format!("tree must be bfs:<root> or file:<path>, got {spec:?}").into())
    }
}

fn print_json(value: &serde_json::Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

fn report_issues(kind: &str, issues: &[String]) -> bool {
    for issue in issues {
        eprintln!("{kind}: {issue}");
    }
    issues.is_empty()
}

fn gen(a: GenArgs) -> CliResult {
    let mut spec = FamilySpec::new(a.family, a.seed);
    for (k, v) in &a.params {
        spec = spec.with(k, *v);
    }
    let inst = generate(&spec)?;
    write_json(&a.out, &GraphFile::from_graph(&inst.graph, inst.decomposition.as_ref()))?;
    let parts_out = a.parts_out.unwrap_or_else(|| a.out.with_extension("parts.json"));
    write_json(&parts_out, &PartsFile { parts: inst.parts.parts().to_vec() })?;
    print_json(&json!({
        "instance": spec.label(),
        "n": inst.graph.vertex_count(),
        "m": inst.graph.edge_count(),
        "parts": inst.parts.len(),
        "graph": a.out,
        "parts_file": parts_out,
    }))?;
    Ok(true)
}

fn build(a: BuildArgs) -> CliResult {
    let (g, cst) = load_graph(&a.graph)?;
    let pf: PartsFile = read_json(&a.parts)?;
    let parts = Partition::new(&g, pf.parts)?;
    let t = load_tree(&a.tree.tree, &g)?;
    let cfg = ConstructorConfig {
        method: a.method,
        compression: !a.no_compress,
        seed: a.seed,
        verify_gates: a.verify_gates,
    };
    let built = build_shortcut(&g, cst.as_ref(), &t, &parts, &cfg)?;
    write_json(&a.out, &ShortcutFile::from_shortcut(&built.shortcut))?;
    let q = QualityReport::measure(&parts, &built.shortcut);
    let issues = validate_shortcut(&g, &parts, &built.shortcut);
    print_json(&json!({ "quality": q, "report": built.report, "valid": issues.is_empty() }))?;
    let ok = report_issues("shortcut", &issues);
    Ok(ok && built.report.component_violations == 0)
}

fn verify(a: VerifyArgs) -> CliResult {
    let (g, cst) = load_graph(&a.graph)?;
    let mut ok = true;
    let mut summary = serde_json::Map::new();
    if g.rotation().is_some() {
        let euler = Embedding::new(&g).and_then(|e| e.check_euler(&g));
        if let Err(e) = &euler {
            eprintln!("embedding: {e}");
        }
        ok &= euler.is_ok();
        summary.insert("embedding".into(), json!(euler.is_ok()));
    }
    let mut decompositions = Vec::new();
    decompositions.extend(cst);
    if let Some(path) = &a.decomposition {
        let file: DecompositionFile = read_json(path)?;
        decompositions.push(file.to_tree()?);
    }
    for (i, d) in decompositions.iter().enumerate() {
        let good = report_issues("decomposition", &validate_cliquesum(&g, d));
        summary.insert(format!("decomposition_{i}"), json!(good));
        ok &= good;
    }
    let parts = match &a.parts {
        Some(path) => {
            let pf: PartsFile = read_json(path)?;
            let issues: Vec<String> = validate_parts(&g, &pf.parts).iter().map(|v| v.to_string()).collect();
            let good = report_issues("parts", &issues);
            summary.insert("parts".into(), json!(good));
            ok &= good;
            good.then(|| Partition::new(&g, pf.parts)).transpose()?
        }
        None => None,
    };
    if let Some(path) = &a.shortcut {
        let parts = parts.as_ref().ok_or("--shortcut needs valid --parts")?;
        let file: ShortcutFile = read_json(path)?;
        let s: Shortcut = file.to_shortcut(g.vertex_count())?;
        let good = report_issues("shortcut", &validate_shortcut(&g, parts, &s));
        summary.insert("shortcut".into(), json!(good));
        summary.insert("quality".into(), json!(QualityReport::measure(parts, &s)));
        ok &= good;
    }
    if let Some(path) = &a.gate_out {
        let t = load_tree(&a.tree.tree, &g)?;
        let cells = apex_cells(&g, &t)?;
        let gate = planar_gate(&cells.h, &cells.cells)?;
        let issues: Vec<String> = verify_gate(&cells.h, &cells.cells, &gate).iter().map(|v| v.to_string()).collect();
        write_json(path, &gate)?;
        let good = report_issues("gate", &issues);
        summary.insert("gate".into(), json!(good));
        ok &= good;
    }
    summary.insert("valid".into(), json!(ok));
    print_json(&serde_json::Value::Object(summary))?;
    Ok(ok)
}

fn sim_config(common: &SimCommon, n: usize) -> SimConfig {
    let mut cfg = SimConfig::for_graph(n);
    if let Some(b) = common.bits {
        cfg.bits_per_edge_per_round = b;
    }
    cfg.max_rounds = common.max_rounds;
    cfg.seed = common.seed;
    cfg.trace = common.trace.is_some();
    cfg
}

fn write_trace(path: &Path, trace: &[TraceRow]) -> Result<(), Box<dyn StdError>> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    for row in trace {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn sim_aggregate(a: AggregateArgs) -> CliResult {
    let (g, _) = load_graph(&a.graph)?;
    let pf: PartsFile = read_json(&a.parts)?;
    let parts = Partition::new(&g, pf.parts)?;
    let sf: ShortcutFile = read_json(&a.shortcut)?;
    let s = sf.to_shortcut(g.vertex_count())?;
    let values: Vec<i64> = match &a.values {
        Some(path) => read_json(path)?,
        None => (0..g.vertex_count() as i64).collect(),
    };
    let op = match a.op {
        OpArg::Min => AggregateOp::Min,
        OpArg::Max => AggregateOp::Max,
        OpArg::Sum => AggregateOp::Sum,
    };
    let cfg = sim_config(&a.common, g.vertex_count());
    let out = simulate_aggregate(&g, &parts, &s, op, &values, &cfg)?;
    let correct = parts
        .parts()
        .iter()
        .enumerate()
        .all(|(i, p)| op.fold(p.iter().map(|&v| values[v])) == Some(out.results[i]));
    if let Some(path) = &a.common.trace {
        write_trace(path, &out.trace)?;
    }
    if let Some(path) = &a.common.csv {
        let mut w = csv::Writer::from_writer(File::create(path)?);
        w.serialize(out.stats)?;
        w.flush()?;
    }
    print_json(&json!({ "results": out.results, "stats": out.stats, "correct": correct }))?;
    Ok(correct)
}

fn sim_mst(a: MstArgs) -> CliResult {
    let (g, cst) = load_graph(&a.graph)?;
    let t = load_tree(&a.tree.tree, &g)?;
    let cfg = sim_config(&a.common, g.vertex_count());
    let ccfg = ConstructorConfig {
        method: a.method,
        compression: !a.no_compress,
        seed: a.common.seed,
        verify_gates: false,
    };
    let mut provider = |p: &Partition| -> shortcuts_core::Result<Shortcut> {
        if a.flood {
            Ok(Shortcut::empty(t.clone(), p.len()))
        } else {
            build_shortcut(&g, cst.as_ref(), &t, p, &ccfg).map(|b| b.shortcut)
        }
    };
    let out = boruvka_mst(&g, &mut provider, &cfg)?;
    let matches = out.edges == kruskal(&g);
    let surcharge = a.phase_surcharge * out.phase_rounds.len();
    if let Some(path) = &a.common.trace {
        write_trace(path, &out.trace)?;
    }
    if let Some(path) = &a.common.csv {
        let mut w = csv::Writer::from_writer(File::create(path)?);
        w.write_record(["phase", "rounds"])?;
        for (i, r) in out.phase_rounds.iter().enumerate() {
            w.write_record([i.to_string(), (r + a.phase_surcharge).to_string()])?;
        }
        w.flush()?;
    }
    print_json(&json!({
        "weight": out.weight,
        "edges": out.edges.len(),
        "phases": out.phase_rounds.len(),
        "rounds": out.stats.rounds_used + surcharge,
        "simulated_rounds": out.stats.rounds_used,
        "messages": out.stats.messages_sent,
        "matches_kruskal": matches,
    }))?;
    Ok(matches)
}

fn bench(a: BenchArgs) -> CliResult {
    let specs: Vec<FamilySpec> = match (&a.corpus, a.family) {
        (Some(path), _) => read_json(path)?,
        (None, Some(family)) => {
            let mut spec = FamilySpec::new(family, a.seed);
            for (k, v) in &a.params {
                spec = spec.with(k, *v);
            }
            vec![spec]
        }
        (None, None) => default_corpus(a.seed),
    };
    let opts = ExperimentOptions {
        root: 0,
        compression: !a.no_compress,
        mst: !a.no_mst,
        oracle_bits: a.oracle_bits,
        timing: a.timing,
    };
    let rows = run_experiment(&specs, &a.methods, a.trials, &opts);
    match &a.csv {
        Some(path) => write_csv(&rows, File::create(path)?)?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    let failed = rows.iter().filter(|r| !r.all_valid()).count();
    eprintln!("{} rows, {failed} failed", rows.len());
    Ok(failed == 0)
}

fn calibrate_cmd(a: CalibrateArgs) -> CliResult {
    let rows = match &a.csv {
        Some(path) => read_csv(File::open(path)?)?,
        None => calibration_rows(a.seed),
    };
    let stored: Option<Calibration> = a.stored.as_ref().map(read_json).transpose()?;
    let outcome = calibrate(&rows, stored.as_ref())?;
    let mut text = serde_json::to_string_pretty(&outcome.constants)?;
    text.push('\n');
    std::fs::write(&a.out, text)?;
    for r in &outcome.regressions {
        eprintln!("regression: {r}");
    }
    print_json(&json!({ "constants": outcome.constants, "regressions": outcome.regressions }))?;
    Ok(outcome.regressions.is_empty())
}
