use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::construct::{build_shortcut, ConstructorConfig, Method};
use crate::decomp::{compress_cliquesum, tree_decomposition, validate_cliquesum, validate_decomposition};
use crate::error::Result;
use crate::graph::bfs_tree;
use crate::shortcut::{brute_force_optimal, validate_parts, QualityReport};
use crate::sim::{boruvka_mst, kruskal, simulate_aggregate, AggregateOp, SimConfig};

use super::{generate, FamilySpec, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentOptions {
    /// Root of the BFS spanning tree.
    pub root: usize,
    pub compression: bool,
    /// Run Borůvka with shortcuts from the same method.
    pub mst: bool,
    /// Solve the exhaustive optimum when `|E_T| * parts` is at most this.
    pub oracle_bits: usize,
    /// Fill the `wall_ms` column. Leave off for byte-identical output.
    pub timing: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { root: 0, compression: true, mst: true, oracle_bits: 0, timing: false }
    }
}

/// One CSV row per (instance, method). Columns appear in field order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub instance: String,
    pub family: String,
    pub seed: u64,
    pub trial: usize,
    pub method: String,
    /// Route actually taken by `auto`.
    pub route: String,
    pub n: usize,
    pub m: usize,
    pub parts: usize,
    pub d_t: usize,
    pub block: usize,
    pub congestion: usize,
    pub quality: usize,
    pub optimal_quality: Option<usize>,
    pub decomposition_depth: usize,
    pub max_local_components: usize,
    pub component_violations: usize,
    pub parts_valid: bool,
    pub shortcut_valid: bool,
    pub decomposition_valid: bool,
    pub aggregate_correct: bool,
    pub aggregate_rounds: usize,
    pub mst_rounds: Option<usize>,
    pub mst_weight: String,
    pub mst_matches_kruskal: Option<bool>,
    pub error: String,
    pub wall_ms: Option<u64>,
}

impl ExperimentRow {
    /// Every validity column holds and no error was recorded.
    pub fn all_valid(&self) -> bool {
        self.error.is_empty()
            && self.parts_valid
            && self.shortcut_valid
            && self.decomposition_valid
            && self.aggregate_correct
            && self.component_violations == 0
            && self.mst_matches_kruskal != Some(false)
    }
}

pub const CSV_COLUMNS: [&str; 27] = [
    "instance",
    "family",
    "seed",
    "trial",
    "method",
    "route",
    "n",
    "m",
    "parts",
    "d_t",
    "block",
    "congestion",
    "quality",
    "optimal_quality",
    "decomposition_depth",
    "max_local_components",
    "component_violations",
    "parts_valid",
    "shortcut_valid",
    "decomposition_valid",
    "aggregate_correct",
    "aggregate_rounds",
    "mst_rounds",
    "mst_weight",
    "mst_matches_kruskal",
    "error",
    "wall_ms",
];

/// Runs every spec `trials` times (seed `spec.seed + trial`) under every
/// method. Failures become rows with the `error` column set.
pub fn run_experiment(
    specs: &[FamilySpec],
    methods: &[Method],
    trials: usize,
    opts: &ExperimentOptions,
) -> Vec<ExperimentRow> {
    let mut rows = Vec::new();
    for spec in specs {
        for trial in 0..trials {
            let mut spec = spec.clone();
            spec.seed = spec.seed.wrapping_add(trial as u64);
            let base = ExperimentRow {
                instance: spec.label(),
                family: spec.family.to_string(),
                seed: spec.seed,
                trial,
                ..Default::default()
            };
            let inst = match guarded(|| generate(&spec)) {
                Ok(inst) => inst,
                Err(e) => {
                    for m in methods {
                        rows.push(ExperimentRow { method: m.to_string(), error: e.clone(), ..base.clone() });
                    }
                    continue;
                }
            };
            for &method in methods {
                let mut row = ExperimentRow { method: method.to_string(), ..base.clone() };
                let start = Instant::now();
                if let Err(e) = guarded(|| measure(&inst, method, opts, &mut row)) {
                    row.error = e;
                }
                if opts.timing {
                    row.wall_ms = Some(start.elapsed().as_millis() as u64);
                }
                rows.push(row);
            }
        }
    }
    rows
}

fn guarded<T>(f: impl FnOnce() -> Result<T>) -> std::result::Result<T, String> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(e.to_string()),
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .map_or_else(|| "panic".to_string(), |s| format!("panic: {s}"))),
    }
}

fn measure(inst: &Instance, method: Method, opts: &ExperimentOptions, row: &mut ExperimentRow) -> Result<()> {
    let g = &inst.graph;
    let parts = &inst.parts;
    row.n = g.vertex_count();
    row.m = g.edge_count();
    row.parts = parts.len();
    row.parts_valid = validate_parts(g, parts.parts()).is_empty();
    let t = bfs_tree(g, opts.root)?;
    row.d_t = t.diameter();
    let cfg = ConstructorConfig { method, compression: opts.compression, seed: inst.spec.seed, verify_gates: false };
    let built = build_shortcut(g, inst.decomposition.as_ref(), &t, parts, &cfg)?;
    let q = QualityReport::measure(parts, &built.shortcut);
    row.route = built.report.method.map(|m| m.to_string()).unwrap_or_default();
    row.block = q.block;
    row.congestion = q.congestion;
    row.quality = q.quality;
    row.decomposition_depth = built.report.decomposition_depth;
    row.max_local_components = built.report.max_local_components;
    row.component_violations = built.report.component_violations;
    row.shortcut_valid = true;

    let mut decomposition_valid = true;
    if let Some(cst) = &inst.decomposition {
        decomposition_valid &= validate_cliquesum(g, cst).is_empty();
        if opts.compression {
            decomposition_valid &= validate_cliquesum(g, &compress_cliquesum(cst)).is_empty();
        }
    }
    if built.report.method == Some(Method::Treewidth) {
        decomposition_valid &= validate_decomposition(g, &tree_decomposition(g)?).is_empty();
    }
    row.decomposition_valid = decomposition_valid;

    if opts.oracle_bits > 0 && t.edge_count() * parts.len() <= opts.oracle_bits {
        row.optimal_quality = Some(brute_force_optimal(g, parts, &t)?.1.quality);
    }

    let sim = SimConfig { seed: inst.spec.seed, ..SimConfig::for_graph(g.vertex_count()) };
    let values: Vec<i64> = (0..g.vertex_count()).map(|v| (v as i64 * 7919) % 1009).collect();
    let agg = simulate_aggregate(g, parts, &built.shortcut, AggregateOp::Min, &values, &sim)?;
    row.aggregate_rounds = agg.stats.rounds_used;
    row.aggregate_correct = parts.parts().iter().enumerate().all(|(i, part)| {
        let direct = AggregateOp::Min.fold(part.iter().map(|&v| values[v]));
        direct == Some(agg.results[i]) && part.iter().all(|&v| agg.learned[v] == direct)
    });

    if opts.mst {
        let mut provider = |p: &_| build_shortcut(g, inst.decomposition.as_ref(), &t, p, &cfg).map(|b| b.shortcut);
        let mst = boruvka_mst(g, &mut provider, &sim)?;
        row.mst_rounds = Some(mst.stats.rounds_used);
        row.mst_weight = mst.weight.to_string();
        row.mst_matches_kruskal = Some(mst.edges == kruskal(g));
    }
    Ok(())
}

/// Writes rows as CSV with the fixed header. An empty slice yields the
/// header alone.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<ExperimentRow>, _>>()?;
    Ok(rows)
}
