//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always show up in `cargo test` output.

use std::collections::VecDeque;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use shortcuts_core::construct::{apex_cells, build_shortcut, ConstructorConfig, Method};
use shortcuts_core::decomp::{compress_cliquesum, validate_cliquesum};
use shortcuts_core::gates::{
    assign_cells, build_planar_gate_detailed, check_relation, merge_vortex_cells, planar_gate, verify_gate,
    AssignOptions, CellPartition,
};
use shortcuts_core::graph::bfs_tree;
use shortcuts_core::harness::{
    calibrate, calibration_rows, default_corpus, generate, log2_ceil, oracle_corpus, run_experiment, write_csv,
    Calibration, ExperimentOptions, ExperimentRow, Family, FamilySpec, Instance, Ratios, ORACLE_BITS,
};
use shortcuts_core::io::ShortcutFile;
use shortcuts_core::shortcut::{Partition, Shortcut};
use shortcuts_core::sim::{boruvka_mst, SimConfig};
use shortcuts_core::AnnotatedGraph;

const CALIBRATION: &str = include_str!("../calibration.json");

const MIN_VALIDITY_INSTANCES: usize = 500;
const MAX_VALIDITY_N: usize = 2000;
const VALIDITY_BUDGET: Duration = Duration::from_secs(5 * 60);
const SCALING_BUDGET: Duration = Duration::from_secs(10 * 60);
const MAX_SCALING_SLOPE: f64 = 1.2;
const COMPRESSION_BAGS: [u64; 4] = [64, 256, 1024, 4096];
const MST_INSTANCES: usize = 200;
const WHEEL_SIZES: [u64; 4] = [64, 128, 256, 512];

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(name: &'static str, failures: &[String], detail: String) -> Outcome {
    let detail = match failures.first() {
        Some(first) => format!("{detail}; {} failures, first: {first}", failures.len()),
        None => detail,
    };
    Outcome { name, pass: failures.is_empty(), detail }
}

fn corpus_instances(seed: u64) -> Vec<Instance> {
    default_corpus(seed).iter().map(|s| generate(s).expect("corpus instance generates")).collect()
}

fn ball_cells(g: &AnnotatedGraph, radius: usize) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut taken = vec![false; n];
    let mut cells = Vec::new();
    for s in 0..n {
        if taken[s] {
            continue;
        }
        taken[s] = true;
        let mut cell = vec![s];
        let mut queue = VecDeque::from([(s, 0)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for &(w, _) in g.neighbors(v) {
                if !taken[w] {
                    taken[w] = true;
                    cell.push(w);
                    queue.push_back((w, d + 1));
                }
            }
        }
        cells.push(cell);
    }
    cells
}

/// Cell partitions to test on each corpus instance: BFS balls on plain
/// embedded graphs, the apex-route cells on the apex-free remainder
/// otherwise. Vortex instances get balls with the vortex cells merged.
fn cell_views(inst: &Instance) -> Vec<(AnnotatedGraph, CellPartition, Partition)> {
    let g = &inst.graph;
    if !g.apices().is_empty() {
        let t = bfs_tree(g, 0).unwrap();
        let cells = apex_cells(g, &t).unwrap();
        let parts = Partition::new(
            &cells.h,
            inst.parts
                .parts()
                .iter()
                .filter(|p| p.iter().all(|&v| cells.to_h[v].is_some()))
                .map(|p| p.iter().map(|&v| cells.to_h[v].unwrap()).collect())
                .collect(),
        )
        .unwrap();
        return vec![(cells.h, cells.cells, parts)];
    }
    if g.rotation().is_none() {
        return Vec::new();
    }
    [1, 2]
        .into_iter()
        .map(|radius| {
            let cells = ball_cells(g, radius);
            let special = vec![false; cells.len()];
            let cp = merge_vortex_cells(g, &CellPartition::new(g, cells, special).unwrap()).unwrap();
            (g.clone(), cp, inst.parts.clone())
        })
        .collect()
}

fn validity(rows: &[ExperimentRow], instances: usize, elapsed: Duration) -> Outcome {
    let mut failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.all_valid())
        .map(|r| format!("{} ({}): {}", r.instance, r.method, r.error))
        .collect();
    let max_n = rows.iter().map(|r| r.n).max().unwrap_or(0);
    if instances < MIN_VALIDITY_INSTANCES {
        failures.push(format!("only {instances} instances"));
    }
    if max_n > MAX_VALIDITY_N {
        failures.push(format!("instance with n = {max_n}"));
    }
    if elapsed > VALIDITY_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        "validity",
        &failures,
        format!("{} rows over {instances} instances, max n {max_n}, {:.1} s", rows.len(), elapsed.as_secs_f64()),
    )
}

fn gates(instances: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for inst in instances {
        for (g, cp, _) in cell_views(inst) {
            checked += 1;
            let label = inst.spec.label();
            let d = cp.diameter();
            if !g.vortices().is_empty() {
                match planar_gate(&g, &cp) {
                    Ok(gate) => failures.extend(verify_gate(&g, &cp, &gate).iter().map(|v| format!("{label}: {v}"))),
                    Err(e) => failures.push(format!("{label}: {e}")),
                }
                continue;
            }
            let built = match build_planar_gate_detailed(&g, &cp) {
                Ok(b) => b,
                Err(e) => {
                    failures.push(format!("{label}: {e}"));
                    continue;
                }
            };
            if built.gate.s_param != 36 * (d + 1) {
                failures.push(format!("{label}: s = {}", built.gate.s_param));
            }
            failures.extend(verify_gate(&g, &cp, &built.gate).iter().map(|v| format!("{label}: {v}")));
            if let Some(c) = built.cycles.iter().find(|c| c.len() > 4 * d + 2) {
                failures.push(format!("{label}: cycle of {} vertices with d = {d}", c.len()));
            }
            if let Some(p) = built.laminarity_violations().first() {
                failures.push(format!("{label}: regions {p:?} cross"));
            }
        }
    }
    outcome("gates", &failures, format!("{checked} cell partitions"))
}

fn relation(instances: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut max_degree_ratio: f64 = 0.0;
    for inst in instances {
        for (g, cp, parts) in cell_views(inst) {
            checked += 1;
            let label = inst.spec.label();
            match assign_cells(&g, &cp, &parts, &planar_gate, AssignOptions::default()) {
                Ok(rel) => {
                    let s = planar_gate(&g, &cp).unwrap().s_param;
                    if rel.beta != 2 * s * cp.special_count().max(1) {
                        failures.push(format!("{label}: beta {} with s = {s}", rel.beta));
                    }
                    let mut degree = vec![0usize; cp.len()];
                    for &(c, _) in &rel.pairs {
                        degree[c] += 1;
                    }
                    let top = degree.iter().copied().max().unwrap_or(0);
                    max_degree_ratio = max_degree_ratio.max(top as f64 / rel.beta as f64);
                    failures.extend(check_relation(&cp, &parts, &rel).into_iter().map(|v| format!("{label}: {v}")));
                }
                Err(e) => failures.push(format!("{label}: {e}")),
            }
        }
    }
    outcome(
        "relation",
        &failures,
        format!("{checked} relations, largest cell degree {:.3} of beta", max_degree_ratio),
    )
}

fn compression(cal: &Calibration) -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for bags in COMPRESSION_BAGS {
        let specs = [
            FamilySpec::new(Family::CliquesumChain, 0).with("bags", bags),
            FamilySpec::new(Family::CliquesumChain, 1).with("bags", bags).with("drop", 30),
            FamilySpec::new(Family::CliquesumTree, 0).with("bags", bags).with("caterpillar", 1),
            FamilySpec::new(Family::CliquesumTree, 1).with("bags", bags),
        ];
        for spec in specs {
            let inst = generate(&spec).unwrap();
            let cst = inst.decomposition.as_ref().unwrap();
            let compressed = compress_cliquesum(cst);
            let issues = validate_cliquesum(&inst.graph, &compressed);
            failures.extend(issues.into_iter().map(|v| format!("{}: {v}", spec.label())));
            let lg = log2_ceil(inst.graph.vertex_count());
            let ratio = compressed.height() as f64 / (lg * lg);
            worst = worst.max(ratio);
            if ratio > cal.depth_per_log2n {
                failures.push(format!(
                    "{}: height {} from {} exceeds {} log2(n)^2",
                    spec.label(),
                    compressed.height(),
                    cst.height(),
                    cal.depth_per_log2n
                ));
            }
        }
    }
    outcome(
        "compression",
        &failures,
        format!("up to {} bags, worst height/log2(n)^2 {worst:.4} <= {}", COMPRESSION_BAGS[3], cal.depth_per_log2n),
    )
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn quality_scaling() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut details = Vec::new();
    let series = [("grid", Family::Grid, 0), ("apexed", Family::ApexedPlanar, 1), ("apexed2", Family::ApexedPlanar, 2)];
    let opts = ExperimentOptions { mst: false, ..ExperimentOptions::default() };
    for (name, family, apices) in series {
        let mut block_pts = Vec::new();
        let mut cong_pts = Vec::new();
        for k in [4u64, 8, 16, 32] {
            let specs: Vec<FamilySpec> = (0..4)
                .map(|s| {
                    let spec = FamilySpec::new(family, s).with("k", k);
                    if apices > 0 {
                        spec.with("apices", apices)
                    } else {
                        spec
                    }
                })
                .collect();
            let rows = run_experiment(&specs, &[Method::Auto], 1, &opts);
            failures.extend(rows.iter().filter(|r| !r.all_valid()).map(|r| format!("{}: {}", r.instance, r.error)));
            let mean = |f: &dyn Fn(&ExperimentRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
            let d = mean(&|r| r.d_t.max(1) as f64);
            let lg = mean(&|r| log2_ceil(r.n));
            block_pts.push((d, mean(&|r| r.block.max(1) as f64)));
            cong_pts.push((d * lg * lg, mean(&|r| r.congestion.max(1) as f64)));
        }
        let (sb, sc) = (loglog_slope(&block_pts), loglog_slope(&cong_pts));
        if sb > MAX_SCALING_SLOPE {
            failures.push(format!("{name}: block slope {sb:.3}"));
        }
        if sc > MAX_SCALING_SLOPE {
            failures.push(format!("{name}: congestion slope {sc:.3}"));
        }
        details.push(format!("{name} block {sb:.3} congestion {sc:.3}"));
    }
    if start.elapsed() > SCALING_BUDGET {
        failures.push(format!("took {:?}", start.elapsed()));
    }
    outcome("quality-scaling", &failures, format!("slopes: {}", details.join(", ")))
}

fn oracle(cal: &Calibration) -> Outcome {
    let opts = ExperimentOptions { mst: false, oracle_bits: ORACLE_BITS, ..ExperimentOptions::default() };
    let rows = run_experiment(&oracle_corpus(0), &[Method::Auto, Method::Treewidth], 1, &opts);
    let mut failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.all_valid())
        .map(|r| format!("{} ({}): {}", r.instance, r.method, r.error))
        .collect();
    let bound = cal.oracle_ratio.unwrap_or(f64::NAN);
    let mut ratios = Vec::new();
    for r in &rows {
        let Some(opt) = r.optimal_quality else { continue };
        if r.quality < opt {
            failures.push(format!("{}: quality {} below optimum {opt}", r.instance, r.quality));
        }
        let ratio = Ratios::of(r).oracle_ratio.unwrap();
        if ratio.is_nan() || ratio > bound {
            failures.push(format!("{}: ratio {ratio:.3} above {bound}", r.instance));
        }
        ratios.push(ratio);
    }
    if ratios.is_empty() {
        failures.push("no instance small enough for the oracle".into());
    }
    ratios.sort_by(f64::total_cmp);
    let pick = |q: f64| ratios.get(((ratios.len() as f64 - 1.0) * q).round() as usize).copied().unwrap_or(0.0);
    outcome(
        "oracle",
        &failures,
        format!(
            "{} solved; quality/optimal min {:.3} median {:.3} p90 {:.3} max {:.3} (bound {bound})",
            ratios.len(),
            pick(0.0),
            pick(0.5),
            pick(0.9),
            pick(1.0)
        ),
    )
}

fn simulator() -> Outcome {
    let shapes: [(Family, &[(&str, u64)]); 8] = [
        (Family::Grid, &[("k", 8)]),
        (Family::Cycle, &[("n", 64), ("parts", 4)]),
        (Family::Wheel, &[("n", 64)]),
        (Family::RandomPlanar, &[("n", 128)]),
        (Family::ApexedPlanar, &[("k", 8)]),
        (Family::PlanarWithVortex, &[("k", 8)]),
        (Family::CliquesumChain, &[("bags", 32), ("drop", 30)]),
        (Family::CliquesumTree, &[("bags", 32)]),
    ];
    let specs: Vec<FamilySpec> = (0..MST_INSTANCES as u64)
        .map(|i| {
            let (family, params) = shapes[i as usize % shapes.len()];
            params.iter().fold(FamilySpec::new(family, 1000 + i), |s, &(k, v)| s.with(k, v)).with("weighted", 1)
        })
        .collect();
    let rows = run_experiment(&specs, &[Method::Auto], 1, &ExperimentOptions::default());
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.error.is_empty() || r.mst_matches_kruskal != Some(true) || !r.aggregate_correct)
        .map(|r| format!("{}: mst {:?} aggregate {} {}", r.instance, r.mst_matches_kruskal, r.aggregate_correct, r.error))
        .collect();
    outcome("simulator", &failures, format!("{} weighted MST instances match Kruskal", rows.len()))
}

fn round_bound(rows: &[ExperimentRow], cal: &Calibration) -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for r in rows.iter().filter(|r| r.error.is_empty()) {
        let ratio = Ratios::of(r).rounds_per_quality;
        worst = worst.max(ratio);
        if ratio > cal.rounds_per_quality {
            failures.push(format!("{} ({}): {} rounds, ratio {ratio:.3}", r.instance, r.method, r.aggregate_rounds));
        }
    }
    let mut wheel = Vec::new();
    for n in WHEEL_SIZES {
        let inst = generate(&FamilySpec::new(Family::Wheel, 7).with("n", n).with("weighted", 1)).unwrap();
        let g = &inst.graph;
        let t = bfs_tree(g, 0).unwrap();
        let cfg = SimConfig::for_graph(g.vertex_count());
        let ccfg = ConstructorConfig::default();
        let with = boruvka_mst(g, &mut |p| build_shortcut(g, None, &t, p, &ccfg).map(|b| b.shortcut), &cfg).unwrap();
        let flood = boruvka_mst(g, &mut |p| Ok(Shortcut::empty(t.clone(), p.len())), &cfg).unwrap();
        if with.stats.rounds_used >= flood.stats.rounds_used {
            failures.push(format!(
                "wheel n={n}: {} rounds with shortcuts, {} flooding",
                with.stats.rounds_used, flood.stats.rounds_used
            ));
        }
        wheel.push(format!("n={n} {}/{}", with.stats.rounds_used, flood.stats.rounds_used));
    }
    outcome(
        "round-bound",
        &failures,
        format!(
            "worst rounds/(b d + c + log n) {worst:.3} <= {}; wheel MST shortcut/flood rounds: {}",
            cal.rounds_per_quality,
            wheel.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    let specs: Vec<FamilySpec> = Family::ALL
        .iter()
        .map(|&f| FamilySpec::new(f, 5).with("weighted", 1))
        .collect();
    let shortcut_bytes = || -> Vec<String> {
        specs
            .iter()
            .map(|s| {
                let inst = generate(s).unwrap();
                let t = bfs_tree(&inst.graph, 0).unwrap();
                let built = build_shortcut(
                    &inst.graph,
                    inst.decomposition.as_ref(),
                    &t,
                    &inst.parts,
                    &ConstructorConfig::default(),
                )
                .unwrap();
                serde_json::to_string(&ShortcutFile::from_shortcut(&built.shortcut)).unwrap()
            })
            .collect()
    };
    if shortcut_bytes() != shortcut_bytes() {
        failures.push("shortcut files differ".into());
    }
    let csv_bytes = || {
        let rows = run_experiment(&specs, &Method::ALL, 2, &ExperimentOptions::default());
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        out
    };
    let first = csv_bytes();
    if first != csv_bytes() {
        failures.push("CSV output differs".into());
    }
    let inst = generate(&FamilySpec::new(Family::Grid, 3).with("k", 10).with("weighted", 1)).unwrap();
    let t = bfs_tree(&inst.graph, 0).unwrap();
    let cfg = SimConfig { trace: true, ..SimConfig::for_graph(inst.graph.vertex_count()) };
    let mst = || {
        boruvka_mst(
            &inst.graph,
            &mut |p| build_shortcut(&inst.graph, None, &t, p, &ConstructorConfig::default()).map(|b| b.shortcut),
            &cfg,
        )
        .unwrap()
    };
    let (a, b) = (mst(), mst());
    if a.stats != b.stats || a.trace != b.trace {
        failures.push("round counts or traces differ".into());
    }
    let refit = calibrate(&calibration_rows(0), None).map(|o| o.constants);
    let stored: Calibration = serde_json::from_str(CALIBRATION).unwrap();
    match refit {
        Ok(c) => {
            let text = serde_json::to_string_pretty(&c).unwrap() + "\n";
            if text != CALIBRATION || c != stored {
                failures.push("recomputed calibration differs from the stored file".into());
            }
        }
        Err(e) => failures.push(format!("calibration failed: {e}")),
    }
    outcome(
        "determinism",
        &failures,
        format!("shortcut files, {} CSV bytes, {} trace rows, calibration file", first.len(), a.trace.len()),
    )
}

fn main() -> ExitCode {
    let cal: Calibration = serde_json::from_str(CALIBRATION).expect("calibration.json parses");
    let start = Instant::now();
    let instances = corpus_instances(0);
    let opts = ExperimentOptions { mst: false, ..ExperimentOptions::default() };
    let specs: Vec<FamilySpec> = instances.iter().map(|i| i.spec.clone()).collect();
    let rows = run_experiment(&specs, &[Method::Auto, Method::Treewidth], 1, &opts);
    let validity_elapsed = start.elapsed();

    let auto_rows: Vec<ExperimentRow> = rows.iter().filter(|r| r.method == "auto").cloned().collect();
    let results = [
        validity(&rows, instances.len(), validity_elapsed),
        gates(&instances),
        relation(&instances),
        compression(&cal),
        quality_scaling(),
        oracle(&cal),
        simulator(),
        round_bound(&auto_rows, &cal),
        determinism(),
    ];
    let mut failed = 0;
    for r in &results {
        println!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
