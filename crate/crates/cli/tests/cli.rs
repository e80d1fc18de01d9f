use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shortcuts")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates an instance into `dir` and returns (graph, parts) paths.
fn gen(dir: &TempDir, family: &str, params: &[&str]) -> (PathBuf, PathBuf) {
    let graph = dir.path().join(format!("{family}.json"));
    let mut args = vec!["gen", "--family", family, "--out", s(&graph)];
    for p in params {
        args.extend(["--param", p]);
    }
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parts = dir.path().join(format!("{family}.parts.json"));
    assert!(parts.exists());
    (graph, parts)
}

#[test]
fn gen_writes_graph_and_parts() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = gen(&dir, "wheel", &["n=9"]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(graph).unwrap()).unwrap();
    assert_eq!(file["n"], 9);
    assert_eq!(file["edges"].as_array().unwrap().len(), 16);
}

#[test]
fn build_then_verify() {
    let dir = TempDir::new().unwrap();
    let (graph, parts) = gen(&dir, "grid", &["k=6", "weighted=1"]);
    let sc = dir.path().join("h.json");
    let out = run(&["build", "--graph", s(&graph), "--parts", s(&parts), "--tree", "bfs:0", "--out", s(&sc)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert!(v["quality"]["quality"].as_u64().unwrap() > 0);

    let out = run(&["verify", "--graph", s(&graph), "--parts", s(&parts), "--shortcut", s(&sc)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn build_with_tree_file_and_decomposition() {
    let dir = TempDir::new().unwrap();
    let (graph, parts) = gen(&dir, "cliquesum_chain", &["bags=16"]);
    let tree = dir.path().join("t.json");
    std::fs::write(&tree, r#"{"root":0,"edges":[]}"#).unwrap();
    let sc = dir.path().join("h.json");
    let bad = run(&["build", "--graph", s(&graph), "--parts", s(&parts), "--tree", &format!("file:{}", s(&tree)), "--out", s(&sc)]);
    assert_eq!(bad.status.code(), Some(2));

    let out = run(&["build", "--method", "cliquesum", "--graph", s(&graph), "--parts", s(&parts), "--out", s(&sc)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "--graph", s(&graph), "--shortcut", s(&sc), "--parts", s(&parts)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reports_bad_parts() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = gen(&dir, "cycle", &["n=8"]);
    let parts = dir.path().join("bad.json");
    std::fs::write(&parts, r#"{"parts":[[0,2]]}"#).unwrap();
    let out = run(&["verify", "--graph", s(&graph), "--parts", s(&parts)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn verify_dumps_gate() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = gen(&dir, "apexed_planar", &["k=6"]);
    let gate = dir.path().join("gate.json");
    let out = run(&["verify", "--graph", s(&graph), "--gate-out", s(&gate)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(gate.exists());
}

#[test]
fn sim_aggregate_and_mst() {
    let dir = TempDir::new().unwrap();
    let (graph, parts) = gen(&dir, "random_planar", &["n=64", "weighted=1"]);
    let sc = dir.path().join("h.json");
    assert!(run(&["build", "--graph", s(&graph), "--parts", s(&parts), "--out", s(&sc)]).status.success());
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "sim", "aggregate", "--graph", s(&graph), "--parts", s(&parts), "--shortcut", s(&sc), "--op", "sum", "--trace",
        s(&trace),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["correct"], true);
    assert!(std::fs::read_to_string(&trace).unwrap().lines().count() > 1);

    let mst = run(&["sim", "mst", "--graph", s(&graph)]);
    assert_eq!(mst.status.code(), Some(0), "{}", String::from_utf8_lossy(&mst.stderr));
    let v = json(&mst);
    assert_eq!(v["matches_kruskal"], true);
    assert_eq!(v["edges"], 63);
    let flood = json(&run(&["sim", "mst", "--graph", s(&graph), "--flood", "--phase-surcharge", "5"]));
    assert_eq!(flood["weight"], v["weight"]);
    assert_eq!(
        flood["rounds"].as_u64().unwrap(),
        flood["simulated_rounds"].as_u64().unwrap() + 5 * flood["phases"].as_u64().unwrap()
    );
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("rows.csv");
    let out = run(&[
        "bench", "--family", "grid", "--param", "k=5", "--param", "weighted=1", "--methods", "auto,treewidth", "--trials",
        "2", "--csv", s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("instance,family,seed,trial,method"));

    let again = dir.path().join("again.csv");
    run(&["bench", "--family", "grid", "--param", "k=5", "--param", "weighted=1", "--methods", "auto,treewidth", "--trials", "2", "--csv", s(&again)]);
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());

    let cal = dir.path().join("cal.json");
    let out = run(&["calibrate", "--csv", s(&csv), "--out", s(&cal)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["constants"]["block_per_d"].as_f64().unwrap() > 0.0);

    let tight = dir.path().join("tight.json");
    let mut stored: Value = serde_json::from_str(&std::fs::read_to_string(&cal).unwrap()).unwrap();
    stored["block_per_d"] = 0.0.into();
    std::fs::write(&tight, stored.to_string()).unwrap();
    let out = run(&["calibrate", "--csv", s(&csv), "--stored", s(&tight), "--out", s(&cal)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["regressions"].as_array().unwrap().len(), 1);
}

#[test]
fn bad_input_exits_with_two() {
    let out = run(&["verify", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = run(&["gen", "--family", "hexagon", "--out", "/tmp/x.json"]);
    assert_eq!(out.status.code(), Some(2));
}
