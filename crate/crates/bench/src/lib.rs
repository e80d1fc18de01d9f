//! Fixtures shared by the benchmarks under `benches/`.

use shortcuts_core::graph::bfs_tree;
use shortcuts_core::harness::{generate, Family, FamilySpec, Instance};
use shortcuts_core::RootedTree;

/// A generated instance with its BFS tree from vertex 0.
pub struct Fixture {
    pub label: String,
    pub instance: Instance,
    pub tree: RootedTree,
}

pub fn fixture(family: Family, params: &[(&str, u64)]) -> Fixture {
    let mut spec = FamilySpec::new(family, 0).with("weighted", 1);
    for &(k, v) in params {
        spec = spec.with(k, v);
    }
    let instance = generate(&spec).expect("benchmark instance generates");
    let tree = bfs_tree(&instance.graph, 0).expect("generated graphs are connected");
    Fixture { label: spec.label(), instance, tree }
}
