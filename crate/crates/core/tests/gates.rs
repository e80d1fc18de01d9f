use std::collections::VecDeque;

use shortcuts_core::gates::{
    assign_cells, build_planar_gate, build_planar_gate_detailed, cells_from_apex_removal,
    check_relation, merge_vortex_cells, planar_gate, verify_gate, AssignOptions, CellPartition,
};
use shortcuts_core::graph::bfs_tree;
use shortcuts_core::harness::{generate, Family, FamilySpec};
use shortcuts_core::AnnotatedGraph;

/// Cells grown as BFS balls of `radius` over unassigned vertices, seeded at
/// the lowest unassigned vertex each time.
fn ball_cells(g: &AnnotatedGraph, radius: usize, skip: &[bool]) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut taken = skip.to_vec();
    let mut cells = Vec::new();
    for s in 0..n {
        if taken[s] {
            continue;
        }
        let mut cell = vec![s];
        taken[s] = true;
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

fn check_gate(g: &AnnotatedGraph, cp: &CellPartition) {
    let built = build_planar_gate_detailed(g, cp).expect("gate builds");
    let d = cp.diameter();
    assert_eq!(built.gate.s_param, 36 * (d + 1));
    let violations = verify_gate(g, cp, &built.gate);
    assert!(violations.is_empty(), "{violations:?}");
    for cycle in &built.cycles {
        assert!(cycle.len() <= 4 * d + 2, "cycle of length {} with d = {d}", cycle.len());
    }
    assert!(built.laminarity_violations().is_empty());
}

#[test]
fn grid_block_cells_get_valid_gates() {
    for k in [3, 5, 8, 12] {
        let inst = generate(&FamilySpec::new(Family::Grid, 0).with("k", k)).unwrap();
        for radius in 0..3 {
            let cells = ball_cells(&inst.graph, radius, &vec![false; inst.graph.vertex_count()]);
            let special = vec![false; cells.len()];
            let cp = CellPartition::new(&inst.graph, cells, special).unwrap();
            check_gate(&inst.graph, &cp);
        }
    }
}

#[test]
fn random_planar_cells_get_valid_gates() {
    for seed in 0..20 {
        let inst = generate(&FamilySpec::new(Family::RandomPlanar, seed).with("n", 60)).unwrap();
        for radius in 0..3 {
            let cells = ball_cells(&inst.graph, radius, &vec![false; inst.graph.vertex_count()]);
            let special = vec![false; cells.len()];
            let cp = CellPartition::new(&inst.graph, cells, special).unwrap();
            check_gate(&inst.graph, &cp);
        }
    }
}

#[test]
fn single_cell_has_no_pairs() {
    let inst = generate(&FamilySpec::new(Family::Grid, 0).with("k", 4)).unwrap();
    let cp = CellPartition::new(&inst.graph, vec![(0..16).collect()], vec![false]).unwrap();
    let gate = build_planar_gate(&inst.graph, &cp).unwrap();
    assert!(gate.pairs.is_empty());
    assert!(verify_gate(&inst.graph, &cp, &gate).is_empty());
}

#[test]
fn wheel_hub_removal_gives_singleton_cells() {
    let inst = generate(&FamilySpec::new(Family::Wheel, 0).with("n", 9)).unwrap();
    let t = bfs_tree(&inst.graph, 0).unwrap();
    let cp = cells_from_apex_removal(&inst.graph, &t, 0).unwrap();
    assert_eq!(cp.len(), 8);
    assert!(cp.cells().iter().all(|c| c.len() == 1));
}

#[test]
fn apex_leaf_gives_one_cell() {
    let inst = generate(&FamilySpec::new(Family::Wheel, 0).with("n", 9)).unwrap();
    let t = bfs_tree(&inst.graph, 1).unwrap();
    let leaf = (0..9).find(|&v| t.children(v).is_empty() && v != 0).unwrap();
    let cp = cells_from_apex_removal(&inst.graph, &t, leaf).unwrap();
    assert_eq!(cp.len(), 1);
    assert_eq!(cp.cell(0).len(), 8);
}

#[test]
fn apexed_grid_relation_is_sparse() {
    for seed in 0..10 {
        let spec = FamilySpec::new(Family::ApexedPlanar, seed).with("k", 6).with("attach", 5);
        let inst = generate(&spec).unwrap();
        let g = &inst.graph;
        let apex = g.apices()[0];
        let t = bfs_tree(g, apex).unwrap();
        let cp = cells_from_apex_removal(g, &t, apex).unwrap();
        let (h, map) = g.without_vertices(&(0..g.vertex_count()).map(|v| v == apex).collect::<Vec<_>>()).unwrap();
        let cells: Vec<Vec<usize>> =
            cp.cells().iter().map(|c| c.iter().map(|&v| map[v].unwrap()).collect()).collect();
        let hcp = CellPartition::new(&h, cells, vec![false; cp.len()]).unwrap();
        check_gate(&h, &hcp);
        let parts = shortcuts_core::shortcut::Partition::new(
            &h,
            inst.parts.parts().iter().map(|p| p.iter().filter_map(|&v| map[v]).collect()).collect(),
        )
        .unwrap();
        for verify_every_step in [false, true] {
            let rel = assign_cells(&h, &hcp, &parts, &planar_gate, AssignOptions { verify_every_step }).unwrap();
            assert!(check_relation(&hcp, &parts, &rel).is_empty());
        }
    }
}

#[test]
fn vortex_spanning_cells_merge_into_one_special_cell() {
    let spec = FamilySpec::new(Family::PlanarWithVortex, 3).with("k", 6).with("depth", 2).with("internals", 3);
    let inst = generate(&spec).unwrap();
    let g = &inst.graph;
    let cells = ball_cells(g, 1, &vec![false; g.vertex_count()]);
    let special = vec![false; cells.len()];
    let cp = CellPartition::new(g, cells, special).unwrap();
    let merged = merge_vortex_cells(g, &cp).unwrap();
    assert_eq!(merged.special_count(), 1);
    let gate = planar_gate(g, &merged).unwrap();
    let violations = verify_gate(g, &merged, &gate);
    assert!(violations.is_empty(), "{violations:?}");
}
