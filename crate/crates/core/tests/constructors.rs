use shortcuts_core::construct::{
    apex_shortcut, build_shortcut, cliquesum_shortcut, treewidth_shortcut, ConstructorConfig,
    LocalConstructor, Method,
};
use shortcuts_core::decomp::{
    compress_cliquesum, elimination_decomposition, planar_tree_decomposition, CliqueSumTree, SumEdge,
    TreeDecomposition,
};
use shortcuts_core::gates::AssignOptions;
use shortcuts_core::graph::{bfs_tree, RootedTree};
use shortcuts_core::harness::{generate, Family, FamilySpec};
use shortcuts_core::shortcut::{block, block_per_part, congestion, validate_shortcut, Partition};
use shortcuts_core::{AnnotatedGraph, Edge, Weight};

fn graph(n: usize, pairs: &[(usize, usize)]) -> AnnotatedGraph {
    AnnotatedGraph::new(n, pairs.iter().map(|&(u, v)| Edge::new(u, v, Weight::integer(1))).collect()).unwrap()
}

#[test]
fn single_bag_gives_pure_local_shortcut() {
    let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let cst = CliqueSumTree::new(vec![vec![0, 1, 2, 3]], Vec::new(), 0, 1).unwrap();
    let t = bfs_tree(&g, 0).unwrap();
    let parts = Partition::new(&g, vec![vec![0, 1, 2, 3]]).unwrap();
    let (s, _) = cliquesum_shortcut(&g, &cst, &t, &parts, LocalConstructor::Empty).unwrap();
    assert_eq!(s.total_edges(), 0);
    let (s, _) = cliquesum_shortcut(&g, &cst, &t, &parts, LocalConstructor::Treewidth { compress: true }).unwrap();
    assert!(validate_shortcut(&g, &parts, &s).is_empty());
}

#[test]
fn two_triangles_share_child_edges_globally() {
    // Triangles {0,1,2} and {1,2,3} glued along {1,2}; spanning path 0-1-2-3
    // rooted at 0; one part holds everything.
    let g = graph(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
    let cst = CliqueSumTree::new(
        vec![vec![0, 1, 2], vec![1, 2, 3]],
        vec![(0, 1, SumEdge::single(vec![1, 2]))],
        0,
        2,
    )
    .unwrap();
    let t = RootedTree::from_edges(4, 0, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let parts = Partition::new(&g, vec![vec![0, 1, 2, 3]]).unwrap();
    let (s, report) = cliquesum_shortcut(&g, &cst, &t, &parts, LocalConstructor::Empty).unwrap();
    // Edge 2-3 has its top bag below the root bag; edges 0-1 and 1-2 sit in the root bag.
    assert_eq!(s.edge_set(0), &[3]);
    let c_local = 0;
    assert!(congestion(&s) <= cst.k() * report.decomposition_depth + c_local);
}

#[test]
fn treewidth_route_on_a_tree_keeps_blocks_small() {
    let g = graph(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]);
    let td = elimination_decomposition(&g);
    assert_eq!(td.width(), 1);
    let t = bfs_tree(&g, 0).unwrap();
    let parts = Partition::new(&g, vec![vec![0, 1, 3, 4], vec![2, 5, 6]]).unwrap();
    for compress in [false, true] {
        let (s, _) = treewidth_shortcut(&g, &td, &t, &parts, compress).unwrap();
        assert!(validate_shortcut(&g, &parts, &s).is_empty());
        assert!(block_per_part(&parts, &s).iter().all(|&b| b <= 4));
    }
}

#[test]
fn single_bag_treewidth_route_has_empty_shortcut() {
    let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    let td = TreeDecomposition::new(vec![(0..5).collect()], Vec::new()).unwrap();
    let t = bfs_tree(&g, 0).unwrap();
    let parts = Partition::new(&g, vec![(0..5).collect()]).unwrap();
    let (s, _) = treewidth_shortcut(&g, &td, &t, &parts, true).unwrap();
    assert_eq!(s.total_edges(), 0);
    assert!(block(&parts, &s) <= td.width() + 1);
}

#[test]
fn grid_treewidth_route_is_valid() {
    let inst = generate(&FamilySpec::new(Family::Grid, 1).with("k", 8)).unwrap();
    let td = planar_tree_decomposition(&inst.graph).unwrap();
    let t = bfs_tree(&inst.graph, 0).unwrap();
    let (s, _) = treewidth_shortcut(&inst.graph, &td, &t, &inst.parts, true).unwrap();
    assert!(validate_shortcut(&inst.graph, &inst.parts, &s).is_empty());
    assert!(block(&inst.parts, &s) <= 2 * (td.width() + 1));
}

#[test]
fn wheel_rim_gets_the_spokes() {
    let inst = generate(&FamilySpec::new(Family::Wheel, 0).with("n", 9)).unwrap();
    let t = bfs_tree(&inst.graph, 0).unwrap();
    let (s, report) =
        apex_shortcut(&inst.graph, &t, &inst.parts, true, AssignOptions::default()).unwrap();
    assert_eq!(report.cells, 8);
    assert_eq!(report.relation_pairs, 8);
    let mut spokes: Vec<usize> = (1..9).collect();
    spokes.sort_unstable();
    assert_eq!(s.edge_set(0), spokes.as_slice());
    assert_eq!(block(&inst.parts, &s), 1);
    assert!(congestion(&s) <= 2);
}

#[test]
fn leaf_apex_uses_local_shortcuts_only() {
    let inst = generate(&FamilySpec::new(Family::Wheel, 0).with("n", 9)).unwrap();
    let g = &inst.graph;
    // Rim path 1..8 with the hub hanging off vertex 1.
    let mut edges: Vec<(usize, usize)> = (1..8).map(|v| (v, v + 1)).collect();
    edges.push((0, 1));
    let t = RootedTree::from_edges(9, 1, &edges).unwrap();
    let (s, report) = apex_shortcut(g, &t, &inst.parts, true, AssignOptions::default()).unwrap();
    assert_eq!(report.cells, 1);
    assert_eq!(report.relation_pairs, 0);
    assert!(validate_shortcut(g, &inst.parts, &s).is_empty());
    assert!(!s.edge_set(0).contains(&0), "the uplink is only used by related cells");
}

#[test]
fn apexed_grid_with_two_apices() {
    for seed in 0..4 {
        let spec = FamilySpec::new(Family::ApexedPlanar, seed).with("k", 10).with("apices", 2).with("attach", 10);
        let inst = generate(&spec).unwrap();
        let t = bfs_tree(&inst.graph, inst.graph.apices()[0]).unwrap();
        let (s, _) = apex_shortcut(&inst.graph, &t, &inst.parts, true, AssignOptions::default()).unwrap();
        assert!(validate_shortcut(&inst.graph, &inst.parts, &s).is_empty());
        let d = t.diameter();
        assert!(block(&inst.parts, &s) <= 4 * d, "block {} d {d}", block(&inst.parts, &s));
    }
}

#[test]
fn auto_dispatch_covers_every_family() {
    for family in Family::ALL {
        for seed in 0..5 {
            let inst = generate(&FamilySpec::new(family, seed)).unwrap();
            let t = bfs_tree(&inst.graph, 0).unwrap();
            let built = build_shortcut(
                &inst.graph,
                inst.decomposition.as_ref(),
                &t,
                &inst.parts,
                &ConstructorConfig::default(),
            )
            .unwrap_or_else(|e| panic!("{family} seed {seed}: {e}"));
            let expected = if !inst.graph.apices().is_empty() {
                Method::Apex
            } else if inst.decomposition.is_some() {
                Method::Cliquesum
            } else {
                Method::Treewidth
            };
            assert_eq!(built.report.method, Some(expected));
        }
    }
}

#[test]
fn compressed_chain_stays_within_bounds() {
    let inst = generate(&FamilySpec::new(Family::CliquesumChain, 0).with("bags", 64)).unwrap();
    let cst = compress_cliquesum(inst.decomposition.as_ref().unwrap());
    let t = bfs_tree(&inst.graph, 0).unwrap();
    let (s, report) = cliquesum_shortcut(&inst.graph, &cst, &t, &inst.parts, LocalConstructor::Empty).unwrap();
    assert!(validate_shortcut(&inst.graph, &inst.parts, &s).is_empty());
    assert!(congestion(&s) <= 2 * cst.k() * report.decomposition_depth);
    assert_eq!(report.component_violations, 0);
}
