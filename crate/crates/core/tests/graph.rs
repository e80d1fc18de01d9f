use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use shortcuts_core::graph::{
    bfs_tree, contract_outside, faces, heavy_light, path_contraction, repaired_tree, Embedding, Lca,
};
use shortcuts_core::harness::{generate, Family, FamilySpec};
use shortcuts_core::shortcut::validate_parts;
use shortcuts_core::{AnnotatedGraph, Edge, Error, RootedTree, Weight};

fn unit(n: usize, pairs: &[(usize, usize)]) -> AnnotatedGraph {
    AnnotatedGraph::new(n, pairs.iter().map(|&(u, v)| Edge::new(u, v, Weight::ONE)).collect()).unwrap()
}

fn tree_from_choices(choices: &[usize]) -> RootedTree {
    let n = choices.len() + 1;
    let mut parent = vec![None; n];
    for (i, &c) in choices.iter().enumerate() {
        parent[i + 1] = Some(c % (i + 1));
    }
    RootedTree::from_parents(0, parent).unwrap()
}

/// Longest path in a tree, by BFS from every vertex.
fn diameter_oracle(t: &RootedTree) -> usize {
    let n = t.host_size();
    let mut adj = vec![Vec::new(); n];
    for (c, p) in t.edges() {
        adj[c].push(p);
        adj[p].push(c);
    }
    let mut best = 0;
    for s in (0..n).filter(|&v| t.contains(v)) {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    best = best.max(dist[w]);
                    q.push_back(w);
                }
            }
        }
    }
    best
}

fn chain_changes(t: &RootedTree, chains: &[Vec<usize>]) -> usize {
    let mut chain_of = vec![0; t.host_size()];
    for (i, c) in chains.iter().enumerate() {
        for &v in c {
            chain_of[v] = i;
        }
    }
    (0..t.host_size())
        .filter(|&v| t.contains(v) && t.children(v).is_empty())
        .map(|leaf| {
            let mut seen = BTreeSet::new();
            let mut v = leaf;
            seen.insert(chain_of[v]);
            while let Some(p) = t.parent(v) {
                seen.insert(chain_of[p]);
                v = p;
            }
            seen.len()
        })
        .max()
        .unwrap_or(0)
}

#[test]
fn graph_rejects_loops_duplicates_and_disconnection() {
    let e = |u, v| Edge::new(u, v, Weight::ONE);
    assert_eq!(AnnotatedGraph::new(2, vec![e(0, 0)]).unwrap_err(), Error::SelfLoop(0));
    assert_eq!(AnnotatedGraph::new(2, vec![e(0, 1), e(1, 0)]).unwrap_err(), Error::DuplicateEdge(1, 0));
    assert_eq!(AnnotatedGraph::new(3, vec![e(0, 1)]).unwrap_err(), Error::Disconnected(2));
    assert!(matches!(AnnotatedGraph::new(0, vec![]), Err(Error::Empty(_))));
}

#[test]
fn bfs_tree_of_single_vertex() {
    let g = AnnotatedGraph::new(1, vec![]).unwrap();
    let t = bfs_tree(&g, 0).unwrap();
    assert_eq!(t.edge_count(), 0);
    assert_eq!(t.diameter(), 0);
}

#[test]
fn bfs_tree_of_path() {
    let g = unit(3, &[(0, 1), (1, 2)]);
    let t = bfs_tree(&g, 0).unwrap();
    assert_eq!(t.parent(1), Some(0));
    assert_eq!(t.parent(2), Some(1));
    assert_eq!(t.diameter(), 2);
}

#[test]
fn bfs_tree_of_grid_corner() {
    let inst = generate(&FamilySpec::new(Family::Grid, 0).with("k", 4)).unwrap();
    let t = bfs_tree(&inst.graph, 0).unwrap();
    assert_eq!(t.height(), 6);
    assert!(t.diameter() <= 12);
    assert_eq!(t.diameter(), diameter_oracle(&t));
    assert!(t.edges().iter().all(|&(c, p)| inst.graph.has_edge(c, p)));
}

#[test]
fn bfs_tree_rejects_bad_root() {
    let g = unit(2, &[(0, 1)]);
    assert_eq!(bfs_tree(&g, 5).unwrap_err(), Error::VertexOutOfRange(5));
}

#[test]
fn heavy_light_examples() {
    let path = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    assert_eq!(heavy_light(&bfs_tree(&path, 0).unwrap()), vec![vec![0, 1, 2, 3, 4]]);

    let star = unit(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
    let chains = heavy_light(&bfs_tree(&star, 0).unwrap());
    assert_eq!(chains, vec![vec![0, 1], vec![2], vec![3], vec![4]]);

    let binary = unit(15, &(1..15).map(|v| ((v - 1) / 2, v)).collect::<Vec<_>>());
    let t = bfs_tree(&binary, 0).unwrap();
    assert!(chain_changes(&t, &heavy_light(&t)) <= 4);
}

#[test]
fn lca_and_distance() {
    let binary = unit(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]);
    let t = bfs_tree(&binary, 0).unwrap();
    let lca = Lca::new(&t);
    assert_eq!(lca.lca(3, 4), 1);
    assert_eq!(lca.lca(3, 6), 0);
    assert_eq!(lca.distance(3, 6), 4);
    assert_eq!(t.path(3, 6), vec![3, 1, 0, 2, 6]);
}

#[test]
fn path_contraction_examples() {
    let g = unit(4, &[(0, 1), (1, 2), (2, 3)]);
    let t = bfs_tree(&g, 0).unwrap();
    let all = vec![true; 4];
    assert_eq!(path_contraction(&t, &all, 2, 2).unwrap(), vec![2]);
    assert_eq!(path_contraction(&t, &all, 0, 3).unwrap(), vec![0, 1, 2, 3]);
    let ends = vec![true, false, false, true];
    assert_eq!(path_contraction(&t, &ends, 0, 3).unwrap(), vec![0, 3]);
    assert_eq!(path_contraction(&t, &ends, 0, 1).unwrap_err(), Error::NotInKeep(1));
}

#[test]
fn contract_outside_identity() {
    let inst = generate(&FamilySpec::new(Family::Grid, 0).with("k", 3)).unwrap();
    let g = &inst.graph;
    let con = contract_outside(g, &[true; 9], inst.parts.labels()).unwrap();
    assert_eq!(con.graph, *g);
    assert_eq!(con.to_new, (0..9).collect::<Vec<_>>());
}

#[test]
fn contract_outside_triangle() {
    let g = unit(3, &[(0, 1), (1, 2), (0, 2)]);
    let con = contract_outside(&g, &[true, false, false], &[None, Some(0), Some(0)]).unwrap();
    assert_eq!(con.graph.vertex_count(), 1);
    assert_eq!(con.graph.edge_count(), 0);
    assert_eq!(con.to_new, vec![0, 0, 0]);
}

#[test]
fn contract_outside_grid_cell_keeps_parts_connected() {
    let spec = FamilySpec::new(Family::Grid, 0).with("k", 5).with("seg", 12);
    let inst = generate(&spec).unwrap();
    let g = &inst.graph;
    assert_eq!(inst.parts.len(), 3);
    let t = bfs_tree(g, 12).unwrap();
    let cell_root = t.children(12)[0];
    let keep: Vec<bool> = (0..25).map(|v| t.is_ancestor(cell_root, v)).collect();
    let con = contract_outside(g, &keep, inst.parts.labels()).unwrap();
    let surviving: Vec<Vec<usize>> = inst
        .parts
        .parts()
        .iter()
        .map(|p| p.iter().filter(|&&v| keep[v]).map(|&v| con.to_new[v]).collect::<Vec<_>>())
        .filter(|p| !p.is_empty())
        .collect();
    assert!(validate_parts(&con.graph, &surviving).is_empty());
}

#[test]
fn faces_examples() {
    let tri = AnnotatedGraph::from_parts(
        3,
        vec![Edge::new(0, 1, Weight::ONE), Edge::new(1, 2, Weight::ONE), Edge::new(2, 0, Weight::ONE)],
        Some(vec![vec![0, 2], vec![1, 0], vec![2, 1]]),
        vec![],
        vec![],
    )
    .unwrap();
    let f = faces(&tri).unwrap();
    assert_eq!(f.len(), 2);
    assert!(f.iter().all(|face| face.len() == 3));

    let edge = AnnotatedGraph::from_parts(2, vec![Edge::new(0, 1, Weight::ONE)], Some(vec![vec![0], vec![0]]), vec![], vec![])
        .unwrap();
    let f = faces(&edge).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].len(), 2);

    let grid = generate(&FamilySpec::new(Family::Grid, 0).with("k", 3)).unwrap().graph;
    let f = faces(&grid).unwrap();
    assert_eq!(f.len(), 5);
    Embedding::new(&grid).unwrap().check_euler(&grid).unwrap();
}

#[test]
fn faces_need_a_rotation() {
    let g = unit(2, &[(0, 1)]);
    assert_eq!(faces(&g).unwrap_err(), Error::MissingRotation);
}

#[test]
fn repaired_tree_of_star_without_centre() {
    let star = unit(4, &[(0, 1), (0, 2), (0, 3)]);
    let t = bfs_tree(&star, 0).unwrap();
    let r = repaired_tree(&t, &[false, true, true, true]).unwrap();
    assert_eq!(r.root(), 1);
    assert_eq!(r.edges(), vec![(2, 1), (3, 1)]);
    assert!(matches!(repaired_tree(&t, &[false; 4]), Err(Error::Empty(_))));
}

proptest! {
    #[test]
    fn heavy_light_chain_bound(choices in prop::collection::vec(any::<usize>(), 0..4095)) {
        let t = tree_from_choices(&choices);
        let chains = heavy_light(&t);
        let n = t.vertex_count();
        let covered: usize = chains.iter().map(Vec::len).sum();
        prop_assert_eq!(covered, n);
        let bound = (usize::BITS - 1 - n.leading_zeros()) as usize + 1;
        prop_assert!(chain_changes(&t, &chains) <= bound);
    }

    #[test]
    fn tree_diameter_matches_oracle(choices in prop::collection::vec(any::<usize>(), 0..60)) {
        let t = tree_from_choices(&choices);
        prop_assert_eq!(t.diameter(), diameter_oracle(&t));
    }

    #[test]
    fn path_contraction_is_a_subsequence(
        choices in prop::collection::vec(any::<usize>(), 1..60),
        keep_bits in prop::collection::vec(any::<bool>(), 61),
        a in any::<usize>(),
        b in any::<usize>(),
    ) {
        let t = tree_from_choices(&choices);
        let n = t.vertex_count();
        let (s, e) = (a % n, b % n);
        let mut keep = keep_bits[..n].to_vec();
        keep[s] = true;
        keep[e] = true;
        let out = path_contraction(&t, &keep, s, e).unwrap();
        let full = t.path(s, e);
        prop_assert_eq!(out.first(), Some(&s));
        prop_assert_eq!(out.last(), Some(&e));
        let mut it = full.iter();
        prop_assert!(out.iter().all(|v| it.any(|w| w == v)));
        prop_assert!(out.iter().all(|&v| keep[v]));
        prop_assert_eq!(out.len(), full.iter().filter(|&&v| keep[v]).count());
    }

    #[test]
    fn repaired_tree_is_a_minor(
        choices in prop::collection::vec(any::<usize>(), 1..60),
        keep_bits in prop::collection::vec(any::<bool>(), 61),
    ) {
        let t = tree_from_choices(&choices);
        let n = t.vertex_count();
        let keep = keep_bits[..n].to_vec();
        prop_assume!(keep.iter().any(|&k| k));
        let r = repaired_tree(&t, &keep).unwrap();
        prop_assert_eq!(r.vertex_count(), keep.iter().filter(|&&k| k).count());
        for (c, p) in r.edges() {
            let path = t.path(c, p);
            prop_assert!(path[1..path.len() - 1].iter().all(|&v| !keep[v]));
        }
    }

    #[test]
    fn contract_outside_preserves_parts(
        k in 2usize..7,
        seed in any::<u64>(),
        keep_bits in prop::collection::vec(any::<bool>(), 49),
    ) {
        let inst = generate(&FamilySpec::new(Family::Grid, seed).with("k", k as u64).with("seg", 3)).unwrap();
        let g = &inst.graph;
        let n = g.vertex_count();
        let keep = keep_bits[..n].to_vec();
        prop_assume!(keep.iter().any(|&k| k));
        let con = contract_outside(g, &keep, inst.parts.labels()).unwrap();
        prop_assert_eq!(con.graph.vertex_count(), keep.iter().filter(|&&k| k).count());
        for v in 0..n {
            if keep[v] {
                prop_assert_eq!(con.to_old[con.to_new[v]], v);
            }
        }
        let surviving: Vec<Vec<usize>> = inst
            .parts
            .parts()
            .iter()
            .map(|p| p.iter().filter(|&&v| keep[v]).map(|&v| con.to_new[v]).collect::<Vec<_>>())
            .filter(|p| !p.is_empty())
            .collect();
        prop_assert!(validate_parts(&con.graph, &surviving).is_empty());
    }

    #[test]
    fn faces_satisfy_euler(n in 3u64..200, seed in any::<u64>()) {
        let g = generate(&FamilySpec::new(Family::RandomPlanar, seed).with("n", n)).unwrap().graph;
        let f = faces(&g).unwrap();
        prop_assert_eq!(g.vertex_count() + f.len(), g.edge_count() + 2);
        prop_assert_eq!(f.iter().map(Vec::len).sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn bfs_tree_edges_are_graph_edges(n in 3u64..150, seed in any::<u64>(), root in any::<usize>()) {
        let g = generate(&FamilySpec::new(Family::RandomPlanar, seed).with("n", n)).unwrap().graph;
        let root = root % g.vertex_count();
        let t = bfs_tree(&g, root).unwrap();
        let dist = g.bfs_distances(root);
        prop_assert!(t.edges().iter().all(|&(c, p)| g.has_edge(c, p)));
        prop_assert!((0..g.vertex_count()).all(|v| Some(t.depth(v)) == dist[v]));
        prop_assert!(t.diameter() <= 2 * t.height());
    }
}
