use std::collections::{BTreeMap, BTreeSet};

use crate::decomp::{
    compress_cliquesum, elimination_decomposition, td_to_cliquesum, validate_cliquesum,
    validate_decomposition, CliqueSumTree, TreeDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::{repaired_tree, AnnotatedGraph, Edge, RootedTree};
use crate::shortcut::{Dsu, Partition, Shortcut};
use crate::weight::Weight;

use super::{check_spanning, tree_edge_name, BuildReport, Method};

/// Shortcut built inside the top bag of each part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalConstructor {
    /// No local edges: a part keeps one block per vertex of its top bag.
    Empty,
    /// Treewidth route on the bag with its partial cliques completed.
    Treewidth { compress: bool },
}

/// Parts that stay split inside one bag beyond this count are reported.
pub const LOCAL_COMPONENT_LIMIT: usize = 5;

/// Tree-restricted shortcut from a clique-sum decomposition tree.
///
/// Each part `P` has a top bag `h` (the shallowest bag meeting `P`). For
/// every child bag `i` of `h` whose shared clique meets `P`, the part gets
/// every edge of `t` whose own top bag lies below `i`. Inside `h` the part
/// gets a local shortcut built on the minor of `t` on the bag, restricted
/// back to real `t` edges outside the clique shared with the parent bag.
pub fn cliquesum_shortcut(
    g: &AnnotatedGraph,
    cst: &CliqueSumTree,
    t: &RootedTree,
    parts: &Partition,
    local: LocalConstructor,
) -> Result<(Shortcut, BuildReport)> {
    check_spanning(g, t)?;
    if let Some(issue) = validate_cliquesum(g, cst).into_iter().next() {
        return Err(Error::InvalidDecomposition(issue));
    }
    let n = g.vertex_count();
    let shape = cst.shape();
    let mut bags_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, bag) in cst.bags().iter().enumerate() {
        for &v in bag {
            bags_of[v].push(b);
        }
    }
    let top_of = |u: usize, v: usize| -> Option<usize> {
        let (a, b) = (&bags_of[u], &bags_of[v]);
        let (mut i, mut j) = (0, 0);
        let mut best: Option<usize> = None;
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if best.is_none_or(|x| cst.depth(a[i]) < cst.depth(x)) {
                        best = Some(a[i]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        best
    };
    let mut by_top = Vec::with_capacity(n);
    for (c, p) in t.edges() {
        let h = top_of(c, p).ok_or_else(|| {
            Error::InvalidDecomposition(format!("tree edge {c}-{p} lies in no bag"))
        })?;
        by_top.push((shape.tin(h), c));
    }
    by_top.sort_unstable();

    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); parts.len()];
    let mut homes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, part) in parts.parts().iter().enumerate() {
        let meets = || part.iter().flat_map(|&v| bags_of[v].iter().copied());
        let h = meets().min_by_key(|&b| (cst.depth(b), b)).expect("parts are non-empty");
        if let Some(b) = meets().find(|&b| !shape.is_ancestor(h, b)) {
            return Err(Error::InvalidDecomposition(format!(
                "bags meeting part {i} are not connected (bag {b} is outside the subtree of {h})"
            )));
        }
        homes.entry(h).or_default().push(i);
        for &child in cst.children(h) {
            let clique = &cst.up_edge(child).expect("child has an up edge").clique;
            if clique.iter().any(|&v| parts.part_of(v) == Some(i)) {
                let lo = by_top.partition_point(|&(tin, _)| tin < shape.tin(child));
                let hi = by_top.partition_point(|&(tin, _)| tin < shape.tout(child));
                sets[i].extend(by_top[lo..hi].iter().map(|&(_, c)| c));
            }
        }
    }

    let mut report = BuildReport {
        method: Some(Method::Cliquesum),
        decomposition_depth: cst.height(),
        decomposition_width: cst.k(),
        ..BuildReport::default()
    };
    if let LocalConstructor::Treewidth { compress } = local {
        for (&h, members) in &homes {
            local_in_bag(g, cst, t, parts, h, members, compress, &mut sets, &mut report)?;
        }
    }
    Ok((Shortcut::new(t.clone(), sets)?, report))
}

/// Adds the local shortcut of bag `h` for the parts whose top bag is `h`.
#[allow(clippy::too_many_arguments)]
fn local_in_bag(
    g: &AnnotatedGraph,
    cst: &CliqueSumTree,
    t: &RootedTree,
    parts: &Partition,
    h: usize,
    members: &[usize],
    compress: bool,
    sets: &mut [Vec<usize>],
    report: &mut BuildReport,
) -> Result<()> {
    let bag = cst.bag(h);
    let local = |v: usize| bag.binary_search(&v).ok();
    let mut keep = vec![false; g.vertex_count()];
    for &v in bag {
        keep[v] = true;
    }

    // The bag with every incident partial clique completed.
    let mut base: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, &v) in bag.iter().enumerate() {
        for &(w, _) in g.neighbors(v) {
            if let Some(b) = local(w) {
                if a < b {
                    base.insert((a, b));
                }
            }
        }
    }
    let incident = cst.up_edge(h).into_iter().chain(cst.children(h).iter().filter_map(|&c| cst.up_edge(c)));
    for edge in incident {
        for clique in &edge.cliques {
            let ids: Vec<usize> = clique.iter().filter_map(|&v| local(v)).collect();
            for (x, &a) in ids.iter().enumerate() {
                for &b in &ids[x + 1..] {
                    base.insert((a.min(b), a.max(b)));
                }
            }
        }
    }

    let minor = repaired_tree(t, &keep)?;
    let mut edges = base.clone();
    let mut tree_edges = Vec::new();
    for (c, p) in minor.edges() {
        let (a, b) = (local(c).unwrap(), local(p).unwrap());
        edges.insert((a.min(b), a.max(b)));
        tree_edges.push((a, b));
    }

    let mut local_parts = Vec::new();
    let mut owner = Vec::new();
    let mut dsu = Dsu::new(bag.len());
    for &i in members {
        let inside: Vec<usize> = (0..bag.len()).filter(|&a| parts.part_of(bag[a]) == Some(i)).collect();
        for &(a, b) in &base {
            if parts.part_of(bag[a]) == Some(i) && parts.part_of(bag[b]) == Some(i) {
                dsu.union(a, b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &a in &inside {
            groups.entry(dsu.find(a)).or_default().push(a);
        }
        for &a in &inside {
            dsu.reset(a);
        }
        report.max_local_components = report.max_local_components.max(groups.len());
        if groups.len() > LOCAL_COMPONENT_LIMIT {
            report.component_violations += 1;
        }
        for group in groups.into_values() {
            local_parts.push(group);
            owner.push(i);
        }
    }

    let lg = AnnotatedGraph::new(
        bag.len(),
        edges.iter().map(|&(a, b)| Edge::new(a, b, Weight::integer(1))).collect(),
    )?;
    let ltree = RootedTree::from_edges(bag.len(), local(minor.root()).unwrap(), &tree_edges)?;
    let lparts = Partition::new(&lg, local_parts)?;
    let td = elimination_decomposition(&lg);
    let (ls, _) = treewidth_shortcut(&lg, &td, &ltree, &lparts, compress)?;

    let shared: &[usize] = cst.up_edge(h).map(|e| e.clique.as_slice()).unwrap_or(&[]);
    for (j, &i) in owner.iter().enumerate() {
        for &c in ls.edge_set(j) {
            let p = ltree.parent(c).expect("named edges have a parent");
            let (u, v) = (bag[c], bag[p]);
            if shared.binary_search(&u).is_ok() && shared.binary_search(&v).is_ok() {
                continue;
            }
            if let Some(name) = tree_edge_name(t, u, v) {
                sets[i].push(name);
            }
        }
    }
    Ok(())
}

/// Treewidth route: the decomposition becomes a clique-sum tree (optionally
/// compressed) and every bag gets an empty local shortcut.
pub fn treewidth_shortcut(
    g: &AnnotatedGraph,
    td: &TreeDecomposition,
    t: &RootedTree,
    parts: &Partition,
    compress: bool,
) -> Result<(Shortcut, BuildReport)> {
    if let Some(issue) = validate_decomposition(g, td).into_iter().next() {
        return Err(Error::InvalidDecomposition(issue));
    }
    let cst = td_to_cliquesum(td);
    let cst = if compress { compress_cliquesum(&cst) } else { cst };
    let (s, mut report) = cliquesum_shortcut(g, &cst, t, parts, LocalConstructor::Empty)?;
    report.method = Some(Method::Treewidth);
    report.decomposition_width = td.width();
    Ok((s, report))
}
