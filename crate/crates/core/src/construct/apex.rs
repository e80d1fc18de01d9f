use std::collections::{BTreeMap, BTreeSet};

use crate::decomp::tree_decomposition;
use crate::error::{Error, Result};
use crate::gates::{assign_cells, merge_vortex_cells, planar_gate, AssignOptions, CellPartition};
use crate::graph::{contract_outside, AnnotatedGraph, Edge, RootedTree};
use crate::shortcut::{Partition, Shortcut};
use crate::weight::Weight;

use super::cliquesum::treewidth_shortcut;
use super::{check_spanning, tree_edge_name, BuildReport, Method};

/// The graph left after deleting every apex, with the cells the apex route
/// works on: components of the spanning tree minus the apices, with the
/// cells meeting each vortex merged into one special cell.
#[derive(Debug, Clone)]
pub struct ApexCells {
    pub h: AnnotatedGraph,
    /// Vertex map from the input graph onto `h` (`None` for apices).
    pub to_h: Vec<Option<usize>>,
    pub cells: CellPartition,
}

pub fn apex_cells(g: &AnnotatedGraph, t: &RootedTree) -> Result<ApexCells> {
    check_spanning(g, t)?;
    let mut is_apex = vec![false; g.vertex_count()];
    for &a in g.apices() {
        is_apex[a] = true;
    }
    let mut comp = vec![usize::MAX; g.vertex_count()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &v in t.preorder() {
        if is_apex[v] {
            continue;
        }
        match t.parent(v).filter(|&p| !is_apex[p]) {
            Some(p) => comp[v] = comp[p],
            None => {
                comp[v] = comps.len();
                comps.push(Vec::new());
            }
        }
        comps[comp[v]].push(v);
    }
    apex_cells_of(g, &is_apex, &comps)
}

fn apex_cells_of(g: &AnnotatedGraph, is_apex: &[bool], comps: &[Vec<usize>]) -> Result<ApexCells> {
    let (h, to_h) = g.without_vertices(is_apex)?;
    let mut cells: Vec<Vec<usize>> =
        comps.iter().map(|c| c.iter().map(|&v| to_h[v].unwrap()).collect()).collect();
    cells.sort_by_key(|c| *c.iter().min().unwrap());
    let special = vec![false; cells.len()];
    let cells = merge_vortex_cells(&h, &CellPartition::new(&h, cells, special)?)?;
    Ok(ApexCells { h, to_h, cells })
}

/// Shortcut for a graph with apices.
///
/// Parts holding an apex get all of `t`. The other parts are routed through
/// the cells left when the apices are removed from `t` (each cell keeps one
/// uplink to an apex, the lowest edge id). Cells meeting a vortex merge into
/// special cells. A cell related to a part by [`assign_cells`] gives that
/// part its whole subtree plus uplink; every unrelated (normal cell, part)
/// pair gets a local shortcut on the graph with everything outside the cell
/// contracted, and the special cells get one joint local shortcut over
/// their subtrees, their uplinks and a single merged apex.
pub fn apex_shortcut(
    g: &AnnotatedGraph,
    t: &RootedTree,
    parts: &Partition,
    compress: bool,
    opts: AssignOptions,
) -> Result<(Shortcut, BuildReport)> {
    check_spanning(g, t)?;
    let n = g.vertex_count();
    if g.apices().is_empty() {
        return Err(Error::NoApplicableMethod("apex route needs at least one apex".into()));
    }
    let mut is_apex = vec![false; n];
    for &a in g.apices() {
        is_apex[a] = true;
    }
    if g.vortices().iter().any(|vx| vx.all_vertices().any(|v| is_apex[v])) {
        return Err(Error::InvalidParameter("an apex lies inside a vortex".into()));
    }

    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); parts.len()];
    let mut plain = Vec::new();
    for (i, part) in parts.parts().iter().enumerate() {
        if part.iter().any(|&v| is_apex[v]) {
            sets[i] = t.edges().into_iter().map(|(c, _)| c).collect();
        } else {
            plain.push(i);
        }
    }

    let mut plain_index = vec![None; parts.len()];
    for (j, &i) in plain.iter().enumerate() {
        plain_index[i] = Some(j);
    }

    // Components of t without the apices, each with one uplink.
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &v in t.preorder() {
        if is_apex[v] {
            continue;
        }
        match t.parent(v).filter(|&p| !is_apex[p]) {
            Some(p) => comp[v] = comp[p],
            None => {
                comp[v] = comps.len();
                comps.push(Vec::new());
            }
        }
        comps[comp[v]].push(v);
    }
    let mut uplink: Vec<Option<(usize, usize)>> = vec![None; comps.len()];
    for (id, e) in g.edges().iter().enumerate() {
        let (inner, a) = match (is_apex[e.u], is_apex[e.v]) {
            (false, true) => (e.u, e.v),
            (true, false) => (e.v, e.u),
            _ => continue,
        };
        if tree_edge_name(t, inner, a).is_some() && uplink[comp[inner]].is_none_or(|(old, _)| id < old) {
            uplink[comp[inner]] = Some((id, inner));
        }
    }
    let uplink_name = |c: usize| -> Option<usize> {
        uplink[c].map(|(id, _)| {
            let e = g.edge(id);
            tree_edge_name(t, e.u, e.v).expect("uplinks are tree edges")
        })
    };

    let ApexCells { h, to_h, cells: cp } = apex_cells_of(g, &is_apex, &comps)?;
    let mut from_h = vec![0; h.vertex_count()];
    for (v, m) in to_h.iter().enumerate() {
        if let Some(m) = m {
            from_h[*m] = v;
        }
    }
    let labels: Vec<Option<usize>> = (0..h.vertex_count()).map(|v| parts.part_of(from_h[v])).collect();
    let hparts = Partition::new(
        &h,
        plain.iter().map(|&i| parts.part(i).iter().map(|&v| to_h[v].unwrap()).collect()).collect(),
    )?;
    let rel = assign_cells(&h, &cp, &hparts, &planar_gate, opts)?;

    let mut report = BuildReport {
        method: Some(Method::Apex),
        cells: cp.len(),
        special_cells: cp.special_count(),
        relation_pairs: rel.pairs.len(),
        relation_beta: rel.beta,
        ..BuildReport::default()
    };

    // Global part: subtree plus uplink of every related cell.
    for &(c, j) in &rel.pairs {
        let i = plain[j];
        for &hv in cp.cell(c) {
            let v = from_h[hv];
            if t.parent(v).is_some_and(|p| !is_apex[p]) {
                sets[i].push(v);
            }
        }
        sets[i].extend(uplink_name(comp[from_h[cp.cell(c)[0]]]));
    }

    // Local parts for unrelated normal cells.
    for c in 0..cp.len() {
        if cp.is_special(c) {
            continue;
        }
        let members: BTreeSet<usize> = cp.cell(c).iter().filter_map(|&v| labels[v]).collect();
        let wanted: Vec<usize> =
            members.into_iter().filter(|&i| plain_index[i].is_some_and(|j| !rel.contains(c, j))).collect();
        if wanted.is_empty() {
            continue;
        }
        let mut keep = vec![false; h.vertex_count()];
        for &v in cp.cell(c) {
            keep[v] = true;
        }
        let (lg, to_l, from_l) = contract_onto(&h, &keep, &labels)?;
        let tree_edges: Vec<(usize, usize)> = cp
            .cell(c)
            .iter()
            .filter_map(|&hv| {
                let v = from_h[hv];
                let p = t.parent(v).filter(|&p| !is_apex[p])?;
                Some((to_l[hv].unwrap(), to_l[to_h[p].unwrap()].unwrap()))
            })
            .collect();
        let root = to_l[cp.cell(c)[0]].unwrap();
        let ltree = RootedTree::from_edges(lg.vertex_count(), root, &tree_edges)?;
        let map_back = |x: usize| Some(from_h[from_l[x]]);
        local_shortcut(&lg, &ltree, parts, &wanted, None, compress, &mut sets, &mut report, t, map_back)?;
    }

    // Joint local shortcut for all special cells.
    if cp.special_count() > 0 {
        let mut keep = vec![false; h.vertex_count()];
        let mut members = BTreeSet::new();
        let mut comps_inside = BTreeSet::new();
        for c in (0..cp.len()).filter(|&c| cp.is_special(c)) {
            for &v in cp.cell(c) {
                keep[v] = true;
                members.extend(labels[v].filter(|&i| plain_index[i].is_some()));
                comps_inside.insert(comp[from_h[v]]);
            }
        }
        let (con, to_l, from_l) = contract_onto(&h, &keep, &labels)?;
        let x = con.vertex_count();
        let mut edges: Vec<Edge> = con.edges().to_vec();
        let mut joined = BTreeSet::new();
        for &a in g.apices() {
            for &(w, _) in g.neighbors(a) {
                if let Some(l) = to_h[w].and_then(|hw| to_l[hw]) {
                    if joined.insert(l) {
                        edges.push(Edge::new(l, x, Weight::integer(1)));
                    }
                }
            }
        }
        let rotation = con.rotation().map(|r| {
            let mut r = r.to_vec();
            r.push(Vec::new());
            r
        });
        let mut apices = con.apices().to_vec();
        apices.push(x);
        let lg = AnnotatedGraph::from_parts(x + 1, edges, rotation, apices, con.vortices().to_vec())?;
        let mut tree_edges = Vec::new();
        let mut uplink_at = BTreeMap::new();
        for hv in (0..h.vertex_count()).filter(|&v| keep[v]) {
            let v = from_h[hv];
            if let Some(p) = t.parent(v).filter(|&p| !is_apex[p]) {
                tree_edges.push((to_l[hv].unwrap(), to_l[to_h[p].unwrap()].unwrap()));
            }
        }
        for &k in &comps_inside {
            if let Some((_, inner)) = uplink[k] {
                let l = to_l[to_h[inner].unwrap()].unwrap();
                tree_edges.push((l, x));
                uplink_at.insert(l, uplink_name(k).unwrap());
            }
        }
        let ltree = RootedTree::from_edges(x + 1, x, &tree_edges)?;
        let wanted: Vec<usize> = members.into_iter().collect();
        let map_back = |l: usize| if l == x { None } else { Some(from_h[from_l[l]]) };
        let apex = Some((x, &uplink_at));
        local_shortcut(&lg, &ltree, parts, &wanted, apex, compress, &mut sets, &mut report, t, map_back)?;
    }
    Ok((Shortcut::new(t.clone(), sets)?, report))
}

/// Contracts everything outside `keep` after dropping the components of `h`
/// with no kept vertex. Returns the graph and the vertex maps.
fn contract_onto(
    h: &AnnotatedGraph,
    keep: &[bool],
    labels: &[Option<usize>],
) -> Result<(AnnotatedGraph, Vec<Option<usize>>, Vec<usize>)> {
    let all = vec![true; h.vertex_count()];
    let mut drop = vec![false; h.vertex_count()];
    for component in h.induced_components(&all) {
        if !component.iter().any(|&v| keep[v]) {
            for v in component {
                drop[v] = true;
            }
        }
    }
    let (h2, map) = h.without_vertices(&drop)?;
    let mut keep2 = vec![false; h2.vertex_count()];
    let mut labels2 = vec![None; h2.vertex_count()];
    let mut back = vec![0; h2.vertex_count()];
    for v in 0..h.vertex_count() {
        if let Some(m) = map[v] {
            keep2[m] = keep[v];
            labels2[m] = labels[v];
            back[m] = v;
        }
    }
    let con = contract_outside(&h2, &keep2, &labels2)?;
    let mut to_l = vec![None; h.vertex_count()];
    for v in 0..h.vertex_count() {
        if let Some(m) = map[v] {
            if keep[v] {
                to_l[v] = Some(con.to_new[m]);
            }
        }
    }
    let from_l = con.to_old.iter().map(|&m| back[m]).collect();
    Ok((con.graph, to_l, from_l))
}

/// Runs the treewidth route on a local graph for the given parts (each
/// restricted to the local graph and split into connected pieces) and adds
/// the resulting edges, mapped back to `t`, to the parts' edge sets.
#[allow(clippy::too_many_arguments)]
fn local_shortcut(
    lg: &AnnotatedGraph,
    ltree: &RootedTree,
    parts: &Partition,
    wanted: &[usize],
    apex: Option<(usize, &BTreeMap<usize, usize>)>,
    compress: bool,
    sets: &mut [Vec<usize>],
    report: &mut BuildReport,
    t: &RootedTree,
    map_back: impl Fn(usize) -> Option<usize>,
) -> Result<()> {
    let mut local_parts = Vec::new();
    let mut owner = Vec::new();
    for &i in wanted {
        let mut mask = vec![false; lg.vertex_count()];
        for l in 0..lg.vertex_count() {
            if map_back(l).is_some_and(|v| parts.part_of(v) == Some(i)) {
                mask[l] = true;
            }
        }
        let pieces = lg.induced_components(&mask);
        report.max_local_components = report.max_local_components.max(pieces.len());
        for piece in pieces {
            local_parts.push(piece);
            owner.push(i);
        }
    }
    if local_parts.is_empty() {
        return Ok(());
    }
    let lparts = Partition::new(lg, local_parts)?;
    let td = tree_decomposition(lg)?;
    let (ls, lrep) = treewidth_shortcut(lg, &td, ltree, &lparts, compress)?;
    report.decomposition_depth = report.decomposition_depth.max(lrep.decomposition_depth);
    report.decomposition_width = report.decomposition_width.max(lrep.decomposition_width);
    for (j, &i) in owner.iter().enumerate() {
        for &c in ls.edge_set(j) {
            let p = ltree.parent(c).expect("named edges have a parent");
            let name = match apex {
                Some((x, uplinks)) if p == x => uplinks.get(&c).copied(),
                Some((x, uplinks)) if c == x => uplinks.get(&p).copied(),
                _ => map_back(c).zip(map_back(p)).and_then(|(u, v)| tree_edge_name(t, u, v)),
            };
            sets[i].extend(name);
        }
    }
    Ok(())
}
