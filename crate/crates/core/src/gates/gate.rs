use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, Dart, Embedding, StarReplaced};

use super::CellPartition;

/// A fence and the gate it bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatePair {
    #[serde(rename = "F")]
    pub fence: Vec<usize>,
    #[serde(rename = "S")]
    pub gate: Vec<usize>,
}

/// Collection of (fence, gate) pairs with its average-fence parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialGate {
    pub pairs: Vec<GatePair>,
    #[serde(rename = "s")]
    pub s_param: usize,
}

/// A failed gate property, numbered 1 to 6.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateViolation {
    pub property: u8,
    pub detail: String,
}

impl fmt::Display for GateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "property {}: {}", self.property, self.detail)
    }
}

/// Everything computed while building a planar gate, kept for auditing.
#[derive(Debug, Clone)]
pub struct GateConstruction {
    pub gate: CombinatorialGate,
    /// Adjacent cell pairs `(i, j)`, `i < j`, one per gate pair.
    pub cell_pairs: Vec<(usize, usize)>,
    /// Vertex sequence of each cycle; two vertices for a single-edge cycle.
    pub cycles: Vec<Vec<usize>>,
    /// Enclosed faces of each cycle as a bitset over face indices.
    pub regions: Vec<Vec<u64>>,
    /// Largest induced cell diameter.
    pub diameter: usize,
}

impl GateConstruction {
    /// Pairs of regions that overlap without one containing the other.
    pub fn laminarity_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.regions.len() {
            for b in a + 1..self.regions.len() {
                let (ra, rb) = (&self.regions[a], &self.regions[b]);
                let meet = ra.iter().zip(rb).any(|(x, y)| x & y != 0);
                let a_in_b = ra.iter().zip(rb).all(|(x, y)| x & !y == 0);
                let b_in_a = ra.iter().zip(rb).all(|(x, y)| y & !x == 0);
                if meet && !a_in_b && !b_in_a {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

fn has_bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

struct CycleData {
    cells: (usize, usize),
    component: usize,
    vertices: Vec<usize>,
    sorted_vertices: Vec<usize>,
    degenerate_edge: Option<usize>,
    edges: Vec<usize>,
    region: Vec<u64>,
}

/// Builds a combinatorial gate for a cell partition of an embedded planar
/// graph without apices or vortices; `s_param = 36 (d + 1)`.
pub fn build_planar_gate(g: &AnnotatedGraph, cp: &CellPartition) -> Result<CombinatorialGate> {
    Ok(build_planar_gate_detailed(g, cp)?.gate)
}

/// As [`build_planar_gate`], also returning cycles and regions.
///
/// Each cell gets a BFS spanning tree. For every adjacent cell pair the
/// boundary of the face of (both trees + their inter-cell edges) that holds
/// the component's outer face is walked; the single inter-cell edge crossed
/// in each direction are the extremal edges, which close the pair's cycle
/// through the two trees. A cycle's region is the set of faces cut off from
/// the outer face by the cycle.
pub fn build_planar_gate_detailed(g: &AnnotatedGraph, cp: &CellPartition) -> Result<GateConstruction> {
    if g.rotation().is_none() {
        return Err(Error::MissingRotation);
    }
    if !g.apices().is_empty() || !g.vortices().is_empty() {
        return Err(Error::InvalidParameter(
            "planar gates need a graph without apices or vortices".into(),
        ));
    }
    let n = g.vertex_count();
    let cell_of: Vec<usize> = (0..n)
        .map(|v| cp.cell_of(v).ok_or_else(|| Error::InvalidGate(format!("vertex {v} is in no cell"))))
        .collect::<Result<_>>()?;
    let emb = Embedding::new(g)?;
    let face_count = emb.face_count();
    let words = face_count.div_ceil(64).max(1);
    let mut outer_of_comp = BTreeMap::new();
    for f in emb.outer_faces() {
        outer_of_comp.insert(emb.face_component(f), f);
    }
    let mut comp_faces: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in 0..face_count {
        comp_faces.entry(emb.face_component(f)).or_default().push(f);
    }

    // BFS spanning tree of every cell.
    let mut tparent = vec![usize::MAX; n];
    let mut tdepth = vec![0usize; n];
    let mut tree_edge = vec![false; g.edge_count()];
    let mut diameter = 0;
    for (i, cell) in cp.cells().iter().enumerate() {
        let root = cell[0];
        let mut queue = std::collections::VecDeque::from([root]);
        let mut seen = 1;
        tparent[root] = root;
        while let Some(u) = queue.pop_front() {
            for &(w, e) in g.neighbors(u) {
                if cell_of[w] == i && tparent[w] == usize::MAX {
                    tparent[w] = u;
                    tdepth[w] = tdepth[u] + 1;
                    tree_edge[e] = true;
                    seen += 1;
                    queue.push_back(w);
                }
            }
        }
        if seen != cell.len() {
            return Err(Error::InvalidGate(format!("cell {i} is not connected")));
        }
        let d = g
            .induced_diameter(cell)
            .ok_or_else(|| Error::InvalidGate(format!("cell {i} is not connected")))?;
        diameter = diameter.max(d);
    }
    let tree_path = |mut a: usize, mut b: usize| -> (Vec<usize>, Vec<usize>) {
        // Vertices from a up to the meeting point, and from b up to it (exclusive).
        let mut left = Vec::new();
        let mut right = Vec::new();
        while tdepth[a] > tdepth[b] {
            left.push(a);
            a = tparent[a];
        }
        while tdepth[b] > tdepth[a] {
            right.push(b);
            b = tparent[b];
        }
        while a != b {
            left.push(a);
            right.push(b);
            a = tparent[a];
            b = tparent[b];
        }
        left.push(a);
        (left, right)
    };

    let mut inter: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let (a, b) = (cell_of[e.u], cell_of[e.v]);
        if a != b {
            inter.entry((a.min(b), a.max(b))).or_default().push(id);
        }
    }

    let mut face_stamp = vec![0usize; face_count];
    let mut edge_stamp = vec![0usize; g.edge_count()];
    let mut stamp = 0usize;
    let mut cycles: Vec<CycleData> = Vec::new();
    for (&(ci, cj), inter_edges) in &inter {
        stamp += 1;
        for &e in inter_edges {
            edge_stamp[e] = stamp;
        }
        let in_tij = |e: usize, edge_stamp: &[usize]| -> bool {
            if edge_stamp[e] == stamp {
                return true;
            }
            let c = cell_of[g.edge(e).u];
            tree_edge[e] && (c == ci || c == cj)
        };
        let first = g.edge(inter_edges[0]);
        let comp = emb
            .vertex_component(first.u)
            .ok_or_else(|| Error::InvalidGate("inter-cell edge outside the embedding".into()))?;
        let f0 = outer_of_comp[&comp];
        // Faces merged with the outer face once everything but T_ij is erased.
        let mut stack = vec![f0];
        face_stamp[f0] = stamp;
        while let Some(f) = stack.pop() {
            for &d in emb.face_darts(f) {
                if in_tij(d.edge(), &edge_stamp) {
                    continue;
                }
                let nf = emb.face_of(d.twin()).unwrap();
                if face_stamp[nf] != stamp {
                    face_stamp[nf] = stamp;
                    stack.push(nf);
                }
            }
        }
        let start = outer_boundary_dart(&emb, &face_stamp, stamp, |e| in_tij(e, &edge_stamp), &comp_faces[&comp])
            .ok_or_else(|| Error::InvalidGate(format!("no outer boundary for cells {ci}, {cj}")))?;
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        let mut d = start;
        loop {
            if edge_stamp[d.edge()] == stamp {
                if cell_of[d.tail(g)] == ci {
                    forward.push(d);
                } else {
                    backward.push(d);
                }
            }
            let mut x = emb.next_dart(d).unwrap();
            while !in_tij(x.edge(), &edge_stamp) {
                x = emb.next_dart(x.twin()).unwrap();
            }
            d = x;
            if d == start {
                break;
            }
        }
        if forward.len() != 1 || backward.len() != 1 {
            return Err(Error::InvalidGate(format!(
                "outer walk of cells {ci}, {cj} crosses {} and {} inter-cell edges",
                forward.len(),
                backward.len()
            )));
        }
        let (e_l, e_r) = (forward[0], backward[0]);
        let (ui, uj) = (e_l.tail(g), e_l.head(g));
        let (vj, vi) = (e_r.tail(g), e_r.head(g));
        let degenerate = e_l.edge() == e_r.edge();
        let (vertices, edges) = if degenerate {
            (vec![ui, uj], vec![e_l.edge()])
        } else {
            let (pl, pr) = tree_path(ui, vi);
            let mut path_i = pl;
            path_i.extend(pr.into_iter().rev());
            let (ql, qr) = tree_path(vj, uj);
            let mut path_j = ql;
            path_j.extend(qr.into_iter().rev());
            let mut edges = vec![e_l.edge(), e_r.edge()];
            for path in [&path_i, &path_j] {
                for w in path.windows(2) {
                    edges.push(g.edge_between(w[0], w[1]).unwrap());
                }
            }
            let mut vertices = path_i;
            vertices.extend(path_j);
            (vertices, edges)
        };
        let mut region = vec![0u64; words];
        if !degenerate {
            stamp += 1;
            for &e in &edges {
                edge_stamp[e] = stamp;
            }
            let mut stack = vec![f0];
            face_stamp[f0] = stamp;
            while let Some(f) = stack.pop() {
                for &d in emb.face_darts(f) {
                    if edge_stamp[d.edge()] == stamp {
                        continue;
                    }
                    let nf = emb.face_of(d.twin()).unwrap();
                    if face_stamp[nf] != stamp {
                        face_stamp[nf] = stamp;
                        stack.push(nf);
                    }
                }
            }
            for &f in &comp_faces[&comp] {
                if face_stamp[f] != stamp {
                    region[f / 64] |= 1 << (f % 64);
                }
            }
        }
        let mut sorted_vertices = vertices.clone();
        sorted_vertices.sort_unstable();
        cycles.push(CycleData {
            cells: (ci, cj),
            component: comp,
            vertices,
            sorted_vertices,
            degenerate_edge: degenerate.then_some(e_l.edge()),
            edges,
            region,
        });
    }

    // One face at each vertex is enough: a vertex off a cycle sees only
    // faces on one side of it.
    let face_at: Vec<Option<usize>> = (0..n)
        .map(|v| {
            let rot = &g.rotation().unwrap()[v];
            rot.first().and_then(|&e| emb.face_of(Dart::from_tail(g, e, v)))
        })
        .collect();
    let on_cycle = |c: &CycleData, v: usize| c.sorted_vertices.binary_search(&v).is_ok();
    let strictly_inside = |c: &CycleData, v: usize| -> bool {
        c.degenerate_edge.is_none()
            && !on_cycle(c, v)
            && face_at[v].is_some_and(|f| has_bit(&c.region, f))
    };
    let nested_in = |b: &CycleData, a: &CycleData| -> bool {
        if a.degenerate_edge.is_some() || a.component != b.component {
            return false;
        }
        match b.degenerate_edge {
            Some(e) => a.edges.contains(&e) || has_bit(&a.region, emb.face_of(Dart(2 * e)).unwrap()),
            None => {
                let probe = b.region.iter().position(|&w| w != 0).unwrap();
                (b.region[probe] & !a.region[probe]) == 0
                    && b.region.iter().zip(&a.region).all(|(x, y)| x & !y == 0)
            }
        }
    };

    let mut pairs = Vec::with_capacity(cycles.len());
    for (ai, a) in cycles.iter().enumerate() {
        let nested: Vec<&CycleData> = cycles
            .iter()
            .enumerate()
            .filter(|&(bi, b)| bi != ai && nested_in(b, a))
            .map(|(_, b)| b)
            .collect();
        let members = cp.cell(a.cells.0).iter().chain(cp.cell(a.cells.1));
        let mut gate = Vec::new();
        let mut fence = Vec::new();
        for &v in members {
            let in_region = on_cycle(a, v) || strictly_inside(a, v);
            if !in_region || nested.iter().any(|b| strictly_inside(b, v)) {
                continue;
            }
            gate.push(v);
            if on_cycle(a, v) || nested.iter().any(|b| on_cycle(b, v)) {
                fence.push(v);
            }
        }
        gate.sort_unstable();
        fence.sort_unstable();
        pairs.push(GatePair { fence, gate });
    }
    let gate = CombinatorialGate { pairs, s_param: 36 * (diameter + 1) };
    Ok(GateConstruction {
        gate,
        cell_pairs: cycles.iter().map(|c| c.cells).collect(),
        cycles: cycles.iter().map(|c| c.vertices.clone()).collect(),
        regions: cycles.into_iter().map(|c| c.region).collect(),
        diameter,
    })
}

/// A dart of T_ij whose left face lies in the outer region.
fn outer_boundary_dart(
    emb: &Embedding,
    face_stamp: &[usize],
    stamp: usize,
    in_tij: impl Fn(usize) -> bool,
    faces: &[usize],
) -> Option<Dart> {
    faces
        .iter()
        .filter(|&&f| face_stamp[f] == stamp)
        .flat_map(|&f| emb.face_darts(f).iter().copied())
        .find(|d| in_tij(d.edge()))
}

/// Checks the six gate properties against a cell partition of `g`.
pub fn verify_gate(g: &AnnotatedGraph, cp: &CellPartition, gate: &CombinatorialGate) -> Vec<GateViolation> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let bad = |p: u8, d: String| GateViolation { property: p, detail: d };
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut inner_owner: Vec<Option<usize>> = vec![None; n];
    let mut fence_total = 0;
    for (i, pair) in gate.pairs.iter().enumerate() {
        let mut in_gate = vec![false; n];
        for &v in &pair.gate {
            if v >= n {
                out.push(bad(1, format!("gate {i} names vertex {v}, which does not exist")));
                continue;
            }
            in_gate[v] = true;
            holders[v].push(i);
        }
        let fence: std::collections::BTreeSet<usize> = pair.fence.iter().copied().collect();
        fence_total += fence.len();
        if let Some(v) = fence.iter().find(|&&v| v >= n || !in_gate[v]) {
            out.push(bad(1, format!("fence vertex {v} of pair {i} is not in its gate")));
        }
        for &v in &pair.gate {
            if v >= n {
                continue;
            }
            if g.neighbors(v).iter().any(|&(w, _)| !in_gate[w]) && !fence.contains(&v) {
                out.push(bad(2, format!("boundary vertex {v} of gate {i} is not in its fence")));
            }
            if !fence.contains(&v) {
                if let Some(j) = inner_owner[v] {
                    out.push(bad(5, format!("vertex {v} is a non-fence vertex of gates {j} and {i}")));
                }
                inner_owner[v] = Some(i);
            }
        }
        let mut touched: Vec<usize> = pair.gate.iter().filter(|&&v| v < n).filter_map(|&v| cp.cell_of(v)).collect();
        touched.sort_unstable();
        touched.dedup();
        if touched.len() > 2 {
            out.push(bad(4, format!("gate {i} meets {} cells", touched.len())));
        }
    }
    for (id, e) in g.edges().iter().enumerate() {
        let (Some(a), Some(b)) = (cp.cell_of(e.u), cp.cell_of(e.v)) else { continue };
        if a == b {
            continue;
        }
        let covered = holders[e.u].iter().any(|i| holders[e.v].contains(i));
        if !covered {
            out.push(bad(3, format!("inter-cell edge {id} ({}-{}) is in no gate", e.u, e.v)));
        }
    }
    if fence_total > gate.s_param * cp.len() {
        out.push(bad(
            6,
            format!("fences total {fence_total} > s * cells = {} * {}", gate.s_param, cp.len()),
        ));
    }
    out
}

/// Maps a gate built on the star-replaced graph back to the graph with its
/// vortices: star vertices vanish, and each boundary vertex brings along the
/// internal vertices whose arcs contain it. `s_param` grows by the largest
/// vortex depth.
pub fn expand_gate_over_vortices(
    gate: &CombinatorialGate,
    host: &AnnotatedGraph,
    star: &StarReplaced,
) -> Result<CombinatorialGate> {
    if star.stars.len() != host.vortices().len() {
        return Err(Error::InvalidVortex("star replacement does not match the vortices".into()));
    }
    let mut extra: Vec<Vec<usize>> = vec![Vec::new(); host.vertex_count()];
    let mut depth = 1;
    for vx in host.vortices() {
        depth = depth.max(vx.depth);
        for (idx, &(iv, _)) in vx.internals.iter().enumerate() {
            for b in vx.arc_vertices(idx) {
                extra[b].push(iv);
            }
        }
    }
    let expand = |set: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> = set
            .iter()
            .filter_map(|&x| star.to_old.get(x).copied().flatten())
            .flat_map(|v| std::iter::once(v).chain(extra[v].iter().copied()))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let pairs = gate
        .pairs
        .iter()
        .map(|p| GatePair { fence: expand(&p.fence), gate: expand(&p.gate) })
        .collect();
    Ok(CombinatorialGate { pairs, s_param: gate.s_param * depth })
}

/// Gate for any embedded graph without apices: vortices are replaced by
/// star vertices (each joining the special cell holding its vortex), a
/// planar gate is built and then expanded back over the vortices.
pub fn planar_gate(g: &AnnotatedGraph, cp: &CellPartition) -> Result<CombinatorialGate> {
    if g.vortices().is_empty() {
        return build_planar_gate(g, cp);
    }
    let star = g.star_replace()?;
    let mut cells: Vec<Vec<usize>> = cp
        .cells()
        .iter()
        .map(|c| c.iter().filter_map(|&v| star.to_new[v]).collect())
        .collect();
    for (vi, vx) in g.vortices().iter().enumerate() {
        let c = cp
            .cell_of(vx.boundary[0])
            .ok_or_else(|| Error::InvalidGate("vortex boundary outside the cells".into()))?;
        cells[c].push(star.stars[vi]);
    }
    let special = (0..cp.len()).map(|i| cp.is_special(i)).collect();
    let star_cells = CellPartition::new(&star.graph, cells, special)?;
    let gate = build_planar_gate(&star.graph, &star_cells)?;
    expand_gate_over_vortices(&gate, g, &star)
}
