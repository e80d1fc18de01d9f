use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{AnnotatedGraph, Edge, VortexSpec};

/// Outcome of contracting every vertex outside a kept set.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: AnnotatedGraph,
    /// Original vertex to the new id of the kept vertex it was merged into.
    pub to_new: Vec<usize>,
    /// New vertex to the original kept vertex.
    pub to_old: Vec<usize>,
    /// New edge to the original edge it descends from.
    pub edge_to_old: Vec<usize>,
}

/// Mutable multigraph-free contraction state. Contracting `v` into `u` moves
/// the edges of `v` onto `u`; when that would duplicate an existing edge of
/// `u`, the moved copy is discarded. The rotation system is kept as long as
/// both endpoints of every contracted edge are embedded.
#[derive(Debug, Clone)]
pub struct ContractionEngine {
    ends: Vec<[usize; 2]>,
    edge_alive: Vec<bool>,
    nbr: Vec<BTreeMap<usize, usize>>,
    rot: Option<Vec<Vec<usize>>>,
    embedded: Vec<bool>,
    rep: Vec<usize>,
}

impl ContractionEngine {
    pub fn new(g: &AnnotatedGraph) -> Self {
        let n = g.vertex_count();
        let mut nbr = vec![BTreeMap::new(); n];
        for (id, e) in g.edges().iter().enumerate() {
            nbr[e.u].insert(e.v, id);
            nbr[e.v].insert(e.u, id);
        }
        ContractionEngine {
            ends: g.edges().iter().map(|e| [e.u, e.v]).collect(),
            edge_alive: vec![true; g.edge_count()],
            nbr,
            rot: g.rotation().map(|r| r.to_vec()),
            embedded: g.embedded_mask(),
            rep: (0..n).collect(),
        }
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.rep[v] == v
    }

    /// Current neighbors of a live vertex, ascending.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.nbr[v].keys().copied()
    }

    /// Live vertex that `v` has been merged into.
    pub fn find(&self, mut v: usize) -> usize {
        while self.rep[v] != v {
            v = self.rep[v];
        }
        v
    }

    /// Contracts the edge between live vertices `v` and `u`, keeping `u`.
    pub fn contract(&mut self, v: usize, u: usize) {
        let e = self.nbr[v][&u];
        let moved: Vec<(usize, usize)> = self.nbr[v].iter().map(|(&x, &f)| (x, f)).collect();
        for (x, f) in moved {
            if x == u {
                continue;
            }
            self.nbr[x].remove(&v);
            if self.nbr[u].contains_key(&x) {
                self.edge_alive[f] = false;
                if let Some(rot) = self.rot.as_mut() {
                    rot[x].retain(|&y| y != f);
                }
            } else {
                let side = if self.ends[f][0] == v { 0 } else { 1 };
                self.ends[f][side] = u;
                self.nbr[u].insert(x, f);
                self.nbr[x].insert(u, f);
            }
        }
        if self.rot.is_some() && !(self.embedded[u] && self.embedded[v]) {
            self.rot = None;
        }
        if let Some(rot) = self.rot.as_mut() {
            let rv = std::mem::take(&mut rot[v]);
            let pos = rv.iter().position(|&x| x == e).expect("edge in rotation");
            let seq: Vec<usize> = rv[pos + 1..]
                .iter()
                .chain(&rv[..pos])
                .copied()
                .filter(|&f| self.edge_alive[f])
                .collect();
            let ru = &mut rot[u];
            let at = ru.iter().position(|&x| x == e).expect("edge in rotation");
            ru.splice(at..=at, seq);
        }
        self.edge_alive[e] = false;
        self.nbr[u].remove(&v);
        self.nbr[v].clear();
        self.rep[v] = u;
    }

    /// Materializes the live vertices (renumbered ascending) as a graph.
    pub fn finish(&self, g: &AnnotatedGraph) -> Result<Contraction> {
        let n = g.vertex_count();
        let mut to_old = Vec::new();
        let mut new_id = vec![usize::MAX; n];
        for v in 0..n {
            if self.is_alive(v) {
                new_id[v] = to_old.len();
                to_old.push(v);
            }
        }
        let to_new: Vec<usize> = (0..n).map(|v| new_id[self.find(v)]).collect();
        let mut edge_new = vec![usize::MAX; self.ends.len()];
        let mut edges = Vec::new();
        let mut edge_to_old = Vec::new();
        for (id, ends) in self.ends.iter().enumerate() {
            if self.edge_alive[id] {
                edge_new[id] = edges.len();
                edge_to_old.push(id);
                edges.push(Edge::new(new_id[ends[0]], new_id[ends[1]], g.edge(id).w));
            }
        }
        let rotation = self.rot.as_ref().map(|rot| {
            to_old
                .iter()
                .map(|&v| rot[v].iter().map(|&e| edge_new[e]).collect())
                .collect()
        });
        let apices = g
            .apices()
            .iter()
            .filter(|&&a| self.is_alive(a))
            .map(|&a| new_id[a])
            .collect();
        let vortices = g
            .vortices()
            .iter()
            .filter(|vx| vx.all_vertices().all(|v| self.is_alive(v)))
            .filter(|vx| {
                let b = &vx.boundary;
                (0..b.len()).all(|i| self.nbr[b[i]].contains_key(&b[(i + 1) % b.len()]))
            })
            .map(|vx| VortexSpec {
                boundary: vx.boundary.iter().map(|&v| new_id[v]).collect(),
                internals: vx.internals.iter().map(|&(v, a)| (new_id[v], a)).collect(),
                depth: vx.depth,
            })
            .collect();
        let graph = AnnotatedGraph::from_parts_allow_disconnected(
            to_old.len(),
            edges,
            rotation,
            apices,
            vortices,
        )?;
        Ok(Contraction { graph, to_new, to_old, edge_to_old })
    }
}

/// Contracts every vertex outside `keep` into a neighbor, processing
/// vertices by ascending id. A vertex prefers its lowest-id neighbor in the
/// same part (`part_of`), so parts that survive on `keep` stay connected;
/// otherwise it goes to its lowest-id neighbor.
pub fn contract_outside(
    g: &AnnotatedGraph,
    keep: &[bool],
    part_of: &[Option<usize>],
) -> Result<Contraction> {
    if !keep.iter().any(|&k| k) {
        return Err(Error::Empty("contract_outside needs a non-empty kept set"));
    }
    let mut engine = ContractionEngine::new(g);
    for v in 0..g.vertex_count() {
        if keep[v] {
            continue;
        }
        let same_part = part_of[v].and_then(|p| engine.neighbors(v).find(|&x| part_of[x] == Some(p)));
        let target = same_part
            .or_else(|| engine.neighbors(v).next())
            .ok_or(Error::Disconnected(v))?;
        engine.contract(v, target);
    }
    engine.finish(g)
}
