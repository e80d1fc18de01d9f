//! Undirected weighted graphs with optional planar rotation systems, apex
//! vertices and vortices, plus the tree and contraction machinery the
//! shortcut constructions are built on.

mod contract;
mod embedding;
mod tree;

pub use contract::{contract_outside, Contraction, ContractionEngine};
pub use embedding::{faces, Dart, Embedding, StarReplaced};
pub use tree::{bfs_tree, bfs_tree_within, heavy_light, path_contraction, repaired_tree, tree_path, Lca, RootedTree};

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Weight,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: Weight) -> Self {
        Edge { u, v, w }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A contiguous run of boundary positions `lo..=hi`; wraps around the
/// boundary cycle when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSpan {
    pub lo: usize,
    pub hi: usize,
}

impl ArcSpan {
    pub fn new(lo: usize, hi: usize) -> Self {
        ArcSpan { lo, hi }
    }

    pub fn contains(&self, pos: usize) -> bool {
        if self.lo <= self.hi {
            (self.lo..=self.hi).contains(&pos)
        } else {
            pos >= self.lo || pos <= self.hi
        }
    }

    /// Boundary positions covered, in cyclic order starting at `lo`.
    pub fn positions(&self, len: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut p = self.lo;
        loop {
            out.push(p);
            if p == self.hi {
                break;
            }
            p = (p + 1) % len;
        }
        out
    }
}

/// A vortex attached to a face of the embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VortexSpec {
    /// Boundary cycle, in face order.
    #[serde(rename = "boundary")]
    pub boundary: Vec<usize>,
    /// Internal vertices with the boundary arc each one hangs off.
    pub internals: Vec<(usize, ArcSpan)>,
    pub depth: usize,
}

impl VortexSpec {
    /// Boundary vertices on the arc of internal vertex `idx`.
    pub fn arc_vertices(&self, idx: usize) -> Vec<usize> {
        self.internals[idx]
            .1
            .positions(self.boundary.len())
            .into_iter()
            .map(|p| self.boundary[p])
            .collect()
    }

    pub fn internal_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.internals.iter().map(|&(v, _)| v)
    }

    /// All vertices of the vortex: boundary followed by internals.
    pub fn all_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary.iter().copied().chain(self.internal_ids())
    }

    fn arcs_overlap(&self, a: usize, b: usize) -> bool {
        let len = self.boundary.len();
        let pa = self.internals[a].1.positions(len);
        pa.into_iter().any(|p| self.internals[b].1.contains(p))
    }
}

/// Undirected, loop-free, simple weighted graph with optional embedding data.
///
/// Vertices are `0..n`. `adj[v]` lists `(neighbor, edge id)` sorted by
/// neighbor. When a rotation system is present, every vertex that is neither
/// an apex nor a vortex-internal vertex lists its incident embedded edges in
/// cyclic order; the others carry an empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
    rotation: Option<Vec<Vec<usize>>>,
    apices: Vec<usize>,
    vortices: Vec<VortexSpec>,
}

impl AnnotatedGraph {
    /// Plain connected graph without embedding data.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::from_parts(n, edges, None, Vec::new(), Vec::new())
    }

    /// Builds and validates a connected annotated graph.
    pub fn from_parts(
        n: usize,
        edges: Vec<Edge>,
        rotation: Option<Vec<Vec<usize>>>,
        apices: Vec<usize>,
        vortices: Vec<VortexSpec>,
    ) -> Result<Self> {
        let g = Self::build(n, edges, rotation, apices, vortices)?;
        if let Some(v) = g.first_unreachable(0) {
            return Err(Error::Disconnected(v));
        }
        Ok(g)
    }

    /// Like [`AnnotatedGraph::from_parts`] but accepts disconnected graphs.
    /// Used for intermediate graphs such as the planar region left after
    /// deleting an apex.
    pub fn from_parts_allow_disconnected(
        n: usize,
        edges: Vec<Edge>,
        rotation: Option<Vec<Vec<usize>>>,
        apices: Vec<usize>,
        vortices: Vec<VortexSpec>,
    ) -> Result<Self> {
        Self::build(n, edges, rotation, apices, vortices)
    }

    fn build(
        n: usize,
        edges: Vec<Edge>,
        rotation: Option<Vec<Vec<usize>>>,
        apices: Vec<usize>,
        vortices: Vec<VortexSpec>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("graph needs at least one vertex"));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n {
                return Err(Error::VertexOutOfRange(e.u));
            }
            if e.v >= n {
                return Err(Error::VertexOutOfRange(e.v));
            }
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::DuplicateEdge(e.u, e.v));
            }
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut apices = apices;
        apices.sort_unstable();
        apices.dedup();
        if let Some(&a) = apices.iter().find(|&&a| a >= n) {
            return Err(Error::VertexOutOfRange(a));
        }
        let g = AnnotatedGraph { n, edges, adj, rotation, apices, vortices };
        g.validate_vortices()?;
        if g.rotation.is_some() {
            g.validate_rotation()?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// `(neighbor, edge id)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_between(u, v).is_some()
    }

    pub fn rotation(&self) -> Option<&[Vec<usize>]> {
        self.rotation.as_deref()
    }

    pub fn apices(&self) -> &[usize] {
        &self.apices
    }

    pub fn is_apex(&self, v: usize) -> bool {
        self.apices.binary_search(&v).is_ok()
    }

    pub fn vortices(&self) -> &[VortexSpec] {
        &self.vortices
    }

    /// Per-vertex flag: true for vortex-internal vertices.
    pub fn vortex_internal_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for vx in &self.vortices {
            for v in vx.internal_ids() {
                mask[v] = true;
            }
        }
        mask
    }

    /// Per-vertex flag: true for vertices that take part in the embedding.
    pub fn embedded_mask(&self) -> Vec<bool> {
        let mut mask: Vec<bool> = self.vortex_internal_mask().iter().map(|&i| !i).collect();
        for &a in &self.apices {
            mask[a] = false;
        }
        mask
    }

    pub fn total_weight(&self, edge_ids: impl IntoIterator<Item = usize>) -> Weight {
        edge_ids.into_iter().map(|e| self.edges[e].w).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.first_unreachable(0).is_none()
    }

    fn first_unreachable(&self, root: usize) -> Option<usize> {
        let dist = self.bfs_distances(root);
        dist.iter().position(|d| d.is_none())
    }

    /// Hop distances from `root`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[root] = Some(0);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &(w, _) in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components of the subgraph induced by `members`
    /// (a per-vertex mask). Components are listed by smallest vertex.
    pub fn induced_components(&self, members: &[bool]) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if !members[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut list = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < list.len() {
                let u = list[i];
                i += 1;
                for &(w, _) in &self.adj[u] {
                    if members[w] && comp[w] == usize::MAX {
                        comp[w] = id;
                        list.push(w);
                    }
                }
            }
            list.sort_unstable();
            out.push(list);
        }
        out
    }

    /// Exact diameter of the subgraph induced by `vertices`, or `None` if it
    /// is disconnected. Runs one BFS per vertex.
    pub fn induced_diameter(&self, vertices: &[usize]) -> Option<usize> {
        if vertices.is_empty() {
            return Some(0);
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut best = 0;
        let mut dist = vec![usize::MAX; vertices.len()];
        let mut queue = VecDeque::new();
        for s in 0..vertices.len() {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push_back(vertices[s]);
            let mut reached = 1;
            while let Some(u) = queue.pop_front() {
                let du = dist[local[u]];
                for &(w, _) in &self.adj[u] {
                    let lw = local[w];
                    if lw != usize::MAX && dist[lw] == usize::MAX {
                        dist[lw] = du + 1;
                        best = best.max(du + 1);
                        reached += 1;
                        queue.push_back(w);
                    }
                }
            }
            if reached != vertices.len() {
                return None;
            }
        }
        Some(best)
    }

    /// A copy with every vertex of `remove` deleted; remaining vertices are
    /// renumbered in ascending order. Returns the graph and the old-to-new map.
    /// The result may be disconnected. Rotation entries of surviving embedded
    /// vertices are filtered accordingly; vortices touching removed vertices
    /// are dropped.
    pub fn without_vertices(&self, remove: &[bool]) -> Result<(AnnotatedGraph, Vec<Option<usize>>)> {
        let mut map = vec![None; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if !remove[v] {
                map[v] = Some(next);
                next += 1;
            }
        }
        if next == 0 {
            return Err(Error::Empty("every vertex removed"));
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (map[e.u], map[e.v]) {
                edge_map[id] = Some(edges.len());
                edges.push(Edge::new(a, b, e.w));
            }
        }
        let rotation = self.rotation.as_ref().map(|rot| {
            let mut out = vec![Vec::new(); next];
            for v in 0..self.n {
                if let Some(nv) = map[v] {
                    out[nv] = rot[v].iter().filter_map(|&e| edge_map[e]).collect();
                }
            }
            out
        });
        let apices = self.apices.iter().filter_map(|&a| map[a]).collect();
        let vortices = self
            .vortices
            .iter()
            .filter(|vx| vx.all_vertices().all(|v| map[v].is_some()))
            .map(|vx| VortexSpec {
                boundary: vx.boundary.iter().map(|&v| map[v].unwrap()).collect(),
                internals: vx.internals.iter().map(|&(v, a)| (map[v].unwrap(), a)).collect(),
                depth: vx.depth,
            })
            .collect();
        let g = AnnotatedGraph::from_parts_allow_disconnected(next, edges, rotation, apices, vortices)?;
        Ok((g, map))
    }

    /// Drops the embedding (rotation and vortex descriptions), keeping apices.
    pub fn without_embedding(&self) -> AnnotatedGraph {
        AnnotatedGraph { rotation: None, vortices: Vec::new(), ..self.clone() }
    }

    fn validate_vortices(&self) -> Result<()> {
        let mut owner = vec![None; self.n];
        for (vi, vx) in self.vortices.iter().enumerate() {
            let bad = |msg: String| Error::InvalidVortex(format!("vortex {vi}: {msg}"));
            if vx.depth == 0 {
                return Err(bad("depth must be positive".into()));
            }
            if vx.boundary.len() < 3 {
                return Err(bad("boundary cycle needs at least three vertices".into()));
            }
            for v in vx.all_vertices() {
                if v >= self.n {
                    return Err(Error::VertexOutOfRange(v));
                }
                if owner[v].is_some() {
                    return Err(bad(format!("vertex {v} listed twice or shared between vortices")));
                }
                if self.is_apex(v) {
                    return Err(bad(format!("apex {v} cannot belong to a vortex")));
                }
                owner[v] = Some(vi);
            }
            let len = vx.boundary.len();
            for i in 0..len {
                let (a, b) = (vx.boundary[i], vx.boundary[(i + 1) % len]);
                if !self.has_edge(a, b) {
                    return Err(bad(format!("boundary vertices {a} and {b} are not adjacent")));
                }
            }
            let mut load = vec![0usize; len];
            for &(_, arc) in &vx.internals {
                if arc.lo >= len || arc.hi >= len {
                    return Err(bad("arc position out of range".into()));
                }
                for p in arc.positions(len) {
                    load[p] += 1;
                }
            }
            if let Some(p) = load.iter().position(|&l| l > vx.depth) {
                return Err(bad(format!(
                    "boundary vertex {} lies on {} arcs, depth is {}",
                    vx.boundary[p], load[p], vx.depth
                )));
            }
            let position_of = |v: usize| vx.boundary.iter().position(|&b| b == v);
            for (idx, &(iv, arc)) in vx.internals.iter().enumerate() {
                for &(w, _) in &self.adj[iv] {
                    let ok = match position_of(w) {
                        Some(p) => arc.contains(p),
                        None => vx
                            .internals
                            .iter()
                            .position(|&(x, _)| x == w)
                            .is_some_and(|j| vx.arcs_overlap(idx, j)),
                    };
                    if !ok {
                        return Err(bad(format!(
                            "internal vertex {iv} has neighbor {w} outside its arc"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_rotation(&self) -> Result<()> {
        let rot = self.rotation.as_ref().unwrap();
        if rot.len() != self.n {
            return Err(Error::InvalidRotation(format!(
                "expected {} rotation entries, found {}",
                self.n,
                rot.len()
            )));
        }
        let embedded = self.embedded_mask();
        for v in 0..self.n {
            if !embedded[v] {
                if !rot[v].is_empty() {
                    return Err(Error::InvalidRotation(format!(
                        "vertex {v} is an apex or vortex-internal vertex but has a rotation entry"
                    )));
                }
                continue;
            }
            let mut expected: Vec<usize> = self.adj[v]
                .iter()
                .filter(|&&(w, _)| embedded[w])
                .map(|&(_, e)| e)
                .collect();
            let mut got = rot[v].clone();
            expected.sort_unstable();
            got.sort_unstable();
            if expected != got {
                return Err(Error::InvalidRotation(format!(
                    "rotation at vertex {v} is not a permutation of its embedded edges"
                )));
            }
        }
        let emb = Embedding::new(self)?;
        emb.check_euler(self)?;
        for (vi, vx) in self.vortices.iter().enumerate() {
            emb.find_face_with_cycle(self, &vx.boundary).ok_or_else(|| {
                Error::InvalidVortex(format!("vortex {vi}: boundary is not a face of the embedding"))
            })?;
        }
        Ok(())
    }
}
