use crate::error::{Error, Result};
use crate::weight::Weight;

use super::{AnnotatedGraph, Edge};

/// Directed copy of an edge: `Dart(2e)` runs `u -> v`, `Dart(2e + 1)` runs
/// `v -> u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub usize);

impl Dart {
    pub fn from_tail(g: &AnnotatedGraph, edge: usize, tail: usize) -> Dart {
        if g.edge(edge).u == tail {
            Dart(2 * edge)
        } else {
            Dart(2 * edge + 1)
        }
    }

    pub fn edge(self) -> usize {
        self.0 / 2
    }

    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    pub fn tail(self, g: &AnnotatedGraph) -> usize {
        let e = g.edge(self.edge());
        if self.0 & 1 == 0 {
            e.u
        } else {
            e.v
        }
    }

    pub fn head(self, g: &AnnotatedGraph) -> usize {
        self.twin().tail(g)
    }
}

/// Faces of the embedded part of a graph.
///
/// The face to the left of dart `a -> b` continues with the edge that follows
/// `ab` in the rotation of `b`.
#[derive(Debug, Clone)]
pub struct Embedding {
    next: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Vec<Dart>>,
    face_component: Vec<usize>,
    vertex_component: Vec<usize>,
    component_count: usize,
}

impl Embedding {
    pub fn new(g: &AnnotatedGraph) -> Result<Self> {
        let rot = g.rotation().ok_or(Error::MissingRotation)?;
        let m = g.edge_count();
        let mut pos = vec![usize::MAX; 2 * m];
        for (v, list) in rot.iter().enumerate() {
            for (i, &e) in list.iter().enumerate() {
                if e >= m {
                    return Err(Error::EdgeOutOfRange(e));
                }
                let side = Dart::from_tail(g, e, v).0;
                if pos[side] != usize::MAX {
                    return Err(Error::InvalidRotation(format!("edge {e} repeated at vertex {v}")));
                }
                pos[side] = i;
            }
        }
        let mut next = vec![usize::MAX; 2 * m];
        for d in 0..2 * m {
            if pos[d] == usize::MAX || pos[d ^ 1] == usize::MAX {
                continue;
            }
            let dart = Dart(d);
            let b = dart.head(g);
            let list = &rot[b];
            let e2 = list[(pos[d ^ 1] + 1) % list.len()];
            next[d] = Dart::from_tail(g, e2, b).0;
        }
        let mut face_of = vec![usize::MAX; 2 * m];
        let mut faces = Vec::new();
        for start in 0..2 * m {
            if next[start] == usize::MAX || face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut face = Vec::new();
            let mut d = start;
            while face_of[d] == usize::MAX {
                face_of[d] = id;
                face.push(Dart(d));
                d = next[d];
            }
            if d != start {
                return Err(Error::InvalidRotation("face traversal is not a permutation".into()));
            }
            faces.push(face);
        }
        let (vertex_comp, component_count) = embedded_components(g);
        let face_component = faces.iter().map(|f| vertex_comp[f[0].tail(g)]).collect();
        Ok(Embedding {
            next,
            face_of,
            faces,
            face_component,
            vertex_component: vertex_comp,
            component_count,
        })
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn face_darts(&self, f: usize) -> &[Dart] {
        &self.faces[f]
    }

    pub fn face_vertices(&self, g: &AnnotatedGraph, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|d| d.tail(g)).collect()
    }

    /// Face to the left of `d`, if the dart is embedded.
    pub fn face_of(&self, d: Dart) -> Option<usize> {
        let f = self.face_of[d.0];
        (f != usize::MAX).then_some(f)
    }

    pub fn next_dart(&self, d: Dart) -> Option<Dart> {
        let n = self.next[d.0];
        (n != usize::MAX).then_some(Dart(n))
    }

    /// Component (of the embedded subgraph) each face belongs to.
    pub fn face_component(&self, f: usize) -> usize {
        self.face_component[f]
    }

    /// Component of an embedded vertex; `None` for apices and vortex
    /// internals.
    pub fn vertex_component(&self, v: usize) -> Option<usize> {
        let c = self.vertex_component[v];
        (c != usize::MAX).then_some(c)
    }

    /// For each embedded component with at least one edge, its designated
    /// outer face: the longest face, ties broken by lowest face index.
    pub fn outer_faces(&self) -> Vec<usize> {
        let mut best: Vec<Option<usize>> = vec![None; self.component_count];
        for (f, face) in self.faces.iter().enumerate() {
            let c = self.face_component[f];
            match best[c] {
                Some(b) if self.faces[b].len() >= face.len() => {}
                _ => best[c] = Some(f),
            }
        }
        best.into_iter().flatten().collect()
    }

    pub fn is_outer_face(&self, f: usize) -> bool {
        self.outer_faces().contains(&f)
    }

    /// Checks Euler's formula `V - E + F = 2` on every embedded component
    /// that has an edge.
    pub fn check_euler(&self, g: &AnnotatedGraph) -> Result<()> {
        let (comp, count) = embedded_components(g);
        let mut v = vec![0i64; count];
        let mut e = vec![0i64; count];
        let mut f = vec![0i64; count];
        for x in 0..g.vertex_count() {
            if comp[x] != usize::MAX {
                v[comp[x]] += 1;
            }
        }
        let embedded = g.embedded_mask();
        for edge in g.edges() {
            if embedded[edge.u] && embedded[edge.v] {
                e[comp[edge.u]] += 1;
            }
        }
        for &c in &self.face_component {
            f[c] += 1;
        }
        for c in 0..count {
            if e[c] > 0 && v[c] - e[c] + f[c] != 2 {
                return Err(Error::InvalidRotation(format!(
                    "rotation is not planar: V - E + F = {} on a component",
                    v[c] - e[c] + f[c]
                )));
            }
        }
        Ok(())
    }

    /// Face whose boundary walk visits `cycle` in order or in reverse.
    pub fn find_face_with_cycle(&self, g: &AnnotatedGraph, cycle: &[usize]) -> Option<usize> {
        let len = cycle.len();
        let e = g.edge_between(cycle[0], cycle[1])?;
        for dart in [Dart::from_tail(g, e, cycle[0]), Dart::from_tail(g, e, cycle[1])] {
            let f = self.face_of(dart)?;
            if self.faces[f].len() != len {
                continue;
            }
            let mut seq = Vec::with_capacity(len);
            let mut d = dart;
            for _ in 0..len {
                seq.push(d.tail(g));
                d = self.next_dart(d)?;
            }
            let forward = seq.iter().enumerate().all(|(i, &x)| x == cycle[i]);
            let backward = seq
                .iter()
                .enumerate()
                .all(|(i, &x)| x == cycle[(1 + len - i) % len]);
            if forward || backward {
                return Some(f);
            }
        }
        None
    }
}

/// Component id per embedded vertex (`usize::MAX` for the rest), counting
/// only edges between embedded vertices.
fn embedded_components(g: &AnnotatedGraph) -> (Vec<usize>, usize) {
    let embedded = g.embedded_mask();
    let comps = g.induced_components(&embedded);
    let mut comp = vec![usize::MAX; g.vertex_count()];
    for (i, list) in comps.iter().enumerate() {
        for &v in list {
            comp[v] = i;
        }
    }
    (comp, comps.len())
}

/// Vertex sequences of all faces of the embedding.
pub fn faces(g: &AnnotatedGraph) -> Result<Vec<Vec<usize>>> {
    let emb = Embedding::new(g)?;
    Ok((0..emb.face_count()).map(|f| emb.face_vertices(g, f)).collect())
}

/// Result of replacing every vortex by a star vertex inside its face.
#[derive(Debug, Clone)]
pub struct StarReplaced {
    pub graph: AnnotatedGraph,
    /// Old vertex id to new id; `None` for removed vortex-internal vertices.
    pub to_new: Vec<Option<usize>>,
    /// New vertex id to old id; `None` for star vertices.
    pub to_old: Vec<Option<usize>>,
    /// New id of the star vertex replacing vortex `i`.
    pub stars: Vec<usize>,
}

impl AnnotatedGraph {
    /// Deletes every vortex-internal vertex and places a fresh star vertex in
    /// each vortex face, adjacent to all of its boundary vertices. The result
    /// is embedded and carries no vortices.
    pub fn star_replace(&self) -> Result<StarReplaced> {
        let emb = Embedding::new(self)?;
        let internal = self.vortex_internal_mask();
        let mut to_new = vec![None; self.n];
        let mut to_old = Vec::new();
        for v in 0..self.n {
            if !internal[v] {
                to_new[v] = Some(to_old.len());
                to_old.push(Some(v));
            }
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (to_new[e.u], to_new[e.v]) {
                edge_map[id] = Some(edges.len());
                edges.push(Edge::new(a, b, e.w));
            }
        }
        let rot = self.rotation.as_ref().unwrap();
        let mut new_rot: Vec<Vec<usize>> = (0..self.n)
            .filter(|&v| !internal[v])
            .map(|v| rot[v].iter().map(|&e| edge_map[e].unwrap()).collect())
            .collect();
        let mut stars = Vec::new();
        for vx in &self.vortices {
            let f = emb
                .find_face_with_cycle(self, &vx.boundary)
                .ok_or_else(|| Error::InvalidVortex("boundary is not a face".into()))?;
            let star = to_old.len();
            to_old.push(None);
            new_rot.push(Vec::new());
            stars.push(star);
            let mut spokes = Vec::new();
            for &d in emb.face_darts(f) {
                let b = d.head(self);
                let nb = to_new[b].unwrap();
                let spoke = edges.len();
                edges.push(Edge::new(nb, star, Weight::ONE));
                let e_new = edge_map[d.edge()].unwrap();
                let list = &mut new_rot[nb];
                let at = list.iter().position(|&x| x == e_new).unwrap();
                list.insert(at + 1, spoke);
                spokes.push(spoke);
            }
            spokes.reverse();
            new_rot[star] = spokes;
        }
        let n = to_old.len();
        let apices = self.apices.iter().filter_map(|&a| to_new[a]).collect();
        let graph = AnnotatedGraph::from_parts_allow_disconnected(n, edges, Some(new_rot), apices, Vec::new())?;
        Ok(StarReplaced { graph, to_new, to_old, stars })
    }
}
