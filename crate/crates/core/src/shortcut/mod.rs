//! Parts, tree-restricted shortcuts and their quality measures.

mod oracle;

pub use oracle::brute_force_optimal;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, RootedTree};

/// A problem found by [`validate_parts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartViolation {
    Empty { part: usize },
    OutOfRange { part: usize, vertex: usize },
    Overlap { vertex: usize, first: usize, second: usize },
    Disconnected { part: usize },
}

impl fmt::Display for PartViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartViolation::Empty { part } => write!(f, "part {part} is empty"),
            PartViolation::OutOfRange { part, vertex } => {
                write!(f, "part {part} names vertex {vertex}, which does not exist")
            }
            PartViolation::Overlap { vertex, first, second } => {
                write!(f, "vertex {vertex} is in parts {first} and {second}")
            }
            PartViolation::Disconnected { part } => write!(f, "part {part} is not connected"),
        }
    }
}

/// Checks that parts are non-empty, pairwise disjoint and induce connected
/// subgraphs.
pub fn validate_parts(g: &AnnotatedGraph, parts: &[Vec<usize>]) -> Vec<PartViolation> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            out.push(PartViolation::Empty { part: i });
        }
        for &v in part {
            if v >= n {
                out.push(PartViolation::OutOfRange { part: i, vertex: v });
                continue;
            }
            match owner[v] {
                Some(j) => out.push(PartViolation::Overlap { vertex: v, first: j, second: i }),
                None => owner[v] = Some(i),
            }
        }
    }
    let mut seen = vec![false; n];
    for (i, part) in parts.iter().enumerate() {
        let members: Vec<usize> = part.iter().copied().filter(|&v| v < n && owner[v] == Some(i)).collect();
        let Some(&start) = members.first() else { continue };
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &(w, _) in g.neighbors(u) {
                if owner[w] == Some(i) && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        let distinct = {
            let mut m = members.clone();
            m.sort_unstable();
            m.dedup();
            m.len()
        };
        if reached != distinct {
            out.push(PartViolation::Disconnected { part: i });
        }
    }
    out
}

/// Disjoint connected vertex sets of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<Vec<usize>>,
    part_of: Vec<Option<usize>>,
}

impl Partition {
    pub fn new(g: &AnnotatedGraph, parts: Vec<Vec<usize>>) -> Result<Self> {
        let violations = validate_parts(g, &parts);
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidParts(msg.join("; ")));
        }
        let mut parts = parts;
        let mut part_of = vec![None; g.vertex_count()];
        for (i, part) in parts.iter_mut().enumerate() {
            part.sort_unstable();
            part.dedup();
            for &v in part.iter() {
                part_of[v] = Some(i);
            }
        }
        Ok(Partition { parts, part_of })
    }

    pub fn empty(g: &AnnotatedGraph) -> Self {
        Partition { parts: Vec::new(), part_of: vec![None; g.vertex_count()] }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &[usize] {
        &self.parts[i]
    }

    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.part_of[v]
    }

    /// Part label per vertex.
    pub fn labels(&self) -> &[Option<usize>] {
        &self.part_of
    }
}

/// Tree-restricted shortcut: per part, a set of tree edges. Tree edges are
/// named by their child vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortcut {
    tree: RootedTree,
    edge_sets: Vec<Vec<usize>>,
}

impl Shortcut {
    /// Builds a shortcut, sorting and deduplicating each edge set. Fails if
    /// a set names a vertex that is not a non-root tree vertex.
    pub fn new(tree: RootedTree, edge_sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut edge_sets = edge_sets;
        for (i, set) in edge_sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&c) = set.iter().find(|&&c| !tree.contains(c) || tree.parent(c).is_none()) {
                return Err(Error::InvalidShortcut(format!(
                    "part {i} uses vertex {c}, which names no tree edge"
                )));
            }
        }
        Ok(Shortcut { tree, edge_sets })
    }

    /// Shortcut with every edge set empty.
    pub fn empty(tree: RootedTree, parts: usize) -> Self {
        Shortcut { tree, edge_sets: vec![Vec::new(); parts] }
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn edge_sets(&self) -> &[Vec<usize>] {
        &self.edge_sets
    }

    pub fn edge_set(&self, part: usize) -> &[usize] {
        &self.edge_sets[part]
    }

    pub fn total_edges(&self) -> usize {
        self.edge_sets.iter().map(Vec::len).sum()
    }
}

/// Checks the tree against the graph and every edge set against the tree.
pub fn validate_shortcut(g: &AnnotatedGraph, p: &Partition, s: &Shortcut) -> Vec<String> {
    let mut out = Vec::new();
    let t = s.tree();
    if t.host_size() != g.vertex_count() {
        out.push(format!(
            "tree covers {} vertex ids, graph has {}",
            t.host_size(),
            g.vertex_count()
        ));
        return out;
    }
    if t.vertex_count() != g.vertex_count() {
        out.push("tree does not span the graph".into());
    }
    for (c, par) in t.edges() {
        if !g.has_edge(c, par) {
            out.push(format!("tree edge {c}-{par} is not a graph edge"));
        }
    }
    if s.edge_sets().len() != p.len() {
        out.push(format!("{} edge sets for {} parts", s.edge_sets().len(), p.len()));
    }
    for (i, set) in s.edge_sets().iter().enumerate() {
        for &c in set {
            if !t.contains(c) || t.parent(c).is_none() {
                out.push(format!("part {i} uses vertex {c}, which names no tree edge"));
            }
        }
    }
    out
}

/// Largest number of parts sharing one tree edge.
pub fn congestion(s: &Shortcut) -> usize {
    let mut load = vec![0usize; s.tree().host_size()];
    for set in s.edge_sets() {
        for &c in set {
            load[c] += 1;
        }
    }
    load.into_iter().max().unwrap_or(0)
}

/// Per-part number of components of `(V, H_i)` that contain a vertex of the
/// part.
pub fn block_per_part(p: &Partition, s: &Shortcut) -> Vec<usize> {
    let n = s.tree().host_size();
    let mut dsu = Dsu::new(n);
    let mut mark = vec![usize::MAX; n];
    (0..p.len())
        .map(|i| {
            let set = s.edge_set(i);
            for &c in set {
                dsu.union(c, s.tree().parent(c).unwrap());
            }
            let mut count = 0;
            for &v in p.part(i) {
                let r = dsu.find(v);
                if mark[r] != i {
                    mark[r] = i;
                    count += 1;
                }
            }
            for &c in set {
                dsu.reset(c);
                dsu.reset(s.tree().parent(c).unwrap());
            }
            count
        })
        .collect()
}

pub fn block(p: &Partition, s: &Shortcut) -> usize {
    block_per_part(p, s).into_iter().max().unwrap_or(0)
}

/// The three quality numbers of a shortcut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QualityReport {
    pub congestion: usize,
    pub block: usize,
    pub diameter_used: usize,
    pub quality: usize,
}

/// `quality = block * d + congestion`.
pub fn quality(block: usize, congestion: usize, d: usize) -> Result<QualityReport> {
    if d < 1 {
        return Err(Error::InvalidParameter("quality needs d >= 1".into()));
    }
    Ok(QualityReport { congestion, block, diameter_used: d, quality: block * d + congestion })
}

impl QualityReport {
    /// Measures a shortcut with `d` set to the tree diameter (at least 1).
    pub fn measure(p: &Partition, s: &Shortcut) -> QualityReport {
        let d = s.tree().diameter().max(1);
        quality(block(p, s), congestion(s), d).expect("d is positive")
    }
}

/// Union-find with path halving and cheap per-vertex reset.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn reset(&mut self, x: usize) {
        self.parent[x] = x;
    }
}
