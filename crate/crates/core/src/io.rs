//! JSON file formats for graphs, parts, trees, shortcuts, decompositions and
//! gate dumps.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::decomp::{CliqueSumTree, SumEdge};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, ArcSpan, Edge, RootedTree, VortexSpec};
use crate::shortcut::{Partition, Shortcut};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexFile {
    pub boundary: Vec<usize>,
    pub internals: Vec<(usize, (usize, usize))>,
    pub depth: usize,
}

/// `{"n", "edges": [[u, v, w]], "rotation"?, "apices", "vortices", "decomposition"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, Weight)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub apices: Vec<usize>,
    #[serde(default)]
    pub vortices: Vec<VortexFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumEdgeFile {
    pub clique: Vec<usize>,
    pub double: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliques: Option<Vec<Vec<usize>>>,
}

/// `{"bags", "edges": [[i, j, {"clique", "double", "cliques"?}]], "root"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize, SumEdgeFile)>,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartsFile {
    pub parts: Vec<Vec<usize>>,
}

/// `{"root", "edges": [[child, parent]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub root: usize,
    pub edges: Vec<(usize, usize)>,
}

/// `{"tree_edges": [[child, parent]], "H": [[index into tree_edges]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortcutFile {
    pub tree_edges: Vec<(usize, usize)>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<usize>>,
}

impl GraphFile {
    pub fn from_graph(g: &AnnotatedGraph, decomposition: Option<&CliqueSumTree>) -> Self {
        GraphFile {
            n: g.vertex_count(),
            edges: g.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
            rotation: g.rotation().map(<[_]>::to_vec),
            apices: g.apices().to_vec(),
            vortices: g
                .vortices()
                .iter()
                .map(|vx| VortexFile {
                    boundary: vx.boundary.clone(),
                    internals: vx.internals.iter().map(|&(v, a)| (v, (a.lo, a.hi))).collect(),
                    depth: vx.depth,
                })
                .collect(),
            decomposition: decomposition.map(DecompositionFile::from_tree),
        }
    }

    pub fn to_graph(&self) -> Result<(AnnotatedGraph, Option<CliqueSumTree>)> {
        let edges = self.edges.iter().map(|&(u, v, w)| Edge::new(u, v, w)).collect();
        let vortices = self
            .vortices
            .iter()
            .map(|vx| VortexSpec {
                boundary: vx.boundary.clone(),
                internals: vx
                    .internals
                    .iter()
                    .map(|&(v, (lo, hi))| (v, ArcSpan::new(lo, hi)))
                    .collect(),
                depth: vx.depth,
            })
            .collect();
        let g = AnnotatedGraph::from_parts(
            self.n,
            edges,
            self.rotation.clone(),
            self.apices.clone(),
            vortices,
        )?;
        let cst = self.decomposition.as_ref().map(DecompositionFile::to_tree).transpose()?;
        Ok((g, cst))
    }
}

impl DecompositionFile {
    pub fn from_tree(t: &CliqueSumTree) -> Self {
        DecompositionFile {
            bags: t.bags().to_vec(),
            edges: (0..t.bag_count())
                .filter_map(|b| {
                    let p = t.parent(b)?;
                    let e = t.up_edge(b)?;
                    let cliques = e.double.then(|| e.cliques.clone());
                    Some((p, b, SumEdgeFile { clique: e.clique.clone(), double: e.double, cliques }))
                })
                .collect(),
            root: t.root(),
        }
    }

    /// The clique bound `k` is the largest constituent clique.
    pub fn to_tree(&self) -> Result<CliqueSumTree> {
        let mut k = 0;
        let edges = self
            .edges
            .iter()
            .map(|(a, b, e)| {
                let se = match &e.cliques {
                    Some(cs) if cs.len() == 2 => SumEdge::double(cs[0].clone(), cs[1].clone()),
                    Some(cs) if cs.len() == 1 => SumEdge::single(cs[0].clone()),
                    Some(cs) => {
                        return Err(Error::InvalidDecomposition(format!(
                            "edge {a}-{b} lists {} cliques",
                            cs.len()
                        )))
                    }
                    None if e.double => {
                        return Err(Error::InvalidDecomposition(format!(
                            "double edge {a}-{b} needs its two cliques"
                        )))
                    }
                    None => SumEdge::single(e.clique.clone()),
                };
                let mut union = se.clique.clone();
                let mut given = e.clique.clone();
                union.sort_unstable();
                given.sort_unstable();
                given.dedup();
                if union != given {
                    return Err(Error::InvalidDecomposition(format!(
                        "edge {a}-{b}: clique does not match its constituents"
                    )));
                }
                k = se.cliques.iter().map(Vec::len).fold(k, usize::max);
                Ok((*a, *b, se))
            })
            .collect::<Result<Vec<_>>>()?;
        CliqueSumTree::new(self.bags.clone(), edges, self.root, k)
    }
}

impl TreeFile {
    pub fn from_tree(t: &RootedTree) -> Self {
        TreeFile { root: t.root(), edges: t.edges() }
    }

    pub fn to_tree(&self, n: usize) -> Result<RootedTree> {
        RootedTree::from_edges(n, self.root, &self.edges)
    }
}

impl ShortcutFile {
    pub fn from_shortcut(s: &Shortcut) -> Self {
        let tree_edges = s.tree().edges();
        let h = s
            .edge_sets()
            .iter()
            .map(|set| {
                set.iter()
                    .map(|c| tree_edges.binary_search_by_key(c, |&(x, _)| x).expect("tree edge"))
                    .collect()
            })
            .collect();
        ShortcutFile { tree_edges, h }
    }

    /// The root is the one tree vertex that never appears as a child; a
    /// tree without edges is the single vertex 0.
    pub fn to_shortcut(&self, n: usize) -> Result<Shortcut> {
        let mut is_child = vec![false; n];
        let mut in_tree = vec![false; n];
        for &(c, p) in &self.tree_edges {
            for v in [c, p] {
                if v >= n {
                    return Err(Error::VertexOutOfRange(v));
                }
                in_tree[v] = true;
            }
            is_child[c] = true;
        }
        let roots: Vec<usize> = (0..n).filter(|&v| in_tree[v] && !is_child[v]).collect();
        let root = match roots.as_slice() {
            [] if self.tree_edges.is_empty() => 0,
            [r] => *r,
            _ => {
                return Err(Error::InvalidShortcut(format!(
                    "tree edges have {} roots",
                    roots.len()
                )))
            }
        };
        let tree = RootedTree::from_edges(n, root, &self.tree_edges)?;
        let sets = self
            .h
            .iter()
            .map(|set| {
                set.iter()
                    .map(|&i| {
                        self.tree_edges
                            .get(i)
                            .map(|&(c, _)| c)
                            .ok_or(Error::EdgeOutOfRange(i))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Shortcut::new(tree, sets)?;
        if s.tree().edges() != self.sorted_edges() {
            return Err(Error::InvalidShortcut("tree edges are not oriented child to parent".into()));
        }
        Ok(s)
    }

    fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut e = self.tree_edges.clone();
        e.sort_unstable();
        e
    }
}

pub fn parts_from_file(g: &AnnotatedGraph, f: &PartsFile) -> Result<Partition> {
    Partition::new(g, f.parts.clone())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes compact JSON followed by a newline. Output is byte-identical for
/// identical values.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
