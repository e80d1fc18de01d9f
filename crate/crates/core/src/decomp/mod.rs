//! Tree decompositions and clique-sum decomposition trees.

mod cliquesum;

pub use cliquesum::{
    compress_cliquesum, fold_chain, td_to_cliquesum, validate_cliquesum, CliqueSumTree, FoldGroup,
    SumEdge,
};

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VortexSpec};

/// Bags of vertices connected by a tree over bag indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Sorts each bag and checks that `edges` form a tree over the bags.
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if bags.is_empty() {
            return Err(Error::InvalidDecomposition("no bags".into()));
        }
        if edges.len() + 1 != bags.len() {
            return Err(Error::InvalidDecomposition(format!(
                "{} bags need {} tree edges, found {}",
                bags.len(),
                bags.len() - 1,
                edges.len()
            )));
        }
        let mut dsu = crate::shortcut::Dsu::new(bags.len());
        for &(a, b) in &edges {
            if a >= bags.len() || b >= bags.len() {
                return Err(Error::InvalidDecomposition(format!("tree edge {a}-{b} out of range")));
            }
            if !dsu.union(a, b) {
                return Err(Error::InvalidDecomposition("bag tree has a cycle".into()));
            }
        }
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        Ok(TreeDecomposition { bags, edges })
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Applies `map` to every vertex, dropping vertices mapped to `None`.
    pub fn map_vertices(&self, map: impl Fn(usize) -> Option<usize>) -> TreeDecomposition {
        let bags = self
            .bags
            .iter()
            .map(|b| {
                let mut nb: Vec<usize> = b.iter().filter_map(|&v| map(v)).collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        TreeDecomposition { bags, edges: self.edges.clone() }
    }

    /// Adds `extra` to every bag.
    pub fn with_everywhere(&self, extra: &[usize]) -> TreeDecomposition {
        let bags = self
            .bags
            .iter()
            .map(|b| {
                let mut nb = b.clone();
                nb.extend_from_slice(extra);
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        TreeDecomposition { bags, edges: self.edges.clone() }
    }
}

/// Checks coverage of vertices and edges and connectivity of every vertex's
/// bag set.
pub fn validate_decomposition(g: &AnnotatedGraph, td: &TreeDecomposition) -> Vec<String> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                out.push(format!("bag {i} names vertex {v}, which does not exist"));
            } else {
                holders[v].push(i);
            }
        }
    }
    for (v, h) in holders.iter().enumerate() {
        if h.is_empty() {
            out.push(format!("vertex {v} is in no bag"));
        }
    }
    for (id, e) in g.edges().iter().enumerate() {
        let covered = holders[e.u].iter().any(|&b| td.bags()[b].binary_search(&e.v).is_ok());
        if !covered {
            out.push(format!("edge {id} ({}-{}) is in no bag", e.u, e.v));
        }
    }
    let adj = td.adjacency();
    let mut mark = vec![usize::MAX; td.bags().len()];
    for (v, h) in holders.iter().enumerate() {
        let Some(&start) = h.first() else { continue };
        let mut stack = vec![start];
        mark[start] = v;
        let mut reached = 1;
        while let Some(b) = stack.pop() {
            for &c in &adj[b] {
                if mark[c] != v && td.bags()[c].binary_search(&v).is_ok() {
                    mark[c] = v;
                    reached += 1;
                    stack.push(c);
                }
            }
        }
        if reached != h.len() {
            out.push(format!("bags holding vertex {v} are not connected in the tree"));
        }
    }
    out
}

/// Elimination-order decomposition using the min-fill heuristic (ties by
/// smaller degree, then smaller id). Fill values are refreshed only for the
/// neighbors of each eliminated vertex.
pub fn elimination_decomposition(g: &AnnotatedGraph) -> TreeDecomposition {
    let n = g.vertex_count();
    let words = n.div_ceil(64);
    let mut bits = vec![0u64; n * words];
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in g.edges() {
        bits[e.u * words + e.v / 64] |= 1 << (e.v % 64);
        bits[e.v * words + e.u / 64] |= 1 << (e.u % 64);
        nbrs[e.u].insert(e.v);
        nbrs[e.v].insert(e.u);
    }
    let adjacent = |bits: &[u64], a: usize, b: usize| bits[a * words + b / 64] >> (b % 64) & 1 == 1;
    let fill = |bits: &[u64], nbrs: &[BTreeSet<usize>], u: usize| -> usize {
        let list: Vec<usize> = nbrs[u].iter().copied().collect();
        let mut missing = 0;
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                if !adjacent(bits, list[i], list[j]) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut key: Vec<(usize, usize, usize)> = (0..n).map(|u| (fill(&bits, &nbrs, u), nbrs[u].len(), u)).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> = key.iter().copied().collect();
    let mut position = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    while let Some(top) = queue.pop_first() {
        let v = top.2;
        position[v] = order.len();
        order.push(v);
        let list: Vec<usize> = nbrs[v].iter().copied().collect();
        let mut bag = list.clone();
        bag.push(v);
        bags.push(bag);
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (a, b) = (list[i], list[j]);
                if !adjacent(&bits, a, b) {
                    bits[a * words + b / 64] |= 1 << (b % 64);
                    bits[b * words + a / 64] |= 1 << (a % 64);
                    nbrs[a].insert(b);
                    nbrs[b].insert(a);
                }
            }
        }
        for &u in &list {
            nbrs[u].remove(&v);
        }
        for &u in &list {
            queue.remove(&key[u]);
            key[u] = (fill(&bits, &nbrs, u), nbrs[u].len(), u);
            queue.insert(key[u]);
        }
    }
    // Bag i (of order[i]) hangs below the bag of its earliest-eliminated
    // later neighbor; leftover roots are chained.
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let next = bag.iter().filter(|&&u| u != order[i]).map(|&u| position[u]).min();
        match next {
            Some(j) => edges.push((i, j)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    compact(TreeDecomposition::new(bags, edges).expect("elimination yields a tree"))
}

/// Path decomposition from BFS layers: bag `i` is layer `i` plus layer
/// `i + 1`. Disconnected graphs get one layering per component.
pub fn layered_decomposition(g: &AnnotatedGraph, root: usize) -> TreeDecomposition {
    let n = g.vertex_count();
    let mut layer_of = vec![usize::MAX; n];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut base = 0;
    let starts = std::iter::once(root).chain(0..n);
    for s in starts {
        if layer_of[s] != usize::MAX {
            continue;
        }
        layer_of[s] = base;
        let mut queue = VecDeque::from([s]);
        let mut top = base;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in g.neighbors(u) {
                if layer_of[w] == usize::MAX {
                    layer_of[w] = layer_of[u] + 1;
                    top = top.max(layer_of[w]);
                    queue.push_back(w);
                }
            }
        }
        base = top + 2;
    }
    layers.resize(base, Vec::new());
    for v in 0..n {
        layers[layer_of[v]].push(v);
    }
    let bags: Vec<Vec<usize>> = (0..layers.len().saturating_sub(1).max(1))
        .map(|i| {
            let mut b = layers[i].clone();
            if let Some(next) = layers.get(i + 1) {
                b.extend_from_slice(next);
            }
            b
        })
        .collect();
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    compact(TreeDecomposition::new(bags, edges).expect("path of bags"))
}

/// Merges every bag contained in a neighboring bag into that neighbor and
/// drops empty bags.
fn compact(td: TreeDecomposition) -> TreeDecomposition {
    let m = td.bags.len();
    let adj = td.adjacency();
    let mut alive = vec![true; m];
    let mut target: Vec<usize> = (0..m).collect();
    let mut links: Vec<BTreeSet<usize>> = adj.iter().map(|l| l.iter().copied().collect()).collect();
    for i in 0..m {
        let subset_of = links[i].iter().copied().find(|&j| {
            td.bags[i].iter().all(|v| td.bags[j].binary_search(v).is_ok())
        });
        let Some(j) = subset_of else { continue };
        alive[i] = false;
        target[i] = j;
        let others: Vec<usize> = links[i].iter().copied().filter(|&x| x != j).collect();
        for x in others {
            links[x].remove(&i);
            links[x].insert(j);
            links[j].insert(x);
        }
        links[j].remove(&i);
        links[i].clear();
    }
    let mut new_id = vec![usize::MAX; m];
    let mut bags = Vec::new();
    for i in 0..m {
        if alive[i] {
            new_id[i] = bags.len();
            bags.push(td.bags[i].clone());
        }
    }
    let mut edges = Vec::new();
    for i in 0..m {
        if alive[i] {
            for &j in &links[i] {
                if i < j {
                    edges.push((new_id[i], new_id[j]));
                }
            }
        }
    }
    TreeDecomposition::new(bags, edges).expect("compaction keeps a tree")
}

/// Decomposition of an embedded planar graph without apices or vortices:
/// the narrower of the min-fill and BFS-layer decompositions.
pub fn planar_tree_decomposition(g: &AnnotatedGraph) -> Result<TreeDecomposition> {
    if g.rotation().is_none() {
        return Err(Error::MissingRotation);
    }
    if !g.apices().is_empty() || !g.vortices().is_empty() {
        return Err(Error::InvalidParameter(
            "planar decomposition expects no apices or vortices".into(),
        ));
    }
    let a = elimination_decomposition(g);
    let b = layered_decomposition(g, 0);
    Ok(if b.width() < a.width() { b } else { a })
}

/// Adds every internal vertex of `vx` to each bag meeting its arc. `td`
/// decomposes the graph without the vortex-internal vertices.
pub fn augment_vortex(td: &TreeDecomposition, vx: &VortexSpec) -> Result<TreeDecomposition> {
    let mut holders: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &b in &vx.boundary {
        holders.insert(b, Vec::new());
    }
    for (i, bag) in td.bags.iter().enumerate() {
        for v in bag {
            if let Some(h) = holders.get_mut(v) {
                h.push(i);
            }
        }
    }
    if let Some((&b, _)) = holders.iter().find(|(_, h)| h.is_empty()) {
        return Err(Error::InvalidDecomposition(format!(
            "boundary vertex {b} of the vortex is in no bag"
        )));
    }
    let mut bags = td.bags.clone();
    for idx in 0..vx.internals.len() {
        let v = vx.internals[idx].0;
        let mut targets: Vec<usize> = vx
            .arc_vertices(idx)
            .iter()
            .flat_map(|b| holders[b].iter().copied())
            .collect();
        targets.sort_unstable();
        targets.dedup();
        for t in targets {
            bags[t].push(v);
        }
    }
    TreeDecomposition::new(bags, td.edges.clone())
}

/// Decomposition of an embedded graph with vortices: each vortex is replaced
/// by a star vertex, the planar result is computed, star vertices are
/// dropped and vortex internals added back along their arcs. Apices, if
/// any, join every bag.
pub fn vortex_tree_decomposition(g: &AnnotatedGraph) -> Result<TreeDecomposition> {
    let apex_mask: Vec<bool> = (0..g.vertex_count()).map(|v| g.is_apex(v)).collect();
    let (h, map) = if g.apices().is_empty() {
        (g.clone(), (0..g.vertex_count()).map(Some).collect())
    } else {
        g.without_vertices(&apex_mask)?
    };
    let inverse = invert(&map, h.vertex_count());
    let star = h.star_replace()?;
    let planar = planar_tree_decomposition(&star.graph)?;
    let mut td = planar.map_vertices(|v| star.to_old[v]);
    for vx in h.vortices() {
        td = augment_vortex(&td, vx)?;
    }
    let td = td.map_vertices(|v| Some(inverse[v]));
    Ok(td.with_everywhere(g.apices()))
}

/// Decomposition of an arbitrary annotated graph: embedding-aware when a
/// rotation is present, min-fill otherwise.
pub fn tree_decomposition(g: &AnnotatedGraph) -> Result<TreeDecomposition> {
    if g.rotation().is_none() {
        return Ok(elimination_decomposition(g));
    }
    if g.apices().is_empty() && g.vortices().is_empty() {
        return planar_tree_decomposition(g);
    }
    let via_embedding = vortex_tree_decomposition(g)?;
    let direct = elimination_decomposition(g);
    Ok(if direct.width() < via_embedding.width() { direct } else { via_embedding })
}

fn invert(map: &[Option<usize>], len: usize) -> Vec<usize> {
    let mut inv = vec![usize::MAX; len];
    for (old, new) in map.iter().enumerate() {
        if let Some(nv) = new {
            inv[*nv] = old;
        }
    }
    inv
}
