use crate::error::{Error, Result};
use crate::graph::{heavy_light, AnnotatedGraph, RootedTree};

use super::{validate_decomposition, TreeDecomposition};

/// Edge of a clique-sum tree: the vertices its two bags share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumEdge {
    /// Intersection of the two bags, sorted.
    pub clique: Vec<usize>,
    /// Set when the edge glues along two partial cliques at once.
    pub double: bool,
    /// Constituent partial cliques: two for a double edge, one otherwise.
    pub cliques: Vec<Vec<usize>>,
}

impl SumEdge {
    pub fn single(mut clique: Vec<usize>) -> Self {
        clique.sort_unstable();
        clique.dedup();
        SumEdge { cliques: vec![clique.clone()], clique, double: false }
    }

    pub fn double(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        let mut clique: Vec<usize> = a.iter().chain(&b).copied().collect();
        clique.sort_unstable();
        clique.dedup();
        SumEdge { clique, double: true, cliques: vec![a, b] }
    }
}

/// Rooted tree of bags glued along partial cliques. The subgraph of a bag is
/// the subgraph of the host graph induced by its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSumTree {
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    up: Vec<Option<SumEdge>>,
    children: Vec<Vec<usize>>,
    root: usize,
    k: usize,
    depth: Vec<usize>,
    preorder: Vec<usize>,
}

impl CliqueSumTree {
    /// Builds the tree from undirected bag edges, oriented away from `root`.
    pub fn new(
        bags: Vec<Vec<usize>>,
        edges: Vec<(usize, usize, SumEdge)>,
        root: usize,
        k: usize,
    ) -> Result<Self> {
        let m = bags.len();
        if root >= m {
            return Err(Error::InvalidDecomposition(format!("root bag {root} out of range")));
        }
        if edges.len() + 1 != m {
            return Err(Error::InvalidDecomposition(format!(
                "{m} bags need {} tree edges, found {}",
                m - 1,
                edges.len()
            )));
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (id, (a, b, _)) in edges.iter().enumerate() {
            if *a >= m || *b >= m {
                return Err(Error::InvalidDecomposition(format!("tree edge {a}-{b} out of range")));
            }
            adj[*a].push((*b, id));
            adj[*b].push((*a, id));
        }
        let mut parent = vec![None; m];
        let mut via = vec![usize::MAX; m];
        let mut seen = vec![false; m];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(y, id) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    via[y] = id;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDecomposition("bag tree is not connected".into()));
        }
        let mut slots: Vec<Option<SumEdge>> = edges.into_iter().map(|(_, _, e)| Some(e)).collect();
        let ups = (0..m)
            .map(|b| parent[b].map(|p| (p, slots[via[b]].take().unwrap())))
            .collect();
        Self::from_parents(bags, ups, root, k)
    }

    /// Builds the tree from a parent pointer (with edge data) per bag.
    pub fn from_parents(
        bags: Vec<Vec<usize>>,
        parents: Vec<Option<(usize, SumEdge)>>,
        root: usize,
        k: usize,
    ) -> Result<Self> {
        let m = bags.len();
        let mut parent = vec![None; m];
        let mut up = vec![None; m];
        for (b, entry) in parents.into_iter().enumerate() {
            if let Some((p, e)) = entry {
                if p >= m {
                    return Err(Error::InvalidDecomposition(format!("parent bag {p} out of range")));
                }
                parent[b] = Some(p);
                up[b] = Some(e);
            }
        }
        let shape = RootedTree::from_parents(root, parent.clone())
            .map_err(|e| Error::InvalidDecomposition(e.to_string()))?;
        if shape.vertex_count() != m {
            return Err(Error::InvalidDecomposition("bag tree is not connected".into()));
        }
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        let children = (0..m).map(|b| shape.children(b).to_vec()).collect();
        let depth = (0..m).map(|b| shape.depth(b) + 1).collect();
        let preorder = shape.preorder().to_vec();
        Ok(CliqueSumTree { bags, parent, up, children, root, k, depth, preorder })
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, i: usize) -> &[usize] {
        &self.bags[i]
    }

    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Bound on the size of a single partial clique.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn parent(&self, b: usize) -> Option<usize> {
        self.parent[b]
    }

    /// Edge to the parent bag.
    pub fn up_edge(&self, b: usize) -> Option<&SumEdge> {
        self.up[b].as_ref()
    }

    pub fn children(&self, b: usize) -> &[usize] {
        &self.children[b]
    }

    /// Level of a bag; the root is at level 1.
    pub fn depth(&self, b: usize) -> usize {
        self.depth[b]
    }

    /// Number of bag levels.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// `(parent, child, edge)` for every tree edge, by child index.
    pub fn edges(&self) -> Vec<(usize, usize, &SumEdge)> {
        (0..self.bags.len())
            .filter_map(|b| self.parent[b].map(|p| (p, b, self.up[b].as_ref().unwrap())))
            .collect()
    }

    /// The bag tree as a rooted tree over bag indices.
    pub fn shape(&self) -> RootedTree {
        RootedTree::from_parents(self.root, self.parent.clone()).expect("validated on construction")
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let edges = self.edges().into_iter().map(|(p, c, _)| (p, c)).collect();
        TreeDecomposition::new(self.bags.clone(), edges).expect("validated on construction")
    }
}

/// Checks the decomposition properties plus the clique bookkeeping: every
/// edge's clique equals the intersection of its bags, clique sizes respect
/// `k` (per constituent for double edges), and no bag has more than two
/// children over double edges.
pub fn validate_cliquesum(g: &AnnotatedGraph, t: &CliqueSumTree) -> Vec<String> {
    let mut out = validate_decomposition(g, &t.to_tree_decomposition());
    for (p, c, e) in t.edges() {
        let inter: Vec<usize> = t.bag(p).iter().copied().filter(|v| t.bag(c).binary_search(v).is_ok()).collect();
        if inter != e.clique {
            out.push(format!("edge {p}-{c}: clique {:?} differs from bag intersection {inter:?}", e.clique));
        }
        if e.double {
            if e.cliques.len() != 2 {
                out.push(format!("double edge {p}-{c} must list two partial cliques"));
            }
        } else if e.cliques.len() > 1 {
            out.push(format!("edge {p}-{c} lists several partial cliques but is not double"));
        }
        let mut union: Vec<usize> = e.cliques.iter().flatten().copied().collect();
        union.sort_unstable();
        union.dedup();
        if !e.cliques.is_empty() && union != e.clique {
            out.push(format!("edge {p}-{c}: partial cliques do not cover the clique"));
        }
        let parts: Vec<&Vec<usize>> = if e.cliques.is_empty() { vec![&e.clique] } else { e.cliques.iter().collect() };
        for cl in parts {
            if cl.len() > t.k() {
                out.push(format!("edge {p}-{c}: partial clique of size {} exceeds k = {}", cl.len(), t.k()));
            }
        }
    }
    for b in 0..t.bag_count() {
        let doubles = t.children(b).iter().filter(|&&c| t.up_edge(c).unwrap().double).count();
        if doubles > 2 {
            out.push(format!("bag {b} has {doubles} children over double edges"));
        }
    }
    out
}

/// Views a tree decomposition as a clique-sum tree rooted at bag 0, with
/// cliques equal to bag intersections and `k = width + 1`.
pub fn td_to_cliquesum(td: &TreeDecomposition) -> CliqueSumTree {
    let bags = td.bags().to_vec();
    let edges = td
        .edges()
        .iter()
        .map(|&(a, b)| {
            let inter = bags[a].iter().copied().filter(|v| bags[b].binary_search(v).is_ok()).collect();
            (a, b, SumEdge::single(inter))
        })
        .collect();
    CliqueSumTree::new(bags, edges, 0, td.width() + 1).expect("tree decomposition is a tree")
}

/// One merged bag produced by folding a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldGroup {
    /// Chain positions merged into this bag, ascending.
    pub members: Vec<usize>,
    /// Index of the parent group, `None` for the top group.
    pub parent: Option<usize>,
    /// Chain links `a` (joining positions `a` and `a + 1`) whose cliques
    /// glue this group to its parent: two for every non-top group.
    pub links: Vec<usize>,
}

/// Folds a chain of `len` bags: positions `first`, `middle` and `last` form
/// one group, and the two stretches strictly between them are folded
/// recursively below it.
pub fn fold_chain(len: usize) -> Result<Vec<FoldGroup>> {
    if len == 0 {
        return Err(Error::Empty("cannot fold an empty chain"));
    }
    let mut out = Vec::new();
    let mut work = vec![(0usize, len - 1, None::<usize>, Vec::new())];
    while let Some((l, r, parent, links)) = work.pop() {
        let m = r - l + 1;
        let mid = l + m.div_ceil(2) - 1;
        let mut members = vec![l, mid, r];
        members.dedup();
        let id = out.len();
        out.push(FoldGroup { members, parent, links });
        if mid + 1 < r {
            work.push((mid + 1, r - 1, Some(id), vec![mid, r - 1]));
        }
        if l + 1 < mid {
            work.push((l + 1, mid - 1, Some(id), vec![l, mid - 1]));
        }
    }
    Ok(out)
}

/// Reduces the depth of a clique-sum tree: every heavy chain is folded, and
/// each chain's top group hangs from the group holding the chain head's
/// original parent.
pub fn compress_cliquesum(t: &CliqueSumTree) -> CliqueSumTree {
    let shape = t.shape();
    let chains = heavy_light(&shape);
    let mut group_of = vec![usize::MAX; t.bag_count()];
    let mut bags: Vec<Vec<usize>> = Vec::new();
    let mut parents: Vec<Option<(usize, SumEdge)>> = Vec::new();
    for chain in &chains {
        let folded = fold_chain(chain.len()).expect("chains are non-empty");
        let base = bags.len();
        for (gi, grp) in folded.iter().enumerate() {
            let mut verts: Vec<usize> = grp.members.iter().flat_map(|&p| t.bag(chain[p]).iter().copied()).collect();
            verts.sort_unstable();
            verts.dedup();
            bags.push(verts);
            for &p in &grp.members {
                group_of[chain[p]] = base + gi;
            }
            let up = match grp.parent {
                Some(pg) => {
                    let cl = |a: usize| t.up_edge(chain[a + 1]).unwrap().clique.clone();
                    let edge = SumEdge::double(cl(grp.links[0]), cl(grp.links[1]));
                    Some((base + pg, edge))
                }
                None => {
                    let head = chain[0];
                    t.parent(head).map(|p| (group_of[p], t.up_edge(head).unwrap().clone()))
                }
            };
            parents.push(up);
        }
    }
    let root = group_of[t.root()];
    CliqueSumTree::from_parents(bags, parents, root, t.k()).expect("folding keeps a tree")
}
