use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::AnnotatedGraph;

const NONE: usize = usize::MAX;

/// Rooted tree over a subset of the vertices `0..n` of a host graph.
///
/// Tree edges are named by their child endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    preorder: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    size: Vec<usize>,
    diameter: usize,
}

impl RootedTree {
    /// Builds a tree from a parent array over `0..parent.len()`. Vertices
    /// other than `root` with no parent are not covered by the tree.
    pub fn from_parents(root: usize, parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if root >= n {
            return Err(Error::VertexOutOfRange(root));
        }
        if parent[root].is_some() {
            return Err(Error::InvalidShortcut(format!("root {root} has a parent")));
        }
        let mut children = vec![Vec::new(); n];
        let mut par = vec![NONE; n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::VertexOutOfRange(p));
                }
                par[v] = p;
                children[p].push(v);
            }
        }
        let mut depth = vec![NONE; n];
        let mut preorder = Vec::new();
        let mut tin = vec![NONE; n];
        let mut tout = vec![NONE; n];
        let mut stack = vec![(root, false)];
        depth[root] = 0;
        while let Some((v, done)) = stack.pop() {
            if done {
                tout[v] = preorder.len();
                continue;
            }
            tin[v] = preorder.len();
            preorder.push(v);
            stack.push((v, true));
            for &c in children[v].iter().rev() {
                if depth[c] != NONE {
                    return Err(Error::InvalidShortcut(format!("tree has a cycle through {c}")));
                }
                depth[c] = depth[v] + 1;
                stack.push((c, false));
            }
        }
        for v in 0..n {
            if par[v] != NONE && depth[v] == NONE {
                return Err(Error::InvalidShortcut(format!(
                    "vertex {v} has a parent but is not connected to the root"
                )));
            }
        }
        let mut size = vec![0; n];
        for &v in preorder.iter().rev() {
            size[v] += 1;
            if par[v] != NONE {
                size[par[v]] += size[v];
            }
        }
        let mut tree = RootedTree {
            root,
            parent: par,
            children,
            depth,
            preorder,
            tin,
            tout,
            size,
            diameter: 0,
        };
        tree.diameter = tree.compute_diameter();
        Ok(tree)
    }

    /// Orients an undirected edge list away from `root`.
    pub fn from_edges(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if root >= n {
            return Err(Error::VertexOutOfRange(root));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange(a.max(b)));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != edges.len() + 1 {
            return Err(Error::InvalidShortcut(
                "tree edges do not form a tree connected to the root".into(),
            ));
        }
        Self::from_parents(root, parent)
    }

    /// Size of the host vertex range.
    pub fn host_size(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.depth.len() && self.depth[v] != NONE
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != NONE).then_some(p)
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Maximum depth of a covered vertex.
    pub fn height(&self) -> usize {
        self.preorder.iter().map(|&v| self.depth[v]).max().unwrap_or(0)
    }

    /// Length of the longest path in the tree.
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    /// Covered vertices in depth-first preorder (children visited by id).
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    pub fn vertex_count(&self) -> usize {
        self.preorder.len()
    }

    pub fn edge_count(&self) -> usize {
        self.preorder.len() - 1
    }

    /// Position of `v` in the preorder.
    pub fn tin(&self, v: usize) -> usize {
        self.tin[v]
    }

    /// One past the last preorder position in the subtree of `v`.
    pub fn tout(&self, v: usize) -> usize {
        self.tout[v]
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        self.size[v]
    }

    /// True if `a` is an ancestor of `b` (or equal to it).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    /// Tree edges as `(child, parent)` pairs, ordered by child id.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.parent.len())
            .filter(|&v| self.parent[v] != NONE)
            .map(|v| (v, self.parent[v]))
            .collect()
    }

    /// Vertices of the tree path from `u` to `v`.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut a, mut b) = (u, v);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[a] > self.depth[b] {
            left.push(a);
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            right.push(b);
            b = self.parent[b];
        }
        while a != b {
            left.push(a);
            right.push(b);
            a = self.parent[a];
            b = self.parent[b];
        }
        left.push(a);
        left.extend(right.into_iter().rev());
        left
    }

    fn compute_diameter(&self) -> usize {
        let mut down = vec![0usize; self.parent.len()];
        let mut best = 0;
        for &v in self.preorder.iter().rev() {
            let mut top = [0usize; 2];
            for &c in &self.children[v] {
                let h = down[c] + 1;
                if h > top[0] {
                    top = [h, top[0]];
                } else if h > top[1] {
                    top[1] = h;
                }
            }
            down[v] = top[0];
            best = best.max(top[0] + top[1]);
        }
        best
    }
}

/// BFS spanning tree of `g` from `root`; neighbors are scanned by id.
pub fn bfs_tree(g: &AnnotatedGraph, root: usize) -> Result<RootedTree> {
    if root >= g.vertex_count() {
        return Err(Error::VertexOutOfRange(root));
    }
    let tree = bfs_tree_within(g, root, None);
    if tree.vertex_count() != g.vertex_count() {
        let v = (0..g.vertex_count()).find(|&v| !tree.contains(v)).unwrap();
        return Err(Error::Disconnected(v));
    }
    Ok(tree)
}

/// BFS tree from `root` over the vertices allowed by `mask` (all when
/// `None`), spanning whatever is reachable.
pub fn bfs_tree_within(g: &AnnotatedGraph, root: usize, mask: Option<&[bool]>) -> RootedTree {
    let n = g.vertex_count();
    let allowed = |v: usize| mask.is_none_or(|m| m[v]);
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(w, _) in g.neighbors(u) {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    RootedTree::from_parents(root, parent).expect("BFS parents form a tree")
}

/// Binary-lifting lowest common ancestor queries.
#[derive(Debug, Clone)]
pub struct Lca {
    up: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl Lca {
    pub fn new(t: &RootedTree) -> Self {
        let n = t.host_size();
        let levels = (usize::BITS - n.max(2).leading_zeros()) as usize;
        let mut up = vec![vec![NONE; n]; levels];
        for &v in t.preorder() {
            up[0][v] = t.parent(v).unwrap_or(v);
        }
        for k in 1..levels {
            for &v in t.preorder() {
                up[k][v] = up[k - 1][up[k - 1][v]];
            }
        }
        Lca { up, depth: t.depth.clone() }
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = if self.depth[a] >= self.depth[b] { (a, b) } else { (b, a) };
        let diff = self.depth[a] - self.depth[b];
        for (k, row) in self.up.iter().enumerate() {
            if diff >> k & 1 == 1 {
                a = row[a];
            }
        }
        if a == b {
            return a;
        }
        for row in self.up.iter().rev() {
            if row[a] != row[b] {
                a = row[a];
                b = row[b];
            }
        }
        self.up[0][a]
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        let c = self.lca(a, b);
        self.depth[a] + self.depth[b] - 2 * self.depth[c]
    }
}

/// Vertices of the tree path between `u` and `v`.
pub fn tree_path(t: &RootedTree, u: usize, v: usize) -> Vec<usize> {
    t.path(u, v)
}

/// Heavy-light decomposition: each vertex continues its chain into the child
/// with the largest subtree (smallest id on ties). Chains are listed top-down
/// and ordered by the preorder position of their head.
pub fn heavy_light(t: &RootedTree) -> Vec<Vec<usize>> {
    let heavy = |v: usize| -> Option<usize> {
        t.children(v)
            .iter()
            .copied()
            .max_by(|&a, &b| t.subtree_size(a).cmp(&t.subtree_size(b)).then(b.cmp(&a)))
    };
    let mut chains = Vec::new();
    for &v in t.preorder() {
        let is_head = match t.parent(v) {
            None => true,
            Some(p) => heavy(p) != Some(v),
        };
        if !is_head {
            continue;
        }
        let mut chain = vec![v];
        let mut cur = v;
        while let Some(h) = heavy(cur) {
            chain.push(h);
            cur = h;
        }
        chains.push(chain);
    }
    chains
}

/// The tree path from `s` to `t2` with every vertex outside `keep` deleted.
pub fn path_contraction(t: &RootedTree, keep: &[bool], s: usize, t2: usize) -> Result<Vec<usize>> {
    for v in [s, t2] {
        if v >= keep.len() || !keep[v] || !t.contains(v) {
            return Err(Error::NotInKeep(v));
        }
    }
    Ok(t.path(s, t2).into_iter().filter(|&v| keep[v]).collect())
}

/// Minor of `t` on the kept vertices: each kept vertex hangs from its
/// nearest kept ancestor, and kept vertices with no kept ancestor hang from
/// the shallowest of them (lowest id on ties), which becomes the root.
/// Every edge of the result stands for a path of `t`.
pub fn repaired_tree(t: &RootedTree, keep: &[bool]) -> Result<RootedTree> {
    let n = t.host_size();
    let mut nearest: Vec<Option<usize>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut tops = Vec::new();
    for &v in t.preorder() {
        let above = t.parent(v).and_then(|p| nearest[p]);
        if keep[v] {
            nearest[v] = Some(v);
            match above {
                Some(a) => parent[v] = Some(a),
                None => tops.push(v),
            }
        } else {
            nearest[v] = above;
        }
    }
    let root = *tops
        .iter()
        .min_by_key(|&&v| (t.depth(v), v))
        .ok_or(Error::Empty("repaired tree needs a kept tree vertex"))?;
    for &v in &tops {
        if v != root {
            parent[v] = Some(root);
        }
    }
    RootedTree::from_parents(root, parent)
}
