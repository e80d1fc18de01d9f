use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::{validate_cliquesum, CliqueSumTree, SumEdge};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, ArcSpan, Edge, VortexSpec};
use crate::shortcut::Partition;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Grid,
    Cycle,
    Wheel,
    RandomPlanar,
    ApexedPlanar,
    PlanarWithVortex,
    CliquesumChain,
    CliquesumTree,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Grid,
        Family::Cycle,
        Family::Wheel,
        Family::RandomPlanar,
        Family::ApexedPlanar,
        Family::PlanarWithVortex,
        Family::CliquesumChain,
        Family::CliquesumTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Grid => "grid",
            Family::Cycle => "cycle",
            Family::Wheel => "wheel",
            Family::RandomPlanar => "random_planar",
            Family::ApexedPlanar => "apexed_planar",
            Family::PlanarWithVortex => "planar_with_vortex",
            Family::CliquesumChain => "cliquesum_chain",
            Family::CliquesumTree => "cliquesum_tree",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }
}

/// A generator family with its integer parameters and seed.
///
/// Parameters by family (defaults in brackets):
/// - grid: `k` side [8], `rows`/`cols` override `k`, `seg` snake segment length [3k/2]
/// - cycle: `n` [16], `parts` [2]
/// - wheel: `n` total vertices including the hub [9]
/// - random_planar: `n` [64], `parts` [4]
/// - apexed_planar: `k` [8], `apices` [1], `attach` apex degree [k], `seg` [3k/2]
/// - planar_with_vortex: `k` [6], `hole` side of the removed block [1],
///   `depth` [2], `internals` [3], `parts` [3]
/// - cliquesum_chain: `bags` [32], `drop` percent of shared edges removed [0], `parts` [3]
/// - cliquesum_tree: `bags` [32], `caterpillar` 0/1 [0], `parts` [3]
///
/// Every family accepts `weighted` (0/1): random integer weights in
/// 1..=1000 instead of unit weights. Weighted wheel spokes get 1000 added,
/// so rim fragments grow long before any spoke joins the MST.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, u64>,
    #[serde(default)]
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, seed: u64) -> Self {
        FamilySpec { family, params: BTreeMap::new(), seed }
    }

    pub fn with(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str, default: u64) -> u64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// Short label such as `grid[k=8]#3`.
    pub fn label(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}[{}]#{}", self.family, params.join(","), self.seed)
    }
}

/// A generated graph with its side data and default parts.
#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: FamilySpec,
    pub graph: AnnotatedGraph,
    pub decomposition: Option<CliqueSumTree>,
    pub parts: Partition,
}

/// Generates the instance described by `spec`; deterministic in the spec.
pub fn generate(spec: &FamilySpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let p = |k: &str, d: u64| spec.param(k, d) as usize;
    let (graph, decomposition, parts) = match spec.family {
        Family::Grid => {
            let k = p("k", 8);
            let (rows, cols) = (p("rows", k as u64), p("cols", k as u64));
            let g = grid(rows, cols, &mut rng, spec)?;
            let seg = p("seg", (3 * cols.max(rows) / 2).max(1) as u64);
            let parts = snake_parts(rows, cols, seg, Some);
            (g, None, parts)
        }
        Family::Cycle => {
            let n = p("n", 16);
            if n < 3 {
                return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
            }
            let edges = (0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>();
            let g = with_rotation_from_pairs(n, &edges, &mut rng, spec, |v, list| {
                let _ = v;
                list.to_vec()
            })?;
            let parts = region_parts(&g, p("parts", 2), &[], &mut rng);
            (g, None, parts)
        }
        Family::Wheel => {
            let n = p("n", 9);
            if n < 4 {
                return Err(Error::InvalidParameter("wheel needs n >= 4".into()));
            }
            let rim = n - 1;
            let mut pairs = Vec::new();
            for i in 0..rim {
                pairs.push((1 + i, 1 + (i + 1) % rim));
            }
            for i in 1..n {
                pairs.push((0, i));
            }
            let mut edges = weighted_edges(&pairs, &mut rng, spec);
            for e in edges.iter_mut().skip(rim) {
                if spec.param("weighted", 0) == 1 {
                    e.w = Weight::integer(e.w.numer() + 1000);
                }
            }
            let rotation = (0..n)
                .map(|v| {
                    if v == 0 {
                        return Vec::new();
                    }
                    let i = v - 1;
                    vec![i, (i + rim - 1) % rim]
                })
                .collect();
            let g = AnnotatedGraph::from_parts(n, edges, Some(rotation), vec![0], Vec::new())?;
            (g, None, vec![(1..n).collect()])
        }
        Family::RandomPlanar => {
            let n = p("n", 64);
            let g = stacked_triangulation(n, &mut rng, spec)?;
            let parts = region_parts(&g, p("parts", 4), &[], &mut rng);
            (g, None, parts)
        }
        Family::ApexedPlanar => {
            let k = p("k", 8);
            let q = p("apices", 1);
            let attach = p("attach", k as u64).min(k * k);
            let base = grid(k, k, &mut rng, spec)?;
            let n = k * k + q;
            let mut pairs: Vec<(usize, usize)> = base.edges().iter().map(|e| (e.u, e.v)).collect();
            let grid_vertices: Vec<usize> = (0..k * k).collect();
            for a in 0..q {
                let chosen: Vec<usize> = grid_vertices.choose_multiple(&mut rng, attach.max(1)).copied().collect();
                let mut chosen = chosen;
                chosen.sort_unstable();
                for v in chosen {
                    pairs.push((v, k * k + a));
                }
            }
            let mut edges: Vec<Edge> = base.edges().to_vec();
            let extra = weighted_edges(&pairs[base.edge_count()..], &mut rng, spec);
            edges.extend(extra);
            let mut rotation: Vec<Vec<usize>> = base.rotation().unwrap().to_vec();
            rotation.resize(n, Vec::new());
            let apices = (k * k..n).collect();
            let g = AnnotatedGraph::from_parts(n, edges, Some(rotation), apices, Vec::new())?;
            let seg = p("seg", (3 * k / 2).max(1) as u64);
            let parts = snake_parts(k, k, seg, Some);
            (g, None, parts)
        }
        Family::PlanarWithVortex => vortex_instance(spec, &mut rng)?,
        Family::CliquesumChain => {
            let (g, t) = cliquesum_chain(p("bags", 32), p("drop", 0), &mut rng, spec)?;
            let parts = region_parts(&g, p("parts", 3), &[], &mut rng);
            (g, Some(t), parts)
        }
        Family::CliquesumTree => {
            let (g, t) = cliquesum_tree(p("bags", 32), p("caterpillar", 0) == 1, &mut rng, spec)?;
            let parts = region_parts(&g, p("parts", 3), &[], &mut rng);
            (g, Some(t), parts)
        }
    };
    if let Some(t) = &decomposition {
        let issues = validate_cliquesum(&graph, t);
        if let Some(first) = issues.first() {
            return Err(Error::InvalidDecomposition(first.clone()));
        }
    }
    let parts = Partition::new(&graph, parts)?;
    Ok(Instance { spec: spec.clone(), graph, decomposition, parts })
}

fn weighted_edges(pairs: &[(usize, usize)], rng: &mut ChaCha8Rng, spec: &FamilySpec) -> Vec<Edge> {
    let weighted = spec.param("weighted", 0) == 1;
    pairs
        .iter()
        .map(|&(u, v)| {
            let w = if weighted { rng.gen_range(1..=1000u64) } else { 1 };
            Edge::new(u, v, Weight::integer(w))
        })
        .collect()
}

/// Builds an embedded graph where `order(v, incident edge ids)` gives the
/// rotation at each vertex.
fn with_rotation_from_pairs(
    n: usize,
    pairs: &[(usize, usize)],
    rng: &mut ChaCha8Rng,
    spec: &FamilySpec,
    order: impl Fn(usize, &[usize]) -> Vec<usize>,
) -> Result<AnnotatedGraph> {
    let edges = weighted_edges(pairs, rng, spec);
    let mut incident = vec![Vec::new(); n];
    for (id, &(u, v)) in pairs.iter().enumerate() {
        incident[u].push(id);
        incident[v].push(id);
    }
    let rotation = (0..n).map(|v| order(v, &incident[v])).collect();
    AnnotatedGraph::from_parts(n, edges, Some(rotation), Vec::new(), Vec::new())
}

/// `rows x cols` grid, vertex `r * cols + c`, rotation east, north, west,
/// south (row 0 on top).
pub(crate) fn grid(rows: usize, cols: usize, rng: &mut ChaCha8Rng, spec: &FamilySpec) -> Result<AnnotatedGraph> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidParameter("grid needs at least two vertices".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                pairs.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                pairs.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let edges = weighted_edges(&pairs, rng, spec);
    let lookup: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &(u, v))| ((u.min(v), u.max(v)), i)).collect();
    let edge_to = |a: usize, b: usize| lookup[&(a.min(b), a.max(b))];
    let rotation = (0..rows * cols)
        .map(|v| {
            let (r, c) = (v / cols, v % cols);
            let mut rot = Vec::new();
            if c + 1 < cols {
                rot.push(edge_to(v, id(r, c + 1)));
            }
            if r > 0 {
                rot.push(edge_to(v, id(r - 1, c)));
            }
            if c > 0 {
                rot.push(edge_to(v, id(r, c - 1)));
            }
            if r + 1 < rows {
                rot.push(edge_to(v, id(r + 1, c)));
            }
            rot
        })
        .collect();
    AnnotatedGraph::from_parts(rows * cols, edges, Some(rotation), Vec::new(), Vec::new())
}

/// Boustrophedon order of the grid cut into consecutive segments of `seg`
/// vertices; `map` renames grid vertices and may drop them.
fn snake_parts(rows: usize, cols: usize, seg: usize, map: impl Fn(usize) -> Option<usize>) -> Vec<Vec<usize>> {
    let mut order = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        if r % 2 == 0 {
            order.extend((0..cols).map(|c| r * cols + c));
        } else {
            order.extend((0..cols).rev().map(|c| r * cols + c));
        }
    }
    order
        .chunks(seg.max(1))
        .map(|chunk| chunk.iter().filter_map(|&v| map(v)).collect::<Vec<_>>())
        .filter(|p: &Vec<usize>| !p.is_empty())
        .collect()
}

/// Grows `count` parts from random seeds, one frontier vertex per part per
/// round, until every vertex outside `exclude` is taken.
pub(crate) fn region_parts(
    g: &AnnotatedGraph,
    count: usize,
    exclude: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut owner = vec![usize::MAX; n];
    for &x in exclude {
        owner[x] = usize::MAX - 1;
    }
    let mut candidates: Vec<usize> = (0..n).filter(|&v| owner[v] == usize::MAX).collect();
    candidates.shuffle(rng);
    let count = count.min(candidates.len());
    let mut parts: Vec<Vec<usize>> = candidates[..count].iter().map(|&v| vec![v]).collect();
    let mut frontier: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for (i, part) in parts.iter().enumerate() {
        owner[part[0]] = i;
    }
    for (i, part) in parts.iter().enumerate() {
        for &(w, _) in g.neighbors(part[0]) {
            if owner[w] == usize::MAX {
                frontier[i].insert(w);
            }
        }
    }
    loop {
        let mut grew = false;
        for i in 0..count {
            frontier[i].retain(|&w| owner[w] == usize::MAX);
            if frontier[i].is_empty() {
                continue;
            }
            let pick = rng.gen_range(0..frontier[i].len());
            let v = *frontier[i].iter().nth(pick).unwrap();
            frontier[i].remove(&v);
            owner[v] = i;
            parts[i].push(v);
            for &(w, _) in g.neighbors(v) {
                if owner[w] == usize::MAX {
                    frontier[i].insert(w);
                }
            }
            grew = true;
        }
        if !grew {
            break;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    parts
}

/// Random stacked triangulation: start from a triangle and repeatedly put a
/// new vertex inside a random inner face.
fn stacked_triangulation(n: usize, rng: &mut ChaCha8Rng, spec: &FamilySpec) -> Result<AnnotatedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter("random_planar needs n >= 3".into()));
    }
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2]];
    let outer = [0usize, 2, 1];
    let mut pairs = vec![(0, 1), (1, 2), (0, 2)];
    for x in 3..n {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(i);
        pairs.extend([(a, x), (b, x), (c, x)]);
        faces.extend([[a, b, x], [b, c, x], [c, a, x]]);
    }
    faces.push(outer);
    // In a face walk a -> b -> c, the edge after ba around b is bc.
    let mut succ: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for f in &faces {
        for i in 0..3 {
            let (a, b, c) = (f[i], f[(i + 1) % 3], f[(i + 2) % 3]);
            succ[b].insert(a, c);
        }
    }
    let edges = weighted_edges(&pairs, rng, spec);
    let lookup: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &(u, v))| ((u.min(v), u.max(v)), i)).collect();
    let rotation = (0..n)
        .map(|v| {
            let start = *succ[v].keys().next().unwrap();
            let mut rot = Vec::new();
            let mut cur = start;
            loop {
                rot.push(lookup[&(v.min(cur), v.max(cur))]);
                cur = succ[v][&cur];
                if cur == start {
                    break;
                }
            }
            rot
        })
        .collect();
    AnnotatedGraph::from_parts(n, edges, Some(rotation), Vec::new(), Vec::new())
}

type Generated = (AnnotatedGraph, Option<CliqueSumTree>, Vec<Vec<usize>>);

/// Grid with a square block of interior vertices removed; the hole becomes
/// a vortex face with random arcs.
fn vortex_instance(spec: &FamilySpec, rng: &mut ChaCha8Rng) -> Result<Generated> {
    let k = spec.param("k", 6) as usize;
    let hole = spec.param("hole", 1) as usize;
    let depth = spec.param("depth", 2) as usize;
    let internals = spec.param("internals", 3) as usize;
    if hole == 0 || k < hole + 2 || depth == 0 {
        return Err(Error::InvalidParameter("planar_with_vortex needs k >= hole + 2, depth >= 1".into()));
    }
    let base = grid(k, k, rng, &FamilySpec::new(Family::Grid, 0))?;
    let top = (k - hole) / 2;
    let removed = |v: usize| {
        let (r, c) = (v / k, v % k);
        (top..top + hole).contains(&r) && (top..top + hole).contains(&c)
    };
    let mask: Vec<bool> = (0..k * k).map(removed).collect();
    let (holed, map) = base.without_vertices(&mask)?;
    // Ring around the hole, clockwise starting at its top-left corner.
    let (lo, hi) = (top - 1, top + hole);
    let mut ring = Vec::new();
    for c in lo..hi {
        ring.push(lo * k + c);
    }
    for r in lo..hi {
        ring.push(r * k + hi);
    }
    for c in (lo + 1..=hi).rev() {
        ring.push(hi * k + c);
    }
    for r in (lo + 1..=hi).rev() {
        ring.push(r * k + lo);
    }
    let boundary: Vec<usize> = ring.iter().map(|&v| map[v].unwrap()).collect();
    let len = boundary.len();
    let base_n = holed.vertex_count();
    let mut load = vec![0usize; len];
    let mut arcs: Vec<ArcSpan> = Vec::new();
    for _ in 0..internals {
        let mut placed = None;
        for _attempt in 0..64 {
            let lo = rng.gen_range(0..len);
            let span = rng.gen_range(1..=3.min(len));
            let arc = ArcSpan::new(lo, (lo + span - 1) % len);
            if arc.positions(len).iter().all(|&p| load[p] < depth) {
                placed = Some(arc);
                break;
            }
        }
        let Some(arc) = placed else { break };
        for p in arc.positions(len) {
            load[p] += 1;
        }
        arcs.push(arc);
    }
    let mut pairs: Vec<(usize, usize)> = holed.edges().iter().map(|e| (e.u, e.v)).collect();
    let base_edges = pairs.len();
    for (i, arc) in arcs.iter().enumerate() {
        for p in arc.positions(len) {
            pairs.push((base_n + i, boundary[p]));
        }
        for (j, other) in arcs.iter().enumerate().take(i) {
            let overlap = arc.positions(len).iter().any(|&p| other.contains(p));
            if overlap && rng.gen_bool(0.5) {
                pairs.push((base_n + j, base_n + i));
            }
        }
    }
    let n = base_n + arcs.len();
    let mut edges = holed.edges().to_vec();
    edges.extend(weighted_edges(&pairs[base_edges..], rng, spec));
    if spec.param("weighted", 0) == 1 {
        for e in edges.iter_mut().take(base_edges) {
            e.w = Weight::integer(rng.gen_range(1..=1000u64));
        }
    }
    let mut rotation = holed.rotation().unwrap().to_vec();
    rotation.resize(n, Vec::new());
    let vortex = VortexSpec {
        boundary,
        internals: arcs.iter().enumerate().map(|(i, &a)| (base_n + i, a)).collect(),
        depth,
    };
    let g = AnnotatedGraph::from_parts(n, edges, Some(rotation), Vec::new(), vec![vortex])?;
    let parts = region_parts(&g, spec.param("parts", 3) as usize, &[], rng);
    Ok((g, None, parts))
}

/// Strip of `bags` triangles `{i, i+1, i+2}` glued along shared edges;
/// `drop` percent of the inner shared edges are deleted.
fn cliquesum_chain(
    bags: usize,
    drop: usize,
    rng: &mut ChaCha8Rng,
    spec: &FamilySpec,
) -> Result<(AnnotatedGraph, CliqueSumTree)> {
    if bags == 0 {
        return Err(Error::InvalidParameter("cliquesum_chain needs at least one bag".into()));
    }
    let n = bags + 2;
    let mut pairs = Vec::new();
    for j in 0..n - 1 {
        let shared_inner = j >= 1 && j + 1 < n - 1;
        if !(shared_inner && rng.gen_range(0..100) < drop) {
            pairs.push((j, j + 1));
        }
        if j + 2 < n {
            pairs.push((j, j + 2));
        }
    }
    let g = AnnotatedGraph::new(n, weighted_edges(&pairs, rng, spec))?;
    let bag_sets: Vec<Vec<usize>> = (0..bags).map(|i| vec![i, i + 1, i + 2]).collect();
    let edges = (1..bags).map(|i| (i - 1, i, SumEdge::single(vec![i, i + 1]))).collect();
    let k = if bags > 1 { 2 } else { 1 };
    Ok((g, CliqueSumTree::new(bag_sets, edges, 0, k)?))
}

/// Triangles glued along single vertices or edges in a random tree shape,
/// or as a caterpillar (a spine strip with one leaf triangle per spine bag).
fn cliquesum_tree(
    bags: usize,
    caterpillar: bool,
    rng: &mut ChaCha8Rng,
    spec: &FamilySpec,
) -> Result<(AnnotatedGraph, CliqueSumTree)> {
    if bags == 0 {
        return Err(Error::InvalidParameter("cliquesum_tree needs at least one bag".into()));
    }
    let mut bag_sets: Vec<Vec<usize>> = vec![vec![0, 1, 2]];
    let mut pairs = vec![(0, 1), (1, 2), (0, 2)];
    let mut tree_edges = Vec::new();
    let mut n = 3;
    let spine = if caterpillar { bags.div_ceil(2) } else { bags };
    for i in 1..bags {
        let parent = if !caterpillar {
            rng.gen_range(0..i)
        } else if i < spine {
            i - 1
        } else {
            i - spine
        };
        let pb = bag_sets[parent].clone();
        let along_edge = caterpillar || rng.gen_bool(0.5);
        let (bag, clique) = if along_edge {
            let mut choice = pb.clone();
            choice.shuffle(rng);
            let (a, b) = (choice[0], choice[1]);
            pairs.extend([(a, n), (b, n)]);
            n += 1;
            (vec![a, b, n - 1], vec![a, b])
        } else {
            let a = *pb.choose(rng).unwrap();
            pairs.extend([(a, n), (a, n + 1), (n, n + 1)]);
            n += 2;
            (vec![a, n - 2, n - 1], vec![a])
        };
        bag_sets.push(bag);
        tree_edges.push((parent, i, SumEdge::single(clique)));
    }
    let k = tree_edges.iter().map(|(_, _, e)| e.clique.len()).max().unwrap_or(1);
    let g = AnnotatedGraph::new(n, weighted_edges(&pairs, rng, spec))?;
    Ok((g, CliqueSumTree::new(bag_sets, tree_edges, 0, k)?))
}
