use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, RootedTree};

use super::{quality, Dsu, Partition, QualityReport, Shortcut};

/// Largest search space, in bits of `(tree edge, part)` choices.
const MAX_BITS: usize = 24;

/// Exhaustive optimum over all tree-restricted shortcuts on `t`.
///
/// Minimizes `block * d_T + congestion`, then the total number of assigned
/// edges, then the assignment read as an integer whose bit
/// `part * |E_T| + edge` marks `edge` (in child-id order) in that part.
pub fn brute_force_optimal(
    g: &AnnotatedGraph,
    p: &Partition,
    t: &RootedTree,
) -> Result<(Shortcut, QualityReport)> {
    let tree_edges = t.edges();
    let m = tree_edges.len();
    let k = p.len();
    if m * k > MAX_BITS {
        return Err(Error::TooLarge(format!(
            "{m} tree edges x {k} parts exceeds {MAX_BITS} bits"
        )));
    }
    if t.host_size() != g.vertex_count() {
        return Err(Error::InvalidShortcut("tree does not match graph".into()));
    }
    let d = t.diameter().max(1);
    let subsets = 1usize << m;
    // Block count of each part for every subset of tree edges.
    let mut dsu = Dsu::new(g.vertex_count());
    let blocks: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..subsets)
                .map(|mask| {
                    for (j, &(c, par)) in tree_edges.iter().enumerate() {
                        if mask >> j & 1 == 1 {
                            dsu.union(c, par);
                        }
                    }
                    let mut roots: Vec<usize> = p.part(i).iter().map(|&v| dsu.find(v)).collect();
                    roots.sort_unstable();
                    roots.dedup();
                    for &(c, par) in &tree_edges {
                        dsu.reset(c);
                        dsu.reset(par);
                    }
                    roots.len()
                })
                .collect()
        })
        .collect();

    let mut best: Option<(usize, u32, usize)> = None;
    let total = 1usize << (m * k);
    let full = subsets - 1;
    for assignment in 0..total {
        let mut b = 0;
        let mut load = [0u8; MAX_BITS];
        for (i, table) in blocks.iter().enumerate() {
            let sub = (assignment >> (i * m)) & full;
            b = b.max(table[sub]);
            for (j, l) in load.iter_mut().enumerate().take(m) {
                *l += (sub >> j & 1) as u8;
            }
        }
        let c = load.iter().copied().max().unwrap_or(0) as usize;
        let key = (b * d + c, assignment.count_ones());
        if best.is_none_or(|(q, e, _)| key < (q, e)) {
            best = Some((key.0, key.1, assignment));
        }
    }
    let (_, _, assignment) = best.expect("at least one assignment");
    let sets = (0..k)
        .map(|i| {
            (0..m)
                .filter(|&j| assignment >> (i * m + j) & 1 == 1)
                .map(|j| tree_edges[j].0)
                .collect()
        })
        .collect();
    let s = Shortcut::new(t.clone(), sets)?;
    let report = quality(super::block(p, &s), super::congestion(&s), d)?;
    Ok((s, report))
}
