use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::AnnotatedGraph;
use crate::shortcut::{validate_shortcut, Dsu, Partition, Shortcut};
use crate::weight::Weight;

use super::{simulate_aggregate, AggregateOp, RoundStats, SimConfig, TraceRow};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MstOutcome {
    /// Edge ids of the tree, ascending.
    pub edges: Vec<usize>,
    pub weight: Weight,
    pub stats: RoundStats,
    pub phase_rounds: Vec<usize>,
    /// Delivered messages of all phases, rounds numbered consecutively.
    pub trace: Vec<TraceRow>,
}

/// Edge ids ordered by (weight, id), the tie-break shared by both MST routines.
fn edge_order(g: &AnnotatedGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&e| (g.edge(e).w, e));
    order
}

/// Reference MST: Kruskal over edges ordered by (weight, id).
pub fn kruskal(g: &AnnotatedGraph) -> Vec<usize> {
    let mut dsu = Dsu::new(g.vertex_count());
    let mut out: Vec<usize> = edge_order(g)
        .into_iter()
        .filter(|&e| {
            let edge = g.edge(e);
            dsu.union(edge.u, edge.v)
        })
        .collect();
    out.sort_unstable();
    out
}

/// Borůvka phases over the current fragments: `provider` supplies a
/// shortcut for the fragment partition, every fragment learns its lightest
/// outgoing edge by a simulated min-aggregation, and all those edges are
/// added. Merge bookkeeping between phases is free.
pub fn boruvka_mst(
    g: &AnnotatedGraph,
    provider: &mut dyn FnMut(&Partition) -> Result<Shortcut>,
    cfg: &SimConfig,
) -> Result<MstOutcome> {
    if let Some(e) = g.edges().iter().position(|e| e.w.is_zero()) {
        return Err(Error::InvalidParameter(format!("edge {e} has zero weight")));
    }
    let n = g.vertex_count();
    let order = edge_order(g);
    let mut rank = vec![0i64; g.edge_count()];
    for (r, &e) in order.iter().enumerate() {
        rank[e] = r as i64;
    }
    let mut dsu = Dsu::new(n);
    let mut edges = Vec::new();
    let mut stats = RoundStats::default();
    let mut phase_rounds = Vec::new();
    let mut trace = Vec::new();
    loop {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            groups.entry(dsu.find(v)).or_default().push(v);
        }
        if groups.len() <= 1 {
            break;
        }
        let parts = Partition::new(g, groups.into_values().collect())?;
        let s = provider(&parts)?;
        if let Some(issue) = validate_shortcut(g, &parts, &s).into_iter().next() {
            return Err(Error::InvalidShortcut(issue));
        }
        let values: Vec<i64> = (0..n)
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .filter(|&&(w, _)| parts.part_of(w) != parts.part_of(v))
                    .map(|&(_, e)| rank[e])
                    .min()
                    .unwrap_or(i64::MAX)
            })
            .collect();
        let out = simulate_aggregate(g, &parts, &s, AggregateOp::Min, &values, cfg)?;
        let offset = stats.rounds_used;
        trace.extend(out.trace.iter().map(|row| TraceRow { round: row.round + offset, ..*row }));
        stats = stats.then(out.stats);
        phase_rounds.push(out.stats.rounds_used);
        if stats.rounds_used > cfg.max_rounds {
            return Err(Error::RoundLimit { limit: cfg.max_rounds, rounds: stats.rounds_used });
        }
        let mut merged = false;
        for &r in &out.results {
            if r == i64::MAX {
                continue;
            }
            let e = order[r as usize];
            let edge = g.edge(e);
            if dsu.union(edge.u, edge.v) {
                edges.push(e);
                merged = true;
            }
        }
        if !merged {
            return Err(Error::Disconnected(0));
        }
    }
    edges.sort_unstable();
    let weight = g.total_weight(edges.iter().copied());
    Ok(MstOutcome { edges, weight, stats, phase_rounds, trace })
}
