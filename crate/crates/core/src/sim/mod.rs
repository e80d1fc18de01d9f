//! Synchronous CONGEST simulator: per-edge bit budgets, part-wise
//! aggregation over shortcut-augmented parts and Borůvka MST.

mod mst;

pub use mst::{boruvka_mst, kruskal, MstOutcome};

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AnnotatedGraph;
use crate::shortcut::{Partition, Shortcut};

/// Bits needed to name one of `n` vertices.
pub fn id_bits(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Bits of an aggregation message: one vertex id and one 64-bit value.
pub fn message_bits(n: usize) -> usize {
    id_bits(n) + 64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Budget per edge direction per round.
    pub bits_per_edge_per_round: usize,
    pub max_rounds: usize,
    pub seed: u64,
    /// Record every delivered message.
    pub trace: bool,
}

impl SimConfig {
    /// Default budget `2 * id_bits(n) + 64`, room for one id and one weight.
    pub fn for_graph(n: usize) -> Self {
        SimConfig { bits_per_edge_per_round: 2 * id_bits(n) + 64, max_rounds: 1_000_000, seed: 0, trace: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub rounds_used: usize,
    pub messages_sent: usize,
    pub max_edge_bits_any_round: usize,
}

impl RoundStats {
    /// Stats of two runs executed one after the other.
    pub fn then(self, other: RoundStats) -> RoundStats {
        RoundStats {
            rounds_used: self.rounds_used + other.rounds_used,
            messages_sent: self.messages_sent + other.messages_sent,
            max_edge_bits_any_round: self.max_edge_bits_any_round.max(other.max_edge_bits_any_round),
        }
    }
}

/// One delivered message in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub round: usize,
    pub edge: usize,
    pub part: usize,
    pub bits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub from: usize,
    pub to: usize,
    pub edge: usize,
    pub part: usize,
    pub bits: usize,
    pub payload: i64,
}

/// Pending messages of one edge direction: (enqueue round, part, arrival, message).
type Queue = VecDeque<(usize, usize, u64, Message)>;

/// Message queues of a network in flight. Each edge direction drains its
/// queue in (enqueue round, part id, arrival) order while the budget lasts.
#[derive(Debug, Clone)]
pub struct NetworkState {
    budget: usize,
    round: usize,
    seq: u64,
    queues: BTreeMap<(usize, bool), Queue>,
    pub stats: RoundStats,
    pub trace: Option<Vec<TraceRow>>,
}

impl NetworkState {
    pub fn new(budget: usize, trace: bool) -> Self {
        NetworkState {
            budget,
            round: 0,
            seq: 0,
            queues: BTreeMap::new(),
            stats: RoundStats::default(),
            trace: trace.then(Vec::new),
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn pending(&self) -> usize {
        self.queues.values().map(VecDeque::len).sum()
    }

    /// Queues `msg` for sending from the next round on.
    pub fn send(&mut self, g: &AnnotatedGraph, msg: Message) -> Result<()> {
        if msg.bits > self.budget {
            return Err(Error::InvalidParameter(format!(
                "message of {} bits exceeds the per-edge budget {}",
                msg.bits, self.budget
            )));
        }
        let e = g.edge(msg.edge);
        let forward = e.u == msg.from;
        debug_assert!(forward && e.v == msg.to || e.v == msg.from && e.u == msg.to);
        let queue = self.queues.entry((msg.edge, forward)).or_default();
        let key = (self.round, msg.part, self.seq);
        let at = queue.partition_point(|&(r, p, s, _)| (r, p, s) < key);
        queue.insert(at, (key.0, key.1, key.2, msg));
        self.seq += 1;
        Ok(())
    }
}

/// Advances one synchronous round: every edge direction sends the longest
/// queue prefix that fits its budget. Returns the delivered messages ordered
/// by (edge id, part id).
pub fn run_round(state: &mut NetworkState) -> Vec<Message> {
    state.round += 1;
    let mut delivered = Vec::new();
    for queue in state.queues.values_mut() {
        let mut used = 0;
        while let Some(&(_, _, _, msg)) = queue.front() {
            if used + msg.bits > state.budget {
                break;
            }
            used += msg.bits;
            queue.pop_front();
            delivered.push(msg);
        }
        assert!(used <= state.budget, "edge budget exceeded");
        state.stats.max_edge_bits_any_round = state.stats.max_edge_bits_any_round.max(used);
    }
    state.queues.retain(|_, q| !q.is_empty());
    delivered.sort_by_key(|m| (m.edge, m.part, m.from));
    state.stats.messages_sent += delivered.len();
    if !delivered.is_empty() {
        state.stats.rounds_used = state.round;
    }
    if let Some(trace) = &mut state.trace {
        trace.extend(delivered.iter().map(|m| TraceRow { round: state.round, edge: m.edge, part: m.part, bits: m.bits }));
    }
    delivered
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateOp {
    Min,
    Max,
    Sum,
}

impl AggregateOp {
    pub fn apply(self, a: i64, b: i64) -> i64 {
        match self {
            AggregateOp::Min => a.min(b),
            AggregateOp::Max => a.max(b),
            AggregateOp::Sum => a.wrapping_add(b),
        }
    }

    /// Direct computation over a part.
    pub fn fold(self, values: impl IntoIterator<Item = i64>) -> Option<i64> {
        values.into_iter().reduce(|a, b| self.apply(a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateOutcome {
    /// Aggregate of each part.
    pub results: Vec<i64>,
    /// What each vertex learned for its own part (`None` outside parts).
    pub learned: Vec<Option<i64>>,
    pub stats: RoundStats,
    pub trace: Vec<TraceRow>,
}

/// Per-part communication tree: a BFS tree of `G[P] + H` from the smallest
/// part vertex, with branches that hold no part vertex pruned.
struct PartTree {
    root: usize,
    /// vertex -> (parent, edge to parent)
    parent: BTreeMap<usize, (usize, usize)>,
    children: BTreeMap<usize, Vec<(usize, usize)>>,
}

fn part_tree(g: &AnnotatedGraph, part: &[usize], in_part: impl Fn(usize) -> bool, s: &Shortcut, set: &[usize]) -> PartTree {
    let t = s.tree();
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut link = |a: usize, b: usize, e: usize| {
        adj.entry(a).or_default().push((b, e));
        adj.entry(b).or_default().push((a, e));
    };
    for &v in part {
        for &(w, e) in g.neighbors(v) {
            if v < w && in_part(w) {
                link(v, w, e);
            }
        }
    }
    for &c in set {
        let p = t.parent(c).expect("shortcut edges name tree edges");
        let e = g.edge_between(c, p).expect("tree edges are graph edges");
        if !(in_part(c) && in_part(p)) {
            link(c, p, e);
        }
    }
    for list in adj.values_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let root = part[0];
    let mut parent = BTreeMap::new();
    let mut order = vec![root];
    let mut seen = std::collections::BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(w, e) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                parent.insert(w, (v, e));
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    // Prune subtrees without part vertices, deepest first.
    let mut needed: BTreeMap<usize, bool> = order.iter().map(|&v| (v, in_part(v))).collect();
    for &v in order.iter().rev() {
        if needed[&v] {
            if let Some(&(p, _)) = parent.get(&v) {
                needed.insert(p, true);
            }
        }
    }
    parent.retain(|v, _| needed[v]);
    let mut children: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (&v, &(p, e)) in &parent {
        children.entry(p).or_default().push((v, e));
    }
    PartTree { root, parent, children }
}

/// Every part computes `op` over its vertices' values and every part vertex
/// learns the result. Each part convergecasts to, then broadcasts from, the
/// root of its communication tree over `G[P_i] + H_i`; all parts share the
/// per-edge budgets.
pub fn simulate_aggregate(
    g: &AnnotatedGraph,
    parts: &Partition,
    s: &Shortcut,
    op: AggregateOp,
    values: &[i64],
    cfg: &SimConfig,
) -> Result<AggregateOutcome> {
    let n = g.vertex_count();
    if values.len() != n {
        return Err(Error::InvalidParameter(format!("{} values for {n} vertices", values.len())));
    }
    if cfg.bits_per_edge_per_round < id_bits(n) {
        return Err(Error::InvalidParameter("edge budget cannot carry a vertex id".into()));
    }
    if s.edge_sets().len() != parts.len() || s.tree().host_size() != n {
        return Err(Error::InvalidShortcut("shortcut does not match the parts".into()));
    }
    let bits = message_bits(n);
    let mut net = NetworkState::new(cfg.bits_per_edge_per_round, cfg.trace);
    let mut learned: Vec<Option<i64>> = vec![None; n];
    let mut results = vec![0i64; parts.len()];
    let mut trees = Vec::with_capacity(parts.len());
    // (part, vertex) -> (children still to report, running aggregate)
    let mut waiting: BTreeMap<(usize, usize), (usize, Option<i64>)> = BTreeMap::new();
    for (i, part) in parts.parts().iter().enumerate() {
        let tree = part_tree(g, part, |v| parts.part_of(v) == Some(i), s, s.edge_set(i));
        for v in tree.parent.keys().copied().chain([tree.root]) {
            let kids = tree.children.get(&v).map_or(0, Vec::len);
            let own = (parts.part_of(v) == Some(i)).then(|| values[v]);
            waiting.insert((i, v), (kids, own));
        }
        if tree.parent.is_empty() {
            results[i] = values[tree.root];
            learned[tree.root] = Some(values[tree.root]);
        }
        trees.push(tree);
    }
    // Leaves report first.
    let ready: Vec<(usize, usize)> = waiting.iter().filter(|(_, &(k, _))| k == 0).map(|(&key, _)| key).collect();
    for (i, v) in ready {
        if v != trees[i].root {
            let (p, e) = trees[i].parent[&v];
            let payload = waiting[&(i, v)].1.expect("leaves are part vertices");
            net.send(g, Message { from: v, to: p, edge: e, part: i, bits, payload })?;
        }
    }
    while net.pending() > 0 {
        if net.round() >= cfg.max_rounds {
            return Err(Error::RoundLimit { limit: cfg.max_rounds, rounds: net.round() });
        }
        let delivered = run_round(&mut net);
        for msg in delivered {
            let i = msg.part;
            let tree = &trees[i];
            let v = msg.to;
            let going_up = tree.parent.get(&msg.from).is_some_and(|&(p, _)| p == v);
            if going_up {
                let slot = waiting.get_mut(&(i, v)).expect("tree vertex");
                slot.0 -= 1;
                slot.1 = Some(slot.1.map_or(msg.payload, |a| op.apply(a, msg.payload)));
                if slot.0 > 0 {
                    continue;
                }
                let acc = slot.1.expect("aggregate present");
                if v == tree.root {
                    results[i] = acc;
                    learned[v] = Some(acc);
                    broadcast(g, &mut net, tree, v, i, bits, acc)?;
                } else {
                    let (p, e) = tree.parent[&v];
                    net.send(g, Message { from: v, to: p, edge: e, part: i, bits, payload: acc })?;
                }
            } else {
                if parts.part_of(v) == Some(i) {
                    learned[v] = Some(msg.payload);
                }
                broadcast(g, &mut net, tree, v, i, bits, msg.payload)?;
            }
        }
    }
    let trace = net.trace.take().unwrap_or_default();
    Ok(AggregateOutcome { results, learned, stats: net.stats, trace })
}

fn broadcast(
    g: &AnnotatedGraph,
    net: &mut NetworkState,
    tree: &PartTree,
    v: usize,
    part: usize,
    bits: usize,
    value: i64,
) -> Result<()> {
    for &(c, e) in tree.children.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
        net.send(g, Message { from: v, to: c, edge: e, part, bits, payload: value })?;
    }
    Ok(())
}
