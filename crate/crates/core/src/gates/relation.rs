use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{contract_outside, AnnotatedGraph};
use crate::shortcut::Partition;

use super::{verify_gate, CellPartition, CombinatorialGate};

/// Pairs `(cell, part)` chosen by [`assign_cells`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRelation {
    pub pairs: BTreeSet<(usize, usize)>,
    /// Bound on the number of parts related to one cell.
    pub beta: usize,
    /// Parts dropped plus cells removed.
    pub steps: usize,
}

impl CellRelation {
    pub fn parts_of_cell(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.range((cell, 0)..(cell + 1, 0)).map(|&(_, p)| p)
    }

    pub fn contains(&self, cell: usize, part: usize) -> bool {
        self.pairs.contains(&(cell, part))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssignOptions {
    /// Rebuild and verify the gate on every intermediate contracted graph,
    /// not just the input graph.
    pub verify_every_step: bool,
}

/// Builds the relation by repeatedly dropping the lowest-index part that
/// meets at most two normal cells, or else relating the lowest-index normal
/// cell of degree at most `beta` to every part it meets and contracting that
/// cell away. Once at most one normal cell remains nothing more is related;
/// otherwise a last remaining part is related to every cell it still meets.
/// `beta` is `2 s`, or `2 l s` when there are `l > 0` special cells, where
/// `s` comes from the gate built on the input graph.
pub fn assign_cells(
    g: &AnnotatedGraph,
    cp: &CellPartition,
    parts: &Partition,
    gate_builder: &dyn Fn(&AnnotatedGraph, &CellPartition) -> Result<CombinatorialGate>,
    opts: AssignOptions,
) -> Result<CellRelation> {
    let gate = checked_gate(g, cp, gate_builder)?;
    let specials = cp.special_count();
    let beta = 2 * gate.s_param * specials.max(1);

    let mut part_cells: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); parts.len()];
    let mut cell_parts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cp.len()];
    for (p, part) in parts.parts().iter().enumerate() {
        for &v in part {
            if let Some(c) = cp.cell_of(v) {
                if !cp.is_special(c) {
                    part_cells[p].insert(c);
                    cell_parts[c].insert(p);
                }
            }
        }
    }
    let mut live_parts: BTreeSet<usize> = (0..parts.len()).collect();
    let mut live_cells: BTreeSet<usize> = (0..cp.len()).filter(|&c| !cp.is_special(c)).collect();
    let mut removed = vec![false; g.vertex_count()];
    let mut pairs = BTreeSet::new();
    let mut steps = 0;
    while !live_parts.is_empty() {
        steps += 1;
        if live_cells.len() <= 1 {
            break;
        }
        if live_parts.len() == 1 {
            let p = *live_parts.first().unwrap();
            pairs.extend(part_cells[p].iter().map(|&c| (c, p)));
            break;
        }
        if let Some(&p) = live_parts.iter().find(|&&p| part_cells[p].len() <= 2) {
            live_parts.remove(&p);
            for &c in &part_cells[p] {
                cell_parts[c].remove(&p);
            }
            continue;
        }
        let Some(&c) = live_cells.iter().find(|&&c| cell_parts[c].len() <= beta) else {
            let (h, cells) = contracted_view(g, cp, parts, &removed)?;
            checked_gate(&h, &cells, gate_builder)?;
            return Err(Error::InvalidGate(format!(
                "no normal cell meets at most {beta} parts although the gate verified"
            )));
        };
        for &p in &cell_parts[c] {
            pairs.insert((c, p));
            part_cells[p].remove(&c);
        }
        cell_parts[c].clear();
        live_cells.remove(&c);
        for &v in cp.cell(c) {
            removed[v] = true;
        }
        if opts.verify_every_step {
            let (h, cells) = contracted_view(g, cp, parts, &removed)?;
            checked_gate(&h, &cells, gate_builder)?;
        }
    }
    Ok(CellRelation { pairs, beta, steps })
}

fn checked_gate(
    g: &AnnotatedGraph,
    cp: &CellPartition,
    gate_builder: &dyn Fn(&AnnotatedGraph, &CellPartition) -> Result<CombinatorialGate>,
) -> Result<CombinatorialGate> {
    let gate = gate_builder(g, cp)?;
    let violations = verify_gate(g, cp, &gate);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidGate(format!(
            "{} gate violations, first: {v}",
            violations.len()
        )));
    }
    Ok(gate)
}

/// The graph with every removed cell contracted away, and the surviving
/// cells renumbered onto it (cell order preserved).
fn contracted_view(
    g: &AnnotatedGraph,
    cp: &CellPartition,
    parts: &Partition,
    removed: &[bool],
) -> Result<(AnnotatedGraph, CellPartition)> {
    let keep: Vec<bool> = removed.iter().map(|r| !r).collect();
    let con = contract_outside(g, &keep, parts.labels())?;
    let mut cells = Vec::new();
    let mut special = Vec::new();
    for (i, cell) in cp.cells().iter().enumerate() {
        if cell.iter().all(|&v| keep[v]) {
            cells.push(cell.iter().map(|&v| con.to_new[v]).collect());
            special.push(cp.is_special(i));
        }
    }
    let view = CellPartition::new(&con.graph, cells, special)?;
    Ok((con.graph, view))
}

/// Checks that every part is related to all but at most two of the normal
/// cells it meets, that every cell has at most `beta` related parts, and
/// that related pairs actually intersect and never involve special cells.
pub fn check_relation(cp: &CellPartition, parts: &Partition, rel: &CellRelation) -> Vec<String> {
    let mut out = Vec::new();
    let mut degree = vec![0usize; cp.len()];
    for &(c, p) in &rel.pairs {
        if c >= cp.len() || p >= parts.len() {
            out.push(format!("pair ({c}, {p}) out of range"));
            continue;
        }
        if cp.is_special(c) {
            out.push(format!("special cell {c} is related to part {p}"));
        }
        if !parts.part(p).iter().any(|&v| cp.cell_of(v) == Some(c)) {
            out.push(format!("cell {c} is related to part {p} but they do not meet"));
        }
        degree[c] += 1;
    }
    for (c, &d) in degree.iter().enumerate() {
        if d > rel.beta {
            out.push(format!("cell {c} is related to {d} parts, more than {}", rel.beta));
        }
    }
    for (p, part) in parts.parts().iter().enumerate() {
        let met: BTreeSet<usize> = part
            .iter()
            .filter_map(|&v| cp.cell_of(v))
            .filter(|&c| !cp.is_special(c))
            .collect();
        let missed = met.iter().filter(|&&c| !rel.contains(c, p)).count();
        if missed > 2 {
            out.push(format!("part {p} misses {missed} of the normal cells it meets"));
        }
    }
    out
}
