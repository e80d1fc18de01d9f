//! Cell partitions, combinatorial gates and the cell-to-part relation.

mod gate;
mod relation;

pub use gate::{
    build_planar_gate, build_planar_gate_detailed, expand_gate_over_vortices, planar_gate,
    verify_gate, CombinatorialGate, GateConstruction, GatePair, GateViolation,
};
pub use relation::{assign_cells, check_relation, AssignOptions, CellRelation};

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, RootedTree};
use crate::shortcut::Dsu;

/// Disjoint connected vertex sets ("cells"). Vertices outside every cell
/// (apices) are allowed. Special cells hold whole vortices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellPartition {
    cells: Vec<Vec<usize>>,
    special: Vec<bool>,
    cell_of: Vec<Option<usize>>,
    diameter: usize,
}

impl CellPartition {
    /// Validates disjointness and connectivity in `g` and measures the
    /// largest induced cell diameter.
    pub fn new(g: &AnnotatedGraph, cells: Vec<Vec<usize>>, special: Vec<bool>) -> Result<Self> {
        if special.len() != cells.len() {
            return Err(Error::InvalidParameter("one special flag per cell required".into()));
        }
        let mut cell_of = vec![None; g.vertex_count()];
        let mut cells = cells;
        for (i, cell) in cells.iter_mut().enumerate() {
            cell.sort_unstable();
            cell.dedup();
            if cell.is_empty() {
                return Err(Error::InvalidParameter(format!("cell {i} is empty")));
            }
            for &v in cell.iter() {
                if v >= g.vertex_count() {
                    return Err(Error::VertexOutOfRange(v));
                }
                if let Some(j) = cell_of[v] {
                    return Err(Error::InvalidParameter(format!("vertex {v} in cells {j} and {i}")));
                }
                cell_of[v] = Some(i);
            }
        }
        let mut diameter = 0;
        for (i, cell) in cells.iter().enumerate() {
            match g.induced_diameter(cell) {
                Some(d) => diameter = diameter.max(d),
                None => return Err(Error::InvalidParameter(format!("cell {i} is not connected"))),
            }
        }
        Ok(CellPartition { cells, special, cell_of, diameter })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &[usize] {
        &self.cells[i]
    }

    pub fn is_special(&self, i: usize) -> bool {
        self.special[i]
    }

    pub fn special_count(&self) -> usize {
        self.special.iter().filter(|&&s| s).count()
    }

    pub fn cell_of(&self, v: usize) -> Option<usize> {
        self.cell_of[v]
    }

    /// Largest induced diameter over all cells.
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    /// Every vertex of `g` other than `except` lies in some cell.
    pub fn covers(&self, except: &[usize]) -> bool {
        self.cell_of
            .iter()
            .enumerate()
            .all(|(v, c)| c.is_some() || except.contains(&v))
    }
}

/// Cells are the components of `t` minus `apex`, ordered by smallest vertex.
pub fn cells_from_apex_removal(
    g: &AnnotatedGraph,
    t: &RootedTree,
    apex: usize,
) -> Result<CellPartition> {
    let n = g.vertex_count();
    if apex >= n {
        return Err(Error::VertexOutOfRange(apex));
    }
    let mut dsu = Dsu::new(n);
    for (c, p) in t.edges() {
        if c != apex && p != apex {
            dsu.union(c, p);
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if v == apex || !t.contains(v) {
            continue;
        }
        let r = dsu.find(v);
        if index[r] == usize::MAX {
            index[r] = cells.len();
            cells.push(Vec::new());
        }
        cells[index[r]].push(v);
    }
    let special = vec![false; cells.len()];
    CellPartition::new(g, cells, special)
}

/// Merges, per vortex of `g`, every cell meeting the vortex into one special
/// cell. Cells are then reordered by smallest vertex.
pub fn merge_vortex_cells(g: &AnnotatedGraph, cp: &CellPartition) -> Result<CellPartition> {
    if g.vortices().is_empty() {
        return Ok(cp.clone());
    }
    let mut dsu = Dsu::new(cp.len());
    let mut special = vec![false; cp.len()];
    for vx in g.vortices() {
        let mut first = None;
        for v in vx.all_vertices() {
            let c = cp.cell_of(v).ok_or_else(|| {
                Error::InvalidParameter(format!("vortex vertex {v} is in no cell"))
            })?;
            special[c] = true;
            match first {
                None => first = Some(c),
                Some(f) => {
                    dsu.union(f, c);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, bool)> = Default::default();
    for c in 0..cp.len() {
        let entry = groups.entry(dsu.find(c)).or_default();
        entry.0.extend_from_slice(cp.cell(c));
        entry.1 |= special[c];
    }
    let mut merged: Vec<(Vec<usize>, bool)> = groups.into_values().collect();
    for (cell, _) in &mut merged {
        cell.sort_unstable();
    }
    merged.sort_by_key(|(cell, _)| cell[0]);
    let (cells, flags) = merged.into_iter().unzip();
    CellPartition::new(g, cells, flags)
}
