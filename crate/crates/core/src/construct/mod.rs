//! Shortcut constructors: clique-sum, treewidth and apex routes, and a
//! dispatcher that validates whatever it returns.

mod apex;
mod cliquesum;

pub use apex::{apex_cells, apex_shortcut, ApexCells};
pub use cliquesum::{cliquesum_shortcut, treewidth_shortcut, LocalConstructor, LOCAL_COMPONENT_LIMIT};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decomp::{compress_cliquesum, tree_decomposition, CliqueSumTree};
use crate::error::{Error, Result};
use crate::gates::AssignOptions;
use crate::graph::{AnnotatedGraph, RootedTree};
use crate::shortcut::{validate_shortcut, Partition, Shortcut};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cliquesum,
    Treewidth,
    Apex,
    Auto,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cliquesum, Method::Treewidth, Method::Apex, Method::Auto];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cliquesum => "cliquesum",
            Method::Treewidth => "treewidth",
            Method::Apex => "apex",
            Method::Auto => "auto",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructorConfig {
    pub method: Method,
    /// Compress clique-sum trees before use.
    pub compression: bool,
    /// Recorded with every run. The constructors themselves are deterministic.
    pub seed: u64,
    /// Rebuild and verify gates on every contracted graph of the apex route.
    pub verify_gates: bool,
}

impl Default for ConstructorConfig {
    fn default() -> Self {
        ConstructorConfig { method: Method::Auto, compression: true, seed: 0, verify_gates: false }
    }
}

/// What a constructor did, for reports and CSV rows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    /// Route actually taken.
    pub method: Option<Method>,
    /// Height of the clique-sum tree used (largest over local runs).
    pub decomposition_depth: usize,
    /// Clique size bound or decomposition width of that tree.
    pub decomposition_width: usize,
    /// Most connected pieces one part split into inside a single bag.
    pub max_local_components: usize,
    /// (bag, part) pairs splitting into more than [`LOCAL_COMPONENT_LIMIT`] pieces.
    pub component_violations: usize,
    pub cells: usize,
    pub special_cells: usize,
    pub relation_pairs: usize,
    pub relation_beta: usize,
}

/// A validated shortcut and how it was made.
#[derive(Debug, Clone)]
pub struct Built {
    pub shortcut: Shortcut,
    pub report: BuildReport,
}

/// Builds a shortcut with the configured method. `Auto` takes the apex
/// route when `g` has apices, the clique-sum route when a decomposition is
/// supplied and the treewidth route otherwise. The result is validated.
pub fn build_shortcut(
    g: &AnnotatedGraph,
    decomposition: Option<&CliqueSumTree>,
    t: &RootedTree,
    parts: &Partition,
    cfg: &ConstructorConfig,
) -> Result<Built> {
    let method = match cfg.method {
        Method::Auto if !g.apices().is_empty() => Method::Apex,
        Method::Auto if decomposition.is_some() => Method::Cliquesum,
        Method::Auto => Method::Treewidth,
        m => m,
    };
    let (shortcut, report) = match method {
        Method::Cliquesum => {
            let cst = decomposition.ok_or_else(|| {
                Error::NoApplicableMethod("clique-sum route needs a decomposition".into())
            })?;
            let compressed;
            let cst = if cfg.compression {
                compressed = compress_cliquesum(cst);
                &compressed
            } else {
                cst
            };
            let local = LocalConstructor::Treewidth { compress: cfg.compression };
            cliquesum_shortcut(g, cst, t, parts, local)?
        }
        Method::Treewidth => {
            let td = tree_decomposition(g)?;
            treewidth_shortcut(g, &td, t, parts, cfg.compression)?
        }
        Method::Apex => {
            let opts = AssignOptions { verify_every_step: cfg.verify_gates };
            apex_shortcut(g, t, parts, cfg.compression, opts)?
        }
        Method::Auto => unreachable!("resolved above"),
    };
    if let Some(issue) = validate_shortcut(g, parts, &shortcut).into_iter().next() {
        return Err(Error::InvalidShortcut(issue));
    }
    Ok(Built { shortcut, report })
}

/// Checks that `t` spans `g` using edges of `g`.
pub(crate) fn check_spanning(g: &AnnotatedGraph, t: &RootedTree) -> Result<()> {
    if t.host_size() != g.vertex_count() || t.vertex_count() != g.vertex_count() {
        return Err(Error::InvalidParameter("tree does not span the graph".into()));
    }
    if let Some((c, p)) = t.edges().into_iter().find(|&(c, p)| !g.has_edge(c, p)) {
        return Err(Error::InvalidParameter(format!("tree edge {c}-{p} is not a graph edge")));
    }
    Ok(())
}

/// The child endpoint naming the tree edge `uv`, if `uv` is a tree edge.
pub(crate) fn tree_edge_name(t: &RootedTree, u: usize, v: usize) -> Option<usize> {
    if t.parent(u) == Some(v) {
        Some(u)
    } else if t.parent(v) == Some(u) {
        Some(v)
    } else {
        None
    }
}
