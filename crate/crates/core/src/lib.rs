//! Tree-restricted low-congestion shortcuts for excluded-minor network
//! families: graph model, shortcut quality checks, tree and clique-sum
//! decompositions, cell gates, shortcut constructors, a CONGEST simulator
//! and an experiment harness.

pub mod construct;
pub mod decomp;
pub mod error;
pub mod gates;
pub mod graph;
pub mod harness;
pub mod io;
pub mod shortcut;
pub mod sim;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{AnnotatedGraph, ArcSpan, Edge, RootedTree, VortexSpec};
pub use weight::Weight;
