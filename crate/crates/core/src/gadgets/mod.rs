//! Hardness constructions: instances whose model-checking verdict encodes
//! 3-SAT, 3-clique cover, and `n`-colorability of `n²`-vertex graphs.

mod graph;
mod sat3;

use thiserror::Error;

use crate::formula::Formula;
use crate::model::{ModelError, Structure, Team};
use crate::satcore::SatError;

pub use graph::{gadget_clique_cover, gadget_coloring, Graph};
pub use sat3::{gadget_3sat, Cnf3Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("clause {0}: {1}")]
    MalformedClause(usize, String),
    #[error("line {line}: {msg}")]
    Graph { line: usize, msg: String },
    #[error("coloring gadget needs {expected} vertices, graph has {found}")]
    VertexCount { expected: usize, found: usize },
    #[error("{0}")]
    Dimacs(#[from] SatError),
    #[error("{0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub generator: &'static str,
    /// The source object in its own file format.
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub structure: Structure,
    pub team: Team,
    pub formula: Formula,
    pub provenance: Provenance,
}
