//! Extraction of probabilistic hyperedge replacement grammars from the
//! temporal structure of growing graphs, grammar-driven graph generation
//! (faithful replay, free derivation, rejection and exact-size sampling),
//! and distribution-level comparison of generated graphs against originals.

pub mod baselines;
pub mod decompose;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod grammar;
pub mod graph;
pub mod metrics;
pub mod temporal;

pub use error::{Error, Result};
pub use graph::{StaticGraph, VertexId};
pub use temporal::{Binning, ColumnSpec, EdgeEvent, TemporalGraph};
