use std::io;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("graph has no edges: no clique of size >= 2 exists")]
    NoClique,
    #[error("empty graph")]
    EmptyGraph,
    #[error("temporal graph has no bins; quantize before decomposing")]
    Unbinned,
    #[error("node {node} violates CNF: {reason}")]
    NotCnf { node: usize, reason: String },
    #[error("rule canonicalization budget exceeded: {0}")]
    CanonBudget(String),
    #[error("grammar record {index}: {msg}")]
    GrammarFormat { index: usize, msg: String },
    #[error("derivation stuck: no rule for arity {arity}, history {history}")]
    DerivationStuck { arity: usize, history: String },
    #[error("derivation exceeded {0} rule applications")]
    ApplicationLimit(usize),
    #[error("target size {target} is unreachable; nearest reachable sizes: {nearest:?}")]
    UnreachableSize { target: usize, nearest: Vec<usize> },
    #[error("rejection sampling gave up after {0} attempts")]
    AttemptsExhausted(usize),
    #[error("power iteration did not converge (residual {0:.3e})")]
    NoConvergence(f64),
    #[error(transparent)]
    Io(#[from] io::Error),
}
