//! Exact reconstruction of point sets on the line from partial pairwise
//! distances.
//!
//! The crate decides which distances are forced by a revealed edge set,
//! tests global rigidity in one dimension through NAC-colourings, extracts
//! rigid subgraphs, decomposes sparse random graphs and runs seeded
//! experiments over them. All positions and lengths are exact rationals.

pub mod counterexample;
pub mod decompose;
pub mod experiment;
pub mod extract;
pub mod graph;
pub mod instance;
pub mod random_models;
pub mod rational;
pub mod reconstruct;
pub mod rigidity;

pub use graph::{distance_map, Cycle, EdgeLengthMap, EmbeddedGraph, Graph, MultiGraph, Subgraph, UnionFind};
pub use instance::{read_instance, write_instance};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational {0:?}")]
    BadRational(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("expected {expected} positions, got {got}")]
    PositionCount { expected: usize, got: usize },
    #[error("vertex {vertex} repeats position {position}")]
    DuplicatePosition { vertex: usize, position: String },
    #[error("graph must be connected")]
    Disconnected,
    #[error("vertices must be distinct")]
    SameVertex,
    #[error("pair is reconstructible; no witness exists")]
    Reconstructible,
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("{what} limited to {limit}, got {got}")]
    SizeLimit { what: &'static str, limit: usize, got: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("graph is globally rigid")]
    Rigid,
    #[error("verification failed: {0}")]
    Verification(String),
}
