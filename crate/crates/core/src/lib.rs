//! Coherence analysis for composite networks: disjoint subgraphs joined by a
//! chosen set of connecting edges.
//!
//! * [`graph`]: simple graphs, Laplacians, composite assembly.
//! * [`generate`]: seeded Erdős–Rényi graphs and stubbornness profiles.
//! * [`coherence`]: `H_C = ½ tr L†`, `H_S = ½ tr (L + D)⁻¹`, resistance
//!   distance and centrality.
//! * [`composite`]: closed-form coherence of bridge-node composites,
//!   backbone arrangement rules, and coherence bounds.
//! * [`selection`]: greedy and exhaustive choice of connecting edges.
//! * [`simulator`]: Euler–Maruyama estimates of both coherence measures.
//! * [`experiments`]: reproducible experiment drivers behind the CLI.

pub mod coherence;
pub mod composite;
pub mod experiments;
pub mod generate;
pub mod graph;
pub mod selection;
pub mod simulator;

pub use coherence::{
    coherence_consensus, coherence_stubborn, grounded_laplacian_coherence, min_centrality_node,
    pseudo_inverse_trace, resistance_centrality, resistance_matrix, total_effective_resistance,
    CoherenceError, ResistanceMatrix,
};
pub use graph::{
    assemble, edge_laplacian, Composite, CompositeSpec, Edge, Graph, GraphError, NodeRef, Partition,
    StubbornnessProfile,
};
