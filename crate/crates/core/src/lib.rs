//! Hardware-aware quadratization and QAOA compilation.
//!
//! The crate turns higher-order binary cost functions into QUBOs whose
//! interaction graphs are chains of triangles, lays those chains out along
//! a line of physically coupled qubits, and emits QAOA circuits whose cost
//! layer has constant depth regardless of problem size. Every
//! transformation is checkable by independent brute-force and gate-level
//! oracles.
//!
//! Module map:
//! - [`pubo`]: multilinear binary polynomials, parsing, penalty terms
//! - [`quadratizer`]: baseline and chain quadratization strategies
//! - [`graph`]: interaction graphs and triangle-chain recovery
//! - [`device`]: coupling maps, heavy-hex generation, path extraction
//! - [`circuit`]: gate-level IR, depth metrics, SWAP decomposition
//! - [`compiler`]: chain layout and constant-depth cost-layer scheduling
//! - [`verify`]: exhaustive and per-basis-state oracles
//! - [`bench`]: random instances and head-to-head strategy comparison
//!
//! The `parallel` feature (default) runs the oracle enumeration loops and
//! the benchmark harness on a rayon pool; without it everything falls back
//! to sequential iteration with identical results.

pub mod bench;
pub mod circuit;
pub mod compiler;
pub mod device;
pub mod graph;
pub mod pubo;
pub mod quadratizer;
pub mod verify;

pub use circuit::{Circuit, Gate, Layout, Metrics};
pub use compiler::{compile_qaoa, cost_layer_circuit, CompilationResult, QaoaParams};
pub use device::{heavy_hex, ibm_torino, longest_nn_path, CouplingMap, HardwarePath};
pub use graph::{build_interaction_graph, extract_chains, InteractionGraph, TriangleChain};
pub use pubo::{parse_polynomial, Monomial, Polynomial, VarId};
pub use quadratizer::{quadratize, QuadratizedProblem, Strategy, TieBreak};
pub use verify::{brute_force_min, check_quadratization, phase_oracle_check, VerificationReport};
