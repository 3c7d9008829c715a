//! Minimum-weight vertex-disjoint cycle covers and per-cycle spectral filtering.
//!
//! The pipeline reduces a weighted undirected graph to its minimum-weight
//! 2-factor (a vertex-disjoint cycle cover) by way of an edge-subdivision /
//! vertex-splitting gadget and a minimum-weight perfect matching, then treats
//! each cycle as a short circular signal that can be filtered with an ordinary
//! DFT. The `image` module builds 8-connected pixel lattices so the same
//! machinery doubles as a simple image denoiser.

pub mod analysis;
pub mod graph;
pub mod image;
pub mod matching;
pub mod spectral;
pub mod vcc;

pub use graph::{Graph, GraphError, IntegerGraph, QuantizeMode};
pub use matching::{Matching, MatchingError};
pub use vcc::{CycleCover, VccError};
