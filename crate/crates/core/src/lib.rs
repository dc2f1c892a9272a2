//! Randomized pairwise gossip for average consensus, with a privacy-preserving
//! variant that injects per-node noise and withdraws it on the node's next
//! activation.
//!
//! The crate is split by concern:
//!
//! - [`graph`]: topologies, incidence matrix, Laplacian spectrum.
//! - [`rng`]: counter-based random streams keyed by purpose and index.
//! - [`engine`]: the gossip state machine (noisy and standard).
//! - [`theory`]: closed-form rates and bounds.
//! - [`harness`]: multi-seed experiments, rate fitting, CSV/SVG output.

pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
