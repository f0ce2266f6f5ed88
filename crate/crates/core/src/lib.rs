//! Temporal quantum correlations on qubits.
//!
//! Sequential projective measurements on a single qubit, the temporal CHSH
//! expression and its quantum maximum, exhaustive classical (realistic,
//! local-in-time) strategies, the 1-bit memory computation game, and the
//! spatial two-qubit comparison for three-qubit states.
//!
//! Monte Carlo and search workloads are split into shards with independent
//! RNG substreams. With the `parallel` feature (default) shards run on the
//! rayon pool; results are bit-identical to sequential execution for the same
//! seed and shard count.

pub mod bell;
mod error;
pub mod exec;
pub mod game;
pub mod lhv;
pub mod qcore;
pub mod spatial;
pub mod stats;
pub mod temporal;

pub use error::{Error, Result};
pub use exec::{Execution, Sharding};
pub use qcore::{BlochVector, ComplexMatrix, MixedBloch, Outcome, QuantumState};
