//! Dense complex linear algebra for 1–3 qubit registers.

mod bloch;
pub mod eigen;
mod matrix;
mod state;

pub use bloch::{
    axis_angle_unitary, bloch_rotation, observable, projector, BlochVector, MixedBloch, Outcome,
    NORMALIZE_TOLERANCE,
};
pub use matrix::{identity2, pauli, tensor, ComplexMatrix, C64, MAX_DIM};
pub use state::{
    collapsed, haar_random_pure, partial_trace, random_mixed_qubit, state_from_bloch, QuantumState,
    HERMITIAN_TOLERANCE, POSITIVITY_TOLERANCE, TRACE_TOLERANCE,
};
