//! Exact complex linear algebra for one- and two-qubit systems.
//!
//! Basis ordering: the signal (control) qubit is the most significant bit
//! of the computational-basis index, so a two-qubit state is stored as
//! `[|00⟩, |01⟩, |10⟩, |11⟩]` with the signal qubit written first.
//! Global phase is physically irrelevant after post-selection; use
//! [`PureState::approx_eq_up_to_phase`] when comparing states.

mod density;
mod prob;
mod state;
mod unitary;

pub use density::{fidelity, partial_trace, DensityMatrix};
pub use prob::{sample_counts, ProbVector};
pub use state::{apply_single, controlled_pair, PureState};
pub use unitary::{hadamard, ry, rz, su2, zyz_angles, UnitaryMatrix, ZyzDecomposition};

pub use num_complex::Complex64;
