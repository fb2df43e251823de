//! Operator and state algebra on the composite space
//! ion internal (2) ⊗ charge qubit (2) ⊗ truncated motional Fock space (N).
//!
//! Basis index of |s, q, n⟩ is `(2·s + q)·N + n`, with `s`, `q` ∈ {0, 1}.
//! Index 0 of each qubit factor is the σ_z = +1 eigenstate.

mod displacement;
mod operator;
mod space;

pub use displacement::{compose_displacements, displacement_operator, loop_phase, DisplacementRecord};
pub use operator::{
    fidelity, matrix_exponential, matrix_exponential_capped, OperatorMatrix, StateVector,
    DEFAULT_DIM_CAP,
};
pub use space::{
    build_ladder_ops, coherent_state, embed, fock_state, pauli_x, pauli_z, product_state, Factor,
    HilbertSpace, DEFAULT_FOCK_DIM, LEAKAGE_LIMIT,
};

/// Complex scalar used throughout the crate.
pub type C64 = nalgebra::Complex<f64>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
