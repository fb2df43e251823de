//! Numerical simulator for a hybrid quantum processor in which a trapped-ion
//! storage qubit is coupled to a superconducting charge qubit through a
//! superconducting cavity.
//!
//! The crate is organized by subsystem:
//!
//! * [`algebra`]: dense operators on the ion-internal ⊗ charge ⊗ motion space,
//!   matrix exponentials and the displacement-operator algebra.
//! * [`circuit`]: effective couplings derived from the electrical circuit
//!   (cavity-mediated coupling, dc-SQUID switch, balance circuit).
//! * [`gate`]: the eight-step geometric controlled-phase gate, the swap gate and
//!   bystander-ion checks.
//! * [`noise`]: 1/f charge noise, the charge-flip echo protocol and the
//!   resulting dephasing.
//! * [`dissipation`]: cavity loss as an oscillator bath: Matsubara kernel,
//!   effective impedance, spectral density and decoherence rate.
//! * [`config`] and [`scenario`]: configuration parsing and the reproducible
//!   experiment runner behind the `hybridsim` binary.

// NaN must fail validation, hence `!(x > 0.0)` rather than `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod circuit;
pub mod config;
pub mod constants;
pub mod dissipation;
pub mod error;
pub mod gate;
pub mod noise;
pub mod scenario;

pub use error::{Error, Result};
