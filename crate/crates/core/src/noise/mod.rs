//! Charge noise on the qubit gate voltage and its suppression by periodic
//! charge flips.
//!
//! Spectra are two-sided: ⟨δV²⟩ = ∫ S(ω) dω/2π over the whole real axis, with
//! S(−ω) = S(ω). A phase φ = λ∫δV(t)g(t)dt accumulates with coupling
//! λ = E_cC_g/2e, where g(t) = ±1 is the flip pattern.

mod model;
mod protocol;
mod synth;
mod variance;

pub use model::{NoiseModel, SpectrumKind};
pub use protocol::{g_function, FlipProtocol};
pub use synth::{periodogram, stochastic_phase, synthesize_trajectory, NoiseTrajectory};
pub use variance::{
    decoherence_rate, filter_variance, monte_carlo_phases, phase_variance, DephasingRate,
    PhaseVariance,
};
