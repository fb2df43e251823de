//! Geometric controlled-phase gate between the ion's internal state and the
//! charge qubit.
//!
//! State-dependent momentum kicks on the ion and signed coupling windows
//! ħκ·x̂·σ_z^q trace a closed loop in motional phase space whose area depends
//! on σ_z^s·σ_z^q. Kicks and coupling windows are impulsive; the motion
//! evolves freely between them.

mod engine;
mod schedule;
mod swap;

pub use engine::{
    bystander_check, fidelity_scaling_sweep, log_log_slope, run_gate_fock, GateOptions, GateResult,
    MotionModel, ScalingSweep,
};
pub use schedule::{
    analytic_phase, canonical_schedule, canonical_schedule_derived, loop_phase_alpha,
    solve_gate_time, AnalyticPhase, GateTimeSolution, IonParams, PulseSchedule, Segment,
};
pub use swap::{compose_swap, controlled_phase, swap_deviation};
