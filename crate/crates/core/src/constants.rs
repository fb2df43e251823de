//! Physical constants (CODATA 2018 exact or recommended values), SI units.

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Mass of ⁹Be⁺ (kg), electron mass neglected.
pub const MASS_BE9: f64 = 9.012_183 * AMU;
/// Mass of ⁴³Ca⁺ (kg), electron mass neglected.
pub const MASS_CA43: f64 = 42.958_766 * AMU;

/// Quantum resistance ħ/(2e)² (Ω).
pub fn quantum_resistance() -> f64 {
    HBAR / (2.0 * ELEMENTARY_CHARGE).powi(2)
}

/// Reduced flux quantum ħ/2e (Wb).
pub fn reduced_flux_quantum() -> f64 {
    HBAR / (2.0 * ELEMENTARY_CHARGE)
}

/// Converts an ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

/// Converts an angular frequency (rad/s) to ordinary frequency (Hz).
pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * std::f64::consts::PI)
}
