//! Cavity loss treated as an oscillator bath acting on the charge qubit.
//!
//! Integrating out the lossy cavity leaves a Matsubara function
//! K(ν) = K∞(ν² + νγ)/(ν² + ω_r² + νγ) with K∞ = 4c²/(C_r + C_m), γ = R_r/L_r
//! and c the charge-coupling ratio C_m/2C_t. Its retarded continuation
//! reproduces c²ω·Re Z_eff(ω) with Z_eff a capacitor (C_r + C_m)/4 in parallel
//! with the series L_r, R_r.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{c, C64};
use crate::circuit::CircuitParams;
use crate::constants::{quantum_resistance, BOLTZMANN, HBAR};
use crate::error::{invalid, Error, Result};

/// Cavity bath seen by the charge qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathSpec {
    pub r_r: f64,
    pub temperature: f64,
    pub c_r: f64,
    pub c_m: f64,
    pub c_t: f64,
    pub l_r: f64,
    /// Charge-coupling ratio; C_m/2C_t for the charge qubit.
    pub coupling_ratio: f64,
}

impl BathSpec {
    pub fn new(r_r: f64, temperature: f64, c_r: f64, c_m: f64, c_t: f64, l_r: f64) -> Result<Self> {
        let spec = Self {
            r_r,
            temperature,
            c_r,
            c_m,
            c_t,
            l_r,
            coupling_ratio: c_m / (2.0 * c_t),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_circuit(p: &CircuitParams, r_r: f64, temperature: f64) -> Result<Self> {
        Self::new(r_r, temperature, p.c_r, p.c_m, p.c_t(), p.l_r)
    }

    /// Same pipeline with another coupling ratio (e.g. for the ion motion).
    pub fn with_coupling_ratio(mut self, ratio: f64) -> Self {
        self.coupling_ratio = ratio;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(invalid("T", format!("must be positive, got {}", self.temperature)));
        }
        if !(self.r_r >= 0.0 && self.r_r.is_finite()) {
            return Err(invalid("R_r", format!("must be non-negative, got {}", self.r_r)));
        }
        for (name, v) in [("C_r", self.c_r), ("C_m", self.c_m), ("C_t", self.c_t), ("L_r", self.l_r)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// ω_r = 2/√((C_r + C_m)L_r).
    pub fn omega_r(&self) -> f64 {
        2.0 / ((self.c_r + self.c_m) * self.l_r).sqrt()
    }

    /// Shunt capacitance C' = (C_r + C_m)/4.
    pub fn c_prime(&self) -> f64 {
        (self.c_r + self.c_m) / 4.0
    }

    /// Ohmic damping rate γ = R_r/L_r.
    pub fn damping(&self) -> f64 {
        self.r_r / self.l_r
    }

    /// ħβ in seconds.
    pub fn hbar_beta(&self) -> f64 {
        HBAR / (BOLTZMANN * self.temperature)
    }

    /// K∞ = c²/C'.
    pub fn k_infinity(&self) -> f64 {
        self.coupling_ratio.powi(2) / self.c_prime()
    }
}

/// Matsubara function K(ν) on the imaginary axis; ν may be complex for the
/// continuation. The damping term uses ν itself, which equals |ν_n| on the
/// positive Matsubara frequencies.
pub fn matsubara_function(spec: &BathSpec, nu: C64) -> C64 {
    let g = spec.damping();
    let w2 = spec.omega_r().powi(2);
    let num = nu * nu + nu * g;
    (num / (num + w2)) * spec.k_infinity()
}

/// Frequency-dependent damping γ̂(ν) that recasts K(ν) in the form
/// K∞ν²/(ν² + ω_r² + νγ̂(ν)).
pub fn calibrated_damping(spec: &BathSpec, nu: f64) -> f64 {
    let g = spec.damping();
    -g * spec.omega_r().powi(2) / (nu * (nu + g))
}

const MAX_TERMS: usize = 1 << 26;

/// Imaginary-time kernel after removal of the contact term K∞·δ(τ):
/// k(τ) = −(K∞/ħβ) Σ_n ω_r²cos(ν_nτ)/(ν_n² + ω_r² + |ν_n|γ).
///
/// The lossless part is summed in closed form; the damping correction is
/// summed explicitly starting at `n_max` terms and doubled until the relative
/// change drops below 1e-6.
pub fn matsubara_kernel(spec: &BathSpec, tau: f64, n_max: usize) -> Result<f64> {
    spec.validate()?;
    let hb = spec.hbar_beta();
    let a = spec.omega_r() * hb / (2.0 * PI);
    let g = spec.damping() * hb / (2.0 * PI);
    let x = (tau.abs() / hb).fract();
    let lossless = lossless_sum(a, x);
    let correction = |n: usize| -> f64 {
        let n = n as f64;
        let n2a2 = n * n + a * a;
        -a * a * g * n / (n2a2 * (n2a2 + g * n)) * (2.0 * PI * n * x).cos()
    };
    let tol = 1e-6;
    let mut n_terms = n_max.max(16);
    let mut partial: f64 = (1..=n_terms).map(correction).sum();
    let total = loop {
        if g == 0.0 {
            break lossless;
        }
        let next_terms = n_terms * 2;
        if next_terms > MAX_TERMS {
            return Err(Error::NonConvergentSum {
                n_max: n_terms,
                tolerance: tol,
            });
        }
        let extra: f64 = (n_terms + 1..=next_terms).map(correction).sum();
        let old = lossless + 2.0 * partial;
        partial += extra;
        n_terms = next_terms;
        let new = lossless + 2.0 * partial;
        if (new - old).abs() <= tol * new.abs() {
            break new;
        }
    };
    Ok(-spec.k_infinity() / hb * total)
}

/// Σ_{n∈ℤ} a²cos(2πnx)/(n² + a²) for x ∈ [0, 1].
fn lossless_sum(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let pa = PI * a;
    // cosh(pa(1−2x))/sinh(pa) written with decaying exponentials.
    let u = (-2.0 * pa * x).exp();
    let v = (-2.0 * pa * (1.0 - x)).exp();
    let w = (-2.0 * pa).exp();
    pa * (u + v) / (1.0 - w)
}

/// Z_eff(ω) = [iωC' + 1/(iωL_r + R_r)]⁻¹.
pub fn effective_impedance(spec: &BathSpec, omega: f64) -> Result<C64> {
    if !(omega >= 0.0) {
        return Err(invalid("omega", format!("must be non-negative, got {omega}")));
    }
    let series = c(spec.r_r, omega * spec.l_r);
    if series.norm() == 0.0 {
        return Err(Error::ImpedancePole { omega });
    }
    let shunt = omega * spec.c_prime();
    let admittance = c(0.0, shunt) + series.inv();
    if admittance.norm() < 1e-9 * shunt {
        return Err(Error::ImpedancePole { omega });
    }
    Ok(admittance.inv())
}

fn coth_factor(spec: &BathSpec, omega: f64) -> f64 {
    let y = HBAR * omega / (2.0 * BOLTZMANN * spec.temperature);
    1.0 / y.tanh()
}

/// J_eff(ω) = c²·ω·Re Z_eff(ω)·coth(ħω/2k_BT), in Ω·s⁻¹. At ω = 0 the
/// limit c²·Re Z_eff(0)·2k_BT/ħ is returned.
pub fn effective_spectral_density(spec: &BathSpec, omega: f64) -> Result<f64> {
    spec.validate()?;
    if omega == 0.0 {
        return Ok(spectral_density_zero_limit(spec));
    }
    let z = effective_impedance(spec, omega)?;
    Ok(spec.coupling_ratio.powi(2) * omega * z.re * coth_factor(spec, omega))
}

/// J_eff(0⁺) = c²·R_r·2k_BT/ħ.
pub fn spectral_density_zero_limit(spec: &BathSpec) -> f64 {
    spec.coupling_ratio.powi(2) * spec.r_r * 2.0 * BOLTZMANN * spec.temperature / HBAR
}

/// Retarded response −K(δ − iω).
pub fn retarded_kernel(spec: &BathSpec, omega: f64, delta: f64) -> C64 {
    -matsubara_function(spec, c(delta, -omega))
}

/// J_eff from the continued Matsubara function, δ = 1e-6·ω_r.
pub fn continued_spectral_density(spec: &BathSpec, omega: f64) -> Result<f64> {
    continued_spectral_density_with(spec, omega, 1e-6 * spec.omega_r(), false)
}

/// As [`continued_spectral_density`] with explicit δ; `richardson` combines
/// δ and δ/2 to cancel the leading O(δ) error.
pub fn continued_spectral_density_with(
    spec: &BathSpec,
    omega: f64,
    delta: f64,
    richardson: bool,
) -> Result<f64> {
    spec.validate()?;
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    let im = if richardson {
        2.0 * retarded_kernel(spec, omega, delta / 2.0).im - retarded_kernel(spec, omega, delta).im
    } else {
        retarded_kernel(spec, omega, delta).im
    };
    Ok(im * coth_factor(spec, omega))
}

/// Charge-qubit decoherence rate with its fluctuation-dissipation closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceRate {
    /// (R_r/R_k)(2k_BT/ħ)c², s⁻¹.
    pub gamma: f64,
    /// J_eff(0⁺)/R_k, s⁻¹.
    pub closure: f64,
}

impl DecoherenceRate {
    pub fn relative_residual(&self) -> f64 {
        if self.gamma == 0.0 {
            self.closure.abs()
        } else {
            ((self.gamma - self.closure) / self.gamma).abs()
        }
    }
}

pub fn charge_decoherence_rate(spec: &BathSpec) -> Result<DecoherenceRate> {
    spec.validate()?;
    let rk = quantum_resistance();
    let gamma = (spec.r_r / rk)
        * (2.0 * BOLTZMANN * spec.temperature / HBAR)
        * spec.coupling_ratio.powi(2);
    let closure = spectral_density_zero_limit(spec) / rk;
    Ok(DecoherenceRate { gamma, closure })
}

/// Cavity resistance giving the requested rate at temperature T.
pub fn resistance_for_rate(rate: f64, temperature: f64, coupling_ratio: f64) -> f64 {
    rate * quantum_resistance() * HBAR / (2.0 * BOLTZMANN * temperature * coupling_ratio.powi(2))
}

/// Spectral pipeline evaluated on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub omega_grid: Vec<f64>,
    pub z_eff: Vec<(f64, f64)>,
    pub j_eff: Vec<f64>,
    pub j_continued: Vec<f64>,
    pub gamma_rq: DecoherenceRate,
}

impl SpectralResult {
    /// Largest |J_cont/J − 1| over grid points with J > 0.
    pub fn max_continuation_residual(&self) -> f64 {
        self.j_eff
            .iter()
            .zip(&self.j_continued)
            .filter(|(j, _)| **j > 0.0)
            .map(|(j, jc)| (jc / j - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates Z_eff, J_eff and the continuation on every grid point in parallel.
pub fn spectral_pipeline(spec: &BathSpec, omega_grid: &[f64]) -> Result<SpectralResult> {
    spec.validate()?;
    let rows: Vec<(C64, f64, f64)> = omega_grid
        .par_iter()
        .map(|&w| -> Result<(C64, f64, f64)> {
            let z = effective_impedance(spec, w)?;
            let j = effective_spectral_density(spec, w)?;
            let jc = continued_spectral_density(spec, w)?;
            Ok((z, j, jc))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralResult {
        omega_grid: omega_grid.to_vec(),
        z_eff: rows.iter().map(|r| (r.0.re, r.0.im)).collect(),
        j_eff: rows.iter().map(|r| r.1).collect(),
        j_continued: rows.iter().map(|r| r.2).collect(),
        gamma_rq: charge_decoherence_rate(spec)?,
    })
}

/// Logarithmic grid of `n` points over [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}
