use serde::Serialize;

use crate::algebra::{c, loop_phase, C64};
use crate::circuit::{CircuitParams, EffectiveCoupling};
use crate::constants::{ELEMENTARY_CHARGE, HBAR};
use crate::error::{invalid, Error, Result};

/// Trapped-ion parameters. Frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IonParams {
    pub mass: f64,
    pub trap_frequency: f64,
    /// δk_l, m⁻¹.
    pub photon_momentum: f64,
    /// Recorded only; kicks are ideal π pulses.
    pub rabi_frequency: f64,
    /// Recorded only.
    pub laser_detuning: f64,
}

impl IonParams {
    pub fn new(mass: f64, trap_frequency: f64, photon_momentum: f64) -> Result<Self> {
        let p = Self {
            mass,
            trap_frequency,
            photon_momentum,
            rabi_frequency: 0.0,
            laser_detuning: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("trap_frequency", self.trap_frequency),
            ("photon_momentum", self.photon_momentum),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Ground-state extent √(ħ/2mω) for oscillator frequency ω.
    pub fn length_scale(&self, omega: f64) -> f64 {
        (HBAR / (2.0 * self.mass * omega)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Segment {
    /// Train of |n| π pulses with alternating kick direction; a negative count
    /// starts with the opposite direction.
    Kick(i64),
    /// Coupling window; a negative duration reverses the sign of the coupling.
    Coupling(f64),
    /// Free motional evolution.
    Free(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
    /// Extra switching time added to the gate time; no evolution is applied.
    pub dead_time: f64,
}

impl PulseSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let s = Self {
            segments,
            dead_time: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for seg in &self.segments {
            match *seg {
                Segment::Free(t) if !(t > 0.0 && t.is_finite()) => {
                    return Err(invalid("free", format!("duration must be positive, got {t}")))
                }
                Segment::Coupling(t) if !t.is_finite() => {
                    return Err(invalid("coupling", "duration must be finite"))
                }
                _ => {}
            }
        }
        if !(self.dead_time >= 0.0) {
            return Err(invalid("dead_time", "must be non-negative"));
        }
        Ok(())
    }

    /// Total free-evolution time.
    pub fn free_time(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| if let Segment::Free(t) = s { *t } else { 0.0 })
            .sum()
    }

    /// Σ|τ| over coupling windows.
    pub fn coupling_time(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| if let Segment::Coupling(t) = s { t.abs() } else { 0.0 })
            .sum()
    }

    /// Gate time: free evolution, coupling windows and dead time.
    pub fn gate_time(&self) -> f64 {
        self.free_time() + self.coupling_time() + self.dead_time
    }

    /// Same schedule with every kick reversed.
    pub fn with_reversed_kicks(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| match *s {
                Segment::Kick(n) => Segment::Kick(-n),
                other => other,
            })
            .collect();
        Self {
            segments,
            dead_time: self.dead_time,
        }
    }

    /// Impulses (time, kick coefficient, coupling coefficient) in order; the
    /// generator of impulse j is (a_j σ_z^s + b_j κ σ_z^q)·x̂ with a_j in units
    /// of δk_l and b_j in seconds.
    fn impulses(&self) -> Vec<(f64, f64, f64)> {
        let mut t = 0.0;
        let mut out = Vec::new();
        for seg in &self.segments {
            match *seg {
                Segment::Kick(n) => out.push((t, n as f64, 0.0)),
                Segment::Coupling(tau) => out.push((t, 0.0, tau)),
                Segment::Free(dt) => t += dt,
            }
        }
        out
    }
}

/// Eight-step schedule; requires n1·t1 = n2·t2 and sets τ2 = τ1·t1/t2.
pub fn canonical_schedule(n1: i64, n2: i64, tau1: f64, t1: f64, t2: f64) -> Result<PulseSchedule> {
    if n1 <= 0 || n2 <= 0 {
        return Err(invalid("kick_count", format!("must be positive, got {n1}, {n2}")));
    }
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(invalid("free", format!("durations must be positive, got {t1}, {t2}")));
    }
    let lhs = n1 as f64 * t1;
    let rhs = n2 as f64 * t2;
    if (lhs - rhs).abs() > 1e-9 * lhs.max(rhs) {
        return Err(Error::Commensurability(format!(
            "n1*t1 = {lhs:e} differs from n2*t2 = {rhs:e}"
        )));
    }
    let tau2 = tau1 * t1 / t2;
    PulseSchedule::new(vec![
        Segment::Kick(n1),
        Segment::Coupling(tau1),
        Segment::Free(t1),
        Segment::Kick(-(n1 + n2)),
        Segment::Coupling(-(tau1 + tau2)),
        Segment::Free(t2),
        Segment::Kick(n2),
        Segment::Coupling(tau2),
    ])
}

/// As [`canonical_schedule`] with n2 = n1·t1/t2, which must be an integer.
pub fn canonical_schedule_derived(n1: i64, tau1: f64, t1: f64, t2: f64) -> Result<PulseSchedule> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(invalid("free", format!("durations must be positive, got {t1}, {t2}")));
    }
    let n2 = n1 as f64 * t1 / t2;
    let rounded = n2.round();
    if (n2 - rounded).abs() > 1e-9 * n2.abs().max(1.0) {
        return Err(Error::Commensurability(format!("n2 = n1*t1/t2 = {n2} is not an integer")));
    }
    canonical_schedule(n1, rounded as i64, tau1, t1, t2)
}

/// Loop-phase α of exp(−iα σ_z^s σ_z^q) from the displacement algebra. Each
/// impulse exp(−i c x̂_H(t)) is D(β) with β = −i c x₀ e^{iωt} in a harmonic
/// trap, or β = −i c x₀ (1 + iω_ref t) for a free particle with basis scale
/// x₀ = √(ħ/2mω_ref). The result does not depend on ω_ref.
pub fn loop_phase_alpha(
    schedule: &PulseSchedule,
    ion: &IonParams,
    kappa: f64,
    free_particle: bool,
) -> f64 {
    let omega = ion.trap_frequency;
    let x0 = ion.length_scale(omega);
    let mut phases = [[0.0; 2]; 2];
    for (si, s) in [1.0, -1.0].into_iter().enumerate() {
        for (qi, q) in [1.0, -1.0].into_iter().enumerate() {
            let steps: Vec<C64> = schedule
                .impulses()
                .into_iter()
                .map(|(t, a, b)| {
                    let coeff = a * ion.photon_momentum * s + b * kappa * q;
                    let rot = if free_particle {
                        c(1.0, omega * t)
                    } else {
                        c((omega * t).cos(), (omega * t).sin())
                    };
                    c(0.0, -coeff * x0) * rot
                })
                .collect();
            phases[si][qi] = loop_phase(&steps).phase;
        }
    }
    -(phases[0][0] + phases[1][1] - phases[0][1] - phases[1][0]) / 4.0
}

/// Closed-form phases for a canonical schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPhase {
    /// Free-particle loop phase with the full coupling κ (includes C_m/C_t).
    pub exact: f64,
    /// Same loop with the bare coupling e²/(ħC_r d_i).
    pub bare: f64,
    /// e²δk τ n t1t2/(2C_r m d_i (t1+t2)), the closed-form prefactor with one
    /// power of d_i so that it is dimensionless.
    pub closed_form: f64,
}

fn canonical_parts(schedule: &PulseSchedule) -> Result<(f64, f64, f64, f64)> {
    match schedule.segments.as_slice() {
        [Segment::Kick(n1), Segment::Coupling(tau1), Segment::Free(t1), _, _, Segment::Free(t2), _, _] => {
            Ok((*n1 as f64, *tau1, *t1, *t2))
        }
        _ => Err(invalid("schedule", "not a canonical eight-step schedule")),
    }
}

/// Evaluates the analytic gate phase variants for a canonical schedule.
pub fn analytic_phase(
    schedule: &PulseSchedule,
    ion: &IonParams,
    circuit: &CircuitParams,
    coupling: &EffectiveCoupling,
) -> Result<AnalyticPhase> {
    let (n1, tau1, t1, t2) = canonical_parts(schedule)?;
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
    let loop_factor = HBAR * ion.photon_momentum / ion.mass * n1 * tau1 * t1 * (t1 + t2) / t2;
    let bare_kappa = e2 / (HBAR * circuit.c_r * circuit.d_i);
    Ok(AnalyticPhase {
        exact: loop_factor * coupling.kappa,
        bare: loop_factor * bare_kappa,
        closed_form: e2 * ion.photon_momentum * tau1 * n1 * t1 * t2
            / (2.0 * circuit.c_r * ion.mass * circuit.d_i * (t1 + t2)),
    })
}

/// Coupling window and gate time reaching a target phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateTimeSolution {
    pub tau1: f64,
    pub gate_time: f64,
}

/// Solves α(τ1) = target for an analytic variant that is linear in τ1.
/// `phase_per_second` is α/τ1.
pub fn solve_gate_time(
    target: f64,
    phase_per_second: f64,
    t1: f64,
    t2: f64,
    dead_time: f64,
) -> Result<GateTimeSolution> {
    if phase_per_second == 0.0 || !phase_per_second.is_finite() {
        return Err(invalid("phase", "phase does not depend on the coupling window"));
    }
    let tau1 = target / phase_per_second;
    let tau2 = tau1 * t1 / t2;
    let gate_time = t1 + t2 + tau1.abs() + (tau1 + tau2).abs() + tau2.abs() + dead_time;
    Ok(GateTimeSolution { tau1, gate_time })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_schedule() {
        let s = canonical_schedule(10, 10, 2e-9, 5e-9, 5e-9).unwrap();
        assert_eq!(s.segments.len(), 8);
        assert_eq!(s.segments[7], Segment::Coupling(2e-9));
        assert_eq!(s.segments[3], Segment::Kick(-20));
        assert!((s.gate_time() - 18e-9).abs() < 1e-20);
    }

    #[test]
    fn derived_second_kick_count() {
        let s = canonical_schedule_derived(10, 1e-9, 5e-9, 10e-9).unwrap();
        assert_eq!(s.segments[6], Segment::Kick(5));
        assert_eq!(s.segments[7], Segment::Coupling(0.5e-9));
        assert!(canonical_schedule_derived(10, 1e-9, 5e-9, 15e-9).is_err());
        assert!(canonical_schedule(10, 10, 1e-9, 5e-9, 10e-9).is_err());
        assert!(canonical_schedule(10, 10, 1e-9, -5e-9, 5e-9).is_err());
    }

    #[test]
    fn loop_phase_matches_closed_form() {
        let ion = IonParams::new(1.0e-26, 1e5, 1e7).unwrap();
        let kappa = 3e14;
        let (n1, tau1, t1, t2) = (4i64, 2e-9, 3e-9, 6e-9);
        let s = canonical_schedule_derived(n1, tau1, t1, t2).unwrap();
        let alpha = loop_phase_alpha(&s, &ion, kappa, true);
        let want = HBAR * ion.photon_momentum * kappa / ion.mass * n1 as f64 * tau1 * t1 * (t1 + t2) / t2;
        assert!((alpha - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn zero_window_gives_zero_phase() {
        let ion = IonParams::new(1.0e-26, 1e5, 1e7).unwrap();
        let s = canonical_schedule(10, 10, 0.0, 5e-9, 5e-9).unwrap();
        assert_eq!(loop_phase_alpha(&s, &ion, 1e15, true), 0.0);
    }

    #[test]
    fn gate_time_solution() {
        let sol = solve_gate_time(1.0, 1e9, 5e-9, 5e-9, 0.0).unwrap();
        assert!((sol.tau1 - 1e-9).abs() < 1e-24);
        assert!((sol.gate_time - 14e-9).abs() < 1e-20);
    }
}
