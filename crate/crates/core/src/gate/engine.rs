use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::schedule::{loop_phase_alpha, IonParams, PulseSchedule, Segment};
use crate::algebra::{build_ladder_ops, c, HilbertSpace, OperatorMatrix, C64, LEAKAGE_LIMIT};
use crate::error::{invalid, Error, Result};

/// Motional Hamiltonian between impulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MotionModel {
    /// ħω_ν a†a.
    Harmonic,
    /// p²/2m, represented in the Fock basis of an oscillator at ω_ν.
    FreeParticle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateOptions {
    pub motion: MotionModel,
    /// Residual Josephson splitting Ē_J (rad/s) applied as Ē_Jσ_z^q/2 during
    /// coupling windows; `None` drops it.
    pub reduced_josephson: Option<f64>,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self {
            motion: MotionModel::Harmonic,
            reduced_josephson: None,
        }
    }
}

/// Operator that acts as N×N blocks on the four (σ_z^s, σ_z^q) sectors and
/// then optionally flips the ion-internal label. Sector k = 2s + q, with
/// s, q = 0 for eigenvalue +1.
#[derive(Debug, Clone)]
struct SectorOp {
    flip: bool,
    blocks: [DMatrix<C64>; 4],
}

fn sector_sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SectorOp {
    fn uniform(block: DMatrix<C64>) -> Self {
        Self {
            flip: false,
            blocks: [block.clone(), block.clone(), block.clone(), block],
        }
    }

    fn from_fn(flip: bool, f: impl Fn(usize, usize) -> DMatrix<C64>) -> Self {
        Self {
            flip,
            blocks: [f(0, 0), f(0, 1), f(1, 0), f(1, 1)],
        }
    }

    /// `next · self`.
    fn then(&self, next: &SectorOp) -> SectorOp {
        let blocks = std::array::from_fn(|k| {
            let src = if self.flip { k ^ 2 } else { k };
            &next.blocks[src] * &self.blocks[k]
        });
        SectorOp {
            flip: self.flip ^ next.flip,
            blocks,
        }
    }

    fn apply(&self, state: &[DVector<C64>; 4]) -> [DVector<C64>; 4] {
        let mut out: [DVector<C64>; 4] = std::array::from_fn(|_| DVector::zeros(state[0].len()));
        for k in 0..4 {
            let dst = if self.flip { k ^ 2 } else { k };
            out[dst] = &self.blocks[k] * &state[k];
        }
        out
    }

    fn to_full(&self, n: usize) -> OperatorMatrix {
        let mut full = DMatrix::zeros(4 * n, 4 * n);
        for k in 0..4 {
            let dst = if self.flip { k ^ 2 } else { k };
            full.view_mut((dst * n, k * n), (n, n)).copy_from(&self.blocks[k]);
        }
        OperatorMatrix::new(full)
    }
}

/// Cached spectral data for the motional operators.
struct Motion {
    n: usize,
    x0: f64,
    x_vectors: DMatrix<C64>,
    x_values: DVector<f64>,
    free: FreeGenerator,
}

enum FreeGenerator {
    Diagonal(DVector<f64>),
    Spectral(DMatrix<C64>, DVector<f64>),
}

fn exp_spectral(vectors: &DMatrix<C64>, values: &DVector<f64>, scale: f64) -> DMatrix<C64> {
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= c(0.0, -scale * values[j]).exp();
    }
    scaled * vectors.adjoint()
}

impl Motion {
    fn new(space: &HilbertSpace, ion: &IonParams, model: MotionModel) -> Self {
        let n = space.fock_dim();
        let omega = ion.trap_frequency;
        let (a, adag) = build_ladder_ops(space);
        let q = a.entries() + adag.entries();
        let eig = SymmetricEigen::new(q);
        let free = match model {
            MotionModel::Harmonic => {
                FreeGenerator::Diagonal(DVector::from_fn(n, |k, _| omega * k as f64))
            }
            MotionModel::FreeParticle => {
                // p = i p₀(a† − a) with p₀ = ħ/2x₀, so p²/2mħ = (ω/4)·P².
                let p = (adag.entries() - a.entries()) * c(0.0, 1.0);
                let gen = (&p * &p) * c(omega / 4.0, 0.0);
                let gen = (&gen + gen.adjoint()) * c(0.5, 0.0);
                let eig = SymmetricEigen::new(gen);
                FreeGenerator::Spectral(eig.eigenvectors, eig.eigenvalues)
            }
        };
        Self {
            n,
            x0: ion.length_scale(omega),
            x_vectors: eig.eigenvectors,
            x_values: eig.eigenvalues,
            free,
        }
    }

    /// exp(−i c x̂) for c in m⁻¹.
    fn exp_x(&self, coeff: f64) -> DMatrix<C64> {
        exp_spectral(&self.x_vectors, &self.x_values, coeff * self.x0)
    }

    fn free(&self, t: f64) -> DMatrix<C64> {
        match &self.free {
            FreeGenerator::Diagonal(e) => {
                DMatrix::from_diagonal(&DVector::from_fn(self.n, |k, _| c(0.0, -e[k] * t).exp()))
            }
            FreeGenerator::Spectral(v, e) => exp_spectral(v, e, t),
        }
    }
}

fn kick_train(motion: &Motion, count: i64, dk: f64) -> SectorOp {
    let n = motion.n;
    let direction = count.signum() as f64;
    let plus = motion.exp_x(dk);
    let minus = motion.exp_x(-dk);
    let mut total = SectorOp::uniform(DMatrix::identity(n, n));
    for m in 0..count.unsigned_abs() {
        let z = direction * if m % 2 == 0 { 1.0 } else { -1.0 };
        let pulse = SectorOp::from_fn(true, |s, _| {
            if z * sector_sign(s) > 0.0 {
                plus.clone()
            } else {
                minus.clone()
            }
        });
        total = total.then(&pulse);
    }
    total
}

fn coupling_window(motion: &Motion, kappa: f64, tau: f64, splitting: Option<f64>) -> SectorOp {
    let plus = motion.exp_x(kappa * tau);
    let minus = motion.exp_x(-kappa * tau);
    SectorOp::from_fn(false, |_, q| {
        let sign = sector_sign(q);
        let mut block = if sign > 0.0 { plus.clone() } else { minus.clone() };
        if let Some(e) = splitting {
            block *= c(0.0, -sign * e * tau.abs() / 2.0).exp();
        }
        block
    })
}

/// Result of propagating a gate schedule.
#[derive(Debug, Clone)]
pub struct GateResult {
    pub total_unitary: OperatorMatrix,
    /// α of exp(−iα σ_z^s σ_z^q), chosen modulo π/2 to maximize the fidelity.
    pub alpha: f64,
    /// ⟨ψ_m|U₀(T)†U|ψ_m⟩ on the sectors (++), (+−), (−+), (−−).
    pub sector_overlaps: [C64; 4],
    pub gate_time: f64,
    /// 1 − |⟨ideal|actual⟩|² for the input |+⟩|+⟩⊗ψ_m.
    pub infidelity: f64,
    /// √(1 − F), the trace distance of the two pure outputs.
    pub trace_distance: f64,
    pub max_leakage: f64,
}

impl GateResult {
    /// α shifted by a multiple of π/2 to lie closest to `reference`.
    pub fn alpha_near(&self, reference: f64) -> f64 {
        let quarter = PI / 2.0;
        self.alpha + ((reference - self.alpha) / quarter).round() * quarter
    }

    /// Sector phases arg(w_k).
    pub fn sector_phases(&self) -> [f64; 4] {
        self.sector_overlaps.map(|w| w.arg())
    }

    /// Two-qubit gate with U₀(T) and the motion projected out: diagonal
    /// unit-modulus phases on (s, q).
    pub fn logical_gate(&self) -> OperatorMatrix {
        let d = DVector::from_iterator(4, self.sector_overlaps.iter().map(|w| w / w.norm()));
        OperatorMatrix::new(DMatrix::from_diagonal(&d))
    }
}

fn overlap(fid_phases: &[C64; 4], alpha: f64) -> f64 {
    let mut acc = c(0.0, 0.0);
    for (k, w) in fid_phases.iter().enumerate() {
        let sq = sector_sign(k >> 1) * sector_sign(k & 1);
        acc += c(0.0, alpha * sq).exp() * w;
    }
    (acc / c(4.0, 0.0)).norm_sqr()
}

/// Propagates the schedule on ion ⊗ charge ⊗ Fock(N) and extracts α.
pub fn run_gate_fock(
    schedule: &PulseSchedule,
    ion: &IonParams,
    kappa: f64,
    space: &HilbertSpace,
    initial_motional: &DVector<C64>,
    options: &GateOptions,
) -> Result<GateResult> {
    schedule.validate()?;
    ion.validate()?;
    let n = space.fock_dim();
    if initial_motional.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: initial_motional.len(),
        });
    }
    let norm = initial_motional.norm();
    if !(norm > 0.0) {
        return Err(invalid("initial_motional", "zero vector"));
    }
    let psi_m = initial_motional / c(norm, 0.0);
    let motion = Motion::new(space, ion, options.motion);

    let mut total = SectorOp::uniform(DMatrix::identity(n, n));
    let mut state: [DVector<C64>; 4] = std::array::from_fn(|_| &psi_m * c(0.5, 0.0));
    let mut max_leakage = 0.0f64;
    for seg in &schedule.segments {
        let op = match *seg {
            Segment::Kick(count) => kick_train(&motion, count, ion.photon_momentum),
            Segment::Coupling(tau) => coupling_window(&motion, kappa, tau, options.reduced_josephson),
            Segment::Free(t) => SectorOp::uniform(motion.free(t)),
        };
        total = total.then(&op);
        state = op.apply(&state);
        let leak: f64 = state.iter().map(|v| v[n - 1].norm_sqr()).sum();
        max_leakage = max_leakage.max(leak);
        if leak > LEAKAGE_LIMIT {
            return Err(Error::FockLeakage {
                population: leak,
                limit: LEAKAGE_LIMIT,
            });
        }
    }
    if total.flip {
        return Err(Error::NotControlledPhase(
            "ion internal state is flipped at the end of the schedule".into(),
        ));
    }
    let u0_dag = motion.free(schedule.free_time()).adjoint();
    let images: [DVector<C64>; 4] = std::array::from_fn(|k| &u0_dag * (&total.blocks[k] * &psi_m));
    let overlaps: [C64; 4] = std::array::from_fn(|k| psi_m.dotc(&images[k]));
    let product = overlaps[0] * overlaps[3] * overlaps[1].conj() * overlaps[2].conj();
    let raw = -product.arg() / 4.0;
    let (alpha, _) = (0..4)
        .map(|k| {
            let a = raw + k as f64 * PI / 2.0;
            let a = a - PI * ((a + PI / 2.0) / PI).floor();
            (a, overlap(&overlaps, a))
        })
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("four candidates");
    // 1 − |⟨a|b⟩|² = ‖b − ⟨a|b⟩a‖², free of cancellation near unit fidelity.
    let mut amp = c(0.0, 0.0);
    for (k, w) in overlaps.iter().enumerate() {
        amp += c(0.0, alpha * sector_sign(k >> 1) * sector_sign(k & 1)).exp() * w / c(4.0, 0.0);
    }
    let infidelity: f64 = (0..4)
        .map(|k| {
            let ideal = c(0.0, -alpha * sector_sign(k >> 1) * sector_sign(k & 1)).exp() * c(0.5, 0.0);
            let residual = &images[k] * c(0.5, 0.0) - &psi_m * (ideal * amp);
            residual.norm_squared()
        })
        .sum::<f64>()
        .min(1.0);
    Ok(GateResult {
        total_unitary: total.to_full(n),
        alpha,
        sector_overlaps: overlaps,
        gate_time: schedule.gate_time(),
        infidelity,
        trace_distance: infidelity.sqrt(),
        max_leakage,
    })
}

/// Deviation max|U_b − e^{iφ}U₀(T)| of a bystander ion that receives no
/// kicks and no coupling; coupling windows count as free evolution for it.
pub fn bystander_check(
    schedule: &PulseSchedule,
    space: &HilbertSpace,
    ion: &IonParams,
    model: MotionModel,
) -> Result<f64> {
    schedule.validate()?;
    let motion = Motion::new(space, ion, model);
    let n = space.fock_dim();
    let mut u = DMatrix::<C64>::identity(n, n);
    let mut elapsed = 0.0;
    for seg in &schedule.segments {
        let dt = match *seg {
            Segment::Kick(_) => continue,
            Segment::Coupling(tau) => tau.abs(),
            Segment::Free(t) => t,
        };
        u = motion.free(dt) * u;
        elapsed += dt;
    }
    let reference = motion.free(elapsed);
    let phase = (reference.adjoint() * &u).trace();
    let aligned = reference * (phase / phase.norm());
    Ok((u - aligned).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Fidelity sweep over ω_νT at fixed dimensionless kick strengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSweep {
    pub omega_nu_t: Vec<f64>,
    pub infidelity: Vec<f64>,
    pub trace_distance: Vec<f64>,
    pub alpha_numeric: Vec<f64>,
    pub alpha_analytic: Vec<f64>,
    /// Log-log slope of the infidelity.
    pub infidelity_exponent: f64,
    /// Log-log slope of the trace distance.
    pub trace_distance_exponent: f64,
}

/// Runs the schedule in a harmonic trap for each ω_νT, starting from the
/// motional ground state. δk_l·x₀ and κ·x₀ are held at their values for
/// `ion`, so only ω_νT changes between points.
pub fn fidelity_scaling_sweep(
    ion: &IonParams,
    kappa: f64,
    schedule: &PulseSchedule,
    omega_nu_t_values: &[f64],
    space: &HilbertSpace,
) -> Result<ScalingSweep> {
    if omega_nu_t_values.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 sweep points, got {}",
            omega_nu_t_values.len()
        )));
    }
    let t = schedule.gate_time();
    let ground = DVector::from_fn(space.fock_dim(), |k, _| if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let rows: Vec<(f64, f64, f64, f64)> = omega_nu_t_values
        .par_iter()
        .map(|&v| {
            let omega = v / t;
            let stretch = (omega / ion.trap_frequency).sqrt();
            let scaled = IonParams {
                trap_frequency: omega,
                photon_momentum: ion.photon_momentum * stretch,
                ..*ion
            };
            let k = kappa * stretch;
            let result = run_gate_fock(schedule, &scaled, k, space, &ground, &GateOptions::default())?;
            let analytic = loop_phase_alpha(schedule, &scaled, k, true);
            Ok((result.infidelity, result.trace_distance, result.alpha_near(analytic), analytic))
        })
        .collect::<Result<Vec<_>>>()?;
    let infidelity: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let trace_distance: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(ScalingSweep {
        omega_nu_t: omega_nu_t_values.to_vec(),
        infidelity_exponent: log_log_slope(omega_nu_t_values, &infidelity)?,
        trace_distance_exponent: log_log_slope(omega_nu_t_values, &trace_distance)?,
        infidelity,
        trace_distance,
        alpha_numeric: rows.iter().map(|r| r.2).collect(),
        alpha_analytic: rows.iter().map(|r| r.3).collect(),
    })
}

/// Least-squares slope of ln y against ln x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::DegenerateFit("need at least 3 paired points".into()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateFit("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{coherent_state, fock_state};
    use crate::constants::MASS_BE9;
    use crate::gate::{canonical_schedule, PulseSchedule};

    fn ion() -> IonParams {
        IonParams::new(MASS_BE9, 2.0 * PI * 1e6, 1e6).unwrap()
    }

    fn kappa() -> f64 {
        0.3 / (ion().length_scale(ion().trap_frequency) * 1e-9)
    }

    fn ground(n: usize) -> DVector<C64> {
        fock_state(0, n).unwrap()
    }

    #[test]
    fn free_evolution_only_is_trap_propagator() {
        let space = HilbertSpace::new(16).unwrap();
        let s = PulseSchedule::new(vec![Segment::Free(1e-7), Segment::Free(2e-7)]).unwrap();
        let r = run_gate_fock(&s, &ion(), kappa(), &space, &ground(16), &GateOptions::default()).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert!(r.infidelity < 1e-15);
        let m = r.total_unitary.entries();
        for k in 0..16 {
            let want = c(0.0, -ion().trap_frequency * k as f64 * 3e-7).exp();
            assert!((m[(k, k)] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn free_particle_phase_matches_closed_form() {
        let space = HilbertSpace::new(64).unwrap();
        let s = canonical_schedule(10, 10, 1e-9, 5e-9, 5e-9).unwrap();
        let opts = GateOptions {
            motion: MotionModel::FreeParticle,
            reduced_josephson: None,
        };
        let r = run_gate_fock(&s, &ion(), kappa(), &space, &ground(64), &opts).unwrap();
        let want = crate::constants::HBAR * ion().photon_momentum * kappa() / ion().mass
            * 10.0 * 1e-9 * 5e-9 * 10e-9 / 5e-9;
        assert!((r.alpha_near(want) - want).abs() < 1e-8, "{} vs {want}", r.alpha);
        assert!(r.infidelity < 1e-10);
        assert!(r.total_unitary.unitarity_defect() < 1e-9);
    }

    #[test]
    fn reversed_kicks_flip_the_phase() {
        let space = HilbertSpace::new(48).unwrap();
        let s = canonical_schedule(6, 6, 1e-9, 5e-9, 5e-9).unwrap();
        let opts = GateOptions {
            motion: MotionModel::FreeParticle,
            reduced_josephson: None,
        };
        let a = run_gate_fock(&s, &ion(), kappa(), &space, &ground(48), &opts).unwrap();
        let b = run_gate_fock(&s.with_reversed_kicks(), &ion(), kappa(), &space, &ground(48), &opts).unwrap();
        assert!((a.alpha + b.alpha).abs() < 1e-9);
    }

    #[test]
    fn alpha_independent_of_initial_motion() {
        let n = 64;
        let space = HilbertSpace::new(n).unwrap();
        let s = canonical_schedule(10, 10, 1e-9, 5e-9, 5e-9).unwrap();
        let t = s.gate_time();
        let scaled = IonParams {
            trap_frequency: 1e-3 / t,
            ..ion()
        };
        let stretch = (scaled.trap_frequency / ion().trap_frequency).sqrt();
        let scaled = IonParams {
            photon_momentum: ion().photon_momentum * stretch,
            ..scaled
        };
        let k = kappa() * stretch;
        let states = [
            fock_state(0, n).unwrap(),
            fock_state(1, n).unwrap(),
            fock_state(5, n).unwrap(),
            coherent_state(c(1.0, 0.0), n),
        ];
        let alphas: Vec<f64> = states
            .iter()
            .map(|psi| run_gate_fock(&s, &scaled, k, &space, psi, &GateOptions::default()).unwrap().alpha)
            .collect();
        for a in &alphas {
            assert!((a - alphas[0]).abs() < 1e-6, "{alphas:?}");
        }
    }

    #[test]
    fn josephson_splitting_keeps_alpha() {
        let space = HilbertSpace::new(32).unwrap();
        let s = canonical_schedule(4, 4, 1e-9, 5e-9, 5e-9).unwrap();
        let base = GateOptions {
            motion: MotionModel::FreeParticle,
            reduced_josephson: None,
        };
        let with = GateOptions {
            reduced_josephson: Some(2.0 * PI * 100e6),
            ..base
        };
        let a = run_gate_fock(&s, &ion(), kappa(), &space, &ground(32), &base).unwrap();
        let b = run_gate_fock(&s, &ion(), kappa(), &space, &ground(32), &with).unwrap();
        assert!((a.alpha - b.alpha).abs() < 1e-12);
        assert!(b.infidelity > a.infidelity);
    }

    #[test]
    fn leakage_is_detected() {
        let space = HilbertSpace::new(8).unwrap();
        let s = canonical_schedule(10, 10, 1e-9, 5e-9, 5e-9).unwrap();
        let strong = IonParams {
            photon_momentum: 1e8,
            ..ion()
        };
        assert!(matches!(
            run_gate_fock(&s, &strong, kappa(), &space, &ground(8), &GateOptions::default()),
            Err(Error::FockLeakage { .. })
        ));
    }

    #[test]
    fn scaling_sweep_exponents() {
        let space = HilbertSpace::new(48).unwrap();
        let s = canonical_schedule(10, 10, 1e-9, 5e-9, 5e-9).unwrap();
        let values: Vec<f64> = (0..5).map(|k| 1e-3 * 10f64.powf(k as f64 * 0.5)).collect();
        let sweep = fidelity_scaling_sweep(&ion(), kappa(), &s, &values, &space).unwrap();
        assert!((sweep.trace_distance_exponent - 2.0).abs() < 0.3, "{sweep:?}");
        assert!((sweep.infidelity_exponent - 4.0).abs() < 0.6, "{sweep:?}");
        assert!(sweep.infidelity[0] < 1e-4);
        assert!(sweep.infidelity.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn bystander_sees_free_evolution() {
        let space = HilbertSpace::new(32).unwrap();
        let s = canonical_schedule(10, 10, 1e-9, 5e-9, 5e-9).unwrap();
        for model in [MotionModel::Harmonic, MotionModel::FreeParticle] {
            assert!(bystander_check(&s, &space, &ion(), model).unwrap() < 1e-9);
        }
    }

    #[test]
    fn slope_fit() {
        let x = [1.0, 2.0, 4.0];
        let y = [3.0, 12.0, 48.0];
        assert!((log_log_slope(&x, &y).unwrap() - 2.0).abs() < 1e-12);
        assert!(log_log_slope(&x[..2], &y[..2]).is_err());
        assert!(log_log_slope(&x, &[1.0, 0.0, 1.0]).is_err());
    }
}
