//! Effective couplings from the lumped electrical circuit.
//!
//! The cavity is two node fluxes ψ₁, ψ₂ joined by the inductance L_r, each end
//! carrying half of C_r. The ion couples to node 1 as an offset charge
//! e·x/d_i; the charge qubit hangs off node 2 (or off the switch island) via
//! C_m. Cavity and switch modes are eliminated exactly on the quadratic form:
//! at low frequency the charge response between two nodes is
//! χ(ω) = −ω²[(K − ω²C)⁻¹], which tends to V(VᵀCV)⁻¹Vᵀ on the null space V of
//! the inverse-inductance matrix K.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::constants::{angular_to_hz, reduced_flux_quantum, ELEMENTARY_CHARGE, HBAR};
use crate::error::{invalid, Error, Result};

/// Geometry factor quoted for the cavity enhancement 10·L/d_i. It is not
/// derived anywhere; it is kept as a reference constant only.
pub const CAVITY_GEOMETRY_FACTOR: f64 = 10.0;

/// Electrical parameters. Capacitances in F, inductance in H, lengths in m,
/// energies as angular frequencies (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircuitParams {
    pub c_r: f64,
    pub l_r: f64,
    pub c_m: f64,
    pub c_j: f64,
    pub c_g: f64,
    pub e_j: f64,
    pub e_c: f64,
    pub d_i: f64,
    pub cavity_length: f64,
    pub c_i: f64,
    pub c_i2: f64,
    pub c_ib: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        use crate::constants::hz_to_angular;
        Self {
            c_r: 3e-15,
            l_r: 3e-13,
            c_m: 1e-16,
            c_j: 1e-16,
            c_g: 1e-16,
            e_j: hz_to_angular(10e9),
            e_c: hz_to_angular(100e9),
            d_i: 20e-6,
            cavity_length: 40e-6,
            // C_t/10 each
            c_i: 2e-17,
            c_i2: 2e-17,
            c_ib: 2e-17,
        }
    }
}

impl CircuitParams {
    /// Total qubit capacitance C_J + C_g.
    pub fn c_t(&self) -> f64 {
        self.c_j + self.c_g
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("C_r", self.c_r),
            ("L_r", self.l_r),
            ("C_m", self.c_m),
            ("C_J", self.c_j),
            ("C_g", self.c_g),
            ("d_i", self.d_i),
            ("cavity_length", self.cavity_length),
            ("C_i", self.c_i),
            ("C_i2", self.c_i2),
            ("C_ib", self.c_ib),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be strictly positive, got {v}")));
            }
        }
        for (name, v) in [("E_J", self.e_j), ("E_c", self.e_c)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Node capacitance of the trap end of the cavity.
    fn c_node1(&self) -> f64 {
        self.c_r / 2.0 + self.c_i + self.c_i2
    }

    /// Series combination C_a = C_m·C_t/(C_m + C_t) seen by the switch island.
    pub fn c_a(&self) -> f64 {
        self.c_m * self.c_t() / (self.c_m + self.c_t())
    }
}

/// dc-SQUID switch: junction energy E_Ja (rad/s) and reduced flux Φ_ex/Φ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchParams {
    pub e_ja: f64,
    pub flux_ratio: f64,
}

/// Flux ratios this close to 1/2 are treated as the off state.
const OFF_TOLERANCE: f64 = 1e-12;

impl SwitchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.e_ja > 0.0 && self.e_ja.is_finite()) {
            return Err(invalid("E_Ja", format!("must be positive, got {}", self.e_ja)));
        }
        if !(0.0..=1.0).contains(&self.flux_ratio) {
            return Err(invalid(
                "flux_ratio",
                format!("must lie in [0, 1], got {}", self.flux_ratio),
            ));
        }
        Ok(())
    }

    /// Effective Josephson energy 2E_Ja·cos(π Φ_ex/Φ₀), rad/s. May be negative.
    pub fn effective_energy(&self) -> f64 {
        if self.is_off() {
            return 0.0;
        }
        2.0 * self.e_ja * (std::f64::consts::PI * self.flux_ratio).cos()
    }

    pub fn is_off(&self) -> bool {
        (self.flux_ratio - 0.5).abs() <= OFF_TOLERANCE
    }

    /// Linearized inductance (ħ/2e)²/|E_a| in H. A negative E_a puts the
    /// junction minimum at phase π, where the curvature is |E_a|.
    pub fn effective_inductance(&self) -> Result<f64> {
        if self.is_off() {
            return Err(Error::SwitchOff);
        }
        let energy_joule = HBAR * self.effective_energy().abs();
        Ok(reduced_flux_quantum().powi(2) / energy_joule)
    }
}

/// Quadratic circuit ½ψ̇ᵀCψ̇ − ½ψᵀKψ with offset-charge drives.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCircuit {
    pub capacitance: DMatrix<f64>,
    pub inverse_inductance: DMatrix<f64>,
    /// Offset charge per metre of ion displacement on each node (C/m).
    pub ion_drive: DVector<f64>,
    /// Offset charge on each node per unit of qubit charge (dimensionless).
    pub qubit_drive: DVector<f64>,
}

impl QuadraticCircuit {
    pub fn new(
        capacitance: DMatrix<f64>,
        inverse_inductance: DMatrix<f64>,
        ion_drive: DVector<f64>,
        qubit_drive: DVector<f64>,
    ) -> Result<Self> {
        let n = capacitance.nrows();
        for (name, m) in [("capacitance", &capacitance), ("inverse_inductance", &inverse_inductance)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(invalid(name, "matrix shape does not match the mode count"));
            }
            let scale = m.amax().max(f64::MIN_POSITIVE);
            if (m - m.transpose()).amax() > 1e-15 * scale {
                return Err(invalid(name, "matrix is not symmetric"));
            }
        }
        if ion_drive.len() != n || qubit_drive.len() != n {
            return Err(invalid("drive", "drive vector length does not match the mode count"));
        }
        if capacitance.clone().cholesky().is_none() {
            return Err(invalid("capacitance", "matrix is not positive definite"));
        }
        Ok(Self {
            capacitance,
            inverse_inductance,
            ion_drive,
            qubit_drive,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.capacitance.nrows()
    }

    /// Static charge response V(VᵀCV)⁻¹Vᵀ on the inductive null space.
    pub fn static_response(&self) -> DMatrix<f64> {
        let (values, vectors) = secular_decomposition(&self.inverse_inductance);
        let scale = self.inverse_inductance.amax().max(f64::MIN_POSITIVE);
        let null: Vec<usize> = (0..values.len())
            .filter(|&k| values[k].abs() < 1e-12 * scale)
            .collect();
        let n = self.n_modes();
        if null.is_empty() {
            return DMatrix::zeros(n, n);
        }
        let v = DMatrix::from_fn(n, null.len(), |i, j| vectors[(i, null[j])]);
        let reduced = v.transpose() * &self.capacitance * &v;
        let inv = reduced
            .try_inverse()
            .expect("projected capacitance of a positive-definite matrix is invertible");
        &v * inv * v.transpose()
    }

    /// Charge response −ω²(K − ω²C)⁻¹ at angular frequency ω > 0.
    pub fn response_at(&self, omega: f64) -> Result<DMatrix<f64>> {
        if omega == 0.0 {
            return Ok(self.static_response());
        }
        let w2 = omega * omega;
        let dynamic = &self.inverse_inductance - &self.capacitance * w2;
        let inv = dynamic
            .try_inverse()
            .ok_or(Error::ImpedancePole { omega })?;
        Ok(inv * (-w2))
    }
}

/// Builds the three-node switch circuit over (ψ₁, ψ₂, ψ_a).
pub fn build_switch_circuit(p: &CircuitParams, s: &SwitchParams) -> Result<QuadraticCircuit> {
    p.validate()?;
    s.validate()?;
    let l_eff = s.effective_inductance()?;
    switch_circuit_with_inductance(p, l_eff)
}

/// Switch circuit for an arbitrary junction inductance; `f64::INFINITY`
/// disconnects the island.
pub fn switch_circuit_with_inductance(p: &CircuitParams, l_eff: f64) -> Result<QuadraticCircuit> {
    if !(l_eff > 0.0) {
        return Err(invalid("L_eff", format!("must be positive, got {l_eff}")));
    }
    let capacitance = DMatrix::from_diagonal(&DVector::from_vec(vec![
        p.c_node1(),
        p.c_r / 2.0,
        p.c_a(),
    ]));
    let g_r = 1.0 / p.l_r;
    let g_s = 1.0 / l_eff;
    let inverse_inductance = DMatrix::from_row_slice(
        3,
        3,
        &[g_r, -g_r, 0.0, -g_r, g_r + g_s, -g_s, 0.0, -g_s, g_s],
    );
    let ion_drive = DVector::from_vec(vec![ELEMENTARY_CHARGE / p.d_i, 0.0, 0.0]);
    let qubit_drive = DVector::from_vec(vec![0.0, 0.0, p.c_a() / p.c_t()]);
    QuadraticCircuit::new(capacitance, inverse_inductance, ion_drive, qubit_drive)
}

/// Direct circuit over (ψ₁, ψ₂, φ): the qubit node carries C_t to ground and
/// C_m to the cavity end.
pub fn build_direct_circuit(p: &CircuitParams) -> Result<QuadraticCircuit> {
    p.validate()?;
    let capacitance = DMatrix::from_row_slice(
        3,
        3,
        &[
            p.c_node1(),
            0.0,
            0.0,
            0.0,
            p.c_r / 2.0 + p.c_m,
            -p.c_m,
            0.0,
            -p.c_m,
            p.c_m + p.c_t(),
        ],
    );
    let g_r = 1.0 / p.l_r;
    let inverse_inductance =
        DMatrix::from_row_slice(3, 3, &[g_r, -g_r, 0.0, -g_r, g_r, 0.0, 0.0, 0.0, 0.0]);
    let ion_drive = DVector::from_vec(vec![ELEMENTARY_CHARGE / p.d_i, 0.0, 0.0]);
    let qubit_drive = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    QuadraticCircuit::new(capacitance, inverse_inductance, ion_drive, qubit_drive)
}

fn secular_decomposition(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    for mut col in vectors.column_iter_mut() {
        if col.sum() < 0.0 {
            col.neg_mut();
        }
    }
    (values, vectors)
}

/// Eigen-decomposition of the inverse-inductance form, eigenvalues ascending
/// (H⁻¹), eigenvectors as orthonormal columns with non-negative component sum.
pub fn secular_modes(c: &QuadraticCircuit) -> (DVector<f64>, DMatrix<f64>) {
    secular_decomposition(&c.inverse_inductance)
}

/// How C_Σ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CSigmaMode {
    /// Exact elimination of the cavity on the capacitance matrix.
    Exact,
    /// The large-cavity approximation C_Σ ≈ C_r.
    CavityOnly,
}

/// Coefficient of the σ_z^q·x̂ interaction: H_int = ħ·kappa·x̂·σ_z^q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveCoupling {
    /// rad/s per metre of ion displacement.
    pub kappa: f64,
    /// Capacitance in the qubit charging term (p_φ + C_gV_g)²/2C after elimination.
    pub charge_qubit_capacitance_correction: f64,
    /// C_Σ implied by kappa = e²C_m/(ħ C_Σ C_t d_i); infinite when the coupling is off.
    pub c_sigma: f64,
    pub warnings: Vec<String>,
}

impl EffectiveCoupling {
    /// Interaction at displacement `x` (m) as an angular frequency E/ħ (rad/s).
    pub fn interaction_angular(&self, x: f64) -> f64 {
        self.kappa * x
    }

    /// Interaction at displacement `x` (m) as an ordinary frequency E/h (Hz).
    pub fn interaction_hz(&self, x: f64) -> f64 {
        angular_to_hz(self.kappa * x)
    }
}

fn regime_warnings(p: &CircuitParams) -> Vec<String> {
    let largest = p.c_m.max(p.c_i).max(p.c_t());
    if p.c_r < 10.0 * largest {
        vec![format!(
            "C_r = {:e} F is not much larger than max(C_m, C_i, C_t) = {:e} F",
            p.c_r, largest
        )]
    } else {
        Vec::new()
    }
}

/// Cavity-mediated ion/charge-qubit coupling with exact C_Σ.
pub fn effective_ion_charge_coupling(p: &CircuitParams) -> Result<EffectiveCoupling> {
    effective_ion_charge_coupling_with(p, CSigmaMode::Exact)
}

pub fn effective_ion_charge_coupling_with(
    p: &CircuitParams,
    mode: CSigmaMode,
) -> Result<EffectiveCoupling> {
    let circuit = build_direct_circuit(p)?;
    let chi = circuit.static_response();
    let e = ELEMENTARY_CHARGE;
    let (kappa, c_sigma) = match mode {
        CSigmaMode::Exact => {
            let mutual = drive_product(&circuit, &chi);
            let kappa = e * mutual / HBAR;
            (kappa, e * e * p.c_m / (HBAR * kappa * p.c_t() * p.d_i))
        }
        CSigmaMode::CavityOnly => (e * e * p.c_m / (HBAR * p.c_r * p.c_t() * p.d_i), p.c_r),
    };
    let q = &circuit.qubit_drive;
    let self_term = (q.transpose() * &chi * q)[(0, 0)];
    Ok(EffectiveCoupling {
        kappa,
        charge_qubit_capacitance_correction: 1.0 / self_term,
        c_sigma,
        warnings: regime_warnings(p),
    })
}

/// ion_driveᵀ χ qubit_drive: charge-response cross term, in F⁻¹·C/m.
fn drive_product(c: &QuadraticCircuit, chi: &DMatrix<f64>) -> f64 {
    (c.ion_drive.transpose() * chi * &c.qubit_drive)[(0, 0)]
}

/// Ion/charge coupling through the dc-SQUID switch, evaluated at the qubit
/// frequency E_J. The off state (flux ratio 1/2) returns kappa = 0 exactly.
pub fn reduce_switch_coupling(p: &CircuitParams, s: &SwitchParams) -> Result<EffectiveCoupling> {
    p.validate()?;
    s.validate()?;
    if s.is_off() {
        return Ok(EffectiveCoupling {
            kappa: 0.0,
            charge_qubit_capacitance_correction: p.c_m + p.c_t(),
            c_sigma: f64::INFINITY,
            warnings: Vec::new(),
        });
    }
    let circuit = build_switch_circuit(p, s)?;
    let chi = circuit.response_at(p.e_j)?;
    let e = ELEMENTARY_CHARGE;
    let kappa = e * drive_product(&circuit, &chi) / HBAR;
    let q = &circuit.qubit_drive;
    let island = (q.transpose() * &chi * q)[(0, 0)];
    let inv_cq = 1.0 / (p.c_m + p.c_t()) + island;
    let mut warnings = regime_warnings(p);
    let l_eff = s.effective_inductance()?;
    let switch_frequency = 1.0 / (l_eff * p.c_r).sqrt();
    if switch_frequency <= 10.0 * p.e_j {
        warnings.push(format!(
            "switch regime violated: 1/sqrt(L_eff C_r) = {switch_frequency:e} rad/s <= 10 E_J"
        ));
    }
    Ok(EffectiveCoupling {
        kappa,
        charge_qubit_capacitance_correction: 1.0 / inv_cq,
        c_sigma: e * e * p.c_m / (HBAR * kappa * p.c_t() * p.d_i),
        warnings,
    })
}

/// σ_z^q coefficient (rad/s) generated by the trap drive voltages through the
/// cavity: (e²/C_Σ)(C_m/C_t)(C_iV_i + C_ibV_ib)/e, divided by ħ.
pub fn balance_residual(p: &CircuitParams, v_i: f64, v_ib: f64) -> Result<f64> {
    balance_residual_with(p, v_i, v_ib, CSigmaMode::Exact)
}

pub fn balance_residual_with(p: &CircuitParams, v_i: f64, v_ib: f64, mode: CSigmaMode) -> Result<f64> {
    let coupling = effective_ion_charge_coupling_with(p, mode)?;
    let induced = p.c_i * v_i + p.c_ib * v_ib;
    Ok(coupling.kappa * p.d_i * (induced / ELEMENTARY_CHARGE))
}

/// Lumped cavity loss R_r = R_n·(n_ex/n₀).
pub fn quasiparticle_resistance(r_n: f64, n_ratio: f64) -> Result<f64> {
    if !(r_n > 0.0 && r_n.is_finite()) {
        return Err(invalid("R_n", format!("must be positive, got {r_n}")));
    }
    if !(0.0..=1.0).contains(&n_ratio) {
        return Err(invalid("n_ratio", format!("must lie in [0, 1], got {n_ratio}")));
    }
    Ok(r_n * n_ratio)
}

/// Thermal quasiparticle fraction exp(−2Δ/k_BT), with 2Δ/k_B given in kelvin.
pub fn thermal_quasiparticle_ratio(gap_kelvin: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(invalid("T", format!("must be positive, got {temperature}")));
    }
    Ok((-gap_kelvin / temperature).exp())
}
