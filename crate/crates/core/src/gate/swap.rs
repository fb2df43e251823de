use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::algebra::{c, OperatorMatrix, C64};
use crate::error::{Error, Result};

/// exp(−iα σ_z⊗σ_z) on two qubits.
pub fn controlled_phase(alpha: f64) -> OperatorMatrix {
    let d = [1.0, -1.0, -1.0, 1.0].map(|zz| c(0.0, -alpha * zz).exp());
    OperatorMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d)))
}

fn hadamard_on(first: bool) -> DMatrix<C64> {
    let h = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0].map(|v| c(v * FRAC_1_SQRT_2, 0.0)));
    let id = DMatrix::<C64>::identity(2, 2);
    if first {
        h.kronecker(&id)
    } else {
        id.kronecker(&h)
    }
}

/// Turns a diagonal two-qubit phase gate with 4α ≡ π (mod 2π) into
/// diag(1, 1, 1, −1) using single-qubit phase gates and a global phase.
fn to_cz(gate: &OperatorMatrix) -> Result<DMatrix<C64>> {
    let m = gate.entries();
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::NotControlledPhase(format!("expected a 4x4 gate, got {}x{}", m.nrows(), m.ncols())));
    }
    let tol = 1e-9;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && m[(i, j)].norm() > tol {
                return Err(Error::NotControlledPhase("gate is not diagonal".into()));
            }
        }
        if (m[(i, i)].norm() - 1.0).abs() > tol {
            return Err(Error::NotControlledPhase("diagonal entries are not phases".into()));
        }
    }
    let d: [C64; 4] = std::array::from_fn(|k| m[(k, k)]);
    let invariant = d[3] * d[0] / (d[1] * d[2]);
    if (invariant + c(1.0, 0.0)).norm() > 1e-6 {
        return Err(Error::NotControlledPhase(format!(
            "phase invariant {invariant} is not -1; the gate is not maximally entangling"
        )));
    }
    let g = d[0].inv();
    let v = d[0] / d[1];
    let u = d[0] / d[2];
    let local = [g, g * v, g * u, g * u * v];
    Ok(DMatrix::from_fn(4, 4, |i, j| if i == j { d[i] * local[i] } else { c(0.0, 0.0) }))
}

/// SWAP from three uses of a π/4-type controlled-phase gate: each use is
/// dressed into a CZ by local phases, then into a CNOT by Hadamards on the
/// target, alternating the target qubit.
pub fn compose_swap(phase_gate: &OperatorMatrix) -> Result<OperatorMatrix> {
    let cz = to_cz(phase_gate)?;
    let h1 = hadamard_on(true);
    let h2 = hadamard_on(false);
    let cnot_12 = &h2 * &cz * &h2;
    let cnot_21 = &h1 * &cz * &h1;
    Ok(OperatorMatrix::new(&cnot_12 * &cnot_21 * &cnot_12))
}

/// Largest entry deviation of |U| from the SWAP permutation pattern.
pub fn swap_deviation(u: &OperatorMatrix) -> f64 {
    let perm = [0usize, 2, 1, 3];
    let m = u.entries();
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let want = if perm[j] == i { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)].norm() - want).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn swap_of(alpha: f64) -> OperatorMatrix {
        compose_swap(&controlled_phase(alpha)).unwrap()
    }

    #[test]
    fn maps_basis_states_to_swapped_states() {
        let u = swap_of(std::f64::consts::FRAC_PI_4);
        assert!(swap_deviation(&u) < 1e-12);
        // |01⟩ → |10⟩
        assert!((u.entries()[(2, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_squared_is_identity() {
        let u = swap_of(-std::f64::consts::FRAC_PI_4);
        let sq = u.mul(&u).unwrap();
        let phase = sq.entries()[(0, 0)];
        let id = OperatorMatrix::identity(4).scale(phase);
        assert!(sq.max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn superposition_moves_to_other_qubit() {
        let u = swap_of(3.0 * std::f64::consts::FRAC_PI_4);
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let input = DVector::from_column_slice(&[a, c(0.0, 0.0), b, c(0.0, 0.0)]);
        let out = u.entries() * input;
        assert!(out[2].norm() < 1e-12 && out[3].norm() < 1e-12);
        assert!((out[0].norm() - 0.6).abs() < 1e-12);
        assert!((out[1].norm() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_weak_or_non_diagonal_gates() {
        assert!(compose_swap(&controlled_phase(0.3)).is_err());
        let mut m = controlled_phase(std::f64::consts::FRAC_PI_4).into_entries();
        m[(0, 1)] = c(0.1, 0.0);
        assert!(compose_swap(&OperatorMatrix::new(m)).is_err());
    }
}
