use nalgebra::{DMatrix, DVector};

use super::{c, OperatorMatrix, StateVector, C64};
use crate::error::{Error, Result};

/// Default motional truncation.
pub const DEFAULT_FOCK_DIM: usize = 64;

/// Largest population tolerated in the two highest Fock levels.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

/// The composite Hilbert space. Ion internal and charge factors are always
/// two-dimensional; only the motional truncation is configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    fock_dim: usize,
}

/// Tensor factor of the composite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Ion,
    Charge,
    Motion,
}

impl HilbertSpace {
    pub const ION_DIM: usize = 2;
    pub const CHARGE_DIM: usize = 2;

    pub fn new(fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::InvalidParameter {
                name: "fock_dim",
                reason: format!("need at least 2 Fock levels, got {fock_dim}"),
            });
        }
        Ok(Self { fock_dim })
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn dim(&self) -> usize {
        4 * self.fock_dim
    }

    pub fn factor_dim(&self, factor: Factor) -> usize {
        match factor {
            Factor::Ion => Self::ION_DIM,
            Factor::Charge => Self::CHARGE_DIM,
            Factor::Motion => self.fock_dim,
        }
    }

    /// Flat index of |ion, charge, n⟩.
    pub fn index(&self, ion: usize, charge: usize, n: usize) -> usize {
        (2 * ion + charge) * self.fock_dim + n
    }

    /// Largest population in the top two Fock levels over all four qubit sectors.
    pub fn top_level_population(&self, state: &StateVector) -> f64 {
        let n = self.fock_dim;
        let mut pop = 0.0;
        for sector in 0..4 {
            for level in n - 2..n {
                pop += state.amplitudes()[sector * n + level].norm_sqr();
            }
        }
        pop
    }

    /// Errors when the top two Fock levels carry more than [`LEAKAGE_LIMIT`].
    pub fn check_leakage(&self, state: &StateVector) -> Result<()> {
        let population = self.top_level_population(state);
        if population > LEAKAGE_LIMIT {
            return Err(Error::FockLeakage {
                population,
                limit: LEAKAGE_LIMIT,
            });
        }
        Ok(())
    }
}

/// Annihilation and creation operators on the motional factor alone (N × N).
pub fn build_ladder_ops(space: &HilbertSpace) -> (OperatorMatrix, OperatorMatrix) {
    let n = space.fock_dim();
    let mut a = DMatrix::<C64>::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (OperatorMatrix::new(a), OperatorMatrix::new(adag))
}

pub fn pauli_x() -> OperatorMatrix {
    let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    OperatorMatrix::hermitian_unchecked(m)
}

pub fn pauli_z() -> OperatorMatrix {
    let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    OperatorMatrix::hermitian_unchecked(m)
}

/// Lifts a single-factor operator to the composite space (op ⊗ 1 on the others).
pub fn embed(space: &HilbertSpace, factor: Factor, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    let expected = space.factor_dim(factor);
    if op.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: op.dim(),
        });
    }
    let id2 = DMatrix::<C64>::identity(2, 2);
    let idn = DMatrix::<C64>::identity(space.fock_dim(), space.fock_dim());
    let m = op.entries();
    let full = match factor {
        Factor::Ion => m.kronecker(&id2).kronecker(&idn),
        Factor::Charge => id2.kronecker(m).kronecker(&idn),
        Factor::Motion => id2.kronecker(&id2).kronecker(m),
    };
    Ok(OperatorMatrix::with_flag(full, op.is_hermitian()))
}

/// Fock state |n⟩ on an N-level motional factor.
pub fn fock_state(n: usize, fock_dim: usize) -> Result<DVector<C64>> {
    if n >= fock_dim {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("Fock level {n} outside truncation {fock_dim}"),
        });
    }
    let mut v = DVector::zeros(fock_dim);
    v[n] = c(1.0, 0.0);
    Ok(v)
}

/// Truncated coherent state |α⟩, renormalized.
pub fn coherent_state(alpha: C64, fock_dim: usize) -> DVector<C64> {
    let mut v = DVector::zeros(fock_dim);
    let mut amp = c((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = amp;
    for k in 1..fock_dim {
        amp = amp * alpha / (k as f64).sqrt();
        v[k] = amp;
    }
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// |ion⟩ ⊗ |charge⟩ ⊗ |motion⟩ as a normalized state on the composite space.
pub fn product_state(
    space: &HilbertSpace,
    ion: [C64; 2],
    charge: [C64; 2],
    motion: &DVector<C64>,
) -> Result<StateVector> {
    if motion.len() != space.fock_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.fock_dim(),
            actual: motion.len(),
        });
    }
    let ion = DVector::from_column_slice(&ion);
    let charge = DVector::from_column_slice(&charge);
    StateVector::new(ion.kronecker(&charge).kronecker(motion))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_level_truncation() {
        assert!(HilbertSpace::new(1).is_err());
        assert_eq!(HilbertSpace::new(2).unwrap().dim(), 8);
    }

    #[test]
    fn smallest_ladder_operator() {
        let space = HilbertSpace::new(2).unwrap();
        let (a, adag) = build_ladder_ops(&space);
        assert_eq!(a.entries()[(0, 1)], c(1.0, 0.0));
        assert_eq!(a.entries()[(0, 0)], c(0.0, 0.0));
        assert_eq!(a.entries()[(1, 0)], c(0.0, 0.0));
        assert_eq!(a.entries()[(1, 1)], c(0.0, 0.0));
        assert_eq!(adag.entries(), &a.entries().adjoint());
    }

    #[test]
    fn ladder_matrix_element() {
        let space = HilbertSpace::new(4).unwrap();
        let (a, _) = build_ladder_ops(&space);
        assert!((a.entries()[(2, 3)].re - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn commutator_defect_only_in_last_level() {
        let space = HilbertSpace::new(16).unwrap();
        let (a, adag) = build_ladder_ops(&space);
        let comm = a.entries() * adag.entries() - adag.entries() * a.entries();
        let defect = comm - DMatrix::<C64>::identity(16, 16);
        for i in 0..16 {
            for j in 0..16 {
                let v = defect[(i, j)].norm();
                if i == 15 && j == 15 {
                    assert!((defect[(i, j)].re + 16.0).abs() < 1e-12);
                } else {
                    assert!(v < 1e-12, "({i},{j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn embedding_identity_and_traces() {
        let space = HilbertSpace::new(5).unwrap();
        let id = OperatorMatrix::identity(2);
        let e = embed(&space, Factor::Charge, &id).unwrap();
        assert_eq!(e.entries(), &DMatrix::<C64>::identity(20, 20));
        let sz = embed(&space, Factor::Ion, &pauli_z()).unwrap();
        assert!(sz.entries().trace().norm() < 1e-15);
        assert!(embed(&space, Factor::Motion, &pauli_z()).is_err());
    }

    #[test]
    fn embedded_disjoint_factors_commute() {
        let space = HilbertSpace::new(6).unwrap();
        let a = embed(&space, Factor::Charge, &pauli_z()).unwrap();
        let b = embed(&space, Factor::Ion, &pauli_x()).unwrap();
        let comm = a.entries() * b.entries() - b.entries() * a.entries();
        assert!(comm.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn embedding_ordering_matches_index() {
        let space = HilbertSpace::new(3).unwrap();
        let sz = embed(&space, Factor::Charge, &pauli_z()).unwrap();
        // charge index 1 is σ_z = -1
        let i = space.index(1, 1, 2);
        assert_eq!(sz.entries()[(i, i)], c(-1.0, 0.0));
        let j = space.index(1, 0, 2);
        assert_eq!(sz.entries()[(j, j)], c(1.0, 0.0));
    }

    #[test]
    fn coherent_state_is_normalized() {
        let v = coherent_state(c(1.0, 0.5), 40);
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }
}
