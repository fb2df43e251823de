use nalgebra::DMatrix;

use super::{build_ladder_ops, c, matrix_exponential, HilbertSpace, OperatorMatrix, C64};
use crate::error::Result;

/// A phase-space displacement D(α) together with an accumulated global phase,
/// standing for the operator `e^{i·phase} D(alpha)`.
///
/// Composition follows D(α)D(β) = e^{i Im(α β̄)} D(α + β), where `a ∘ b`
/// represents the product with `a` on the left.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DisplacementRecord {
    pub alpha: C64,
    pub phase: f64,
}

impl DisplacementRecord {
    pub fn new(alpha: C64, phase: f64) -> Self {
        Self { alpha, phase }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn displacement(alpha: C64) -> Self {
        Self { alpha, phase: 0.0 }
    }
}

pub fn compose_displacements(a: DisplacementRecord, b: DisplacementRecord) -> DisplacementRecord {
    DisplacementRecord {
        alpha: a.alpha + b.alpha,
        phase: a.phase + b.phase + (a.alpha * b.alpha.conj()).im,
    }
}

/// Global phase of the ordered product `D(β_K)…D(β_1)` where `steps[0]` acts
/// first. For a closed loop (Σβ = 0) this is the enclosed symplectic area
/// with the sign fixed by the composition law.
pub fn loop_phase(steps: &[C64]) -> DisplacementRecord {
    steps.iter().fold(DisplacementRecord::identity(), |acc, &beta| {
        compose_displacements(DisplacementRecord::displacement(beta), acc)
    })
}

/// Truncated-Fock D(α) = exp(α a† − ᾱ a), computed as exp(−iH) with the
/// hermitian generator H = i(α a† − ᾱ a).
pub fn displacement_operator(alpha: C64, space: &HilbertSpace) -> Result<OperatorMatrix> {
    let (a, adag) = build_ladder_ops(space);
    let gen: DMatrix<C64> = (adag.entries() * alpha - a.entries() * alpha.conj()) * c(0.0, 1.0);
    let h = OperatorMatrix::hermitian(gen)?;
    matrix_exponential(&h, c(0.0, -1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let b = DisplacementRecord::new(c(0.4, -1.2), 0.0);
        assert_eq!(compose_displacements(DisplacementRecord::identity(), b), b);
        assert_eq!(compose_displacements(b, DisplacementRecord::identity()), b);
    }

    #[test]
    fn phase_of_orthogonal_displacements() {
        let a = DisplacementRecord::displacement(c(1.0, 0.0));
        let b = DisplacementRecord::displacement(c(0.0, 1.0));
        let ab = compose_displacements(a, b);
        assert_eq!(ab.phase, -1.0);
        assert_eq!(ab.alpha, c(1.0, 1.0));
    }

    #[test]
    fn square_loop_encloses_its_area() {
        // D(-i)D(-1)D(i)D(1): counter-clockwise unit square
        let rec = loop_phase(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
        assert!(rec.alpha.norm() < 1e-15);
        assert!((rec.phase - 2.0).abs() < 1e-15);
    }
}
