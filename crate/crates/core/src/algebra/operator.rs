use nalgebra::{DMatrix, DVector};

use super::{c, C64};
use crate::error::{Error, Result};

/// Largest matrix dimension accepted by [`matrix_exponential`].
pub const DEFAULT_DIM_CAP: usize = 256;

const HERMITIAN_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

/// Dense complex square matrix with a hermiticity hint.
///
/// The hint is only ever set when `‖A − A†‖_max < 1e-12` holds.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps a square matrix without a hermiticity hint.
    pub fn new(entries: DMatrix<C64>) -> Self {
        assert!(entries.is_square(), "operator matrices must be square");
        Self {
            entries,
            hermitian: false,
        }
    }

    /// Wraps a matrix that must be hermitian to within 1e-12.
    pub fn hermitian(entries: DMatrix<C64>) -> Result<Self> {
        let op = Self::new(entries);
        let defect = max_abs(&(&op.entries - op.entries.adjoint()));
        if defect >= HERMITIAN_TOL {
            return Err(Error::InvalidParameter {
                name: "hermitian",
                reason: format!("‖A − A†‖_max = {defect:e}"),
            });
        }
        Ok(Self {
            hermitian: true,
            ..op
        })
    }

    pub(crate) fn hermitian_unchecked(entries: DMatrix<C64>) -> Self {
        Self {
            entries,
            hermitian: true,
        }
    }

    pub(crate) fn with_flag(entries: DMatrix<C64>, hermitian: bool) -> Self {
        Self { entries, hermitian }
    }

    pub fn identity(dim: usize) -> Self {
        Self::hermitian_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self::with_flag(self.entries.adjoint(), self.hermitian)
    }

    pub fn mul(&self, rhs: &OperatorMatrix) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rhs.dim(),
            });
        }
        Ok(Self::new(&self.entries * &rhs.entries))
    }

    pub fn scale(&self, s: C64) -> Self {
        let hermitian = self.hermitian && s.im == 0.0;
        Self::with_flag(&self.entries * s, hermitian)
    }

    /// `max |U†U − 1|` over all entries.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.entries.adjoint() * &self.entries - DMatrix::<C64>::identity(n, n)))
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// exp(scale · A) with the default dimension cap.
pub fn matrix_exponential(op: &OperatorMatrix, scale: C64) -> Result<OperatorMatrix> {
    matrix_exponential_capped(op, scale, DEFAULT_DIM_CAP)
}

/// exp(scale · A).
///
/// Hermitian-flagged generators go through the eigendecomposition
/// A = V Λ V†, so exp(scale · A) = V exp(scale · Λ) V†. Everything else uses
/// Padé scaling-and-squaring.
pub fn matrix_exponential_capped(
    op: &OperatorMatrix,
    scale: C64,
    cap: usize,
) -> Result<OperatorMatrix> {
    let n = op.dim();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    if scale == c(0.0, 0.0) {
        return Ok(OperatorMatrix::identity(n));
    }
    if op.is_hermitian() {
        let eig = op.entries.clone().symmetric_eigen();
        let v = &eig.eigenvectors;
        let phases = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| (scale * l).exp()));
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        let out = scaled * v.adjoint();
        // a real scale keeps the result hermitian
        return Ok(OperatorMatrix::with_flag(out, scale.im == 0.0));
    }
    Ok(OperatorMatrix::new((&op.entries * scale).exp()))
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Normalizes the given amplitudes; errors on the zero vector.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: "state vector has zero or non-finite norm".into(),
            });
        }
        Ok(Self {
            amplitudes: amplitudes / c(norm, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Applies a unitary and checks that the norm survives to 1e-10.
    pub fn apply(&self, op: &OperatorMatrix) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.dim(),
            });
        }
        let amplitudes = op.entries() * &self.amplitudes;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter {
                name: "op",
                reason: format!("operator is not norm preserving (‖Uψ‖ = {norm})"),
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// |⟨a|b⟩|², clamped to [0, 1].
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}
