//! Operator–vector isomorphism.
//!
//! For A : H₁ → H₂ (shape dim H₂ × dim H₁) the vector is
//! `|A⟩⟩ = Σ_ij A_ij |i⟩₂|j⟩₁`, output factor first. In row-major storage
//! that is just the entry list of A, so `vec` and `unvec` are reshapes.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::partial::partial_trace;
use crate::error::{Error, Result};

pub fn vec(a: &ComplexMatrix) -> Vec<Complex64> {
    a.as_slice().to_vec()
}

pub fn unvec(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_vec(rows, cols, v.to_vec())
}

/// |A⟩⟩⟨⟨B|.
pub fn vec_outer(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::outer(a.as_slice(), b.as_slice())
}

/// Residuals of the four vectorization identities, all Frobenius norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecIdentityResiduals {
    /// M⊗N|A⟩⟩ = |M A Nᵀ⟩⟩
    pub kron_action: f64,
    /// Trace over H₁ (second factor) of |A⟩⟩⟨⟨B| = A B†
    pub trace_input: f64,
    /// Trace over H₂ (first factor) of |A⟩⟩⟨⟨B| = Aᵀ B*
    pub trace_output: f64,
    /// Tr[A N A† M] = Tr[|A⟩⟩⟨⟨A| M ⊗ Nᵀ]
    pub sandwich: f64,
}

impl VecIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.kron_action
            .max(self.trace_input)
            .max(self.trace_output)
            .max(self.sandwich)
    }
}

/// Evaluate both sides of each identity for A, B of shape m×n, M (m×m)
/// acting on the output space and N (n×n) on the input space. The
/// sandwich identity uses M₁ = N, M₂ = M.
pub fn vec_identity_residuals(
    m: &ComplexMatrix,
    n: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<VecIdentityResiduals> {
    let (rows, cols) = a.shape();
    if b.shape() != a.shape() || m.shape() != (rows, rows) || n.shape() != (cols, cols) {
        return Err(Error::DimensionMismatch(format!(
            "A {:?}, B {:?}, M {:?}, N {:?}",
            a.shape(),
            b.shape(),
            m.shape(),
            n.shape()
        )));
    }

    let lhs = m.kron(n).matvec(&vec(a))?;
    let rhs = vec(&m.matmul(a)?.matmul(&n.transpose())?);
    let kron_action = lhs
        .iter()
        .zip(&rhs)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let ab = vec_outer(a, b);
    let trace_input = partial_trace(&ab, &[rows, cols], &[0])?.distance(&a.matmul(&b.adjoint())?);
    let trace_output =
        partial_trace(&ab, &[rows, cols], &[1])?.distance(&a.transpose().matmul(&b.conj())?);

    let left = a.matmul(n)?.matmul(&a.adjoint())?.matmul(m)?.trace();
    let right = vec_outer(a, a).trace_product(&m.kron(&n.transpose()))?;
    let sandwich = (left - right).norm();

    Ok(VecIdentityResiduals {
        kron_action,
        trace_input,
        trace_output,
        sandwich,
    })
}
