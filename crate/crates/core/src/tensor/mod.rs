//! Dense complex linear algebra, Haar sampling and the vectorization calculus.

pub mod eigen;
pub mod haar;
pub mod matrix;
pub mod partial;
pub mod vectorize;

pub use eigen::{hermitian_eigs, min_eigenvalue, Eigen};
pub use haar::{haar_unitary, random_isometry, thin_qr};
pub use matrix::ComplexMatrix;
pub use partial::{partial_trace, partial_transpose_second};
pub use vectorize::{vec_identity_residuals, VecIdentityResiduals};

/// The swap operator on C^d ⊗ C^d.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = matrix::ONE;
        }
    }
    s
}

/// Computational basis vector |i⟩ in C^n.
pub fn basis_vector(n: usize, i: usize) -> Vec<num_complex::Complex64> {
    let mut v = vec![matrix::ZERO; n];
    v[i] = matrix::ONE;
    v
}

/// Kronecker product of vectors.
pub fn kron_vec(
    a: &[num_complex::Complex64],
    b: &[num_complex::Complex64],
) -> Vec<num_complex::Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// `v^⊗n`.
pub fn kron_vec_power(v: &[num_complex::Complex64], n: usize) -> Vec<num_complex::Complex64> {
    (0..n).fold(vec![matrix::ONE], |acc, _| kron_vec(&acc, v))
}
