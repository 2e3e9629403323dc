//! Ginibre matrices, thin QR and Haar-distributed unitaries.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::rng::RngStream;

/// Matrix of i.i.d. circular complex normals.
pub fn ginibre(rows: usize, cols: usize, rng: &mut RngStream) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

/// Thin QR by modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Returns `(Q, R)` with Q of shape m×n (orthonormal columns) and R upper
/// triangular with a real, non-negative diagonal. Requires m ≥ n and full
/// column rank, which Ginibre input has almost surely.
pub fn thin_qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = a.shape();
    assert!(m >= n, "thin QR needs rows >= cols");
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.col(j)).collect();
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let qi = &head[i];
                let v = &mut tail[0];
                let overlap: Complex64 = qi.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vk, qk) in v.iter_mut().zip(qi) {
                    *vk -= overlap * qk;
                }
                r[(i, j)] += overlap;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        r[(j, j)] = Complex64::new(norm, 0.0);
        if norm > 0.0 {
            cols[j].iter_mut().for_each(|z| *z /= norm);
        } else {
            cols[j].iter_mut().for_each(|z| *z = ZERO);
        }
    }
    let mut q = ComplexMatrix::zeros(m, n);
    for (j, c) in cols.iter().enumerate() {
        q.set_col(j, c);
    }
    (q, r)
}

/// Haar-random d×d unitary.
///
/// QR of a Ginibre matrix with diag(R) > 0; Gram–Schmidt already produces
/// that normalization, which is what makes Q exactly Haar distributed.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    thin_qr(&g).0
}

/// Random isometry C^cols → C^rows (rows ≥ cols).
pub fn random_isometry(rows: usize, cols: usize, rng: &mut RngStream) -> ComplexMatrix {
    thin_qr(&ginibre(rows, cols, rng)).0
}

/// k!(d−1)!/(k+d−1)!, the Haar moment E|⟨0|U|0⟩|^{2k}.
pub fn haar_moment(d: usize, k: usize) -> f64 {
    // Product form avoids factorial overflow.
    (1..=k).map(|j| j as f64 / (d - 1 + j) as f64).product()
}
