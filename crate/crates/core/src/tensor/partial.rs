//! Partial trace and partial transpose on tensor-product operators.

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Partial transpose of the second factor of a d²×d² operator:
/// `⟨i j|X|k l⟩ ↦ ⟨i l|X|k j⟩`.
pub fn partial_transpose_second(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    partial_transpose(x, d, d)
}

/// Partial transpose of the second factor for C^{d1} ⊗ C^{d2}.
pub fn partial_transpose(x: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    let n = d1 * d2;
    if x.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose of {}x{} on {d1}x{d2}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, j) = (row / d2, row % d2);
        let (k, l) = (col / d2, col % d2);
        x[(i * d2 + l, k * d2 + j)]
    }))
}

/// Trace over every factor not listed in `keep`.
///
/// `dims` lists the factor dimensions, first factor most significant.
/// The result acts on the kept factors in their original order.
pub fn partial_trace(x: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if x.shape() != (total, total) {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of {}x{} over dims {dims:?}",
            x.rows(),
            x.cols()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "kept factor {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..dims.len())
        .filter(|f| !keep_sorted.contains(f))
        .collect();

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&f| dims[f]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&f| dims[f]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // Digits in the full index for a given (kept, traced) multi-index.
    let compose = |kept_idx: usize, env_idx: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut rem = kept_idx;
        for (pos, &f) in keep_sorted.iter().enumerate().rev() {
            digits[f] = rem % kept_dims[pos];
            rem /= kept_dims[pos];
        }
        let mut rem = env_idx;
        for (pos, &f) in traced.iter().enumerate().rev() {
            digits[f] = rem % traced_dims[pos];
            rem /= traced_dims[pos];
        }
        digits
            .iter()
            .zip(dims)
            .fold(0usize, |acc, (&digit, &dim)| acc * dim + digit)
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut acc = super::matrix::ZERO;
            for e in 0..env_dim {
                acc += x[(compose(a, e), compose(b, e))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}
