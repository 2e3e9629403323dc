//! Dense Hermitian eigensolver.
//!
//! An n×n Hermitian `H = A + iB` is embedded in the 2n×2n real symmetric
//! matrix `[[A, −B], [B, A]]`, which cyclic Jacobi diagonalizes. Every
//! eigenvalue of `H` appears twice in the embedding: `(x, y)` and
//! `(−y, x)` both map to the complex vector `x + iy` up to a phase. The
//! complex eigenbasis is recovered by pivoted Gram–Schmidt over the 2n
//! candidates.
//!
//! Before any of that, the sparsity graph of `H` is split into connected
//! components; each block is solved independently. The covariant seed
//! operators decompose into blocks of size at most `d`, which is what makes
//! the optimizer fast.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which Jacobi stops, relative to ‖H‖.
pub const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
/// Entries below this fraction of max|H| do not couple blocks.
const BLOCK_COUPLING_TOL: f64 = 1e-15;
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// ‖U diag(λ) U† − X‖_F.
    pub fn reconstruction_residual(&self, x: &ComplexMatrix) -> f64 {
        let n = self.values.len();
        let u = &self.vectors;
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| u[(i, k)] * self.values[k]);
        let rebuilt = scaled.matmul(&u.adjoint()).expect("square");
        rebuilt.distance(x)
    }
}

fn check_hermitian(x: &ComplexMatrix) -> Result<()> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let err = x.hermiticity_error();
    let scale = x.max_abs().max(1.0);
    if err > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Full eigendecomposition, eigenvalues ascending.
pub fn hermitian_eigs(x: &ComplexMatrix) -> Result<Eigen> {
    check_hermitian(x)?;
    let n = x.rows();
    let blocks = connected_blocks(x);
    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    for block in &blocks {
        let sub = x.select(block, block);
        let (vals, vecs) = dense_eigs(&sub);
        for (k, &lambda) in vals.iter().enumerate() {
            let mut v = vec![ZERO; n];
            for (local, &global) in block.iter().enumerate() {
                v[global] = vecs[(local, k)];
            }
            pairs.push((lambda, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, (lambda, v)) in pairs.into_iter().enumerate() {
        values.push(lambda);
        vectors.set_col(k, &v);
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only (same algorithm; vectors are discarded).
pub fn hermitian_eigenvalues(x: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigs(x)?.values)
}

/// Smallest eigenvalue.
pub fn min_eigenvalue(x: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigs(x)?.min())
}

/// Index sets of the connected components of the graph with an edge
/// wherever |X_ij| is non-negligible. Each set is sorted ascending.
pub fn connected_blocks(x: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = x.rows();
    let cutoff = BLOCK_COUPLING_TOL * x.max_abs();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if x[(i, j)].norm() > cutoff || x[(j, i)].norm() > cutoff {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_to_block = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_to_block[r] == usize::MAX {
            root_to_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_to_block[r]].push(i);
    }
    blocks
}

/// Eigenpairs of a dense Hermitian block via the real embedding.
fn dense_eigs(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.rows();
    if n == 1 {
        return (vec![h[(0, 0)].re], ComplexMatrix::identity(1));
    }
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so tiny Hermiticity errors cannot bias the result.
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let (_, vecs) = jacobi_symmetric(&mut a, m);

    // Candidate complex vectors x + iy, one per real eigenvector.
    let mut candidates: Vec<Vec<Complex64>> = (0..m)
        .map(|k| {
            (0..n)
                .map(|i| Complex64::new(vecs[i * m + k], vecs[(i + n) * m + k]))
                .collect()
        })
        .collect();

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let (best, norm) = candidates
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.iter().map(|z| z.norm_sqr()).sum::<f64>()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("candidates remain");
        let mut q = candidates.swap_remove(best);
        let inv = 1.0 / norm.sqrt();
        q.iter_mut().for_each(|z| *z *= inv);
        for c in candidates.iter_mut() {
            let overlap: Complex64 = q.iter().zip(c.iter()).map(|(a, b)| a.conj() * b).sum();
            for (ci, qi) in c.iter_mut().zip(&q) {
                *ci -= overlap * qi;
            }
        }
        basis.push(q);
    }
    // Polish orthonormality (second Gram–Schmidt pass).
    for k in 0..n {
        for j in 0..k {
            let overlap: Complex64 = basis[j]
                .iter()
                .zip(&basis[k])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let (head, tail) = basis.split_at_mut(k);
            for (bi, qi) in tail[0].iter_mut().zip(&head[j]) {
                *bi -= overlap * qi;
            }
        }
        let norm = basis[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        basis[k].iter_mut().for_each(|z| *z /= norm);
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = basis
        .into_iter()
        .map(|v| {
            let hv = h.matvec(&v).expect("square block");
            let rq: f64 = v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum();
            (rq, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = ComplexMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (k, (lambda, v)) in pairs.into_iter().enumerate() {
        vals.push(lambda);
        out.set_col(k, &v);
    }
    (vals, out)
}

/// Cyclic Jacobi on a real symmetric m×m matrix stored row-major.
/// Returns (eigenvalues unsorted, eigenvectors as columns of a row-major m×m).
pub fn jacobi_symmetric(a: &mut [f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0f64; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * total.max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals = (0..m).map(|i| a[i * m + i]).collect();
    (vals, v)
}

/// f(X) = U f(Λ) U† for Hermitian X.
pub fn hermitian_function(x: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigs(x)?;
    let n = x.rows();
    let u = &eig.vectors;
    let scaled = ComplexMatrix::from_fn(n, n, |i, k| u[(i, k)] * f(eig.values[k]));
    scaled.matmul(&u.adjoint())
}
