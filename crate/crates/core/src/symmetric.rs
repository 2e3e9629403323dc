//! Bose (symmetric) subspace of N qudit copies.
//!
//! Basis vectors are labelled by occupation numbers (n₀,…,n_{d−1}) with
//! Σnᵢ = N, ordered lexicographically descending, so (N,0,…,0) comes first.
//! The isometry column for occupation n is
//! `√(n₀!⋯n_{d−1}!/N!) · Σ |i₁…i_N⟩` over the distinct arrangements.

use std::collections::HashMap;

use itertools::Itertools;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;

/// Largest d^N for which dense operators are built.
pub const MAX_FULL_DIM: u128 = 1_000_000;
/// Permutation-average cross-check limit (8! terms).
pub const MAX_PERMUTATION_COPIES: usize = 8;

/// binomial(N+d−1, N).
pub fn bose_dim(d: usize, n: usize) -> usize {
    if d == 0 {
        return usize::from(n == 0);
    }
    // Multiplicative form stays exact: each prefix product is a binomial.
    let mut acc: u128 = 1;
    for k in 1..=n as u128 {
        acc = acc * (d as u128 - 1 + k) / k;
    }
    acc as usize
}

fn full_dim(d: usize, n: usize) -> Result<usize> {
    let size = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > MAX_FULL_DIM {
        return Err(Error::TooLarge {
            what: "d^N",
            size,
            limit: MAX_FULL_DIM,
        });
    }
    Ok(size as usize)
}

/// Occupation vectors of N into d parts, lexicographically descending.
pub fn compositions(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == d - 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            rec(d, remaining - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    rec(d, n, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Digits of a computational index, first factor most significant.
pub fn digits(mut index: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Debug, Clone)]
pub struct SymBasis {
    pub d: usize,
    pub n: usize,
    pub compositions: Vec<Vec<usize>>,
    /// d^N × d[N], orthonormal columns.
    pub isometry: ComplexMatrix,
}

impl SymBasis {
    pub fn dim(&self) -> usize {
        self.compositions.len()
    }

    pub fn full_dim(&self) -> usize {
        self.isometry.rows()
    }

    /// Coordinates of a full-space vector in the symmetric basis (V†ψ).
    pub fn compress(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.isometry.adjoint().matvec(psi)
    }

    /// Full-space vector for symmetric coordinates (Vc).
    pub fn embed(&self, coords: &[Complex64]) -> Result<Vec<Complex64>> {
        self.isometry.matvec(coords)
    }

    /// Symmetric coordinates of |φ⟩^⊗N without forming the tensor power:
    /// entry n is √(N!/Πnᵢ!) Π φᵢ^{nᵢ}.
    pub fn product_state_coords(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let nf = factorial(self.n);
        self.compositions
            .iter()
            .map(|occ| {
                let weight = (nf / occ.iter().map(|&k| factorial(k)).product::<f64>()).sqrt();
                occ.iter()
                    .zip(phi)
                    .fold(Complex64::new(weight, 0.0), |acc, (&k, z)| {
                        acc * z.powu(k as u32)
                    })
            })
            .collect()
    }
}

pub fn sym_isometry(d: usize, n: usize) -> Result<SymBasis> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be >= 1".into()));
    }
    let full = full_dim(d, n)?;
    let comps = compositions(d, n);
    let lookup: HashMap<Vec<usize>, usize> = comps
        .iter()
        .enumerate()
        .map(|(k, c)| (c.clone(), k))
        .collect();
    let nf = factorial(n);
    let amplitude: Vec<f64> = comps
        .iter()
        .map(|c| (c.iter().map(|&k| factorial(k)).product::<f64>() / nf).sqrt())
        .collect();
    let mut iso = ComplexMatrix::zeros(full, comps.len());
    let mut occ = vec![0usize; d];
    for idx in 0..full {
        occ.iter_mut().for_each(|o| *o = 0);
        for digit in digits(idx, d, n) {
            occ[digit] += 1;
        }
        let col = lookup[&occ];
        iso[(idx, col)] = Complex64::new(amplitude[col], 0.0);
    }
    Ok(SymBasis {
        d,
        n,
        compositions: comps,
        isometry: iso,
    })
}

/// Projector onto the symmetric subspace, V V†.
pub fn sym_projector(d: usize, n: usize) -> Result<ComplexMatrix> {
    let basis = sym_isometry(d, n)?;
    let v = &basis.isometry;
    v.matmul(&v.adjoint())
}

/// Permutation matrix on (C^d)^⊗N sending factor k to position perm[k].
pub fn permutation_operator(d: usize, perm: &[usize]) -> Result<ComplexMatrix> {
    let n = perm.len();
    let full = full_dim(d, n)?;
    let mut p = ComplexMatrix::zeros(full, full);
    for idx in 0..full {
        let src = digits(idx, d, n);
        let mut dst = vec![0; n];
        for (k, &target) in perm.iter().enumerate() {
            dst[target] = src[k];
        }
        let out = dst.iter().fold(0, |acc, &x| acc * d + x);
        p[(out, idx)] = Complex64::new(1.0, 0.0);
    }
    Ok(p)
}

/// (1/N!) Σ_π P_π, the cross-check for [`sym_projector`]. N ≤ 8.
pub fn sym_projector_by_permutations(d: usize, n: usize) -> Result<ComplexMatrix> {
    if n > MAX_PERMUTATION_COPIES {
        return Err(Error::TooLarge {
            what: "permutation copies",
            size: n as u128,
            limit: MAX_PERMUTATION_COPIES as u128,
        });
    }
    let full = full_dim(d, n)?;
    let mut acc = ComplexMatrix::zeros(full, full);
    let mut count = 0usize;
    for perm in (0..n).permutations(n) {
        acc += &permutation_operator(d, &perm)?;
        count += 1;
    }
    Ok(acc.scale_real(1.0 / count.max(1) as f64))
}

/// ∫dφ |φ⟩⟨φ|^⊗k = P_sym(d, k) / d[k].
pub fn haar_state_average(d: usize, k: usize) -> Result<ComplexMatrix> {
    Ok(sym_projector(d, k)?.scale_real(1.0 / bose_dim(d, k) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::tensor::{haar_unitary, partial_trace};

    #[test]
    fn dims() {
        assert_eq!(bose_dim(2, 2), 3);
        assert_eq!(bose_dim(3, 2), 6);
        assert_eq!(bose_dim(2, 1), 2);
        assert_eq!(bose_dim(4, 0), 1);
        assert_eq!(bose_dim(3, 3), 10);
    }

    #[test]
    fn pascal_recurrence() {
        for d in 2..8 {
            for n in 1..8 {
                assert_eq!(bose_dim(d, n), bose_dim(d - 1, n) + bose_dim(d, n - 1));
            }
        }
    }

    #[test]
    fn composition_order() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(
            compositions(3, 1),
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(compositions(4, 3).len(), bose_dim(4, 3));
    }

    #[test]
    fn qubit_singlet_partner() {
        let b = sym_isometry(2, 2).unwrap();
        let col = b.isometry.col(1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [0.0, s, s, 0.0];
        for (z, w) in col.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn three_qubit_w_like_column() {
        let b = sym_isometry(2, 3).unwrap();
        let k = b
            .compositions
            .iter()
            .position(|c| c == &vec![2, 1])
            .unwrap();
        let col = b.isometry.col(k);
        let a = 1.0 / 3f64.sqrt();
        for (idx, z) in col.iter().enumerate() {
            let want = if [0b001, 0b010, 0b100].contains(&idx) {
                a
            } else {
                0.0
            };
            assert!((z.re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn isometry_orthonormal() {
        let b = sym_isometry(3, 2).unwrap();
        let g = b.isometry.adjoint().matmul(&b.isometry).unwrap();
        assert!(g.max_abs_diff(&ComplexMatrix::identity(6)) <= 1e-12);
    }

    #[test]
    fn projector_matches_permutation_average() {
        for (d, n) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)] {
            let p = sym_projector(d, n).unwrap();
            let q = sym_projector_by_permutations(d, n).unwrap();
            assert!(p.max_abs_diff(&q) <= 1e-12, "d={d} n={n}");
        }
    }

    #[test]
    fn projector_trace_and_idempotency() {
        let p = sym_projector(2, 2).unwrap();
        assert!((p.trace().re - 3.0).abs() < 1e-12);
        let p = sym_projector(3, 3).unwrap();
        assert!(p.matmul(&p).unwrap().max_abs_diff(&p) <= 1e-12);
    }

    #[test]
    fn partial_trace_of_projector() {
        // Tr_1 P^(N+1) = ((N+d)/(N+1)) P^(N)
        for (d, n) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
            let p = sym_projector(d, n + 1).unwrap();
            let mut dims = vec![d; n + 1];
            dims[0] = d;
            let keep: Vec<usize> = (1..=n).collect();
            let got = partial_trace(&p, &dims, &keep).unwrap();
            let want = sym_projector(d, n)
                .unwrap()
                .scale_real((n + d) as f64 / (n + 1) as f64);
            assert!(got.max_abs_diff(&want) < 1e-12, "d={d} n={n}");
        }
    }

    #[test]
    fn commutes_with_permutations_and_tensor_powers() {
        let (d, n) = (3, 3);
        let p = sym_projector(d, n).unwrap();
        let swap12 = permutation_operator(d, &[1, 0, 2]).unwrap();
        let cycle = permutation_operator(d, &[1, 2, 0]).unwrap();
        assert!(p.commutator(&swap12).unwrap().max_abs() <= 1e-12);
        assert!(p.commutator(&cycle).unwrap().max_abs() <= 1e-12);
        let mut rng = RngStream::new(21);
        for _ in 0..5 {
            let u = haar_unitary(d, &mut rng).kron_power(n);
            assert!(p.commutator(&u).unwrap().max_abs() <= 1e-10);
        }
    }

    #[test]
    fn product_state_coords_match_compression() {
        let mut rng = RngStream::new(31);
        let b = sym_isometry(3, 3).unwrap();
        let phi = rng.haar_state(3);
        let direct = b.compress(&crate::tensor::kron_vec_power(&phi, 3)).unwrap();
        let fast = b.product_state_coords(&phi);
        for (x, y) in direct.iter().zip(&fast) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn size_guard() {
        assert!(matches!(sym_isometry(10, 7), Err(Error::TooLarge { .. })));
        assert!(sym_projector_by_permutations(2, 9).is_err());
    }

    #[test]
    fn haar_average_normalized() {
        let a = haar_state_average(2, 1).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert!((haar_state_average(3, 2).unwrap().trace().re - 1.0).abs() < 1e-12);
    }
}
