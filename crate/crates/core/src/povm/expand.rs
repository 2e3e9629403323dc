//! Expansion of a two-qudit Hermitian operator over {I, λ_a} ⊗ {I, λ_b}:
//!
//! X = w I⊗I + Σ r_a λ_a⊗I + Σ s_a I⊗λ_a + Σ t_ab λ_a⊗λ_b

use serde::{Deserialize, Serialize};

use super::generators::gell_mann;
use crate::error::{Error, Result};
use crate::tensor::matrix::ZERO;
use crate::tensor::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianExpansion {
    pub d: usize,
    pub w: f64,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// Row-major (d²−1)×(d²−1): t[a·(d²−1) + b] multiplies λ_a⊗λ_b.
    pub t: Vec<f64>,
}

impl HermitianExpansion {
    pub fn t_at(&self, a: usize, b: usize) -> f64 {
        self.t[a * (self.d * self.d - 1) + b]
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.d;
        let g = gell_mann(d);
        let id = ComplexMatrix::identity(d);
        let mut x = ComplexMatrix::identity(d * d).scale_real(self.w);
        for (a, la) in g.iter().enumerate() {
            if self.r[a] != 0.0 {
                x += &la.kron(&id).scale_real(self.r[a]);
            }
            if self.s[a] != 0.0 {
                x += &id.kron(la).scale_real(self.s[a]);
            }
            for (b, lb) in g.iter().enumerate() {
                let t = self.t_at(a, b);
                if t != 0.0 {
                    x += &la.kron(lb).scale_real(t);
                }
            }
        }
        x
    }
}

/// Tr[X (A⊗B)] in O(d⁴).
fn trace_with_kron(x: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, d: usize) -> f64 {
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            let aik = a[(i, k)];
            if aik == ZERO {
                continue;
            }
            for j in 0..d {
                for l in 0..d {
                    let bjl = b[(j, l)];
                    if bjl == ZERO {
                        continue;
                    }
                    acc += x[(k * d + l, i * d + j)] * aik * bjl;
                }
            }
        }
    }
    acc.re
}

pub fn hermitian_expand(x: &ComplexMatrix, d: usize) -> Result<HermitianExpansion> {
    if x.shape() != (d * d, d * d) {
        return Err(Error::DimensionMismatch(format!(
            "expansion of {:?} for d = {d}",
            x.shape()
        )));
    }
    let err = x.hermiticity_error();
    if err > 1e-10 * x.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    let g = gell_mann(d);
    let id = ComplexMatrix::identity(d);
    let df = d as f64;
    let w = x.trace().re / (df * df);
    let r = g
        .iter()
        .map(|l| trace_with_kron(x, l, &id, d) / (2.0 * df))
        .collect();
    let s = g
        .iter()
        .map(|l| trace_with_kron(x, &id, l, d) / (2.0 * df))
        .collect();
    let t = g
        .iter()
        .flat_map(|la| g.iter().map(move |lb| (la, lb)))
        .map(|(la, lb)| trace_with_kron(x, la, lb, d) / 4.0)
        .collect();
    Ok(HermitianExpansion { d, w, r, s, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::seed::{build_seed, SeedParams};
    use crate::rng::RngStream;

    #[test]
    fn identity_expands_to_w() {
        let e = hermitian_expand(&ComplexMatrix::identity(9), 3).unwrap();
        assert!((e.w - 1.0).abs() < 1e-15);
        assert!(e.r.iter().chain(&e.s).chain(&e.t).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn basis_element() {
        let d = 3;
        let g = gell_mann(d);
        let e = hermitian_expand(&g[0].kron(&g[1]), d).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let want = if (a, b) == (0, 1) { 1.0 } else { 0.0 };
                assert!((e.t_at(a, b) - want).abs() < 1e-15);
            }
        }
        assert!(e.w.abs() < 1e-15);
    }

    #[test]
    fn seed_round_trip() {
        let mut rng = RngStream::new(60);
        for _ in 0..5 {
            let p = SeedParams::new(3, rng.normal(), rng.normal(), rng.normal(), rng.normal());
            let x = build_seed(&p).unwrap().matrix;
            let back = hermitian_expand(&x, 3).unwrap().reconstruct();
            assert!(back.max_abs_diff(&x) <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let x = ComplexMatrix::unit(4, 0, 1);
        assert!(matches!(
            hermitian_expand(&x, 2),
            Err(Error::NotHermitian(_))
        ));
    }
}
