//! Explicit optimal seeds.
//!
//! * `case_one_opt`: (d(d+1)/2)|00⟩⟨00| + (d/2) Σ_i |ψ_i⟩⟨ψ_i|,
//!   ψ_i = (|0i⟩ − |i0⟩)/√2.
//! * `psi_local`: partial transpose of |ψ_local⟩⟨ψ_local| with
//!   ψ_local = d^{-1/2} {[(d−1)√(1+d) + 1]|00⟩ − (√(1+d) − 1) Σ_i |ii⟩}.
//! * `psi_perp`: partial transpose of (d/(2A₊)) Σ_{i,j≥1} |ij⟩⟨ij| + |ψ⊥⟩⟨ψ⊥|,
//!   ψ⊥ = √(dA₊/2)|00⟩ − √(d/(2A₊)) Σ_i |ii⟩, A± = 2d ± √(2d(d+1)).
//!
//! Sums over i, j run over 1..d−1.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::seed::{solve_params, SeedOperator};
use crate::error::{Error, Result};
use crate::tensor::{partial_transpose_second, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceOperator {
    CaseOneOpt,
    PsiLocal,
    PsiPerp,
}

impl ReferenceOperator {
    pub const ALL: [ReferenceOperator; 3] = [
        ReferenceOperator::CaseOneOpt,
        ReferenceOperator::PsiLocal,
        ReferenceOperator::PsiPerp,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReferenceOperator::CaseOneOpt => "case_one_opt",
            ReferenceOperator::PsiLocal => "psi_local",
            ReferenceOperator::PsiPerp => "psi_perp",
        }
    }
}

impl fmt::Display for ReferenceOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReferenceOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReferenceOperator::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Unnormalized |ψ_local⟩.
pub fn psi_local_vector(d: usize) -> Vec<Complex64> {
    let df = d as f64;
    let s = (1.0 + df).sqrt();
    let norm = 1.0 / df.sqrt();
    let mut v = vec![real(0.0); d * d];
    v[0] = real(norm * ((df - 1.0) * s + 1.0));
    for i in 1..d {
        v[i * d + i] = real(-norm * (s - 1.0));
    }
    v
}

/// A₊ = 2d + √(2d(d+1)).
pub fn a_plus(d: usize) -> f64 {
    let df = d as f64;
    2.0 * df + (2.0 * df * (df + 1.0)).sqrt()
}

pub fn psi_perp_vector(d: usize) -> Vec<Complex64> {
    let df = d as f64;
    let ap = a_plus(d);
    let mut v = vec![real(0.0); d * d];
    v[0] = real((df * ap / 2.0).sqrt());
    for i in 1..d {
        v[i * d + i] = real(-(df / (2.0 * ap)).sqrt());
    }
    v
}

fn case_one_matrix(d: usize) -> ComplexMatrix {
    let df = d as f64;
    let mut x = ComplexMatrix::zeros(d * d, d * d);
    x[(0, 0)] = real(df * (df + 1.0) / 2.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 1..d {
        let mut psi = vec![real(0.0); d * d];
        psi[i] = real(h); // |0i⟩
        psi[i * d] = real(-h); // |i0⟩
        x += &ComplexMatrix::outer(&psi, &psi).scale_real(df / 2.0);
    }
    x
}

/// The conjugate-case operator â₀^{~T} (before the partial transpose).
pub fn transposed_form(name: ReferenceOperator, d: usize) -> Option<ComplexMatrix> {
    match name {
        ReferenceOperator::CaseOneOpt => None,
        ReferenceOperator::PsiLocal => {
            let v = psi_local_vector(d);
            Some(ComplexMatrix::outer(&v, &v))
        }
        ReferenceOperator::PsiPerp => {
            let v = psi_perp_vector(d);
            let mut y = ComplexMatrix::outer(&v, &v);
            let w = d as f64 / (2.0 * a_plus(d));
            for i in 1..d {
                for j in 1..d {
                    y[(i * d + j, i * d + j)] += real(w);
                }
            }
            Some(y)
        }
    }
}

pub fn reference_operator(name: ReferenceOperator, d: usize) -> Result<SeedOperator> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "reference operators need d >= 2, got {d}"
        )));
    }
    let matrix = match transposed_form(name, d) {
        None => case_one_matrix(d),
        Some(y) => partial_transpose_second(&y, d)?,
    };
    let params = solve_params(&matrix, d, 1e-10 * matrix.max_abs().max(1.0));
    Ok(SeedOperator { d, matrix, params })
}

pub fn reference_operator_by_name(name: &str, d: usize) -> Result<SeedOperator> {
    reference_operator(name.parse()?, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::seed::{build_seed, positivity_margin, MeasurementCase, SeedParams};
    use crate::povm::twirl::trace_conditions;
    use crate::tensor::eigen::hermitian_eigenvalues;

    #[test]
    fn case_one_is_family_member() {
        for d in 2..8 {
            let s = reference_operator(ReferenceOperator::CaseOneOpt, d).unwrap();
            let p = s.params.expect("in family");
            let want = SeedParams::case_one_optimum(d);
            for (a, b) in p.as_array().iter().zip(want.as_array()) {
                assert!((a - b).abs() < 1e-12, "d={d}");
            }
            assert!(build_seed(&p).unwrap().matrix.max_abs_diff(&s.matrix) < 1e-12);
        }
    }

    #[test]
    fn psi_local_matches_closed_form_params() {
        for d in 2..9 {
            let s = reference_operator(ReferenceOperator::PsiLocal, d).unwrap();
            let p = s.params.expect("psi_local lies in the family");
            let want = SeedParams::local_extremum(d);
            for (a, b) in p.as_array().iter().zip(want.as_array()) {
                assert!((a - b).abs() < 1e-10, "d={d}: {p:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn psi_local_trace_conditions_exact() {
        for d in 2..=10 {
            let s = reference_operator(ReferenceOperator::PsiLocal, d).unwrap();
            let (t, w) = trace_conditions(&s.matrix, d).unwrap();
            let scale = (d * d) as f64;
            assert!(t <= 1e-12 * scale && w <= 1e-12 * scale, "d={d}: {t} {w}");
        }
    }

    #[test]
    fn psi_local_rank_one_after_transpose() {
        for d in [2, 3, 4] {
            let s = reference_operator(ReferenceOperator::PsiLocal, d).unwrap();
            assert!(
                positivity_margin(&s, MeasurementCase::Conjugate)
                    .unwrap()
                    .abs()
                    <= 1e-10
            );
            let vals = hermitian_eigenvalues(&s.effect_seed(MeasurementCase::Conjugate)).unwrap();
            let rank = vals.iter().filter(|&&v| v > 1e-9).count();
            assert_eq!(rank, 1);
            assert!((vals.last().unwrap() - (d * d) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn case_one_parallel_margin_zero() {
        let s = reference_operator(ReferenceOperator::CaseOneOpt, 2).unwrap();
        assert!(
            positivity_margin(&s, MeasurementCase::Parallel)
                .unwrap()
                .abs()
                <= 1e-10
        );
    }

    #[test]
    fn psi_perp_violates_completeness() {
        let s = reference_operator(ReferenceOperator::PsiPerp, 2).unwrap();
        let (t, w) = trace_conditions(&s.matrix, 2).unwrap();
        assert!(t > 1.0 && w > 1.0);
        // Its transposed form is still PSD.
        assert!(positivity_margin(&s, MeasurementCase::Conjugate).unwrap() >= -1e-12);
    }

    #[test]
    fn names() {
        assert_eq!(
            "psi_local".parse::<ReferenceOperator>().unwrap(),
            ReferenceOperator::PsiLocal
        );
        assert!(matches!(
            reference_operator_by_name("psi_other", 2),
            Err(Error::UnknownOperator(_))
        ));
    }
}
