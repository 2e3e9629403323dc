//! Mean estimation fidelity of a covariant two-copy POVM.
//!
//! For a seed â₀ the Haar-averaged fidelity is Tr[â₀ M] with
//!
//! ```text
//! M = ∫dψ |ψψ⟩⟨ψψ| |⟨0|ψ⟩|² = ⟨0|₁ P_sym^{(3)} |0⟩₁ / d[3]
//! ```
//!
//! The same value holds for conjugate inputs, since the partial transpose
//! is moved from the state onto the effect.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{parallel_mean, Estimate};
use crate::povm::reference::{reference_operator, ReferenceOperator};
use crate::povm::seed::{CartanWeight, SeedOperator, SeedParams, SeedTerms};
use crate::tensor::{swap_operator, ComplexMatrix};

/// Entry count of permutations of three indices mapping `a` onto `b`.
fn matching_permutations(a: [usize; 3], b: [usize; 3]) -> u32 {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .filter(|p| (0..3).all(|i| a[i] == b[p[i]]))
        .count() as u32
}

pub fn moment_operator(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "moment operator needs d >= 2, got {d}"
        )));
    }
    let norm = (d * (d + 1) * (d + 2)) as f64;
    let n = d * d;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let a = [0, r / d, r % d];
        let b = [0, c / d, c % d];
        (matching_permutations(a, b) as f64 / norm).into()
    }))
}

/// Tr[â₀ M].
pub fn mean_fidelity(s: &SeedOperator) -> Result<f64> {
    let m = moment_operator(s.d)?;
    Ok(s.matrix.trace_product(&m)?.re)
}

/// Monte-Carlo estimate of Tr[â₀ M] over Haar states ψ = u|0⟩.
pub fn mean_fidelity_mc(s: &SeedOperator, samples: usize, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::NoSamples(
            "mean_fidelity_mc needs samples > 0".into(),
        ));
    }
    let d = s.d;
    let x = &s.matrix;
    Ok(parallel_mean(samples, seed, |rng| {
        let psi = rng.haar_state(d);
        let v = crate::tensor::kron_vec(&psi, &psi);
        let p = x.expectation(&v).expect("seed shape checked").re;
        p * psi[0].norm_sqr()
    }))
}

/// The fidelity as an affine function of (α, β, γ, δ): F = c₀ + Σ cᵢ pᵢ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityFunctional {
    pub d: usize,
    pub constant: f64,
    pub coefficients: [f64; 4],
}

impl FidelityFunctional {
    pub fn new(d: usize) -> Result<Self> {
        let m = moment_operator(d)?;
        let terms = SeedTerms::new(d, CartanWeight::Casimir);
        let mut coefficients = [0.0; 4];
        for (c, t) in coefficients.iter_mut().zip(terms.parameter_terms()) {
            *c = t.trace_product(&m)?.re;
        }
        Ok(Self {
            d,
            constant: 1.0 / d as f64,
            coefficients,
        })
    }

    pub fn evaluate(&self, p: &SeedParams) -> f64 {
        self.constant
            + self
                .coefficients
                .iter()
                .zip(p.as_array())
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

/// Coefficients of (α, β, δ) after eliminating γ through Tr[â₀ SWAP] = d,
/// each multiplied by 2d(d+1)(d+2).
pub fn reduced_coefficients(d: usize) -> Result<[f64; 3]> {
    if d < 3 {
        return Err(Error::InvalidArgument(
            "reduced functional needs d >= 3".into(),
        ));
    }
    let f = FidelityFunctional::new(d)?;
    let s = swap_operator(d);
    let terms = SeedTerms::new(d, CartanWeight::Casimir);
    let mut sw = [0.0; 4];
    for (w, t) in sw.iter_mut().zip(terms.parameter_terms()) {
        *w = t.trace_product(&s)?.re;
    }
    let scale = 2.0 * (d * (d + 1) * (d + 2)) as f64;
    let reduce = |i: usize| (f.coefficients[i] - f.coefficients[2] * sw[i] / sw[2]) * scale;
    Ok([reduce(0), reduce(1), reduce(3)])
}

/// The printed polynomial's coefficients of (α, β, δ), scaled by 2d(d+1)(d+2).
pub fn printed_coefficients(d: usize) -> [f64; 3] {
    let d = d as f64;
    [
        -(d + 2.0) * (d - 1.0),
        2.0 * (d - 1.0) * (d - 2.0),
        -d * (d - 2.0),
    ]
}

pub fn f_parallel(d: usize) -> f64 {
    3.0 / (d as f64 + 2.0)
}

pub fn f_local(d: usize) -> f64 {
    let d = d as f64;
    2.0 * (1.0 + 2.0 * d) / ((1.0 + d) * (2.0 + d))
        - (d - 1.0) * ((1.0 + d).sqrt() - 1.0).powi(2) / (d * d * (1.0 + d))
}

pub fn f_perp(d: usize) -> f64 {
    let d = d as f64;
    (2.0 + (2.0 * d / (d + 1.0)).sqrt()) / (d + 2.0)
}

/// F⊥ ≥ F_local > F∥ > 1/d, with F⊥ = F_local allowed to rounding (they
/// coincide at d = 2).
pub fn ordering_holds(d: usize) -> bool {
    let (p, l, q) = (f_parallel(d), f_local(d), f_perp(d));
    q >= l - 1e-14 && l > p && p > 1.0 / d as f64
}

pub const PSI_PERP_NOTE: &str = "psi_perp: the printed operator violates completeness (Tr != d^2, Tr[X SWAP] != d); F_perp is reported from its closed form only";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub d: usize,
    pub f_parallel: f64,
    pub f_local: f64,
    pub f_perp: f64,
    pub flags: Vec<String>,
}

/// The three closed forms; flags cells disagreeing with the printed table.
pub fn closed_forms(d: usize) -> Result<FidelityReport> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "closed forms need d >= 2, got {d}"
        )));
    }
    let mut r = FidelityReport {
        d,
        f_parallel: f_parallel(d),
        f_local: f_local(d),
        f_perp: f_perp(d),
        flags: Vec::new(),
    };
    r.flags = table_flags(&r);
    Ok(r)
}

/// Printed table: d, F∥, F_local, F⊥.
pub const PRINTED_TABLE: [(usize, [f64; 3]); 7] = [
    (2, [0.75, 0.7887, 0.7887]),
    (3, [0.6, 0.6444, 0.6449]),
    (4, [0.5, 0.5427, 0.5442]),
    (5, [0.4286, 0.4678, 0.4701]),
    (6, [0.375, 0.4195, 0.4137]),
    (11, [0.2308, 0.2531, 0.2580]),
    (17, [0.1579, 0.1723, 0.1776]),
];

pub const COLUMNS: [&str; 3] = ["F_parallel", "F_local", "F_perp"];

pub fn printed_row(d: usize) -> Option<[f64; 3]> {
    PRINTED_TABLE.iter().find(|(k, _)| *k == d).map(|(_, v)| *v)
}

pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn table_flags(r: &FidelityReport) -> Vec<String> {
    let Some(printed) = printed_row(r.d) else {
        return Vec::new();
    };
    let values = [r.f_parallel, r.f_local, r.f_perp];
    COLUMNS
        .iter()
        .zip(values.iter().zip(printed))
        .filter(|(_, (v, p))| (round4(**v) - p).abs() > 1e-9)
        .map(|(name, (v, p))| {
            format!(
                "table1 d={} {}: closed form {:.4} ({:.6}) disagrees with printed {:.4}",
                r.d, name, v, v, p
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: usize,
    pub f_parallel: f64,
    pub f_local: f64,
    pub f_perp: f64,
    pub printed: Option<[f64; 3]>,
    /// Exact moment-operator values of the case-one and ψ_local seeds.
    pub exact: Option<[f64; 2]>,
    /// Monte-Carlo estimates of the same two seeds (d ≤ 4).
    pub mc: Option<[Estimate; 2]>,
    pub flags: Vec<String>,
}

impl TableRow {
    pub fn flag_column(&self) -> String {
        self.flags.join("; ")
    }
}

/// Largest d with Monte-Carlo confirmation in [`table1`].
pub const TABLE_MC_MAX_D: usize = 4;
/// Largest d with an exact moment-operator confirmation in [`table1`].
pub const TABLE_EXACT_MAX_D: usize = 17;

/// Closed-form rows, exact cross-checks, and Monte-Carlo confirmations.
pub fn table1(dlist: &[usize], mc_samples: usize, seed: u64) -> Result<Vec<TableRow>> {
    dlist
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let r = closed_forms(d)?;
            let exact = if d <= TABLE_EXACT_MAX_D {
                let a = mean_fidelity(&reference_operator(ReferenceOperator::CaseOneOpt, d)?)?;
                let b = mean_fidelity(&reference_operator(ReferenceOperator::PsiLocal, d)?)?;
                Some([a, b])
            } else {
                None
            };
            let mc = if d <= TABLE_MC_MAX_D && mc_samples > 0 {
                let root = crate::rng::RngStream::split(seed, k as u64).next_u64();
                let a = reference_operator(ReferenceOperator::CaseOneOpt, d)?;
                let b = reference_operator(ReferenceOperator::PsiLocal, d)?;
                Some([
                    mean_fidelity_mc(&a, mc_samples, root)?,
                    mean_fidelity_mc(&b, mc_samples, root.wrapping_add(1))?,
                ])
            } else {
                None
            };
            Ok(TableRow {
                d,
                f_parallel: r.f_parallel,
                f_local: r.f_local,
                f_perp: r.f_perp,
                printed: printed_row(d),
                exact,
                mc,
                flags: r.flags,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::seed::build_seed;
    use crate::rng::RngStream;
    use crate::tensor::eigen::min_eigenvalue;

    #[test]
    fn moment_operator_trace_and_corner() {
        for d in 2..7 {
            let m = moment_operator(d).unwrap();
            let df = d as f64;
            assert!((m.trace().re - 1.0 / df).abs() < 1e-15);
            let corner = 6.0 / (df * (df + 1.0) * (df + 2.0));
            assert!((m[(0, 0)].re - corner).abs() < 1e-15);
            assert!(min_eigenvalue(&m).unwrap() >= -1e-15);
        }
        assert!((moment_operator(2).unwrap()[(0, 0)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn moment_operator_matches_sym_projector() {
        for d in [2, 3] {
            let p = crate::symmetric::sym_projector(d, 3).unwrap();
            let dim = crate::symmetric::bose_dim(d, 3) as f64;
            let n = d * d;
            let slice = ComplexMatrix::from_fn(n, n, |r, c| p[(r, c)].scale(1.0 / dim));
            assert!(slice.max_abs_diff(&moment_operator(d).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn moment_operator_matches_haar_average() {
        let d = 2;
        let n = 100_000;
        let mut rng = RngStream::new(0x5EED_C0DE);
        let mut acc = ComplexMatrix::zeros(4, 4);
        for _ in 0..n {
            let psi = rng.haar_state(d);
            let v = crate::tensor::kron_vec(&psi, &psi);
            acc += &ComplexMatrix::outer(&v, &v).scale_real(psi[0].norm_sqr());
        }
        let mc = acc.scale_real(1.0 / n as f64);
        assert!(mc.max_abs_diff(&moment_operator(d).unwrap()) < 0.005);
    }

    #[test]
    fn identity_seed_is_random_guessing() {
        for d in 2..9 {
            let f = mean_fidelity(&SeedOperator::identity(d)).unwrap();
            assert!((f - 1.0 / d as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_values() {
        for d in 2..=8 {
            let a = mean_fidelity(&reference_operator(ReferenceOperator::CaseOneOpt, d).unwrap())
                .unwrap();
            assert!((a - f_parallel(d)).abs() < 1e-10, "d={d}");
            let b = mean_fidelity(&reference_operator(ReferenceOperator::PsiLocal, d).unwrap())
                .unwrap();
            assert!((b - f_local(d)).abs() < 1e-10, "d={d}");
        }
        let b3 =
            mean_fidelity(&reference_operator(ReferenceOperator::PsiLocal, 3).unwrap()).unwrap();
        assert_eq!(round4(b3), 0.6444);
    }

    #[test]
    fn functional_is_linear() {
        let mut rng = RngStream::new(70);
        for d in 2..6 {
            let f = FidelityFunctional::new(d).unwrap();
            for _ in 0..5 {
                let mut draw = || {
                    let dl = if d == 2 { 0.0 } else { rng.normal() };
                    SeedParams::new(d, rng.normal(), rng.normal(), rng.normal(), dl)
                };
                let (p, q) = (draw(), draw());
                let fp = mean_fidelity(&build_seed(&p).unwrap()).unwrap();
                let fq = mean_fidelity(&build_seed(&q).unwrap()).unwrap();
                assert!((f.evaluate(&p) - fp).abs() < 1e-12);
                // affine superposition: F(p + q) = F(p) + F(q) − F(0)
                let sum = SeedParams::new(
                    d,
                    p.alpha + q.alpha,
                    p.beta + q.beta,
                    p.gamma + q.gamma,
                    p.delta + q.delta,
                );
                let fs = mean_fidelity(&build_seed(&sum).unwrap()).unwrap();
                assert!((fs - (fp + fq - 1.0 / d as f64)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_functional_vs_printed_polynomial() {
        for d in 3..=6 {
            let got = reduced_coefficients(d).unwrap();
            let printed = printed_coefficients(d);
            assert!((got[1] - printed[1]).abs() < 1e-9, "beta d={d}");
            assert!((got[0] - 4.0 * printed[0]).abs() < 1e-9, "alpha d={d}");
            assert!((got[2] - 4.0 * printed[2]).abs() < 1e-9, "delta d={d}");
        }
    }

    #[test]
    fn closed_form_rows() {
        let r = closed_forms(2).unwrap();
        assert!((r.f_parallel - 0.75).abs() < 1e-15);
        assert!((r.f_local - 0.788675).abs() < 1e-6);
        assert!((r.f_perp - 0.788675).abs() < 1e-6);
        assert!(r.flags.is_empty());
        let r = closed_forms(5).unwrap();
        assert!((r.f_parallel - 0.428571).abs() < 1e-6);
        assert!((r.f_local - 0.467783).abs() < 1e-6);
        assert!((r.f_perp - 0.470142).abs() < 1e-6);
        let r = closed_forms(6).unwrap();
        assert!((r.f_local - 0.410546).abs() < 1e-6);
        assert_eq!(r.flags.len(), 1);
        assert!(r.flags[0].contains("F_local") && r.flags[0].contains("0.4195"));
    }

    #[test]
    fn table_matches_except_one_cell() {
        let rows = table1(&[2, 3, 4, 5, 6, 11, 17], 0, 1).unwrap();
        let flagged: Vec<_> = rows
            .iter()
            .filter(|r| !r.flags.is_empty())
            .map(|r| r.d)
            .collect();
        assert_eq!(flagged, vec![6]);
        let r17 = rows.last().unwrap();
        assert_eq!(
            [
                round4(r17.f_parallel),
                round4(r17.f_local),
                round4(r17.f_perp)
            ],
            [0.1579, 0.1723, 0.1776]
        );
    }

    #[test]
    fn ordering() {
        assert!((2..=50).all(ordering_holds));
        assert!((f_perp(2) - f_local(2)).abs() < 1e-14);
    }

    #[test]
    fn mc_agrees_with_exact() {
        let s = reference_operator(ReferenceOperator::CaseOneOpt, 2).unwrap();
        let e = mean_fidelity_mc(&s, 100_000, 0x5EED_C0DE).unwrap();
        assert!(e.within_sigmas(0.75, 3.0), "{e:?}");
        let e = mean_fidelity_mc(&SeedOperator::identity(3), 100_000, 7).unwrap();
        assert!(e.within_sigmas(1.0 / 3.0, 3.0), "{e:?}");
        assert!(matches!(
            mean_fidelity_mc(&s, 0, 1),
            Err(Error::NoSamples(_))
        ));
    }
}
