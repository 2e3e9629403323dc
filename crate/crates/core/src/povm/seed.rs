//! The four-parameter family of covariant seed operators.
//!
//! ```text
//! â₀ = I + α(T3⊗I + I⊗T3) + β T3⊗T3
//!        + γ Σ_m (T1_{0m}⊗T1_{0m} + T2_{0m}⊗T2_{0m})
//!        + δ Σ_{m<n} (T1_{mn}⊗T1_{mn} + T2_{mn}⊗T2_{mn} + w T3_{mn}⊗T3_{mn})
//! ```
//!
//! with the δ-sum over 1 ≤ m < n ≤ d−1. The Cartan weight `w` must be
//! 2/(d−1) for the δ block to equal 2·SWAP − (2/(d−1))·I on the last d−1
//! levels, the only combination invariant under the stabilizer of |00⟩.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::generators::build_generators;
use crate::error::{Error, Result};
use crate::tensor::{eigen, partial_transpose_second, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementCase {
    /// Input |φ⟩|φ⟩; the effects are u⊗u â₀ (u⊗u)†.
    Parallel,
    /// Input |φ⟩|φ*⟩; the effects are the partial transposes of those.
    Conjugate,
}

impl MeasurementCase {
    pub const ALL: [MeasurementCase; 2] = [MeasurementCase::Parallel, MeasurementCase::Conjugate];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasurementCase::Parallel => "parallel",
            MeasurementCase::Conjugate => "conjugate",
        }
    }
}

impl fmt::Display for MeasurementCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parallel" => Ok(MeasurementCase::Parallel),
            "conjugate" => Ok(MeasurementCase::Conjugate),
            other => Err(Error::InvalidArgument(format!(
                "unknown case `{other}` (expected parallel|conjugate)"
            ))),
        }
    }
}

/// Weight of the T3_{mn}⊗T3_{mn} terms in the δ-sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CartanWeight {
    /// 2/(d−1): stabilizer-covariant, used everywhere by default.
    #[default]
    Casimir,
    /// 2/(d−2): kept only to show that it breaks covariance.
    Printed,
}

impl CartanWeight {
    pub fn value(&self, d: usize) -> f64 {
        match self {
            CartanWeight::Casimir => 2.0 / (d as f64 - 1.0),
            CartanWeight::Printed => 2.0 / (d as f64 - 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SeedParams {
    pub fn new(d: usize, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            d,
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(d, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidArgument(format!(
                "seed needs d >= 2, got {}",
                self.d
            )));
        }
        if self.d == 2 && self.delta != 0.0 {
            return Err(Error::InvalidArgument(
                "delta must be 0 for d = 2 (the delta-sum is empty)".into(),
            ));
        }
        if !self.as_array().iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite seed parameter".into()));
        }
        Ok(())
    }

    /// Reconciled case-one optimum: α = −3/4, β = 1/2, γ = −d/8, δ = 0.
    pub fn case_one_optimum(d: usize) -> Self {
        Self::new(d, -0.75, 0.5, -(d as f64) / 8.0, 0.0)
    }

    /// Closed-form parameters of the rank-one local extremum of the
    /// conjugate case. δ is zeroed at d = 2 where its sum is empty.
    pub fn local_extremum(d: usize) -> Self {
        let df = d as f64;
        let s = (1.0 + df).sqrt();
        let alpha = 1.0 / (1.0 + s).powi(2) - 1.0;
        let beta = (4.0 + (df - 2.0) * (df * df + 2.0 * s)) / (df * df * (df - 1.0));
        let gamma = (2.0 - df * df + (df - 2.0) * s) / (2.0 * df);
        let delta = if d == 2 {
            0.0
        } else {
            (s - 1.0).powi(2) / (2.0 * df)
        };
        Self::new(d, alpha, beta, gamma, delta)
    }

    /// Tuple quoted alongside the conjugate-case global maximum, with
    /// A± = 2d ± √(2d(d+1)). Documentation only: it does not satisfy the
    /// completeness conditions.
    pub fn perp_tuple(d: usize) -> Self {
        let df = d as f64;
        let root = (2.0 * df * (df + 1.0)).sqrt();
        let (a_plus, a_minus) = (2.0 * df + root, 2.0 * df - root);
        Self::new(
            d,
            (a_minus - 4.0) / (4.0 * (df - 1.0)),
            ((df - 1.0) * a_plus + 4.0) / (4.0 * (df - 1.0).powi(2)),
            -df / 4.0,
            if d == 2 {
                0.0
            } else {
                a_minus / (8.0 * (df - 1.0))
            },
        )
    }
}

/// The five fixed operators whose combination gives â₀.
#[derive(Debug, Clone)]
pub struct SeedTerms {
    pub d: usize,
    pub weight: CartanWeight,
    pub identity: ComplexMatrix,
    pub alpha: ComplexMatrix,
    pub beta: ComplexMatrix,
    pub gamma: ComplexMatrix,
    pub delta: ComplexMatrix,
}

impl SeedTerms {
    pub fn new(d: usize, weight: CartanWeight) -> Self {
        let g = build_generators(d);
        let id = ComplexMatrix::identity(d);
        let n = d * d;
        let alpha = &g.t3.kron(&id) + &id.kron(&g.t3);
        let beta = g.t3.kron(&g.t3);
        let mut gamma = ComplexMatrix::zeros(n, n);
        for &p in &g.zero_pairs {
            gamma += &g.t1(p).kron(&g.t1(p));
            gamma += &g.t2(p).kron(&g.t2(p));
        }
        let mut delta = ComplexMatrix::zeros(n, n);
        if d > 2 {
            let w = weight.value(d);
            for &p in &g.inner_pairs {
                delta += &g.t1(p).kron(&g.t1(p));
                delta += &g.t2(p).kron(&g.t2(p));
                delta += &g.t3_pair(p).kron(&g.t3_pair(p)).scale_real(w);
            }
        }
        Self {
            d,
            weight,
            identity: ComplexMatrix::identity(n),
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn parameter_terms(&self) -> [&ComplexMatrix; 4] {
        [&self.alpha, &self.beta, &self.gamma, &self.delta]
    }

    pub fn combine(&self, p: &SeedParams) -> ComplexMatrix {
        let mut x = self.identity.clone();
        for (term, coeff) in self.parameter_terms().into_iter().zip(p.as_array()) {
            if coeff != 0.0 {
                x += &term.scale_real(coeff);
            }
        }
        x
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedOperator {
    pub d: usize,
    pub matrix: ComplexMatrix,
    /// Family parameters, when the operator lies in the family.
    pub params: Option<SeedParams>,
}

impl SeedOperator {
    /// Wrap an arbitrary Hermitian d²×d² operator.
    pub fn from_matrix(d: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (d * d, d * d) {
            return Err(Error::DimensionMismatch(format!(
                "seed of shape {:?} for d = {d}",
                matrix.shape()
            )));
        }
        let err = matrix.hermiticity_error();
        if err > 1e-12 * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian(err));
        }
        Ok(Self {
            d,
            matrix,
            params: None,
        })
    }

    pub fn identity(d: usize) -> Self {
        build_seed(&SeedParams::identity(d)).expect("identity parameters are valid")
    }

    /// The operator whose positivity matters for `case`.
    pub fn effect_seed(&self, case: MeasurementCase) -> ComplexMatrix {
        match case {
            MeasurementCase::Parallel => self.matrix.clone(),
            MeasurementCase::Conjugate => {
                partial_transpose_second(&self.matrix, self.d).expect("square d^2 seed")
            }
        }
    }
}

pub fn build_seed(p: &SeedParams) -> Result<SeedOperator> {
    build_seed_with_weight(p, CartanWeight::Casimir)
}

pub fn build_seed_with_weight(p: &SeedParams, weight: CartanWeight) -> Result<SeedOperator> {
    p.validate()?;
    let terms = SeedTerms::new(p.d, weight);
    Ok(SeedOperator {
        d: p.d,
        matrix: terms.combine(p),
        params: Some(*p),
    })
}

/// Recover family parameters from matrix elements; `None` if the operator
/// is not in the (Casimir-weight) family to within `tol` entrywise.
pub fn solve_params(x: &ComplexMatrix, d: usize, tol: f64) -> Option<SeedParams> {
    if d < 2 || x.shape() != (d * d, d * d) {
        return None;
    }
    let idx = |a: usize, b: usize| a * d + b;
    let df = d as f64;
    let gamma = x[(idx(0, 1), idx(1, 0))].re / 2.0;
    let delta = if d > 2 {
        x[(idx(1, 2), idx(2, 1))].re / 2.0
    } else {
        0.0
    };
    // ⟨00|â|00⟩ = 1 + 2α(1−d) + β(1−d)², ⟨01|â|01⟩ = 1 + α(2−d) + β(1−d)
    let (a1, b1, r1) = (2.0 * (1.0 - df), (1.0 - df).powi(2), x[(0, 0)].re - 1.0);
    let (a2, b2, r2) = (2.0 - df, 1.0 - df, x[(idx(0, 1), idx(0, 1))].re - 1.0);
    let det = a1 * b2 - a2 * b1;
    let alpha = (r1 * b2 - r2 * b1) / det;
    let beta = (a1 * r2 - a2 * r1) / det;
    let p = SeedParams::new(d, alpha, beta, gamma, delta);
    let rebuilt = build_seed(&p).ok()?;
    (rebuilt.matrix.max_abs_diff(x) <= tol).then_some(p)
}

/// λ_min of â₀ (parallel) or of its partial transpose (conjugate).
pub fn positivity_margin(s: &SeedOperator, case: MeasurementCase) -> Result<f64> {
    eigen::min_eigenvalue(&s.effect_seed(case))
}

/// Slack (lhs − rhs) of the four parallel-case inequalities, under the
/// convention that γ multiplies the literal generator sum.
pub fn parallel_inequality_slacks(p: &SeedParams) -> [f64; 4] {
    let d = p.d as f64;
    let SeedParams {
        alpha: a,
        beta: b,
        gamma: g,
        delta: dl,
        ..
    } = *p;
    let base = 1.0 + 2.0 * a + b;
    [
        1.0 - 2.0 * a * (d - 1.0) + b * (d - 1.0).powi(2),
        base + 2.0 * dl * (d - 2.0) / (d - 1.0),
        base - d * (a + b) - (2.0 * g).abs(),
        base - 2.0 * dl / (d - 1.0) - (2.0 * dl).abs(),
    ]
}

/// Slack of the four conjugate-case inequalities (the last is quadratic).
pub fn conjugate_inequality_slacks(p: &SeedParams) -> [f64; 4] {
    let d = p.d as f64;
    let SeedParams {
        alpha: a,
        beta: b,
        gamma: g,
        delta: dl,
        ..
    } = *p;
    let base = 1.0 + 2.0 * a + b;
    let upper = base + 2.0 * dl * (d - 2.0) / (d - 1.0);
    [
        1.0 - a * (d - 2.0) - b * (d - 1.0),
        base - 2.0 * dl / (d - 1.0),
        upper - (2.0 * dl).abs(),
        upper * (1.0 - 2.0 * a * (d - 1.0) + b * (d - 1.0).powi(2)) - (2.0 * g).powi(2),
    ]
}
