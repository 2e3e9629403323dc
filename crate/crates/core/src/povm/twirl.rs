//! Completeness of the covariant family and stabilizer covariance.
//!
//! The twirl ∫du (u⊗u) X (u⊗u)† lies in span{I, SWAP}; writing it as
//! aI + bS and matching Tr X and Tr[XS] fixes a and b. The covariant family
//! integrates to the identity exactly when Tr X = d² and Tr[XS] = d.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::seed::SeedOperator;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tensor::{haar_unitary, swap_operator, ComplexMatrix};

/// Trials used by the Monte-Carlo twirl in [`completeness_residual`].
pub const MC_TWIRL_TRIALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletenessResiduals {
    /// |Tr X − d²|
    pub trace: f64,
    /// |Tr[X·SWAP] − d|
    pub swap: f64,
    /// max-entry distance of the Monte-Carlo twirl from I
    pub mc: f64,
}

impl CompletenessResiduals {
    pub fn exact_max(&self) -> f64 {
        self.trace.max(self.swap)
    }
}

/// (|Tr X − d²|, |Tr[XS] − d|).
pub fn trace_conditions(x: &ComplexMatrix, d: usize) -> Result<(f64, f64)> {
    let s = swap_operator(d);
    let tr = x.trace();
    let trs = x.trace_product(&s)?;
    let df = d as f64;
    Ok(((tr - df * df).norm(), (trs - df).norm()))
}

/// Exact twirl aI + bS.
pub fn exact_twirl(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    let s = swap_operator(d);
    let tr = x.trace();
    let trs = x.trace_product(&s)?;
    let df = d as f64;
    let denom = df * (df * df - 1.0);
    let a = (tr * df - trs) / denom;
    let b = (trs * df - tr) / denom;
    Ok(&ComplexMatrix::identity(d * d).scale(a) + &s.scale(b))
}

/// Monte-Carlo twirl over `trials` Haar unitaries.
pub fn twirl_mc(
    x: &ComplexMatrix,
    d: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<ComplexMatrix> {
    if trials == 0 {
        return Err(Error::NoSamples("twirl needs trials > 0".into()));
    }
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for _ in 0..trials {
        let u = haar_unitary(d, rng);
        acc += &u.kron(&u).conjugate_by(x)?;
    }
    Ok(acc.scale_real(1.0 / trials as f64))
}

pub fn completeness_residual(
    s: &SeedOperator,
    trials: usize,
    rng: &mut RngStream,
) -> Result<CompletenessResiduals> {
    let (trace, swap) = trace_conditions(&s.matrix, s.d)?;
    let twirled = twirl_mc(&s.matrix, s.d, trials, rng)?;
    let mc = twirled.max_abs_diff(&ComplexMatrix::identity(s.d * s.d));
    Ok(CompletenessResiduals { trace, swap, mc })
}

/// Stabilizer unitary diag(e^{iθ}) ⊕ U' with U' Haar on d−1 levels and
/// θ = −arg det U', so that det u = 1.
pub fn stabilizer_unitary(d: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument("stabilizer needs d >= 2".into()));
    }
    let inner = haar_unitary(d - 1, rng);
    let theta = -inner.determinant()?.arg();
    let phase = ComplexMatrix::from_vec(1, 1, vec![Complex64::from_polar(1.0, theta)])?;
    Ok(phase.direct_sum(&inner))
}

/// max over trials of ‖[X, u_g⊗u_g]‖_F.
pub fn stabilizer_covariance_residual(
    x: &ComplexMatrix,
    d: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if x.shape() != (d * d, d * d) {
        return Err(Error::DimensionMismatch(format!(
            "operator {:?} for d = {d}",
            x.shape()
        )));
    }
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let u = stabilizer_unitary(d, rng)?;
        let uu = u.kron(&u);
        worst = worst.max(x.commutator(&uu)?.frobenius_norm());
    }
    Ok(worst)
}
