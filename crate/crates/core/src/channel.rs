//! Channels from the Bose subspace of N copies to a single qudit, and the
//! phase-conjugation fidelity they achieve.
//!
//! Kraus operators are stored in symmetric coordinates (d × d[N]); the
//! trace-preservation condition is then a plain identity on C^{d[N]}.
//! They are lifted to d × d^N only when the fidelity is evaluated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{parallel_mean, Estimate};
use crate::rng::RngStream;
use crate::symmetric::{bose_dim, sym_isometry, sym_projector, SymBasis};
use crate::tensor::eigen::hermitian_function;
use crate::tensor::haar::random_isometry;
use crate::tensor::{hermitian_eigs, partial_trace, vectorize, ComplexMatrix};

/// Residual tolerance for accepting a channel as TP and CP.
pub const CHANNEL_TOL: f64 = 1e-8;
/// Eigenvalues of a Choi matrix at or below this are dropped.
pub const KRAUS_CUTOFF: f64 = 1e-12;
/// TP residual above which extracted Kraus operators are renormalized.
pub const TP_RENORMALIZE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausChannel {
    pub d: usize,
    pub n_copies: usize,
    pub kraus: Vec<ComplexMatrix>,
}

/// Σ_μ |A_μ⟩⟩⟨⟨A_μ| with the output factor first.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub d_out: usize,
    pub d_in: usize,
    pub matrix: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelResiduals {
    /// ‖Σ A†A − I‖_F
    pub tp: f64,
    /// max(0, −λ_min(Choi))
    pub cp: f64,
}

impl KrausChannel {
    pub fn new(d: usize, n_copies: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let input = bose_dim(d, n_copies);
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus list".into()));
        }
        if let Some(bad) = kraus.iter().find(|a| a.shape() != (d, input)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {:?}, expected {d}x{input}",
                bad.shape()
            )));
        }
        Ok(Self { d, n_copies, kraus })
    }

    pub fn input_dim(&self) -> usize {
        bose_dim(self.d, self.n_copies)
    }

    pub fn choi(&self) -> ChoiMatrix {
        let n = self.d * self.input_dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for a in &self.kraus {
            m += &vectorize::vec_outer(a, a);
        }
        ChoiMatrix {
            d_out: self.d,
            d_in: self.input_dim(),
            matrix: m,
        }
    }

    /// ρ ↦ Σ A ρ A† on symmetric coordinates.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for a in &self.kraus {
            out += &a.conjugate_by(rho)?;
        }
        Ok(out)
    }

    /// Apply to an operator on the full N-copy space, compressing through V.
    pub fn apply_full(&self, rho: &ComplexMatrix, basis: &SymBasis) -> Result<ComplexMatrix> {
        let v = &basis.isometry;
        self.apply(&v.adjoint().matmul(rho)?.matmul(v)?)
    }

    pub fn residuals(&self) -> Result<ChannelResiduals> {
        validate_channel(self)
    }
}

pub fn validate_channel(ch: &KrausChannel) -> Result<ChannelResiduals> {
    let input = ch.input_dim();
    let mut sum = ComplexMatrix::zeros(input, input);
    for a in &ch.kraus {
        if a.shape() != (ch.d, input) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {:?}, expected {}x{input}",
                a.shape(),
                ch.d
            )));
        }
        sum += &a.adjoint().matmul(a)?;
    }
    let tp = sum.distance(&ComplexMatrix::identity(input));
    let cp = (-hermitian_eigs(&ch.choi().matrix)?.min()).max(0.0);
    Ok(ChannelResiduals { tp, cp })
}

fn ensure_valid(ch: &KrausChannel) -> Result<()> {
    let r = validate_channel(ch)?;
    if r.tp > CHANNEL_TOL || r.cp > CHANNEL_TOL {
        return Err(Error::InvalidChannel { tp: r.tp, cp: r.cp });
    }
    Ok(())
}

/// (N+1)/(N+d), the optimal N-copy state-estimation fidelity.
pub fn estimation_bound(d: usize, n: usize) -> f64 {
    (n + 1) as f64 / (n + d) as f64
}

/// Exact mean of Tr[|φ*⟩⟨φ*| ξ(|φ⟩⟨φ|^⊗N)] over Haar φ, evaluated as
/// (1/d[N+1]) Σ_μ ⟨⟨A*_μ| P_sym^{(N+1)} |A*_μ⟩⟩ with A_μ lifted to d × d^N.
pub fn conjugation_fidelity(ch: &KrausChannel) -> Result<f64> {
    ensure_valid(ch)?;
    let lower = sym_isometry(ch.d, ch.n_copies)?;
    let upper = sym_isometry(ch.d, ch.n_copies + 1)?;
    let v_dag = lower.isometry.adjoint();
    let w_dag = upper.isometry.adjoint();
    let mut total = 0.0;
    for a in &ch.kraus {
        let lifted = a.matmul(&v_dag)?;
        let conj_vec: Vec<Complex64> = lifted.as_slice().iter().map(|z| z.conj()).collect();
        let projected = w_dag.matvec(&conj_vec)?;
        total += projected.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(total / upper.dim() as f64)
}

/// Monte-Carlo estimate of the same mean fidelity by Haar sampling φ.
pub fn conjugation_fidelity_mc(
    ch: &KrausChannel,
    samples: usize,
    rng: &mut RngStream,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::NoSamples(
            "conjugation fidelity needs samples > 0".into(),
        ));
    }
    ensure_valid(ch)?;
    let basis = sym_isometry(ch.d, ch.n_copies)?;
    let root = rng.next_u64();
    Ok(parallel_mean(samples, root, |r| {
        let phi = r.haar_state(ch.d);
        let coords = basis.product_state_coords(&phi);
        ch.kraus
            .iter()
            .map(|a| {
                let out = a.matvec(&coords).expect("shape checked");
                // ⟨φ*|x⟩ = Σ φ_i x_i
                phi.iter()
                    .zip(&out)
                    .map(|(p, x)| p * x)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum()
    }))
}

/// Kraus operators from a Choi matrix (output factor first).
///
/// Eigenpairs with λ > [`KRAUS_CUTOFF`] become `A = √λ · unvec(v)`; if the
/// result misses trace preservation by more than [`TP_RENORMALIZE`] it is
/// corrected by A ← A S^{−1/2}, S = ΣA†A.
pub fn kraus_from_choi(choi: &ChoiMatrix, n_copies: usize) -> Result<KrausChannel> {
    let eig = hermitian_eigs(&choi.matrix)?;
    let mut kraus = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= KRAUS_CUTOFF {
            continue;
        }
        let v: Vec<Complex64> = eig
            .vectors
            .col(k)
            .iter()
            .map(|z| z * lambda.sqrt())
            .collect();
        kraus.push(vectorize::unvec(&v, choi.d_out, choi.d_in)?);
    }
    let mut ch = KrausChannel::new(choi.d_out, n_copies, kraus)?;
    let mut s = ComplexMatrix::zeros(choi.d_in, choi.d_in);
    for a in &ch.kraus {
        s += &a.adjoint().matmul(a)?;
    }
    if s.distance(&ComplexMatrix::identity(choi.d_in)) > TP_RENORMALIZE {
        let correction = hermitian_function(&s, |x| 1.0 / x.sqrt())?;
        for a in ch.kraus.iter_mut() {
            *a = a.matmul(&correction)?;
        }
    }
    Ok(ch)
}

/// Channel whose conjugated Choi operator is ((N+1)/(N+d))·P_sym^{(N+1)}.
///
/// Its Kraus operators, conjugated and vectorized, live in the Bose
/// subspace of N+1 copies, which is exactly the saturation condition of
/// the fidelity bound.
pub fn optimal_conjugator(d: usize, n: usize) -> Result<KrausChannel> {
    if d < 2 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "need d >= 2 and N >= 1, got d={d}, N={n}"
        )));
    }
    let weight = estimation_bound(d, n);
    let projector = sym_projector(d, n + 1)?;
    let lower = sym_isometry(d, n)?;
    // Compress the input factor: (I_d ⊗ V†) J* (I_d ⊗ V), then conjugate back.
    let compress = ComplexMatrix::identity(d).kron(&lower.isometry);
    let conj_choi = compress
        .adjoint()
        .matmul(&projector.scale_real(weight))?
        .matmul(&compress)?;
    let choi = ChoiMatrix {
        d_out: d,
        d_in: lower.dim(),
        matrix: conj_choi.conj(),
    };
    kraus_from_choi(&choi, n)
}

/// Random channel from a Haar isometry C^{d[N]} → C^d ⊗ C^k.
pub fn random_channel(
    d: usize,
    n: usize,
    kraus_count: usize,
    rng: &mut RngStream,
) -> Result<KrausChannel> {
    let input = bose_dim(d, n);
    if kraus_count == 0 {
        return Err(Error::InvalidArgument("kraus_count must be >= 1".into()));
    }
    if d * kraus_count < input {
        return Err(Error::InvalidArgument(format!(
            "need d*k >= d[N]: {d}*{kraus_count} < {input}"
        )));
    }
    let w = random_isometry(d * kraus_count, input, rng);
    let kraus = (0..kraus_count)
        .map(|mu| {
            let rows: Vec<usize> = (mu * d..(mu + 1) * d).collect();
            let cols: Vec<usize> = (0..input).collect();
            w.select(&rows, &cols)
        })
        .collect();
    KrausChannel::new(d, n, kraus)
}

/// Smallest Kraus count for which [`random_channel`] can build an isometry.
pub fn min_kraus_count(d: usize, n: usize) -> usize {
    bose_dim(d, n).div_ceil(d)
}

/// Trace over the output factor of a Choi matrix (should be I on inputs).
pub fn choi_input_marginal(choi: &ChoiMatrix) -> Result<ComplexMatrix> {
    partial_trace(&choi.matrix, &[choi.d_out, choi.d_in], &[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_zero_channel(d: usize, n: usize) -> KrausChannel {
        // A_j = |0><j| on the symmetric coordinates.
        let input = bose_dim(d, n);
        let kraus = (0..input)
            .map(|j| {
                let mut a = ComplexMatrix::zeros(d, input);
                a[(0, j)] = Complex64::new(1.0, 0.0);
                a
            })
            .collect();
        KrausChannel::new(d, n, kraus).unwrap()
    }

    fn identity_channel(d: usize) -> KrausChannel {
        KrausChannel::new(d, 1, vec![ComplexMatrix::identity(d)]).unwrap()
    }

    #[test]
    fn identity_channel_residuals() {
        let r = validate_channel(&identity_channel(2)).unwrap();
        assert_eq!((r.tp, r.cp), (0.0, 0.0));
    }

    #[test]
    fn isometry_row_selection_is_tp() {
        let basis = sym_isometry(2, 2).unwrap();
        // A single Kraus operator V: C^3 -> C^4 is not d x d[N]; split it.
        let v = &basis.isometry;
        let kraus = vec![v.select(&[0, 1], &[0, 1, 2]), v.select(&[2, 3], &[0, 1, 2])];
        let ch = KrausChannel::new(2, 2, kraus).unwrap();
        assert!(validate_channel(&ch).unwrap().tp <= 1e-12);
    }

    #[test]
    fn constant_output_fidelity_is_one_over_d() {
        for d in [2, 3, 4] {
            let f = conjugation_fidelity(&constant_zero_channel(d, 1)).unwrap();
            assert!((f - 1.0 / d as f64).abs() < 1e-12);
        }
        assert!(
            (conjugation_fidelity(&constant_zero_channel(3, 2)).unwrap() - 1.0 / 3.0).abs() < 1e-12
        );
    }

    #[test]
    fn identity_channel_fidelity() {
        // ∫|<φ*|φ>|² = d·E|φ_0|⁴ = 2/(d+1)
        for d in [2, 3, 5] {
            let f = conjugation_fidelity(&identity_channel(d)).unwrap();
            assert!((f - 2.0 / (d as f64 + 1.0)).abs() < 1e-12, "d={d}: {f}");
        }
    }

    #[test]
    fn bound_values() {
        assert!((estimation_bound(2, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((estimation_bound(2, 2) - 0.75).abs() < 1e-15);
        assert!((estimation_bound(5, 1) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn optimal_qubit_conjugator_acts_as_expected() {
        let ch = optimal_conjugator(2, 1).unwrap();
        let out = ch.apply(&ComplexMatrix::unit(2, 0, 0)).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::diag_real(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-12);
        // ρ ↦ (I + ρᵀ)/3 on a complex state
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [Complex64::new(s, 0.0), Complex64::new(0.0, s)];
        let rho = ComplexMatrix::outer(&psi, &psi);
        let want = (&ComplexMatrix::identity(2) + &rho.transpose()).scale_real(1.0 / 3.0);
        assert!(ch.apply(&rho).unwrap().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn optimal_conjugator_saturates() {
        for (d, n) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
            let ch = optimal_conjugator(d, n).unwrap();
            let r = validate_channel(&ch).unwrap();
            assert!(r.tp <= 1e-10 && r.cp <= 1e-10);
            let f = conjugation_fidelity(&ch).unwrap();
            assert!(
                (f - estimation_bound(d, n)).abs() <= 1e-9,
                "d={d} n={n}: {f}"
            );
        }
    }

    #[test]
    fn random_channels_are_valid_and_bounded() {
        let mut rng = RngStream::new(17);
        for _ in 0..20 {
            let ch = random_channel(2, 1, 3, &mut rng).unwrap();
            let r = validate_channel(&ch).unwrap();
            assert!(r.tp <= 1e-10 && r.cp <= 1e-10);
            assert!(conjugation_fidelity(&ch).unwrap() <= estimation_bound(2, 1) + 1e-9);
        }
    }

    #[test]
    fn single_kraus_is_unitary_with_rank_one_choi() {
        let mut rng = RngStream::new(18);
        let ch = random_channel(3, 1, 1, &mut rng).unwrap();
        let eig = hermitian_eigs(&ch.choi().matrix).unwrap();
        let rank = eig.values.iter().filter(|&&l| l > 1e-10).count();
        assert_eq!(rank, 1);
    }

    #[test]
    fn choi_round_trip_preserves_fidelity() {
        let mut rng = RngStream::new(19);
        for (d, n, k) in [(2, 1, 2), (3, 1, 4), (2, 2, 3)] {
            let ch = random_channel(d, n, k, &mut rng).unwrap();
            let back = kraus_from_choi(&ch.choi(), n).unwrap();
            let f0 = conjugation_fidelity(&ch).unwrap();
            let f1 = conjugation_fidelity(&back).unwrap();
            assert!((f0 - f1).abs() <= 1e-10);
            let marginal = choi_input_marginal(&back.choi()).unwrap();
            // Tr_out |A⟩⟩⟨⟨A| = Aᵀ A*, the conjugate of Σ A†A.
            assert!(marginal.max_abs_diff(&ComplexMatrix::identity(bose_dim(d, n))) < 1e-10);
        }
    }

    #[test]
    fn error_paths() {
        let mut rng = RngStream::new(20);
        assert!(random_channel(2, 2, 1, &mut rng).is_err());
        assert!(random_channel(2, 1, 0, &mut rng).is_err());
        assert!(KrausChannel::new(2, 1, vec![ComplexMatrix::identity(3)]).is_err());
        let bad = KrausChannel {
            d: 2,
            n_copies: 1,
            kraus: vec![ComplexMatrix::identity(2).scale_real(2.0)],
        };
        assert!(matches!(
            conjugation_fidelity(&bad),
            Err(Error::InvalidChannel { .. })
        ));
        assert!(conjugation_fidelity_mc(&identity_channel(2), 0, &mut rng).is_err());
    }

    #[test]
    fn mc_matches_exact_for_identity_channel() {
        let mut rng = RngStream::new(22);
        let est = conjugation_fidelity_mc(&identity_channel(2), 50_000, &mut rng).unwrap();
        assert!(est.within_sigmas(2.0 / 3.0, 4.0), "{est:?}");
    }
}
