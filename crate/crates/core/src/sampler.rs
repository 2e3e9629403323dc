//! Rejection sampling of covariant POVM outcomes.
//!
//! Given an input pair, a Haar proposal u is accepted with probability
//! p(u)/λ, where p(u) is the outcome density relative to Haar measure and
//! λ = λ_max of the case's effect seed bounds it. The guess for outcome u
//! is u|0⟩.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{Moments, CHUNK};
use crate::povm::seed::{MeasurementCase, SeedOperator};
use crate::povm::twirl::trace_conditions;
use crate::rng::RngStream;
use crate::tensor::{eigen, haar_unitary, kron_vec, ComplexMatrix};

/// Completeness tolerance (relative to d²) required before sampling.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Proposals allowed per outcome in [`Sampler::sample_outcome`].
pub const MAX_PROPOSALS: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct Sampler {
    pub d: usize,
    pub case: MeasurementCase,
    /// â₀ (parallel) or its partial transpose (conjugate).
    pub effect: ComplexMatrix,
    pub envelope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub d: usize,
    pub case: MeasurementCase,
    pub requested: u64,
    pub accepted: u64,
    pub empirical_fidelity: f64,
    pub stderr: f64,
    pub acceptance_rate: f64,
    pub envelope: f64,
}

impl SimulationResult {
    /// Binomial standard error of the acceptance rate.
    pub fn acceptance_stderr(&self) -> f64 {
        let p = self.acceptance_rate;
        (p * (1.0 - p) / self.requested.max(1) as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    requested: u64,
    scores: Moments,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            requested: self.requested + other.requested,
            scores: self.scores.merge(other.scores),
        }
    }
}

/// Input pair |φ⟩|φ⟩ or |φ⟩|φ*⟩.
pub fn input_pair(phi: &[Complex64], case: MeasurementCase) -> Vec<Complex64> {
    match case {
        MeasurementCase::Parallel => kron_vec(phi, phi),
        MeasurementCase::Conjugate => {
            let c: Vec<_> = phi.iter().map(|z| z.conj()).collect();
            kron_vec(phi, &c)
        }
    }
}

impl Sampler {
    pub fn new(s: &SeedOperator, case: MeasurementCase) -> Result<Self> {
        let d = s.d;
        let (trace, swap) = trace_conditions(&s.matrix, d)?;
        let scale = (d * d) as f64;
        if trace > COMPLETENESS_TOL * scale || swap > COMPLETENESS_TOL * scale {
            return Err(Error::Incomplete { trace, swap });
        }
        let effect = s.effect_seed(case);
        let eig = eigen::hermitian_eigs(&effect)?;
        if eig.min() < -1e-8 * eig.max().abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "{case} effect seed is not positive (min eigenvalue {:.3e})",
                eig.min()
            )));
        }
        Ok(Self {
            d,
            case,
            effect,
            envelope: eig.max(),
        })
    }

    /// Outcome density p(u) for input φ: Tr[ρ · effect(u)].
    ///
    /// For the effect (u⊗u) X (u⊗u)† this is ⟨w|X|w⟩ with w = u†φ ⊗ u†φ;
    /// for its partial transpose on |φ⟩|φ*⟩ it is ⟨v|X^T₂|v⟩ with
    /// v = u†φ ⊗ (u†φ)*.
    pub fn density(&self, u: &ComplexMatrix, phi: &[Complex64]) -> Result<f64> {
        let a = u.adjoint().matvec(phi)?;
        let v = match self.case {
            MeasurementCase::Parallel => kron_vec(&a, &a),
            MeasurementCase::Conjugate => {
                let c: Vec<_> = a.iter().map(|z| z.conj()).collect();
                kron_vec(&a, &c)
            }
        };
        Ok(self.effect.expectation(&v)?.re)
    }

    /// Draw u with density p(u) relative to Haar; also returns the number
    /// of proposals used.
    pub fn sample_outcome(
        &self,
        phi: &[Complex64],
        rng: &mut RngStream,
    ) -> Result<(ComplexMatrix, usize)> {
        for k in 1..=MAX_PROPOSALS {
            let u = haar_unitary(self.d, rng);
            if rng.next_f64() * self.envelope < self.density(&u, phi)? {
                return Ok((u, k));
            }
        }
        Err(Error::NoSamples(format!(
            "no acceptance in {MAX_PROPOSALS} proposals"
        )))
    }

    /// One proposal with a fresh Haar input; the score |⟨0|u†|φ⟩|² if accepted.
    fn propose(&self, rng: &mut RngStream) -> Option<f64> {
        let phi = rng.haar_state(self.d);
        let u = haar_unitary(self.d, rng);
        let p = self
            .density(&u, &phi)
            .expect("shapes fixed at construction");
        (rng.next_f64() * self.envelope < p).then(|| {
            let overlap: Complex64 = (0..self.d).map(|i| u[(i, 0)].conj() * phi[i]).sum();
            overlap.norm_sqr()
        })
    }

    fn run_chunks(&self, first: usize, count: usize, proposals: usize, seed: u64) -> Tally {
        (first..first + count)
            .into_par_iter()
            .map(|k| {
                let mut rng = RngStream::split(seed, k as u64);
                let len = CHUNK.min(proposals - k * CHUNK);
                let mut t = Tally {
                    requested: len as u64,
                    ..Tally::default()
                };
                for _ in 0..len {
                    if let Some(score) = self.propose(&mut rng) {
                        t.scores.push(score);
                    }
                }
                t
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::default(), Tally::merge)
    }

    fn result(&self, t: Tally) -> Result<SimulationResult> {
        if t.scores.count == 0 {
            return Err(Error::NoSamples(format!(
                "0 of {} proposals accepted",
                t.requested
            )));
        }
        let e = t.scores.estimate();
        Ok(SimulationResult {
            d: self.d,
            case: self.case,
            requested: t.requested,
            accepted: t.scores.count,
            empirical_fidelity: e.mean,
            stderr: e.stderr,
            acceptance_rate: t.scores.count as f64 / t.requested as f64,
            envelope: self.envelope,
        })
    }

    /// Run exactly `proposals` proposals.
    pub fn simulate(&self, proposals: usize, seed: u64) -> Result<SimulationResult> {
        if proposals == 0 {
            return Err(Error::NoSamples("simulate needs samples > 0".into()));
        }
        let chunks = proposals.div_ceil(CHUNK);
        self.result(self.run_chunks(0, chunks, proposals, seed))
    }

    /// Propose in whole chunks until at least `accepted` outcomes are kept.
    pub fn simulate_accepted(&self, accepted: usize, seed: u64) -> Result<SimulationResult> {
        if accepted == 0 {
            return Err(Error::NoSamples("simulate needs samples > 0".into()));
        }
        let mut total = Tally::default();
        let mut next = 0usize;
        while (total.scores.count as usize) < accepted {
            let missing = accepted - total.scores.count as usize;
            let batch = ((missing as f64 * self.envelope * 1.1) as usize)
                .div_ceil(CHUNK)
                .max(1);
            if (next + batch) * CHUNK > MAX_PROPOSALS * accepted.max(1) {
                return Err(Error::NoSamples("acceptance too low".into()));
            }
            total = total.merge(self.run_chunks(next, batch, (next + batch) * CHUNK, seed));
            next += batch;
        }
        self.result(total)
    }
}

pub fn simulate(
    s: &SeedOperator,
    case: MeasurementCase,
    samples: usize,
    seed: u64,
) -> Result<SimulationResult> {
    Sampler::new(s, case)?.simulate(samples, seed)
}

pub fn sample_outcome(
    s: &SeedOperator,
    case: MeasurementCase,
    phi: &[Complex64],
    rng: &mut RngStream,
) -> Result<ComplexMatrix> {
    Ok(Sampler::new(s, case)?.sample_outcome(phi, rng)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::{f_local, mean_fidelity};
    use crate::povm::reference::{reference_operator, ReferenceOperator};
    use crate::povm::seed::{build_seed, SeedParams};

    #[test]
    fn identity_seed_accepts_everything() {
        for case in MeasurementCase::ALL {
            let s = Sampler::new(&SeedOperator::identity(3), case).unwrap();
            assert!((s.envelope - 1.0).abs() < 1e-12);
            let r = s.simulate(2000, 5).unwrap();
            assert_eq!(r.accepted, r.requested);
        }
    }

    #[test]
    fn case_one_envelope_is_three() {
        let s = reference_operator(ReferenceOperator::CaseOneOpt, 2).unwrap();
        let sampler = Sampler::new(&s, MeasurementCase::Parallel).unwrap();
        assert!((sampler.envelope - 3.0).abs() < 1e-10);
        let r = sampler.simulate(10_000, 11).unwrap();
        assert!((r.acceptance_rate - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn conjugate_density_is_dual_to_parallel() {
        let mut rng = RngStream::new(80);
        let s = reference_operator(ReferenceOperator::PsiLocal, 3).unwrap();
        let conj = Sampler::new(&s, MeasurementCase::Conjugate).unwrap();
        for _ in 0..50 {
            let phi = rng.haar_state(3);
            let u = haar_unitary(3, &mut rng);
            let p = conj.density(&u, &phi).unwrap();
            assert!(p >= -1e-10);
            // ⟨φφ|(u⊗u) X (u⊗u)†|φφ⟩
            let a = u.adjoint().matvec(&phi).unwrap();
            let q = s.matrix.expectation(&kron_vec(&a, &a)).unwrap().re;
            assert!((p - q).abs() < 1e-12);
            // explicit Tr[ρ_conj · PT(a_u)]
            let uu = u.kron(&u);
            let a_u =
                crate::tensor::partial_transpose_second(&uu.conjugate_by(&s.matrix).unwrap(), 3)
                    .unwrap();
            let r = a_u
                .expectation(&input_pair(&phi, MeasurementCase::Conjugate))
                .unwrap()
                .re;
            assert!((p - r).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_incomplete_or_negative_seeds() {
        let perp = reference_operator(ReferenceOperator::PsiPerp, 2).unwrap();
        assert!(matches!(
            Sampler::new(&perp, MeasurementCase::Conjugate),
            Err(Error::Incomplete { .. })
        ));
        let s = reference_operator(ReferenceOperator::PsiLocal, 2).unwrap();
        assert!(Sampler::new(&s, MeasurementCase::Parallel).is_err());
    }

    #[test]
    fn sample_outcome_returns_unitary() {
        let mut rng = RngStream::new(81);
        let s = build_seed(&SeedParams::case_one_optimum(2)).unwrap();
        let phi = rng.haar_state(2);
        let u = sample_outcome(&s, MeasurementCase::Parallel, &phi, &mut rng).unwrap();
        let id = u.adjoint().matmul(&u).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn psi_local_simulation() {
        let s = reference_operator(ReferenceOperator::PsiLocal, 2).unwrap();
        let r = Sampler::new(&s, MeasurementCase::Conjugate)
            .unwrap()
            .simulate_accepted(10_000, 0x5EED_C0DE)
            .unwrap();
        assert!(r.accepted >= 10_000);
        assert!(
            (r.empirical_fidelity - f_local(2)).abs() <= 3.0 * r.stderr,
            "{r:?}"
        );
        assert!((mean_fidelity(&s).unwrap() - f_local(2)).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let s = reference_operator(ReferenceOperator::CaseOneOpt, 2).unwrap();
        let a = simulate(&s, MeasurementCase::Parallel, 9000, 3).unwrap();
        let b = simulate(&s, MeasurementCase::Parallel, 9000, 3).unwrap();
        assert_eq!(a, b);
    }
}
