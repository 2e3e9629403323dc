//! Maximization of the mean fidelity over the seed family.
//!
//! Trace completeness holds for every family member (all parameter terms
//! are traceless), and Tr[â₀ SWAP] = d is used to eliminate β, leaving
//! (α, γ, δ) free (δ ≡ 0 at d = 2). The objective is linear and the feasible
//! set {λ_min(effect seed) ≥ 0} is convex and contains the identity seed in
//! its interior. Each restart runs Nelder–Mead on
//! F − κ·min(0, λ_min)² with κ escalated between rounds, then pulls the
//! point back onto the boundary by bisection along the ray from the
//! identity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{f_local, f_parallel, f_perp, mean_fidelity, FidelityFunctional};
use crate::povm::seed::{
    build_seed, conjugate_inequality_slacks, parallel_inequality_slacks, positivity_margin,
    CartanWeight, MeasurementCase, SeedParams, SeedTerms,
};
use crate::povm::twirl::trace_conditions;
use crate::rng::RngStream;
use crate::tensor::{eigen, partial_transpose_second, swap_operator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub penalty_rounds: usize,
    /// Stop when the simplex diameter falls below this.
    pub simplex_tol: f64,
    /// Stop when the spread of objective values falls below this.
    pub fidelity_tol: f64,
    pub max_iterations: usize,
    /// Bisection steps of the boundary polish.
    pub polish_steps: usize,
    /// Fidelities within this of the best are ties, broken by smallest norm.
    pub tie_tol: f64,
    pub seed: u64,
    pub freeze_gamma: bool,
    pub freeze_delta: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            penalty_rounds: 5,
            simplex_tol: 1e-10,
            fidelity_tol: 1e-9,
            max_iterations: 4000,
            polish_steps: 60,
            tie_tol: 1e-9,
            seed: 0x5EED_C0DE,
            freeze_gamma: false,
            freeze_delta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub d: usize,
    pub case: MeasurementCase,
    pub best_params: SeedParams,
    pub best_fidelity: f64,
    pub min_eig: f64,
    /// (|Tr â₀ − d²|, |Tr[â₀ SWAP] − d|)
    pub completeness_residuals: (f64, f64),
    pub restarts_used: usize,
    /// Running best fidelity after each restart.
    pub history: Vec<f64>,
    pub f_parallel: f64,
    pub f_local: f64,
    pub f_perp: f64,
}

impl OptimizationResult {
    pub fn distance_to_local(&self) -> f64 {
        self.best_fidelity - self.f_local
    }

    pub fn distance_to_perp(&self) -> f64 {
        self.best_fidelity - self.f_perp
    }
}

/// The reduced problem on the free coordinates.
struct Problem {
    d: usize,
    case: MeasurementCase,
    terms: SeedTerms,
    functional: FidelityFunctional,
    /// Tr[term · SWAP] for (α, β, γ, δ).
    swap_weights: [f64; 4],
    /// Indices into (α, γ, δ) that are free.
    free: Vec<usize>,
}

impl Problem {
    fn new(d: usize, case: MeasurementCase, config: &OptimizerConfig) -> Result<Self> {
        let terms = SeedTerms::new(d, CartanWeight::Casimir);
        let s = swap_operator(d);
        let mut swap_weights = [0.0; 4];
        for (w, t) in swap_weights.iter_mut().zip(terms.parameter_terms()) {
            *w = t.trace_product(&s)?.re;
        }
        let mut free = vec![0];
        if !config.freeze_gamma {
            free.push(1);
        }
        if d > 2 && !config.freeze_delta {
            free.push(2);
        }
        Ok(Self {
            d,
            case,
            terms,
            functional: FidelityFunctional::new(d)?,
            swap_weights,
            free,
        })
    }

    fn params(&self, x: &[f64]) -> SeedParams {
        let mut agd = [0.0; 3];
        for (&i, &v) in self.free.iter().zip(x) {
            agd[i] = v;
        }
        let [a, g, dl] = agd;
        let w = &self.swap_weights;
        let beta = -(a * w[0] + g * w[2] + dl * w[3]) / w[1];
        SeedParams::new(self.d, a, beta, g, dl)
    }

    fn fidelity(&self, x: &[f64]) -> f64 {
        self.functional.evaluate(&self.params(x))
    }

    fn min_eig(&self, x: &[f64]) -> f64 {
        let m = self.terms.combine(&self.params(x));
        let effect = match self.case {
            MeasurementCase::Parallel => m,
            MeasurementCase::Conjugate => {
                partial_transpose_second(&m, self.d).expect("square seed")
            }
        };
        eigen::min_eigenvalue(&effect).unwrap_or(f64::NEG_INFINITY)
    }

    fn penalized(&self, x: &[f64], kappa: f64) -> f64 {
        let m = self.min_eig(x).min(0.0);
        self.fidelity(x) - kappa * m * m
    }

    /// Largest t ∈ [0, 1] with t·x feasible (the identity seed is t = 0).
    fn pull_back(&self, x: &[f64], steps: usize) -> Vec<f64> {
        if self.min_eig(x) >= 0.0 {
            return x.to_vec();
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..steps {
            let mid = 0.5 * (lo + hi);
            let y: Vec<f64> = x.iter().map(|v| v * mid).collect();
            if self.min_eig(&y) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        x.iter().map(|v| v * lo).collect()
    }
}

/// Maximize `f` from `start` by Nelder–Mead.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    simplex_tol: f64,
    value_tol: f64,
    max_iterations: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=n)
        .map(|i| {
            let mut p = start.to_vec();
            if i > 0 {
                p[i - 1] += step;
            }
            let v = f(&p);
            (p, v)
        })
        .collect();
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let spread = simplex[0].1 - simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < simplex_tol || (spread.abs() < value_tol && diameter < value_tol.sqrt()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        if fr > simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            simplex[n] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr > worst.1 {
                lerp(&centroid, &worst.0, -0.5)
            } else {
                lerp(&centroid, &worst.0, 0.5)
            };
            let fc = f(&contracted);
            if fc > worst.1.max(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    *p = lerp(&best, p, 0.5);
                    *v = f(p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex.swap_remove(0)
}

fn run_restart(problem: &Problem, config: &OptimizerConfig, k: usize) -> (Vec<f64>, f64) {
    let mut rng = RngStream::split(config.seed, k as u64);
    let mut x: Vec<f64> = problem.free.iter().map(|_| 0.5 * rng.normal()).collect();
    x = problem.pull_back(&x, config.polish_steps);
    let mut kappa = config.initial_penalty;
    let mut step = 0.25;
    for _ in 0..config.penalty_rounds {
        x = nelder_mead(
            |y| problem.penalized(y, kappa),
            &x,
            step,
            config.simplex_tol,
            config.fidelity_tol,
            config.max_iterations,
        )
        .0;
        kappa *= config.penalty_growth;
        step *= 0.3;
    }
    let x = problem.pull_back(&x, config.polish_steps);
    let f = problem.fidelity(&x);
    (x, f)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn optimize(
    d: usize,
    case: MeasurementCase,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "optimize needs d >= 2, got {d}"
        )));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument(
            "optimize needs restarts >= 1".into(),
        ));
    }
    let problem = Problem::new(d, case, config)?;
    let runs: Vec<(Vec<f64>, f64)> = (0..config.restarts)
        .into_par_iter()
        .map(|k| run_restart(&problem, config, k))
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut history = Vec::with_capacity(runs.len());
    for (x, f) in runs {
        best = match best {
            None => Some((x, f)),
            Some((bx, bf)) => {
                let take = f > bf + config.tie_tol
                    || ((f - bf).abs() <= config.tie_tol
                        && norm(&problem.params(&x).as_array())
                            < norm(&problem.params(&bx).as_array()));
                if take {
                    Some((x, f))
                } else {
                    Some((bx, bf))
                }
            }
        };
        history.push(best.as_ref().map(|b| b.1).unwrap_or(f64::NEG_INFINITY));
    }
    let (x, _) = best.expect("restarts >= 1");
    let best_params = problem.params(&x);
    let seed = build_seed(&best_params)?;
    Ok(OptimizationResult {
        d,
        case,
        best_params,
        best_fidelity: mean_fidelity(&seed)?,
        min_eig: positivity_margin(&seed, case)?,
        completeness_residuals: trace_conditions(&seed.matrix, d)?,
        restarts_used: config.restarts,
        history,
        f_parallel: f_parallel(d),
        f_local: f_local(d),
        f_perp: f_perp(d),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub passed: bool,
    /// Informational checks do not affect [`VerificationReport::passed`].
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const COMPLETENESS_TOL: f64 = 1e-10;
pub const REPRODUCTION_TOL: f64 = 1e-12;

/// Rebuild the seed and recheck completeness, positivity and fidelity; the
/// printed inequality lists are evaluated for reference only.
pub fn verify_result(r: &OptimizationResult) -> Result<VerificationReport> {
    let seed = build_seed(&r.best_params)?;
    let (trace, swap) = trace_conditions(&seed.matrix, r.d)?;
    let margin = positivity_margin(&seed, r.case)?;
    let f = mean_fidelity(&seed)?;
    let check = |name: &str, value: f64, passed: bool| Check {
        name: name.to_string(),
        value,
        passed,
        informational: false,
    };
    let mut checks = vec![
        check("completeness_trace", trace, trace <= COMPLETENESS_TOL),
        check("completeness_swap", swap, swap <= COMPLETENESS_TOL),
        check("positivity_margin", margin, margin >= -FEASIBILITY_TOL),
        check(
            "fidelity_reproduced",
            (f - r.best_fidelity).abs(),
            (f - r.best_fidelity).abs() <= REPRODUCTION_TOL,
        ),
    ];
    let slacks = match r.case {
        MeasurementCase::Parallel => parallel_inequality_slacks(&r.best_params),
        MeasurementCase::Conjugate => conjugate_inequality_slacks(&r.best_params),
    };
    for (i, s) in slacks.iter().enumerate() {
        checks.push(Check {
            name: format!("{}_inequality_{}", r.case, i + 1),
            value: *s,
            passed: *s >= -FEASIBILITY_TOL,
            informational: true,
        });
    }
    let passed = checks.iter().filter(|c| !c.informational).all(|c| c.passed);
    Ok(VerificationReport { checks, passed })
}
