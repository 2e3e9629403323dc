//! Covariant two-copy POVMs generated from a single seed operator.

pub mod expand;
pub mod generators;
pub mod reference;
pub mod seed;
pub mod twirl;

pub use expand::{hermitian_expand, HermitianExpansion};
pub use generators::{build_generators, gell_mann, GeneratorSet};
pub use reference::{reference_operator, reference_operator_by_name, ReferenceOperator};
pub use seed::{
    build_seed, build_seed_with_weight, conjugate_inequality_slacks, parallel_inequality_slacks,
    positivity_margin, solve_params, CartanWeight, MeasurementCase, SeedOperator, SeedParams,
    SeedTerms,
};
pub use twirl::{
    completeness_residual, exact_twirl, stabilizer_covariance_residual, trace_conditions, twirl_mc,
    CompletenessResiduals,
};
