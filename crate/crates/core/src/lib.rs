//! Estimation of qudit states from parallel and phase-conjugate pairs.
//!
//! * [`channel`]: N-copy conjugation channels, their fidelity and its bound.
//! * [`povm`]: the covariant seed family, completeness and covariance checks.
//! * [`fidelity`]: exact and Monte-Carlo mean fidelity, closed forms, table.
//! * [`optimizer`]: fidelity maximization over the seed family.
//! * [`sampler`]: rejection sampling of measurement outcomes.

pub mod channel;
pub mod error;
pub mod fidelity;
pub mod montecarlo;
pub mod optimizer;
pub mod povm;
pub mod rng;
pub mod sampler;
pub mod symmetric;
pub mod tensor;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use tensor::ComplexMatrix;

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
