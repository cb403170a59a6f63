//! Generalized Swanson Hamiltonian toolkit.
//!
//! The non-Hermitian operator `ω η†η + α η² + β η†² + ω/2` with a first-order
//! ladder operator `η = a(x) d/dx + b(x)` is assembled from analytic profiles,
//! mapped onto its Hermitian Sturm–Liouville equivalent through the metric
//! `ζ₊ = ρ̃²`, and checked numerically: spectral reality, pseudo-Hermiticity,
//! factorization, and agreement with the exactly solvable families.
//!
//! Units follow `ħ = 2m₀ = 1`.

// negated float comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
pub mod discrete;
pub mod error;
pub mod expr;
pub mod model;
pub mod profiles;
pub mod spectra;

pub use error::{Error, Result};
pub use model::ModelParams;
pub use profiles::Profile;
