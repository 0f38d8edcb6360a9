//! semiwave: a numerical laboratory for systems of semilinear wave
//! equations □u_j = F_j(u, ∂u) in three space dimensions.
//!
//! The crate covers four layers:
//! - [`algebra`]: exact analysis of quadratic nonlinearities (null
//!   condition, null-form decomposition, Alinhac factorization, extended
//!   systems, the interaction matrix B(ω, ξ, η));
//! - [`radiation`]: Radon transforms, Friedlander radiation fields, the
//!   translation representation, Kirchhoff evaluation of free waves, and
//!   initial data with prescribed radiation-field values;
//! - [`profiles`]: matrix exponentials, the matrix field A[W], the reduced
//!   characteristic system, and spectral classification of the asymptotic
//!   behavior;
//! - [`solver`] and [`analysis`]: a desk-scale 3D leapfrog solver and the
//!   post-processing that compares runs against the predicted profiles.

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod profiles;
pub mod quad;
pub mod radiation;
pub mod solver;

pub use error::{Error, Result};
