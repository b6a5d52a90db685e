//! Spectral Galerkin laboratory for incompressible flow on periodic boxes.
//!
//! The crate builds divergence-free trigonometric bases, assembles the
//! projected evolution system (diagonal elliptic stiffness plus a dealiased
//! trilinear advection tensor), integrates it with an exponential
//! integrating-factor Heun scheme, and produces machine-checkable
//! certificates: pointwise quadratic-form classification of the symmetrized
//! gradient, a smallness criterion for the convective term, hyperplane
//! restriction of 3D fields to a 2D section, interpolation-inequality
//! bookkeeping, and Gronwall-envelope uniqueness checks for perturbed runs.
//!
//! Everything is deterministic: fixed iteration orders, seeded ChaCha
//! sampling, and byte-stable artifact formatting.

// Validation guards use `!(x > y)` so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod basis;
pub mod config;
pub mod error;
pub mod field;
pub mod gns;
pub mod grid;
pub mod integrate;
pub mod io;
pub mod quadform;
pub mod restrict;
pub mod scenario;
pub mod uniqueness;

mod spectral;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
