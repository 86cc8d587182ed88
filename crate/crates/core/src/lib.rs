//! Spectral diagonalization, invariant-region machinery, Lyapunov
//! positivity certification, and a desk-scale 1-D simulator for
//! m-component reaction-diffusion systems whose diffusion matrix is
//! tridiagonal symmetric Toeplitz.
//!
//! The pieces fit together like this:
//!
//! - [`spectral`] holds the closed-form eigentheory of the diffusion
//!   matrix and the sine transform that decouples the system;
//! - [`regions`] enumerates the 2^m invariant cones picked out by sign
//!   patterns of the transformed coordinates and tests membership and
//!   boundary compatibility;
//! - [`lyapunov`] evaluates the weighted homogeneous polynomial, its
//!   closed-form derivatives, the condition matrix, and the determinant
//!   recursion certifying positive definiteness, plus a deterministic
//!   weight search;
//! - [`reactions`] defines polynomial reaction families on the transformed
//!   orthant and sampling falsifiers for quasipositivity, growth, and the
//!   weighted dissipation inequality;
//! - [`simulate`] integrates the system with Strang splitting
//!   (Crank-Nicolson diffusion, explicit reaction) in both the decoupled
//!   and coupled formulations, monitoring invariance, the Lyapunov
//!   functional, the Gronwall inequality, and blow-up;
//! - [`verify`] bundles the acceptance checks behind the `verify-all` CLI
//!   subcommand and the acceptance test target;
//! - [`oracle`] holds independent reference routes (dense eigensolver,
//!   cofactor determinants, finite differences) used only for checking.

pub mod error;
pub mod lyapunov;
pub mod oracle;
pub mod reactions;
pub mod regions;
pub mod simulate;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
