//! Measure-preserving flows on the Lie algebra e(3) built from a family of
//! elliptic spectral curves.
//!
//! The crate is organised bottom-up:
//!
//! * [`e3`]: phase-space types, the Lie-Poisson structure and the two
//!   Casimirs and two Hamiltonians shared by every flow.
//! * [`field`]: scalar fields on phase space and the bracket engine.
//! * [`dynamics`]: the family `ẋ = {x,H₁} + a{x,H₂}`, its five
//!   measure-preserving couplings, divergence and Hamiltonian witnesses,
//!   and time integration.
//! * [`lax`]: the 2×2 Lax matrix, its companion, the linear r-matrix
//!   bracket and the spectral-curve coefficients.
//! * [`reduction`]: the rotated frame, the cubic equation for `u = ρ²`,
//!   the angle quadrature and full state reconstruction.
//! * [`elliptic`]: the quartic and cubic curves, j-invariants and the
//!   Weierstrass ℘ solution of the reduced equation.
//! * [`separation`]: Sklyanin separation variables and their residuals.
//! * [`hess`]: the Hess-Appel'rot heavy top and its relation to the family.

pub mod dynamics;
pub mod e3;
pub mod elliptic;
mod error;
pub use error::C64Display;
pub mod field;
pub mod hess;
pub mod lax;
pub mod ode;
pub mod reduction;
pub mod sampling;
pub mod separation;

pub use dynamics::{CaseSelector, Method, SolverSettings, Trajectory};
pub use e3::{E3State, SystemParams, Vec6};
pub use error::{Error, Result};
pub use field::ScalarField;

/// Complex scalar used by the Lax and separation modules.
pub type C64 = num_complex::Complex64;
