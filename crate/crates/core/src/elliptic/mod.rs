//! Elliptic curves attached to the family and the closed-form solution of
//! the reduced equation.
//!
//! Two curves appear. The spectral curve is a quartic in `λ`; the reduced
//! equation for `u` defines a cubic. Their j-invariants coincide, and the
//! cubic is solved by an affine image of the Weierstrass ℘-function.

mod curves;
mod weierstrass;

pub use curves::{
    binary_invariants, compare_curves, j_from_invariants, j_invariant_cubic,
    j_invariant_cubic_depressed, j_invariant_quartic, verify_isomorphism, CubicCurve, Isomorphism,
    QuarticCurve, DEGENERACY_TOL,
};
pub use weierstrass::{
    solve_u_closed_form, Branch, EllipticSolution, Roots, Weierstrass, WeierstrassData,
};
