//! Separation variables.
//!
//! In terms of the complex coordinates of [`crate::lax::transform`],
//!
//! ```text
//! λ₁ = y/x,   μ₁ = i(q − x₁x/y + y₁x²/y²),
//! λ₂ = x,     μ₂ = −i x₁/x.
//! ```
//!
//! The pairs are canonical. `(−λ₁, μ₁)` lies on the spectral curve and
//! `λ₂μ₂ = −i x₁ = −iH₂/√(x₀² + z₀²)`.

use crate::e3::{E3State, SystemParams};
use crate::field::{bracket_complex_gradients, fd_gradient_complex};
use crate::lax::{transform, SpectralCoefficients};
use crate::{Error, Result, C64};

/// `|x|` or `|y|` at or below this fraction of `1 + |M| + |Γ|` counts as zero.
pub const CHART_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationVars {
    pub lambda1: C64,
    pub mu1: C64,
    pub lambda2: C64,
    pub mu2: C64,
}

/// `min(|x|, |y|)`: distance from the singular set of the chart.
pub fn chart_distance(state: &E3State, params: &SystemParams) -> f64 {
    let v = transform(state, params);
    v.x.norm().min(v.y.norm())
}

pub fn sep_vars(state: &E3State, params: &SystemParams) -> Result<SeparationVars> {
    let v = transform(state, params);
    let scale = CHART_TOL * (1.0 + state.m.norm() + state.gamma.norm());
    if v.x.norm() <= scale {
        return Err(Error::CoordinateSingularity("x"));
    }
    if v.y.norm() <= scale {
        return Err(Error::CoordinateSingularity("y"));
    }
    let i = C64::i();
    let r = v.x / v.y;
    Ok(SeparationVars {
        lambda1: v.y / v.x,
        mu1: i * (v.q - v.x1 * r + v.y1 * r * r),
        lambda2: v.x,
        mu2: -i * v.x1 / v.x,
    })
}

/// `({λ₁,μ₁}−1, {λ₂,μ₂}−1, {λ₁,λ₂}, {λ₁,μ₂}, {λ₂,μ₁}, {μ₁,μ₂})` with
/// central-difference gradients.
pub fn canonicality_residuals(state: &E3State, params: &SystemParams) -> Result<[C64; 6]> {
    sep_vars(state, params)?;
    let grad = |pick: fn(&SeparationVars) -> C64| {
        fd_gradient_complex(
            |s| sep_vars(s, params).map(|v| pick(&v)).unwrap_or(C64::new(f64::NAN, f64::NAN)),
            state,
        )
    };
    let l1 = grad(|v| v.lambda1);
    let m1 = grad(|v| v.mu1);
    let l2 = grad(|v| v.lambda2);
    let m2 = grad(|v| v.mu2);
    let br = |a: &[C64; 6], b: &[C64; 6]| bracket_complex_gradients(a, b, state);
    let one = C64::new(1.0, 0.0);
    Ok([
        br(&l1, &m1) - one,
        br(&l2, &m2) - one,
        br(&l1, &l2),
        br(&l1, &m2),
        br(&l2, &m1),
        br(&m1, &m2),
    ])
}

/// Residuals of the two separation relations:
///
/// ```text
/// r₁ = |μ₁² − (−I₂²s²λ₁⁴ + 2I₂H₂λ₁³ − 2I₂H₁λ₁² + 2F₁λ₁ − F₂)/λ₁⁴|
/// r₂ = |λ₂μ₂ + i(αM₁ + βM₃)|
/// ```
///
/// The first is the spectral curve evaluated at `(−λ₁, μ₁)`.
pub fn separation_relation_residuals(state: &E3State, params: &SystemParams) -> Result<(f64, f64)> {
    let v = sep_vars(state, params)?;
    let k = SpectralCoefficients::from_integrals(state, params);
    let l = v.lambda1;
    let poly = (((-k.p * l + k.a_curve) * l - k.b) * l + k.c) * l - k.d;
    let l2 = l * l;
    let r1 = (v.mu1 * v.mu1 - poly / (l2 * l2)).norm();
    let x1 = params.alpha() * state.m.x + params.beta() * state.m.z;
    let r2 = (v.lambda2 * v.mu2 + C64::i() * x1).norm();
    Ok((r1, r2))
}
