//! Quartic and cubic models of genus-one curves and their j-invariants.

use crate::e3::{E3State, SystemParams};
use crate::lax::{spectral_coefficients, SpectralCoefficients};
use crate::reduction::{reduced_constants, ReducedConstants};
use crate::{Error, Result};

use super::weierstrass::WeierstrassData;

/// Relative size of `g₂³ − 27g₃²` below which a curve counts as singular.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// `ν² = a₀λ⁴ + a₁λ³ + a₂λ² + a₃λ + a₄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCurve {
    pub coeffs: [f64; 5],
}

impl QuarticCurve {
    pub fn new(coeffs: [f64; 5]) -> Self {
        Self { coeffs }
    }

    /// The spectral curve in the chart `ν = μλ²`.
    pub fn from_spectral(k: &SpectralCoefficients) -> Self {
        Self::new([-k.p, -k.a_curve, -k.b, -k.c, -k.d])
    }

    pub fn invariants(&self) -> (f64, f64) {
        binary_invariants(self.coeffs)
    }
}

/// `v² = a₀u³ + a₁u² + a₂u + a₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCurve {
    pub coeffs: [f64; 4],
}

impl CubicCurve {
    pub fn new(coeffs: [f64; 4]) -> Self {
        Self { coeffs }
    }

    /// `v² = −u³/I₂² − Bu² − Cu − D`.
    pub fn from_reduced(k: &ReducedConstants, i2: f64) -> Self {
        Self::new(k.cubic_coefficients(i2))
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * u + c)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let [a, b, c, _] = self.coeffs;
        (3.0 * a * u + 2.0 * b) * u + c
    }

    /// Invariants of the cubic read as a binary quartic with zero leading term.
    pub fn invariants(&self) -> (f64, f64) {
        let [a, b, c, d] = self.coeffs;
        binary_invariants([0.0, a, b, c, d])
    }

    /// Affine change of variable to Weierstrass normal form.
    pub fn weierstrass(&self) -> Result<WeierstrassData> {
        WeierstrassData::from_cubic(self)
    }
}

/// `(g₂, g₃)` of `b₀λ⁴ + 4b₁λ³ + 6b₂λ² + 4b₃λ + b₄`.
pub fn binary_invariants(a: [f64; 5]) -> (f64, f64) {
    let (b0, b1, b2, b3, b4) = (a[0], a[1] / 4.0, a[2] / 6.0, a[3] / 4.0, a[4]);
    let g2 = b0 * b4 - 4.0 * b1 * b3 + 3.0 * b2 * b2;
    let g3 = b0 * b2 * b4 + 2.0 * b1 * b2 * b3 - b2 * b2 * b2 - b0 * b3 * b3 - b1 * b1 * b4;
    (g2, g3)
}

/// `j = 1728 g₂³ / (g₂³ − 27g₃²)`, rejecting near-singular invariants.
pub fn j_from_invariants(curve: &'static str, g2: f64, g3: f64) -> Result<f64> {
    let a = g2 * g2 * g2;
    let b = 27.0 * g3 * g3;
    let disc = a - b;
    if disc.is_nan() || disc.abs() <= DEGENERACY_TOL * a.abs().max(b) {
        return Err(Error::SingularCurve {
            curve,
            discriminant: disc,
        });
    }
    Ok(1728.0 * a / disc)
}

pub fn j_invariant_quartic(curve: &QuarticCurve) -> Result<f64> {
    let (g2, g3) = curve.invariants();
    j_from_invariants("quartic", g2, g3)
}

pub fn j_invariant_cubic(curve: &CubicCurve) -> Result<f64> {
    let (g2, g3) = curve.invariants();
    j_from_invariants("cubic", g2, g3)
}

/// The same j-invariant through the depressed cubic `4s³ − g₂s − g₃`.
pub fn j_invariant_cubic_depressed(curve: &CubicCurve) -> Result<f64> {
    let w = curve.weierstrass()?;
    j_from_invariants("cubic", w.g2, w.g3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isomorphism {
    pub j_spectral: f64,
    pub j_reduced: f64,
    /// `|j_spectral − j_reduced| / max(1, |j_spectral|)`.
    pub gap: f64,
}

/// Compares the spectral curve with the reduced cubic at one state.
pub fn verify_isomorphism(state: &E3State, params: &SystemParams) -> Result<Isomorphism> {
    let quartic = QuarticCurve::from_spectral(&spectral_coefficients(state, params));
    let cubic = CubicCurve::from_reduced(&reduced_constants(state, params), params.i2());
    compare_curves(&quartic, &cubic)
}

pub fn compare_curves(quartic: &QuarticCurve, cubic: &CubicCurve) -> Result<Isomorphism> {
    let j_spectral = j_invariant_quartic(quartic)?;
    let j_reduced = j_invariant_cubic(cubic)?;
    Ok(Isomorphism {
        j_spectral,
        j_reduced,
        gap: (j_spectral - j_reduced).abs() / j_spectral.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemniscatic_quartic() {
        let c = QuarticCurve::new([1.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(c.invariants(), (-1.0, 0.0));
        assert_eq!(j_invariant_quartic(&c).unwrap(), 1728.0);
    }

    #[test]
    fn cubic_with_known_roots() {
        // −u(u − 3)(u + 1)
        let c = CubicCurve::new([-1.0, 2.0, 3.0, 0.0]);
        let j = j_invariant_cubic(&c).unwrap();
        assert!((j - 35152.0 / 9.0).abs() < 1e-9);
        let jd = j_invariant_cubic_depressed(&c).unwrap();
        assert!((j - jd).abs() / j.abs() < 1e-12);
        let c = CubicCurve::new([4.0, 0.0, -4.0, 0.0]);
        assert!((j_invariant_cubic(&c).unwrap() - 1728.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_leaves_j_unchanged() {
        let a = [0.7, -1.3, 0.2, 2.1, -0.4];
        let j0 = j_invariant_quartic(&QuarticCurve::new(a)).unwrap();
        let t: f64 = 1.7;
        // f(λ/t)·t⁴
        let scaled = std::array::from_fn(|i| a[i] * t.powi(i as i32));
        let j1 = j_invariant_quartic(&QuarticCurve::new(scaled)).unwrap();
        assert!((j0 - j1).abs() / j0.abs() < 1e-12);
    }

    #[test]
    fn repeated_roots_are_rejected() {
        // (λ − 1)²(λ² + 1)
        let c = QuarticCurve::new([1.0, -2.0, 2.0, -2.0, 1.0]);
        assert!(matches!(j_invariant_quartic(&c), Err(Error::SingularCurve { .. })));
        // −u²(u − 2)
        let c = CubicCurve::new([-1.0, 2.0, 0.0, 0.0]);
        assert!(j_invariant_cubic(&c).is_err());
        assert!(j_invariant_cubic_depressed(&c).is_err());
    }

    #[test]
    fn curves_agree_at_a_state() {
        let p = SystemParams::new(1.3, 0.8, -0.45).unwrap();
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        let iso = verify_isomorphism(&s, &p).unwrap();
        assert!(iso.gap < 1e-10, "{iso:?}");
    }
}
