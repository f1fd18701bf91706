//! Lax matrix of the family and its r-matrix structure.
//!
//! With the complex coordinates
//!
//! ```text
//! x = (βM₁ − αM₃ − iM₂)/√2,   y = (βΓ₁ − αΓ₃ − iΓ₂)/√2,
//! x₁ = αM₁ + βM₃,             y₁ = αΓ₁ + βΓ₃,           q = I₂√(x₀² + z₀²)
//! ```
//!
//! the Lax matrix is
//!
//! ```text
//!         1   ⎡ ω(λ)        √2 i Δ(λ) ⎤
//! L(λ) = ──── ⎢                       ⎥,   ω = −i(qλ² + x₁λ + y₁),  Δ = xλ + y,  Δ* = x̄λ + ȳ
//!         λ²  ⎣ √2 i Δ*(λ)  −ω(λ)     ⎦
//! ```
//!
//! and every member of the family satisfies `L̇ = [L, A]` with
//! `A(λ) = (λ²L(λ) − a²L(a)) / (2I₂(λ − a))`. The entries of `λ²L(λ)` are
//! quadratic in `λ`, so `A` is a matrix polynomial of degree one; it is kept
//! as coefficients obtained by synthetic division.

use nalgebra::{Matrix2, Matrix4};
use std::f64::consts::SQRT_2;

use crate::dynamics::{coupling_a, field_with_coupling, vector_field, CaseSelector, Trajectory};
use crate::e3::{hamiltonians, casimirs, E3State, SystemParams, Vec6};
use crate::field::bracket_complex_gradients;
use crate::{Error, Result, C64};

pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;

const I: C64 = C64::new(0.0, 1.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedVars {
    pub x: C64,
    pub y: C64,
    pub xbar: C64,
    pub ybar: C64,
    pub x1: f64,
    pub y1: f64,
    pub q: f64,
}

pub fn transform(state: &E3State, params: &SystemParams) -> TransformedVars {
    let (al, be) = (params.alpha(), params.beta());
    let (m, g) = (&state.m, &state.gamma);
    let x = C64::new(be * m.x - al * m.z, -m.y) / SQRT_2;
    let y = C64::new(be * g.x - al * g.z, -g.y) / SQRT_2;
    TransformedVars {
        x,
        y,
        xbar: x.conj(),
        ybar: y.conj(),
        x1: al * m.x + be * m.z,
        y1: al * g.x + be * g.z,
        q: params.q(),
    }
}

/// `L(λ)` stored through the polynomial entries of `λ²L(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxMatrix {
    /// Coefficients of `ω` in powers `λ², λ, 1`.
    pub omega: [C64; 3],
    /// Coefficients of `Δ` in powers `λ, 1`.
    pub delta: [C64; 2],
    /// Coefficients of `Δ*` in powers `λ, 1`.
    pub delta_star: [C64; 2],
}

impl LaxMatrix {
    pub fn from_vars(v: &TransformedVars) -> Self {
        Self {
            omega: [-I * v.q, -I * v.x1, -I * v.y1],
            delta: [v.x, v.y],
            delta_star: [v.xbar, v.ybar],
        }
    }

    pub fn new(state: &E3State, params: &SystemParams) -> Self {
        Self::from_vars(&transform(state, params))
    }

    /// The part of `L` that is linear in the state (the constant `q` dropped).
    /// Since every entry is affine in `(M, Γ)`, `dL/dt = linear(ẋ)`.
    pub fn linear(direction: &E3State, params: &SystemParams) -> Self {
        let mut v = transform(direction, params);
        v.q = 0.0;
        Self::from_vars(&v)
    }

    /// Coefficient matrices `[N₂, N₁, N₀]` with `λ²L(λ) = N₂λ² + N₁λ + N₀`.
    pub fn numerator(&self) -> [CMat2; 3] {
        let s = I * SQRT_2;
        [
            CMat2::new(self.omega[0], re(0.0), re(0.0), -self.omega[0]),
            CMat2::new(self.omega[1], s * self.delta[0], s * self.delta_star[0], -self.omega[1]),
            CMat2::new(self.omega[2], s * self.delta[1], s * self.delta_star[1], -self.omega[2]),
        ]
    }

    pub fn eval(&self, lambda: C64) -> Result<CMat2> {
        if lambda == re(0.0) {
            return Err(Error::LaxPole);
        }
        let [n2, n1, n0] = self.numerator();
        Ok((n2 * lambda * lambda + n1 * lambda + n0) / (lambda * lambda))
    }
}

pub fn lax_l(state: &E3State, params: &SystemParams, lambda: C64) -> Result<CMat2> {
    LaxMatrix::new(state, params).eval(lambda)
}

/// Degree-one matrix polynomial `A(λ) = A₁λ + A₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Companion {
    pub a1: CMat2,
    pub a0: CMat2,
    /// Largest remainder modulus of the synthetic division (zero up to rounding).
    pub remainder: f64,
}

impl Companion {
    /// Divides `λ²L(λ) − a²L(a)` by `2I₂(λ − a)` entry by entry.
    pub fn new(lax: &LaxMatrix, a: f64, i2: f64) -> Self {
        let [n2, n1, n0] = lax.numerator();
        let a = re(a);
        let mut a1 = CMat2::zeros();
        let mut a0 = CMat2::zeros();
        let mut remainder: f64 = 0.0;
        for idx in 0..4 {
            let (c2, c1, c0) = (n2[idx], n1[idx], n0[idx]);
            let at_a = (c2 * a + c1) * a + c0;
            // Synthetic division of c2λ² + c1λ + (c0 − p(a)) by (λ − a).
            let q1 = c2;
            let q0 = c1 + a * q1;
            let rem = (c0 - at_a) + a * q0;
            remainder = remainder.max(rem.norm());
            a1[idx] = q1 / (2.0 * i2);
            a0[idx] = q0 / (2.0 * i2);
        }
        Self { a1, a0, remainder }
    }

    pub fn eval(&self, lambda: C64) -> CMat2 {
        self.a1 * lambda + self.a0
    }
}

pub fn lax_a(state: &E3State, params: &SystemParams, case: &CaseSelector, lambda: C64) -> CMat2 {
    let a = coupling_a(state, params, case);
    Companion::new(&LaxMatrix::new(state, params), a, params.i2()).eval(lambda)
}

/// `max |dL/dt − [L, A]|` at one state for a given velocity `state_dot` and
/// coupling value `a`.
pub fn lax_residual(
    state: &E3State,
    params: &SystemParams,
    state_dot: &Vec6,
    a: f64,
    lambda: C64,
) -> Result<f64> {
    let lax = LaxMatrix::new(state, params);
    let l = lax.eval(lambda)?;
    let a_mat = Companion::new(&lax, a, params.i2()).eval(lambda);
    let dl = LaxMatrix::linear(&E3State::from_vec6(state_dot), params).eval(lambda)?;
    let comm = l * a_mat - a_mat * l;
    Ok((dl - comm).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Largest Lax-equation residual over all samples and spectral parameters.
pub fn verify_lax(trajectory: &Trajectory, lambdas: &[C64]) -> Result<f64> {
    let (params, case) = (&trajectory.params, &trajectory.case);
    let mut worst: f64 = 0.0;
    for s in &trajectory.states {
        let a = coupling_a(s, params, case);
        let v = field_with_coupling(s, params, a);
        debug_assert_eq!(v, vector_field(s, params, case));
        for &lam in lambdas {
            worst = worst.max(lax_residual(s, params, &v, a, lam)?);
        }
    }
    Ok(worst)
}

/// Gradients of the four entries of `L(λ)` with respect to the six
/// coordinates, read off from the linear part at unit vectors.
fn entry_gradients(params: &SystemParams, lambda: C64) -> Result<[[C64; 6]; 4]> {
    let mut grads = [[re(0.0); 6]; 4];
    for a in 0..6 {
        let e = Vec6::from_fn(|r, _| if r == a { 1.0 } else { 0.0 });
        let m = LaxMatrix::linear(&E3State::from_vec6(&e), params).eval(lambda)?;
        for (k, g) in grads.iter_mut().enumerate() {
            // Row-major entry order (0,0), (0,1), (1,0), (1,1).
            g[a] = m[(k / 2, k % 2)];
        }
    }
    Ok(grads)
}

/// The permutation matrix `P` on `ℂ² ⊗ ℂ²`.
pub fn permutation() -> CMat4 {
    let mut p = CMat4::zeros();
    p[(0, 0)] = re(1.0);
    p[(1, 2)] = re(1.0);
    p[(2, 1)] = re(1.0);
    p[(3, 3)] = re(1.0);
    p
}

/// `{L(λ) ⊗ 1, 1 ⊗ L(μ)}` in the row-major Kronecker convention
/// `(i,k) ⊗ (j,l) ↦ (2i + j, 2k + l)`.
pub fn tensor_bracket(state: &E3State, params: &SystemParams, lambda: C64, mu: C64) -> Result<CMat4> {
    let gl = entry_gradients(params, lambda)?;
    let gm = entry_gradients(params, mu)?;
    let mut out = CMat4::zeros();
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    out[(2 * i + j, 2 * k + l)] =
                        bracket_complex_gradients(&gl[2 * i + k], &gm[2 * j + l], state);
                }
            }
        }
    }
    Ok(out)
}

/// Residual of `{L¹(λ), L²(μ)} = [r(λ−μ), L¹(λ) + L²(μ)]` for
/// `r(λ) = sign · P / λ`. The identity holds for `sign = −1`.
pub fn rmatrix_residual(
    state: &E3State,
    params: &SystemParams,
    lambda: C64,
    mu: C64,
    sign: f64,
) -> Result<f64> {
    if lambda == mu {
        return Err(Error::SingularRMatrix);
    }
    let lhs = tensor_bracket(state, params, lambda, mu)?;
    let id = CMat2::identity();
    let t = lax_l(state, params, lambda)?.kronecker(&id) + id.kronecker(&lax_l(state, params, mu)?);
    let r = permutation() * (re(sign) / (lambda - mu));
    let rhs = r * t - t * r;
    Ok((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn verify_rmatrix(state: &E3State, params: &SystemParams, lambda: C64, mu: C64) -> Result<f64> {
    rmatrix_residual(state, params, lambda, mu, -1.0)
}

/// Coefficients of `μ²λ⁴ = −pλ⁴ − a_curve·λ³ − bλ² − cλ − d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCoefficients {
    pub p: f64,
    pub a_curve: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SpectralCoefficients {
    pub fn as_array(&self) -> [f64; 5] {
        [self.p, self.a_curve, self.b, self.c, self.d]
    }

    /// The same coefficients written through the integrals:
    /// `(I₂²(x₀²+z₀²), 2I₂H₂, 2I₂H₁, 2F₁, F₂)`.
    pub fn from_integrals(state: &E3State, params: &SystemParams) -> Self {
        let (f1, f2) = casimirs(state);
        let (h1, h2) = hamiltonians(state, params);
        let i2 = params.i2();
        Self {
            p: params.q().powi(2),
            a_curve: 2.0 * i2 * h2,
            b: 2.0 * i2 * h1,
            c: 2.0 * f1,
            d: f2,
        }
    }
}

fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![re(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expands `ω(λ)² − 2Δ(λ)Δ*(λ)` and reads off the curve coefficients.
pub fn spectral_coefficients(state: &E3State, params: &SystemParams) -> SpectralCoefficients {
    let lax = LaxMatrix::new(state, params);
    // Coefficient vectors in descending powers.
    let om2 = poly_mul(&lax.omega, &lax.omega);
    let dd = poly_mul(&lax.delta, &lax.delta_star);
    let mut full = om2;
    for (k, c) in dd.iter().enumerate() {
        full[k + 2] -= 2.0 * c;
    }
    SpectralCoefficients {
        p: -full[0].re,
        a_curve: -full[1].re,
        b: -full[2].re,
        c: -full[3].re,
        d: -full[4].re,
    }
}
