//! Phase space of e(3) and its Lie-Poisson structure.
//!
//! Coordinates are ordered `(M₁, M₂, M₃, Γ₁, Γ₂, Γ₃)` everywhere in the
//! crate; gradients and vector fields use the same order. The bracket is
//!
//! ```text
//! {Mᵢ, Mⱼ} = −εᵢⱼₖ Mₖ,   {Mᵢ, Γⱼ} = −εᵢⱼₖ Γₖ,   {Γᵢ, Γⱼ} = 0
//! ```
//!
//! with the minus sign kept throughout; every downstream formula inherits it.

use nalgebra::{SMatrix, SVector, Vector3};

use crate::{Error, Result};

pub type Vec6 = SVector<f64, 6>;
pub type Mat6 = SMatrix<f64, 6, 6>;

/// A point `(M, Γ)` of e(3). No normalisation is imposed on `Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E3State {
    pub m: Vector3<f64>,
    pub gamma: Vector3<f64>,
}

impl E3State {
    pub fn new(m: [f64; 3], gamma: [f64; 3]) -> Self {
        Self {
            m: Vector3::from(m),
            gamma: Vector3::from(gamma),
        }
    }

    pub fn zero() -> Self {
        Self::new([0.0; 3], [0.0; 3])
    }

    pub fn from_vec6(v: &Vec6) -> Self {
        Self::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])
    }

    pub fn to_vec6(&self) -> Vec6 {
        Vec6::new(
            self.m.x,
            self.m.y,
            self.m.z,
            self.gamma.x,
            self.gamma.y,
            self.gamma.z,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().chain(self.gamma.iter()).all(|c| c.is_finite())
    }

    /// Coordinate by index in `(M₁, M₂, M₃, Γ₁, Γ₂, Γ₃)` order.
    pub fn coord(&self, index: usize) -> f64 {
        if index < 3 {
            self.m[index]
        } else {
            self.gamma[index - 3]
        }
    }
}

/// Constants of the family: the moment of inertia `I₂` and the two
/// components `x₀`, `z₀` of the vector `χ = (x₀, 0, z₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    i2: f64,
    x0: f64,
    z0: f64,
}

impl SystemParams {
    /// Rejects `I₂ ≤ 0`, non-finite values and the degenerate `x₀ = z₀ = 0`.
    pub fn new(i2: f64, x0: f64, z0: f64) -> Result<Self> {
        if !(i2.is_finite() && x0.is_finite() && z0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite value in (I2, x0, z0) = ({i2}, {x0}, {z0})"
            )));
        }
        if i2 <= 0.0 {
            return Err(Error::InvalidParams(format!("I2 must be positive, got {i2}")));
        }
        if x0 == 0.0 && z0 == 0.0 {
            return Err(Error::InvalidParams("x0 and z0 are both zero".into()));
        }
        Ok(Self { i2, x0, z0 })
    }

    pub fn i2(&self) -> f64 {
        self.i2
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// `√(x₀² + z₀²)`.
    pub fn chi_norm(&self) -> f64 {
        self.x0.hypot(self.z0)
    }

    pub fn alpha(&self) -> f64 {
        self.x0 / self.chi_norm()
    }

    pub fn beta(&self) -> f64 {
        self.z0 / self.chi_norm()
    }

    /// `q = I₂ √(x₀² + z₀²)`, the leading coefficient of `ω(λ)`.
    pub fn q(&self) -> f64 {
        self.i2 * self.chi_norm()
    }

    pub fn chi(&self) -> Vector3<f64> {
        Vector3::new(self.x0, 0.0, self.z0)
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The Poisson tensor `J(x)` with `{f, g} = ∇fᵀ J ∇g`.
pub fn structure_matrix(state: &E3State) -> Mat6 {
    let mut j = Mat6::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut mm = 0.0;
            let mut mg = 0.0;
            for c in 0..3 {
                let e = levi_civita(a, b, c);
                mm -= e * state.m[c];
                mg -= e * state.gamma[c];
            }
            j[(a, b)] = mm;
            j[(a, b + 3)] = mg;
            j[(a + 3, b)] = mg;
        }
    }
    j
}

/// `(F₁, F₂) = (M·Γ, |Γ|²)`.
pub fn casimirs(state: &E3State) -> (f64, f64) {
    (state.m.dot(&state.gamma), state.gamma.norm_squared())
}

/// `H₁ = |M|²/(2I₂) + x₀Γ₁ + z₀Γ₃` and `H₂ = x₀M₁ + z₀M₃`.
pub fn hamiltonians(state: &E3State, params: &SystemParams) -> (f64, f64) {
    let h1 = state.m.norm_squared() / (2.0 * params.i2)
        + params.x0 * state.gamma.x
        + params.z0 * state.gamma.z;
    let h2 = params.x0 * state.m.x + params.z0 * state.m.z;
    (h1, h2)
}

/// The four integrals `(F₁, F₂, H₁, H₂)` conserved by every member of the family.
pub fn integrals(state: &E3State, params: &SystemParams) -> [f64; 4] {
    let (f1, f2) = casimirs(state);
    let (h1, h2) = hamiltonians(state, params);
    [f1, f2, h1, h2]
}
