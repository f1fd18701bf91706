//! Scalar fields on e(3) and the bracket engine.
//!
//! A [`ScalarField`] always evaluates; it carries an analytic gradient when
//! one is known and otherwise falls back to central differences with step
//! `h = 1e-6 · max(1, |xᵢ|)`.

use std::fmt;
use std::sync::Arc;

use crate::e3::{structure_matrix, E3State, SystemParams, Vec6};
use crate::{Error, Result, C64};

type EvalFn = dyn Fn(&E3State) -> f64 + Send + Sync;
type GradFn = dyn Fn(&E3State) -> Vec6 + Send + Sync;

/// Relative step for central differences.
pub const FD_STEP: f64 = 1e-6;

#[derive(Clone)]
pub struct ScalarField {
    name: String,
    eval: Arc<EvalFn>,
    grad: Option<Arc<GradFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("analytic_gradient", &self.grad.is_some())
            .finish()
    }
}

impl ScalarField {
    /// A field without analytic gradient.
    pub fn new(name: impl Into<String>, eval: impl Fn(&E3State) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            grad: None,
        }
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&E3State) -> Vec6 + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    /// Drops the analytic gradient so that [`ScalarField::gradient`] uses
    /// finite differences.
    pub fn without_gradient(mut self) -> Self {
        self.grad = None;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn value(&self, state: &E3State) -> f64 {
        (self.eval)(state)
    }

    pub fn gradient(&self, state: &E3State) -> Vec6 {
        match &self.grad {
            Some(g) => g(state),
            None => self.fd_gradient(state),
        }
    }

    pub fn fd_gradient(&self, state: &E3State) -> Vec6 {
        fd_gradient(|s| self.value(s), state)
    }

    /// Coordinate function `xⁱ` in `(M₁, M₂, M₃, Γ₁, Γ₂, Γ₃)` order.
    pub fn coordinate(index: usize) -> Self {
        assert!(index < 6, "coordinate index {index} out of range");
        const NAMES: [&str; 6] = ["M1", "M2", "M3", "G1", "G2", "G3"];
        Self::new(NAMES[index], move |s| s.coord(index))
            .with_gradient(move |_| Vec6::from_fn(|r, _| if r == index { 1.0 } else { 0.0 }))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c).with_gradient(|_| Vec6::zeros())
    }

    /// `F₁ = M·Γ`.
    pub fn casimir_f1() -> Self {
        Self::new("F1", |s| s.m.dot(&s.gamma)).with_gradient(|s| {
            Vec6::new(s.gamma.x, s.gamma.y, s.gamma.z, s.m.x, s.m.y, s.m.z)
        })
    }

    /// `F₂ = |Γ|²`.
    pub fn casimir_f2() -> Self {
        Self::new("F2", |s| s.gamma.norm_squared()).with_gradient(|s| {
            Vec6::new(0.0, 0.0, 0.0, 2.0 * s.gamma.x, 2.0 * s.gamma.y, 2.0 * s.gamma.z)
        })
    }

    /// `H₁ = |M|²/(2I₂) + x₀Γ₁ + z₀Γ₃`.
    pub fn h1(params: &SystemParams) -> Self {
        let (i2, x0, z0) = (params.i2(), params.x0(), params.z0());
        Self::new("H1", move |s| {
            s.m.norm_squared() / (2.0 * i2) + x0 * s.gamma.x + z0 * s.gamma.z
        })
        .with_gradient(move |s| Vec6::new(s.m.x / i2, s.m.y / i2, s.m.z / i2, x0, 0.0, z0))
    }

    /// `H₂ = x₀M₁ + z₀M₃`.
    pub fn h2(params: &SystemParams) -> Self {
        let (x0, z0) = (params.x0(), params.z0());
        Self::new("H2", move |s| x0 * s.m.x + z0 * s.m.z)
            .with_gradient(move |_| Vec6::new(x0, 0.0, z0, 0.0, 0.0, 0.0))
    }

    /// `x₀Γ₁ + z₀Γ₃`.
    pub fn gamma_chi(params: &SystemParams) -> Self {
        let (x0, z0) = (params.x0(), params.z0());
        Self::new("x0*G1+z0*G3", move |s| x0 * s.gamma.x + z0 * s.gamma.z)
            .with_gradient(move |_| Vec6::new(0.0, 0.0, 0.0, x0, 0.0, z0))
    }

    /// `|M|²`.
    pub fn m_squared() -> Self {
        Self::new("|M|^2", |s| s.m.norm_squared())
            .with_gradient(|s| Vec6::new(2.0 * s.m.x, 2.0 * s.m.y, 2.0 * s.m.z, 0.0, 0.0, 0.0))
    }
}

fn fd_step(x: f64) -> f64 {
    FD_STEP * x.abs().max(1.0)
}

/// Central-difference gradient of an arbitrary function of the state.
pub fn fd_gradient(f: impl Fn(&E3State) -> f64, state: &E3State) -> Vec6 {
    let x = state.to_vec6();
    Vec6::from_fn(|i, _| {
        let h = fd_step(x[i]);
        let mut plus = x;
        let mut minus = x;
        plus[i] += h;
        minus[i] -= h;
        (f(&E3State::from_vec6(&plus)) - f(&E3State::from_vec6(&minus))) / (2.0 * h)
    })
}

/// Central-difference gradient of a complex-valued function, taken on the
/// real and imaginary parts separately.
pub fn fd_gradient_complex(f: impl Fn(&E3State) -> C64, state: &E3State) -> [C64; 6] {
    let x = state.to_vec6();
    std::array::from_fn(|i| {
        let h = fd_step(x[i]);
        let mut plus = x;
        let mut minus = x;
        plus[i] += h;
        minus[i] -= h;
        (f(&E3State::from_vec6(&plus)) - f(&E3State::from_vec6(&minus))) / (2.0 * h)
    })
}

/// `∇fᵀ J(state) ∇g` for precomputed gradients.
pub fn bracket_gradients(df: &Vec6, dg: &Vec6, state: &E3State) -> f64 {
    (df.transpose() * structure_matrix(state) * dg)[(0, 0)]
}

/// Bilinear extension of the bracket to complex gradients.
pub fn bracket_complex_gradients(df: &[C64; 6], dg: &[C64; 6], state: &E3State) -> C64 {
    let j = structure_matrix(state);
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..6 {
        for b in 0..6 {
            if j[(a, b)] != 0.0 {
                acc += df[a] * j[(a, b)] * dg[b];
            }
        }
    }
    acc
}

fn checked_gradient(f: &ScalarField, state: &E3State) -> Result<Vec6> {
    let g = f.gradient(state);
    if g.iter().all(|c| c.is_finite()) {
        Ok(g)
    } else {
        Err(Error::NonFiniteGradient {
            field: f.name().to_string(),
        })
    }
}

/// The Lie-Poisson bracket `{f, g}` at `state`.
pub fn bracket(f: &ScalarField, g: &ScalarField, state: &E3State) -> Result<f64> {
    let df = checked_gradient(f, state)?;
    let dg = checked_gradient(g, state)?;
    Ok(bracket_gradients(&df, &dg, state))
}

/// Hamiltonian vector field `xⁱ ↦ {xⁱ, H}` of a single function.
pub fn hamiltonian_vector_field(h: &ScalarField, state: &E3State) -> Result<Vec6> {
    let dh = checked_gradient(h, state)?;
    Ok(structure_matrix(state) * dh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> E3State {
        E3State::new([1.0, 2.0, 3.0], [0.3, -0.7, 1.1])
    }

    #[test]
    fn coordinate_brackets() {
        let s = state();
        let m1 = ScalarField::coordinate(0);
        let m2 = ScalarField::coordinate(1);
        assert_eq!(bracket(&m1, &m2, &s).unwrap(), -3.0);
        assert_eq!(bracket(&m2, &m1, &s).unwrap(), 3.0);
        assert_eq!(bracket(&m1, &m1, &s).unwrap(), 0.0);
    }

    #[test]
    fn casimir_commutes_with_coordinates() {
        let s = state();
        let f1 = ScalarField::casimir_f1();
        let f2 = ScalarField::casimir_f2();
        for i in 0..6 {
            let x = ScalarField::coordinate(i);
            assert!(bracket(&f1, &x, &s).unwrap().abs() < 1e-14);
            assert!(bracket(&f2, &x, &s).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn fd_gradient_matches_analytic() {
        let p = SystemParams::new(1.3, 0.8, -0.4).unwrap();
        let s = state();
        for f in [ScalarField::h1(&p), ScalarField::m_squared(), ScalarField::casimir_f1()] {
            let diff = (f.gradient(&s) - f.fd_gradient(&s)).amax();
            assert!(diff < 1e-8, "{}: {diff}", f.name());
        }
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let bad = ScalarField::new("bad", |_| 0.0).with_gradient(|_| Vec6::repeat(f64::NAN));
        let err = bracket(&bad, &ScalarField::coordinate(0), &state()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteGradient { .. }));
    }
}
