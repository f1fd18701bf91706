//! The family `ẋ = {x, H₁} + a {x, H₂}` on e(3).
//!
//! In components, with `a` the value of the coupling polynomial at the
//! current state:
//!
//! ```text
//! Ṁ₁ = z₀Γ₂ + a z₀M₂
//! Ṁ₂ = x₀Γ₃ − z₀Γ₁ + a(x₀M₃ − z₀M₁)
//! Ṁ₃ = −x₀Γ₂ − a x₀M₂
//! Γ̇₁ = (Γ₂M₃ − Γ₃M₂)/I₂ + a z₀Γ₂
//! Γ̇₂ = (Γ₃M₁ − Γ₁M₃)/I₂ + a(x₀Γ₃ − z₀Γ₁)
//! Γ̇₃ = (Γ₁M₂ − Γ₂M₁)/I₂ − a x₀Γ₂
//! ```
//!
//! The divergence of this field is `{a, H₂}`, so the standard measure is
//! preserved exactly when `a` commutes with `H₂`. Five couplings do:
//! the two Casimirs, `H₂` itself, `x₀Γ₁ + z₀Γ₃` and `|M|²`. The first three
//! give Hamiltonian flows; the last two do not.

use std::fmt;

use crate::e3::{integrals, E3State, SystemParams, Vec6};
use crate::field::{self, ScalarField};
use crate::ode::{self, Samples};
use crate::{Error, Result};

pub use crate::ode::{Method, SolverSettings};

/// Choice of the coupling polynomial `a`.
///
/// `Custom` fields are expected to be polynomial in the six coordinates.
/// This is a documented contract and is not checked.
#[derive(Clone)]
pub enum CaseSelector {
    /// `a = F₁ = M·Γ`.
    CasimirF1,
    /// `a = F₂ = |Γ|²`.
    CasimirF2,
    /// `a = H₂ = x₀M₁ + z₀M₃`.
    H2Case,
    /// `a = x₀Γ₁ + z₀Γ₃`.
    GammaChi,
    /// `a = |M|²`.
    MSquared,
    Constant(f64),
    Custom(ScalarField),
}

impl fmt::Debug for CaseSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseSelector::Constant(c) => write!(f, "Constant({c})"),
            CaseSelector::Custom(field) => write!(f, "Custom({})", field.name()),
            other => f.write_str(other.tag()),
        }
    }
}

impl CaseSelector {
    /// The five measure-preserving couplings.
    pub fn named() -> [CaseSelector; 5] {
        [
            CaseSelector::CasimirF1,
            CaseSelector::CasimirF2,
            CaseSelector::H2Case,
            CaseSelector::GammaChi,
            CaseSelector::MSquared,
        ]
    }

    /// Short identifier used in config files and reports.
    pub fn tag(&self) -> &'static str {
        match self {
            CaseSelector::CasimirF1 => "casimir_f1",
            CaseSelector::CasimirF2 => "casimir_f2",
            CaseSelector::H2Case => "h2",
            CaseSelector::GammaChi => "gamma_chi",
            CaseSelector::MSquared => "m_squared",
            CaseSelector::Constant(_) => "constant",
            CaseSelector::Custom(_) => "custom",
        }
    }

    pub fn is_named(&self) -> bool {
        !matches!(self, CaseSelector::Constant(_) | CaseSelector::Custom(_))
    }

    /// The coupling as a scalar field with analytic gradient where available.
    pub fn field(&self, params: &SystemParams) -> ScalarField {
        match self {
            CaseSelector::CasimirF1 => ScalarField::casimir_f1(),
            CaseSelector::CasimirF2 => ScalarField::casimir_f2(),
            CaseSelector::H2Case => ScalarField::h2(params),
            CaseSelector::GammaChi => ScalarField::gamma_chi(params),
            CaseSelector::MSquared => ScalarField::m_squared(),
            CaseSelector::Constant(c) => ScalarField::constant(*c),
            CaseSelector::Custom(f) => f.clone(),
        }
    }
}

/// Value of the coupling `a` at `state`.
pub fn coupling_a(state: &E3State, params: &SystemParams, case: &CaseSelector) -> f64 {
    let (m, g) = (&state.m, &state.gamma);
    match case {
        CaseSelector::CasimirF1 => m.dot(g),
        CaseSelector::CasimirF2 => g.norm_squared(),
        CaseSelector::H2Case => params.x0() * m.x + params.z0() * m.z,
        CaseSelector::GammaChi => params.x0() * g.x + params.z0() * g.z,
        CaseSelector::MSquared => m.norm_squared(),
        CaseSelector::Constant(c) => *c,
        CaseSelector::Custom(f) => f.value(state),
    }
}

/// Component form of the field for an explicit coupling value `a`.
pub fn field_with_coupling(state: &E3State, params: &SystemParams, a: f64) -> Vec6 {
    let (x0, z0, i2) = (params.x0(), params.z0(), params.i2());
    let (m, g) = (&state.m, &state.gamma);
    Vec6::new(
        z0 * g.y + a * z0 * m.y,
        x0 * g.z - z0 * g.x + a * (x0 * m.z - z0 * m.x),
        -x0 * g.y - a * x0 * m.y,
        (g.y * m.z - g.z * m.y) / i2 + a * z0 * g.y,
        (g.z * m.x - g.x * m.z) / i2 + a * (x0 * g.z - z0 * g.x),
        (g.x * m.y - g.y * m.x) / i2 - a * x0 * g.y,
    )
}

pub fn vector_field(state: &E3State, params: &SystemParams, case: &CaseSelector) -> Vec6 {
    field_with_coupling(state, params, coupling_a(state, params, case))
}

/// The same field assembled from the bracket engine: `{xⁱ,H₁} + a{xⁱ,H₂}`.
pub fn vector_field_bracket_form(
    state: &E3State,
    params: &SystemParams,
    case: &CaseSelector,
) -> Result<Vec6> {
    let a = coupling_a(state, params, case);
    let x1 = field::hamiltonian_vector_field(&ScalarField::h1(params), state)?;
    let x2 = field::hamiltonian_vector_field(&ScalarField::h2(params), state)?;
    Ok(x1 + x2 * a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    /// `Σᵢ ∂fᵢ/∂xᵢ` by central differences.
    pub numeric: f64,
    /// `{a, H₂}` from the bracket engine.
    pub analytic: f64,
}

pub fn divergence(state: &E3State, params: &SystemParams, case: &CaseSelector) -> Result<Divergence> {
    let x = state.to_vec6();
    let mut numeric = 0.0;
    for i in 0..6 {
        let h = field::FD_STEP * x[i].abs().max(1.0);
        let mut plus = x;
        let mut minus = x;
        plus[i] += h;
        minus[i] -= h;
        let fp = vector_field(&E3State::from_vec6(&plus), params, case)[i];
        let fm = vector_field(&E3State::from_vec6(&minus), params, case)[i];
        numeric += (fp - fm) / (2.0 * h);
    }
    let analytic = field::bracket(&case.field(params), &ScalarField::h2(params), state)?;
    Ok(Divergence { numeric, analytic })
}

/// Outcome of the Hamiltonian classification of a coupling.
#[derive(Debug, Clone)]
pub enum Witness {
    /// The flow is `xⁱ ↦ {xⁱ, H}` for the carried function.
    Hamiltonian(ScalarField),
    /// Not Hamiltonian in the e(3) structure: `GammaChi` and `MSquared`.
    NotHamiltonian,
    /// No classification is available for constant or custom couplings.
    Undetermined,
}

pub fn hamiltonian_witness(case: &CaseSelector, params: &SystemParams) -> Witness {
    let h1 = ScalarField::h1(params);
    let h2 = ScalarField::h2(params);
    match case {
        CaseSelector::CasimirF1 | CaseSelector::CasimirF2 => {
            // H = H₁ + a·H₂ with a a Casimir.
            let a = case.field(params);
            let (h1e, h2e, ae) = (h1.clone(), h2.clone(), a.clone());
            let name = format!("H1+{}*H2", a.name());
            Witness::Hamiltonian(
                ScalarField::new(name, move |s| h1e.value(s) + ae.value(s) * h2e.value(s))
                    .with_gradient(move |s| {
                        h1.gradient(s) + h2.gradient(s) * a.value(s) + a.gradient(s) * h2.value(s)
                    }),
            )
        }
        CaseSelector::H2Case => {
            let (h1e, h2e) = (h1.clone(), h2.clone());
            Witness::Hamiltonian(
                ScalarField::new("H1+H2^2/2", move |s| h1e.value(s) + 0.5 * h2e.value(s).powi(2))
                    .with_gradient(move |s| h1.gradient(s) + h2.gradient(s) * h2.value(s)),
            )
        }
        CaseSelector::GammaChi | CaseSelector::MSquared => Witness::NotHamiltonian,
        CaseSelector::Constant(_) | CaseSelector::Custom(_) => Witness::Undetermined,
    }
}

/// `max |{xⁱ, H} − fieldⁱ|` at one state for a Hamiltonian witness.
pub fn witness_residual(
    h: &ScalarField,
    state: &E3State,
    params: &SystemParams,
    case: &CaseSelector,
) -> Result<f64> {
    let xh = field::hamiltonian_vector_field(h, state)?;
    Ok((xh - vector_field(state, params, case)).amax())
}

/// Time-sampled solution of one member of the family.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<E3State>,
    /// `(F₁, F₂, H₁, H₂)` at each sample.
    pub invariant_log: Vec<[f64; 4]>,
    pub params: SystemParams,
    pub case: CaseSelector,
    pub settings: SolverSettings,
    pub seed: Option<u64>,
}

impl Trajectory {
    fn from_samples(
        samples: Samples,
        params: SystemParams,
        case: CaseSelector,
        settings: SolverSettings,
    ) -> Self {
        let states: Vec<E3State> = samples.states.iter().map(E3State::from_vec6).collect();
        let invariant_log = states.iter().map(|s| integrals(s, &params)).collect();
        Self {
            times: samples.times,
            states,
            invariant_log,
            params,
            case,
            settings,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest relative drift of each of `(F₁, F₂, H₁, H₂)` from its initial
    /// value, normalised by `max(1, |initial|)`.
    pub fn invariant_drift(&self) -> [f64; 4] {
        let mut drift = [0.0; 4];
        if let Some(first) = self.invariant_log.first() {
            for row in &self.invariant_log {
                for k in 0..4 {
                    let d = (row[k] - first[k]).abs() / first[k].abs().max(1.0);
                    drift[k] = f64::max(drift[k], d);
                }
            }
        }
        drift
    }
}

/// Integrates the family from `state0` over `[0, settings.t_end]`.
pub fn integrate(
    state0: &E3State,
    params: &SystemParams,
    case: &CaseSelector,
    settings: &SolverSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    if !state0.is_finite() {
        return Err(Error::InvalidParams("initial state is not finite".into()));
    }
    let f = |y: &Vec6| vector_field(&E3State::from_vec6(y), params, case);
    match ode::integrate_samples(f, state0.to_vec6(), settings) {
        Ok(samples) => Ok(Trajectory::from_samples(samples, *params, case.clone(), *settings)),
        Err(fail) => Err(Error::StepUnderflow {
            t: fail.t,
            partial: Box::new(Trajectory::from_samples(
                fail.samples,
                *params,
                case.clone(),
                *settings,
            )),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SystemParams {
        SystemParams::new(1.3, 0.8, -0.45).unwrap()
    }

    #[test]
    fn coupling_values() {
        let p = SystemParams::new(1.0, 1.0, 2.0).unwrap();
        let s = E3State::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert_eq!(coupling_a(&s, &p, &CaseSelector::CasimirF1), 0.0);
        let s = E3State::new([1.0, 2.0, 3.0], [0.0; 3]);
        assert_eq!(coupling_a(&s, &p, &CaseSelector::MSquared), 14.0);
        let s = E3State::new([3.0, 0.0, 4.0], [0.0; 3]);
        assert_eq!(coupling_a(&s, &p, &CaseSelector::H2Case), 11.0);
    }

    #[test]
    fn hand_substituted_field() {
        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        let s = E3State::new([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        let f = vector_field(&s, &p, &CaseSelector::H2Case);
        assert_eq!(f, Vec6::new(0.0, 1.0, 0.0, 0.0, 2.0, 0.0));
    }

    #[test]
    fn equilibrium_is_fixed_for_every_case() {
        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        let s = E3State::new([0.0; 3], [1.0, 0.0, 0.0]);
        for case in CaseSelector::named().into_iter().chain([CaseSelector::Constant(2.5)]) {
            assert_eq!(vector_field(&s, &p, &case), Vec6::zeros(), "{case:?}");
        }
    }

    #[test]
    fn component_and_bracket_forms_agree() {
        let p = params();
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        for case in CaseSelector::named() {
            let a = vector_field(&s, &p, &case);
            let b = vector_field_bracket_form(&s, &p, &case).unwrap();
            assert!((a - b).amax() < 1e-12, "{case:?}");
        }
    }

    #[test]
    fn divergence_examples() {
        let p = params();
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        let d = divergence(&s, &p, &CaseSelector::GammaChi).unwrap();
        assert!(d.analytic.abs() < 1e-15);
        assert!(d.numeric.abs() < 1e-8);
        let d = divergence(&s, &p, &CaseSelector::Constant(3.0)).unwrap();
        assert_eq!(d.analytic, 0.0);

        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        let m2 = CaseSelector::Custom(ScalarField::coordinate(1));
        let s = E3State::new([0.0, 0.0, 2.0], [0.0; 3]);
        let d = divergence(&s, &p, &m2).unwrap();
        assert_eq!(d.analytic, 2.0);
        assert!((d.numeric - 2.0).abs() < 1e-8);
    }

    #[test]
    fn witness_classification() {
        let p = params();
        assert!(matches!(hamiltonian_witness(&CaseSelector::GammaChi, &p), Witness::NotHamiltonian));
        assert!(matches!(hamiltonian_witness(&CaseSelector::MSquared, &p), Witness::NotHamiltonian));
        assert!(matches!(hamiltonian_witness(&CaseSelector::Constant(1.0), &p), Witness::Undetermined));
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        for case in [CaseSelector::CasimirF1, CaseSelector::CasimirF2, CaseSelector::H2Case] {
            let Witness::Hamiltonian(h) = hamiltonian_witness(&case, &p) else {
                panic!("{case:?} should be Hamiltonian");
            };
            assert!(witness_residual(&h, &s, &p, &case).unwrap() < 1e-12);
        }
        let Witness::Hamiltonian(h) = hamiltonian_witness(&CaseSelector::H2Case, &p) else {
            unreachable!()
        };
        assert_eq!(h.name(), "H1+H2^2/2");
    }

    #[test]
    fn equilibrium_trajectory_is_constant() {
        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        let s = E3State::new([0.0; 3], [1.0, 0.0, 0.0]);
        let traj = integrate(&s, &p, &CaseSelector::MSquared, &SolverSettings::adaptive(5.0, 0.5)).unwrap();
        assert!(traj.states.iter().all(|x| *x == s));
    }

    #[test]
    fn rk4_conserves_integrals_reasonably() {
        let p = params();
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        let settings = SolverSettings::new(Method::Rk4 { step: 1e-3 }, 5.0, 0.1).unwrap();
        let traj = integrate(&s, &p, &CaseSelector::CasimirF1, &settings).unwrap();
        assert!(traj.invariant_drift().iter().all(|d| *d < 1e-9));
    }
}
