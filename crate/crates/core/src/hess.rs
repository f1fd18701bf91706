//! The Hess-Appel'rot heavy top.
//!
//! Euler-Poisson equations with inertia `diag(I₁, I₂, I₃)` and centre of
//! mass `χ = (x₀, 0, z₀)`:
//!
//! ```text
//! Ṁ = M × Ω + Γ × χ,   Γ̇ = Γ × Ω,   Ω = (M₁/I₁, M₂/I₂, M₃/I₃).
//! ```
//!
//! The Hess-Appel'rot condition `x₀√(I₁(I₂−I₃)) + z₀√(I₃(I₁−I₂)) = 0` makes
//! `x₀M₁ + z₀M₃ = 0` an invariant relation. On that hypersurface the flow
//! coincides with a member of the family with a state-dependent coupling.
//!
//! The energy used as a conservation check is `½⟨M,Ω⟩ + ⟨Γ,χ⟩`. The form
//! `½⟨M,Ω⟩ + ⟨Γ,Ω⟩` is also available and is reported without being
//! expected to hold.

use nalgebra::Vector3;
use rand::Rng;

use crate::dynamics::field_with_coupling;
use crate::e3::{casimirs, E3State, SystemParams, Vec6};
use crate::ode::{self, SolverSettings};
use crate::separation::{sep_vars, separation_relation_residuals, SeparationVars};
use crate::{Error, Result};

/// Principal moments with `I₁ ≥ I₂ ≥ I₃ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaTriple {
    i1: f64,
    i2: f64,
    i3: f64,
}

impl InertiaTriple {
    pub fn new(i1: f64, i2: f64, i3: f64) -> Result<Self> {
        if !(i1.is_finite() && i2.is_finite() && i3.is_finite()) {
            return Err(Error::InvalidParams("non-finite moment of inertia".into()));
        }
        if !(i1 >= i2 && i2 >= i3 && i3 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "inertia must satisfy I1 >= I2 >= I3 > 0, got ({i1}, {i2}, {i3})"
            )));
        }
        Ok(Self { i1, i2, i3 })
    }

    pub fn i1(&self) -> f64 {
        self.i1
    }

    pub fn i2(&self) -> f64 {
        self.i2
    }

    pub fn i3(&self) -> f64 {
        self.i3
    }

    /// `Ω = I⁻¹M`.
    pub fn omega(&self, m: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(m.x / self.i1, m.y / self.i2, m.z / self.i3)
    }
}

/// Tolerance on the Hess-Appel'rot condition, relative to the size of its terms.
pub const CONDITION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HAParams {
    inertia: InertiaTriple,
    x0: f64,
    z0: f64,
}

impl HAParams {
    /// Checks the Hess-Appel'rot condition and rejects `χ = 0`.
    pub fn new(inertia: InertiaTriple, x0: f64, z0: f64) -> Result<Self> {
        let a = x0 * (inertia.i1 * (inertia.i2 - inertia.i3)).sqrt();
        let b = z0 * (inertia.i3 * (inertia.i1 - inertia.i2)).sqrt();
        if !(a + b).is_finite() || (a + b).abs() > CONDITION_TOL * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::InvalidParams(format!(
                "(x0, z0) = ({x0}, {z0}) violates the Hess-Appel'rot condition by {:e}",
                a + b
            )));
        }
        if x0 == 0.0 && z0 == 0.0 {
            return Err(Error::InvalidParams("x0 and z0 are both zero".into()));
        }
        Ok(Self { inertia, x0, z0 })
    }

    pub fn inertia(&self) -> InertiaTriple {
        self.inertia
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn chi(&self) -> Vector3<f64> {
        Vector3::new(self.x0, 0.0, self.z0)
    }

    /// Family parameters `(I₂, x₀, z₀)`.
    pub fn system_params(&self) -> SystemParams {
        SystemParams::new(self.inertia.i2, self.x0, self.z0)
            .expect("validated Hess-Appel'rot parameters are valid family parameters")
    }
}

/// `x₀ = −scale·√(I₃(I₁−I₂))`, `z₀ = scale·√(I₁(I₂−I₃))`.
pub fn ha_admissible_params(inertia: InertiaTriple, scale: f64) -> Result<HAParams> {
    if !(scale.is_finite() && scale != 0.0) {
        return Err(Error::InvalidParams(format!("scale must be finite and nonzero, got {scale}")));
    }
    let x0 = -scale * (inertia.i3 * (inertia.i1 - inertia.i2)).sqrt();
    let z0 = scale * (inertia.i1 * (inertia.i2 - inertia.i3)).sqrt();
    HAParams::new(inertia, x0, z0)
}

pub fn ha_field(state: &E3State, params: &HAParams) -> Vec6 {
    let omega = params.inertia.omega(&state.m);
    let md = state.m.cross(&omega) + state.gamma.cross(&params.chi());
    let gd = state.gamma.cross(&omega);
    Vec6::new(md.x, md.y, md.z, gd.x, gd.y, gd.z)
}

/// `½⟨M,Ω⟩ + ⟨Γ,χ⟩`.
pub fn energy(state: &E3State, params: &HAParams) -> f64 {
    0.5 * state.m.dot(&params.inertia.omega(&state.m)) + state.gamma.dot(&params.chi())
}

/// `½⟨M,Ω⟩ + ⟨Γ,Ω⟩`.
pub fn energy_omega_form(state: &E3State, params: &HAParams) -> f64 {
    let omega = params.inertia.omega(&state.m);
    0.5 * state.m.dot(&omega) + state.gamma.dot(&omega)
}

/// `x₀M₁ + z₀M₃`.
pub fn invariant_relation(state: &E3State, params: &HAParams) -> f64 {
    params.x0 * state.m.x + params.z0 * state.m.z
}

/// `κ` in `d/dt (x₀M₁ + z₀M₃) = κ M₂ (x₀M₁ + z₀M₃)`.
///
/// Equals `x₀z₀(1/I₃ − 1/I₁)/(x₀² + z₀²)`. The hypersurface is invariant but
/// a deviation from it is scaled by `exp(κ∫M₂ dt)`.
pub fn transverse_rate(params: &HAParams) -> f64 {
    let i = params.inertia;
    params.x0 * params.z0 * (1.0 / i.i3 - 1.0 / i.i1) / (params.x0 * params.x0 + params.z0 * params.z0)
}

/// `d/dt (x₀M₁ + z₀M₃)` along the Euler-Poisson field.
pub fn relation_rate(state: &E3State, params: &HAParams) -> f64 {
    let f = ha_field(state, params);
    params.x0 * f[0] + params.z0 * f[2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<E3State>,
    pub params: HAParams,
}

/// Largest deviations along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaDrift {
    /// Relative drift of `½⟨M,Ω⟩ + ⟨Γ,χ⟩`.
    pub energy: f64,
    /// Relative drift of the form `½⟨M,Ω⟩ + ⟨Γ,Ω⟩`.
    pub energy_omega: f64,
    pub f1: f64,
    pub f2: f64,
    /// `max |x₀M₁ + z₀M₃|`.
    pub invariant_relation: f64,
    /// `max over s ≤ t of κ∫ₛᵗM₂`: the log of the largest factor by which a
    /// deviation from the hypersurface made at one sample can grow by a
    /// later one. Trapezoidal rule on the sample grid.
    pub log_amplification: f64,
}

impl HaTrajectory {
    fn log_amplification(&self) -> f64 {
        let k = transverse_rate(&self.params);
        let (mut integral, mut lowest, mut worst) = (0.0, 0.0, 0.0f64);
        for w in 1..self.times.len() {
            let dt = self.times[w] - self.times[w - 1];
            integral += 0.5 * dt * k * (self.states[w].m.y + self.states[w - 1].m.y);
            lowest = f64::min(lowest, integral);
            worst = worst.max(integral - lowest);
        }
        worst
    }

    pub fn drift(&self) -> HaDrift {
        let p = &self.params;
        let rel = |f: &dyn Fn(&E3State) -> f64| {
            let f0 = f(&self.states[0]);
            self.states
                .iter()
                .map(|s| (f(s) - f0).abs() / f0.abs().max(1.0))
                .fold(0.0, f64::max)
        };
        HaDrift {
            energy: rel(&|s| energy(s, p)),
            energy_omega: rel(&|s| energy_omega_form(s, p)),
            f1: rel(&|s| casimirs(s).0),
            f2: rel(&|s| casimirs(s).1),
            invariant_relation: self
                .states
                .iter()
                .map(|s| invariant_relation(s, p).abs())
                .fold(0.0, f64::max),
            log_amplification: self.log_amplification(),
        }
    }
}

pub fn integrate_ha(state0: &E3State, params: &HAParams, settings: &SolverSettings) -> Result<HaTrajectory> {
    settings.validate()?;
    let f = |y: &Vec6| ha_field(&E3State::from_vec6(y), params);
    let samples = ode::integrate_samples(f, state0.to_vec6(), settings)
        .map_err(|fail| Error::IntegrationFailed { t: fail.t })?;
    Ok(HaTrajectory {
        times: samples.times,
        states: samples.states.iter().map(E3State::from_vec6).collect(),
        params: *params,
    })
}

/// The two readings of the coupling that identifies the flows on the hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingCandidate {
    /// `(αΩ₁ + βΩ₂)/√(x₀² + z₀²)`.
    Literal,
    /// `(αΩ₁ + βΩ₃)/√(x₀² + z₀²)`.
    Index3,
}

impl CouplingCandidate {
    pub const ALL: [CouplingCandidate; 2] = [CouplingCandidate::Literal, CouplingCandidate::Index3];

    pub fn name(&self) -> &'static str {
        match self {
            CouplingCandidate::Literal => "a_literal",
            CouplingCandidate::Index3 => "a_index3",
        }
    }

    pub fn value(&self, state: &E3State, params: &HAParams) -> f64 {
        let sp = params.system_params();
        let o = params.inertia.omega(&state.m);
        let second = match self {
            CouplingCandidate::Literal => o.y,
            CouplingCandidate::Index3 => o.z,
        };
        (sp.alpha() * o.x + sp.beta() * second) / sp.chi_norm()
    }
}

/// `‖ha_field − family_field(a)‖∞` for each candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub literal: f64,
    pub index3: f64,
}

impl EquivalenceReport {
    pub fn residual(&self, c: CouplingCandidate) -> f64 {
        match c {
            CouplingCandidate::Literal => self.literal,
            CouplingCandidate::Index3 => self.index3,
        }
    }

    /// The candidate with the smaller residual, if it is below `tol`.
    pub fn matched(&self, tol: f64) -> Option<CouplingCandidate> {
        let best = if self.index3 <= self.literal {
            CouplingCandidate::Index3
        } else {
            CouplingCandidate::Literal
        };
        (self.residual(best) < tol).then_some(best)
    }
}

/// States farther than this from the hypersurface are rejected.
pub const SURFACE_TOL: f64 = 1e-10;

pub fn verify_ha_equivalence(state: &E3State, params: &HAParams) -> Result<EquivalenceReport> {
    let rel = invariant_relation(state, params);
    if rel.is_nan() || rel.abs() >= SURFACE_TOL {
        return Err(Error::OffSurface(rel));
    }
    let sp = params.system_params();
    let target = ha_field(state, params);
    let residual = |c: CouplingCandidate| {
        (target - field_with_coupling(state, &sp, c.value(state, params))).amax()
    };
    Ok(EquivalenceReport {
        literal: residual(CouplingCandidate::Literal),
        index3: residual(CouplingCandidate::Index3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaSeparation {
    pub vars: SeparationVars,
    /// `|μ₂|`, zero exactly on the hypersurface.
    pub mu2_abs: f64,
    /// Residual of the `μ₁²` relation.
    pub relation_residual: f64,
}

/// Separation variables of the family evaluated with `I₂` of the top.
/// Off the hypersurface `μ₂ ≠ 0` is reported, not rejected.
pub fn ha_separation(state: &E3State, params: &HAParams) -> Result<HaSeparation> {
    let sp = params.system_params();
    let vars = sep_vars(state, &sp)?;
    let (r1, _) = separation_relation_residuals(state, &sp)?;
    Ok(HaSeparation {
        vars,
        mu2_abs: vars.mu2.norm(),
        relation_residual: r1,
    })
}

/// A state with `x₀M₁ + z₀M₃ = 0`: `M₂` and the component of `M` along
/// `(−z₀, 0, x₀)` uniform in `[−range, range]`, `Γ` uniform in the box.
pub fn sample_on_surface(rng: &mut impl Rng, params: &HAParams, range: f64) -> E3State {
    let s = params.x0.hypot(params.z0);
    let m2 = rng.random_range(-range..=range);
    let m_perp = rng.random_range(-range..=range);
    let g: [f64; 3] = std::array::from_fn(|_| rng.random_range(-range..=range));
    E3State::new([-m_perp * params.z0 / s, m2, m_perp * params.x0 / s], g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn params() -> HAParams {
        ha_admissible_params(InertiaTriple::new(3.0, 2.0, 1.0).unwrap(), -1.0).unwrap()
    }

    #[test]
    fn admissible_example() {
        let p = params();
        assert!((p.x0() - 1.0).abs() < 1e-15);
        assert!((p.z0() + 3f64.sqrt()).abs() < 1e-15);
        let q = ha_admissible_params(p.inertia(), 1.0).unwrap();
        assert_eq!((q.x0(), q.z0()), (-p.x0(), -p.z0()));
    }

    #[test]
    fn rejected_parameters() {
        let sphere = InertiaTriple::new(2.0, 2.0, 2.0).unwrap();
        assert!(ha_admissible_params(sphere, 1.0).is_err());
        assert!(InertiaTriple::new(1.0, 2.0, 3.0).is_err());
        assert!(HAParams::new(InertiaTriple::new(3.0, 2.0, 1.0).unwrap(), 1.0, 1.0).is_err());
    }

    #[test]
    fn equilibrium_and_relation() {
        let p = params();
        let s = E3State::new([0.0; 3], [2.0, 0.0, -2.0 * 3f64.sqrt()]);
        assert_eq!(ha_field(&s, &p), Vec6::zeros());
        let s = E3State::new([3f64.sqrt(), 5.0, 1.0], [0.0; 3]);
        assert!(invariant_relation(&s, &p).abs() < 1e-15);
    }

    #[test]
    fn index3_coupling_matches() {
        let p = params();
        let mut rng = sampling::rng(3);
        for _ in 0..20 {
            let s = sample_on_surface(&mut rng, &p, 2.0);
            let r = verify_ha_equivalence(&s, &p).unwrap();
            assert!(r.index3 < 1e-12, "{r:?}");
            assert_eq!(r.matched(1e-10), Some(CouplingCandidate::Index3));
            let sep = ha_separation(&s, &p).unwrap();
            assert!(sep.mu2_abs < 1e-14);
        }
        let off = E3State::new([1.0, 0.0, 0.0], [0.0; 3]);
        assert!(matches!(verify_ha_equivalence(&off, &p), Err(Error::OffSurface(_))));
    }

    #[test]
    fn relation_rate_is_proportional_to_relation() {
        let p = params();
        assert!((transverse_rate(&p) + 3f64.sqrt() / 6.0).abs() < 1e-15);
        let mut rng = sampling::rng(8);
        for _ in 0..50 {
            let s = sampling::uniform_state(&mut rng, 2.0);
            let expected = transverse_rate(&p) * s.m.y * invariant_relation(&s, &p);
            assert!((relation_rate(&s, &p) - expected).abs() < 1e-13);
            let on = sample_on_surface(&mut rng, &p, 2.0);
            assert!(relation_rate(&on, &p).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_momentum_gives_zero_residuals() {
        let p = params();
        let s = E3State::new([0.0; 3], [0.3, -0.2, 0.9]);
        let r = verify_ha_equivalence(&s, &p).unwrap();
        assert_eq!((r.literal, r.index3), (0.0, 0.0));
    }
}
