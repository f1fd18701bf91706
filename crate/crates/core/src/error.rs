use crate::dynamics::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),

    #[error("non-finite gradient of `{field}`")]
    NonFiniteGradient { field: String },

    #[error("Lax matrix has a pole at lambda = 0")]
    LaxPole,

    #[error("r-matrix is singular: lambda == mu")]
    SingularRMatrix,

    #[error("step size underflow at t = {t}")]
    StepUnderflow {
        t: f64,
        /// Samples produced before the failure.
        partial: Box<Trajectory>,
    },

    #[error("integration failed at t = {t}")]
    IntegrationFailed { t: f64 },

    #[error("polar chart degenerates: u = {u}")]
    PolarDegeneracy { u: f64 },

    #[error("coupling `{0}` cannot be expressed through the reduced variables")]
    CouplingNotReducible(String),

    #[error("{curve} curve is singular (discriminant {discriminant:e})")]
    SingularCurve {
        curve: &'static str,
        discriminant: f64,
    },

    #[error("weierstrass function has a pole at z = {z}; nearest lattice point estimate {nearest}")]
    WeierstrassPole { z: C64Display, nearest: C64Display },

    #[error("initial value u0 = {u0} lies outside the bounded oscillation [{lower}, {upper}]")]
    OutsideOscillation { u0: f64, lower: f64, upper: f64 },

    #[error("separation chart is singular: {0} = 0")]
    CoordinateSingularity(&'static str),

    #[error("state is off the invariant hypersurface: x0*M1 + z0*M3 = {0:e}")]
    OffSurface(f64),
}

/// Wrapper giving complex numbers a compact `Display` in error messages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C64Display(pub crate::C64);

impl std::fmt::Display for C64Display {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}
