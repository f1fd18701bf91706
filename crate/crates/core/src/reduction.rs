//! Reduction to a single cubic equation.
//!
//! Rotating the body frame so that the first axis is along `χ` gives
//! coordinates `X = R·M`, `Y = R·Γ` with
//!
//! ```text
//!     ⎡ α  0  β⎤
//! R = ⎢ 0  1  0⎥ ,   α = x₀/s,  β = z₀/s,  s = √(x₀² + z₀²).
//!     ⎣−β  0  α⎦
//! ```
//!
//! In this frame `X₁` is conserved and the integrals read
//!
//! ```text
//! c₁ = X·Y,  c₂ = |Y|²,  d₁ = |X|²/(2I₂s) + Y₁,  d₂ = X₁.
//! ```
//!
//! Writing `X₂ + iX₃ = ρ e^{iσ}` and `u = ρ²`, the transverse momentum obeys
//!
//! ```text
//! u̇² = −u³/I₂² − Bu² − Cu − D
//! ```
//!
//! for every coupling `a`. The angle follows by a quadrature that does
//! depend on `a`, and `Y` is then recovered algebraically.

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::{vector_field, CaseSelector, Trajectory};
use crate::e3::{E3State, SystemParams};
use crate::{Error, Result};

/// `(X, Y)`: a state in the frame aligned with `χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedState {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
}

impl RotatedState {
    pub fn polar(&self) -> PolarReduced {
        PolarReduced {
            u: self.x.y * self.x.y + self.x.z * self.x.z,
            sigma: self.x.z.atan2(self.x.y),
        }
    }
}

fn rotation(params: &SystemParams) -> Matrix3<f64> {
    let (a, b) = (params.alpha(), params.beta());
    Matrix3::new(a, 0.0, b, 0.0, 1.0, 0.0, -b, 0.0, a)
}

pub fn rotate(state: &E3State, params: &SystemParams) -> RotatedState {
    let r = rotation(params);
    RotatedState {
        x: r * state.m,
        y: r * state.gamma,
    }
}

pub fn unrotate(rotated: &RotatedState, params: &SystemParams) -> E3State {
    let rt = rotation(params).transpose();
    E3State {
        m: rt * rotated.x,
        gamma: rt * rotated.y,
    }
}

/// `ρ² = X₂² + X₃²` and the polar angle `σ` of `(X₂, X₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarReduced {
    pub u: f64,
    pub sigma: f64,
}

/// Values of the integrals in the rotated frame and the coefficients of the
/// reduced cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedConstants {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    /// `d₁ − d₂²/(2I₂s)`.
    pub a_shift: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ReducedConstants {
    /// Right-hand side `−u³/I₂² − Bu² − Cu − D`.
    pub fn cubic(&self, u: f64, i2: f64) -> f64 {
        -u * u * u / (i2 * i2) - self.b * u * u - self.c * u - self.d
    }

    /// Coefficients of the cubic in descending powers of `u`.
    pub fn cubic_coefficients(&self, i2: f64) -> [f64; 4] {
        [-1.0 / (i2 * i2), -self.b, -self.c, -self.d]
    }

    /// `Y₁` as a function of `u`.
    pub fn y1(&self, u: f64, params: &SystemParams) -> f64 {
        self.d1 - (self.d2 * self.d2 + u) / (2.0 * params.i2() * params.chi_norm())
    }
}

pub fn reduced_constants(state: &E3State, params: &SystemParams) -> ReducedConstants {
    let r = rotate(state, params);
    let (i2, s) = (params.i2(), params.chi_norm());
    let c1 = r.x.dot(&r.y);
    let c2 = r.y.norm_squared();
    let d1 = r.x.norm_squared() / (2.0 * i2 * s) + r.y.x;
    let d2 = r.x.x;
    let a = d1 - d2 * d2 / (2.0 * i2 * s);
    let b = -4.0 * a * s / i2 + d2 * d2 / (i2 * i2);
    let c = 4.0 * s * s * (a * a - c2 + d2 * (c1 - d2 * a) / (i2 * s));
    let d = 4.0 * s * s * (c1 - d2 * a).powi(2);
    ReducedConstants {
        c1,
        c2,
        d1,
        d2,
        a_shift: a,
        b,
        c,
        d,
    }
}

/// `(u, u̇)` at one state, with `u̇ = 2(X₂Ẋ₂ + X₃Ẋ₃)` taken from the field.
pub fn u_and_udot(state: &E3State, params: &SystemParams, case: &CaseSelector) -> (f64, f64) {
    let r = rotate(state, params);
    let f = vector_field(state, params, case);
    let xdot = rotation(params) * Vector3::new(f[0], f[1], f[2]);
    let u = r.x.y * r.x.y + r.x.z * r.x.z;
    (u, 2.0 * (r.x.y * xdot.y + r.x.z * xdot.z))
}

/// Sampled `u(t)` together with its exact derivative.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct USeries {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub udot: Vec<f64>,
}

pub fn u_series(trajectory: &Trajectory) -> USeries {
    let mut out = USeries {
        times: trajectory.times.clone(),
        ..USeries::default()
    };
    for s in &trajectory.states {
        let (u, ud) = u_and_udot(s, &trajectory.params, &trajectory.case);
        out.u.push(u);
        out.udot.push(ud);
    }
    out
}

/// Largest `|u̇² − cubic(u)|` along the trajectory, with the constants taken
/// from its first sample.
pub fn reduction_residual(trajectory: &Trajectory, params: &SystemParams) -> f64 {
    let Some(first) = trajectory.states.first() else {
        return 0.0;
    };
    let k = reduced_constants(first, params);
    trajectory
        .states
        .iter()
        .map(|s| {
            let (u, ud) = u_and_udot(s, params, &trajectory.case);
            (ud * ud - k.cubic(u, params.i2())).abs()
        })
        .fold(0.0, f64::max)
}

/// `σ̇ = −(s/u)·[c₁ − d₂Y₁(u) + a·u]`.
pub fn sigma_rhs(u: f64, constants: &ReducedConstants, a_value: f64, params: &SystemParams) -> Result<f64> {
    if u.is_nan() || u <= 0.0 {
        return Err(Error::PolarDegeneracy { u });
    }
    let k = constants;
    let s = params.chi_norm();
    Ok(-(s / u) * (k.c1 - k.d2 * k.y1(u, params) + a_value * u))
}

/// The coupling expressed through `u` and the reduced constants.
///
/// Custom couplings have no such expression and are rejected.
pub fn a_along_reduction(
    case: &CaseSelector,
    u: f64,
    constants: &ReducedConstants,
    params: &SystemParams,
) -> Result<f64> {
    let k = constants;
    let s = params.chi_norm();
    match case {
        CaseSelector::CasimirF1 => Ok(k.c1),
        CaseSelector::CasimirF2 => Ok(k.c2),
        CaseSelector::H2Case => Ok(s * k.d2),
        CaseSelector::GammaChi => Ok(s * k.y1(u, params)),
        CaseSelector::MSquared => Ok(k.d2 * k.d2 + u),
        CaseSelector::Constant(c) => Ok(*c),
        CaseSelector::Custom(f) => Err(Error::CouplingNotReducible(f.name().to_string())),
    }
}

/// Threshold below which the polar chart is treated as degenerate.
pub const U_FLOOR: f64 = 1e-10;

/// Output of [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub times: Vec<f64>,
    pub sigma: Vec<f64>,
    pub states: Vec<RotatedState>,
    /// Set when `u` fell to [`U_FLOOR`] and the window was cut short.
    pub truncated: bool,
    /// Largest `|Y₂² + Y₃² − (c₂ − Y₁²)|` over the window.
    pub consistency: f64,
}

impl Reconstruction {
    pub fn e3_states(&self, params: &SystemParams) -> Vec<E3State> {
        self.states.iter().map(|r| unrotate(r, params)).collect()
    }
}

// Integral over [a, b] of the Lagrange interpolant through (ts, fs), by
// three-point Gauss-Legendre (exact up to degree 5).
fn interpolant_integral(ts: &[f64], fs: &[f64], a: f64, b: f64) -> f64 {
    const NODES: [(f64, f64); 3] = [
        (-0.774_596_669_241_483_4, 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        (0.774_596_669_241_483_4, 5.0 / 9.0),
    ];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in NODES {
        let t = mid + half * x;
        let mut p = 0.0;
        for i in 0..ts.len() {
            let mut l = 1.0;
            for j in 0..ts.len() {
                if i != j {
                    l *= (t - ts[j]) / (ts[i] - ts[j]);
                }
            }
            p += l * fs[i];
        }
        acc += w * p;
    }
    acc * half
}

/// Cumulative integral of sampled `f` on a possibly non-uniform grid, using
/// the local cubic interpolant on each interval.
pub fn cumulative_integral(times: &[f64], f: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut out = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let width = n.min(4);
        let lo = i.saturating_sub(1).min(n - width);
        let w = lo..lo + width;
        out[i + 1] = out[i] + interpolant_integral(&times[w.clone()], &f[w], times[i], times[i + 1]);
    }
    out
}

/// Rebuilds `(X, Y)` from a `u` series, the initial angle and the constants.
pub fn reconstruct(
    series: &USeries,
    sigma0: f64,
    constants: &ReducedConstants,
    params: &SystemParams,
    case: &CaseSelector,
) -> Result<Reconstruction> {
    let n = series.u.iter().take_while(|&&u| u > U_FLOOR).count();
    if n == 0 {
        return Err(Error::PolarDegeneracy {
            u: series.u.first().copied().unwrap_or(0.0),
        });
    }
    let truncated = n < series.u.len();
    let times = &series.times[..n];
    let s = params.chi_norm();
    let mut rate = Vec::with_capacity(n);
    for &u in &series.u[..n] {
        let a = a_along_reduction(case, u, constants, params)?;
        rate.push(sigma_rhs(u, constants, a, params)?);
    }
    let sigma: Vec<f64> = cumulative_integral(times, &rate)
        .into_iter()
        .map(|v| sigma0 + v)
        .collect();

    let k = constants;
    let mut states = Vec::with_capacity(n);
    let mut consistency: f64 = 0.0;
    for ((&u, &ud), &angle) in series.u[..n].iter().zip(&series.udot[..n]).zip(&sigma) {
        let rho = u.sqrt();
        let (x2, x3) = (rho * angle.cos(), rho * angle.sin());
        let y1 = k.y1(u, params);
        let r1 = k.c1 - k.d2 * y1;
        // I₂Ẏ₁ with Ẏ₁ = −u̇/(2I₂s)
        let r2 = -ud / (2.0 * s);
        let y2 = (x2 * r1 + x3 * r2) / u;
        let y3 = (x3 * r1 - x2 * r2) / u;
        consistency = consistency.max((y2 * y2 + y3 * y3 - (k.c2 - y1 * y1)).abs());
        states.push(RotatedState {
            x: Vector3::new(k.d2, x2, x3),
            y: Vector3::new(y1, y2, y3),
        });
    }
    Ok(Reconstruction {
        times: times.to_vec(),
        sigma,
        states,
        truncated,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, SolverSettings};

    fn params() -> SystemParams {
        SystemParams::new(1.3, 0.8, -0.45).unwrap()
    }

    #[test]
    fn rotation_special_cases() {
        let s = E3State::new([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
        let r = rotate(&s, &SystemParams::new(1.0, 1.0, 0.0).unwrap());
        assert_eq!((r.x, r.y), (s.m, s.gamma));
        let r = rotate(&s, &SystemParams::new(1.0, 0.0, 1.0).unwrap());
        assert_eq!(r.x, Vector3::new(3.0, 2.0, -1.0));
        let p = params();
        let back = unrotate(&rotate(&s, &p), &p);
        assert!((back.to_vec6() - s.to_vec6()).amax() < 1e-14);
    }

    #[test]
    fn worked_configuration() {
        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        let s = E3State::new([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        let k = reduced_constants(&s, &p);
        assert_eq!((k.c1, k.c2, k.d1, k.d2), (0.0, 1.0, 0.5, 0.0));
        assert_eq!((k.a_shift, k.b, k.c, k.d), (0.5, -2.0, -3.0, 0.0));
        let (u, ud) = u_and_udot(&s, &p, &CaseSelector::CasimirF1);
        assert_eq!((u, ud), (1.0, 2.0));
        assert_eq!(ud * ud, k.cubic(u, p.i2()));
    }

    #[test]
    fn cubic_identity_holds_pointwise() {
        let p = params();
        for s in crate::sampling::uniform_states(7, 50) {
            let k = reduced_constants(&s, &p);
            for case in CaseSelector::named() {
                let (u, ud) = u_and_udot(&s, &p, &case);
                let scale = 1.0 + ud * ud;
                assert!((ud * ud - k.cubic(u, p.i2())).abs() / scale < 1e-12);
            }
        }
    }

    #[test]
    fn d_is_nonnegative_and_vanishes() {
        let p = params();
        let k = reduced_constants(&E3State::new([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]), &p);
        assert_eq!(k.d, 0.0);
        let k = reduced_constants(&E3State::new([0.3, 1.0, -0.2], [0.4, 0.1, 1.0]), &p);
        assert!(k.d > 0.0);
    }

    #[test]
    fn sigma_rhs_edge_cases() {
        let p = params();
        let k = ReducedConstants {
            c1: 0.0,
            c2: 1.0,
            d1: 0.3,
            d2: 0.0,
            a_shift: 0.3,
            b: 0.0,
            c: 0.0,
            d: 0.0,
        };
        assert_eq!(sigma_rhs(0.7, &k, 0.0, &p).unwrap(), 0.0);
        assert!(matches!(sigma_rhs(0.0, &k, 0.0, &p), Err(Error::PolarDegeneracy { .. })));
    }

    #[test]
    fn reduced_coupling_matches_state_value() {
        let p = params();
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        let k = reduced_constants(&s, &p);
        let u = rotate(&s, &p).polar().u;
        for case in CaseSelector::named() {
            let a = a_along_reduction(&case, u, &k, &p).unwrap();
            let direct = crate::dynamics::coupling_a(&s, &p, &case);
            assert!((a - direct).abs() < 1e-13, "{case:?}");
        }
    }

    #[test]
    fn cumulative_integral_is_accurate() {
        let t: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).chain([2.03]).collect();
        let f: Vec<f64> = t.iter().map(|x| x.cos()).collect();
        let i = cumulative_integral(&t, &f);
        for (x, v) in t.iter().zip(&i) {
            assert!((v - x.sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn equilibrium_reconstruction_is_constant() {
        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        let s = E3State::new([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let traj = integrate(&s, &p, &CaseSelector::CasimirF1, &SolverSettings::adaptive(1.0, 0.1)).unwrap();
        assert_eq!(reduction_residual(&traj, &p), 0.0);
    }

    #[test]
    fn round_trip_short_window() {
        let p = params();
        let s = E3State::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.9]);
        for case in CaseSelector::named() {
            let traj = integrate(&s, &p, &case, &SolverSettings::adaptive(2.0, 0.01)).unwrap();
            let rr = reduction_residual(&traj, &p);
            assert!(rr < 1e-6, "{case:?} {rr}");
            let k = reduced_constants(&s, &p);
            let rec = reconstruct(&u_series(&traj), rotate(&s, &p).polar().sigma, &k, &p, &case).unwrap();
            assert!(!rec.truncated);
            assert!(rec.consistency < 1e-8);
            let err = rec
                .e3_states(&p)
                .iter()
                .zip(&traj.states)
                .map(|(a, b)| (a.to_vec6() - b.to_vec6()).amax())
                .fold(0.0, f64::max);
            assert!(err < 1e-6, "{case:?}: {err}");
        }
    }
}
