//! The Weierstrass ℘-function for real invariants and the closed-form
//! solution of `u̇² = cubic(u)`.
//!
//! ℘ is evaluated from its Laurent expansion at the origin, truncated at
//! degree 20, after reducing the argument modulo the period lattice and
//! halving it into a small disc. The duplication formula
//!
//! ```text
//! ℘(2z) = R(℘(z)),   ℘′(2z) = R′(℘(z))·℘′(z)/2,
//! R(x) = (x⁴ + g₂x²/2 + 2g₃x + g₂²/16) / (4x³ − g₂x − g₃)
//! ```
//!
//! then carries the value back out. The rational form avoids the
//! cancellation in the tangent-line version of the same law.

use std::f64::consts::PI;

use crate::reduction::ReducedConstants;
use crate::{C64Display, Error, Result, C64};

use super::curves::{j_from_invariants, CubicCurve};

/// Highest index `k` kept in `℘(z) = z⁻² + Σ c_k z^{2k−2}`.
const LAURENT_MAX: usize = 11;

/// Affine map `u = scale·s + shift` taking `v² = cubic(u)` to
/// `ṡ² = 4s³ − g₂s − g₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassData {
    pub g2: f64,
    pub g3: f64,
    pub scale: f64,
    pub shift: f64,
}

impl WeierstrassData {
    pub fn from_cubic(curve: &CubicCurve) -> Result<Self> {
        let a = curve.coeffs[0];
        if a == 0.0 || !curve.coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::SingularCurve {
                curve: "cubic",
                discriminant: 0.0,
            });
        }
        let scale = 4.0 / a;
        let shift = -curve.coeffs[1] / (3.0 * a);
        let g2 = -curve.derivative(shift) / scale;
        let g3 = -curve.eval(shift) / (scale * scale);
        j_from_invariants("cubic", g2, g3)?;
        Ok(Self { g2, g3, scale, shift })
    }

    pub fn to_normal(&self, u: f64) -> f64 {
        (u - self.shift) / self.scale
    }

    pub fn from_normal(&self, s: f64) -> f64 {
        self.scale * s + self.shift
    }
}

/// Roots of `4s³ − g₂s − g₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Roots {
    /// `e₁ > e₂ > e₃`.
    Real([f64; 3]),
    /// One real root and a conjugate pair; `complex` has positive imaginary part.
    Mixed { real: f64, complex: C64 },
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a.abs() {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    0.5 * (a + b)
}

fn cubic_roots(g2: f64, g3: f64) -> Roots {
    let f = |s: f64| (4.0 * s * s - g2) * s - g3;
    let df = |s: f64| 12.0 * s * s - g2;
    let polish = |mut s: f64| {
        for _ in 0..3 {
            let d = df(s);
            if d == 0.0 {
                break;
            }
            let next = s - f(s) / d;
            if !next.is_finite() {
                break;
            }
            s = next;
        }
        s
    };
    // s³ + ps + q with p = −g₂/4, q = −g₃/4.
    let (p, q) = (-g2 / 4.0, -g3 / 4.0);
    if g2 * g2 * g2 - 27.0 * g3 * g3 > 0.0 {
        let r = 2.0 * (g2 / 12.0).sqrt();
        let arg = (3.0 * 3f64.sqrt() * g3 / g2.powf(1.5)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut e: [f64; 3] = std::array::from_fn(|k| polish(r * (theta - 2.0 * PI * k as f64 / 3.0).cos()));
        e.sort_by(|a, b| b.total_cmp(a));
        Roots::Real(e)
    } else {
        let sq = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let e = polish((-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt());
        let im = (0.75 * e * e + p).max(0.0).sqrt();
        Roots::Mixed {
            real: e,
            complex: C64::new(-0.5 * e, im),
        }
    }
}

/// ℘ for a fixed pair of real invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Weierstrass {
    g2: f64,
    g3: f64,
    coeffs: [f64; LAURENT_MAX + 1],
    roots: Roots,
    half_period: f64,
    /// Imaginary half-period of a rectangular lattice.
    imag_half_period: Option<f64>,
    radius: f64,
}

impl Weierstrass {
    pub fn new(g2: f64, g3: f64) -> Result<Self> {
        j_from_invariants("weierstrass", g2, g3)?;
        let mut c = [0.0; LAURENT_MAX + 1];
        c[2] = g2 / 20.0;
        c[3] = g3 / 28.0;
        for k in 4..=LAURENT_MAX {
            let sum: f64 = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
            c[k] = 3.0 * sum / (((2 * k + 1) * (k - 3)) as f64);
        }
        let roots = cubic_roots(g2, g3);
        let (half_period, imag_half_period) = match roots {
            Roots::Real([e1, e2, e3]) => (
                PI / (2.0 * agm((e1 - e3).sqrt(), (e1 - e2).sqrt())),
                Some(PI / (2.0 * agm((e1 - e3).sqrt(), (e2 - e3).sqrt()))),
            ),
            Roots::Mixed { real, complex } => {
                let h = (complex.re - real).hypot(complex.im);
                let m = 0.5 - 0.75 * real / h;
                (PI / (2.0 * h.sqrt() * agm(1.0, (1.0 - m).sqrt())), None)
            }
        };
        // Nearest nonzero lattice point, bounded by the root test on the
        // Laurent coefficients when the lattice is not rectangular.
        let mut radius = 2.0 * half_period;
        if let Some(w3) = imag_half_period {
            radius = radius.min(2.0 * w3);
        }
        for (k, ck) in c.iter().enumerate().skip(2) {
            if *ck != 0.0 {
                radius = radius.min(ck.abs().powf(-1.0 / (2 * k - 2) as f64));
            }
        }
        Ok(Self {
            g2,
            g3,
            coeffs: c,
            roots,
            half_period,
            imag_half_period,
            radius,
        })
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn g3(&self) -> f64 {
        self.g3
    }

    pub fn roots(&self) -> Roots {
        self.roots
    }

    pub fn discriminant(&self) -> f64 {
        self.g2.powi(3) - 27.0 * self.g3 * self.g3
    }

    /// `ω` with `2ω` the real period and `℘(ω)` the largest real root.
    pub fn real_half_period(&self) -> f64 {
        self.half_period
    }

    pub fn imag_half_period(&self) -> Option<f64> {
        self.imag_half_period
    }

    /// Laurent coefficients `c₂ … c₁₁`.
    pub fn laurent_coefficients(&self) -> &[f64] {
        &self.coeffs[2..]
    }

    fn reduce(&self, z: C64) -> C64 {
        let period = 2.0 * self.half_period;
        let mut re = z.re - period * (z.re / period).round();
        if re <= -self.half_period {
            re += period;
        }
        let im = match self.imag_half_period {
            Some(w3) => z.im - 2.0 * w3 * (z.im / (2.0 * w3)).round(),
            None => z.im,
        };
        C64::new(re, im)
    }

    fn laurent(&self, z: C64) -> (C64, C64) {
        let z2 = z * z;
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for k in (2..=LAURENT_MAX).rev() {
            p = p * z2 + self.coeffs[k];
            dp = dp * z2 + (2 * k - 2) as f64 * self.coeffs[k];
        }
        // p = Σ c_k z^{2k−4}, dp = Σ (2k−2) c_k z^{2k−4}
        (p * z2 + 1.0 / z2, dp * z2 / z - 2.0 / (z2 * z))
    }

    /// `(℘(z), ℘′(z))`.
    pub fn p_and_prime(&self, z: C64) -> Result<(C64, C64)> {
        let w = self.reduce(z);
        let pole = || Error::WeierstrassPole {
            z: C64Display(z),
            nearest: C64Display(z - w),
        };
        if w.norm() <= 1e-12 * self.radius {
            return Err(pole());
        }
        let mut w_small = w;
        let mut doublings = 0;
        while w_small.norm() > self.radius / 8.0 {
            w_small /= 2.0;
            doublings += 1;
        }
        let (mut x, mut y) = self.laurent(w_small);
        let (g2, g3) = (self.g2, self.g3);
        for _ in 0..doublings {
            let x2 = x * x;
            let num = x2 * x2 + 0.5 * g2 * x2 + 2.0 * g3 * x + g2 * g2 / 16.0;
            let den = (4.0 * x2 - g2) * x - g3;
            if den.norm() == 0.0 {
                return Err(pole());
            }
            let dnum = (4.0 * x2 + g2) * x + 2.0 * g3;
            let dden = 12.0 * x2 - g2;
            let slope = (dnum * den - num * dden) / (den * den);
            y = slope * y / 2.0;
            x = num / den;
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(pole());
        }
        Ok((x, y))
    }

    pub fn p(&self, z: C64) -> Result<C64> {
        Ok(self.p_and_prime(z)?.0)
    }

    /// `(℘(x), ℘′(x))` on the real axis.
    pub fn p_real(&self, x: f64) -> Result<(f64, f64)> {
        let (p, dp) = self.p_and_prime(C64::new(x, 0.0))?;
        Ok((p.re, dp.re))
    }

    fn top_real_root(&self) -> f64 {
        match self.roots {
            Roots::Real([e1, _, _]) => e1,
            Roots::Mixed { real, .. } => real,
        }
    }

    /// The `τ ∈ [0, ω]` with `℘(τ) = target`, for `target ≥ ℘(ω)`.
    fn invert_real(&self, target: f64) -> f64 {
        let w = self.half_period;
        if target.is_infinite() {
            return 0.0;
        }
        if target <= self.top_real_root() {
            return w;
        }
        let (mut lo, mut hi) = (0.0, w);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let above = self.p_real(mid).map(|(p, _)| p > target).unwrap_or(true);
            if above {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `s(t) = e₃ + (e₁−e₃)(e₂−e₃)/(℘(t−t₀) − e₃)`, oscillating on `[e₃, e₂]`.
    Bounded,
    /// `s(t) = ℘(t − t₀)`, with poles.
    Unbounded,
}

/// `u(t)` as an affine image of ℘ or of its half-period translate.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolution {
    pub data: WeierstrassData,
    pub wp: Weierstrass,
    pub t0: f64,
    pub branch: Branch,
}

impl EllipticSolution {
    /// Period of `u(t)`.
    pub fn period(&self) -> f64 {
        2.0 * self.wp.real_half_period()
    }

    /// Range of `u` swept by the bounded branch.
    pub fn u_range(&self) -> Option<(f64, f64)> {
        match (self.branch, self.wp.roots()) {
            (Branch::Bounded, Roots::Real([_, e2, e3])) => {
                let (a, b) = (self.data.from_normal(e2), self.data.from_normal(e3));
                Some((a.min(b), a.max(b)))
            }
            _ => None,
        }
    }

    fn normal(&self, t: f64) -> Result<(f64, f64)> {
        let z = t - self.t0;
        let shift_error = |e: Error| match e {
            Error::WeierstrassPole { nearest, .. } => Error::WeierstrassPole {
                z: C64Display(C64::new(t, 0.0)),
                nearest: C64Display(nearest.0 + self.t0),
            },
            other => other,
        };
        match (self.branch, self.wp.roots()) {
            (Branch::Bounded, Roots::Real([e1, e2, e3])) => {
                let k = (e1 - e3) * (e2 - e3);
                match self.wp.p_real(z) {
                    Ok((p, dp)) => {
                        let d = p - e3;
                        Ok((e3 + k / d, -k * dp / (d * d)))
                    }
                    Err(Error::WeierstrassPole { .. }) => Ok((e3, 0.0)),
                    Err(e) => Err(e),
                }
            }
            _ => self.wp.p_real(z).map_err(shift_error),
        }
    }

    /// `(u(t), u̇(t))`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let (s, ds) = self.normal(t)?;
        Ok((self.data.from_normal(s), self.data.scale * ds))
    }

    pub fn u(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.0)
    }

    pub fn udot(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.1)
    }
}

/// Solves `u̇² = −u³/I₂² − Bu² − Cu − D` with `u(0) = u0` and the sign of
/// `u̇(0)` given by `udot0_sign`. The bounded real branch through `u0` is
/// used when there is one.
pub fn solve_u_closed_form(
    constants: &ReducedConstants,
    i2: f64,
    u0: f64,
    udot0_sign: f64,
) -> Result<EllipticSolution> {
    let cubic = CubicCurve::from_reduced(constants, i2);
    let data = cubic.weierstrass()?;
    let wp = Weierstrass::new(data.g2, data.g3)?;
    let s0 = data.to_normal(u0);
    let positive = udot0_sign >= 0.0;
    let build = |branch, tau: f64, rising_at_plus_tau: bool| {
        // Start at z = +τ when that matches the requested direction.
        let t0 = if rising_at_plus_tau == positive { -tau } else { tau };
        EllipticSolution {
            data,
            wp: wp.clone(),
            t0,
            branch,
        }
    };
    let tol = |e: f64| 1e-9 * (1.0 + e.abs());
    // On (0, ω) ℘ decreases; u̇ = scale·ṡ.
    match wp.roots() {
        Roots::Real([e1, e2, e3]) if s0 >= e3 - tol(e3) && s0 <= e2 + tol(e2) => {
            let s0 = s0.clamp(e3, e2);
            let k = (e1 - e3) * (e2 - e3);
            let target = if s0 > e3 { e3 + k / (s0 - e3) } else { f64::INFINITY };
            let tau = wp.invert_real(target);
            // ṡ = −k℘′/(℘−e₃)² > 0 at z = τ
            Ok(build(Branch::Bounded, tau, data.scale > 0.0))
        }
        Roots::Real([e1, ..]) | Roots::Mixed { real: e1, .. } if s0 >= e1 - tol(e1) => {
            let tau = wp.invert_real(s0.max(e1));
            Ok(build(Branch::Unbounded, tau, data.scale < 0.0))
        }
        roots => {
            let (lower, upper) = match roots {
                Roots::Real([_, e2, e3]) => {
                    let (a, b) = (data.from_normal(e2), data.from_normal(e3));
                    (a.min(b), a.max(b))
                }
                Roots::Mixed { real, .. } => {
                    let edge = data.from_normal(real);
                    if data.scale < 0.0 {
                        (f64::NEG_INFINITY, edge)
                    } else {
                        (edge, f64::INFINITY)
                    }
                }
            };
            Err(Error::OutsideOscillation { u0, lower, upper })
        }
    }
}
