//! Explicit Runge-Kutta integrators for six-dimensional autonomous systems.
//!
//! Two methods are provided: the classical fixed-step fourth-order scheme and
//! the Dormand-Prince 5(4) embedded pair with PI step-size control. Both
//! produce samples on a uniform output grid; the adaptive stepper clips its
//! step to land exactly on each output time.

use crate::e3::Vec6;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4 { step: f64 },
    /// Dormand-Prince 5(4) pair with PI control.
    Dopri5 { abs_tol: f64, rel_tol: f64 },
}

impl Method {
    pub fn dopri5_default() -> Self {
        Method::Dopri5 {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub method: Method,
    pub t_end: f64,
    /// Spacing of the output grid. The last sample is always at `t_end`.
    pub sample_interval: f64,
}

impl SolverSettings {
    pub fn new(method: Method, t_end: f64, sample_interval: f64) -> Result<Self> {
        let s = Self {
            method,
            t_end,
            sample_interval,
        };
        s.validate()?;
        Ok(s)
    }

    /// Adaptive pair at `abs_tol = rel_tol = 1e-10`.
    pub fn adaptive(t_end: f64, sample_interval: f64) -> Self {
        Self {
            method: Method::dopri5_default(),
            t_end,
            sample_interval,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSettings(msg));
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.sample_interval.is_finite() && self.sample_interval > 0.0) {
            return bad(format!(
                "sample_interval must be positive, got {}",
                self.sample_interval
            ));
        }
        match self.method {
            Method::Rk4 { step } if !(step.is_finite() && step > 0.0) => {
                bad(format!("rk4 step must be positive, got {step}"))
            }
            Method::Dopri5 { abs_tol, rel_tol }
                if !(abs_tol.is_finite() && abs_tol > 0.0 && rel_tol.is_finite() && rel_tol > 0.0) =>
            {
                bad(format!("tolerances must be positive, got ({abs_tol}, {rel_tol})"))
            }
            _ => Ok(()),
        }
    }

    /// Output times `0, Δ, 2Δ, …, t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let n = (self.t_end / self.sample_interval - 1e-9).ceil().max(1.0) as usize;
        let mut times: Vec<f64> = (0..n).map(|k| k as f64 * self.sample_interval).collect();
        times.push(self.t_end);
        times
    }
}

/// Uniformly sampled solution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Samples {
    pub times: Vec<f64>,
    pub states: Vec<Vec6>,
}

/// Integration stopped early; `samples` holds everything up to `t`.
#[derive(Debug, Clone)]
pub struct Failure {
    pub t: f64,
    pub samples: Samples,
}

pub fn rk4_step(f: &impl Fn(&Vec6) -> Vec6, y: &Vec6, h: f64) -> Vec6 {
    let k1 = f(y);
    let k2 = f(&(y + k1 * (h / 2.0)));
    let k3 = f(&(y + k2 * (h / 2.0)));
    let k4 = f(&(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

// Dormand-Prince tableau. The systems are autonomous so the nodes c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const MAX_SHRINK: f64 = 5.0; // h_new >= h / 5
const MAX_GROW: f64 = 0.1; // h_new <= 10 h

/// Stateful Dormand-Prince stepper. Keeps its step size and the FSAL stage
/// between calls to [`Dopri5::advance`].
#[derive(Debug, Clone)]
pub struct Dopri5 {
    abs_tol: f64,
    rel_tol: f64,
    h: Option<f64>,
    fac_old: f64,
    fsal: Option<(Vec6, Vec6)>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            h: None,
            fac_old: 1e-4,
            fsal: None,
            accepted: 0,
            rejected: 0,
        }
    }

    fn err_norm(&self, y: &Vec6, y_new: &Vec6, err: &Vec6) -> f64 {
        let mut sum = 0.0;
        for i in 0..6 {
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            sum += (err[i] / sc).powi(2);
        }
        (sum / 6.0).sqrt()
    }

    fn initial_step(&self, f: &impl Fn(&Vec6) -> Vec6, y: &Vec6, f0: &Vec6, span: f64) -> f64 {
        let scaled = |v: &Vec6| {
            let mut s = 0.0;
            for i in 0..6 {
                let sc = self.abs_tol + self.rel_tol * y[i].abs();
                s += (v[i] / sc).powi(2);
            }
            (s / 6.0).sqrt()
        };
        let d0 = scaled(y);
        let d1 = scaled(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span.abs());
        let y1 = y + f0 * h0;
        let f1 = f(&y1);
        let d2 = scaled(&(f1 - f0)) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span.abs())
    }

    /// Integrates from `(t0, y0)` to `t1` (either direction). On failure the
    /// error carries the time reached.
    pub fn advance(
        &mut self,
        f: &impl Fn(&Vec6) -> Vec6,
        t0: f64,
        y0: Vec6,
        t1: f64,
    ) -> std::result::Result<Vec6, f64> {
        if t1 == t0 {
            return Ok(y0);
        }
        let dir = if t1 > t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = match self.fsal {
            Some((ys, ks)) if ys == y => ks,
            _ => f(&y),
        };
        let mut h = match self.h {
            Some(h) if h.signum() == dir => h.abs(),
            _ => self.initial_step(f, &y, &k1, t1 - t0),
        };
        let expo1 = 0.2 - PI_BETA * 0.75;
        while (t1 - t) * dir > 0.0 {
            let remaining = (t1 - t).abs();
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !clipped {
                self.h = Some(dir * h);
                return Err(t);
            }
            let hs = dir * step;
            let k2 = f(&(y + k1 * (hs * A21)));
            let k3 = f(&(y + (k1 * A31 + k2 * A32) * hs));
            let k4 = f(&(y + (k1 * A41 + k2 * A42 + k3 * A43) * hs));
            let k5 = f(&(y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * hs));
            let k6 = f(&(y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * hs));
            let y_new = y + (k1 * A71 + k3 * A73 + k4 * A74 + k5 * A75 + k6 * A76) * hs;
            let k7 = f(&y_new);
            let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * hs;
            let err = self.err_norm(&y, &y_new, &err_vec);
            if !err.is_finite() || !y_new.iter().all(|c| c.is_finite()) {
                h = step / MAX_SHRINK;
                self.rejected += 1;
                continue;
            }
            let fac11 = err.powf(expo1);
            if err <= 1.0 {
                let fac = (fac11 / self.fac_old.powf(PI_BETA) / SAFETY).clamp(MAX_GROW, MAX_SHRINK);
                let h_new = step / fac;
                self.fac_old = err.max(1e-4);
                self.accepted += 1;
                t = if clipped { t1 } else { t + hs };
                y = y_new;
                k1 = k7;
                h = if clipped { h.max(h_new) } else { h_new };
            } else {
                self.rejected += 1;
                h = step / (fac11 / SAFETY).min(MAX_SHRINK);
            }
        }
        self.h = Some(dir * h);
        self.fsal = Some((y, k1));
        Ok(y)
    }
}

/// Integrates `ẏ = f(y)` from `y0` at `t = 0` and samples on the settings'
/// output grid.
pub fn integrate_samples(
    f: impl Fn(&Vec6) -> Vec6,
    y0: Vec6,
    settings: &SolverSettings,
) -> std::result::Result<Samples, Failure> {
    let times = settings.output_times();
    let mut out = Samples {
        times: vec![0.0],
        states: vec![y0],
    };
    let mut y = y0;
    match settings.method {
        Method::Rk4 { step } => {
            for w in times.windows(2) {
                let span = w[1] - w[0];
                let n = (span / step - 1e-9).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for _ in 0..n {
                    y = rk4_step(&f, &y, h);
                }
                if !y.iter().all(|c| c.is_finite()) {
                    return Err(Failure { t: w[0], samples: out });
                }
                out.times.push(w[1]);
                out.states.push(y);
            }
        }
        Method::Dopri5 { abs_tol, rel_tol } => {
            let mut stepper = Dopri5::new(abs_tol, rel_tol);
            for w in times.windows(2) {
                match stepper.advance(&f, w[0], y, w[1]) {
                    Ok(next) => y = next,
                    Err(t) => return Err(Failure { t, samples: out }),
                }
                out.times.push(w[1]);
                out.states.push(y);
            }
        }
    }
    Ok(out)
}
