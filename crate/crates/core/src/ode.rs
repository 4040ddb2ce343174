//! Adaptive Dormand–Prince 5(4) integrator with step-endpoint storage and
//! cubic Hermite dense output.
//!
//! The integrator is deliberately small: it knows nothing about the
//! geometry of the profiles it integrates. Callers observe every accepted
//! step through a monitor closure and decide when to stop (blow-up,
//! events, collisions).

use crate::error::{Error, Result};

/// Right-hand side of an autonomous-or-not first order system `y' = F(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];

    /// States outside the domain of the equation are rejected and the step
    /// is retried with a smaller size.
    fn admissible(&self, _t: f64, _y: &[f64; N]) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    /// Steps smaller than this (relative to `|t|`, plus an absolute floor)
    /// end the integration with [`StopReason::StepUnderflow`].
    pub h_min: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Options {
            rtol: tol,
            atol: tol,
            ..Default::default()
        }
    }
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ReachedEnd,
    /// The monitor asked to stop.
    Stopped,
    /// The step size collapsed, usually at a singularity of the solution.
    StepUnderflow,
}

/// What the monitor wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Accepted step endpoints with the derivative at each, enough for cubic
/// Hermite interpolation between consecutive points.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    pub stop: StopReason,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last_t(&self) -> f64 {
        *self.t.last().expect("trajectory holds the initial point")
    }

    /// Index `k` of the step `[t_k, t_{k+1}]` containing `t`, for either
    /// integration direction.
    pub fn segment(&self, t: f64) -> Option<usize> {
        let n = self.t.len();
        if n < 2 {
            return None;
        }
        let forward = self.t[n - 1] >= self.t[0];
        let key = |s: f64| if forward { s } else { -s };
        let tk = key(t);
        if tk < key(self.t[0]) || tk > key(self.t[n - 1]) {
            return None;
        }
        let k = self.t.partition_point(|&s| key(s) <= tk);
        Some(k.saturating_sub(1).min(n - 2))
    }

    /// Hermite interpolation of the state inside segment `k`.
    pub fn interpolate_in(&self, k: usize, t: f64) -> [f64; N] {
        let (t0, t1) = (self.t[k], self.t[k + 1]);
        let mut out = [0.0; N];
        for (i, v) in out.iter_mut().enumerate() {
            *v = hermite(
                t0,
                self.y[k][i],
                self.dy[k][i],
                t1,
                self.y[k + 1][i],
                self.dy[k + 1][i],
                t,
            )
            .0;
        }
        out
    }

    pub fn interpolate(&self, t: f64) -> Option<[f64; N]> {
        if self.t.len() == 1 && t == self.t[0] {
            return Some(self.y[0]);
        }
        self.segment(t).map(|k| self.interpolate_in(k, t))
    }

    /// Root of `g(y(t))` inside segment `k`, located by bisection on the
    /// Hermite interpolant. Requires a sign change across the segment.
    pub fn locate_in<G: Fn(f64, &[f64; N]) -> f64>(&self, k: usize, g: G) -> Option<f64> {
        let (mut a, mut b) = (self.t[k], self.t[k + 1]);
        let mut ga = g(a, &self.y[k]);
        let gb = g(b, &self.y[k + 1]);
        if ga == 0.0 {
            return Some(a);
        }
        if gb == 0.0 {
            return Some(b);
        }
        if ga.signum() == gb.signum() {
            return None;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let gm = g(m, &self.interpolate_in(k, m));
            if gm == 0.0 {
                return Some(m);
            }
            if gm.signum() == ga.signum() {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }
}

/// Cubic Hermite interpolant through `(t0, y0, d0)` and `(t1, y1, d1)`;
/// returns value and derivative at `t`.
pub fn hermite(t0: f64, y0: f64, d0: f64, t1: f64, y1: f64, d1: f64, t: f64) -> (f64, f64) {
    let h = t1 - t0;
    if h == 0.0 {
        return (y0, d0);
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, deriv)
}

/// Quintic Hermite interpolant matching value, first and second
/// derivative at both ends. Returns `(value, derivative)` at `t`.
#[allow(clippy::too_many_arguments)]
pub fn hermite5(t0: f64, y0: f64, d0: f64, s0: f64, t1: f64, y1: f64, d1: f64, s1: f64, t: f64) -> (f64, f64) {
    let h = t1 - t0;
    if h == 0.0 {
        return (y0, d0);
    }
    let u = (t - t0) / h;
    let (u2, u3) = (u * u, u * u * u);
    let (u4, u5) = (u3 * u, u3 * u2);
    let b = [
        1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5,
        u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5,
        0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5),
        10.0 * u3 - 15.0 * u4 + 6.0 * u5,
        -4.0 * u3 + 7.0 * u4 - 3.0 * u5,
        0.5 * (u3 - 2.0 * u4 + u5),
    ];
    let db = [
        -30.0 * u2 + 60.0 * u3 - 30.0 * u4,
        1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4,
        0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4),
        30.0 * u2 - 60.0 * u3 + 30.0 * u4,
        -12.0 * u2 + 28.0 * u3 - 15.0 * u4,
        0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4),
    ];
    let c = [y0, h * d0, h * h * s0, y1, h * d1, h * h * s1];
    let value = (0..6).map(|i| b[i] * c[i]).sum();
    let deriv = (0..6).map(|i| db[i] * c[i]).sum::<f64>() / h;
    (value, deriv)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrate `sys` from `(t0, y0)` towards `t_end` (either direction).
///
/// `monitor` sees the trajectory after every accepted step. Errors are only
/// returned when no step could be taken at all; a collapse after progress
/// is reported through [`Trajectory::stop`].
pub fn integrate<S, M, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Options,
    mut monitor: M,
) -> Result<Trajectory<N>>
where
    S: OdeSystem<N> + ?Sized,
    M: FnMut(&Trajectory<N>) -> Control,
{
    if !all_finite(&y0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::IntegrationFailure {
            t: t0,
            reason: "non-finite initial data".into(),
        });
    }
    if !sys.admissible(t0, &y0) {
        return Err(Error::IntegrationFailure {
            t: t0,
            reason: "initial state outside the domain of the equation".into(),
        });
    }
    let f0 = sys.rhs(t0, &y0);
    let mut traj = Trajectory {
        t: vec![t0],
        y: vec![y0],
        dy: vec![f0],
        stop: StopReason::ReachedEnd,
    };
    let span = t_end - t0;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();

    let scale = |y: &[f64; N], i: usize| opts.atol + opts.rtol * y[i].abs();
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = (0..N).map(|i| (y0[i] / scale(&y0, i)).powi(2)).sum::<f64>().sqrt();
            let d1 = (0..N).map(|i| (f0[i] / scale(&y0, i)).powi(2)).sum::<f64>().sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(span.abs())
    .min(opts.h_max);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f0;
    let mut steps = 0usize;

    loop {
        if steps >= opts.max_steps {
            return if traj.len() > 1 {
                traj.stop = StopReason::StepUnderflow;
                Ok(traj)
            } else {
                Err(Error::IntegrationFailure {
                    t,
                    reason: "step budget exhausted".into(),
                })
            };
        }
        let remaining = (t_end - t) * dir;
        if remaining <= 0.0 {
            traj.stop = StopReason::ReachedEnd;
            return Ok(traj);
        }
        let h_floor = opts.h_min * (1.0 + t.abs());
        if h < h_floor {
            return if traj.len() > 1 {
                traj.stop = StopReason::StepUnderflow;
                Ok(traj)
            } else {
                Err(Error::IntegrationFailure {
                    t,
                    reason: "step size underflow before any progress".into(),
                })
            };
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        steps += 1;

        let y2 = axpy(&y, hs, &[(A21, &k1)]);
        let k2 = sys.rhs(t + C2 * hs, &y2);
        let y3 = axpy(&y, hs, &[(A31, &k1), (A32, &k2)]);
        let k3 = sys.rhs(t + C3 * hs, &y3);
        let y4 = axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = sys.rhs(t + C4 * hs, &y4);
        let y5 = axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = sys.rhs(t + C5 * hs, &y5);
        let y6 = axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = sys.rhs(t + hs, &y6);
        let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { t_end } else { t + hs };

        let stages_ok = [&y2, &y3, &y4, &y5, &y6, &y_new].iter().all(|s| all_finite(s))
            && [&k2, &k3, &k4, &k5, &k6].iter().all(|s| all_finite(s));
        if !stages_ok || !sys.admissible(t_new, &y_new) {
            h *= 0.25;
            continue;
        }
        let k7 = sys.rhs(t_new, &y_new);
        if !all_finite(&k7) {
            h *= 0.25;
            continue;
        }

        let mut err = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = k7;
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k1);
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * fac).min(opts.h_max);
            if monitor(&traj) == Control::Stop {
                traj.stop = StopReason::Stopped;
                return Ok(traj);
            }
            if last {
                traj.stop = StopReason::ReachedEnd;
                return Ok(traj);
            }
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
}
