//! Generating curves of the explicit surface families: α-catenaries
//! (cylinder profiles), rotational meridians meeting the axis, and winglike
//! meridians that avoid it.
//!
//! All curves live in the vertical half-plane `z > 0` with the density
//! direction along `z`.

use crate::error::{Error, Result};
use crate::ode::{self, Control, OdeSystem, Options, StopReason, Trajectory};
use crate::roots;

/// Local error tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `|f'|` above which a profile is declared to blow up.
pub const BLOWUP_SLOPE: f64 = 1e8;

/// Exponent of the weight `z^α`. Zero is excluded: that is the plain
/// minimal surface case.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value == 0.0 {
            return Err(Error::param(format!("alpha must be finite and nonzero, got {value}")));
        }
        Ok(Alpha(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedXmax,
    BlowupDetected,
}

/// One point of a graph profile `z = f(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSample {
    pub x: f64,
    pub f: f64,
    pub fp: f64,
}

/// A profile `z = f(x)` that can be evaluated anywhere in its domain.
pub trait Generatrix {
    /// Closed interval on which `eval` is defined.
    fn domain(&self) -> (f64, f64);
    /// Height and slope at `x`.
    fn eval(&self, x: f64) -> Option<(f64, f64)>;
}

/// Wraps a closure `x -> (f, f')` as a profile on `[lo, hi]`.
pub struct FnGeneratrix<F> {
    pub lo: f64,
    pub hi: f64,
    pub func: F,
}

impl<F: Fn(f64) -> (f64, f64)> Generatrix for FnGeneratrix<F> {
    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn eval(&self, x: f64) -> Option<(f64, f64)> {
        (x >= self.lo && x <= self.hi).then(|| (self.func)(x))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::param(format!("tol must lie in (0, 1e-3], got {tol}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Interpolate a graph profile from its samples by quintic Hermite
/// interpolation; `second` gives `f''` at a sample from the ODE.
fn eval_samples(samples: &[GraphSample], x: f64, second: impl Fn(&GraphSample) -> f64) -> Option<(f64, f64)> {
    let n = samples.len();
    if n == 0 || x < samples[0].x || x > samples[n - 1].x {
        return None;
    }
    if n == 1 {
        return Some((samples[0].f, samples[0].fp));
    }
    let k = samples.partition_point(|s| s.x <= x).saturating_sub(1).min(n - 2);
    let (a, b) = (&samples[k], &samples[k + 1]);
    Some(ode::hermite5(a.x, a.f, a.fp, second(a), b.x, b.f, b.fp, second(b), x))
}

/// Aitken extrapolation of three step endpoints converging geometrically.
fn extrapolate_limit(x1: f64, x2: f64, x3: f64) -> f64 {
    let d1 = x2 - x1;
    let d2 = x3 - x2;
    if d1 > 0.0 && d2 > 0.0 && d2 < d1 {
        x3 + d2 * d2 / (d1 - d2)
    } else {
        x3
    }
}

// ---------------------------------------------------------------------------
// α-catenary: f''/(1+f'^2) = α/f, f(0)=z0, f'(0)=0.

struct CatenaryOde {
    alpha: f64,
}

impl OdeSystem<2> for CatenaryOde {
    fn rhs(&self, _x: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], self.alpha * (1.0 + y[1] * y[1]) / y[0]]
    }

    fn admissible(&self, _x: f64, y: &[f64; 2]) -> bool {
        y[0] > 0.0
    }
}

/// Augmented with the sensitivity `v = ∂f/∂z0`.
struct CatenarySensitivityOde {
    alpha: f64,
}

impl OdeSystem<4> for CatenarySensitivityOde {
    fn rhs(&self, _x: f64, y: &[f64; 4]) -> [f64; 4] {
        let [f, fp, v, vp] = *y;
        let a = self.alpha;
        let w = 1.0 + fp * fp;
        [fp, a * w / f, vp, a * (2.0 * fp * vp / f - w * v / (f * f))]
    }

    fn admissible(&self, _x: f64, y: &[f64; 4]) -> bool {
        y[0] > 0.0
    }
}

/// Half of an even α-catenary, sampled for `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct CatenaryProfile {
    pub alpha: Alpha,
    pub z0: f64,
    pub samples: Vec<GraphSample>,
    /// Half-width of the maximal domain when a blow-up was detected;
    /// `None` means the profile reached `x_max` without one.
    pub r_max: Option<f64>,
    pub termination: Termination,
}

impl CatenaryProfile {
    pub fn second_derivative(&self, f: f64, fp: f64) -> f64 {
        self.alpha.value() * (1.0 + fp * fp) / f
    }

    /// Last sampled abscissa.
    pub fn x_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.x)
    }

    /// `(f, f')` at any `x` with `|x| ≤ x_end`, using evenness for `x < 0`.
    pub fn eval_even(&self, x: f64) -> Option<(f64, f64)> {
        let (f, fp) = eval_samples(&self.samples, x.abs(), |s| self.second_derivative(s.f, s.fp))?;
        Some((f, if x < 0.0 { -fp } else { fp }))
    }

    /// First integral `f (1+f'^2)^{-1/(2α)}`, equal to `z0` along exact
    /// solutions.
    pub fn first_integral(&self, s: &GraphSample) -> f64 {
        s.f * (1.0 + s.fp * s.fp).powf(-0.5 / self.alpha.value())
    }
}

impl Generatrix for CatenaryProfile {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.x_end())
    }

    fn eval(&self, x: f64) -> Option<(f64, f64)> {
        eval_samples(&self.samples, x, |s| self.second_derivative(s.f, s.fp))
    }
}

/// Integrate the α-catenary from its lowest point `(0, z0)` to `x_max` or
/// to a detected blow-up of the slope.
pub fn solve_catenary(alpha: Alpha, z0: f64, x_max: f64, tol: f64) -> Result<CatenaryProfile> {
    check_positive("z0", z0)?;
    check_positive("x_max", x_max)?;
    check_tol(tol)?;
    let sys = CatenaryOde { alpha: alpha.value() };
    let opts = Options {
        // Keep samples dense enough for meshing even where the curve is flat.
        h_max: 0.5 * z0.min(x_max),
        ..Options::with_tol(tol)
    };
    let traj = ode::integrate(&sys, 0.0, [z0, 0.0], x_max, &opts, |tr| {
        if tr.y.last().unwrap()[1].abs() > BLOWUP_SLOPE {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    let (termination, r_max) = blowup_state(&traj);
    Ok(CatenaryProfile {
        alpha,
        z0,
        samples: graph_samples(&traj),
        r_max,
        termination,
    })
}

fn graph_samples(traj: &Trajectory<2>) -> Vec<GraphSample> {
    traj.t
        .iter()
        .zip(&traj.y)
        .map(|(&x, y)| GraphSample { x, f: y[0], fp: y[1] })
        .collect()
}

fn blowup_state(traj: &Trajectory<2>) -> (Termination, Option<f64>) {
    match traj.stop {
        StopReason::ReachedEnd => (Termination::ReachedXmax, None),
        StopReason::Stopped | StopReason::StepUnderflow => {
            let n = traj.t.len();
            let r = if n >= 3 {
                extrapolate_limit(traj.t[n - 3], traj.t[n - 2], traj.t[n - 1])
            } else {
                traj.t[n - 1]
            };
            (Termination::BlowupDetected, Some(r))
        }
    }
}

/// Half-width `R(z0)` of the maximal domain of an α-catenary, `α > 1`.
pub fn maximal_radius(alpha: Alpha, z0: f64, tol: f64) -> Result<f64> {
    if alpha.value() <= 1.0 {
        return Err(Error::param(format!(
            "maximal radius is finite only for alpha > 1, got {alpha}"
        )));
    }
    check_positive("z0", z0)?;
    let mut x_max = 4.0 * z0;
    for _ in 0..12 {
        let prof = solve_catenary(alpha, z0, x_max, tol)?;
        if let Some(r) = prof.r_max {
            return Ok(r);
        }
        x_max *= 10.0;
    }
    Err(Error::SearchFailure(format!("no blow-up detected up to x = {x_max:e}")))
}

fn check_catenary_regime(alpha: Alpha) -> Result<()> {
    if !(alpha.value() > 0.0 && alpha.value() <= 1.0) {
        return Err(Error::param(format!(
            "this operation requires 0 < alpha <= 1, got {alpha}"
        )));
    }
    Ok(())
}

/// `f(x0; z0)`. Fails if the catenary blows up before `x0`, which
/// happens for α > 1 beyond its half-width.
pub fn catenary_value_at(alpha: Alpha, z0: f64, x0: f64) -> Result<f64> {
    catenary_value_at_tol(alpha, z0, x0, DEFAULT_TOL)
}

pub fn catenary_value_at_tol(alpha: Alpha, z0: f64, x0: f64, tol: f64) -> Result<f64> {
    check_positive("x0", x0)?;
    let prof = solve_catenary(alpha, z0, x0, tol)?;
    if prof.termination != Termination::ReachedXmax {
        return Err(Error::IntegrationFailure {
            t: prof.x_end(),
            reason: "catenary did not reach x0".into(),
        });
    }
    Ok(prof.samples.last().unwrap().f)
}

/// `(f(x0; z0), ∂f/∂z0(x0; z0))` from the variational equation.
pub fn catenary_sensitivity(alpha: Alpha, z0: f64, x0: f64, tol: f64) -> Result<(f64, f64)> {
    check_positive("z0", z0)?;
    check_positive("x0", x0)?;
    check_tol(tol)?;
    let sys = CatenarySensitivityOde { alpha: alpha.value() };
    let traj = ode::integrate(&sys, 0.0, [z0, 0.0, 1.0, 0.0], x0, &Options::with_tol(tol), |_| {
        Control::Continue
    })?;
    if traj.stop != StopReason::ReachedEnd {
        return Err(Error::IntegrationFailure {
            t: traj.last_t(),
            reason: "sensitivity integration stopped early".into(),
        });
    }
    let y = traj.y.last().unwrap();
    Ok((y[0], y[2]))
}

/// Minimizer of `z0 ↦ f(x0; z0)` and the minimal value.
#[derive(Debug, Clone)]
pub struct OptimalHeight {
    pub z0_star: f64,
    pub f_min: f64,
    /// `(z0, f(x0; z0))` pairs evaluated by the search.
    pub history: Vec<(f64, f64)>,
}

/// Golden-section search on the unimodal map `z0 ↦ f(x0; z0)`, polished by
/// bisection on `∂f/∂z0 = 0` inside the final bracket.
pub fn optimal_initial_height(alpha: Alpha, x0: f64, tol: f64) -> Result<OptimalHeight> {
    check_catenary_regime(alpha)?;
    check_positive("x0", x0)?;
    if !(tol > 0.0) {
        return Err(Error::param("tol must be positive"));
    }
    let ode_tol = DEFAULT_TOL.min(tol * 1e-2).max(1e-13);
    let value = |z0: f64| -> f64 { catenary_value_at_tol(alpha, z0, x0, ode_tol).unwrap_or(f64::INFINITY) };

    // Walk a geometric grid until the values turn upward on both sides.
    let mut history = Vec::new();
    let mut mid = x0;
    let mut f_mid = value(mid);
    history.push((mid, f_mid));
    let factor = 1.5;
    let mut bracket = None;
    for _ in 0..200 {
        let lo = mid / factor;
        let hi = mid * factor;
        let (f_lo, f_hi) = (value(lo), value(hi));
        history.push((lo, f_lo));
        history.push((hi, f_hi));
        if f_lo > f_mid && f_hi > f_mid {
            bracket = Some((lo, hi));
            break;
        }
        if f_lo <= f_mid {
            mid = lo;
            f_mid = f_lo;
        } else {
            mid = hi;
            f_mid = f_hi;
        }
    }
    let (lo, hi) =
        bracket.ok_or_else(|| Error::SearchFailure("could not bracket the optimal initial height".into()))?;

    let golden = roots::golden_section(|z| Ok(value(z)), lo, hi, tol.max(1e-12 * x0))?;
    history.extend(golden.history.iter().copied());

    // The value is flat at the minimum; the derivative is not.
    let slope = |z: f64| catenary_sensitivity(alpha, z, x0, ode_tol).map(|(_, v)| v);
    let width = (golden.bracket.1 - golden.bracket.0).max(1e-6 * golden.x);
    let a = (golden.x - 4.0 * width).max(lo);
    let b = (golden.x + 4.0 * width).min(hi);
    let z0_star = match (slope(a), slope(b)) {
        (Ok(sa), Ok(sb)) if sa < 0.0 && sb > 0.0 => roots::bisect(slope, a, b, 1e-14 * golden.x.max(1.0))?,
        _ => golden.x,
    };
    let f_min = catenary_value_at_tol(alpha, z0_star, x0, ode_tol)?;
    history.push((z0_star, f_min));
    Ok(OptimalHeight {
        z0_star,
        f_min,
        history,
    })
}

// ---------------------------------------------------------------------------
// Rotational meridian meeting the axis: f''/(1+f'^2) + f'/x = α/f.

struct MeridianOde {
    alpha: f64,
}

impl MeridianOde {
    fn second(&self, x: f64, f: f64, fp: f64) -> f64 {
        if x == 0.0 {
            // Limit of the equation at the axis where f'(0) = 0.
            self.alpha / (2.0 * f)
        } else {
            (1.0 + fp * fp) * (self.alpha / f - fp / x)
        }
    }
}

impl OdeSystem<2> for MeridianOde {
    fn rhs(&self, x: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], self.second(x, y[0], y[1])]
    }

    fn admissible(&self, _x: f64, y: &[f64; 2]) -> bool {
        y[0] > 0.0
    }
}

/// Relative offset from the axis where integration of the meridian starts.
pub const MERIDIAN_START: f64 = 1e-4;

/// Meridian `z = f(x)` of a rotational surface meeting the vertical axis
/// orthogonally at height `z0`.
#[derive(Debug, Clone)]
pub struct MeridianProfile {
    pub alpha: Alpha,
    pub z0: f64,
    pub samples: Vec<GraphSample>,
    /// Last abscissa reached.
    pub x_max: f64,
    pub termination: Termination,
}

impl MeridianProfile {
    pub fn second_derivative(&self, x: f64, f: f64, fp: f64) -> f64 {
        MeridianOde {
            alpha: self.alpha.value(),
        }
        .second(x, f, fp)
    }
}

impl Generatrix for MeridianProfile {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.x_max)
    }

    fn eval(&self, x: f64) -> Option<(f64, f64)> {
        eval_samples(&self.samples, x, |s| self.second_derivative(s.x, s.f, s.fp))
    }
}

pub fn solve_meridian(alpha: Alpha, z0: f64, x_max: f64, tol: f64) -> Result<MeridianProfile> {
    check_positive("z0", z0)?;
    check_positive("x_max", x_max)?;
    check_tol(tol)?;
    let a = alpha.value() / (4.0 * z0);
    let series = |x: f64| GraphSample {
        x,
        f: z0 + a * x * x,
        fp: 2.0 * a * x,
    };
    let x_start = MERIDIAN_START * z0;
    let mut samples = vec![GraphSample { x: 0.0, f: z0, fp: 0.0 }];
    if x_max <= x_start {
        samples.push(series(x_max));
        return Ok(MeridianProfile {
            alpha,
            z0,
            samples,
            x_max,
            termination: Termination::ReachedXmax,
        });
    }
    let start = series(x_start);
    let sys = MeridianOde { alpha: alpha.value() };
    let opts = Options {
        h_max: 0.5 * z0,
        ..Options::with_tol(tol)
    };
    let traj = ode::integrate(&sys, x_start, [start.f, start.fp], x_max, &opts, |tr| {
        if tr.y.last().unwrap()[1].abs() > BLOWUP_SLOPE {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    let (termination, _) = blowup_state(&traj);
    samples.extend(graph_samples(&traj));
    let x_end = samples.last().unwrap().x;
    Ok(MeridianProfile {
        alpha,
        z0,
        samples,
        x_max: x_end,
        termination,
    })
}

/// Meridian whose height at `radius` equals `height`, found by shooting on
/// the axis height `z0`.
pub fn match_meridian(alpha: Alpha, radius: f64, height: f64, tol: f64) -> Result<MeridianProfile> {
    check_positive("radius", radius)?;
    check_positive("height", height)?;
    let reach = |z0: f64| -> Result<f64> {
        let prof = solve_meridian(alpha, z0, radius, tol)?;
        Ok(match prof.termination {
            Termination::ReachedXmax => prof.samples.last().unwrap().f - height,
            // Collapsed before the radius: the profile ends below the target.
            Termination::BlowupDetected => -height,
        })
    };
    let z0 = if alpha.value() < 0.0 {
        // f(radius; z0) < z0, so the axis sits above the boundary.
        let mut hi = 2.0 * height;
        while reach(hi)? <= 0.0 {
            hi *= 2.0;
            if hi > 1e12 * height {
                return Err(Error::SearchFailure("could not bracket z0".into()));
            }
        }
        roots::bisect(reach, height, hi, 1e-15 * hi)?
    } else {
        // f(radius; z0) > z0: the axis sits below the boundary.
        let mut lo = 0.5 * height;
        while reach(lo)? >= 0.0 {
            lo *= 0.5;
            if lo < 1e-12 * height {
                return Err(Error::SearchFailure(
                    "boundary height too low for a meridian of this radius".into(),
                ));
            }
        }
        roots::bisect(reach, lo, height, 1e-15 * height)?
    };
    solve_meridian(alpha, z0, radius, tol)
}

// ---------------------------------------------------------------------------
// Winglike meridian in arclength form: x' = cos θ, z' = sin θ,
// θ' + sin θ / x = α cos θ / z.

struct WinglikeOde {
    alpha: f64,
}

impl WinglikeOde {
    fn derivative(&self, y: &[f64; 3]) -> [f64; 3] {
        let [x, z, th] = *y;
        let (s, c) = th.sin_cos();
        [c, s, self.alpha * c / z - s / x]
    }
}

impl OdeSystem<3> for WinglikeOde {
    fn rhs(&self, _s: f64, y: &[f64; 3]) -> [f64; 3] {
        self.derivative(y)
    }

    fn admissible(&self, _s: f64, y: &[f64; 3]) -> bool {
        y[0] > 0.0 && y[1] > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingSample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WingTermination {
    ReachedSmin,
    /// The curve ran into the rotation axis.
    AxisCollision,
    /// Stopped on request after passing a radius beyond the waist.
    ReachedRadius,
}

/// Winglike generating curve integrated for decreasing arclength from its
/// lowest point `(λ, c)` where the tangent is horizontal.
#[derive(Debug, Clone)]
pub struct WinglikeProfile {
    pub alpha: Alpha,
    pub lambda: f64,
    pub c: f64,
    /// Ordered by decreasing `s`, starting at `s = 0`.
    pub samples: Vec<WingSample>,
    /// Arclength where the tangent turns vertical (θ = −π/2).
    pub s0: Option<f64>,
    /// `x(s0)`.
    pub waist_radius: Option<f64>,
    pub waist_height: Option<f64>,
    pub termination: WingTermination,
}

impl WinglikeProfile {
    fn derivative(&self, w: &WingSample) -> [f64; 3] {
        WinglikeOde {
            alpha: self.alpha.value(),
        }
        .derivative(&[w.x, w.z, w.theta])
    }

    /// Hermite interpolation of `(x, z, θ)` inside segment `k`.
    fn interpolate_in(&self, k: usize, s: f64) -> [f64; 3] {
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let (da, db) = (self.derivative(a), self.derivative(b));
        let ya = [a.x, a.z, a.theta];
        let yb = [b.x, b.z, b.theta];
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = ode::hermite(a.s, ya[i], da[i], b.s, yb[i], db[i], s).0;
        }
        out
    }

    fn locate_in<G: Fn(&[f64; 3]) -> f64>(&self, k: usize, g: G) -> Option<f64> {
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let (mut lo, mut hi) = (a.s, b.s);
        let mut g_lo = g(&[a.x, a.z, a.theta]);
        let g_hi = g(&[b.x, b.z, b.theta]);
        if g_lo == 0.0 {
            return Some(lo);
        }
        if g_hi == 0.0 {
            return Some(hi);
        }
        if g_lo.signum() == g_hi.signum() {
            return None;
        }
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m == lo || m == hi {
                break;
            }
            let gm = g(&self.interpolate_in(k, m));
            if gm.signum() == g_lo.signum() {
                lo = m;
                g_lo = gm;
            } else {
                hi = m;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Index of the segment containing the waist event.
    fn waist_segment(&self) -> Option<usize> {
        let s0 = self.s0?;
        (0..self.samples.len().saturating_sub(1)).find(|&k| self.samples[k].s >= s0 && self.samples[k + 1].s <= s0)
    }
}

/// Options for [`solve_winglike_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct WinglikeStop {
    /// Stop once the curve, past its waist, reaches this radius.
    pub radius: Option<f64>,
}

pub fn solve_winglike(alpha: Alpha, lambda: f64, c: f64, s_min: f64, tol: f64) -> Result<WinglikeProfile> {
    solve_winglike_with(alpha, lambda, c, s_min, tol, WinglikeStop::default())
}

pub fn solve_winglike_with(
    alpha: Alpha,
    lambda: f64,
    c: f64,
    s_min: f64,
    tol: f64,
    stop: WinglikeStop,
) -> Result<WinglikeProfile> {
    check_positive("lambda", lambda)?;
    check_positive("c", c)?;
    check_tol(tol)?;
    if !(s_min < 0.0 && s_min.is_finite()) {
        return Err(Error::param(format!("s_min must be negative, got {s_min}")));
    }
    let sys = WinglikeOde { alpha: alpha.value() };
    let opts = Options {
        h_max: 0.25,
        ..Options::with_tol(tol)
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut waist_seen = false;
    let traj = ode::integrate(&sys, 0.0, [lambda, c, 0.0], s_min, &opts, |tr| {
        let n = tr.len();
        let y = &tr.y[n - 1];
        if y[0] < 1e-12 * lambda {
            return Control::Stop;
        }
        if !waist_seen && y[2] <= -half_pi {
            waist_seen = true;
        }
        match stop.radius {
            // Past the waist x only grows, so once it reaches r the exit
            // point (or its absence, if the waist is already wider) is known.
            Some(r) if waist_seen && y[0] >= r => Control::Stop,
            _ => Control::Continue,
        }
    })?;

    let samples: Vec<WingSample> = traj
        .t
        .iter()
        .zip(&traj.y)
        .map(|(&s, y)| WingSample {
            s,
            x: y[0],
            z: y[1],
            theta: y[2],
        })
        .collect();
    let last = samples.last().unwrap();
    let termination = match traj.stop {
        StopReason::ReachedEnd => WingTermination::ReachedSmin,
        StopReason::StepUnderflow => WingTermination::AxisCollision,
        StopReason::Stopped if last.x < 1e-12 * lambda => WingTermination::AxisCollision,
        StopReason::Stopped => WingTermination::ReachedRadius,
    };
    let mut prof = WinglikeProfile {
        alpha,
        lambda,
        c,
        samples,
        s0: None,
        waist_radius: None,
        waist_height: None,
        termination,
    };
    let k = (0..prof.samples.len().saturating_sub(1))
        .find(|&k| prof.samples[k].theta > -half_pi && prof.samples[k + 1].theta <= -half_pi);
    if let Some(k) = k {
        if let Some(s0) = prof.locate_in(k, |y| y[2] + half_pi) {
            let y = prof.interpolate_in(k, s0);
            prof.s0 = Some(s0);
            prof.waist_radius = Some(y[0]);
            prof.waist_height = Some(y[1]);
        }
    }
    Ok(prof)
}

/// Height `z(s1)` where `s1 < s0` is the first arclength beyond the waist
/// with `x(s1) = radius`. `None` when the waist is missing or the curve
/// never reaches that radius on the outer branch.
pub fn winglike_exit_height(profile: &WinglikeProfile, radius: f64) -> Option<f64> {
    if !(radius > 0.0) {
        return None;
    }
    let waist = profile.waist_radius?;
    let k0 = profile.waist_segment()?;
    if radius < waist {
        return None;
    }
    let s0 = profile.s0?;
    if radius == waist {
        return profile.waist_height;
    }
    let n = profile.samples.len();
    for k in k0..n - 1 {
        let b = &profile.samples[k + 1];
        if b.x < radius {
            continue;
        }
        // The waist segment is only searched past s0.
        let s = profile.locate_in(k, |y| y[0] - radius)?;
        if s > s0 {
            continue;
        }
        return Some(profile.interpolate_in(k, s)[1]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn alpha_rejects_zero_and_nan() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(-2.0).is_ok());
    }

    #[test]
    fn catenary_initial_point() {
        let p = solve_catenary(a(1.0), 1.0, 3.0, DEFAULT_TOL).unwrap();
        assert_eq!(
            p.samples[0],
            GraphSample {
                x: 0.0,
                f: 1.0,
                fp: 0.0
            }
        );
        assert_eq!(p.termination, Termination::ReachedXmax);
        assert!(p.r_max.is_none());
    }

    #[test]
    fn catenary_matches_cosh() {
        let p = solve_catenary(a(1.0), 1.0, 3.0, DEFAULT_TOL).unwrap();
        let (f, fp) = p.eval(1.0).unwrap();
        assert!((f - 1f64.cosh()).abs() < 1e-8);
        assert!((fp - 1f64.sinh()).abs() < 1e-8);
        let (fm, fpm) = p.eval_even(-1.0).unwrap();
        assert_eq!(fm, f);
        assert_eq!(fpm, -fp);
    }

    #[test]
    fn catenary_rejects_bad_parameters() {
        assert!(solve_catenary(a(1.0), 0.0, 1.0, 1e-10).unwrap_err().is_invalid_input());
        assert!(solve_catenary(a(1.0), 1.0, -1.0, 1e-10).unwrap_err().is_invalid_input());
        assert!(solve_catenary(a(1.0), 1.0, 1.0, 1e-2).unwrap_err().is_invalid_input());
    }

    #[test]
    fn catenary_alpha_two_blows_up() {
        let p = solve_catenary(a(2.0), 1.0, 10.0, DEFAULT_TOL).unwrap();
        assert_eq!(p.termination, Termination::BlowupDetected);
        let r = p.r_max.unwrap();
        assert!((r - 1.31103).abs() < 1e-3, "r = {r}");
    }

    #[test]
    fn catenary_first_integral_conserved() {
        let p = solve_catenary(a(2.0), 1.0, 10.0, DEFAULT_TOL).unwrap();
        for s in p.samples.iter().filter(|s| s.fp < 1e4) {
            assert!((p.first_integral(s) - 1.0).abs() < 1e-7, "x = {}", s.x);
        }
    }

    #[test]
    fn maximal_radius_regime() {
        assert!(maximal_radius(a(1.0), 1.0, 1e-10).unwrap_err().is_invalid_input());
        assert!(maximal_radius(a(0.5), 1.0, 1e-10).is_err());
    }

    #[test]
    fn catenary_value_regime() {
        // Past the half-width R(2, 1) = 1.3110 the curve has blown up.
        assert!(catenary_value_at(a(2.0), 1.0, 2.0).is_err());
        let z = catenary_value_at(a(2.0), 1.0, 1.0).unwrap();
        assert!((z - 3.218_145_9).abs() < 1e-6);
        let v = catenary_value_at(a(1.0), 1.0, 1.0).unwrap();
        assert!((v - 1f64.cosh()).abs() < 1e-9);
    }

    #[test]
    fn sensitivity_matches_closed_form() {
        // f = z0 cosh(x/z0), df/dz0 = cosh(x/z0) - (x/z0) sinh(x/z0).
        let (z0, x0) = (0.9, 1.3);
        let (f, v) = catenary_sensitivity(a(1.0), z0, x0, 1e-11).unwrap();
        let u = x0 / z0;
        assert!((f - z0 * u.cosh()).abs() < 1e-9);
        assert!((v - (u.cosh() - u * u.sinh())).abs() < 1e-8);
    }

    #[test]
    fn meridian_series_near_axis() {
        let (alpha, z0) = (1.5, 0.7);
        let p = solve_meridian(a(alpha), z0, 1.0, DEFAULT_TOL).unwrap();
        let x = 1e-3;
        let (f, _) = p.eval(x).unwrap();
        assert!((f - (z0 + alpha * x * x / (4.0 * z0))).abs() < 1e-10);
        assert_eq!(p.samples[0], GraphSample { x: 0.0, f: z0, fp: 0.0 });
    }

    #[test]
    fn meridian_negative_alpha_decreases() {
        let p = solve_meridian(a(-2.0), 2.0, 1.0, DEFAULT_TOL).unwrap();
        assert!(p.samples.windows(2).all(|w| w[1].f < w[0].f));
        // α = -2 meridians are hemispheres centred on the boundary plane.
        for s in &p.samples {
            assert!((s.f - (4.0 - s.x * s.x).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn meridian_negative_alpha_collapses() {
        let p = solve_meridian(a(-2.0), 1.0, 5.0, DEFAULT_TOL).unwrap();
        assert_eq!(p.termination, Termination::BlowupDetected);
        assert!((p.x_max - 1.0).abs() < 1e-3);
    }

    #[test]
    fn match_meridian_hemisphere() {
        let p = match_meridian(a(-2.0), 1.0, 2.0, DEFAULT_TOL).unwrap();
        assert!((p.z0 - 5f64.sqrt()).abs() < 1e-8, "z0 = {}", p.z0);
    }

    #[test]
    fn winglike_initial_point() {
        let w = solve_winglike(a(1.0), 1.0, 2.0, -5.0, DEFAULT_TOL).unwrap();
        assert_eq!(
            w.samples[0],
            WingSample {
                s: 0.0,
                x: 1.0,
                z: 2.0,
                theta: 0.0
            }
        );
        assert!(w.samples.iter().all(|s| s.s <= 0.0));
    }

    #[test]
    fn winglike_waist_and_lowest_point() {
        let w = solve_winglike(a(1.0), 1.0, 2.0, -5.0, DEFAULT_TOL).unwrap();
        let s0 = w.s0.expect("waist");
        assert!(s0 < 0.0);
        let r = w.waist_radius.unwrap();
        assert!(r > 0.0 && r < 1.0);
        let zmin = w.samples.iter().map(|s| s.z).fold(f64::INFINITY, f64::min);
        assert_eq!(zmin, 2.0);
        assert!(w.samples.iter().all(|s| s.x > 0.0));
    }

    #[test]
    fn exit_height_absent_below_waist() {
        let w = solve_winglike(a(1.0), 1.0, 2.0, -8.0, DEFAULT_TOL).unwrap();
        let r = w.waist_radius.unwrap();
        assert!(winglike_exit_height(&w, 0.5 * r).is_none());
        let z = winglike_exit_height(&w, 1.5).unwrap();
        assert!(z > 2.0);
    }

    #[test]
    fn extrapolation_of_geometric_sequence() {
        // x_k = 1 - 0.5^k
        let r = extrapolate_limit(1.0 - 0.125, 1.0 - 0.0625, 1.0 - 0.03125);
        assert!((r - 1.0).abs() < 1e-15);
    }
}
