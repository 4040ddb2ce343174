//! Numerical checks of the area, height and extremum inequalities for
//! singular minimal surfaces, the comparison sphere used for the height
//! bound, and the non-existence thresholds `h0` and `d0`.
//!
//! Mesh-based inequalities are exact for exact surfaces, so the only
//! slack allowed is a multiple of the measured discretization error; see
//! [`richardson_slack`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{self, TriMesh};
use crate::profiles::{
    self, maximal_radius, optimal_initial_height, solve_winglike_with, winglike_exit_height, Alpha, Generatrix,
    MeridianProfile, WinglikeStop,
};
use crate::roots::{bisect, expand_bracket, golden_section};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `lhs ≤ rhs`, margin `rhs - lhs`.
    Upper,
    /// `lhs ≥ rhs`, margin `lhs - rhs`.
    Lower,
    /// `lhs < rhs` with no slack, margin `rhs - lhs`.
    StrictUpper,
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Discretization allowance; the check passes when `margin ≥ -slack`.
    pub slack: f64,
    pub passed: bool,
    pub inputs: Vec<(String, f64)>,
}

impl BoundReport {
    pub fn new(name: &str, kind: BoundKind, lhs: f64, rhs: f64, slack: f64, inputs: &[(&str, f64)]) -> Self {
        let margin = match kind {
            BoundKind::Upper | BoundKind::StrictUpper => rhs - lhs,
            BoundKind::Lower => lhs - rhs,
        };
        let passed = match kind {
            BoundKind::StrictUpper => margin > 0.0,
            _ => margin >= -slack,
        };
        BoundReport {
            name: name.to_string(),
            kind,
            lhs,
            rhs,
            margin,
            slack,
            passed,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// The report with the smallest margin.
pub fn worst(reports: &[BoundReport]) -> Option<&BoundReport> {
    reports.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
}

/// Ten times the Richardson estimate `|fine - coarse| / (2^order - 1)` of
/// the error in `fine`, for a coarse level with twice the mesh size.
pub fn richardson_slack(fine: f64, coarse: f64, order: f64) -> f64 {
    10.0 * (fine - coarse).abs() / (2f64.powf(order) - 1.0)
}

fn boundary_stats(mesh: &TriMesh) -> Result<(f64, f64, f64)> {
    if mesh.is_closed() {
        return Err(Error::NoBoundary);
    }
    let length: f64 = mesh::boundary_lengths(mesh).iter().sum();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for lp in mesh.boundary_loops() {
        for &v in lp {
            let z = mesh.vertices()[v].z;
            lo = lo.min(z);
            hi = hi.max(z);
        }
    }
    Ok((length, lo, hi))
}

fn check_planar(mesh: &TriMesh, c: f64) -> Result<()> {
    let (_, lo, hi) = boundary_stats(mesh)?;
    let tol = 1e-9 * c.abs();
    if (lo - c).abs() > tol || (hi - c).abs() > tol {
        return Err(Error::InvalidInput(format!(
            "boundary heights span [{lo}, {hi}], not the plane z = {c}"
        )));
    }
    Ok(())
}

fn check_finite_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

/// Area is at most boundary length times the highest boundary point,
/// for α ≥ 1.
pub fn check_area_upper(mesh: &TriMesh, alpha: f64, slack: f64) -> Result<BoundReport> {
    if !(alpha >= 1.0) {
        return Err(Error::param(format!("area upper bound needs alpha >= 1, got {alpha}")));
    }
    let (length, _, top) = boundary_stats(mesh)?;
    let a = mesh::area(mesh);
    Ok(BoundReport::new(
        "area-upper",
        BoundKind::Upper,
        a,
        length * top,
        slack,
        &[("alpha", alpha), ("boundary_length", length), ("boundary_max_z", top)],
    ))
}

/// A surface spanning a planar curve at height `c` that bounds a region of
/// area `omega_area` and length `length` can only exist if `|Ω| ≤ c L`.
pub fn check_planar_necessary(omega_area: f64, c: f64, length: f64) -> Result<BoundReport> {
    check_finite_positive("omega_area", omega_area)?;
    check_finite_positive("c", c)?;
    check_finite_positive("length", length)?;
    Ok(BoundReport::new(
        "planar-necessary",
        BoundKind::Upper,
        omega_area,
        c * length,
        0.0,
        &[("c", c), ("length", length)],
    ))
}

/// Graph area bound `A ≤ c L + (1-α)|Ω|` for 0 < α < 1 and its consequence
/// `|Ω| ≤ (c/α) L`, from already measured quantities.
pub fn graph_area_bounds(
    area: f64,
    alpha: f64,
    c: f64,
    length: f64,
    omega_area: f64,
    slack: f64,
) -> Result<[BoundReport; 2]> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!(
            "graph area bound needs 0 < alpha < 1, got {alpha}"
        )));
    }
    check_finite_positive("c", c)?;
    check_finite_positive("length", length)?;
    check_finite_positive("omega_area", omega_area)?;
    let inputs = [
        ("alpha", alpha),
        ("c", c),
        ("length", length),
        ("omega_area", omega_area),
    ];
    Ok([
        BoundReport::new(
            "graph-area",
            BoundKind::Upper,
            area,
            c * length + (1.0 - alpha) * omega_area,
            slack,
            &inputs,
        ),
        BoundReport::new(
            "graph-domain",
            BoundKind::Upper,
            omega_area,
            c / alpha * length,
            0.0,
            &inputs,
        ),
    ])
}

/// [`graph_area_bounds`] for a graph mesh whose boundary lies in `z = c`.
pub fn check_graph_area(
    mesh: &TriMesh,
    alpha: f64,
    c: f64,
    length: f64,
    omega_area: f64,
    slack: f64,
) -> Result<[BoundReport; 2]> {
    check_planar(mesh, c)?;
    graph_area_bounds(mesh::area(mesh), alpha, c, length, omega_area, slack)
}

/// Area lower bound `A ≥ -(2π/α)(h² - c²)` for α < 0, with `h` the height
/// of the surface and its boundary in `z = c`.
pub fn check_area_lower(mesh: &TriMesh, alpha: f64, c: f64, slack: f64) -> Result<BoundReport> {
    if !(alpha < 0.0) {
        return Err(Error::param(format!("area lower bound needs alpha < 0, got {alpha}")));
    }
    check_planar(mesh, c)?;
    let h = mesh.vertices().iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.z));
    let rhs = -(2.0 * std::f64::consts::PI / alpha) * (h * h - c * c);
    Ok(BoundReport::new(
        "area-lower",
        BoundKind::Lower,
        mesh::area(mesh),
        rhs,
        slack,
        &[("alpha", alpha), ("c", c), ("h", h)],
    ))
}

/// Interior vertices stay below the boundary plane for α > 0 and above it
/// for α < 0, up to one edge length.
pub fn check_extrema_side(mesh: &TriMesh, alpha: f64, c: f64) -> Result<BoundReport> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::param("alpha must be finite and nonzero"));
    }
    check_planar(mesh, c)?;
    let tol = mesh.max_edge_length();
    let mask = mesh.boundary_mask();
    let interior = mesh
        .vertices()
        .iter()
        .zip(&mask)
        .filter(|(_, b)| !**b)
        .map(|(p, _)| p.z);
    let inputs = [("alpha", alpha), ("c", c)];
    Ok(if alpha > 0.0 {
        let top = interior.fold(c, f64::max);
        BoundReport::new("extrema-side", BoundKind::Upper, top, c, tol, &inputs)
    } else {
        let bottom = interior.fold(c, f64::min);
        BoundReport::new("extrema-side", BoundKind::Lower, bottom, c, tol, &inputs)
    })
}

/// Sphere through the circle of radius `r` at height `f_r` whose weighted
/// mean curvature vanishes on that circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSphere {
    pub alpha: Alpha,
    pub r: f64,
    pub f_r: f64,
    /// Sphere radius.
    pub radius: f64,
    /// Height of the center.
    pub center: f64,
}

pub fn comparison_sphere(alpha: Alpha, r: f64, f_r: f64) -> Result<ComparisonSphere> {
    let a = alpha.value();
    if !(a > 0.0) {
        return Err(Error::param(format!("comparison sphere needs alpha > 0, got {a}")));
    }
    check_finite_positive("r", r)?;
    check_finite_positive("f_r", f_r)?;
    Ok(ComparisonSphere {
        alpha,
        r,
        f_r,
        radius: (r * r + 4.0 * f_r * f_r / (a * a)).sqrt(),
        center: (2.0 + a) / a * f_r,
    })
}

impl ComparisonSphere {
    /// Weighted mean curvature of the lower hemisphere at height `z`,
    /// with the normal pointing into the ball.
    pub fn weighted_curvature(&self, z: f64) -> f64 {
        let a = self.alpha.value();
        (1.0 - a * (self.center - z) / (2.0 * z)) / self.radius
    }

    /// Lower hemisphere height above horizontal distance `x` from the axis.
    pub fn lower_height(&self, x: f64) -> f64 {
        self.center - (self.radius * self.radius - x * x).sqrt()
    }
}

/// Strict height bound `f(x) < ((α+2)/α) f(r) - sqrt(r² + 4f(r)²/α² - x²)`
/// at the axis and every profile sample with `x < r`. The bound is the
/// lower comparison sphere through the boundary circle.
pub fn check_height_estimate(meridian: &MeridianProfile, r: f64) -> Result<Vec<BoundReport>> {
    let a = meridian.alpha.value();
    if !(a > 0.0) {
        return Err(Error::param(format!("height estimate needs alpha > 0, got {a}")));
    }
    check_finite_positive("r", r)?;
    let (_, x_max) = meridian.domain();
    if r > x_max {
        return Err(Error::param(format!("r = {r} lies beyond the profile end {x_max}")));
    }
    let (f_r, _) = meridian
        .eval(r)
        .ok_or_else(|| Error::param(format!("profile undefined at r = {r}")))?;
    let sphere = comparison_sphere(meridian.alpha, r, f_r)?;
    let mut points = vec![(0.0, meridian.z0)];
    points.extend(
        meridian
            .samples
            .iter()
            .filter(|s| s.x > 0.0 && s.x < r)
            .map(|s| (s.x, s.f)),
    );
    Ok(points
        .into_iter()
        .map(|(x, f)| {
            BoundReport::new(
                "height",
                BoundKind::StrictUpper,
                f,
                sphere.lower_height(x),
                0.0,
                &[("alpha", a), ("z0", meridian.z0), ("r", r), ("x", x)],
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    H0,
    D0,
}

/// A threshold value with the evaluations behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub kind: ThresholdKind,
    pub value: f64,
    pub parameters: Vec<(String, f64)>,
    /// `(parameter, observable)` pairs; `None` where the observable does
    /// not exist.
    pub sweep: Vec<(f64, Option<f64>)>,
}

/// Height below which no singular minimal surface spans two coaxial
/// circles of radius 1 at distance `m`. For α ≤ 1 it is the least height
/// at `x = m/2` among catenaries; for α > 1 the initial height whose
/// catenary has half-width `m/2`.
pub fn threshold_h0(m: f64, alpha: Alpha, tol: f64) -> Result<Threshold> {
    check_finite_positive("m", m)?;
    let a = alpha.value();
    if !(a > 0.0) {
        return Err(Error::param(format!("h0 needs alpha > 0, got {a}")));
    }
    let half = 0.5 * m;
    let parameters = vec![("m".to_string(), m), ("alpha".to_string(), a)];
    if a <= 1.0 {
        let opt = optimal_initial_height(alpha, half, tol)?;
        Ok(Threshold {
            kind: ThresholdKind::H0,
            value: opt.f_min,
            parameters,
            sweep: opt.history.iter().map(|&(z, f)| (z, Some(f))).collect(),
        })
    } else {
        let mut sweep = Vec::new();
        let mut radius = |z0: f64| -> Result<f64> {
            let r = maximal_radius(alpha, z0, tol)?;
            sweep.push((z0, Some(r)));
            Ok(r)
        };
        let (lo, hi) = expand_bracket(&mut radius, half, half, 2.0)?;
        let z = bisect(|z0| Ok(radius(z0)? - half), lo, hi, tol * half.max(1e-300))?;
        Ok(Threshold {
            kind: ThresholdKind::H0,
            value: z,
            parameters,
            sweep,
        })
    }
}

/// `n` logarithmically spaced values over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::param("log grid needs 0 < lo < hi and at least two points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// Default λ grid for [`threshold_d0`]: 64 points over `[1e-2, 10]·R`.
pub fn default_lambda_grid(radius: f64) -> Result<Vec<f64>> {
    log_grid(1e-2 * radius, 10.0 * radius, 64)
}

/// Height at which the winglike curve with lowest point `(λ, c)` crosses
/// the radius `radius` beyond its waist, if it does.
pub fn winglike_exit(alpha: Alpha, lambda: f64, c: f64, radius: f64, tol: f64) -> Result<Option<f64>> {
    let s_min = -100.0 * (lambda + radius + c);
    let stop = WinglikeStop { radius: Some(radius) };
    let p = solve_winglike_with(alpha, lambda, c, s_min, tol, stop)?;
    Ok(winglike_exit_height(&p, radius))
}

/// Largest exit height at radius `R` over the winglike family with base
/// height `c`, sampled on `lambda_grid` and refined by golden-section
/// search between the neighbours of the best grid point. The result is a
/// lower estimate of the supremum over all λ.
pub fn threshold_d0(alpha: Alpha, radius: f64, c: f64, lambda_grid: &[f64], tol: f64) -> Result<Threshold> {
    if !(alpha.value() > 0.0) {
        return Err(Error::param("d0 needs alpha > 0"));
    }
    check_finite_positive("R", radius)?;
    check_finite_positive("c", c)?;
    if lambda_grid.is_empty() || lambda_grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::param("lambda grid must be nonempty and positive"));
    }
    let exits: Vec<Option<f64>> = lambda_grid
        .par_iter()
        .map(|&l| winglike_exit(alpha, l, c, radius, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut sweep: Vec<(f64, Option<f64>)> = lambda_grid.iter().copied().zip(exits).collect();
    let best = sweep
        .iter()
        .enumerate()
        .filter_map(|(i, (_, e))| e.map(|v| (i, v)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EmptySweep)?;
    let mut value = best.1;
    let (i, _) = best;
    let defined = |k: usize| sweep.get(k).and_then(|s| s.1).is_some();
    if i > 0 && defined(i - 1) && defined(i + 1) {
        let (lo, hi) = (sweep[i - 1].0, sweep[i + 1].0);
        let mut extra = Vec::new();
        let found = golden_section(
            |l| {
                let e = winglike_exit(alpha, l, c, radius, tol)?;
                extra.push((l, e));
                Ok(e.map_or(f64::INFINITY, |v| -v))
            },
            lo,
            hi,
            1e-8 * hi,
        )?;
        if -found.value > value {
            value = -found.value;
        }
        sweep.extend(extra);
    }
    let mut parameters = vec![
        ("alpha".to_string(), alpha.value()),
        ("R".to_string(), radius),
        ("c".to_string(), c),
        ("grid_points".to_string(), lambda_grid.len() as f64),
    ];
    parameters.push((
        "grid_lo".to_string(),
        lambda_grid.iter().copied().fold(f64::INFINITY, f64::min),
    ));
    parameters.push(("grid_hi".to_string(), lambda_grid.iter().copied().fold(0.0, f64::max)));
    Ok(Threshold {
        kind: ThresholdKind::D0,
        value,
        parameters,
        sweep,
    })
}

/// Convenience for tests and the command line: solve the meridian from
/// `z0` out to `r` and run [`check_height_estimate`].
pub fn height_estimate_for(alpha: Alpha, z0: f64, r: f64, tol: f64) -> Result<Vec<BoundReport>> {
    let mer = profiles::solve_meridian(alpha, z0, r, tol)?;
    check_height_estimate(&mer, r)
}
