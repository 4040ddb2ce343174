//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's integrators or searches.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫_0^θ cos(t)^(-1/α) dt` for α > 1, written with `u = π/2 - t`,
/// `u = w^p`, `p = α/(α-1)` so the integrand stays bounded at `t = π/2`.
fn secant_power_integral(alpha: f64, theta: f64) -> f64 {
    let p = alpha / (alpha - 1.0);
    let g = |w: f64| {
        if w == 0.0 {
            return p; // limit of p w^(p-1) sin(w^p)^(-1/α)
        }
        p * w.powf(p - 1.0) * w.powf(p).sin().powf(-1.0 / alpha)
    };
    let w_lo = (FRAC_PI_2 - theta).max(0.0).powf(1.0 / p);
    let w_hi = FRAC_PI_2.powf(1.0 / p);
    simpson(g, w_lo, w_hi, 20_000)
}

/// Half-width of the α-catenary through `(0, z0)`, α > 1, from the
/// tangent-angle parametrization `x(θ) = (z0/α) ∫_0^θ cos^(-1/α)`.
pub fn catenary_radius(alpha: f64, z0: f64) -> f64 {
    z0 / alpha * secant_power_integral(alpha, FRAC_PI_2)
}

/// Height of the α-catenary (α > 1) at abscissa `x`, using
/// `z = z0 cos(θ)^(-1/α)` and bisection on `x(θ)`.
pub fn catenary_height(alpha: f64, z0: f64, x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if z0 / alpha * secant_power_integral(alpha, m) < x {
            lo = m;
        } else {
            hi = m;
        }
    }
    z0 * (0.5 * (lo + hi)).cos().powf(-1.0 / alpha)
}

/// Root of `tanh(1/z) = z`: the initial height minimizing `z cosh(1/z)`.
pub fn tanh_fixed_point() -> f64 {
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if (1.0 / m).tanh() - m > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Rotational meridian `f''/(1+f'^2) + f'/x = α/f`, `f(0) = z0`, by
/// classical RK4 with `n` uniform steps from a series start near the axis.
/// Returns `(x, f, f')` at every step.
pub fn rk4_meridian(alpha: f64, z0: f64, x_end: f64, n: usize) -> Vec<(f64, f64, f64)> {
    let rhs = |x: f64, f: f64, p: f64| (1.0 + p * p) * (alpha / f - p / x);
    let x0 = 1e-6 * x_end;
    let mut x = x0;
    let mut f = z0 + alpha * x0 * x0 / (4.0 * z0);
    let mut p = alpha * x0 / (2.0 * z0);
    let h = (x_end - x0) / n as f64;
    let mut out = vec![(0.0, z0, 0.0), (x, f, p)];
    for _ in 0..n {
        let k1 = (p, rhs(x, f, p));
        let k2 = (
            p + 0.5 * h * k1.1,
            rhs(x + 0.5 * h, f + 0.5 * h * k1.0, p + 0.5 * h * k1.1),
        );
        let k3 = (
            p + 0.5 * h * k2.1,
            rhs(x + 0.5 * h, f + 0.5 * h * k2.0, p + 0.5 * h * k2.1),
        );
        let k4 = (p + h * k3.1, rhs(x + h, f + h * k3.0, p + h * k3.1));
        f += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        x += h;
        out.push((x, f, p));
    }
    out
}

/// Area `2π ∫ x sqrt(1 + f'^2) dx` and weighted area `2π ∫ x sqrt(1+f'^2) f^α dx`
/// of the surface of revolution over `[0, x_end]`, by the trapezoid rule
/// on an RK4 meridian with many steps.
pub fn revolution_areas(alpha: f64, z0: f64, x_end: f64) -> (f64, f64) {
    let pts = rk4_meridian(alpha, z0, x_end, 200_000);
    let (mut a, mut w) = (0.0, 0.0);
    for k in 1..pts.len() {
        let (x0, f0, p0) = pts[k - 1];
        let (x1, f1, p1) = pts[k];
        let g0 = x0 * (1.0 + p0 * p0).sqrt();
        let g1 = x1 * (1.0 + p1 * p1).sqrt();
        a += 0.5 * (x1 - x0) * (g0 + g1);
        w += 0.5 * (x1 - x0) * (g0 * f0.powf(alpha) + g1 * f1.powf(alpha));
    }
    (std::f64::consts::TAU * a, std::f64::consts::TAU * w)
}

/// Observed convergence order from errors at successive halvings of h.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Small deterministic generator for reproducible random states.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
    }
}
