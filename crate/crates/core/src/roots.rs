//! Scalar bracketing searches: bisection for monotone targets and
//! golden-section for unimodal ones.

use crate::error::{Error, Result};

/// Root of `f` in `[a, b]` by bisection. `f(a)` and `f(b)` must differ in
/// sign; stops when the bracket is narrower than `tol`.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::SearchFailure(format!(
            "no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    for _ in 0..400 {
        if (b - a).abs() < tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Result of a golden-section minimization.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    /// Final bracket `[lo, hi]` around the minimizer.
    pub bracket: (f64, f64),
    /// Every `(x, f(x))` evaluated, in order.
    pub history: Vec<(f64, f64)>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut history = Vec::new();
    let mut eval = |x: f64, h: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = f(x)?;
        h.push((x, v));
        Ok(v)
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut history)?;
    let mut fd = eval(d, &mut history)?;
    for _ in 0..500 {
        if (b - a) < tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut history)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut history)?;
        }
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(Minimum {
        x,
        value,
        bracket: (a, b),
        history,
    })
}

/// Grow `[lo, hi]` geometrically around a monotone increasing `g` until
/// `g(lo) < target < g(hi)`. `g` may fail for out-of-range arguments, in
/// which case the corresponding end is treated as below the target when
/// shrinking and above it when growing.
pub fn expand_bracket<G>(mut g: G, target: f64, start: f64, factor: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(start > 0.0) || !(factor > 1.0) {
        return Err(Error::param("bracket start must be positive and factor > 1"));
    }
    let mut lo = start;
    let mut hi = start;
    for _ in 0..200 {
        if g(lo)? < target {
            break;
        }
        lo /= factor;
    }
    if g(lo)? >= target {
        return Err(Error::SearchFailure(format!(
            "could not bracket target {target} from below"
        )));
    }
    for _ in 0..200 {
        if g(hi)? > target {
            return Ok((lo, hi));
        }
        hi *= factor;
    }
    Err(Error::SearchFailure(format!(
        "could not bracket target {target} from above"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn bisect_without_sign_change_fails() {
        let r = bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::SearchFailure(_))));
    }

    #[test]
    fn golden_parabola() {
        // No constant offset: with one, the minimizer is only resolvable to
        // about sqrt(eps).
        let m = golden_section(|x| Ok((x - 0.3).powi(2)), -2.0, 5.0, 1e-9).unwrap();
        assert!((m.x - 0.3).abs() < 1e-8);
        assert!(m.value < 1e-16);
        assert!(m.bracket.1 - m.bracket.0 < 1e-9);
    }

    #[test]
    fn tanh_fixed_point() {
        // Root of tanh(1/z) = z, the catenary optimal-height equation.
        let z = bisect(|z| Ok((1.0 / z).tanh() - z), 0.1, 1.0, 1e-15).unwrap();
        assert!(((1.0 / z).tanh() - z).abs() < 1e-14);
        assert!((z - 0.833_556_559_6).abs() < 1e-9);
    }

    #[test]
    fn expand_bracket_linear() {
        let (lo, hi) = expand_bracket(|x| Ok(3.0 * x), 100.0, 1.0, 2.0).unwrap();
        assert!(3.0 * lo < 100.0 && 3.0 * hi > 100.0);
        let (lo, hi) = expand_bracket(|x| Ok(3.0 * x), 1e-3, 1.0, 2.0).unwrap();
        assert!(3.0 * lo < 1e-3 && 3.0 * hi > 1e-3);
    }
}
