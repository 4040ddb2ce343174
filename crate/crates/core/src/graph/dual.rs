//! Forward-mode dual numbers with a fixed number of derivative slots.
//! Used to assemble exact Jacobian rows of the local stencil residual.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the stencil residual, so one generic routine
/// serves both plain evaluation and differentiation.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Add<f64, Output = Self>
{
    fn constant(v: f64) -> Self;
    fn sqrt(self) -> Self;
    fn value(self) -> f64;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn value(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<const K: usize> {
    pub v: f64,
    pub d: [f64; K],
}

impl<const K: usize> Dual<K> {
    /// Independent variable occupying derivative slot `slot`.
    pub fn variable(v: f64, slot: usize) -> Self {
        let mut d = [0.0; K];
        d[slot] = 1.0;
        Dual { v, d }
    }

    fn map_d(self, f: impl Fn(f64) -> f64) -> [f64; K] {
        let mut d = self.d;
        for x in &mut d {
            *x = f(*x);
        }
        d
    }
}

impl<const K: usize> Add for Dual<K> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a += b;
        }
        Dual { v: self.v + o.v, d }
    }
}

impl<const K: usize> Sub for Dual<K> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a -= b;
        }
        Dual { v: self.v - o.v, d }
    }
}

impl<const K: usize> Mul for Dual<K> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; K];
        for i in 0..K {
            d[i] = self.v * o.d[i] + o.v * self.d[i];
        }
        Dual { v: self.v * o.v, d }
    }
}

impl<const K: usize> Div for Dual<K> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        let mut d = [0.0; K];
        for i in 0..K {
            d[i] = (self.d[i] - q * o.d[i]) * inv;
        }
        Dual { v: q, d }
    }
}

impl<const K: usize> Neg for Dual<K> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            d: self.map_d(|x| -x),
        }
    }
}

impl<const K: usize> Mul<f64> for Dual<K> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Dual {
            v: self.v * s,
            d: self.map_d(|x| x * s),
        }
    }
}

impl<const K: usize> Add<f64> for Dual<K> {
    type Output = Self;
    fn add(self, s: f64) -> Self {
        Dual {
            v: self.v + s,
            d: self.d,
        }
    }
}

impl<const K: usize> Scalar for Dual<K> {
    fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; K] }
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let k = 0.5 / s;
        Dual {
            v: s,
            d: self.map_d(|x| x * k),
        }
    }
    fn value(self) -> f64 {
        self.v
    }
}
