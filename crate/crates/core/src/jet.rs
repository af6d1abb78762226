//! Two-variable truncated Taylor arithmetic (total degree ≤ 4).
//!
//! A [`Jet`] carries the Taylor coefficients of a smooth function of the
//! chart coordinates (x, y) around a point. Running the geometry formulas
//! in jet arithmetic yields partial derivatives of composite quantities
//! (angle, mean curvature, ...) that are exact up to rounding, which is
//! what the identity residuals with tolerance 1e-9 require.
//!
//! Coefficients are stored in graded order
//! `1, x, y, x², xy, y², x³, x²y, xy², y³, x⁴, x³y, x²y², xy³, y⁴`
//! and are Taylor coefficients, i.e. `c[(i,j)] = ∂ₓ^i ∂ᵧ^j f / (i! j!)`.

use crate::scalar::Scalar;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Truncation order (total degree).
pub const ORDER: usize = 4;
/// Number of stored coefficients.
pub const LEN: usize = 15;

const DEG_OFFSET: [usize; 5] = [0, 1, 3, 6, 10];

/// Coefficient index of the x^i y^j monomial (requires i + j ≤ 4).
#[inline]
pub const fn idx(i: usize, j: usize) -> usize {
    DEG_OFFSET[i + j] + j
}

/// Exponents (i, j) for each stored coefficient, in storage order.
const EXPONENTS: [(usize, usize); LEN] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The coordinate function x around x0.
    pub fn coord_x(x0: f64) -> Self {
        let mut j = Jet::constant(x0);
        j.c[idx(1, 0)] = 1.0;
        j
    }

    /// The coordinate function y around y0.
    pub fn coord_y(y0: f64) -> Self {
        let mut j = Jet::constant(y0);
        j.c[idx(0, 1)] = 1.0;
        j
    }

    /// Build from raw Taylor coefficients.
    pub fn from_coeffs(c: [f64; LEN]) -> Self {
        Jet { c }
    }

    /// Jet of a separable product f(x)·g(y) given derivative lists
    /// (fx[k] = f^(k)(x0), gy[k] = g^(k)(y0)).
    pub fn separable(fx: &[f64; 5], gy: &[f64; 5]) -> Self {
        let mut fact = [1.0; 5];
        for k in 1..5 {
            fact[k] = fact[k - 1] * k as f64;
        }
        let mut c = [0.0; LEN];
        for (n, &(i, j)) in EXPONENTS.iter().enumerate() {
            c[n] = fx[i] / fact[i] * (gy[j] / fact[j]);
        }
        Jet { c }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Partial derivative value ∂ₓ^i ∂ᵧ^j f (i + j ≤ 4).
    #[inline]
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        let mut f = 1.0;
        for k in 2..=i {
            f *= k as f64;
        }
        for k in 2..=j {
            f *= k as f64;
        }
        self.c[idx(i, j)] * f
    }

    /// Jet of ∂f/∂x (top-degree coefficients are lost).
    pub fn dx(&self) -> Jet {
        let mut c = [0.0; LEN];
        for (n, &(i, j)) in EXPONENTS.iter().enumerate() {
            if i + j < ORDER {
                c[n] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        Jet { c }
    }

    /// Jet of ∂f/∂y (top-degree coefficients are lost).
    pub fn dy(&self) -> Jet {
        let mut c = [0.0; LEN];
        for (n, &(i, j)) in EXPONENTS.iter().enumerate() {
            if i + j < ORDER {
                c[n] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        Jet { c }
    }

    /// Compose with a univariate function given its derivatives at the
    /// value part: returns f(self) where d[k] = f^(k)(self.value()).
    pub fn compose(&self, d: [f64; 5]) -> Jet {
        // f(v + w) = Σ f^(k)(v)/k! · w^k with w the zero-constant part.
        let mut w = *self;
        w.c[0] = 0.0;
        let mut acc = Jet::constant(d[0]);
        let mut pw = Jet::constant(1.0);
        let mut fact = 1.0;
        for k in 1..=ORDER {
            fact *= k as f64;
            pw = pw * w;
            acc = acc + pw * (d[k] / fact);
        }
        acc
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for n in 0..LEN {
            self.c[n] += rhs.c[n];
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for n in 0..LEN {
            self.c[n] -= rhs.c[n];
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for n in 0..LEN {
            self.c[n] = -self.c[n];
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (n, &(i, j)) in EXPONENTS.iter().enumerate() {
            let a = self.c[n];
            if a == 0.0 {
                continue;
            }
            for (m, &(k, l)) in EXPONENTS.iter().enumerate() {
                if i + k + j + l <= ORDER {
                    c[idx(i + k, j + l)] += a * rhs.c[m];
                } else {
                    break;
                }
            }
        }
        Jet { c }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for n in 0..LEN {
            self.c[n] *= rhs;
        }
        self
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * Scalar::recip(rhs)
    }
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn val(self) -> f64 {
        self.c[0]
    }
    fn cosh(self) -> Self {
        let (c, s) = (self.c[0].cosh(), self.c[0].sinh());
        self.compose([c, s, c, s, c])
    }
    fn sinh(self) -> Self {
        let (c, s) = (self.c[0].cosh(), self.c[0].sinh());
        self.compose([s, c, s, c, s])
    }
    fn tanh(self) -> Self {
        let t = self.c[0].tanh();
        let p = 1.0 - t * t; // sech²
        self.compose([
            t,
            p,
            -2.0 * t * p,
            p * (6.0 * t * t - 2.0),
            p * t * (16.0 - 24.0 * t * t),
        ])
    }
    fn sqrt(self) -> Self {
        let v = self.c[0];
        let s = v.sqrt();
        self.compose([
            s,
            0.5 / s,
            -0.25 / (s * v),
            0.375 / (s * v * v),
            -0.9375 / (s * v * v * v),
        ])
    }
    fn recip(self) -> Self {
        let v = self.c[0];
        let w = 1.0 / v;
        self.compose([
            w,
            -w * w,
            2.0 * w * w * w,
            -6.0 * w * w * w * w,
            24.0 * w * w * w * w * w,
        ])
    }
}
