//! Numeric scalars shared by plain evaluation and forward-mode jets.
//!
//! Every pointwise computation in the crate (expression evaluation, bivector
//! assembly, Pfaffians, interpolation) is written once against [`Scalar`] and
//! instantiated with `f64` for values or [`Dual`] for exact gradients.

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Largest supported number of degrees of freedom.
pub const MAX_DOF: usize = 6;
/// Largest supported phase-space dimension (`2 * MAX_DOF`).
pub const MAX_DIM: usize = 2 * MAX_DOF;

pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    /// True when the value and every derivative lane are exactly zero.
    fn is_exact_zero(&self) -> bool;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn scale(self, k: f64) -> Self {
        self * Self::constant(k)
    }

    /// Integer power by repeated squaring. Negative exponents divide, so the
    /// caller must rule out a zero base.
    fn powi(self, k: i32) -> Self {
        let mut base = self;
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        if k < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

/// First-order jet over at most [`MAX_DIM`] seed directions.
///
/// Lanes past the phase-space dimension stay zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: [f64; MAX_DIM],
}

impl Dual {
    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut eps = [0.0; MAX_DIM];
        eps[index] = 1.0;
        Dual { re: value, eps }
    }

    fn chain(self, re: f64, slope: f64) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e *= slope;
        }
        Dual { re, eps }
    }

    pub fn gradient(&self, dim: usize) -> &[f64] {
        &self.eps[..dim]
    }
}

impl fmt::Debug for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual({:?}; {:?})", self.re, &self.eps[..])
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(mut self, rhs: Dual) -> Dual {
        self.re += rhs.re;
        for (a, b) in self.eps.iter_mut().zip(rhs.eps.iter()) {
            *a += *b;
        }
        self
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(mut self, rhs: Dual) -> Dual {
        self.re -= rhs.re;
        for (a, b) in self.eps.iter_mut().zip(rhs.eps.iter()) {
            *a -= *b;
        }
        self
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let mut eps = [0.0; MAX_DIM];
        for (k, e) in eps.iter_mut().enumerate() {
            *e = self.eps[k] * rhs.re + self.re * rhs.eps[k];
        }
        Dual { re: self.re * rhs.re, eps }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let inv = 1.0 / rhs.re;
        let re = self.re * inv;
        let mut eps = [0.0; MAX_DIM];
        for (k, e) in eps.iter_mut().enumerate() {
            *e = (self.eps[k] - re * rhs.eps[k]) * inv;
        }
        Dual { re, eps }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.chain(-self.re, -1.0)
    }
}

impl Scalar for Dual {
    fn constant(v: f64) -> Self {
        Dual { re: v, eps: [0.0; MAX_DIM] }
    }
    fn value(&self) -> f64 {
        self.re
    }
    fn sin(self) -> Self {
        self.chain(libm::sin(self.re), libm::cos(self.re))
    }
    fn cos(self) -> Self {
        self.chain(libm::cos(self.re), -libm::sin(self.re))
    }
    fn exp(self) -> Self {
        let e = libm::exp(self.re);
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(libm::log(self.re), 1.0 / self.re)
    }
    fn scale(self, k: f64) -> Self {
        self.chain(self.re * k, k)
    }
    fn is_exact_zero(&self) -> bool {
        self.re == 0.0 && self.eps.iter().all(|&e| e == 0.0)
    }
}
