//! Minimal 2x2 complex matrices for transfer-cocycle work.

use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse via the adjugate; errors are the caller's concern (callers
    /// only invert matrices with `|det|` bounded away from zero).
    pub fn inverse(&self) -> Mat2 {
        let inv_det = C64::new(1.0, 0.0) / self.det();
        Mat2 {
            a: self.d * inv_det,
            b: -self.b * inv_det,
            c: -self.c * inv_det,
            d: self.a * inv_det,
        }
    }

    pub fn conj_transpose(&self) -> Mat2 {
        Mat2 {
            a: self.a.conj(),
            b: self.c.conj(),
            c: self.b.conj(),
            d: self.d.conj(),
        }
    }

    pub fn apply(&self, v: (C64, C64)) -> (C64, C64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Operator 2-norm (largest singular value), exact for 2x2:
    /// `sigma_1^2 = (s + sqrt(s^2 - 4 |det|^2)) / 2` with `s` the squared
    /// Frobenius norm.
    pub fn op_norm(&self) -> f64 {
        let s = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        let d2 = self.det().norm_sqr();
        let disc = (s * s - 4.0 * d2).max(0.0);
        (0.5 * (s + disc.sqrt())).sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        (self.a - rhs.a)
            .norm()
            .max((self.b - rhs.b).norm())
            .max((self.c - rhs.c).norm())
            .max((self.d - rhs.d).norm())
    }
}
