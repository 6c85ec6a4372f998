//! Truncated Taylor expansions ("jets") of holomorphic functions.
//!
//! A [`Taylor`] holds the normalized coefficients `f^(k)(z0) / k!` for
//! `k = 0..=MAX_ORDER`. Arithmetic follows the usual Cauchy-product
//! recurrences, so composing rational expressions of jets yields exact
//! derivatives up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: usize = 4;
const LEN: usize = MAX_ORDER + 1;

const FACTORIAL: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor(pub [Complex64; LEN]);

impl Taylor {
    pub fn constant(c: Complex64) -> Self {
        let mut t = [Complex64::new(0.0, 0.0); LEN];
        t[0] = c;
        Taylor(t)
    }

    /// The identity function `z` expanded around `z0`.
    pub fn variable(z0: Complex64) -> Self {
        let mut t = Self::constant(z0);
        t.0[1] = Complex64::new(1.0, 0.0);
        t
    }

    pub fn value(&self) -> Complex64 {
        self.0[0]
    }

    /// Derivatives `f, f', ..., f^(order)`.
    pub fn derivatives(&self, order: usize) -> Vec<Complex64> {
        (0..=order.min(MAX_ORDER))
            .map(|k| self.0[k] * FACTORIAL[k])
            .collect()
    }

    pub fn from_derivatives(d: &[Complex64]) -> Self {
        let mut t = Self::constant(Complex64::new(0.0, 0.0));
        for (k, v) in d.iter().take(LEN).enumerate() {
            t.0[k] = v / FACTORIAL[k];
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for c in out.0.iter_mut() {
            *c *= s;
        }
        out
    }

    pub fn recip(&self) -> Self {
        Taylor::constant(Complex64::new(1.0, 0.0)) / *self
    }

    /// Square root with the value branch fixed by `root0` (which must square to
    /// the value of `self`).
    pub fn sqrt_with_root(&self, root0: Complex64) -> Self {
        let a = &self.0;
        let mut s = [Complex64::new(0.0, 0.0); LEN];
        s[0] = root0;
        for n in 1..LEN {
            let mut acc = a[n];
            for k in 1..n {
                acc -= s[k] * s[n - k];
            }
            s[n] = acc / (2.0 * root0);
        }
        Taylor(s)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Taylor::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    /// Evaluate the polynomial `sum c_k x^k` on a jet by Horner's rule.
    pub fn polynomial(coeffs: &[Complex64], x: &Taylor) -> Taylor {
        let mut acc = Taylor::constant(Complex64::new(0.0, 0.0));
        for c in coeffs.iter().rev() {
            acc = acc * *x;
            acc.0[0] += c;
        }
        acc
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: Taylor) -> Taylor {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: Taylor) -> Taylor {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let mut out = [Complex64::new(0.0, 0.0); LEN];
        for i in 0..LEN {
            for j in 0..LEN - i {
                out[i + j] += self.0[i] * rhs.0[j];
            }
        }
        Taylor(out)
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        let d0 = rhs.0[0];
        let mut q = [Complex64::new(0.0, 0.0); LEN];
        for n in 0..LEN {
            let mut acc = self.0[n];
            for k in 1..=n {
                acc -= rhs.0[k] * q[n - k];
            }
            q[n] = acc / d0;
        }
        Taylor(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quotient_matches_hand_derivatives() {
        // 1 / (1 + z^2) at z0 = 0.3 + 0.1i
        let z0 = c(0.3, 0.1);
        let x = Taylor::variable(z0);
        let one = Taylor::constant(c(1.0, 0.0));
        let f = one / (one + x * x);
        let d = f.derivatives(2);
        let u = 1.0 + z0 * z0;
        assert!((d[0] - 1.0 / u).norm() < 1e-15);
        assert!((d[1] + 2.0 * z0 / (u * u)).norm() < 1e-14);
        let second = (6.0 * z0 * z0 - 2.0) / (u * u * u);
        assert!((d[2] - second).norm() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Taylor::variable(c(0.2, -0.4));
        let f = Taylor::constant(c(2.0, 1.0)) + x * x * x;
        let r = f.sqrt_with_root(f.value().sqrt());
        let back = r * r;
        for k in 0..LEN {
            assert!((back.0[k] - f.0[k]).norm() < 1e-14);
        }
    }
}
