// SPDX-License-Identifier: Apache-2.0

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Real 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearOperator2D {
    rows: [[f64; 2]; 2],
}

/// Eigenvalues of a 2×2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Eigenvalues {
    Real(f64, f64),
    Complex { re: f64, im: f64 },
}

impl Eigenvalues {
    pub fn max_real_part(&self) -> f64 {
        match *self {
            Eigenvalues::Real(a, b) => a.max(b),
            Eigenvalues::Complex { re, .. } => re,
        }
    }
}

impl LinearOperator2D {
    pub const fn new(rows: [[f64; 2]; 2]) -> Self {
        Self { rows }
    }

    pub const fn from_entries(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Self::from_entries(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        Self::from_entries(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn scalar(c: f64) -> Self {
        Self::from_entries(c, 0.0, 0.0, c)
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Self::from_entries(a, 0.0, 0.0, d)
    }

    /// Counterclockwise quarter turn `J`.
    pub const fn quarter_turn() -> Self {
        Self::from_entries(0.0, -1.0, 1.0, 0.0)
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_entries(c, -s, s, c)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.rows[0][0] + self.rows[1][1]
    }

    pub fn det(&self) -> f64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.rows;
        Self::from_entries(a, c, b, d)
    }

    pub fn scale(&self, k: f64) -> Self {
        let [[a, b], [c, d]] = self.rows;
        Self::from_entries(k * a, k * b, k * c, k * d)
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.rows;
        [a * x[0] + b * x[1], c * x[0] + d * x[1]]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.rows;
        Some(Self::from_entries(d / det, -b / det, -c / det, a / det))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.rows.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.rows;
        let p = a * a + c * c;
        let r = b * b + d * d;
        let q = a * b + c * d;
        let mean = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        let hi = (mean + rad).max(0.0).sqrt();
        let lo = if hi > 0.0 { self.det().abs() / hi } else { 0.0 };
        (hi, lo)
    }

    /// Operator norm induced by the Euclidean norm.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().0
    }

    /// Ratio of singular values; infinite for singular matrices.
    pub fn condition_number(&self) -> f64 {
        let (hi, lo) = self.singular_values();
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    pub fn eigenvalues(&self) -> Eigenvalues {
        let half_tr = 0.5 * self.trace();
        let disc = half_tr * half_tr - self.det();
        if disc >= 0.0 {
            let s = disc.sqrt();
            Eigenvalues::Real(half_tr + s, half_tr - s)
        } else {
            Eigenvalues::Complex {
                re: half_tr,
                im: (-disc).sqrt(),
            }
        }
    }

    /// `exp(t·self)` in closed form.
    pub fn exp(&self, t: f64) -> Self {
        let s = 0.5 * self.trace();
        let n = *self - Self::scalar(s);
        // n is traceless, so n² = q·I
        let q = -n.det();
        let qt2 = q * t * t;
        let (c, sh) = if qt2.abs() < 1e-6 {
            (
                1.0 + qt2 / 2.0 + qt2 * qt2 / 24.0,
                t * (1.0 + qt2 / 6.0 + qt2 * qt2 / 120.0),
            )
        } else if q > 0.0 {
            let w = q.sqrt();
            ((w * t).cosh(), (w * t).sinh() / w)
        } else {
            let w = (-q).sqrt();
            ((w * t).cos(), (w * t).sin() / w)
        };
        let e = (s * t).exp();
        (Self::scalar(c) + n.scale(sh)).scale(e)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..k {
            out = out * *self;
        }
        out
    }
}

impl Default for LinearOperator2D {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for LinearOperator2D {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let a = self.rows;
        let b = rhs.rows;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::new(out)
    }
}

impl Add for LinearOperator2D {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut out = self.rows;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += rhs.rows[i][j];
            }
        }
        Self::new(out)
    }
}

impl Sub for LinearOperator2D {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn taylor_exp(m: LinearOperator2D, t: f64) -> LinearOperator2D {
        let mut term = LinearOperator2D::identity();
        let mut sum = term;
        for k in 1..60 {
            term = (term * m).scale(t / k as f64);
            sum = sum + term;
        }
        sum
    }

    fn close(a: LinearOperator2D, b: LinearOperator2D, tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(a.entry(i, j), b.entry(i, j), epsilon = tol);
            }
        }
    }

    #[test]
    fn exp_matches_taylor_series() {
        let cases = [
            LinearOperator2D::from_entries(0.0, 1.0, 1.0, 0.0),
            LinearOperator2D::quarter_turn(),
            LinearOperator2D::from_entries(0.0, 1.0, 0.0, 0.0),
            LinearOperator2D::from_entries(-0.3, 0.7, -1.1, 0.4),
            LinearOperator2D::from_entries(1e-5, 2e-4, -3e-4, 0.0),
            LinearOperator2D::scalar(-1.0),
        ];
        for m in cases {
            for t in [0.0, 0.1, 1.0, 2.5] {
                close(m.exp(t), taylor_exp(m, t), 1e-11 * taylor_exp(m, t).frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn exp_of_quarter_turn_is_rotation() {
        close(
            LinearOperator2D::quarter_turn().exp(0.7),
            LinearOperator2D::rotation(0.7),
            1e-14,
        );
    }

    #[test]
    fn trace_det_and_inverse() {
        let m = LinearOperator2D::from_entries(2.0, 1.0, -1.0, 3.0);
        assert_eq!(m.trace(), 5.0);
        assert_eq!(m.det(), 7.0);
        close(m * m.inverse().unwrap(), LinearOperator2D::identity(), 1e-15);
        assert!(LinearOperator2D::from_entries(0.0, 1.0, 0.0, 0.0).inverse().is_none());
    }

    #[test]
    fn spectral_norm_and_condition() {
        let m = LinearOperator2D::diag(3.0, -0.5);
        assert_abs_diff_eq!(m.spectral_norm(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.condition_number(), 6.0, epsilon = 1e-13);
        assert_abs_diff_eq!(LinearOperator2D::rotation(1.3).condition_number(), 1.0, epsilon = 1e-12);
        assert!(LinearOperator2D::zero().condition_number().is_infinite());
    }

    #[test]
    fn eigenvalue_kinds() {
        assert_eq!(
            LinearOperator2D::from_entries(0.0, 2.0, 2.0, 0.0).eigenvalues(),
            Eigenvalues::Real(2.0, -2.0)
        );
        assert_eq!(
            LinearOperator2D::quarter_turn().eigenvalues(),
            Eigenvalues::Complex { re: 0.0, im: 1.0 }
        );
    }

    #[test]
    fn constructors_are_row_major() {
        let m = LinearOperator2D::new([[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(m, LinearOperator2D::from_entries(1.0, 2.0, 3.0, 4.0));
        assert_eq!(m.apply([1.0, 0.0]), [1.0, 3.0]);
        assert_eq!(m.transpose().entry(0, 1), 3.0);
    }
}
