// SPDX-License-Identifier: Apache-2.0

//! Scalar functions `ℝ₊ → ℝ` used for φ, ψ and the comparison bounds.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub trait ScalarFn: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn eval(&self, s: f64) -> f64;

    /// Central difference with a relative step.
    fn derivative(&self, s: f64) -> f64 {
        let h = 1e-6 * s.abs().max(1.0);
        if s - h < 0.0 {
            (self.eval(s + h) - self.eval(s)) / h
        } else {
            (self.eval(s + h) - self.eval(s - h)) / (2.0 * h)
        }
    }
}

pub type SharedFn = Arc<dyn ScalarFn>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("rational function needs a nonempty denominator")]
    EmptyDenominator,
    #[error("table needs at least two strictly increasing abscissae")]
    BadTable,
    #[error("parameters must be finite")]
    NonFinite,
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl ScalarFn for Constant {
    fn name(&self) -> &'static str {
        "constant"
    }

    fn eval(&self, _: f64) -> f64 {
        self.0
    }

    fn derivative(&self, _: f64) -> f64 {
        0.0
    }
}

/// `P(s)/Q(s)` with coefficients in ascending powers.
#[derive(Clone, Debug)]
pub struct Rational {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * s + a)
}

fn horner_derivative(c: &[f64], s: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, a)| acc * s + k as f64 * a)
}

impl Rational {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self, FunctionError> {
        if den.is_empty() {
            return Err(FunctionError::EmptyDenominator);
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(FunctionError::NonFinite);
        }
        Ok(Self { num, den })
    }

    /// `1/(1+s)`.
    pub fn reciprocal_shift() -> Self {
        Self {
            num: vec![1.0],
            den: vec![1.0, 1.0],
        }
    }
}

impl ScalarFn for Rational {
    fn name(&self) -> &'static str {
        "rational"
    }

    fn eval(&self, s: f64) -> f64 {
        horner(&self.num, s) / horner(&self.den, s)
    }

    fn derivative(&self, s: f64) -> f64 {
        let p = horner(&self.num, s);
        let q = horner(&self.den, s);
        (horner_derivative(&self.num, s) * q - p * horner_derivative(&self.den, s)) / (q * q)
    }
}

/// `c·(s + shift)^p`.
#[derive(Clone, Copy, Debug)]
pub struct Power {
    pub coefficient: f64,
    pub exponent: f64,
    pub shift: f64,
}

impl Power {
    pub fn new(coefficient: f64, exponent: f64) -> Self {
        Self {
            coefficient,
            exponent,
            shift: 0.0,
        }
    }
}

impl ScalarFn for Power {
    fn name(&self) -> &'static str {
        "power"
    }

    fn eval(&self, s: f64) -> f64 {
        self.coefficient * (s + self.shift).max(0.0).powf(self.exponent)
    }

    fn derivative(&self, s: f64) -> f64 {
        let x = (s + self.shift).max(0.0);
        if self.exponent == 0.0 {
            0.0
        } else {
            self.coefficient * self.exponent * x.powf(self.exponent - 1.0)
        }
    }
}

/// Piecewise-linear table, constant beyond the end points.
#[derive(Clone, Debug)]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, FunctionError> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FunctionError::BadTable);
        }
        if xs.iter().chain(&ys).any(|c| !c.is_finite()) {
            return Err(FunctionError::NonFinite);
        }
        Ok(Self { xs, ys })
    }
}

impl ScalarFn for Table {
    fn name(&self) -> &'static str {
        "table"
    }

    fn eval(&self, s: f64) -> f64 {
        let n = self.xs.len();
        if s <= self.xs[0] {
            return self.ys[0];
        }
        if s >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.xs.partition_point(|x| *x <= s) - 1;
        let w = (s - self.xs[k]) / (self.xs[k + 1] - self.xs[k]);
        self.ys[k] + w * (self.ys[k + 1] - self.ys[k])
    }
}

/// Largest sampled `|f(s) − f(t)|/|s − t|` on a uniform grid of `[lo, hi]`.
pub fn sampled_lipschitz(f: &dyn ScalarFn, lo: f64, hi: f64, n: usize) -> f64 {
    let n = n.max(2);
    let xs: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    xs.windows(2)
        .map(|w| ((f.eval(w[1]) - f.eval(w[0])) / (w[1] - w[0])).abs())
        .fold(0.0, f64::max)
}
