// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::convex::LinearOperator2D;
use crate::functions::SharedFn;

/// Right-hand side `g(ξ)` of an autonomous comparison system on the cone.
pub trait ComparisonSystem: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn rhs(&self, xi: &[f64], out: &mut [f64]);

    fn eval(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.rhs(xi, &mut out);
        out
    }
}

/// `A = −I`, `F = ψ(V)·Bu` with `B² = 0`, functionals `W₀ = V`, `W₁ = V[u, Bu]`:
///
/// ```text
/// ξ₀' = −2φ(ξ₀)ξ₀ + 2ψ(ξ₀)ξ₁
/// ξ₁' = −2φ(ξ₀)ξ₁
/// ```
#[derive(Clone, Debug)]
pub struct NilpotentPair {
    pub phi: SharedFn,
    pub psi: SharedFn,
}

impl ComparisonSystem for NilpotentPair {
    fn name(&self) -> String {
        "nilpotent_pair".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, xi: &[f64], out: &mut [f64]) {
        let phi = self.phi.eval(xi[0]);
        let psi = self.psi.eval(xi[0]);
        out[0] = -2.0 * phi * xi[0] + 2.0 * psi * xi[1];
        out[1] = -2.0 * phi * xi[1];
    }
}

/// `A = −I`, `F = ψ(V)·Bu` with `Bᵏ = I`, `|det B| = 1`, functionals
/// `W_i = V[u, Bⁱu]` for `i < k`, indices cyclic:
///
/// ```text
/// ξ₀' = −2φ(ξ₀)ξ₀ + 2ψ(ξ₀)ξ₁
/// ξᵢ' = −2φ(ξ₀)ξᵢ + ψ(ξ₀)(ξᵢ₋₁ + ξᵢ₊₁)
/// ```
#[derive(Clone, Debug)]
pub struct MixedChain {
    pub phi: SharedFn,
    pub psi: SharedFn,
    pub k: usize,
}

impl ComparisonSystem for MixedChain {
    fn name(&self) -> String {
        format!("mixed_chain_k{}", self.k)
    }

    fn dim(&self) -> usize {
        self.k
    }

    fn rhs(&self, xi: &[f64], out: &mut [f64]) {
        let k = self.k;
        let phi = self.phi.eval(xi[0]);
        let psi = self.psi.eval(xi[0]);
        out[0] = -2.0 * phi * xi[0] + 2.0 * psi * xi[1 % k];
        for i in 1..k {
            out[i] = -2.0 * phi * xi[i] + psi * (xi[i - 1] + xi[(i + 1) % k]);
        }
    }
}

/// `D_H u = Bu` with `det B < 0`, `tr B ≥ 0`:
///
/// ```text
/// ξ₀' = 2ξ₁
/// ξ₁' = 2|det B|ξ₀ + tr B·ξ₁
/// ```
#[derive(Clone, Copy, Debug)]
pub struct PracticalPair {
    pub trace: f64,
    pub abs_det: f64,
}

impl PracticalPair {
    pub fn from_operator(b: &LinearOperator2D) -> Self {
        Self {
            trace: b.trace(),
            abs_det: b.det().abs(),
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[0.0, 2.0], [2.0 * self.abs_det, self.trace]]
    }
}

impl ComparisonSystem for PracticalPair {
    fn name(&self) -> String {
        "practical_pair".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, xi: &[f64], out: &mut [f64]) {
        out[0] = 2.0 * xi[1];
        out[1] = 2.0 * self.abs_det * xi[0] + self.trace * xi[1];
    }
}

/// Lower comparison equation for the area under a ball source:
/// `ξ₀' = tr A·φ(ξ₀)ξ₀ + 2√π·ψ(ξ₀)√ξ₀`.
#[derive(Clone, Debug)]
pub struct BallVolume {
    pub trace_a: f64,
    pub phi: SharedFn,
    pub psi: SharedFn,
}

impl ComparisonSystem for BallVolume {
    fn name(&self) -> String {
        "ball_volume".into()
    }

    fn dim(&self) -> usize {
        1
    }

    fn rhs(&self, xi: &[f64], out: &mut [f64]) {
        let s = xi[0].max(0.0);
        out[0] = self.trace_a * self.phi.eval(s) * s + 2.0 * PI.sqrt() * self.psi.eval(s) * s.sqrt();
    }
}

/// `ξ' = Mξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearComparison {
    pub matrix: Vec<Vec<f64>>,
}

impl LinearComparison {
    pub fn new(matrix: Vec<Vec<f64>>) -> Self {
        Self { matrix }
    }
}

impl ComparisonSystem for LinearComparison {
    fn name(&self) -> String {
        "linear".into()
    }

    fn dim(&self) -> usize {
        self.matrix.len()
    }

    fn rhs(&self, xi: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.matrix) {
            *o = row.iter().zip(xi).map(|(a, x)| a * x).sum();
        }
    }
}

type RhsFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// System given by a closure.
#[derive(Clone)]
pub struct FnSystem {
    pub label: String,
    pub size: usize,
    pub f: Arc<RhsFn>,
}

impl FnSystem {
    pub fn new(label: impl Into<String>, size: usize, f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            size,
            f: Arc::new(f),
        }
    }

    /// Scalar equation `ξ' = f(ξ)`.
    pub fn scalar(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(label, 1, move |x, out| out[0] = f(x[0]))
    }
}

impl fmt::Debug for FnSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSystem")
            .field("label", &self.label)
            .field("size", &self.size)
            .finish_non_exhaustive()
    }
}

impl ComparisonSystem for FnSystem {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        self.size
    }

    fn rhs(&self, xi: &[f64], out: &mut [f64]) {
        (self.f)(xi, out)
    }
}
