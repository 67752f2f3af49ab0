// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::Serialize;

use super::CertificateError;
use crate::comparison::{check_practical, MeasurePair, PracticalPair, StabilityKind, StabilityVerdict};
use crate::convex::{make_ball, LinearOperator2D, SupportFunction2D};
use crate::functions::ScalarFn;

/// `Γ(1 + n/2)` by the half-integer recursion.
pub fn gamma_half_integer(n: u32) -> f64 {
    let (mut x, mut g) = if n % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = 1.0 + n as f64 / 2.0;
    while x < target - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: u32) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if (fm <= 0.0) == (f_lo <= 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

#[derive(Clone, Debug, Serialize)]
pub struct Example51Report {
    pub n: u32,
    pub lambda0: f64,
    /// `ψ(λ₀)/φ(λ₀)`; the fixed point is this multiple of the unit ball.
    pub radius: f64,
    /// `d/dλ ln(λφ/ψ)` at `λ₀`.
    pub log_derivative: f64,
    /// `−n[φ + λψ·(φ/ψ)']` at `λ₀`.
    pub gamma0: f64,
    pub residual: f64,
    pub kind: StabilityKind,
    #[serde(skip)]
    pub u_star: Option<SupportFunction2D>,
}

/// Root of `λ = (ψ/φ)ⁿ·|Bⁿ|` by bracketing and bisection, and the stability
/// condition at the resulting ball fixed point. `u_star` is built on a grid
/// of size `m` when `n = 2`.
pub fn example51_fixed_point(phi: &dyn ScalarFn, psi: &dyn ScalarFn, n: u32, m: usize) -> Result<Example51Report, CertificateError> {
    if n == 0 {
        return Err(CertificateError::Precondition("dimension must be positive".into()));
    }
    let omega = unit_ball_volume(n);
    let g = |l: f64| l - (psi.eval(l) / phi.eval(l)).powi(n as i32) * omega;
    let grid: Vec<f64> = (0..=480).map(|k| 10f64.powf(-8.0 + k as f64 / 30.0)).collect();
    let bracket = grid
        .windows(2)
        .find(|w| {
            let (a, b) = (g(w[0]), g(w[1]));
            a.is_finite() && b.is_finite() && (a <= 0.0) != (b <= 0.0)
        })
        .ok_or(CertificateError::NoSignChange { lo: grid[0], hi: grid[grid.len() - 1] })?;
    let lambda0 = bisect(g, bracket[0], bracket[1], 200);
    let radius = psi.eval(lambda0) / phi.eval(lambda0);
    if !(radius > 0.0) {
        return Err(CertificateError::Precondition("ψ/φ must be positive at the root".into()));
    }
    let h = 1e-4 * lambda0;
    let log_derivative = central(|l| (l * phi.eval(l) / psi.eval(l)).ln(), lambda0, h);
    let ratio_derivative = central(|l| phi.eval(l) / psi.eval(l), lambda0, h);
    let gamma0 = -(n as f64) * (phi.eval(lambda0) + lambda0 * psi.eval(lambda0) * ratio_derivative);
    let tol = 1e-8 * lambda0.recip().max(1.0);
    let kind = if log_derivative > tol {
        StabilityKind::AsymptoticallyStable
    } else if log_derivative < -tol {
        StabilityKind::Unstable
    } else {
        StabilityKind::Inconclusive
    };
    let u_star = if n == 2 { Some(make_ball(radius, [0.0, 0.0], m)?) } else { None };
    Ok(Example51Report {
        n,
        lambda0,
        radius,
        log_derivative,
        gamma0,
        residual: g(lambda0),
        kind,
        u_star,
    })
}

/// Least positive root of `3λ³ + 14λ² − 16`.
pub fn cubic_lambda_star() -> f64 {
    bisect(|l| 3.0 * l * l * l + 14.0 * l * l - 16.0, 0.0, 2.0, 200)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Example54Mu {
    pub trace: f64,
    pub abs_det: f64,
    /// `(4|det B| ± √(tr²B + 16|det B|))/2`, the stated closed form.
    pub stated_mu_plus: f64,
    pub stated_mu_minus: f64,
    /// Eigenvalues of `[[0, 2], [2|det B|, tr B]]`.
    pub eigen_plus: f64,
    pub eigen_minus: f64,
    pub discrepancy: bool,
}

pub fn example54_mu(b: &LinearOperator2D) -> Result<Example54Mu, CertificateError> {
    let (tr, det) = (b.trace(), b.det());
    if !(det < 0.0 && tr >= 0.0) {
        return Err(CertificateError::Precondition(format!(
            "needs det B < 0 and tr B ≥ 0, got det {det}, tr {tr}"
        )));
    }
    let ad = det.abs();
    let root = (tr * tr + 16.0 * ad).sqrt();
    let stated_mu_plus = (4.0 * ad + root) / 2.0;
    let stated_mu_minus = (4.0 * ad - root) / 2.0;
    let eigen_plus = (tr + root) / 2.0;
    let eigen_minus = (tr - root) / 2.0;
    let tol = 1e-9 * root.max(1.0);
    Ok(Example54Mu {
        trace: tr,
        abs_det: ad,
        stated_mu_plus,
        stated_mu_minus,
        eigen_plus,
        eigen_minus,
        discrepancy: (stated_mu_plus - eigen_plus).abs() > tol || (stated_mu_minus - eigen_minus).abs() > tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Example54Report {
    pub mu: Example54Mu,
    /// `2 + (2 − μ₋)e^{μ₊T}` with the closed-form `μ±`.
    pub stated_lhs: f64,
    /// `A√(tr²B + 16|det B|)/λ`.
    pub stated_rhs: f64,
    pub stated_criterion: bool,
    pub integrated: StabilityVerdict,
    /// Final call; follows `integrated` whenever the `μ±` disagree.
    pub kind: StabilityKind,
}

/// Practical `(λ, A, T)` stability for `D_H u = Bu`, closed-form criterion
/// side by side with direct integration of the comparison pair.
pub fn example54_practical(
    b: &LinearOperator2D,
    lambda: f64,
    a_bound: f64,
    t_end: f64,
) -> Result<Example54Report, CertificateError> {
    let mu = example54_mu(b)?;
    let root = (mu.trace * mu.trace + 16.0 * mu.abs_det).sqrt();
    let stated_lhs = 2.0 + (2.0 - mu.stated_mu_minus) * (mu.stated_mu_plus * t_end).exp();
    let stated_rhs = a_bound * root / lambda;
    let stated_criterion = stated_lhs < stated_rhs;
    let sys = PracticalPair::from_operator(b);
    let mut integrated = check_practical(&sys, lambda, a_bound, t_end, &MeasurePair::volume(), (t_end / 1000.0).max(1e-6))?;
    integrated = integrated
        .parameter("stated_mu_plus", mu.stated_mu_plus)
        .parameter("stated_mu_minus", mu.stated_mu_minus)
        .parameter("eigen_plus", mu.eigen_plus)
        .parameter("eigen_minus", mu.eigen_minus);
    if mu.discrepancy {
        integrated = integrated.note("stated mu values differ from the eigenvalues of the comparison matrix; verdict uses direct integration");
    }
    let kind = if mu.discrepancy || stated_criterion == integrated.kind.is_stable_side() {
        integrated.kind
    } else {
        StabilityKind::Inconclusive
    };
    Ok(Example54Report {
        mu,
        stated_lhs,
        stated_rhs,
        stated_criterion,
        integrated,
        kind,
    })
}

/// `s = 10⁻¹ … 10⁻¹²`, decreasing.
pub fn default_probe_grid() -> Vec<f64> {
    (0..=44).map(|k| 10f64.powf(-1.0 - k as f64 / 4.0)).collect()
}

/// Instability in `(V, V)` for a ball source via
/// `liminf_{s→0+} √(π/s)·ψ/φ > −tr A/2`; the liminf is the minimum over the
/// smallest third of the probe grid.
pub fn example55_instability(
    phi: &dyn ScalarFn,
    psi: &dyn ScalarFn,
    trace_a: f64,
    s_grid: &[f64],
) -> Result<StabilityVerdict, CertificateError> {
    if s_grid.len() < 3 || s_grid.iter().any(|s| !(*s > 0.0)) {
        return Err(CertificateError::Precondition("probe grid needs at least three positive points".into()));
    }
    let mut grid = s_grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    if let Some(s) = grid.iter().find(|s| !(phi.eval(**s) > 0.0)) {
        return Err(CertificateError::Precondition(format!("φ must be positive on the probe grid, φ({s}) ≤ 0")));
    }
    let q: Vec<f64> = grid.iter().map(|s| (PI / s).sqrt() * psi.eval(*s) / phi.eval(*s)).collect();
    let tail = &q[q.len() - q.len().div_ceil(3)..];
    let estimate = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = -trace_a / 2.0;
    let margin = estimate - threshold;
    let tol = 1e-6 * threshold.abs().max(1.0);
    let kind = if margin > tol {
        StabilityKind::Unstable
    } else {
        StabilityKind::Inconclusive
    };
    let mut v = StabilityVerdict::new("ball_source_instability", kind)
        .parameter("trace_a", trace_a)
        .parameter("threshold", threshold)
        .parameter("liminf_estimate", estimate)
        .parameter("s_min", grid[grid.len() - 1])
        .margin("liminf_minus_threshold", margin)
        .note("liminf estimated on a finite probe grid");
    v.samples = grid.len();
    Ok(v)
}
