// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{axpy, check_dt, SemiflowError, SemiflowParams, Trajectory};
use crate::convex::{
    area, hausdorff_distance, linear_image_with, make_polygon, minkowski_axpy, perimeter,
    SupportFunction2D,
};
use crate::functions::sampled_lipschitz;

pub const DEFAULT_NODES: usize = 25;

/// Constants of the contraction argument for the integral operator on a
/// ball `B_r(u₀)` of trajectories.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContractionEstimate {
    pub radius: f64,
    /// Lipschitz constant of `V` in the Hausdorff metric on the ball.
    pub lipschitz_volume: f64,
    /// Sampled Lipschitz constant of `φ` on the reachable volume range.
    pub lipschitz_phi: f64,
    /// Sampled Lipschitz constant of `u ↦ F(V[u], u)`.
    pub lipschitz_source: f64,
    pub beta: f64,
    pub eta: f64,
    /// Largest `T` with `𝔊B_r ⊂ B_r` and `γ(T) < 1`.
    pub horizon: f64,
}

/// `(eˣ − 1)/x`.
fn expm1_ratio(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x / 2.0
    } else {
        x.exp_m1() / x
    }
}

/// `(x eˣ − eˣ + 1)/x²`.
fn second_ratio(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        0.5 + x / 3.0 + x * x / 8.0
    } else {
        (x * x.exp() - x.exp_m1()) / (x * x)
    }
}

impl ContractionEstimate {
    fn self_map_ratio(&self, t: f64, norm_u0: f64, norm_f0: f64) -> f64 {
        t * expm1_ratio(self.beta * t) * (self.beta * norm_u0 + norm_f0 + self.lipschitz_source * self.radius) / self.radius
    }

    fn gamma(&self, t: f64, a_norm: f64, norm_f0: f64) -> f64 {
        let lh = self.lipschitz_volume * self.lipschitz_phi;
        a_norm * lh * t * (self.eta * t).exp()
            + self.lipschitz_source * t * expm1_ratio(self.beta * t)
            + t * t * second_ratio(self.eta * t) * lh * a_norm * (norm_f0 + self.lipschitz_source * self.radius)
    }
}

/// Horizon estimate from the contraction proof with sampled constants.
pub fn contraction_estimate(u0: &SupportFunction2D, params: &SemiflowParams) -> Result<ContractionEstimate, SemiflowError> {
    let m = u0.grid_size();
    let radius = u0.norm().max(1.0);
    let v0 = area(u0);
    let f0 = params.source_at(u0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut lipschitz_source: f64 = 0.0;
    for _ in 0..32 {
        let pts: Vec<[f64; 2]> = (0..6)
            .map(|_| {
                let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r: f64 = rng.gen_range(0.0..1.0);
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let g = make_polygon(&pts, m)?;
        let s = radius * rng.gen_range(0.01..1.0) / g.norm().max(1e-12);
        let u = minkowski_axpy(u0, s, &g)?;
        let d = hausdorff_distance(&u, u0)?;
        if d > 0.0 {
            let df = hausdorff_distance(&params.source_at(&u)?, &f0)?;
            lipschitz_source = lipschitz_source.max(df / d);
        }
    }

    let a_norm = params.a.spectral_norm();
    let phi0 = params.phi.eval(v0).abs();
    let norm_u0 = u0.norm();
    let norm_f0 = f0.norm();
    let mut best: Option<ContractionEstimate> = None;
    for factor in [0.125, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let r = radius * factor;
        let lipschitz_volume = perimeter(u0) + 2.0 * std::f64::consts::PI * r;
        let span = lipschitz_volume * r;
        let lipschitz_phi = sampled_lipschitz(params.phi.as_ref(), (v0 - span).max(0.0), v0 + span, 400);
        let beta = a_norm * (phi0 + lipschitz_volume * lipschitz_phi * r);
        let eta = beta + 2.0 * r * lipschitz_volume * lipschitz_phi * a_norm;
        let mut est = ContractionEstimate {
            radius: r,
            lipschitz_volume,
            lipschitz_phi,
            lipschitz_source,
            beta,
            eta,
            horizon: 0.0,
        };
        let ok = |t: f64| est.gamma(t, a_norm, norm_f0) < 1.0 && est.self_map_ratio(t, norm_u0, norm_f0) <= 1.0;
        let mut hi = 1.0;
        while ok(hi) && hi < 1e6 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        est.horizon = lo;
        if best.is_none_or(|b| est.horizon > b.horizon) {
            best = Some(est);
        }
    }
    Ok(best.expect("nonempty radius list"))
}

#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// Sup-distance between successive iterates, all windows concatenated.
    pub distances: Vec<f64>,
    /// Window end times; one window when `T` is inside the first horizon.
    pub windows: Vec<f64>,
    pub estimate: ContractionEstimate,
}

pub fn picard_solve(
    u0: &SupportFunction2D,
    params: &SemiflowParams,
    t_end: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PicardSolution, SemiflowError> {
    picard_solve_with(u0, params, t_end, tol, max_iter, DEFAULT_NODES)
}

struct Window {
    times: Vec<f64>,
    bodies: Vec<SupportFunction2D>,
    distances: Vec<f64>,
}

/// Fixed-point iteration of the integral operator with trapezoid quadrature
/// on `nodes + 1` equispaced times per window.
///
/// The horizon is cut into windows no longer than the contraction horizon
/// estimated at each window start; a window that fails to contract is
/// halved and retried.
pub fn picard_solve_with(
    u0: &SupportFunction2D,
    params: &SemiflowParams,
    t_end: f64,
    tol: f64,
    max_iter: usize,
    nodes: usize,
) -> Result<PicardSolution, SemiflowError> {
    check_dt(t_end)?;
    let estimate = contraction_estimate(u0, params)?;
    let mut trajectory = Trajectory::default();
    trajectory.push(0.0, u0.clone());
    let mut distances = Vec::new();
    let mut windows = Vec::new();
    let mut iterations = 0;
    let mut start = u0.clone();
    let mut t0 = 0.0;
    let mut horizon = estimate.horizon;
    while t_end - t0 > 1e-12 * t_end {
        if !(horizon > 1e-9 * t_end) {
            return Err(SemiflowError::NotContracting {
                iteration: iterations,
                distances,
            });
        }
        let mut len = (t_end - t0).min(horizon);
        let window = loop {
            match picard_window(&start, params, t0, len, tol, max_iter, nodes) {
                Ok(w) => break w,
                Err(SemiflowError::NotContracting { .. } | SemiflowError::NotConverged { .. }) if len > 1e-6 * t_end => {
                    len /= 2.0;
                }
                Err(e) => return Err(e),
            }
        };
        iterations += window.distances.len();
        distances.extend(window.distances);
        for (t, u) in window.times.into_iter().zip(window.bodies).skip(1) {
            trajectory.push(t, u);
        }
        t0 += len;
        windows.push(t0);
        start = trajectory.last().cloned().unwrap_or_else(|| u0.clone());
        if t_end - t0 > 1e-12 * t_end {
            horizon = contraction_estimate(&start, params)?.horizon;
        }
    }
    Ok(PicardSolution {
        trajectory,
        iterations,
        distances,
        windows,
        estimate,
    })
}

fn picard_window(
    u0: &SupportFunction2D,
    params: &SemiflowParams,
    t0: f64,
    len: f64,
    tol: f64,
    max_iter: usize,
    nodes: usize,
) -> Result<Window, SemiflowError> {
    let k_nodes = nodes.max(1);
    let h = len / k_nodes as f64;
    let interp = params.interp.as_ref();

    let mut iterate: Vec<SupportFunction2D> = vec![u0.clone(); k_nodes + 1];
    let mut distances = Vec::new();
    for iteration in 1..=max_iter {
        let phis: Vec<f64> = iterate.iter().map(|u| params.phi.eval(area(u))).collect();
        let mut tau = vec![0.0; k_nodes + 1];
        for k in 1..=k_nodes {
            tau[k] = tau[k - 1] + 0.5 * h * (phis[k - 1] + phis[k]);
        }
        let sources = iterate
            .iter()
            .map(|u| params.source_at(u))
            .collect::<Result<Vec<_>, _>>()?;

        let mut next = Vec::with_capacity(k_nodes + 1);
        next.push(u0.clone());
        for k in 1..=k_nodes {
            let mut acc = linear_image_with(u0, &params.a.exp(tau[k]), interp)?;
            for j in 0..=k {
                let w = if j == 0 || j == k { 0.5 * h } else { h };
                let term = linear_image_with(&sources[j], &params.a.exp(tau[k] - tau[j]), interp)?;
                acc = axpy(&acc, w, &term)?;
            }
            next.push(acc.convexified());
        }

        let d = next
            .iter()
            .zip(&iterate)
            .map(|(a, b)| hausdorff_distance(a, b))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        distances.push(d);
        iterate = next;
        if d < tol {
            return Ok(Window {
                times: (0..=k_nodes).map(|k| t0 + h * k as f64).collect(),
                bodies: iterate,
                distances,
            });
        }
        let n = distances.len();
        if n >= 3 && distances[n - 1] >= distances[n - 2] {
            return Err(SemiflowError::NotContracting { iteration, distances });
        }
    }
    Err(SemiflowError::NotConverged {
        iterations: max_iter,
        last: distances.last().copied().unwrap_or(f64::INFINITY),
    })
}
