// SPDX-License-Identifier: Apache-2.0

//! Semiflow of the set equation
//! `u(t) = exp{𝒜∫₀ᵗφ(V[u])}u₀ + ∫₀ᵗ exp{𝒜∫ₛᵗφ(V[u])} F(V[u(s)], u(s)) ds`.
//!
//! The linear part acts on support functions by pull-back with `e^{Aᵀτ}` and
//! is applied exactly; the source is added in Minkowski half-steps around it.
//! [`evolve`] keeps the accumulated linear map as a separate frame `Φ` with
//! `u = Φz`, so the body is interpolated only when a frame is stored.

mod picard;
mod source;
mod trajectory;

use std::sync::Arc;

use thiserror::Error;

use crate::convex::{
    area, linear_image_with, mixed_area, GeometryError, Interpolation, LinearOperator2D,
    SupportFunction2D, CUBIC,
};
use crate::functions::{Constant, SharedFn};

pub use picard::{contraction_estimate, picard_solve, picard_solve_with, ContractionEstimate, PicardSolution};
pub use source::{BallSource, ConstantBody, LinearBody, SourceTerm, ZeroSource};
pub use trajectory::{AreaFunctional, Functional, HausdorffTo, MixedPower, PerimeterFunctional, Trajectory};

#[derive(Debug, Error)]
pub enum SemiflowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },
    #[error("norm exceeded {guard:.3e} at t = {time}; solution escapes before the horizon")]
    BlowUp {
        time: f64,
        guard: f64,
        trajectory: Box<Trajectory>,
    },
    #[error("picard iteration stopped contracting at iteration {iteration} (distances {distances:?})")]
    NotContracting { iteration: usize, distances: Vec<f64> },
    #[error("picard iteration did not reach tolerance in {iterations} iterations (last distance {last:.3e})")]
    NotConverged { iterations: usize, last: f64 },
}

/// The triple `(A, φ, F)` plus the interpolation used for pull-backs.
#[derive(Clone, Debug)]
pub struct SemiflowParams {
    pub a: LinearOperator2D,
    pub phi: SharedFn,
    pub source: Arc<dyn SourceTerm>,
    pub interp: Arc<dyn Interpolation>,
}

impl SemiflowParams {
    pub fn new(a: LinearOperator2D, phi: SharedFn, source: Arc<dyn SourceTerm>) -> Self {
        Self {
            a,
            phi,
            source,
            interp: Arc::new(CUBIC),
        }
    }

    pub fn zero() -> Self {
        Self::new(LinearOperator2D::zero(), Arc::new(Constant(0.0)), Arc::new(ZeroSource))
    }

    pub fn with_interpolation(mut self, interp: Arc<dyn Interpolation>) -> Self {
        self.interp = interp;
        self
    }

    /// `F(V[u], u)`.
    pub fn source_at(&self, u: &SupportFunction2D) -> Result<SupportFunction2D, GeometryError> {
        self.source.eval(area(u), u, self.interp.as_ref())
    }
}

fn axpy(z: &SupportFunction2D, h: f64, k: &SupportFunction2D) -> Result<SupportFunction2D, GeometryError> {
    SupportFunction2D::from_values(z.values().iter().zip(k.values()).map(|(a, b)| a + h * b).collect())
}

/// Body `Φz` kept as an unmaterialized pair.
#[derive(Clone, Debug)]
struct FrameState {
    z: SupportFunction2D,
    frame: LinearOperator2D,
}

impl FrameState {
    fn new(u: &SupportFunction2D) -> Self {
        Self {
            z: u.clone(),
            frame: LinearOperator2D::identity(),
        }
    }

    fn is_identity(&self) -> bool {
        self.frame == LinearOperator2D::identity()
    }

    fn volume(&self) -> f64 {
        self.frame.det().abs() * area(&self.z)
    }

    fn source(&self, params: &SemiflowParams, z: &SupportFunction2D) -> Result<SupportFunction2D, GeometryError> {
        let volume = self.frame.det().abs() * area(z);
        if self.is_identity() {
            params.source.eval(volume, z, params.interp.as_ref())
        } else {
            params
                .source
                .eval_in_frame(volume, z, &self.frame, params.interp.as_ref())
        }
    }

    /// Heun step of `z' = Φ⁻¹F(V[Φz], Φz)` over `h`.
    fn source_step(&mut self, params: &SemiflowParams, h: f64) -> Result<(), GeometryError> {
        if params.source.is_zero() {
            return Ok(());
        }
        let k1 = self.source(params, &self.z)?;
        let z1 = axpy(&self.z, h, &k1)?;
        let k2 = self.source(params, &z1)?;
        let mean = axpy(&k1, 1.0, &k2)?;
        self.z = axpy(&self.z, 0.5 * h, &mean)?;
        Ok(())
    }

    fn linear_step(&mut self, params: &SemiflowParams, dt: f64) {
        let v = self.volume();
        let c0 = params.phi.eval(v);
        let v_mid = v * (params.a.trace() * c0 * dt / 2.0).exp();
        let c = params.phi.eval(v_mid);
        self.frame = params.a.exp(c * dt) * self.frame;
    }

    fn advance(&mut self, params: &SemiflowParams, dt: f64) -> Result<(), GeometryError> {
        self.source_step(params, dt / 2.0)?;
        self.linear_step(params, dt);
        self.source_step(params, dt / 2.0)?;
        self.z = self.z.clone().convexified();
        Ok(())
    }

    fn materialize(&self, interp: &dyn Interpolation) -> Result<SupportFunction2D, GeometryError> {
        if self.is_identity() {
            Ok(self.z.clone())
        } else {
            linear_image_with(&self.z, &self.frame, interp)
        }
    }

    fn norm_bound(&self) -> f64 {
        self.frame.spectral_norm() * self.z.norm()
    }

    fn rebase_if_needed(&mut self, interp: &dyn Interpolation) -> Result<(), GeometryError> {
        let det = self.frame.det().abs();
        if self.frame.condition_number() > 2.0 || det.ln().abs() > 50.0 {
            self.z = self.materialize(interp)?;
            self.frame = LinearOperator2D::identity();
        }
        Ok(())
    }
}

fn check_dt(dt: f64) -> Result<(), SemiflowError> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(SemiflowError::InvalidStep(dt))
    }
}

/// One Strang step: source over `dt/2`, linear flow over `dt` with `φ`
/// frozen at the midpoint volume, source over `dt/2`, re-convexify.
pub fn step(u: &SupportFunction2D, params: &SemiflowParams, dt: f64) -> Result<SupportFunction2D, SemiflowError> {
    check_dt(dt)?;
    let mut state = FrameState::new(u);
    state.advance(params, dt)?;
    let out = state.materialize(params.interp.as_ref())?;
    if out.values().iter().any(|v| !v.is_finite()) {
        return Err(SemiflowError::NonFinite { time: dt });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Store every n-th step; default keeps about 1000 frames.
    pub store_every: Option<usize>,
    /// Abort when `‖u‖` exceeds this multiple of `max(1, ‖u₀‖)`.
    pub blowup_factor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            store_every: None,
            blowup_factor: 1e6,
        }
    }
}

/// Orbit on `[0, T]` with `⌈T/dt⌉` equal steps.
pub fn evolve(u0: &SupportFunction2D, params: &SemiflowParams, t_end: f64, dt: f64) -> Result<Trajectory, SemiflowError> {
    evolve_with(u0, params, t_end, dt, &EvolveOptions::default())
}

pub fn evolve_with(
    u0: &SupportFunction2D,
    params: &SemiflowParams,
    t_end: f64,
    dt: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory, SemiflowError> {
    check_dt(dt)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(SemiflowError::InvalidHorizon(t_end));
    }
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / n as f64;
    let every = opts.store_every.unwrap_or_else(|| n.div_ceil(1000)).max(1);
    let guard = opts.blowup_factor * u0.norm().max(1.0);
    let interp = params.interp.as_ref();

    let mut traj = Trajectory::default();
    traj.push(0.0, u0.clone());
    let mut state = FrameState::new(u0);
    for k in 1..=n {
        let t = h * k as f64;
        state.advance(params, h)?;
        if state.z.values().iter().any(|v| !v.is_finite()) || !state.frame.is_finite() {
            return Err(SemiflowError::NonFinite { time: t });
        }
        if state.norm_bound() > guard {
            let u = state.materialize(interp)?;
            if u.norm() > guard {
                traj.push(t, u);
                return Err(SemiflowError::BlowUp {
                    time: t,
                    guard,
                    trajectory: Box::new(traj),
                });
            }
        }
        if k % every == 0 || k == n {
            traj.push(t, state.materialize(interp)?);
        }
        state.rebase_if_needed(interp)?;
    }
    Ok(traj)
}

/// `d/dt V[𝔉ᵗu]|₀ = tr A·φ(V)·V + 2V[u, F(V,u)]`.
pub fn volume_rate(u: &SupportFunction2D, params: &SemiflowParams) -> Result<f64, SemiflowError> {
    let v = area(u);
    let f = params.source.eval(v, u, params.interp.as_ref())?;
    Ok(params.a.trace() * params.phi.eval(v) * v + 2.0 * mixed_area(u, &f)?)
}

/// Attainability sets of `x' = Ax + w, w ∈ U`, i.e. `dh/dt = 𝒜h + h_U`.
pub fn reach_set(
    a: &LinearOperator2D,
    control: &SupportFunction2D,
    d0: &SupportFunction2D,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, SemiflowError> {
    let params = SemiflowParams::new(
        *a,
        Arc::new(Constant(1.0)),
        Arc::new(ConstantBody { body: control.clone() }),
    );
    evolve(d0, &params, t_end, dt)
}

/// `W_i[u] = V[u, Bⁱu]` for `i = 0..k`.
pub fn mixed_functionals(u: &SupportFunction2D, b: &LinearOperator2D, k: usize) -> Result<Vec<f64>, GeometryError> {
    (0..k as u32).map(|i| MixedPower::new(*b, i).eval(u)).collect()
}
