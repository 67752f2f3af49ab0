// SPDX-License-Identifier: Apache-2.0

//! Closed-form stability criteria and the worked examples built on them.

mod examples;
mod global;
mod linearize;

use thiserror::Error;

pub use examples::{
    cubic_lambda_star, default_probe_grid, example51_fixed_point, example54_mu, example54_practical,
    example55_instability, gamma_half_integer, unit_ball_volume, Example51Report, Example54Mu, Example54Report,
};
pub use global::{
    global_existence_report, hausdorff_stability_report, GlobalBounds, GlobalExistenceReport, HausdorffBounds,
    OrbitCheck,
};
pub use linearize::{linearize, linearized_stability, semigroup_bound, LinearizationReport, RouthHurwitz, SemigroupBound};

use crate::comparison::ComparisonError;
use crate::convex::GeometryError;
use crate::semiflow::SemiflowError;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Semiflow(#[from] SemiflowError),
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error("not a fixed point: drift {residual:.3e} per unit time exceeds {tolerance:.3e}")]
    NotFixedPoint { residual: f64, tolerance: f64 },
    #[error("no sign change of the root equation on [{lo:e}, {hi:e}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("{0}")]
    Precondition(String),
}
