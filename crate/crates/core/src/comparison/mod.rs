// SPDX-License-Identifier: Apache-2.0

//! Comparison systems on the cone `ℝ₊ᵏ⁺¹` and sampled stability checks.

mod checks;
mod integrate;
mod measures;
mod systems;
mod verdict;

use thiserror::Error;

pub use checks::{
    bound_check, check_practical, check_wazewski, check_xi0_stability, lyapunov_quadratic_check, BoundReport,
    LyapunovReport, QuasimonotoneViolation, SampleBox, SeriesBound, WazewskiReport, Xi0Options,
};
pub use integrate::{integrate, integrate_at, integrate_until, output_grid, ComparisonTrajectory, IntegrateOptions};
pub use measures::{HahnFn, Measure, MeasurePair};
pub use systems::{
    BallVolume, ComparisonSystem, FnSystem, LinearComparison, MixedChain, NilpotentPair, PracticalPair,
};
pub use verdict::{DeltaEntry, StabilityKind, StabilityVerdict};

#[derive(Debug, Error)]
pub enum ComparisonError {
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial component {0} is negative or non-finite")]
    OutsideCone(usize),
    #[error("horizon must be nonnegative and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("output times must start at 0 and be nondecreasing")]
    BadOutputTimes,
    #[error("solution escaped at t = {time}")]
    BlowUp {
        time: f64,
        trajectory: Box<ComparisonTrajectory>,
    },
    #[error("step limit reached at t = {time}")]
    TooManySteps { time: f64 },
    #[error("g(0) ≠ 0 (residual {0:.3e}); the trivial solution does not exist")]
    NontrivialEquilibrium(f64),
    #[error("epsilon grid must be nonempty and positive")]
    BadEpsilonGrid,
    #[error("practical stability needs 0 < λ < A, got λ = {lambda}, A = {a_bound}")]
    BadPracticalBounds { lambda: f64, a_bound: f64 },
    #[error("sample box must satisfy 0 ≤ lo ≤ hi componentwise")]
    BadBox,
    #[error("Lyapunov weights must be positive, one per component")]
    BadWeights,
    #[error("{0} is not strictly increasing with value 0 at 0")]
    NotHahn(String),
    #[error("trajectory has no series named {0}")]
    UnknownSeries(String),
}
