// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::ComparisonError;
use crate::convex::{area, hausdorff_distance, GeometryError, LinearOperator2D, SupportFunction2D};
use crate::semiflow::{Functional, MixedPower};

/// Strictly increasing `a: ℝ₊ → ℝ₊` with `a(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HahnFn {
    Linear { c: f64 },
    Power { c: f64, p: f64 },
}

impl HahnFn {
    pub fn identity() -> Self {
        Self::Linear { c: 1.0 }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Self::Linear { c } => c * s,
            Self::Power { c, p } => c * s.max(0.0).powf(p),
        }
    }

    /// Checks monotonicity and `a(0) = 0` on `n` samples of `[0, hi]`.
    pub fn validate(&self, hi: f64, n: usize) -> Result<(), ComparisonError> {
        let ok_params = match *self {
            Self::Linear { c } => c.is_finite() && c > 0.0,
            Self::Power { c, p } => c.is_finite() && p.is_finite() && c > 0.0 && p > 0.0,
        };
        if !ok_params || self.eval(0.0) != 0.0 {
            return Err(ComparisonError::NotHahn(format!("{self:?}")));
        }
        let n = n.max(2);
        let samples: Vec<f64> = (0..=n).map(|k| self.eval(hi * k as f64 / n as f64)).collect();
        if samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ComparisonError::NotHahn(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Functional on bodies used as a stability measure.
#[derive(Clone, Debug)]
pub enum Measure {
    Volume,
    HausdorffTo(SupportFunction2D),
    /// `max_{i<k} V[u, Bⁱu]`.
    MaxMixed { b: LinearOperator2D, k: u32 },
}

impl Measure {
    pub fn eval(&self, u: &SupportFunction2D) -> Result<f64, GeometryError> {
        match self {
            Self::Volume => Ok(area(u)),
            Self::HausdorffTo(r) => hausdorff_distance(u, r),
            Self::MaxMixed { b, k } => (0..*k)
                .map(|i| MixedPower::new(*b, i).eval(u))
                .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Volume => "volume".into(),
            Self::HausdorffTo(_) => "hausdorff_to".into(),
            Self::MaxMixed { k, .. } => format!("max_mixed_k{k}"),
        }
    }
}

/// Measures `(h₀, h)` with the wrappers `a`, `b` of the two-measure
/// stability definitions.
#[derive(Clone, Debug)]
pub struct MeasurePair {
    pub h0: Measure,
    pub h: Measure,
    pub a: HahnFn,
    pub b: HahnFn,
}

impl MeasurePair {
    pub fn new(h0: Measure, h: Measure, a: HahnFn, b: HahnFn) -> Result<Self, ComparisonError> {
        a.validate(1e3, 1000)?;
        b.validate(1e3, 1000)?;
        Ok(Self { h0, h, a, b })
    }

    /// Both measures the volume, identity wrappers.
    pub fn volume() -> Self {
        Self {
            h0: Measure::Volume,
            h: Measure::Volume,
            a: HahnFn::identity(),
            b: HahnFn::identity(),
        }
    }
}
