// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::convex::{
    area, hausdorff_distance, linear_image_with, mixed_area, perimeter, GeometryError,
    Interpolation, LinearOperator2D, SupportFunction2D, CUBIC,
};

/// Scalar functional of a body, tracked along trajectories.
pub trait Functional: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn eval(&self, u: &SupportFunction2D) -> Result<f64, GeometryError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AreaFunctional;

#[derive(Clone, Copy, Debug, Default)]
pub struct PerimeterFunctional;

/// `W_i[u] = V[u, Bⁱu]`.
#[derive(Clone, Debug)]
pub struct MixedPower {
    pub b: LinearOperator2D,
    pub power: u32,
    pub interp: Arc<dyn Interpolation>,
}

impl MixedPower {
    pub fn new(b: LinearOperator2D, power: u32) -> Self {
        Self {
            b,
            power,
            interp: Arc::new(CUBIC),
        }
    }
}

/// Hausdorff distance to a fixed reference body.
#[derive(Clone, Debug)]
pub struct HausdorffTo {
    pub reference: SupportFunction2D,
}

impl Functional for AreaFunctional {
    fn name(&self) -> String {
        "V".into()
    }

    fn eval(&self, u: &SupportFunction2D) -> Result<f64, GeometryError> {
        Ok(area(u))
    }
}

impl Functional for PerimeterFunctional {
    fn name(&self) -> String {
        "perimeter".into()
    }

    fn eval(&self, u: &SupportFunction2D) -> Result<f64, GeometryError> {
        Ok(perimeter(u))
    }
}

impl Functional for MixedPower {
    fn name(&self) -> String {
        format!("W{}", self.power)
    }

    fn eval(&self, u: &SupportFunction2D) -> Result<f64, GeometryError> {
        if self.power == 0 {
            return Ok(area(u));
        }
        let image = linear_image_with(u, &self.b.pow(self.power), self.interp.as_ref())?;
        mixed_area(u, &image)
    }
}

impl Functional for HausdorffTo {
    fn name(&self) -> String {
        "dH_ref".into()
    }

    fn eval(&self, u: &SupportFunction2D) -> Result<f64, GeometryError> {
        hausdorff_distance(u, &self.reference)
    }
}

/// Stored frames of an orbit with named scalar series.
///
/// `V` and `perimeter` are always present; further series are added with
/// [`Trajectory::track`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub bodies: Vec<SupportFunction2D>,
    pub tracked: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn push(&mut self, t: f64, body: SupportFunction2D) {
        self.tracked.entry("V".into()).or_default().push(area(&body));
        self.tracked
            .entry("perimeter".into())
            .or_default()
            .push(perimeter(&body));
        self.times.push(t);
        self.bodies.push(body);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&SupportFunction2D> {
        self.bodies.last()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.tracked.get(name).map(Vec::as_slice)
    }

    pub fn track(&mut self, f: &dyn Functional) -> Result<(), GeometryError> {
        let values = self
            .bodies
            .iter()
            .map(|b| f.eval(b))
            .collect::<Result<Vec<_>, _>>()?;
        self.tracked.insert(f.name(), values);
        Ok(())
    }

    /// Body at the stored frame closest to `t`.
    pub fn body_near(&self, t: f64) -> Option<&SupportFunction2D> {
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?
            .0;
        self.bodies.get(k)
    }
}
