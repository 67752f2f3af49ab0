// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt;

/// Periodic interpolation of grid samples at a fractional grid index.
pub trait Interpolation: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Value at fractional index `x`; any real `x` is reduced modulo the grid.
    fn value(&self, values: &[f64], x: f64) -> f64;

    /// True when interpolated support functions are support functions again.
    fn preserves_convexity(&self) -> bool;
}

/// Local four-point Lagrange interpolation, `O(M⁻⁴)` on smooth data.
#[derive(Clone, Copy, Debug, Default)]
pub struct CubicInterpolation;

/// Support function of the circumscribed grid polygon: between two nodes the
/// value follows the vertex shared by the adjacent edges.
#[derive(Clone, Copy, Debug, Default)]
pub struct PolygonInterpolation;

pub static CUBIC: CubicInterpolation = CubicInterpolation;
pub static POLYGON: PolygonInterpolation = PolygonInterpolation;

fn split(m: usize, x: f64) -> (usize, f64) {
    let mf = m as f64;
    let x = x.rem_euclid(mf);
    let j = x.floor();
    let s = x - j;
    ((j as usize) % m, s)
}

impl Interpolation for CubicInterpolation {
    fn name(&self) -> &'static str {
        "cubic"
    }

    fn value(&self, values: &[f64], x: f64) -> f64 {
        let m = values.len();
        let (j, s) = split(m, x);
        let at = |k: isize| values[(j as isize + k).rem_euclid(m as isize) as usize];
        let w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        w0 * at(-1) + w1 * at(0) + w2 * at(1) + w3 * at(2)
    }

    fn preserves_convexity(&self) -> bool {
        false
    }
}

impl Interpolation for PolygonInterpolation {
    fn name(&self) -> &'static str {
        "polygon"
    }

    fn value(&self, values: &[f64], x: f64) -> f64 {
        let m = values.len();
        let (j, s) = split(m, x);
        let delta = 2.0 * PI / m as f64;
        let a = values[j];
        let b = values[(j + 1) % m];
        (a * ((1.0 - s) * delta).sin() + b * (s * delta).sin()) / delta.sin()
    }

    fn preserves_convexity(&self) -> bool {
        true
    }
}
