// SPDX-License-Identifier: Apache-2.0

//! Planar convex compacts as sampled support functions.
//!
//! A body is stored as `h(θ_j)` on `θ_j = 2πj/M`. Minkowski sums and
//! nonnegative scalings act pointwise on the samples, the Hausdorff distance
//! is the sup-norm of the difference, and areas come from an [`AreaRule`].

mod hull;
mod interp;
mod operator;
mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hull::{boundary_points, convex_hull, reconvexify, support_of_points};
pub use interp::{CubicInterpolation, Interpolation, PolygonInterpolation, CUBIC, POLYGON};
pub use operator::{Eigenvalues, LinearOperator2D};
pub use quadrature::{half_pairing, AreaRule, PolygonRule, SpectralRule, POLYGON_RULE, SPECTRAL_RULE};

pub const DEFAULT_GRID: usize = 512;
pub const MIN_GRID: usize = 16;

/// Relative tolerance for geometric inequalities.
pub const TOL_INEQ: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("grid size {0} must be even and at least {MIN_GRID}")]
    InvalidGrid(usize),
    #[error("support values must be finite (index {0})")]
    NonFinite(usize),
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("scale factor must be nonnegative, got {0}")]
    NegativeScale(f64),
    #[error("polygon needs at least one vertex")]
    EmptyPolygon,
    #[error("steiner fit needs at least 3 distinct nonnegative samples, got {0}")]
    TooFewSamples(usize),
    #[error("linear operator has non-finite entries")]
    NonFiniteOperator,
}

/// One broken invariant reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    GridTooSmall { grid_size: usize },
    OddGrid { grid_size: usize },
    NonFinite { index: usize },
    NonConvex { index: usize, defect: f64, tolerance: f64 },
}

/// Serialized form of a body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyRecord {
    pub grid_size: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyRecord", into = "BodyRecord")]
pub struct SupportFunction2D {
    values: Vec<f64>,
}

impl TryFrom<BodyRecord> for SupportFunction2D {
    type Error = String;

    fn try_from(rec: BodyRecord) -> Result<Self, String> {
        if rec.values.len() != rec.grid_size {
            return Err(format!(
                "grid_size {} but {} values",
                rec.grid_size,
                rec.values.len()
            ));
        }
        SupportFunction2D::from_values(rec.values).map_err(|e| e.to_string())
    }
}

impl From<SupportFunction2D> for BodyRecord {
    fn from(u: SupportFunction2D) -> Self {
        BodyRecord {
            grid_size: u.values.len(),
            values: u.values,
        }
    }
}

pub fn check_grid(m: usize) -> Result<(), GeometryError> {
    if m < MIN_GRID || m % 2 != 0 {
        Err(GeometryError::InvalidGrid(m))
    } else {
        Ok(())
    }
}

pub fn grid_angle(m: usize, j: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

pub fn grid_direction(m: usize, j: usize) -> [f64; 2] {
    let (s, c) = grid_angle(m, j).sin_cos();
    [c, s]
}

/// `tol_conv = 10⁻⁸·max(1, max|h|)`.
pub fn convexity_tolerance(values: &[f64]) -> f64 {
    1e-8 * values.iter().fold(1.0_f64, |a, v| a.max(v.abs()))
}

/// Discrete `(h + h″)Δ²` at each node, in the form that vanishes on grid polygons.
pub fn convexity_defects(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let c = (2.0 * PI / m as f64).cos();
    (0..m)
        .map(|j| values[(j + m - 1) % m] + values[(j + 1) % m] - 2.0 * c * values[j])
        .collect()
}

impl SupportFunction2D {
    /// Wraps raw samples; convexity is not enforced here, see [`validate`].
    pub fn from_values(values: Vec<f64>) -> Result<Self, GeometryError> {
        check_grid(values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self, GeometryError> {
        check_grid(m)?;
        Self::from_values((0..m).map(|j| f(grid_angle(m, j))).collect())
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `‖u‖ = max_θ |h(θ)|`, the distance from the origin to the farthest point.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_convex(&self) -> bool {
        let tol = convexity_tolerance(&self.values);
        convexity_defects(&self.values).iter().all(|&d| d >= -tol)
    }

    /// Re-convexified copy if the convexity invariant is violated.
    pub fn convexified(self) -> Self {
        if self.is_convex() {
            self
        } else {
            Self {
                values: reconvexify(&self.values),
            }
        }
    }

    pub fn vertices(&self) -> Vec<[f64; 2]> {
        convex_hull(&boundary_points(&self.values))
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self, GeometryError> {
        Self::from_values(self.values.iter().map(|&v| f(v)).collect())
    }
}

fn same_grid(u: &SupportFunction2D, v: &SupportFunction2D) -> Result<(), GeometryError> {
    if u.grid_size() != v.grid_size() {
        Err(GeometryError::GridMismatch {
            left: u.grid_size(),
            right: v.grid_size(),
        })
    } else {
        Ok(())
    }
}

pub fn make_ball(radius: f64, center: [f64; 2], m: usize) -> Result<SupportFunction2D, GeometryError> {
    if radius < 0.0 || radius.is_nan() {
        return Err(GeometryError::NegativeRadius(radius));
    }
    SupportFunction2D::from_fn(m, |t| radius + center[0] * t.cos() + center[1] * t.sin())
}

pub fn make_point(p: [f64; 2], m: usize) -> Result<SupportFunction2D, GeometryError> {
    make_ball(0.0, p, m)
}

pub fn make_polygon(vertices: &[[f64; 2]], m: usize) -> Result<SupportFunction2D, GeometryError> {
    if vertices.is_empty() {
        return Err(GeometryError::EmptyPolygon);
    }
    check_grid(m)?;
    SupportFunction2D::from_values(support_of_points(vertices, m))
}

/// Horizontal segment of length `n` centred at the origin.
pub fn make_segment(length: f64, m: usize) -> Result<SupportFunction2D, GeometryError> {
    if length < 0.0 || length.is_nan() {
        return Err(GeometryError::NegativeScale(length));
    }
    make_polygon(&[[-length / 2.0, 0.0], [length / 2.0, 0.0]], m)
}

pub fn make_rectangle(width: f64, height: f64, m: usize) -> Result<SupportFunction2D, GeometryError> {
    if width < 0.0 || height < 0.0 {
        return Err(GeometryError::NegativeScale(width.min(height)));
    }
    let (a, b) = (width / 2.0, height / 2.0);
    make_polygon(&[[a, b], [-a, b], [-a, -b], [a, -b]], m)
}

pub fn make_square(side: f64, m: usize) -> Result<SupportFunction2D, GeometryError> {
    make_rectangle(side, side, m)
}

pub fn minkowski_add(u: &SupportFunction2D, v: &SupportFunction2D) -> Result<SupportFunction2D, GeometryError> {
    same_grid(u, v)?;
    SupportFunction2D::from_values(u.values.iter().zip(&v.values).map(|(a, b)| a + b).collect())
}

/// `u + λv` for `λ ≥ 0`.
pub fn minkowski_axpy(u: &SupportFunction2D, lambda: f64, v: &SupportFunction2D) -> Result<SupportFunction2D, GeometryError> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(GeometryError::NegativeScale(lambda));
    }
    same_grid(u, v)?;
    SupportFunction2D::from_values(
        u.values
            .iter()
            .zip(&v.values)
            .map(|(a, b)| a + lambda * b)
            .collect(),
    )
}

pub fn scale(u: &SupportFunction2D, lambda: f64) -> Result<SupportFunction2D, GeometryError> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(GeometryError::NegativeScale(lambda));
    }
    u.map_values(|v| lambda * v)
}

/// Image `M u` with the default cubic interpolation.
pub fn linear_image(u: &SupportFunction2D, m: &LinearOperator2D) -> Result<SupportFunction2D, GeometryError> {
    linear_image_with(u, m, &CUBIC)
}

/// Image `M u` by the pull-back `h_{Mu}(p) = h_u(Mᵀp)`.
///
/// Directions landing within `10⁻⁹` of a grid node read the node directly,
/// so grid-preserving maps (scalings, quarter turns, reflections across the
/// axes and diagonals) are exact.
pub fn linear_image_with(
    u: &SupportFunction2D,
    m: &LinearOperator2D,
    interp: &dyn Interpolation,
) -> Result<SupportFunction2D, GeometryError> {
    if !m.is_finite() {
        return Err(GeometryError::NonFiniteOperator);
    }
    let n = u.grid_size();
    let mt = m.transpose();
    let floor = 1e-14 * m.frobenius_norm();
    let inv_delta = n as f64 / (2.0 * PI);
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let q = mt.apply(grid_direction(n, j));
            let r = q[0].hypot(q[1]);
            if r <= floor {
                return 0.0;
            }
            let x = (q[1].atan2(q[0]) * inv_delta).rem_euclid(n as f64);
            let nearest = x.round();
            let h = if (x - nearest).abs() < 1e-9 {
                u.values[(nearest as usize) % n]
            } else {
                interp.value(&u.values, x)
            };
            r * h
        })
        .collect();
    Ok(SupportFunction2D::from_values(values)?.convexified())
}

pub fn hausdorff_distance(u: &SupportFunction2D, v: &SupportFunction2D) -> Result<f64, GeometryError> {
    same_grid(u, v)?;
    Ok(u.values
        .iter()
        .zip(&v.values)
        .fold(0.0, |a, (x, y)| a.max((x - y).abs())))
}

pub fn area_with(u: &SupportFunction2D, rule: &dyn AreaRule) -> f64 {
    half_pairing(rule, &u.values, &u.values).max(0.0)
}

pub fn perimeter_with(u: &SupportFunction2D, rule: &dyn AreaRule) -> f64 {
    rule.curvature(&u.values).iter().sum::<f64>().max(0.0)
}

pub fn mixed_area_with(u: &SupportFunction2D, v: &SupportFunction2D, rule: &dyn AreaRule) -> Result<f64, GeometryError> {
    same_grid(u, v)?;
    Ok(0.5 * (half_pairing(rule, &u.values, &v.values) + half_pairing(rule, &v.values, &u.values)))
}

pub fn area(u: &SupportFunction2D) -> f64 {
    area_with(u, &POLYGON_RULE)
}

pub fn perimeter(u: &SupportFunction2D) -> f64 {
    perimeter_with(u, &POLYGON_RULE)
}

pub fn mixed_area(u: &SupportFunction2D, v: &SupportFunction2D) -> Result<f64, GeometryError> {
    mixed_area_with(u, v, &POLYGON_RULE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedAreaReport {
    pub v_u: f64,
    pub v_v: f64,
    pub v_uv: f64,
    /// `V[u,v]² − V[u]·V[v]`, nonnegative up to quadrature error.
    pub bm_slack: f64,
}

pub fn mixed_area_report(u: &SupportFunction2D, v: &SupportFunction2D) -> Result<MixedAreaReport, GeometryError> {
    let v_uv = mixed_area(u, v)?;
    let v_u = area(u);
    let v_v = area(v);
    Ok(MixedAreaReport {
        v_u,
        v_v,
        v_uv,
        bm_slack: v_uv * v_uv - v_u * v_v,
    })
}

/// Least-squares quadratic `c₀ + c₁ϱ + c₂ϱ²` through `ϱ ↦ area(u + ϱv)`.
pub fn steiner_fit(u: &SupportFunction2D, v: &SupportFunction2D, rhos: &[f64]) -> Result<[f64; 3], GeometryError> {
    same_grid(u, v)?;
    let mut distinct: Vec<f64> = rhos.iter().copied().filter(|r| *r >= 0.0 && r.is_finite()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(GeometryError::TooFewSamples(distinct.len()));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for &r in rhos.iter().filter(|r| **r >= 0.0 && r.is_finite()) {
        let y = area(&minkowski_axpy(u, r, v)?);
        let row = [1.0, r, r * r];
        for i in 0..3 {
            atb[i] += row[i] * y;
            for k in 0..3 {
                ata[i][k] += row[i] * row[k];
            }
        }
    }
    Ok(solve3(ata, atb))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))
            .unwrap_or(col);
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hukuhara {
    Difference(SupportFunction2D),
    NoDifference { index: usize, defect: f64 },
}

impl Hukuhara {
    pub fn difference(self) -> Option<SupportFunction2D> {
        match self {
            Hukuhara::Difference(w) => Some(w),
            Hukuhara::NoDifference { .. } => None,
        }
    }
}

/// `w` with `u = v + w`, if the pointwise difference is a support function.
pub fn hukuhara_difference(u: &SupportFunction2D, v: &SupportFunction2D) -> Result<Hukuhara, GeometryError> {
    same_grid(u, v)?;
    let values: Vec<f64> = u.values.iter().zip(&v.values).map(|(a, b)| a - b).collect();
    let tol = convexity_tolerance(&u.values).max(convexity_tolerance(&v.values));
    let defects = convexity_defects(&values);
    let worst = defects
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, d)| (i, *d));
    match worst {
        Some((index, defect)) if defect < -tol => Ok(Hukuhara::NoDifference { index, defect }),
        _ => Ok(Hukuhara::Difference(SupportFunction2D::from_values(values)?)),
    }
}

/// Invariant violations of raw samples; empty iff the samples form a valid body.
pub fn validate(values: &[f64]) -> Vec<Violation> {
    let m = values.len();
    let mut out = Vec::new();
    if m < MIN_GRID {
        out.push(Violation::GridTooSmall { grid_size: m });
    }
    if m % 2 != 0 {
        out.push(Violation::OddGrid { grid_size: m });
    }
    let mut finite = true;
    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            out.push(Violation::NonFinite { index });
            finite = false;
        }
    }
    if finite && m >= 3 {
        let tolerance = convexity_tolerance(values);
        for (index, defect) in convexity_defects(values).into_iter().enumerate() {
            if defect < -tolerance {
                out.push(Violation::NonConvex { index, defect, tolerance });
            }
        }
    }
    out
}
