// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use crate::convex::{
    linear_image_with, GeometryError, Interpolation, LinearOperator2D, SupportFunction2D,
};
use crate::functions::SharedFn;

/// Right-hand side `F(V, u)` of the set equation.
pub trait SourceTerm: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn eval(
        &self,
        volume: f64,
        u: &SupportFunction2D,
        interp: &dyn Interpolation,
    ) -> Result<SupportFunction2D, GeometryError>;

    /// `Φ⁻¹F(V, Φz)`, the source seen in the moving frame `u = Φz`.
    fn eval_in_frame(
        &self,
        volume: f64,
        z: &SupportFunction2D,
        frame: &LinearOperator2D,
        interp: &dyn Interpolation,
    ) -> Result<SupportFunction2D, GeometryError> {
        let inv = frame.inverse().ok_or(GeometryError::NonFiniteOperator)?;
        let u = linear_image_with(z, frame, interp)?;
        linear_image_with(&self.eval(volume, &u, interp)?, &inv, interp)
    }

    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroSource;

impl SourceTerm for ZeroSource {
    fn name(&self) -> &'static str {
        "zero"
    }

    fn eval(&self, _: f64, u: &SupportFunction2D, _: &dyn Interpolation) -> Result<SupportFunction2D, GeometryError> {
        SupportFunction2D::from_values(vec![0.0; u.grid_size()])
    }

    fn eval_in_frame(
        &self,
        _: f64,
        z: &SupportFunction2D,
        _: &LinearOperator2D,
        _: &dyn Interpolation,
    ) -> Result<SupportFunction2D, GeometryError> {
        SupportFunction2D::from_values(vec![0.0; z.grid_size()])
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// `F(V, u) = ψ(V)·K` with `K` the unit disk.
#[derive(Clone, Debug)]
pub struct BallSource {
    pub psi: SharedFn,
}

impl SourceTerm for BallSource {
    fn name(&self) -> &'static str {
        "ball_source"
    }

    fn eval(&self, volume: f64, u: &SupportFunction2D, _: &dyn Interpolation) -> Result<SupportFunction2D, GeometryError> {
        SupportFunction2D::from_values(vec![self.psi.eval(volume); u.grid_size()])
    }

    fn eval_in_frame(
        &self,
        volume: f64,
        z: &SupportFunction2D,
        frame: &LinearOperator2D,
        _: &dyn Interpolation,
    ) -> Result<SupportFunction2D, GeometryError> {
        let inv_t = frame
            .inverse()
            .ok_or(GeometryError::NonFiniteOperator)?
            .transpose();
        let psi = self.psi.eval(volume);
        let m = z.grid_size();
        SupportFunction2D::from_values(
            (0..m)
                .map(|j| {
                    let q = inv_t.apply(crate::convex::grid_direction(m, j));
                    psi * q[0].hypot(q[1])
                })
                .collect(),
        )
    }
}

/// `F(V, u) = ψ(V)·B u`.
#[derive(Clone, Debug)]
pub struct LinearBody {
    pub psi: SharedFn,
    pub b: LinearOperator2D,
}

impl SourceTerm for LinearBody {
    fn name(&self) -> &'static str {
        "linear_body"
    }

    fn eval(&self, volume: f64, u: &SupportFunction2D, interp: &dyn Interpolation) -> Result<SupportFunction2D, GeometryError> {
        linear_image_with(u, &self.b.scale(self.psi.eval(volume)), interp)
    }

    fn eval_in_frame(
        &self,
        volume: f64,
        z: &SupportFunction2D,
        frame: &LinearOperator2D,
        interp: &dyn Interpolation,
    ) -> Result<SupportFunction2D, GeometryError> {
        let inv = frame.inverse().ok_or(GeometryError::NonFiniteOperator)?;
        let conj = inv * self.b * *frame;
        linear_image_with(z, &conj.scale(self.psi.eval(volume)), interp)
    }
}

/// `F(V, u) = U`, a fixed body (control set of a linear system).
#[derive(Clone, Debug)]
pub struct ConstantBody {
    pub body: SupportFunction2D,
}

impl SourceTerm for ConstantBody {
    fn name(&self) -> &'static str {
        "constant_body"
    }

    fn eval(&self, _: f64, u: &SupportFunction2D, _: &dyn Interpolation) -> Result<SupportFunction2D, GeometryError> {
        if u.grid_size() != self.body.grid_size() {
            return Err(GeometryError::GridMismatch {
                left: u.grid_size(),
                right: self.body.grid_size(),
            });
        }
        Ok(self.body.clone())
    }

    fn eval_in_frame(
        &self,
        volume: f64,
        z: &SupportFunction2D,
        frame: &LinearOperator2D,
        interp: &dyn Interpolation,
    ) -> Result<SupportFunction2D, GeometryError> {
        let inv = frame.inverse().ok_or(GeometryError::NonFiniteOperator)?;
        linear_image_with(&self.eval(volume, z, interp)?, &inv, interp)
    }
}
