// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use setflow_core::convex::*;
use setflow_core::functions::{Constant, Rational};
use setflow_core::semiflow::*;

const M: usize = 256;

fn smooth_body() -> SupportFunction2D {
    SupportFunction2D::from_fn(M, |t| 1.0 + 0.2 * t.cos() + 0.05 * (2.0 * t).sin() + 0.02 * (3.0 * t).cos()).unwrap()
}

fn params() -> SemiflowParams {
    SemiflowParams::new(
        LinearOperator2D::from_entries(-0.4, 0.7, -0.3, 0.1),
        Arc::new(Rational::reciprocal_shift()),
        Arc::new(LinearBody {
            psi: Arc::new(Constant(0.3)),
            b: LinearOperator2D::from_entries(0.2, -0.5, 0.4, 0.1),
        }),
    )
}

#[test]
fn composition_matches_single_run() {
    let (u0, p, dt) = (smooth_body(), params(), 1e-2);
    let whole = evolve(&u0, &p, 1.0, dt).unwrap();
    let first = evolve(&u0, &p, 0.4, dt).unwrap();
    let second = evolve(first.last().unwrap(), &p, 0.6, dt).unwrap();
    let d = hausdorff_distance(whole.last().unwrap(), second.last().unwrap()).unwrap();
    assert!(d <= 10.0 * dt, "{d}");
}

#[test]
fn strang_splitting_is_second_order() {
    let (u0, p) = (smooth_body(), params());
    let reference = evolve(&u0, &p, 0.5, 1e-3).unwrap();
    let r = reference.last().unwrap();
    let err = |dt: f64| hausdorff_distance(evolve(&u0, &p, 0.5, dt).unwrap().last().unwrap(), r).unwrap();
    let ratio = err(0.05) / err(0.025);
    assert!(ratio > 3.0 && ratio < 5.0, "{ratio}");
}

#[test]
fn picard_agrees_with_splitting() {
    let (u0, p) = (smooth_body(), params());
    let sol = picard_solve(&u0, &p, 0.05, 1e-11, 60).unwrap();
    let ev = evolve(&u0, &p, 0.05, 1e-3).unwrap();
    for (t, u) in sol.trajectory.times.iter().zip(&sol.trajectory.bodies) {
        let d = hausdorff_distance(u, ev.body_near(*t).unwrap()).unwrap();
        assert!(d < 1e-6, "t = {t}: {d}");
    }
}

#[test]
fn stored_frames_are_convex() {
    let tr = evolve(&smooth_body(), &params(), 2.0, 1e-2).unwrap();
    assert!(tr.bodies.iter().all(|b| validate(b.values()).is_empty()));
}
