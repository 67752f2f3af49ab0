// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use setflow_core::comparison::{bound_check, NilpotentPair};
use setflow_core::convex::*;
use setflow_core::functions::{Constant, Rational, SharedFn};
use setflow_core::semiflow::*;

const M: usize = 256;

fn half() -> SharedFn {
    Arc::new(Constant(0.5))
}

fn linear_body(b: LinearOperator2D, phi: SharedFn) -> SemiflowParams {
    SemiflowParams::new(LinearOperator2D::scalar(-1.0), phi, Arc::new(LinearBody { psi: half(), b }))
}

fn max_rel(times: &[f64], values: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
    times
        .iter()
        .zip(values)
        .map(|(t, v)| ((v - exact(*t)) / exact(*t)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn diagonal_reflection_area() {
    let b = LinearOperator2D::diag(1.0, -1.0);
    let u0 = make_square(1.0, M).unwrap();
    let s = area(&u0);
    let sb = mixed_area(&u0, &linear_image(&u0, &b).unwrap()).unwrap();
    let tr = evolve(&u0, &linear_body(b, Arc::new(Constant(1.0))), 2.0, 5e-3).unwrap();
    let err = max_rel(&tr.times, &tr.series("V").unwrap(), |t| {
        0.5 * (-t).exp() * (s + sb) + 0.5 * (-3.0 * t).exp() * (s - sb)
    });
    assert!(err < 1e-4, "{err}");
}

#[test]
fn quarter_turn_area_has_secular_term() {
    let j = LinearOperator2D::quarter_turn();
    let u0 = make_rectangle(2.0, 1.0, M).unwrap();
    let w = mixed_functionals(&u0, &j, 4).unwrap();
    let tr = evolve(&u0, &linear_body(j, Arc::new(Constant(1.0))), 2.0, 5e-3).unwrap();
    let err = max_rel(&tr.times, &tr.series("V").unwrap(), |t| {
        0.125 * (-t).exp() * (2.0 * w[0] + 3.0 * w[1] + 2.0 * w[2] + w[3])
            + 0.125 * (-3.0 * t).exp() * (2.0 * w[0] - 3.0 * w[1] + 2.0 * w[2] - w[3])
            + 0.5 * (-2.0 * t).exp() * (w[0] - w[2])
            + 0.25 * t * (-2.0 * t).exp() * (w[1] - w[3])
    });
    assert!(err < 1e-3, "{err}");
}

#[test]
fn segments_grow_quadratically_in_length() {
    let p = linear_body(LinearOperator2D::quarter_turn(), Arc::new(Constant(1.0)));
    let areas: Vec<f64> = [4.0, 8.0]
        .iter()
        .map(|n| {
            let tr = evolve(&make_segment(*n, M).unwrap(), &p, 1.0, 5e-3).unwrap();
            *tr.series("V").unwrap().last().unwrap()
        })
        .collect();
    let c = 0.25 * ((-1f64).exp() - (-3f64).exp());
    assert!((areas[0] / (16.0 * c) - 1.0).abs() < 1e-3);
    assert!((areas[1] / areas[0] - 4.0).abs() < 1e-3);
}

#[test]
fn nilpotent_orbit_is_dominated() {
    let bn = LinearOperator2D::from_entries(0.0, 1.0, 0.0, 0.0);
    let phi: SharedFn = Arc::new(Rational::reciprocal_shift());
    let p = linear_body(bn, phi.clone());
    let mut tr = evolve(&make_square(1.0, M).unwrap(), &p, 2.0, 5e-3).unwrap();
    tr.track(&MixedPower::new(bn, 1)).unwrap();
    let sys = NilpotentPair { phi, psi: half() };
    let r = bound_check(&tr, &sys, &["V", "W1"], 1e-4).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn reach_set_of_pure_control_is_a_minkowski_ray() {
    let u = make_ball(0.5, [0.0, 0.0], M).unwrap();
    let d0 = make_square(1.0, M).unwrap();
    let tr = reach_set(&LinearOperator2D::zero(), &u, &d0, 1.0, 0.1).unwrap();
    let exact = minkowski_axpy(&d0, 1.0, &u).unwrap();
    assert!(hausdorff_distance(tr.last().unwrap(), &exact).unwrap() < 1e-12);
}
