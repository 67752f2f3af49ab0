// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::CertificateError;
use crate::comparison::{check_xi0_stability, LinearComparison, StabilityVerdict, Xi0Options};
use crate::convex::{
    area, hausdorff_distance, make_polygon, mixed_area, perimeter, Eigenvalues, LinearOperator2D, SupportFunction2D,
};
use crate::semiflow::{step, SemiflowParams};

/// Constants with `‖e^{At}‖ ≤ N·e^{αt}` for `t ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SemigroupBound {
    pub n: f64,
    pub alpha: f64,
}

fn eigenvector(a: &LinearOperator2D, mu: f64) -> [f64; 2] {
    let [[p, q], [r, s]] = a.rows();
    if q.abs() >= r.abs() && q != 0.0 {
        [q, mu - p]
    } else if r != 0.0 {
        [mu - s, r]
    } else if (mu - p).abs() <= (mu - s).abs() {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// `α` is the spectral abscissa and `N` the condition number of the (real)
/// eigenbasis. A defective `A` gets `α` raised by `max(1, |a|)·10⁻²`.
pub fn semigroup_bound(a: &LinearOperator2D) -> SemigroupBound {
    let [[p, q], [r, s]] = a.rows();
    if q == 0.0 && r == 0.0 {
        return SemigroupBound { n: 1.0, alpha: p.max(s) };
    }
    match a.eigenvalues() {
        Eigenvalues::Complex { re, im } => {
            let v_re = [q, re - p];
            let basis = LinearOperator2D::from_entries(v_re[0], 0.0, v_re[1], im);
            SemigroupBound {
                n: basis.condition_number(),
                alpha: re,
            }
        }
        Eigenvalues::Real(l1, l2) => {
            let gap = (l1 - l2).abs();
            let size = a.frobenius_norm().max(1e-300);
            if gap > 1e-8 * size {
                let e1 = eigenvector(a, l1);
                let e2 = eigenvector(a, l2);
                let basis = LinearOperator2D::from_entries(e1[0], e2[0], e1[1], e2[1]);
                SemigroupBound {
                    n: basis.condition_number(),
                    alpha: l1.max(l2),
                }
            } else {
                let lam = 0.5 * (l1 + l2);
                let nil = (*a - LinearOperator2D::scalar(lam)).spectral_norm();
                let eps = 1e-2 * lam.abs().max(1.0);
                let t_star = 1.0 / eps - 1.0 / nil;
                let n = if t_star > 0.0 {
                    (1.0 + t_star * nil) * (-eps * t_star).exp()
                } else {
                    1.0
                };
                SemigroupBound {
                    n: n.max(1.0),
                    alpha: lam + eps,
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RouthHurwitz {
    pub trace: f64,
    pub det: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearizationReport {
    pub gamma0: f64,
    pub delta0: f64,
    pub n_const: f64,
    pub alpha: f64,
    pub volume: f64,
    pub phi: f64,
    pub dphi: f64,
    pub a_norm: f64,
    /// Sampled lower bound on `‖F_u‖`.
    pub f_u_norm: f64,
    pub f_v_norm: f64,
    /// `2V[u*, F_V]`.
    pub mixed_f_v: f64,
    pub fixed_point_residual: f64,
    /// `[γ₀, (αφ + N‖F_u‖)γ₀ + NΔ₀(‖A‖|φ'| + ‖F_V‖)]`.
    pub inequality_values: [f64; 2],
    pub stable: bool,
    /// Matrix of the linear `(ω₁, ω₂)` comparison system.
    pub omega_matrix: [[f64; 2]; 2],
    pub routh_hurwitz: RouthHurwitz,
    pub richardson: bool,
    pub notes: Vec<String>,
}

const FIXED_POINT_DT: f64 = 1e-3;
const FIXED_POINT_TOL: f64 = 1e-4;
const NORM_DIRECTIONS: usize = 32;

struct Derivatives {
    dphi: f64,
    f_v: SupportFunction2D,
}

fn derivatives(u: &SupportFunction2D, params: &SemiflowParams, v: f64, h: f64) -> Result<Derivatives, CertificateError> {
    let interp = params.interp.as_ref();
    let (lo, hi) = if v - h >= 0.0 { (v - h, v + h) } else { (v, v + h) };
    let width = hi - lo;
    let dphi = (params.phi.eval(hi) - params.phi.eval(lo)) / width;
    let f_hi = params.source.eval(hi, u, interp)?;
    let f_lo = params.source.eval(lo, u, interp)?;
    let f_v = SupportFunction2D::from_values(
        f_hi.values()
            .iter()
            .zip(f_lo.values())
            .map(|(a, b)| (a - b) / width)
            .collect(),
    )?;
    Ok(Derivatives { dphi, f_v })
}

fn operator_norm_estimate(u: &SupportFunction2D, params: &SemiflowParams, v: f64, h: f64) -> Result<f64, CertificateError> {
    let interp = params.interp.as_ref();
    let f0 = params.source.eval(v, u, interp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
    let mut best: f64 = 0.0;
    for _ in 0..NORM_DIRECTIONS {
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|_| {
                let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r: f64 = rng.gen_range(0.0..1.0);
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let w = make_polygon(&pts, u.grid_size())?;
        let wn = w.norm();
        if wn == 0.0 {
            continue;
        }
        let shifted = SupportFunction2D::from_values(
            u.values().iter().zip(w.values()).map(|(a, b)| a + h * b / wn).collect(),
        )?;
        let f1 = params.source.eval(v, &shifted, interp)?;
        best = best.max(hausdorff_distance(&f1, &f0)? / h);
    }
    Ok(best)
}

struct Core {
    gamma0: f64,
    ineq: f64,
    dphi: f64,
    f_v_norm: f64,
    mixed_f_v: f64,
}

fn core(
    u: &SupportFunction2D,
    params: &SemiflowParams,
    v: f64,
    h: f64,
    bound: SemigroupBound,
    a_norm: f64,
    f_u_norm: f64,
    delta0: f64,
) -> Result<Core, CertificateError> {
    let phi = params.phi.eval(v);
    let d = derivatives(u, params, v, h)?;
    let mixed_f_v = 2.0 * mixed_area(u, &d.f_v)?;
    let gamma0 = params.a.trace() * (phi + v * d.dphi) + mixed_f_v;
    let f_v_norm = d.f_v.norm();
    let ineq = (bound.alpha * phi + bound.n * f_u_norm) * gamma0 + bound.n * delta0 * (a_norm * d.dphi.abs() + f_v_norm);
    Ok(Core {
        gamma0,
        ineq,
        dphi: d.dphi,
        f_v_norm,
        mixed_f_v,
    })
}

/// First-order stability test at a fixed point `u*` with central
/// differences of step `fd_step·max(1, V[u*])`.
pub fn linearize(u_star: &SupportFunction2D, params: &SemiflowParams, fd_step: f64) -> Result<LinearizationReport, CertificateError> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(CertificateError::Precondition(format!("fd_step must be positive, got {fd_step}")));
    }
    let scale = u_star.norm().max(1.0);
    let moved = step(u_star, params, FIXED_POINT_DT)?;
    let residual = hausdorff_distance(&moved, u_star)? / FIXED_POINT_DT;
    let tolerance = FIXED_POINT_TOL * scale;
    if !(residual <= tolerance) {
        return Err(CertificateError::NotFixedPoint { residual, tolerance });
    }

    let v = area(u_star);
    let h = fd_step * v.max(1.0);
    let bound = semigroup_bound(&params.a);
    let a_norm = params.a.spectral_norm();
    let f_u_norm = operator_norm_estimate(u_star, params, v, fd_step * scale)?;
    let f_star = params.source.eval(v, u_star, params.interp.as_ref())?;
    let delta0 = perimeter(&f_star) + f_u_norm * perimeter(u_star);

    let mut notes = vec![format!(
        "operator norm of F_u is a lower bound from {NORM_DIRECTIONS} sampled directions"
    )];
    let coarse = core(u_star, params, v, h, bound, a_norm, f_u_norm, delta0)?;
    let near = 10.0 * fd_step * scale;
    let richardson = coarse.gamma0.abs() < near || coarse.ineq.abs() < near;
    let c = if richardson {
        let fine = core(u_star, params, v, 0.5 * h, bound, a_norm, f_u_norm, delta0)?;
        notes.push("Richardson extrapolation applied near the verdict boundary".into());
        let rx = |a: f64, b: f64| (4.0 * b - a) / 3.0;
        Core {
            gamma0: rx(coarse.gamma0, fine.gamma0),
            ineq: rx(coarse.ineq, fine.ineq),
            dphi: rx(coarse.dphi, fine.dphi),
            f_v_norm: fine.f_v_norm,
            mixed_f_v: rx(coarse.mixed_f_v, fine.mixed_f_v),
        }
    } else {
        coarse
    };

    let phi = params.phi.eval(v);
    let c1 = bound.alpha * phi + bound.n * f_u_norm;
    let c2 = a_norm * c.dphi.abs() + c.f_v_norm;
    let omega = [[c1, c2], [bound.n * delta0, c.gamma0]];
    let trace = omega[0][0] + omega[1][1];
    let det = omega[0][0] * omega[1][1] - omega[0][1] * omega[1][0];
    let rh = RouthHurwitz {
        trace,
        det,
        stable: trace < 0.0 && det > 0.0,
    };
    let stable = c.gamma0 < 0.0 && c.ineq > 0.0;
    if stable != rh.stable {
        notes.push("stated inequality and Routh-Hurwitz test on the omega-system disagree".into());
    }
    Ok(LinearizationReport {
        gamma0: c.gamma0,
        delta0,
        n_const: bound.n,
        alpha: bound.alpha,
        volume: v,
        phi,
        dphi: c.dphi,
        a_norm,
        f_u_norm,
        f_v_norm: c.f_v_norm,
        mixed_f_v: c.mixed_f_v,
        fixed_point_residual: residual,
        inequality_values: [c.gamma0, c.ineq],
        stable,
        omega_matrix: omega,
        routh_hurwitz: rh,
        richardson,
        notes,
    })
}

/// Sampled `ξ₀`-stability of the linear `(ω₁, ω₂)` system; `ω₁` bounds `d_H(u, u*)`.
pub fn linearized_stability(report: &LinearizationReport, opts: &Xi0Options) -> Result<StabilityVerdict, CertificateError> {
    let sys = LinearComparison::new(report.omega_matrix.iter().map(|r| r.to_vec()).collect());
    let mut v = check_xi0_stability(&sys, &[1e-2, 1e-1, 1.0], opts)?;
    v.check = "linearized_hausdorff_stability".into();
    v.notes.push("transferred to measures h0 = h = d_H(u, u*)".into());
    Ok(v)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::convex::make_ball;
    use crate::functions::{Constant, Rational};
    use crate::semiflow::{BallSource, ZeroSource};

    fn sampled_max_ratio(a: &LinearOperator2D, b: SemigroupBound) -> f64 {
        (0..=400)
            .map(|k| {
                let t = k as f64 * 0.05;
                a.exp(t).spectral_norm() / (b.n * (b.alpha * t).exp())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn semigroup_bounds_dominate_sampled_norms() {
        let ops = [
            LinearOperator2D::scalar(-1.0),
            LinearOperator2D::from_entries(-1.0, 5.0, 0.0, -2.0),
            LinearOperator2D::from_entries(-0.5, -3.0, 1.0, -0.5),
            LinearOperator2D::from_entries(-1.0, 1.0, 0.0, -1.0),
            LinearOperator2D::from_entries(0.0, 1.0, 1.0, 0.0),
            LinearOperator2D::diag(-3.0, 0.5),
        ];
        for a in ops {
            let b = semigroup_bound(&a);
            assert!(b.n >= 1.0 - 1e-12);
            assert!(sampled_max_ratio(&a, b) <= 1.0 + 1e-9, "{a:?} {b:?}");
        }
        let b = semigroup_bound(&LinearOperator2D::scalar(-1.0));
        assert_eq!((b.n, b.alpha), (1.0, -1.0));
    }

    #[test]
    fn zero_source_at_origin() {
        let params = SemiflowParams::new(LinearOperator2D::scalar(-1.0), Arc::new(Constant(0.8)), Arc::new(ZeroSource));
        let point = make_ball(0.0, [0.0, 0.0], 256).unwrap();
        let r = linearize(&point, &params, 1e-4).unwrap();
        assert!((r.gamma0 + 1.6).abs() < 1e-9);
        assert!(r.stable && r.routh_hurwitz.stable);
    }

    #[test]
    fn ball_source_fixed_point() {
        let params = SemiflowParams::new(
            LinearOperator2D::scalar(-1.0),
            Arc::new(Constant(1.0)),
            Arc::new(BallSource { psi: Arc::new(Constant(1.0)) }),
        );
        let k = make_ball(1.0, [0.0, 0.0], 512).unwrap();
        let r = linearize(&k, &params, 1e-4).unwrap();
        assert!((r.gamma0 + 2.0).abs() < 1e-9);
        assert!(r.f_u_norm < 1e-9);
        assert!((r.delta0 - perimeter(&k)).abs() < 1e-9);
        assert!(r.stable && r.routh_hurwitz.stable);
        let v = linearized_stability(&r, &Xi0Options { directions: 8, ..Default::default() }).unwrap();
        assert!(v.kind.is_stable_side());
    }

    #[test]
    fn non_fixed_points_are_rejected() {
        let params = SemiflowParams::new(
            LinearOperator2D::scalar(-1.0),
            Arc::new(Rational::reciprocal_shift()),
            Arc::new(BallSource { psi: Arc::new(Constant(1.0)) }),
        );
        let k = make_ball(3.0, [0.0, 0.0], 256).unwrap();
        assert!(matches!(linearize(&k, &params, 1e-4), Err(CertificateError::NotFixedPoint { .. })));
    }
}
