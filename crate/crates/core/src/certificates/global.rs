// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{semigroup_bound, CertificateError};
use crate::comparison::{
    check_xi0_stability, integrate, ComparisonError, ComparisonTrajectory, FnSystem, StabilityKind, StabilityVerdict,
    Xi0Options,
};
use crate::convex::{area, SupportFunction2D};
use crate::functions::SharedFn;
use crate::semiflow::{evolve, SemiflowError, SemiflowParams};

/// Caller-supplied bounds for the global existence test.
///
/// `g_upper`/`g_lower` bound `2V[u, F(V[u], u)]` as functions of `V`,
/// `f_plus` bounds `‖F‖` as a function of `N·‖u‖`.
#[derive(Clone, Debug)]
pub struct GlobalBounds {
    pub g_upper: SharedFn,
    pub g_lower: SharedFn,
    pub f_plus: SharedFn,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OrbitCheck {
    /// `max_t (‖u(t)‖ − Nω⁺(t))`.
    pub norm_excess: f64,
    /// `max_t max(V − ζ⁺, χ₋ − V)`.
    pub volume_excess: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GlobalExistenceReport {
    pub times: Vec<f64>,
    pub zeta_plus: Vec<f64>,
    pub chi_minus: Vec<f64>,
    pub omega_plus: Vec<f64>,
    pub n_const: f64,
    pub alpha: f64,
    /// `Λ±`, frozen at the extreme of `φ` over the whole volume band.
    pub lambda_pm: f64,
    pub finite: bool,
    pub escape_time: Option<f64>,
    pub escaped: Option<String>,
    pub orbit: Option<OrbitCheck>,
    pub notes: Vec<String>,
}

enum Run {
    Done(ComparisonTrajectory),
    Escaped(f64, ComparisonTrajectory),
}

fn run(sys: &FnSystem, x0: f64, t_end: f64, dt: f64) -> Result<Run, CertificateError> {
    match integrate(sys, &[x0], t_end, dt) {
        Ok(t) => Ok(Run::Done(t)),
        Err(ComparisonError::BlowUp { time, trajectory }) => Ok(Run::Escaped(time, *trajectory)),
        Err(e) => Err(e.into()),
    }
}

fn values(t: &ComparisonTrajectory) -> Vec<f64> {
    t.component(0)
}

/// Integrates `ζ⁺`, `χ₋` and `ω⁺` on `[0, T]` and checks the resulting
/// norm and volume envelopes against a simulated orbit.
pub fn global_existence_report(
    params: &SemiflowParams,
    bounds: &GlobalBounds,
    u0: &SupportFunction2D,
    t_end: f64,
    dt: f64,
) -> Result<GlobalExistenceReport, CertificateError> {
    let sg = semigroup_bound(&params.a);
    let tr_a = params.a.trace();
    let v0 = area(u0);
    let mut report = GlobalExistenceReport {
        n_const: sg.n,
        alpha: sg.alpha,
        finite: true,
        ..Default::default()
    };

    let (phi, up, low) = (params.phi.clone(), bounds.g_upper.clone(), bounds.g_lower.clone());
    let zeta_sys = FnSystem::scalar("zeta_plus", move |z| tr_a * phi.eval(z) * z + up.eval(z));
    let phi = params.phi.clone();
    let chi_sys = FnSystem::scalar("chi_minus", move |c| tr_a * phi.eval(c) * c + low.eval(c));
    for (name, sys) in [("zeta_plus", &zeta_sys), ("chi_minus", &chi_sys)] {
        let tr = match run(sys, v0, t_end, dt)? {
            Run::Done(t) => t,
            Run::Escaped(time, t) => {
                report.finite = false;
                report.escape_time = Some(time);
                report.escaped = Some(name.into());
                t
            }
        };
        if name == "zeta_plus" {
            report.times = tr.times.clone();
            report.zeta_plus = values(&tr);
        } else {
            report.chi_minus = values(&tr);
        }
    }
    if !report.finite {
        return Ok(report);
    }

    let lo = report.chi_minus.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
    let hi = report.zeta_plus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let samples = (0..=400).map(|k| params.phi.eval(lo + (hi - lo) * k as f64 / 400.0));
    report.lambda_pm = if sg.alpha > 0.0 {
        samples.fold(f64::NEG_INFINITY, f64::max)
    } else {
        samples.fold(f64::INFINITY, f64::min)
    };
    let (alpha, lam, n, fp) = (sg.alpha, report.lambda_pm, sg.n, bounds.f_plus.clone());
    let omega_sys = FnSystem::scalar("omega_plus", move |w| alpha * lam * w + fp.eval(n * w));
    match run(&omega_sys, u0.norm(), t_end, dt)? {
        Run::Done(t) => report.omega_plus = values(&t),
        Run::Escaped(time, t) => {
            report.omega_plus = values(&t);
            report.finite = false;
            report.escape_time = Some(time);
            report.escaped = Some("omega_plus".into());
            return Ok(report);
        }
    }

    match evolve(u0, params, t_end, dt) {
        Ok(traj) => {
            let mut check = OrbitCheck {
                norm_excess: f64::NEG_INFINITY,
                volume_excess: f64::NEG_INFINITY,
                passed: false,
            };
            for (t, u) in traj.times.iter().zip(&traj.bodies) {
                let k = ((t / dt).round() as usize).min(report.times.len() - 1);
                let k = if (report.times[k] - t).abs() <= 1e-9 * t.max(1.0) {
                    k
                } else {
                    report.times.partition_point(|s| *s < *t).min(report.times.len() - 1)
                };
                let v = area(u);
                check.norm_excess = check.norm_excess.max(u.norm() - n * report.omega_plus[k]);
                check.volume_excess = check
                    .volume_excess
                    .max(v - report.zeta_plus[k])
                    .max(report.chi_minus[k] - v);
            }
            let tol = 1e-3 * u0.norm().max(v0).max(1.0);
            check.passed = check.norm_excess <= tol && check.volume_excess <= tol;
            report.orbit = Some(check);
        }
        Err(SemiflowError::BlowUp { time, .. }) => {
            report.notes.push(format!("simulated orbit left the norm guard at t = {time:.6}"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

/// Bounds for the Hausdorff-norm comparison equation
/// `ω' = αΛ̂ω + F̂⁺(Nω)`, with `Λ̂` and `F̂⁺` already folded over `B_r(0)`.
#[derive(Clone, Debug)]
pub struct HausdorffBounds {
    pub alpha: f64,
    pub n_const: f64,
    pub lambda_hat: f64,
    pub f_hat: SharedFn,
}

/// Sampled stability of `ω = 0`, transferred to the measures `h₀ = h = ‖u‖`.
pub fn hausdorff_stability_report(bounds: &HausdorffBounds, opts: &Xi0Options) -> Result<StabilityVerdict, CertificateError> {
    let HausdorffBounds {
        alpha,
        n_const,
        lambda_hat,
        ref f_hat,
    } = *bounds;
    let f = f_hat.clone();
    let sys = FnSystem::scalar("omega_hat", move |w| alpha * lambda_hat * w + f.eval(n_const * w));
    let forcing = f_hat.eval(0.0);
    let mut v = if forcing > 1e-12 {
        StabilityVerdict::new("hausdorff_stability", StabilityKind::Unstable)
            .margin("forcing_at_zero", forcing)
            .note("omega = 0 is not an equilibrium; the comparison solution grows from zero")
    } else {
        let mut v = check_xi0_stability(&sys, &[1e-2, 1e-1, 1.0], opts)?;
        v.check = "hausdorff_stability".into();
        v
    };
    v = v
        .parameter("alpha", alpha)
        .parameter("N", n_const)
        .parameter("lambda_hat", lambda_hat)
        .note("transferred to measures h0 = h = sup-norm of the support function");
    Ok(v)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::convex::{make_ball, LinearOperator2D};
    use crate::functions::{Constant, Power};
    use crate::semiflow::{BallSource, ZeroSource};

    fn ball_params() -> SemiflowParams {
        SemiflowParams::new(
            LinearOperator2D::scalar(-1.0),
            Arc::new(Constant(1.0)),
            Arc::new(BallSource { psi: Arc::new(Constant(1.0)) }),
        )
    }

    #[test]
    fn ball_source_stays_bounded() {
        let bm: SharedFn = Arc::new(Power::new(2.0 * PI.sqrt(), 0.5));
        let bounds = GlobalBounds {
            g_upper: bm.clone(),
            g_lower: bm,
            f_plus: Arc::new(Constant(1.0)),
        };
        let u0 = make_ball(0.5, [0.0, 0.0], 256).unwrap();
        let r = global_existence_report(&ball_params(), &bounds, &u0, 12.0, 0.01).unwrap();
        assert!(r.finite);
        let z = *r.zeta_plus.last().unwrap();
        assert!((z - PI).abs() < 1e-3, "{z}");
        assert!(r.zeta_plus.iter().zip(&r.chi_minus).all(|(a, b)| (a - b).abs() < 1e-12));
        let orbit = r.orbit.unwrap();
        assert!(orbit.passed, "{orbit:?}");
    }

    #[test]
    fn no_source_decays_exponentially() {
        let params = SemiflowParams::new(LinearOperator2D::scalar(-0.5), Arc::new(Constant(1.0)), Arc::new(ZeroSource));
        let zero: SharedFn = Arc::new(Constant(0.0));
        let bounds = GlobalBounds {
            g_upper: zero.clone(),
            g_lower: zero.clone(),
            f_plus: zero,
        };
        let u0 = make_ball(2.0, [0.0, 0.0], 128).unwrap();
        let r = global_existence_report(&params, &bounds, &u0, 4.0, 0.01).unwrap();
        assert!(r.finite);
        let w = *r.omega_plus.last().unwrap();
        assert!((w - 2.0 * (-2f64).exp()).abs() < 1e-8);
        assert!(r.orbit.unwrap().passed);
    }

    #[test]
    fn superlinear_bound_escapes() {
        let bounds = GlobalBounds {
            g_upper: Arc::new(Power::new(1.0, 2.0)),
            g_lower: Arc::new(Constant(0.0)),
            f_plus: Arc::new(Constant(0.0)),
        };
        let params = SemiflowParams::new(LinearOperator2D::zero(), Arc::new(Constant(1.0)), Arc::new(ZeroSource));
        let u0 = make_ball(1.0, [0.0, 0.0], 64).unwrap();
        let r = global_existence_report(&params, &bounds, &u0, 1.0, 0.01).unwrap();
        assert!(!r.finite);
        assert_eq!(r.escaped.as_deref(), Some("zeta_plus"));
        let t = r.escape_time.unwrap();
        assert!((t - 1.0 / PI).abs() < 1e-3, "{t}");
    }

    #[test]
    fn hausdorff_verdicts() {
        let opts = Xi0Options {
            directions: 4,
            ..Default::default()
        };
        let decay = HausdorffBounds {
            alpha: -1.0,
            n_const: 1.0,
            lambda_hat: 1.0,
            f_hat: Arc::new(Constant(0.0)),
        };
        assert_eq!(hausdorff_stability_report(&decay, &opts).unwrap().kind, StabilityKind::AsymptoticallyStable);
        let forced = HausdorffBounds {
            alpha: 0.0,
            n_const: 1.0,
            lambda_hat: 1.0,
            f_hat: Arc::new(Constant(0.3)),
        };
        assert_eq!(hausdorff_stability_report(&forced, &opts).unwrap().kind, StabilityKind::Unstable);
    }
}
