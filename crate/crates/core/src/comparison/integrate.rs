// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{ComparisonError, ComparisonSystem};

#[derive(Clone, Copy, Debug)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Abort when any component exceeds this magnitude.
    pub blowup: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
            blowup: 1e12,
            max_steps: 5_000_000,
        }
    }
}

/// States of a comparison system at the requested output times.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComparisonTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Number of accepted steps that produced a negative component.
    pub clamped: usize,
    /// Most negative component seen before clamping (0 if none).
    pub worst_undershoot: f64,
    pub steps: usize,
    /// True when a stop predicate ended the run before the last output time.
    pub stopped: bool,
}

impl ComparisonTrajectory {
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn sup(&self, i: usize) -> f64 {
        self.states.iter().map(|s| s[i]).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn rk4(sys: &dyn ComparisonSystem, y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    sys.rhs(y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    sys.rhs(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    sys.rhs(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    sys.rhs(&tmp, &mut k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn check_initial(sys: &dyn ComparisonSystem, xi0: &[f64]) -> Result<(), ComparisonError> {
    if xi0.len() != sys.dim() {
        return Err(ComparisonError::DimensionMismatch {
            expected: sys.dim(),
            got: xi0.len(),
        });
    }
    if let Some(i) = xi0.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(ComparisonError::OutsideCone(i));
    }
    Ok(())
}

/// Output grid `0, dt, 2dt, …, T` (last spacing may be shorter).
pub fn output_grid(t_end: f64, dt: f64) -> Result<Vec<f64>, ComparisonError> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(ComparisonError::InvalidHorizon(t_end));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ComparisonError::InvalidStep(dt));
    }
    let n = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut grid: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    grid.push(t_end);
    Ok(grid)
}

/// Adaptive RK4 (step doubling with local extrapolation) on `[0, T]`,
/// sampled every `dt`.
pub fn integrate(
    sys: &dyn ComparisonSystem,
    xi0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<ComparisonTrajectory, ComparisonError> {
    integrate_at(sys, xi0, &output_grid(t_end, dt)?, &IntegrateOptions::default())
}

/// Integration reporting the state at each of the nondecreasing `times`,
/// which must start at 0.
pub fn integrate_at(
    sys: &dyn ComparisonSystem,
    xi0: &[f64],
    times: &[f64],
    opts: &IntegrateOptions,
) -> Result<ComparisonTrajectory, ComparisonError> {
    integrate_until(sys, xi0, times, opts, |_, _| false)
}

/// As [`integrate_at`], ending early once `stop(t, ξ)` holds at an output time.
pub fn integrate_until(
    sys: &dyn ComparisonSystem,
    xi0: &[f64],
    times: &[f64],
    opts: &IntegrateOptions,
    mut stop: impl FnMut(f64, &[f64]) -> bool,
) -> Result<ComparisonTrajectory, ComparisonError> {
    check_initial(sys, xi0)?;
    if times.first() != Some(&0.0) || times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(ComparisonError::BadOutputTimes);
    }
    let mut out = ComparisonTrajectory::default();
    let mut y = xi0.to_vec();
    let mut t = 0.0;
    let span = times.last().copied().unwrap_or(0.0);
    let mut h = if span > 0.0 { span / 100.0 } else { 1.0 };
    out.times.push(0.0);
    out.states.push(y.clone());
    if stop(0.0, &y) {
        out.stopped = times.len() > 1;
        return Ok(out);
    }

    for (idx, &target) in times.iter().enumerate().skip(1) {
        while t < target {
            if out.steps >= opts.max_steps {
                return Err(ComparisonError::TooManySteps { time: t });
            }
            let last = target - t <= h * (1.0 + 1e-12);
            let hh = if last { target - t } else { h };
            let full = rk4(sys, &y, hh);
            let mid = rk4(sys, &y, 0.5 * hh);
            let fine = rk4(sys, &mid, 0.5 * hh);
            let err = (0..y.len())
                .map(|i| {
                    let scale = opts.atol + opts.rtol * y[i].abs().max(fine[i].abs());
                    (fine[i] - full[i]).abs() / (15.0 * scale)
                })
                .fold(0.0, f64::max);
            if !err.is_finite() || fine.iter().any(|v| !v.is_finite()) {
                if hh < 1e-14 * t.max(1.0) {
                    return Err(ComparisonError::BlowUp {
                        time: t,
                        trajectory: Box::new(out),
                    });
                }
                h = 0.25 * hh;
                continue;
            }
            if err <= 1.0 {
                t = if last { target } else { t + hh };
                y = (0..y.len()).map(|i| fine[i] + (fine[i] - full[i]) / 15.0).collect();
                out.steps += 1;
                let low = y.iter().copied().fold(0.0, f64::min);
                if low < 0.0 {
                    out.clamped += 1;
                    out.worst_undershoot = out.worst_undershoot.min(low);
                    y.iter_mut().for_each(|v| *v = v.max(0.0));
                }
                if y.iter().any(|v| v.abs() > opts.blowup) {
                    out.times.push(t);
                    out.states.push(y);
                    return Err(ComparisonError::BlowUp {
                        time: t,
                        trajectory: Box::new(out),
                    });
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let proposed = hh * factor;
            if err > 1.0 && proposed < 1e-14 * t.max(1.0) {
                return Err(ComparisonError::BlowUp {
                    time: t,
                    trajectory: Box::new(out),
                });
            }
            if !(last && err <= 1.0) || proposed < h {
                h = proposed;
            }
        }
        out.times.push(target);
        out.states.push(y.clone());
        if stop(target, &y) {
            out.stopped = idx + 1 < times.len();
            return Ok(out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::comparison::{FnSystem, LinearComparison, NilpotentPair, PracticalPair};
    use crate::functions::Constant;

    #[test]
    fn nilpotent_pair_closed_form() {
        let sys = NilpotentPair {
            phi: Arc::new(Constant(1.0)),
            psi: Arc::new(Constant(0.5)),
        };
        let (s0, w0) = (2.0, 0.7);
        let tr = integrate(&sys, &[s0, w0], 3.0, 0.01).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.states) {
            let e = (-2.0 * t).exp();
            assert!((x[1] - w0 * e).abs() < 1e-10);
            assert!((x[0] - e * (s0 + w0 * t)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn practical_pair_matches_matrix_exponential() {
        let sys = PracticalPair { trace: 0.0, abs_det: 1.0 };
        let tr = integrate(&sys, &[1.0, 0.0], 1.0, 0.1).unwrap();
        let x = tr.last().unwrap();
        assert!((x[0] - 2f64.cosh()).abs() < 1e-9);
        assert!((x[1] - 2f64.sinh()).abs() < 1e-9);
    }

    #[test]
    fn zero_rhs_is_constant() {
        let sys = LinearComparison::new(vec![vec![0.0; 3]; 3]);
        let tr = integrate(&sys, &[1.0, 2.0, 3.0], 5.0, 0.5).unwrap();
        assert!(tr.states.iter().all(|s| s == &[1.0, 2.0, 3.0]));
        assert_eq!(tr.times.len(), 11);
    }

    #[test]
    fn undershoots_are_clamped_and_counted() {
        let sys = FnSystem::scalar("drain", |_| -1.0);
        let tr = integrate(&sys, &[0.5], 2.0, 0.1).unwrap();
        assert!(tr.clamped > 0);
        assert!(tr.worst_undershoot < 0.0);
        assert_eq!(tr.last().unwrap()[0], 0.0);
    }

    #[test]
    fn finite_time_escape_is_reported() {
        let sys = FnSystem::scalar("square", |x| x * x);
        match integrate(&sys, &[1.0], 2.0, 0.01) {
            Err(ComparisonError::BlowUp { time, .. }) => assert!((time - 1.0).abs() < 1e-3, "{time}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        let sys = FnSystem::scalar("id", |x| x);
        assert!(matches!(integrate(&sys, &[-1.0], 1.0, 0.1), Err(ComparisonError::OutsideCone(0))));
        assert!(matches!(integrate(&sys, &[1.0, 1.0], 1.0, 0.1), Err(ComparisonError::DimensionMismatch { .. })));
        assert!(integrate(&sys, &[1.0], 1.0, 0.0).is_err());
        let tr = integrate(&sys, &[1.0], 0.0, 0.1).unwrap();
        assert_eq!(tr.times, vec![0.0]);
    }
}
