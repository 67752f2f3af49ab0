// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::integrate::{integrate_at, integrate_until, output_grid, IntegrateOptions};
use super::{ComparisonError, ComparisonSystem, MeasurePair, StabilityKind, StabilityVerdict};
use crate::comparison::verdict::DeltaEntry;
use crate::semiflow::Trajectory;

const BOX_NOTE: &str = "sampled on a bounded box; global validity is not verified";

/// Axis-aligned sampling region in the cone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, ComparisonError> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && *a >= 0.0 && b >= a)) {
            return Err(ComparisonError::BadBox);
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| if b > a { rng.gen_range(*a..*b) } else { *a })
            .collect()
    }
}

fn check_box(sys: &dyn ComparisonSystem, sample_box: &SampleBox) -> Result<(), ComparisonError> {
    if sample_box.dim() != sys.dim() {
        return Err(ComparisonError::DimensionMismatch {
            expected: sys.dim(),
            got: sample_box.dim(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasimonotoneViolation {
    pub component: usize,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub g_xi: f64,
    pub g_eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WazewskiReport {
    pub passed: bool,
    pub samples: usize,
    pub violation: Option<QuasimonotoneViolation>,
    pub note: String,
}

/// Sampled quasimonotonicity: `ξ ≤ η`, `ξᵢ = ηᵢ` must give `gᵢ(ξ) ≤ gᵢ(η)`.
pub fn check_wazewski(
    sys: &dyn ComparisonSystem,
    sample_box: &SampleBox,
    n_samples: usize,
    seed: u64,
) -> Result<WazewskiReport, ComparisonError> {
    check_box(sys, sample_box)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = sys.dim();
    let mut samples = 0;
    for _ in 0..n_samples {
        let xi = sample_box.sample(&mut rng);
        let g_xi = sys.eval(&xi);
        for i in 0..k {
            let eta: Vec<f64> = (0..k)
                .map(|j| {
                    if j == i {
                        xi[j]
                    } else {
                        xi[j] + rng.gen_range(0.0..=1.0) * (sample_box.hi[j] - xi[j])
                    }
                })
                .collect();
            let g_eta = sys.eval(&eta)[i];
            samples += 1;
            let tol = 1e-9 * g_xi[i].abs().max(g_eta.abs()).max(1.0);
            if g_xi[i] > g_eta + tol {
                return Ok(WazewskiReport {
                    passed: false,
                    samples,
                    violation: Some(QuasimonotoneViolation {
                        component: i,
                        xi,
                        eta,
                        g_xi: g_xi[i],
                        g_eta,
                    }),
                    note: BOX_NOTE.into(),
                });
            }
        }
    }
    Ok(WazewskiReport {
        passed: true,
        samples,
        violation: None,
        note: BOX_NOTE.into(),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Xi0Options {
    pub t_check: f64,
    pub bisection_steps: usize,
    pub directions: usize,
    pub seed: u64,
    /// Spacing of the times at which `ξ₀` is inspected.
    pub dt: f64,
    /// Asymptotic verdict needs `ξ₀(T) < decay·‖ξ(0)‖∞`.
    pub decay: f64,
}

impl Default for Xi0Options {
    fn default() -> Self {
        Self {
            t_check: 50.0,
            bisection_steps: 40,
            directions: 64,
            seed: 0,
            dt: 0.05,
            decay: 1e-3,
        }
    }
}

/// Unit vectors in the sup norm: the diagonal, the axes, then random.
fn cone_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![vec![1.0; dim]];
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        dirs.push(e);
    }
    while dirs.len() < count {
        let mut d: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let top = rng.gen_range(0..dim);
        d[top] = 1.0;
        dirs.push(d);
    }
    dirs.truncate(count.max(1));
    dirs
}

struct Probe {
    ok: bool,
    sup: f64,
    last: f64,
}

fn probe(sys: &dyn ComparisonSystem, x0: &[f64], eps: f64, times: &[f64]) -> Probe {
    match integrate_until(sys, x0, times, &IntegrateOptions::default(), |_, x| x[0] >= eps) {
        Ok(tr) => Probe {
            ok: !tr.stopped && tr.sup(0) < eps,
            sup: tr.sup(0),
            last: tr.last().map_or(f64::INFINITY, |x| x[0]),
        },
        Err(_) => Probe {
            ok: false,
            sup: f64::INFINITY,
            last: f64::INFINITY,
        },
    }
}

/// Sampled `ξ₀`-stability of the trivial solution in the cone.
///
/// For each `ε`, `δ` is bisected so that every sampled start with
/// `‖ξ(0)‖∞ = δ` keeps `ξ₀ < ε` on `[0, T_check]`.
pub fn check_xi0_stability(
    sys: &dyn ComparisonSystem,
    eps_grid: &[f64],
    opts: &Xi0Options,
) -> Result<StabilityVerdict, ComparisonError> {
    let k = sys.dim();
    let g0 = sys.eval(&vec![0.0; k]);
    let residual = g0.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(residual <= 1e-12) {
        return Err(ComparisonError::NontrivialEquilibrium(residual));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(ComparisonError::BadEpsilonGrid);
    }
    let times = output_grid(opts.t_check, opts.dt)?;
    let dirs = cone_directions(k, opts.directions, opts.seed);

    let mut table = Vec::new();
    let mut samples = 0;
    let mut unstable_at = None;
    let mut asymptotic = true;
    let mut worst_decay: f64 = 0.0;
    for &eps in eps_grid {
        let run = |delta: f64, samples: &mut usize| -> Option<(f64, f64)> {
            let mut sup: f64 = 0.0;
            let mut last: f64 = 0.0;
            for d in &dirs {
                let x0: Vec<f64> = d.iter().map(|c| c * delta).collect();
                *samples += 1;
                let p = probe(sys, &x0, eps, &times);
                if !p.ok {
                    return None;
                }
                sup = sup.max(p.sup);
                last = last.max(p.last);
            }
            Some((sup, last))
        };
        let mut lo = 0.0;
        let mut best = None;
        if let Some(r) = run(eps, &mut samples) {
            lo = eps;
            best = Some(r);
        } else {
            let mut hi = eps;
            for _ in 0..opts.bisection_steps {
                let mid = 0.5 * (lo + hi);
                match run(mid, &mut samples) {
                    Some(r) => {
                        lo = mid;
                        best = Some(r);
                    }
                    None => hi = mid,
                }
            }
        }
        match best {
            Some((sup, last)) => {
                let ratio = last / lo;
                worst_decay = worst_decay.max(ratio);
                if !(ratio < opts.decay) {
                    asymptotic = false;
                }
                table.push(DeltaEntry {
                    epsilon: eps,
                    delta: lo,
                    sup_xi0: sup,
                });
            }
            None => {
                unstable_at.get_or_insert(eps);
                table.push(DeltaEntry {
                    epsilon: eps,
                    delta: 0.0,
                    sup_xi0: f64::INFINITY,
                });
            }
        }
    }

    let kind = match unstable_at {
        Some(_) => StabilityKind::Unstable,
        None if asymptotic => StabilityKind::AsymptoticallyStable,
        None => StabilityKind::Stable,
    };
    let mut verdict = StabilityVerdict::new("xi0_stability", kind)
        .parameter("t_check", opts.t_check)
        .parameter("directions", dirs.len() as f64)
        .parameter("bisection_steps", opts.bisection_steps as f64)
        .margin("worst_decay_ratio", worst_decay)
        .note("sampled evidence over initial directions; not a proof");
    if let Some(eps) = unstable_at {
        verdict = verdict.margin("failing_epsilon", eps);
    }
    verdict.samples = samples;
    verdict.delta_table = table;
    Ok(verdict)
}

/// `(λ, A, T)`-stability: `ξ₀(t; b(λ)·1) < a(A)` on `[0, T]`.
pub fn check_practical(
    sys: &dyn ComparisonSystem,
    lambda: f64,
    a_bound: f64,
    t_end: f64,
    measures: &MeasurePair,
    dt: f64,
) -> Result<StabilityVerdict, ComparisonError> {
    if !(lambda > 0.0 && lambda < a_bound && a_bound.is_finite()) {
        return Err(ComparisonError::BadPracticalBounds { lambda, a_bound });
    }
    let b_lambda = measures.b.eval(lambda);
    let a_a = measures.a.eval(a_bound);
    let x0 = vec![b_lambda; sys.dim()];
    let verdict = StabilityVerdict::new("practical", StabilityKind::Inconclusive)
        .parameter("lambda", lambda)
        .parameter("A", a_bound)
        .parameter("T", t_end)
        .parameter("b_lambda", b_lambda)
        .parameter("a_A", a_a);
    let grid = output_grid(t_end, dt)?;
    let mut verdict = match integrate_at(sys, &x0, &grid, &IntegrateOptions::default()) {
        Ok(tr) => {
            let sup = tr.sup(0);
            let margin = a_a - sup;
            let mut v = verdict
                .parameter("xi0_T", tr.last().map_or(f64::NAN, |x| x[0]))
                .parameter("xi0_sup", sup)
                .margin("a_A_minus_sup_xi0", margin);
            v.kind = if margin > 0.0 {
                StabilityKind::PracticallyStable
            } else {
                StabilityKind::Unstable
            };
            v
        }
        Err(ComparisonError::BlowUp { time, .. }) => {
            let mut v = verdict
                .parameter("escape_time", time)
                .note(format!("comparison solution escaped at t = {time:.6}"));
            v.kind = StabilityKind::Unstable;
            v
        }
        Err(e) => return Err(e),
    };
    verdict.samples = 1;
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub passed: bool,
    pub samples: usize,
    /// Largest `V̇ / V` ratio seen, `V = Σ wᵢξᵢ²`.
    pub worst_ratio: f64,
    pub worst_point: Vec<f64>,
    pub weights: Vec<f64>,
    pub note: String,
}

/// Sampled negative-definiteness of `V̇` for `V = ½Σ wᵢξᵢ²` along `g`.
pub fn lyapunov_quadratic_check(
    sys: &dyn ComparisonSystem,
    weights: &[f64],
    sample_box: &SampleBox,
    n_samples: usize,
    seed: u64,
) -> Result<LyapunovReport, ComparisonError> {
    check_box(sys, sample_box)?;
    if weights.len() != sys.dim() || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(ComparisonError::BadWeights);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    let mut samples = 0;
    for _ in 0..n_samples {
        let xi = sample_box.sample(&mut rng);
        let v: f64 = xi.iter().zip(weights).map(|(x, w)| w * x * x).sum();
        if v == 0.0 {
            continue;
        }
        let g = sys.eval(&xi);
        let dv: f64 = xi.iter().zip(&g).zip(weights).map(|((x, gi), w)| w * x * gi).sum();
        samples += 1;
        if dv / v > worst_ratio {
            worst_ratio = dv / v;
            worst_point = xi;
        }
    }
    Ok(LyapunovReport {
        passed: samples > 0 && worst_ratio < 0.0,
        samples,
        worst_ratio,
        worst_point,
        weights: weights.to_vec(),
        note: BOX_NOTE.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesBound {
    pub name: String,
    pub component: usize,
    /// `max_t (Wᵢ(t) − ξᵢ(t))`.
    pub max_excess: f64,
    pub at_time: f64,
    pub max_abs_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub passed: bool,
    pub tolerance: f64,
    pub max_violation: f64,
    pub series: Vec<SeriesBound>,
    pub clamped: usize,
}

/// Checks `Wᵢ(t) ≤ ξᵢ(t) + tol` at every stored frame, with `ξ(0) = W(0)`.
pub fn bound_check(
    traj: &Trajectory,
    sys: &dyn ComparisonSystem,
    functional_names: &[&str],
    tol: f64,
) -> Result<BoundReport, ComparisonError> {
    if functional_names.len() != sys.dim() {
        return Err(ComparisonError::DimensionMismatch {
            expected: sys.dim(),
            got: functional_names.len(),
        });
    }
    let series = functional_names
        .iter()
        .map(|n| traj.series(n).ok_or_else(|| ComparisonError::UnknownSeries(n.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let xi0 = series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let w = s.first().copied().unwrap_or(0.0);
            if w < -tol {
                Err(ComparisonError::OutsideCone(i))
            } else {
                Ok(w.max(0.0))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sol = integrate_at(sys, &xi0, &traj.times, &IntegrateOptions::default())?;

    let mut out = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for (i, (name, s)) in functional_names.iter().zip(&series).enumerate() {
        let mut b = SeriesBound {
            name: name.to_string(),
            component: i,
            max_excess: f64::NEG_INFINITY,
            at_time: 0.0,
            max_abs_gap: 0.0,
        };
        for ((t, w), x) in traj.times.iter().zip(s.iter()).zip(&sol.states) {
            let excess = w - x[i];
            b.max_abs_gap = b.max_abs_gap.max(excess.abs());
            if excess > b.max_excess {
                b.max_excess = excess;
                b.at_time = *t;
            }
        }
        max_violation = max_violation.max(b.max_excess);
        out.push(b);
    }
    Ok(BoundReport {
        passed: max_violation <= tol,
        tolerance: tol,
        max_violation,
        series: out,
        clamped: sol.clamped,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::comparison::{FnSystem, LinearComparison, MixedChain, NilpotentPair, PracticalPair};
    use crate::functions::{Constant, Rational};

    fn pair(phi: f64, psi: f64) -> NilpotentPair {
        NilpotentPair {
            phi: Arc::new(Constant(phi)),
            psi: Arc::new(Constant(psi)),
        }
    }

    #[test]
    fn wazewski_examples() {
        let sb = SampleBox::cube(2, 0.0, 10.0);
        let p = PracticalPair { trace: 0.0, abs_det: 1.0 };
        assert!(check_wazewski(&p, &sb, 500, 1).unwrap().passed);
        let e52 = NilpotentPair {
            phi: Arc::new(Rational::reciprocal_shift()),
            psi: Arc::new(Constant(0.5)),
        };
        assert!(check_wazewski(&e52, &sb, 500, 1).unwrap().passed);
        let bad = LinearComparison::new(vec![vec![0.0, -1.0], vec![0.0, 0.0]]);
        let r = check_wazewski(&bad, &sb, 500, 1).unwrap();
        assert!(!r.passed);
        let v = r.violation.unwrap();
        assert_eq!(v.component, 0);
        assert!(v.g_xi > v.g_eta);
    }

    #[test]
    fn xi0_verdicts() {
        let eps = [0.1, 1.0];
        let opts = Xi0Options {
            directions: 16,
            ..Default::default()
        };
        let v = check_xi0_stability(&pair(1.0, 0.5), &eps, &opts).unwrap();
        assert_eq!(v.kind, StabilityKind::AsymptoticallyStable);
        assert!(v.delta_table.iter().all(|d| d.delta > 0.0));

        let v = check_xi0_stability(&PracticalPair { trace: 0.0, abs_det: 1.0 }, &eps, &opts).unwrap();
        assert_eq!(v.kind, StabilityKind::Unstable);

        let still = FnSystem::scalar("still", |_| 0.0);
        let v = check_xi0_stability(&still, &eps, &opts).unwrap();
        assert_eq!(v.kind, StabilityKind::Stable);
        assert!((v.delta_table[0].delta - 0.1).abs() < 1e-9);

        let shifted = FnSystem::scalar("shifted", |x| 1.0 - x);
        assert!(matches!(
            check_xi0_stability(&shifted, &eps, &opts),
            Err(ComparisonError::NontrivialEquilibrium(_))
        ));
    }

    #[test]
    fn practical_on_swap_operator() {
        let p = PracticalPair { trace: 0.0, abs_det: 1.0 };
        let v = check_practical(&p, 1.0, 100.0, 1.0, &MeasurePair::volume(), 0.01).unwrap();
        assert_eq!(v.kind, StabilityKind::PracticallyStable);
        let x = v.parameters["xi0_T"];
        assert!((x - (2f64.cosh() + 2f64.sinh())).abs() < 1e-8);
        let v0 = check_practical(&p, 1.0, 100.0, 0.0, &MeasurePair::volume(), 0.01).unwrap();
        assert!((v0.margins["a_A_minus_sup_xi0"] - 99.0).abs() < 1e-12);
        assert!(check_practical(&p, 2.0, 1.0, 1.0, &MeasurePair::volume(), 0.01).is_err());
    }

    #[test]
    fn practical_is_monotone_in_lambda() {
        let p = PracticalPair { trace: 1.0, abs_det: 0.5 };
        let mut failed = false;
        for k in 1..40 {
            let lambda = 0.25 * k as f64;
            let v = check_practical(&p, lambda, 50.0, 1.5, &MeasurePair::volume(), 0.05).unwrap();
            if failed {
                assert_eq!(v.kind, StabilityKind::Unstable);
            }
            failed |= v.kind == StabilityKind::Unstable;
        }
        assert!(failed);
    }

    #[test]
    fn lyapunov_trivial_and_chain() {
        let sb = SampleBox::cube(2, 1e-3, 10.0);
        let r = lyapunov_quadratic_check(&pair(1.0, 0.0), &[1.0, 3.0], &sb, 2000, 7).unwrap();
        assert!(r.passed);
        assert!((r.worst_ratio + 2.0).abs() < 1e-12);

        let chain = |psi| MixedChain {
            phi: Arc::new(Constant(1.0)),
            psi: Arc::new(Constant(psi)),
            k: 2,
        };
        let sb = SampleBox::cube(2, 1e-3, 10.0);
        assert!(lyapunov_quadratic_check(&chain(0.9), &[1.0, 1.0], &sb, 5000, 3).unwrap().passed);
        assert!(!lyapunov_quadratic_check(&chain(1.1), &[1.0, 1.0], &sb, 5000, 3).unwrap().passed);
    }

    #[test]
    fn bound_check_constant_case() {
        use crate::convex::make_square;
        let mut tr = Trajectory::default();
        for k in 0..5 {
            tr.push(k as f64 * 0.25, make_square(1.0, 64).unwrap());
        }
        let still = LinearComparison::new(vec![vec![0.0]]);
        let r = bound_check(&tr, &still, &["V"], 1e-12).unwrap();
        assert!(r.passed);
        assert!(r.max_violation.abs() < 1e-12);
        assert!(bound_check(&tr, &still, &["W7"], 1e-12).is_err());
    }
}
