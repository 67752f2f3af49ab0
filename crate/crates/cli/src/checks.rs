// SPDX-License-Identifier: Apache-2.0

//! Checks run against a finished orbit.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use setflow_core::certificates::{
    cubic_lambda_star, default_probe_grid, example51_fixed_point, example54_practical, example55_instability,
    global_existence_report, linearize, linearized_stability, GlobalBounds,
};
use setflow_core::comparison::{
    bound_check, check_practical, check_wazewski, check_xi0_stability, integrate_at, lyapunov_quadratic_check,
    ComparisonSystem, IntegrateOptions, MeasurePair, MixedChain, SampleBox, StabilityKind, Xi0Options,
};
use setflow_core::convex::{
    area, hausdorff_distance, linear_image, make_segment, mixed_area, LinearOperator2D, SupportFunction2D,
};
use setflow_core::functions::{Constant, SharedFn};
use setflow_core::semiflow::{evolve, mixed_functionals, SemiflowParams, Trajectory};

use crate::error::CliError;
use crate::registry::{Context, Params, Registry, Table};
use crate::scenario::Scenario;

/// Everything a check may look at once the orbit has been computed.
pub struct RunContext<'a> {
    pub scenario: &'a Scenario,
    pub params: &'a SemiflowParams,
    pub u0: &'a SupportFunction2D,
    pub trajectory: &'a Trajectory,
    pub registry: &'a Registry,
}

impl RunContext<'_> {
    pub fn seed(&self) -> u64 {
        self.scenario.seed
    }

    fn builder_context(&self) -> Context<'_> {
        self.registry.context(self.scenario.grid_size)
    }

    /// `ψ` of a ball source, rebuilt from the scenario file.
    fn ball_psi(&self) -> Result<SharedFn, CliError> {
        let spec = &self.scenario.params.source;
        if spec.name != "ball" {
            return Err(CliError::schema(format!("this certificate needs a `ball` source, got `{}`", spec.name)));
        }
        let cx = self.builder_context();
        let psi = spec
            .params
            .get("psi")
            .ok_or_else(|| CliError::schema("source `ball`: missing parameter `psi`"))?;
        let psi = serde_json::from_value(psi.clone()).map_err(|e| CliError::schema(format!("source `ball`: {e}")))?;
        self.registry.functions.build(&psi, &cx)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub verdict: String,
    pub details: Value,
}

impl CheckOutcome {
    fn new(check: &str, passed: bool, verdict: impl Into<String>, details: impl Serialize) -> Self {
        Self {
            check: check.into(),
            passed,
            verdict: verdict.into(),
            details: serde_json::to_value(details).unwrap_or(Value::Null),
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError>;
}

fn kind_name(kind: StabilityKind) -> String {
    match serde_json::to_value(kind) {
        Ok(Value::String(s)) => s,
        _ => format!("{kind:?}"),
    }
}

/// Verdict a check is expected to reach; `stable_side` accepts any of the
/// stable kinds.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Expect {
    StableSide,
    Exactly(StabilityKind),
}

impl Expect {
    fn parse(p: &Params<'_>, default: &str) -> Result<Self, CliError> {
        let s = p.string_or("expect", default)?;
        Ok(match s.as_str() {
            "stable_side" => Self::StableSide,
            "stable" => Self::Exactly(StabilityKind::Stable),
            "asymptotically_stable" => Self::Exactly(StabilityKind::AsymptoticallyStable),
            "practically_stable" => Self::Exactly(StabilityKind::PracticallyStable),
            "unstable" => Self::Exactly(StabilityKind::Unstable),
            "inconclusive" => Self::Exactly(StabilityKind::Inconclusive),
            other => return Err(p.err(format!("unknown expectation `{other}`"))),
        })
    }

    fn matches(self, kind: StabilityKind) -> bool {
        match self {
            Self::StableSide => kind.is_stable_side(),
            Self::Exactly(k) => k == kind,
        }
    }
}

fn sample_box(p: &Params<'_>, dim: usize, lo: f64, hi: f64) -> Result<SampleBox, CliError> {
    let side = |key: &str, default: f64| -> Result<Vec<f64>, CliError> {
        match p.get(key) {
            Some(Value::Array(_)) => p.f64_list(key),
            Some(_) => Ok(vec![p.f64(key)?; dim]),
            None => Ok(vec![default; dim]),
        }
    };
    let b = SampleBox::new(side("lo", lo)?, side("hi", hi)?).map_err(|e| p.err(e))?;
    if b.dim() != dim {
        return Err(p.err(format!("box has dimension {}, system has {dim}", b.dim())));
    }
    Ok(b)
}

fn xi0_options(p: &Params<'_>) -> Result<Xi0Options, CliError> {
    let d = Xi0Options::default();
    Ok(Xi0Options {
        t_check: p.f64_or("t_check", d.t_check)?,
        bisection_steps: p.usize_or("bisection_steps", d.bisection_steps)?,
        directions: p.usize_or("directions", d.directions)?,
        seed: d.seed,
        dt: p.f64_or("check_dt", d.dt)?,
        decay: p.f64_or("decay", d.decay)?,
    })
}

struct BoundCheck {
    system: Arc<dyn ComparisonSystem>,
    series: Vec<String>,
    tol: f64,
}

impl Check for BoundCheck {
    fn name(&self) -> &'static str {
        "bound_check"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let names: Vec<&str> = self.series.iter().map(String::as_str).collect();
        let r = bound_check(cx.trajectory, self.system.as_ref(), &names, self.tol)?;
        let verdict = if r.passed { "dominated" } else { "violated" };
        Ok(CheckOutcome::new(self.name(), r.passed, verdict, &r))
    }
}

struct Practical {
    system: Arc<dyn ComparisonSystem>,
    lambda: f64,
    a: f64,
    t: f64,
    dt: f64,
    orbit_series: Vec<String>,
    tol: f64,
    expect: Expect,
}

impl Check for Practical {
    fn name(&self) -> &'static str {
        "practical"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let v = check_practical(self.system.as_ref(), self.lambda, self.a, self.t, &MeasurePair::volume(), self.dt)?;
        let mut orbit = Value::Null;
        let mut orbit_ok = true;
        if !self.orbit_series.is_empty() {
            let k = self.system.dim();
            if self.orbit_series.len() != k {
                return Err(CliError::schema(format!(
                    "check `practical`: {} orbit series for a {k}-dimensional system",
                    self.orbit_series.len()
                )));
            }
            let times: Vec<f64> = cx.trajectory.times.iter().copied().filter(|t| *t <= self.t + 1e-12).collect();
            let xi = integrate_at(self.system.as_ref(), &vec![self.lambda; k], &times, &IntegrateOptions::default())?;
            let mut worst = f64::NEG_INFINITY;
            for (i, name) in self.orbit_series.iter().enumerate() {
                let w = cx
                    .trajectory
                    .series(name)
                    .ok_or_else(|| CliError::schema(format!("check `practical`: no series `{name}`")))?;
                for (j, x) in xi.states.iter().enumerate() {
                    let scale = x[i].abs().max(1.0);
                    worst = worst.max((w[j] - x[i]) / scale);
                }
            }
            orbit_ok = worst <= self.tol;
            orbit = json!({"series": self.orbit_series, "max_relative_excess": worst, "tolerance": self.tol, "passed": orbit_ok});
        }
        let passed = self.expect.matches(v.kind) && orbit_ok;
        Ok(CheckOutcome::new(
            self.name(),
            passed,
            kind_name(v.kind),
            json!({"verdict": v, "orbit": orbit}),
        ))
    }
}

struct Xi0 {
    system: Arc<dyn ComparisonSystem>,
    eps: Vec<f64>,
    opts: Xi0Options,
    expect: Expect,
}

impl Check for Xi0 {
    fn name(&self) -> &'static str {
        "xi0_stability"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let opts = Xi0Options {
            seed: cx.seed(),
            ..self.opts
        };
        let v = check_xi0_stability(self.system.as_ref(), &self.eps, &opts)?;
        Ok(CheckOutcome::new(self.name(), self.expect.matches(v.kind), kind_name(v.kind), &v))
    }
}

struct Wazewski {
    system: Arc<dyn ComparisonSystem>,
    sample_box: SampleBox,
    samples: usize,
}

impl Check for Wazewski {
    fn name(&self) -> &'static str {
        "wazewski"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let r = check_wazewski(self.system.as_ref(), &self.sample_box, self.samples, cx.seed())?;
        let verdict = if r.passed { "quasimonotone" } else { "not quasimonotone" };
        Ok(CheckOutcome::new(self.name(), r.passed, verdict, &r))
    }
}

struct Lyapunov {
    system: Arc<dyn ComparisonSystem>,
    weights: Vec<f64>,
    sample_box: SampleBox,
    samples: usize,
    expect_pass: bool,
}

impl Check for Lyapunov {
    fn name(&self) -> &'static str {
        "lyapunov"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let r = lyapunov_quadratic_check(self.system.as_ref(), &self.weights, &self.sample_box, self.samples, cx.seed())?;
        let verdict = if r.passed { "decreasing" } else { "not decreasing" };
        Ok(CheckOutcome::new(self.name(), r.passed == self.expect_pass, verdict, &r))
    }
}

struct FixedPoint {
    n: u32,
    fd_step: f64,
    gamma_tol: f64,
    converge_tol: f64,
    expect: Expect,
}

impl Check for FixedPoint {
    fn name(&self) -> &'static str {
        "fixed_point"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let psi = cx.ball_psi()?;
        let report = example51_fixed_point(cx.params.phi.as_ref(), psi.as_ref(), self.n, cx.scenario.grid_size)?;
        let mut passed = self.expect.matches(report.kind);
        let mut details = json!({"fixed_point": &report});
        if let Some(u_star) = &report.u_star {
            let lin = linearize(u_star, cx.params, self.fd_step)?;
            let opts = Xi0Options {
                seed: cx.seed(),
                ..Default::default()
            };
            let omega = linearized_stability(&lin, &opts)?;
            let gamma_gap = (lin.gamma0 - report.gamma0).abs();
            let distance = match cx.trajectory.last() {
                Some(u) => hausdorff_distance(u, u_star)?,
                None => f64::INFINITY,
            };
            passed &= gamma_gap <= self.gamma_tol;
            if report.kind.is_stable_side() {
                passed &= lin.stable && distance < self.converge_tol;
            }
            details = json!({
                "fixed_point": &report,
                "linearization": &lin,
                "linearized_stability": &omega,
                "gamma0_gap": gamma_gap,
                "final_distance_to_fixed_point": distance,
                "converge_tolerance": self.converge_tol,
            });
        }
        Ok(CheckOutcome::new(self.name(), passed, kind_name(report.kind), details))
    }
}

struct Example54 {
    b: LinearOperator2D,
    lambda: f64,
    a: f64,
    t: f64,
    expect: Expect,
}

impl Check for Example54 {
    fn name(&self) -> &'static str {
        "practical_certificate"
    }

    fn run(&self, _: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let r = example54_practical(&self.b, self.lambda, self.a, self.t)?;
        Ok(CheckOutcome::new(self.name(), self.expect.matches(r.kind), kind_name(r.kind), &r))
    }
}

struct Example55 {
    grid: Vec<f64>,
    expect: Expect,
}

impl Check for Example55 {
    fn name(&self) -> &'static str {
        "ball_source_instability"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let psi = cx.ball_psi()?;
        let v = example55_instability(cx.params.phi.as_ref(), psi.as_ref(), cx.params.a.trace(), &self.grid)?;
        Ok(CheckOutcome::new(self.name(), self.expect.matches(v.kind), kind_name(v.kind), &v))
    }
}

struct CubicRoot {
    below: f64,
    above: f64,
    sample_box: SampleBox,
    samples: usize,
}

impl Check for CubicRoot {
    fn name(&self) -> &'static str {
        "cubic_root"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let l = cubic_lambda_star();
        let residual = 3.0 * l.powi(3) + 14.0 * l * l - 16.0;
        let probe = |fraction: f64| {
            let sys = MixedChain {
                phi: Arc::new(Constant(1.0)),
                psi: Arc::new(Constant(fraction * l)),
                k: 3,
            };
            lyapunov_quadratic_check(&sys, &[1.0; 3], &self.sample_box, self.samples, cx.seed())
        };
        let below = probe(self.below)?;
        let above = probe(self.above)?;
        let passed = l > 0.9 && l < 1.0 && residual.abs() < 1e-9 && below.passed && !above.passed;
        let details = json!({
            "lambda_star": l,
            "residual": residual,
            "below": {"ratio": self.below, "report": below},
            "above": {"ratio": self.above, "report": above},
        });
        Ok(CheckOutcome::new(self.name(), passed, format!("lambda* = {l}"), details))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum AreaFormula {
    /// Two-term formula with `S[u, Bu]`.
    Pair,
    /// Four-term formula for `B⁴ = I` with the secular `t e⁻²ᵗ` term.
    Quad,
}

struct ClosedFormArea {
    formula: AreaFormula,
    b: LinearOperator2D,
    rtol: f64,
}

impl Check for ClosedFormArea {
    fn name(&self) -> &'static str {
        "closed_form_area"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let u0 = cx.u0;
        let exact: Box<dyn Fn(f64) -> f64> = match self.formula {
            AreaFormula::Pair => {
                let s = area(u0);
                let sb = mixed_area(u0, &linear_image(u0, &self.b)?)?;
                Box::new(move |t: f64| 0.5 * (-t).exp() * (s + sb) + 0.5 * (-3.0 * t).exp() * (s - sb))
            }
            AreaFormula::Quad => {
                let w = mixed_functionals(u0, &self.b, 4)?;
                Box::new(move |t: f64| {
                    0.125 * (-t).exp() * (2.0 * w[0] + 3.0 * w[1] + 2.0 * w[2] + w[3])
                        + 0.125 * (-3.0 * t).exp() * (2.0 * w[0] - 3.0 * w[1] + 2.0 * w[2] - w[3])
                        + 0.5 * (-2.0 * t).exp() * (w[0] - w[2])
                        + 0.25 * t * (-2.0 * t).exp() * (w[1] - w[3])
                })
            }
        };
        let v = cx.trajectory.series("V").unwrap_or_default();
        let mut worst: f64 = 0.0;
        let mut at = 0.0;
        for (t, a) in cx.trajectory.times.iter().zip(v) {
            let e = exact(*t);
            let rel = ((a - e) / e).abs();
            if !(rel <= worst) {
                worst = rel;
                at = *t;
            }
        }
        let passed = worst <= self.rtol;
        let details = json!({
            "formula": match self.formula { AreaFormula::Pair => "pair", AreaFormula::Quad => "quad" },
            "max_relative_error": worst,
            "at_time": at,
            "tolerance": self.rtol,
            "assumes": "A = -I, phi = 1, psi = 1/2",
        });
        Ok(CheckOutcome::new(self.name(), passed, if passed { "match" } else { "mismatch" }, details))
    }
}

struct SegmentScaling {
    lengths: Vec<f64>,
    t: f64,
    rtol: f64,
    ratio_tol: f64,
}

impl Check for SegmentScaling {
    fn name(&self) -> &'static str {
        "segment_scaling"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let c = 0.25 * ((-self.t).exp() - (-3.0 * self.t).exp());
        let mut rows = Vec::new();
        let mut passed = true;
        let mut prev: Option<(f64, f64)> = None;
        for &n in &self.lengths {
            let tr = evolve(&make_segment(n, cx.scenario.grid_size)?, cx.params, self.t, cx.scenario.dt)?;
            let s = tr.series("V").and_then(|v| v.last().copied()).unwrap_or(f64::NAN);
            let expected = c * n * n;
            let rel = (s - expected) / expected;
            passed &= rel.abs() <= self.rtol;
            let ratio = prev.map(|(pn, ps)| (s / ps, (n / pn).powi(2)));
            if let Some((r, target)) = ratio {
                passed &= (r - target).abs() <= self.ratio_tol;
            }
            rows.push(json!({"length": n, "area": s, "expected": expected, "relative_error": rel,
                             "ratio_to_previous": ratio.map(|r| r.0)}));
            prev = Some((n, s));
        }
        let details = json!({"t": self.t, "rows": rows, "tolerance": self.rtol, "ratio_tolerance": self.ratio_tol});
        Ok(CheckOutcome::new(self.name(), passed, "unstable in measures (S,S)", details))
    }
}

struct GlobalExistence {
    bounds: GlobalBounds,
}

impl Check for GlobalExistence {
    fn name(&self) -> &'static str {
        "global_existence"
    }

    fn run(&self, cx: &RunContext<'_>) -> Result<CheckOutcome, CliError> {
        let r = global_existence_report(cx.params, &self.bounds, cx.u0, cx.scenario.horizon, cx.scenario.dt)?;
        let passed = r.finite && r.orbit.as_ref().is_none_or(|o| o.passed);
        let verdict = if r.finite { "bounded on horizon" } else { "comparison solution escapes" };
        Ok(CheckOutcome::new(self.name(), passed, verdict, &r))
    }
}

fn chain_box(p: &Params<'_>, sys: &dyn ComparisonSystem) -> Result<SampleBox, CliError> {
    sample_box(p, sys.dim(), 0.0, 10.0)
}

pub(crate) fn register(t: &mut Table<dyn Check>) {
    t.register("bound_check", "W_i <= xi_i along the orbit; params: system, series, tol", |p: &Params, cx: &Context| {
        Ok(Arc::new(BoundCheck {
            system: p.system("system", cx)?,
            series: p.strings("series")?,
            tol: p.f64_or("tol", 1e-4)?,
        }) as Arc<dyn Check>)
    });
    t.register(
        "practical",
        "(lambda, A, T) practical stability; params: system, lambda, a, t, dt, orbit_series, tol, expect",
        |p: &Params, cx: &Context| {
            let t = p.f64("t")?;
            Ok(Arc::new(Practical {
                system: p.system("system", cx)?,
                lambda: p.f64("lambda")?,
                a: p.f64("a")?,
                t,
                dt: p.f64_or("dt", t / 1000.0)?,
                orbit_series: match p.get("orbit_series") {
                    Some(_) => p.strings("orbit_series")?,
                    None => Vec::new(),
                },
                tol: p.f64_or("tol", 1e-6)?,
                expect: Expect::parse(p, "stable_side")?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "xi0_stability",
        "sampled stability of xi = 0; params: system, eps, t_check, directions, expect",
        |p: &Params, cx: &Context| {
            Ok(Arc::new(Xi0 {
                system: p.system("system", cx)?,
                eps: p.f64_list_or("eps", &[1e-2, 1e-1, 1.0])?,
                opts: xi0_options(p)?,
                expect: Expect::parse(p, "stable_side")?,
            }) as Arc<dyn Check>)
        },
    );
    t.register("wazewski", "sampled quasimonotonicity; params: system, lo, hi, samples", |p: &Params, cx: &Context| {
        let system = p.system("system", cx)?;
        Ok(Arc::new(Wazewski {
            sample_box: chain_box(p, system.as_ref())?,
            samples: p.usize_or("samples", 1000)?,
            system,
        }) as Arc<dyn Check>)
    });
    t.register(
        "lyapunov",
        "sampled decrease of a weighted quadratic; params: system, weights, lo, hi, samples, expect_pass",
        |p: &Params, cx: &Context| {
            let system = p.system("system", cx)?;
            Ok(Arc::new(Lyapunov {
                weights: p.f64_list_or("weights", &vec![1.0; system.dim()])?,
                sample_box: chain_box(p, system.as_ref())?,
                samples: p.usize_or("samples", 10_000)?,
                expect_pass: p.bool_or("expect_pass", true)?,
                system,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "fixed_point",
        "ball fixed point, linearization and convergence; params: n, fd_step, gamma_tol, converge_tol, expect",
        |p: &Params, _: &Context| {
            let n = p.usize_or("n", 2)?;
            Ok(Arc::new(FixedPoint {
                n: u32::try_from(n).map_err(|_| p.err("dimension too large"))?,
                fd_step: p.f64_or("fd_step", 1e-4)?,
                gamma_tol: p.f64_or("gamma_tol", 1e-3)?,
                converge_tol: p.f64_or("converge_tol", 1e-2)?,
                expect: Expect::parse(p, "stable_side")?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "practical_certificate",
        "closed-form practical criterion next to direct integration; params: b, lambda, a, t, expect",
        |p: &Params, _: &Context| {
            Ok(Arc::new(Example54 {
                b: p.operator("b")?,
                lambda: p.f64("lambda")?,
                a: p.f64("a")?,
                t: p.f64("t")?,
                expect: Expect::parse(p, "stable_side")?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "ball_source_instability",
        "liminf criterion for (V, V) instability; params: grid, expect",
        |p: &Params, _: &Context| {
            Ok(Arc::new(Example55 {
                grid: p.f64_list_or("grid", &default_probe_grid())?,
                expect: Expect::parse(p, "unstable")?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "cubic_root",
        "root of 3l^3 + 14l^2 - 16 and the Lyapunov test on either side; params: below, above, lo, hi, samples",
        |p: &Params, _: &Context| {
            Ok(Arc::new(CubicRoot {
                below: p.f64_or("below", 0.9)?,
                above: p.f64_or("above", 1.1)?,
                sample_box: sample_box(p, 3, 1e-3, 10.0)?,
                samples: p.usize_or("samples", 20_000)?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "closed_form_area",
        "area against the closed form for A = -I, phi = 1, psi = 1/2; params: formula (pair|quad), b, rtol",
        |p: &Params, _: &Context| {
            let formula = match p.string_or("formula", "pair")?.as_str() {
                "pair" => AreaFormula::Pair,
                "quad" => AreaFormula::Quad,
                other => return Err(p.err(format!("unknown formula `{other}`"))),
            };
            Ok(Arc::new(ClosedFormArea {
                formula,
                b: p.operator("b")?,
                rtol: p.f64_or("rtol", 1e-3)?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "segment_scaling",
        "area of evolved segments against (e^-t - e^-3t)N^2/4; params: lengths, t, rtol, ratio_tol",
        |p: &Params, _: &Context| {
            let lengths = p.f64_list_or("lengths", &[4.0, 8.0, 16.0])?;
            if lengths.iter().any(|n| !(*n > 0.0)) {
                return Err(p.err("lengths must be positive"));
            }
            Ok(Arc::new(SegmentScaling {
                lengths,
                t: p.f64_or("t", 1.0)?,
                rtol: p.f64_or("rtol", 1e-2)?,
                ratio_tol: p.f64_or("ratio_tol", 0.05)?,
            }) as Arc<dyn Check>)
        },
    );
    t.register(
        "global_existence",
        "comparison envelopes for volume and norm; params: g_upper, g_lower, f_plus",
        |p: &Params, cx: &Context| {
            Ok(Arc::new(GlobalExistence {
                bounds: GlobalBounds {
                    g_upper: p.function("g_upper", cx)?,
                    g_lower: p.function("g_lower", cx)?,
                    f_plus: p.function("f_plus", cx)?,
                },
            }) as Arc<dyn Check>)
        },
    );
}
