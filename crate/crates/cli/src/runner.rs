// SPDX-License-Identifier: Apache-2.0

//! Scenario execution and artifact writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use setflow_core::semiflow::{evolve_with, EvolveOptions, SemiflowError, Trajectory};

use crate::checks::{CheckOutcome, RunContext};
use crate::error::{CliError, EXIT_BLOWUP, EXIT_FAILED_CHECK};
use crate::format::g12;
use crate::registry::Registry;
use crate::scenario::{Scenario, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    BlowUp,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: String,
    pub description: String,
    pub seed: u64,
    pub grid_size: usize,
    pub horizon: f64,
    pub dt: f64,
    pub status: Status,
    pub frames: usize,
    pub final_time: f64,
    pub csv: String,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Passed => 0,
            Status::Failed => EXIT_FAILED_CHECK,
            Status::BlowUp => EXIT_BLOWUP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Artifacts {
    pub report: Report,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

/// Trajectory as CSV: `t` then every tracked series in name order.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let names: Vec<&String> = traj.tracked.keys().collect();
    let mut out = String::from("t");
    for n in &names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (i, t) in traj.times.iter().enumerate() {
        out.push_str(&g12(*t));
        for n in &names {
            out.push(',');
            out.push_str(&g12(traj.tracked[*n][i]));
        }
        out.push('\n');
    }
    out
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Evolves the scenario, runs its checks and writes both artifacts under
/// `out_dir`. Schema and I/O problems are errors; blow-up and failed checks
/// are reported through [`Report::status`].
pub fn run(scenario: &Scenario, registry: &Registry, out_dir: &Path) -> Result<Artifacts, CliError> {
    scenario.validate()?;
    let m = scenario.grid_size;
    let u0 = scenario.initial_body.build(m)?;
    let params = registry.semiflow_params(&scenario.params, m)?;
    let cx = registry.context(m);
    let functionals = scenario
        .functionals
        .iter()
        .map(|c| registry.functionals.build(c, &cx))
        .collect::<Result<Vec<_>, _>>()?;
    let checks = scenario
        .checks
        .iter()
        .map(|c| registry.checks.build(c, &cx))
        .collect::<Result<Vec<_>, _>>()?;

    let csv_name = scenario.outputs.csv.clone().unwrap_or_else(|| format!("{}.csv", scenario.name));
    let json_name = scenario.outputs.json.clone().unwrap_or_else(|| format!("{}.json", scenario.name));
    let csv_path = out_dir.join(&csv_name);
    let json_path = out_dir.join(&json_name);

    let opts = EvolveOptions {
        store_every: scenario.store_every,
        ..Default::default()
    };
    let mut report = Report {
        schema: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        description: scenario.description.clone(),
        seed: scenario.seed,
        grid_size: m,
        horizon: scenario.horizon,
        dt: scenario.dt,
        status: Status::Passed,
        frames: 0,
        final_time: 0.0,
        csv: csv_name,
        checks: Vec::new(),
        diagnostic: None,
    };

    let (mut traj, blowup) = match evolve_with(&u0, &params, scenario.horizon, scenario.dt, &opts) {
        Ok(t) => (t, None),
        Err(SemiflowError::BlowUp { time, guard, trajectory }) => {
            (*trajectory, Some(format!("norm exceeded {} at t = {}", g12(guard), g12(time))))
        }
        Err(e) => return Err(e.into()),
    };
    for f in &functionals {
        traj.track(f.as_ref())?;
    }
    report.frames = traj.len();
    report.final_time = traj.times.last().copied().unwrap_or(0.0);

    if let Some(msg) = blowup {
        report.status = Status::BlowUp;
        report.diagnostic = Some(msg);
    } else {
        let run_cx = RunContext {
            scenario,
            params: &params,
            u0: &u0,
            trajectory: &traj,
            registry,
        };
        for check in &checks {
            match check.run(&run_cx) {
                Ok(outcome) => report.checks.push(outcome),
                Err(e) if e.is_blowup() => {
                    report.status = Status::BlowUp;
                    report.diagnostic = Some(format!("check `{}`: {e}", check.name()));
                    break;
                }
                Err(CliError::Schema(msg)) => return Err(CliError::Schema(msg)),
                Err(e) => report.checks.push(CheckOutcome {
                    check: check.name().into(),
                    passed: false,
                    verdict: "error".into(),
                    details: serde_json::Value::String(e.to_string()),
                }),
            }
        }
        if report.status == Status::Passed && report.checks.iter().any(|c| !c.passed) {
            report.status = Status::Failed;
        }
    }

    write(&csv_path, &trajectory_csv(&traj))?;
    write(&json_path, &report_json(&report))?;
    Ok(Artifacts {
        report,
        csv_path,
        json_path,
    })
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Scenario::from_json(&text)
}
