// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use setflow_cli::builtins::{self, BUILTINS};
use setflow_cli::error::{CliError, EXIT_BLOWUP, EXIT_FAILED_CHECK, EXIT_SCHEMA};
use setflow_cli::geom::{self, DEFAULT_GEOM_GRID};
use setflow_cli::runner::{self, Status};
use setflow_cli::{Registry, Scenario};

#[derive(Parser)]
#[command(name = "setflow", version, about = "Set semiflows on planar convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files or built-in scenarios by name.
    Run {
        #[arg(required = true)]
        scenarios: Vec<String>,
        /// Run up to N scenarios at once.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for artifacts; defaults to the scenario file's directory,
        /// or the working directory for built-ins.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a geometry operation on body expressions.
    Geom {
        /// area | perimeter | mixed | hausdorff | hukuhara
        op: String,
        bodies: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_GEOM_GRID)]
        grid: usize,
    },
    /// List the built-in examples.
    List,
    /// Print a built-in scenario file.
    Show { name: String },
}

fn resolve(arg: &str, out: Option<&Path>) -> Result<(Scenario, PathBuf), CliError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(s) = builtins::scenario(arg) {
            return Ok((s?, out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))));
        }
    }
    let scenario = runner::load(path)?;
    let dir = match out {
        Some(o) => o.to_path_buf(),
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    Ok((scenario, dir))
}

fn run_one(arg: &str, out: Option<&Path>, registry: &Registry) -> (i32, String) {
    let result = resolve(arg, out).and_then(|(s, dir)| runner::run(&s, registry, &dir));
    match result {
        Ok(a) => {
            let mut line = format!(
                "{}: {} ({} frames) -> {}, {}",
                a.report.scenario,
                match a.report.status {
                    Status::Passed => "pass",
                    Status::Failed => "FAIL",
                    Status::BlowUp => "BLOW-UP",
                },
                a.report.frames,
                a.csv_path.display(),
                a.json_path.display()
            );
            for c in a.report.checks.iter().filter(|c| !c.passed) {
                line.push_str(&format!("\n  failed check {}: {}", c.check, c.verdict));
            }
            if let Some(d) = &a.report.diagnostic {
                line.push_str(&format!("\n  {d}"));
            }
            (a.report.exit_code(), line)
        }
        Err(e) => (e.exit_code(), format!("{arg}: error: {e}")),
    }
}

/// Worst exit code: schema errors, then blow-up, then failed checks.
fn combine(codes: &[i32]) -> i32 {
    for c in [EXIT_SCHEMA, EXIT_BLOWUP, EXIT_FAILED_CHECK] {
        if codes.contains(&c) {
            return c;
        }
    }
    0
}

fn run_all(scenarios: &[String], jobs: usize, out: Option<&Path>) -> i32 {
    let registry = Registry::with_defaults();
    let results: Mutex<Vec<Option<(i32, String)>>> = Mutex::new(vec![None; scenarios.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, scenarios.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(arg) = scenarios.get(i) else { break };
                let r = run_one(arg, out, &registry);
                results.lock().expect("results lock")[i] = Some(r);
            });
        }
    });
    let results = results.into_inner().expect("results lock");
    let mut codes = Vec::new();
    for (code, line) in results.into_iter().flatten() {
        if code == 0 {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        codes.push(code);
    }
    combine(&codes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { scenarios, jobs, out } => run_all(&scenarios, jobs, out.as_deref()),
        Command::Geom { op, bodies, grid } => match geom::run(&op, &bodies, grid) {
            Ok(line) => {
                println!("{line}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::List => {
            for b in BUILTINS {
                let names: Vec<&str> = b.variants.iter().map(|(n, _)| *n).collect();
                println!("{:<6} {} [run: {}]", b.name, b.summary, names.join(", "));
            }
            0
        }
        Command::Show { name } => match builtins::source(&name) {
            Some(text) => {
                print!("{text}");
                0
            }
            None => {
                eprintln!("error: no built-in scenario `{name}`");
                EXIT_SCHEMA
            }
        },
    };
    ExitCode::from(code as u8)
}
