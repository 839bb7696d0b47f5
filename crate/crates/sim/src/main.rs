// Copyright 2026 The Emblem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use emblem_sim::scenario::Hitl;
use emblem_sim::serve::{self, ServeOptions};
use emblem_sim::sim::SEED_ENV;
use emblem_sim::{load_scenario, resolve_seed, schema_json, to_canonical_json, MetricsReport, ReportFormat, RunResult, Simulation};

const EXIT_LOAD: u8 = 2;
const EXIT_SAFETY: u8 = 3;

#[derive(Parser)]
#[command(name = "emblem-sim", version, about = "Run protective-emblem engagement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and print its metrics report.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario seed and the EMBLEM_SIM_SEED variable.
        #[arg(long)]
        seed: Option<u64>,
        /// Stops after this many ticks.
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long, default_value = "table", value_parser = ["table", "structured"])]
        report: String,
        /// Serves the operator console protocol on ADDR (requires hitl console).
        #[arg(long, value_name = "ADDR")]
        serve: Option<String>,
        /// Writes the decision log and structured report here.
        #[arg(long, value_name = "PATH")]
        log_dir: Option<PathBuf>,
    },
    /// Print the scenario JSON schema.
    Schema,
    /// Rewrite a scenario file in canonical form.
    Fmt { scenario: PathBuf },
}

fn load(path: &Path) -> Result<emblem_sim::Scenario, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_LOAD)
    })?;
    load_scenario(&text).map_err(|e| {
        eprintln!("error: {} is not a valid scenario:", path.display());
        for err in &e.errors {
            eprintln!("  {err}");
        }
        ExitCode::from(EXIT_LOAD)
    })
}

fn write_outputs(dir: &Path, result: &RunResult, report: &MetricsReport) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{}.log", result.name)), result.log_text())?;
    std::fs::write(dir.join(format!("{}.report.json", result.name)), report.to_structured())
}

fn run(
    path: &Path,
    seed: Option<u64>,
    ticks: Option<u64>,
    report: &str,
    serve_addr: Option<String>,
    log_dir: Option<PathBuf>,
) -> Result<ExitCode, ExitCode> {
    let scenario = load(path)?;
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(seed, env.as_deref(), &scenario).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_LOAD)
    })?;
    let format: ReportFormat = report.parse().expect("clap restricts the value");
    let mut sim = Simulation::new(&scenario, seed).map_err(|e| {
        eprintln!("error: scenario setup failed: {e}");
        ExitCode::from(EXIT_LOAD)
    })?;
    if let Some(n) = ticks {
        sim.limit_ticks(n);
    }
    let result = match serve_addr {
        None => {
            while !sim.is_finished() {
                sim.tick(Vec::new());
            }
            sim.finish()
        }
        Some(addr) => {
            if scenario.hitl != Hitl::Console {
                eprintln!("error: --serve requires a scenario with hitl mode console");
                return Err(ExitCode::from(EXIT_LOAD));
            }
            let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
            runtime.block_on(async {
                let listener = serve::bind(&addr).await.map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                })?;
                let options = ServeOptions { tick_interval: Duration::from_millis(sim.tick_ms()) };
                let server = serve::start(sim, listener, options);
                eprintln!("serving operator console protocol on ws://{}", server.local_addr);
                Ok::<RunResult, ExitCode>(server.wait().await)
            })?
        }
    };
    let report_doc = MetricsReport::from_runs([(result.seed, result.counts)]);
    print!("{}", report_doc.render(format));
    if let Some(dir) = log_dir {
        if let Err(e) = write_outputs(&dir, &result, &report_doc) {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            return Err(ExitCode::FAILURE);
        }
    }
    if !result.safety_violations.is_empty() {
        for id in &result.safety_violations {
            eprintln!("safety invariant violated by engagement {id}:");
            eprint!("{}", emblem_core::engine::render_log(&result.engagement_log(id)));
        }
        return Err(ExitCode::from(EXIT_SAFETY));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, seed, ticks, report, serve, log_dir } => {
            run(&scenario, seed, ticks, &report, serve, log_dir).unwrap_or_else(|c| c)
        }
        Command::Schema => {
            print!("{}", schema_json());
            ExitCode::SUCCESS
        }
        Command::Fmt { scenario } => match load(&scenario) {
            Ok(s) => match std::fs::write(&scenario, to_canonical_json(&s)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", scenario.display());
                    ExitCode::FAILURE
                }
            },
            Err(c) => c,
        },
    }
}
