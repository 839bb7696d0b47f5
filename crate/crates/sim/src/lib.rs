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

//! Deterministic scenario runner for the emblem protocol: scenario files,
//! the fixed-tick simulation, metrics, and the operator console service.

pub mod metrics;
pub mod scenario;
pub mod serve;
pub mod sim;
pub mod wire;

pub use metrics::{metrics_from_log, Counts, MetricsReport, ReportFormat};
pub use scenario::{load_scenario, schema_json, to_canonical_json, LoadError, Scenario, ValidationError};
pub use sim::{resolve_seed, run_scenario, OperatorCommand, RunResult, SetupError, Simulation};
