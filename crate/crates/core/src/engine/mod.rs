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

//! Engagement decision cycle with emblem verification and operator escalation.
//!
//! The engine works only on sensor products handed to it through
//! [`Sensors`] and [`TickInputs`]; it holds no reference to simulated
//! entities.

pub mod audit;
mod evidence;
mod log;
mod machine;
mod phase;
mod pipeline;
mod policy;
mod screening;

pub use evidence::{
    codec_error_code, BeaconSummary, EngagementEvidence, EvidenceSummary, PassiveLabel, PassiveVerdict,
    RegistryMatch, Relevance, Stage, TagScreen, VerificationEvidence,
};
pub use log::{format_time, parse_line, parse_log, render_log, replay, EventCode, LogEntry, LogParseError, ReplayError};
pub use machine::{
    decide, resolve_operator, step, EngagementDecision, EngagementState, EngineError, OperatorChoice, OperatorInput,
    Outcome, TickInputs, MAX_TRACK_LEN,
};
pub use phase::{Phase, TRANSITIONS};
pub use pipeline::{complete_pipeline, prioritize, triage, verify_active_emblem, ReceivedFrame, Sensors, TagScreenReport, Triage};
pub use policy::{Capabilities, PassiveResponse, ProtectedAction, TimeoutAction, WeaponPolicy};
pub use screening::{passive_recognize, screen_mobile_tags, PassiveError, PassiveOracle};
