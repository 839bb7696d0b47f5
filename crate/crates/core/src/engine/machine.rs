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

//! Per-target engagement state machine.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::evidence::{EngagementEvidence, EvidenceSummary, PassiveLabel, Relevance, Stage, TagScreen};
use super::log::{EventCode, LogEntry};
use super::phase::Phase;
use super::pipeline::{complete_pipeline, prioritize, triage, ReceivedFrame, Sensors};
use super::policy::{PassiveResponse, ProtectedAction, TimeoutAction, WeaponPolicy};
use crate::geo::BearingObservation;
use crate::model::{BandKind, EmblemId, Mobility, Position};
use crate::trust::VerificationVerdict;

/// Most recent bearings kept per emitter.
pub const MAX_TRACK_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Proceed,
    Abort,
    Disintegrate,
    Escalate,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Proceed => "Proceed",
            Outcome::Abort => "Abort",
            Outcome::Disintegrate => "Disintegrate",
            Outcome::Escalate => "Escalate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementDecision {
    pub outcome: Outcome,
    pub reason: String,
    pub evidence: EvidenceSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum OperatorChoice {
    Abort,
    Proceed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorInput {
    Decision { choice: OperatorChoice, operator_id: String },
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("decision for an engagement that is not awaiting an operator")]
    StaleDecision,
}

/// Observations delivered to one engagement for one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TickInputs {
    pub now_ms: u64,
    pub target_detected: bool,
    pub target_position: Position,
    pub target_mobility: Mobility,
    pub frames: Vec<ReceivedFrame>,
    pub bearings: Vec<(String, BearingObservation)>,
    pub jammed_bands: BTreeSet<BandKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngagementState {
    pub id: String,
    pub target: String,
    pub phase: Phase,
    pub phase_entered_ms: u64,
    pub evidence: EngagementEvidence,
    pub tracks: BTreeMap<String, Vec<BearingObservation>>,
    pub decisions: Vec<EngagementDecision>,
    pub log: Vec<LogEntry>,
    /// Set once an operator (or a proceed-on-timeout policy) waived escalation.
    pub operator_override: bool,
    misuse_logged: BTreeSet<(EmblemId, &'static str)>,
    pass_started: bool,
}

impl EngagementState {
    pub fn new(id: &str, target: &str) -> Self {
        EngagementState {
            id: id.to_string(),
            target: target.to_string(),
            phase: Phase::Find,
            phase_entered_ms: 0,
            evidence: EngagementEvidence::default(),
            tracks: BTreeMap::new(),
            decisions: Vec::new(),
            log: Vec::new(),
            operator_override: false,
            misuse_logged: BTreeSet::new(),
            pass_started: false,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.phase.is_terminal()
    }

    fn record(&mut self, now_ms: u64, code: EventCode, detail: String) {
        self.log.push(LogEntry { time_ms: now_ms, engagement: self.id.clone(), phase: self.phase, code, detail });
    }

    fn transition(&mut self, to: Phase, now_ms: u64) {
        let from = self.phase;
        assert!(from.can_transition(to), "illegal transition {from} -> {to}");
        self.phase = to;
        self.phase_entered_ms = now_ms;
        if to == Phase::Target {
            self.evidence = EngagementEvidence::default();
            self.pass_started = false;
        }
        self.record(now_ms, EventCode::Phase, format!("{from}->{to}"));
    }

    /// Distinct misuse events logged so far.
    pub fn misuse_count(&self) -> usize {
        self.misuse_logged.len()
    }

    pub fn last_decision(&self) -> Option<&EngagementDecision> {
        self.decisions.last()
    }
}

fn bar(policy: &WeaponPolicy) -> Outcome {
    match policy.on_protected {
        ProtectedAction::Abort => Outcome::Abort,
        ProtectedAction::Disintegrate => Outcome::Disintegrate,
    }
}

/// Pure decision over the evidence of the current Target pass.
///
/// Hard bars: a fully verified beacon, a `NoTags` screen, a passive
/// `protected` label under a bar policy. A Valid certificate that could not
/// be fully verified never yields `Proceed`: it escalates, and once an
/// operator has waived escalation it aborts. Other unresolved evidence
/// escalates unless waived.
pub fn decide(ev: &EngagementEvidence, policy: &WeaponPolicy, operator_override: bool) -> EngagementDecision {
    let make = |outcome: Outcome, reason: &str| EngagementDecision {
        outcome,
        reason: reason.to_string(),
        evidence: ev.summarize(reason),
    };
    if ev.beacons.values().any(|b| b.fully_verified()) {
        return make(bar(policy), "EMBLEM_VERIFIED");
    }
    if ev.tag_screen == Some(TagScreen::NoTags) {
        return make(bar(policy), "NO_WEAPON_TAGS");
    }
    let passive_protected =
        matches!(&ev.passive, Some(Stage::Done(v)) if v.label == PassiveLabel::Protected);
    if passive_protected && policy.passive_response == PassiveResponse::Bar {
        return make(bar(policy), "PASSIVE_PROTECTED");
    }
    if ev.beacons.values().any(|b| b.verdict() == Some(VerificationVerdict::Valid)) {
        return if operator_override {
            make(Outcome::Abort, "VALID_EMBLEM_UNRESOLVED")
        } else {
            make(Outcome::Escalate, "EMBLEM_UNCONFIRMED")
        };
    }
    if !operator_override {
        let inconclusive = ev.beacons.values().any(|b| b.misuse().is_none() || b.rfid_mismatch());
        let reason = if inconclusive {
            Some("BEACON_INCONCLUSIVE")
        } else if !ev.jammed.is_empty() {
            Some("JAMMING")
        } else if ev.tag_screen == Some(TagScreen::Unavailable) {
            Some("TAG_SCREEN_UNAVAILABLE")
        } else if passive_protected {
            Some("PASSIVE_PROTECTED")
        } else {
            None
        };
        if let Some(r) = reason {
            return make(Outcome::Escalate, r);
        }
    }
    make(Outcome::Proceed, if operator_override { "OPERATOR_PROCEED" } else { "NO_PROTECTIVE_EVIDENCE" })
}

fn begin_pass(st: &mut EngagementState, inputs: &TickInputs, sensors: &mut dyn Sensors, policy: &WeaponPolicy) {
    st.pass_started = true;
    let now = inputs.now_ms;
    let caps = &policy.capabilities;
    if caps.passive {
        let v = sensors.passive(policy.passive_sensor_range_m);
        let detail = match &v {
            Some(v) => format!("label={} confidence={:.3}", v.label.as_str(), v.confidence),
            None => "label=none reason=SensorOutOfRange".to_string(),
        };
        st.evidence.passive = Some(match v {
            Some(v) => Stage::Done(v),
            None => Stage::Unavailable("SensorOutOfRange".into()),
        });
        st.record(now, EventCode::Passive, detail);
    }
    if caps.mobile_screening && inputs.target_mobility == Mobility::Mobile {
        let report = sensors.screen_tags(policy.inventory);
        st.evidence.tag_screen = Some(report.screen);
        st.record(now, EventCode::TagScreen, format!("screen={} {}", report.screen.as_str(), report.detail));
    }
}

fn note_misuse(st: &mut EngagementState, now: u64, emitter: &str, emblem: EmblemId, reason: &'static str) {
    if st.misuse_logged.insert((emblem, reason)) {
        st.record(now, EventCode::Misuse, format!("emitter={emitter} emblem={emblem} reason={reason}"));
    }
}

fn process_frames(st: &mut EngagementState, inputs: &TickInputs, sensors: &mut dyn Sensors, policy: &WeaponPolicy) {
    let now = inputs.now_ms;
    let triaged: Vec<_> = inputs.frames.iter().map(|f| triage(f, sensors)).collect();
    for t in prioritize(triaged) {
        let emitter = t.emitter.clone();
        st.record(now, EventCode::Beacon, format!("emitter={emitter} band={}", t.band));
        match (&t.decoded, t.verdict) {
            (Err(e), _) => {
                st.record(now, EventCode::DecodeFail, format!("emitter={emitter} error={}", super::evidence::codec_error_code(e)))
            }
            (Ok(d), Some(v)) => st.record(
                now,
                EventCode::Verdict,
                format!("emitter={emitter} verdict={v} emblem={}", d.certificate.emblem_id),
            ),
            (Ok(_), None) => unreachable!("decoded frames carry a verdict"),
        }
        let track = st.tracks.get(&emitter).cloned().unwrap_or_default();
        let ev = complete_pipeline(t, &track, sensors, policy);
        if let Some(s) = &ev.self_fix {
            match s {
                Stage::Done(f) => st.record(
                    now,
                    EventCode::GpsFix,
                    format!("sats={} residual_m={:.6}", f.sats_used, f.residual_rms),
                ),
                Stage::Unavailable(r) => st.record(now, EventCode::GpsUnavailable, format!("reason={r}")),
            }
        }
        if let Some(s) = &ev.emitter_position {
            match s {
                Stage::Done(p) => st.record(
                    now,
                    EventCode::Localized,
                    format!("emitter={emitter} x={:.1} y={:.1} z={:.1}", p.x, p.y, p.z),
                ),
                Stage::Unavailable(r) => st.record(now, EventCode::LocalizeFail, format!("emitter={emitter} reason={r}")),
            }
        }
        if let Some(m) = ev.registry_match {
            st.record(now, EventCode::Registry, format!("emitter={emitter} result={}", m.as_str()));
        }
        if let Some(r) = &ev.rfid_confirm {
            let o = match r {
                Stage::Done(o) => o.label().to_string(),
                Stage::Unavailable(why) => format!("Unavailable reason={why}"),
            };
            st.record(now, EventCode::Rfid, format!("emitter={emitter} outcome={o}"));
        }
        if let (Some(reason), Some(emblem)) = (ev.misuse(), ev.emblem_id()) {
            note_misuse(st, now, &emitter, emblem, reason);
        }
        if ev.relevance(&inputs.target_position, policy.registry_match_radius_m) == Relevance::Irrelevant {
            st.record(now, EventCode::BeaconIgnored, format!("emitter={emitter} reason=outside_zone"));
            st.evidence.beacons.remove(&emitter);
            st.evidence.ignored.insert(emitter);
        } else {
            st.evidence.ignored.remove(&emitter);
            st.evidence.beacons.insert(emitter, ev);
        }
    }
}

fn apply_decision(st: &mut EngagementState, d: EngagementDecision, now: u64, policy: &WeaponPolicy) {
    st.record(now, EventCode::Decision, format!("outcome={} reason={}", d.outcome.as_str(), d.reason));
    let outcome = d.outcome;
    st.decisions.push(d);
    match outcome {
        Outcome::Proceed => st.transition(Phase::Engage, now),
        Outcome::Abort => st.transition(Phase::Aborted, now),
        Outcome::Disintegrate => st.transition(Phase::Disintegrated, now),
        Outcome::Escalate => {
            st.transition(Phase::AwaitingOperator, now);
            let reason = st.decisions.last().map(|d| d.reason.clone()).unwrap_or_default();
            st.record(
                now,
                EventCode::OperatorRequest,
                format!("timeout_s={} reason={reason}", policy.operator_timeout_s),
            );
        }
    }
}

fn target_tick(st: &mut EngagementState, inputs: &TickInputs, sensors: &mut dyn Sensors, policy: &WeaponPolicy) {
    let now = inputs.now_ms;
    if !st.pass_started {
        begin_pass(st, inputs, sensors, policy);
    }
    for band in policy.monitored_bands() {
        if inputs.jammed_bands.contains(&band) && st.evidence.jammed.insert(band) {
            st.record(now, EventCode::Jamming, format!("band={band}"));
        }
    }
    process_frames(st, inputs, sensors, policy);
    let d = decide(&st.evidence, policy, st.operator_override);
    let barred = matches!(d.outcome, Outcome::Abort | Outcome::Disintegrate);
    if barred || now.saturating_sub(st.phase_entered_ms) >= policy.listen_window_ms() {
        apply_decision(st, d, now, policy);
    }
}

/// Advances the engagement by at most one phase.
pub fn step(st: &mut EngagementState, inputs: &TickInputs, sensors: &mut dyn Sensors, policy: &WeaponPolicy) {
    if st.is_terminal() {
        return;
    }
    for (emitter, obs) in &inputs.bearings {
        let track = st.tracks.entry(emitter.clone()).or_default();
        track.push(*obs);
        if track.len() > MAX_TRACK_LEN {
            track.remove(0);
        }
    }
    let now = inputs.now_ms;
    let dwell_done = now.saturating_sub(st.phase_entered_ms) >= policy.phase_dwell_ms();
    match st.phase {
        Phase::Find if inputs.target_detected => st.transition(Phase::Fix, now),
        Phase::Fix if dwell_done => st.transition(Phase::Track, now),
        Phase::Track if dwell_done => st.transition(Phase::Target, now),
        Phase::Target => target_tick(st, inputs, sensors, policy),
        Phase::Engage => st.transition(Phase::Assess, now),
        Phase::AwaitingOperator if now.saturating_sub(st.phase_entered_ms) >= policy.operator_timeout_ms() => {
            resolve_operator(st, OperatorInput::Timeout, policy, now).expect("awaiting operator");
        }
        _ => {}
    }
}

/// Applies an operator decision or the fail-safe timeout.
pub fn resolve_operator(
    st: &mut EngagementState,
    input: OperatorInput,
    policy: &WeaponPolicy,
    now_ms: u64,
) -> Result<(), EngineError> {
    if st.phase != Phase::AwaitingOperator {
        return Err(EngineError::StaleDecision);
    }
    let proceed = match input {
        OperatorInput::Decision { choice, operator_id } => {
            let c = match choice {
                OperatorChoice::Abort => "abort",
                OperatorChoice::Proceed => "proceed",
            };
            st.record(now_ms, EventCode::OperatorDecision, format!("decision={c} operator={operator_id}"));
            choice == OperatorChoice::Proceed
        }
        OperatorInput::Timeout => {
            let action = match policy.timeout_action {
                TimeoutAction::Abort => "abort",
                TimeoutAction::Proceed => "proceed",
            };
            st.record(now_ms, EventCode::OperatorTimeout, format!("action={action}"));
            policy.timeout_action == TimeoutAction::Proceed
        }
    };
    if proceed {
        st.operator_override = true;
        st.transition(Phase::Target, now_ms);
    } else {
        st.transition(Phase::Aborted, now_ms);
    }
    Ok(())
}
