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

//! Exhaustive exploration of pipeline outcomes against the state machine.

use std::collections::BTreeSet;

use super::evidence::{PassiveLabel, PassiveVerdict, TagScreen};
use super::log::replay;
use super::machine::{resolve_operator, step, EngagementState, OperatorChoice, OperatorInput, TickInputs};
use super::phase::Phase;
use super::pipeline::{ReceivedFrame, Sensors, TagScreenReport};
use super::policy::{PassiveResponse, ProtectedAction, WeaponPolicy};
use crate::codec::DecodedBeacon;
use crate::error::{CodecError, GeoError, RegistryError};
use crate::geo::{BearingObservation, GpsFix};
use crate::model::{BandKind, EmblemId, IssuerId, Mobility, Position};
use crate::rfid::{ChallengeOutcome, InventoryProtocol};
use crate::trust::{EmblemCertificate, PublicKey, RegistryRecord, Signature, SubjectType, VerificationVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameScript {
    Absent,
    Undecodable,
    Decoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalizeScript {
    NearTarget,
    FarFromTarget,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegistryScript {
    Match,
    NoMatch,
    Unavailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RfidScript {
    Confirmed,
    NoResponse,
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorScript {
    Silent,
    Abort,
    Proceed,
}

/// One point of the outcome space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Script {
    pub frame: FrameScript,
    pub verdict: VerificationVerdict,
    pub mobile_subject: bool,
    pub gps_ok: bool,
    pub localize: LocalizeScript,
    pub registry: RegistryScript,
    pub rfid: RfidScript,
    pub passive: Option<PassiveLabel>,
    pub tag_screen: Option<TagScreen>,
    pub jammed: bool,
    pub operator: OperatorScript,
    pub on_protected: ProtectedAction,
    pub passive_response: PassiveResponse,
}

impl Script {
    pub fn target_position() -> Position {
        Position::new(1000.0, 0.0, 0.0)
    }

    pub fn certificate(&self) -> EmblemCertificate {
        EmblemCertificate {
            version: crate::trust::CERT_VERSION,
            emblem_id: EmblemId::from_label("audit-emblem"),
            issuer_id: IssuerId([0; 8]),
            subject_type: if self.mobile_subject { SubjectType::MobileUnit } else { SubjectType::Stationary },
            valid_from: 0,
            valid_to: i64::MAX,
            lat_e7: 0,
            lon_e7: 0,
            zone_radius_m: if self.mobile_subject { 0 } else { 100 },
            subject_pubkey: PublicKey([0; 32]),
            signature: Signature([0; 64]),
        }
    }

    /// Whether this point carries a Valid, registry-matched (or skipped),
    /// RFID-confirmed emblem next to the target.
    pub fn fully_protected(&self) -> bool {
        self.frame == FrameScript::Decoded
            && self.verdict == VerificationVerdict::Valid
            && self.gps_ok
            && self.localize == LocalizeScript::NearTarget
            && (self.mobile_subject || self.registry == RegistryScript::Match)
            && self.rfid == RfidScript::Confirmed
    }

    /// Whether a Valid certificate sits in the target's evidence.
    pub fn valid_in_evidence(&self) -> bool {
        self.frame == FrameScript::Decoded
            && self.verdict == VerificationVerdict::Valid
            && !(self.gps_ok && self.localize == LocalizeScript::FarFromTarget)
    }

    pub fn target_mobility(&self) -> Mobility {
        if self.tag_screen.is_some() {
            Mobility::Mobile
        } else {
            Mobility::Stationary
        }
    }
}

pub struct ScriptedSensors {
    pub script: Script,
}

impl Sensors for ScriptedSensors {
    fn decode(&mut self, _raw: &[u8]) -> Result<DecodedBeacon, CodecError> {
        match self.script.frame {
            FrameScript::Decoded => {
                Ok(DecodedBeacon { certificate: self.script.certificate(), band: BandKind::XBand, corrected_bits: 0 })
            }
            _ => Err(CodecError::CrcMismatch),
        }
    }

    fn verify(&mut self, _cert: &EmblemCertificate) -> VerificationVerdict {
        self.script.verdict
    }

    fn self_fix(&mut self) -> Result<GpsFix, GeoError> {
        if self.script.gps_ok {
            Ok(GpsFix { position: Position::ORIGIN, clock_bias: 0.0, residual_rms: 0.0, sats_used: 4 })
        } else {
            Err(GeoError::InsufficientSatellites)
        }
    }

    fn localize(&mut self, _emitter: &str, _track: &[BearingObservation]) -> Result<Position, GeoError> {
        match self.script.localize {
            LocalizeScript::NearTarget => Ok(Script::target_position().offset(50.0, 0.0, 0.0)),
            LocalizeScript::FarFromTarget => Ok(Script::target_position().offset(5000.0, 0.0, 0.0)),
            LocalizeScript::Fails => Err(GeoError::ParallelBearings),
        }
    }

    fn registry_query(&mut self, at: &Position, _radius: f64) -> Result<Vec<RegistryRecord>, RegistryError> {
        match self.script.registry {
            RegistryScript::Match => Ok(vec![RegistryRecord {
                emblem_id: self.script.certificate().emblem_id,
                declared_position: *at,
                zone_radius_m: 100.0,
            }]),
            RegistryScript::NoMatch => Ok(Vec::new()),
            RegistryScript::Unavailable => Err(RegistryError::RegistryUnavailable),
        }
    }

    fn challenge(&mut self, emblem: EmblemId, _at: &Position) -> ChallengeOutcome {
        match self.script.rfid {
            RfidScript::Confirmed => ChallengeOutcome::Confirmed(emblem),
            RfidScript::NoResponse => ChallengeOutcome::NoResponse,
            RfidScript::Mismatch => ChallengeOutcome::Mismatch,
        }
    }

    fn passive(&mut self, _range: f64) -> Option<PassiveVerdict> {
        self.script.passive.map(|label| PassiveVerdict { label, confidence: 0.9 })
    }

    fn screen_tags(&mut self, _p: InventoryProtocol) -> TagScreenReport {
        let screen = self.script.tag_screen.unwrap_or(TagScreen::Unavailable);
        TagScreenReport { screen, detail: "scripted".into() }
    }
}

pub fn audit_policy(script: &Script) -> WeaponPolicy {
    WeaponPolicy {
        on_protected: script.on_protected,
        passive_response: script.passive_response,
        phase_dwell_s: 0.0,
        listen_window_s: 0.0,
        operator_timeout_s: 0.5,
        ..WeaponPolicy::default()
    }
}

pub const AUDIT_TICK_MS: u64 = 100;
const MAX_AUDIT_TICKS: u64 = 200;

/// Drives one engagement to a terminal phase under `script`.
pub fn run_script(script: Script) -> EngagementState {
    let policy = audit_policy(&script);
    let mut sensors = ScriptedSensors { script };
    let mut st = EngagementState::new("audit", "target");
    let frame = ReceivedFrame { emitter: "beacon".into(), band: BandKind::XBand, bytes: vec![0; 4] };
    let jammed: BTreeSet<_> = if script.jammed { [BandKind::XBand].into() } else { BTreeSet::new() };
    for tick in 0..MAX_AUDIT_TICKS {
        if st.is_terminal() {
            break;
        }
        let now = tick * AUDIT_TICK_MS;
        if st.phase == Phase::AwaitingOperator {
            let choice = match script.operator {
                OperatorScript::Silent => None,
                OperatorScript::Abort => Some(OperatorChoice::Abort),
                OperatorScript::Proceed => Some(OperatorChoice::Proceed),
            };
            if let Some(choice) = choice {
                let input = OperatorInput::Decision { choice, operator_id: "auditor".into() };
                resolve_operator(&mut st, input, &policy, now).expect("engagement is waiting");
                continue;
            }
        }
        let inputs = TickInputs {
            now_ms: now,
            target_detected: true,
            target_position: Script::target_position(),
            target_mobility: script.target_mobility(),
            frames: if script.frame == FrameScript::Absent { Vec::new() } else { vec![frame.clone()] },
            bearings: Vec::new(),
            jammed_bands: jammed.clone(),
        };
        step(&mut st, &inputs, &mut sensors, &policy);
    }
    st
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub script: Script,
    pub final_phase: Phase,
    pub what: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub combinations: usize,
    pub engaged: usize,
    pub violations: Vec<Violation>,
}

/// Every distinct combination of stage outcomes, target-level evidence,
/// operator behaviour and protective-action policy. Beacon stages the
/// pipeline never reaches are collapsed by [`canonical`].
pub fn outcome_space() -> Vec<Script> {
    use VerificationVerdict as V;
    let mut beacons = vec![(FrameScript::Absent, V::Valid), (FrameScript::Undecodable, V::Valid)];
    beacons.extend(V::ALL.iter().map(|v| (FrameScript::Decoded, *v)));
    let mut paths = BTreeSet::new();
    for &(frame, verdict) in &beacons {
        for mobile_subject in [false, true] {
            for gps_ok in [true, false] {
                for localize in [LocalizeScript::NearTarget, LocalizeScript::FarFromTarget, LocalizeScript::Fails] {
                    for registry in [RegistryScript::Match, RegistryScript::NoMatch, RegistryScript::Unavailable] {
                        for rfid in [RfidScript::Confirmed, RfidScript::NoResponse, RfidScript::Mismatch] {
                            paths.insert(canonical(Script {
                                frame,
                                verdict,
                                mobile_subject,
                                gps_ok,
                                localize,
                                registry,
                                rfid,
                                ..BASE
                            }));
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for path in paths {
        for passive in [None, Some(PassiveLabel::Combatant), Some(PassiveLabel::Protected)] {
            for tag_screen in
                [None, Some(TagScreen::ArmedTagPresent), Some(TagScreen::NoTags), Some(TagScreen::Unavailable)]
            {
                for jammed in [false, true] {
                    for operator in [OperatorScript::Silent, OperatorScript::Abort, OperatorScript::Proceed] {
                        for on_protected in [ProtectedAction::Abort, ProtectedAction::Disintegrate] {
                            for passive_response in [PassiveResponse::Bar, PassiveResponse::Escalate] {
                                out.push(Script {
                                    passive,
                                    tag_screen,
                                    jammed,
                                    operator,
                                    on_protected,
                                    passive_response,
                                    ..path
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

const BASE: Script = Script {
    frame: FrameScript::Absent,
    verdict: VerificationVerdict::Valid,
    mobile_subject: false,
    gps_ok: true,
    localize: LocalizeScript::NearTarget,
    registry: RegistryScript::Match,
    rfid: RfidScript::Confirmed,
    passive: None,
    tag_screen: None,
    jammed: false,
    operator: OperatorScript::Silent,
    on_protected: ProtectedAction::Abort,
    passive_response: PassiveResponse::Escalate,
};

/// Collapses points that differ only in stages the pipeline never reaches.
pub fn canonical(mut s: Script) -> Script {
    use VerificationVerdict as V;
    if s.frame != FrameScript::Decoded {
        s.verdict = V::Valid;
        s.mobile_subject = false;
    }
    if s.frame != FrameScript::Decoded || s.verdict != V::Valid {
        s.gps_ok = true;
    }
    if !(s.frame == FrameScript::Decoded && s.verdict == V::Valid && s.gps_ok) {
        s.localize = LocalizeScript::NearTarget;
    }
    let localized = s.frame == FrameScript::Decoded && s.verdict == V::Valid && s.gps_ok && s.localize != LocalizeScript::Fails;
    if !localized || s.mobile_subject {
        s.registry = RegistryScript::Match;
    }
    if !localized || !(s.mobile_subject || s.registry == RegistryScript::Match) {
        s.rfid = RfidScript::Confirmed;
    }
    s
}

pub fn check(script: Script, st: &EngagementState) -> Option<&'static str> {
    let engaged = st.log.iter().any(|e| e.phase == Phase::Engage);
    match replay(&st.log) {
        Ok(p) if p == st.phase => {}
        _ => return Some("log does not replay to the final phase"),
    }
    if !st.is_terminal() {
        return Some("engagement did not terminate");
    }
    if script.fully_protected() && engaged {
        return Some("engaged a verified protected target");
    }
    if script.fully_protected() && !matches!(st.phase, Phase::Aborted | Phase::Disintegrated) {
        return Some("verified protection did not end in Aborted or Disintegrated");
    }
    if script.tag_screen == Some(TagScreen::NoTags) && engaged {
        return Some("engaged a target without weapon tags");
    }
    if script.valid_in_evidence() && st.decisions.iter().any(|d| d.outcome == super::machine::Outcome::Proceed) {
        return Some("proceeded with a Valid certificate in evidence");
    }
    None
}

/// Runs every point of [`outcome_space`] through the engine.
pub fn explore() -> AuditReport {
    let mut report = AuditReport::default();
    for script in outcome_space() {
        let st = run_script(script);
        report.combinations += 1;
        if st.phase == Phase::Assess {
            report.engaged += 1;
        }
        if let Some(what) = check(script, &st) {
            report.violations.push(Violation { script, final_phase: st.phase, what });
        }
    }
    report
}
