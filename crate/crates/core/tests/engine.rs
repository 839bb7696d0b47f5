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

use std::collections::BTreeSet;
use std::time::Instant;

use emblem_core::codec::DecodedBeacon;
use emblem_core::engine::audit::{
    explore, run_script, FrameScript, LocalizeScript, OperatorScript, RegistryScript, RfidScript, Script,
};
use emblem_core::engine::{
    parse_log, render_log, replay, resolve_operator, step, EngagementState, EngineError, EventCode, OperatorChoice,
    OperatorInput, PassiveLabel, PassiveResponse, Phase, ProtectedAction, ReceivedFrame, Sensors, TagScreen,
    TagScreenReport, TickInputs, WeaponPolicy,
};
use emblem_core::engine::{PassiveVerdict, TRANSITIONS};
use emblem_core::geo::{BearingObservation, GpsFix};
use emblem_core::model::{BandKind, EmblemId, Mobility, Position};
use emblem_core::rfid::{ChallengeOutcome, InventoryProtocol};
use emblem_core::trust::{RegistryRecord, VerificationVerdict};
use emblem_core::{CodecError, GeoError, RegistryError};

fn base() -> Script {
    Script {
        frame: FrameScript::Decoded,
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
    }
}

fn phases(st: &EngagementState) -> Vec<Phase> {
    let mut v = vec![Phase::Find];
    v.extend(st.log.iter().filter(|e| e.code == EventCode::Phase).map(|e| e.phase));
    v
}

fn reasons(st: &EngagementState) -> Vec<String> {
    st.decisions.iter().map(|d| format!("{:?}:{}", d.outcome, d.reason)).collect()
}

#[test]
fn nothing_barring_reaches_engage() {
    let st = run_script(Script {
        frame: FrameScript::Absent,
        passive: Some(PassiveLabel::Combatant),
        ..base()
    });
    assert_eq!(
        phases(&st),
        [Phase::Find, Phase::Fix, Phase::Track, Phase::Target, Phase::Engage, Phase::Assess]
    );
}

#[test]
fn fully_verified_emblem_aborts_or_disintegrates() {
    let st = run_script(base());
    assert_eq!(st.phase, Phase::Aborted);
    assert_eq!(reasons(&st), ["Abort:EMBLEM_VERIFIED"]);
    let st = run_script(Script { on_protected: ProtectedAction::Disintegrate, ..base() });
    assert_eq!(st.phase, Phase::Disintegrated);
}

#[test]
fn registry_outage_escalates() {
    let st = run_script(Script { registry: RegistryScript::Unavailable, ..base() });
    assert!(st.log.iter().any(|e| e.code == EventCode::OperatorRequest));
    assert_eq!(reasons(&st)[0], "Escalate:EMBLEM_UNCONFIRMED");
    // silent operator: fail-safe abort
    assert_eq!(st.phase, Phase::Aborted);
    assert!(st.log.iter().any(|e| e.code == EventCode::OperatorTimeout));
}

#[test]
fn revoked_beacon_is_misuse_and_does_not_bar() {
    let st = run_script(Script { verdict: VerificationVerdict::Revoked, ..base() });
    let misuse: Vec<_> = st.log.iter().filter(|e| e.code == EventCode::Misuse).collect();
    assert_eq!(misuse.len(), 1);
    assert_eq!(misuse[0].field("reason"), Some("Revoked"));
    assert_eq!(st.phase, Phase::Assess);
}

#[test]
fn gps_denial_escalates() {
    let st = run_script(Script { gps_ok: false, ..base() });
    assert!(st.log.iter().any(|e| e.code == EventCode::GpsUnavailable));
    assert_eq!(reasons(&st)[0], "Escalate:EMBLEM_UNCONFIRMED");
}

#[test]
fn stops_at_first_failed_stage() {
    let st = run_script(Script { gps_ok: false, ..base() });
    for code in [EventCode::Localized, EventCode::Registry, EventCode::Rfid] {
        assert!(!st.log.iter().any(|e| e.code == code), "{code} after failed GPS stage");
    }
}

#[test]
fn operator_abort_and_proceed() {
    let st = run_script(Script { frame: FrameScript::Absent, jammed: true, operator: OperatorScript::Abort, ..base() });
    assert_eq!(st.phase, Phase::Aborted);
    assert!(st.log.iter().any(|e| e.code == EventCode::OperatorDecision && e.field("decision") == Some("abort")));

    let st = run_script(Script { frame: FrameScript::Absent, jammed: true, operator: OperatorScript::Proceed, ..base() });
    assert_eq!(
        phases(&st),
        [
            Phase::Find,
            Phase::Fix,
            Phase::Track,
            Phase::Target,
            Phase::AwaitingOperator,
            Phase::Target,
            Phase::Engage,
            Phase::Assess
        ]
    );
    assert_eq!(reasons(&st), ["Escalate:JAMMING", "Proceed:OPERATOR_PROCEED"]);
    assert!(st.operator_override);
}

#[test]
fn operator_cannot_waive_a_valid_emblem() {
    let st = run_script(Script { rfid: RfidScript::NoResponse, operator: OperatorScript::Proceed, ..base() });
    assert_eq!(st.phase, Phase::Aborted);
    assert_eq!(reasons(&st), ["Escalate:EMBLEM_UNCONFIRMED", "Abort:VALID_EMBLEM_UNRESOLVED"]);
}

#[test]
fn untagged_mobile_target_is_barred() {
    let st = run_script(Script {
        frame: FrameScript::Absent,
        tag_screen: Some(TagScreen::NoTags),
        operator: OperatorScript::Proceed,
        ..base()
    });
    assert_eq!(st.phase, Phase::Aborted);
    assert_eq!(reasons(&st), ["Abort:NO_WEAPON_TAGS"]);
}

#[test]
fn far_beacon_is_ignored() {
    let st = run_script(Script { localize: LocalizeScript::FarFromTarget, ..base() });
    assert!(st.log.iter().any(|e| e.code == EventCode::BeaconIgnored));
    assert_eq!(st.phase, Phase::Assess);
}

#[test]
fn stale_decision_is_rejected() {
    let mut st = EngagementState::new("w", "t");
    let r = resolve_operator(
        &mut st,
        OperatorInput::Decision { choice: OperatorChoice::Abort, operator_id: "op".into() },
        &WeaponPolicy::default(),
        0,
    );
    assert_eq!(r, Err(EngineError::StaleDecision));
    assert!(st.log.is_empty());
    assert_eq!(st.phase, Phase::Find);
}

#[test]
fn logs_replay_and_round_trip() {
    for s in [base(), Script { frame: FrameScript::Absent, jammed: true, operator: OperatorScript::Proceed, ..base() }] {
        let st = run_script(s);
        assert_eq!(replay(&st.log), Ok(st.phase));
        let text = render_log(&st.log);
        assert_eq!(parse_log(&text).unwrap(), st.log);
    }
}

#[test]
fn exhaustive_outcome_space_is_safe() {
    let started = Instant::now();
    let report = explore();
    let elapsed = started.elapsed();
    assert!(report.violations.is_empty(), "{:?}", &report.violations[..report.violations.len().min(5)]);
    assert!(report.combinations > 1000);
    assert!(report.engaged > 0, "the space must contain engageable points");
    eprintln!("{} combinations in {elapsed:?}", report.combinations);
}

#[test]
fn transition_walks_follow_table() {
    for s in [
        base(),
        Script { frame: FrameScript::Absent, jammed: true, operator: OperatorScript::Proceed, ..base() },
        Script { frame: FrameScript::Undecodable, ..base() },
    ] {
        let st = run_script(s);
        let p = phases(&st);
        for w in p.windows(2) {
            assert!(TRANSITIONS.contains(&(w[0], w[1])), "{:?}", w);
        }
    }
}

/// Frames whose first byte selects the verdict.
struct ByteSensors;

impl Sensors for ByteSensors {
    fn decode(&mut self, raw: &[u8]) -> Result<DecodedBeacon, CodecError> {
        let mut cert = base().certificate();
        cert.emblem_id = EmblemId::from_label(&format!("e{}", raw[0]));
        Ok(DecodedBeacon { certificate: cert, band: BandKind::XBand, corrected_bits: 0 })
    }
    fn verify(&mut self, cert: &emblem_core::trust::EmblemCertificate) -> VerificationVerdict {
        if cert.emblem_id == EmblemId::from_label("e1") {
            VerificationVerdict::Valid
        } else {
            VerificationVerdict::BadSignature
        }
    }
    fn self_fix(&mut self) -> Result<GpsFix, GeoError> {
        Ok(GpsFix { position: Position::ORIGIN, clock_bias: 0.0, residual_rms: 0.0, sats_used: 4 })
    }
    fn localize(&mut self, _e: &str, _t: &[BearingObservation]) -> Result<Position, GeoError> {
        Ok(Script::target_position())
    }
    fn registry_query(&mut self, _at: &Position, _r: f64) -> Result<Vec<RegistryRecord>, RegistryError> {
        Err(RegistryError::RegistryUnavailable)
    }
    fn challenge(&mut self, _e: EmblemId, _at: &Position) -> ChallengeOutcome {
        ChallengeOutcome::NoResponse
    }
    fn passive(&mut self, _r: f64) -> Option<PassiveVerdict> {
        None
    }
    fn screen_tags(&mut self, _p: InventoryProtocol) -> TagScreenReport {
        TagScreenReport { screen: TagScreen::Unavailable, detail: String::new() }
    }
}

#[test]
fn verified_frames_are_processed_first() {
    let policy = WeaponPolicy { phase_dwell_s: 0.0, listen_window_s: 0.0, ..Default::default() };
    let mut st = EngagementState::new("w", "t");
    let frame = |b: u8, e: &str| ReceivedFrame { emitter: e.into(), band: BandKind::XBand, bytes: vec![b] };
    for tick in 0..4u64 {
        let inputs = TickInputs {
            now_ms: tick * 100,
            target_detected: true,
            target_position: Script::target_position(),
            target_mobility: Mobility::Stationary,
            frames: vec![frame(0, "a"), frame(2, "b"), frame(1, "c")],
            bearings: Vec::new(),
            jammed_bands: BTreeSet::new(),
        };
        step(&mut st, &inputs, &mut ByteSensors, &policy);
    }
    let verdicts: Vec<_> = st.log.iter().filter(|e| e.code == EventCode::Verdict).collect();
    assert_eq!(verdicts.len(), 3);
    assert_eq!(verdicts[0].field("emitter"), Some("c"));
    assert_eq!(verdicts[0].field("verdict"), Some("Valid"));
    let rest: Vec<_> = verdicts[1..].iter().map(|e| e.field("emitter").unwrap()).collect();
    assert_eq!(rest, ["a", "b"]);
    assert_eq!(st.phase, Phase::AwaitingOperator);
}

#[test]
fn engine_source_never_names_oracle_fields() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/src/engine");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains("ground_truth"), "{} mentions oracle data", path.display());
    }
}

#[test]
fn outcome_space_is_distinct_and_canonical() {
    use emblem_core::engine::audit::{canonical, outcome_space};
    let space = outcome_space();
    let set: std::collections::HashSet<_> = space.iter().copied().collect();
    assert_eq!(set.len(), space.len());
    assert!(space.iter().all(|s| canonical(*s) == *s));
    // 32 distinct pipeline paths times 288 target-level and policy points
    assert_eq!(space.len(), 32 * 288);
}
