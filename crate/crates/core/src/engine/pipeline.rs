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

//! The active-emblem verification pipeline.

use super::evidence::{PassiveVerdict, RegistryMatch, Stage, TagScreen, VerificationEvidence};
use super::policy::WeaponPolicy;
use crate::codec::{decode_beacon, DecodedBeacon};
use crate::error::CodecError;
use crate::error::{GeoError, RegistryError};
use crate::geo::{localize_emitter, BearingObservation, GpsFix};
use crate::model::{BandKind, EmblemId, Position};
use crate::rfid::{ChallengeOutcome, InventoryProtocol};
use crate::trust::{EmblemCertificate, RegistryRecord, VerificationVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedFrame {
    pub emitter: String,
    pub band: BandKind,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagScreenReport {
    pub screen: TagScreen,
    pub detail: String,
}

/// Sensor products available to a weapon system. The runner implements
/// this against the simulated world; tests script it.
pub trait Sensors {
    fn decode(&mut self, raw: &[u8]) -> Result<DecodedBeacon, CodecError> {
        decode_beacon(raw)
    }
    fn verify(&mut self, cert: &EmblemCertificate) -> VerificationVerdict;
    fn self_fix(&mut self) -> Result<GpsFix, GeoError>;
    fn localize(&mut self, _emitter: &str, track: &[BearingObservation]) -> Result<Position, GeoError> {
        localize_emitter(track)
    }
    fn registry_query(&mut self, at: &Position, radius: f64) -> Result<Vec<RegistryRecord>, RegistryError>;
    fn challenge(&mut self, emblem: EmblemId, emitter_position: &Position) -> ChallengeOutcome;
    /// `None` when the target is beyond the passive sensor's range.
    fn passive(&mut self, sensor_range_m: f64) -> Option<PassiveVerdict>;
    fn screen_tags(&mut self, protocol: InventoryProtocol) -> TagScreenReport;
}

/// Decode and signature check, run for every frame before ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Triage {
    pub emitter: String,
    pub band: BandKind,
    pub decoded: Result<DecodedBeacon, CodecError>,
    pub verdict: Option<VerificationVerdict>,
}

impl Triage {
    pub fn is_valid(&self) -> bool {
        self.verdict == Some(VerificationVerdict::Valid)
    }
}

pub fn triage(frame: &ReceivedFrame, sensors: &mut dyn Sensors) -> Triage {
    let decoded = sensors.decode(&frame.bytes);
    let verdict = decoded.as_ref().ok().map(|d| sensors.verify(&d.certificate));
    Triage { emitter: frame.emitter.clone(), band: frame.band, decoded, verdict }
}

fn geo_code(e: GeoError) -> String {
    format!("{e:?}")
}

/// Remaining stages after triage. Each stage runs only if its predecessor
/// succeeded or was skipped by policy.
pub fn complete_pipeline(
    t: Triage,
    track: &[BearingObservation],
    sensors: &mut dyn Sensors,
    policy: &WeaponPolicy,
) -> VerificationEvidence {
    let caps = &policy.capabilities;
    let mut ev = VerificationEvidence::new(&t.emitter, t.band);
    let decoded = match t.decoded {
        Ok(d) => d,
        Err(e) => {
            ev.decode_error = Some(e);
            return ev;
        }
    };
    ev.band = decoded.band;
    let cert = decoded.certificate;
    let verdict = t.verdict.expect("decoded frames are verified");
    ev.beacon = Some((cert.clone(), verdict));
    if verdict != VerificationVerdict::Valid {
        return ev;
    }

    let fix = if caps.gps {
        sensors.self_fix().map_err(geo_code)
    } else {
        Err("disabled".into())
    };
    match fix {
        Ok(f) => ev.self_fix = Some(Stage::Done(f)),
        Err(r) => {
            ev.self_fix = Some(Stage::Unavailable(r));
            return ev;
        }
    }

    let located = if caps.radar {
        sensors.localize(&t.emitter, track).map_err(geo_code)
    } else {
        Err("disabled".into())
    };
    let position = match located {
        Ok(p) => {
            ev.emitter_position = Some(Stage::Done(p));
            p
        }
        Err(r) => {
            ev.emitter_position = Some(Stage::Unavailable(r));
            return ev;
        }
    };

    let registry = if cert.subject_type.is_mobile() {
        RegistryMatch::Skipped
    } else if !caps.registry {
        RegistryMatch::Unavailable
    } else {
        match sensors.registry_query(&position, policy.registry_match_radius_m) {
            Ok(records) if records.iter().any(|r| r.emblem_id == cert.emblem_id) => RegistryMatch::Match,
            Ok(_) => RegistryMatch::NoMatch,
            Err(_) => RegistryMatch::Unavailable,
        }
    };
    ev.registry_match = Some(registry);
    if !matches!(registry, RegistryMatch::Match | RegistryMatch::Skipped) {
        return ev;
    }

    ev.rfid_confirm = Some(if caps.rfid {
        Stage::Done(sensors.challenge(cert.emblem_id, &position))
    } else {
        Stage::Unavailable("disabled".into())
    });
    ev
}

pub fn verify_active_emblem(
    frame: &ReceivedFrame,
    track: &[BearingObservation],
    sensors: &mut dyn Sensors,
    policy: &WeaponPolicy,
) -> VerificationEvidence {
    let t = triage(frame, sensors);
    complete_pipeline(t, track, sensors, policy)
}

/// Verified frames first, otherwise arrival order.
pub fn prioritize(mut frames: Vec<Triage>) -> Vec<Triage> {
    frames.sort_by_key(|t| !t.is_valid());
    frames
}
