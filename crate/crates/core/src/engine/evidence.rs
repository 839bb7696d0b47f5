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

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::CodecError;
use crate::geo::GpsFix;
use crate::model::{distance, BandKind, EmblemId, Position};
use crate::rfid::ChallengeOutcome;
use crate::trust::{EmblemCertificate, VerificationVerdict};

/// Result of a stage that may be unable to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Stage<T> {
    Done(T),
    Unavailable(String),
}

impl<T> Stage<T> {
    pub fn done(&self) -> Option<&T> {
        match self {
            Stage::Done(v) => Some(v),
            Stage::Unavailable(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegistryMatch {
    Match,
    NoMatch,
    Unavailable,
    /// Mobile subjects have no registered position.
    Skipped,
}

impl RegistryMatch {
    pub fn as_str(self) -> &'static str {
        match self {
            RegistryMatch::Match => "Match",
            RegistryMatch::NoMatch => "NoMatch",
            RegistryMatch::Unavailable => "Unavailable",
            RegistryMatch::Skipped => "Skipped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TagScreen {
    ArmedTagPresent,
    NoTags,
    Unavailable,
}

impl TagScreen {
    pub fn as_str(self) -> &'static str {
        match self {
            TagScreen::ArmedTagPresent => "ArmedTagPresent",
            TagScreen::NoTags => "NoTags",
            TagScreen::Unavailable => "Unavailable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassiveLabel {
    Protected,
    Combatant,
}

impl PassiveLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PassiveLabel::Protected => "protected",
            PassiveLabel::Combatant => "combatant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassiveVerdict {
    pub label: PassiveLabel,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relevance {
    Relevant,
    Irrelevant,
    Unknown,
}

/// What one received beacon frame established, stage by stage.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationEvidence {
    pub emitter: String,
    pub band: BandKind,
    pub decode_error: Option<CodecError>,
    pub beacon: Option<(EmblemCertificate, VerificationVerdict)>,
    pub self_fix: Option<Stage<GpsFix>>,
    pub emitter_position: Option<Stage<Position>>,
    pub registry_match: Option<RegistryMatch>,
    pub rfid_confirm: Option<Stage<ChallengeOutcome>>,
}

impl VerificationEvidence {
    pub fn new(emitter: &str, band: BandKind) -> Self {
        VerificationEvidence {
            emitter: emitter.to_string(),
            band,
            decode_error: None,
            beacon: None,
            self_fix: None,
            emitter_position: None,
            registry_match: None,
            rfid_confirm: None,
        }
    }

    pub fn verdict(&self) -> Option<VerificationVerdict> {
        self.beacon.as_ref().map(|(_, v)| *v)
    }

    pub fn emblem_id(&self) -> Option<EmblemId> {
        self.beacon.as_ref().map(|(c, _)| c.emblem_id)
    }

    /// Valid certificate, registry match (or skipped for a mobile subject)
    /// and a confirmed RFID echo.
    pub fn fully_verified(&self) -> bool {
        self.verdict() == Some(VerificationVerdict::Valid)
            && matches!(self.registry_match, Some(RegistryMatch::Match | RegistryMatch::Skipped))
            && matches!(self.rfid_confirm, Some(Stage::Done(ChallengeOutcome::Confirmed(_))))
    }

    pub fn rfid_mismatch(&self) -> bool {
        matches!(self.rfid_confirm, Some(Stage::Done(ChallengeOutcome::Mismatch)))
    }

    /// Misuse reason, if the frame shows a forged, revoked or spoofed emblem.
    pub fn misuse(&self) -> Option<&'static str> {
        match self.verdict() {
            Some(v) if v.is_misuse() => Some(v.as_str()),
            _ if self.rfid_mismatch() => Some("RfidMismatch"),
            _ => None,
        }
    }

    /// Whether the localized emitter's zone can cover `target`.
    pub fn relevance(&self, target: &Position, match_radius: f64) -> Relevance {
        match self.emitter_position.as_ref().and_then(Stage::done) {
            Some(p) => {
                let zone = self.beacon.as_ref().map_or(0.0, |(c, _)| f64::from(c.zone_radius_m));
                if distance(p, target) <= zone + match_radius {
                    Relevance::Relevant
                } else {
                    Relevance::Irrelevant
                }
            }
            None => Relevance::Unknown,
        }
    }

    /// Compact stage summary used in logs and operator requests.
    pub fn summary(&self) -> String {
        let verdict = match (&self.decode_error, self.verdict()) {
            (Some(e), _) => format!("decode_error:{}", codec_error_code(e)),
            (None, Some(v)) => v.as_str().to_string(),
            (None, None) => "none".into(),
        };
        let registry = self.registry_match.map_or("-", RegistryMatch::as_str);
        let rfid = match &self.rfid_confirm {
            Some(Stage::Done(o)) => o.label().to_string(),
            Some(Stage::Unavailable(r)) => format!("Unavailable:{r}"),
            None => "-".into(),
        };
        format!("verdict={verdict} registry={registry} rfid={rfid}")
    }
}

pub fn codec_error_code(e: &CodecError) -> &'static str {
    match e {
        CodecError::EmptyInput => "EmptyInput",
        CodecError::BlockLengthError => "BlockLengthError",
        CodecError::BadPreamble => "BadPreamble",
        CodecError::CrcMismatch => "CrcMismatch",
        CodecError::Truncated => "Truncated",
        CodecError::LengthMismatch => "LengthMismatch",
        CodecError::UnknownBand(_) => "UnknownBand",
        CodecError::MalformedCertificate => "MalformedCertificate",
        CodecError::BudgetExceeded { .. } => "BudgetExceeded",
    }
}

/// Everything gathered for one target during the current Target pass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EngagementEvidence {
    /// Latest relevant-or-unresolved evidence per emitter.
    pub beacons: BTreeMap<String, VerificationEvidence>,
    /// Emitters localized away from the target.
    pub ignored: BTreeSet<String>,
    pub passive: Option<Stage<PassiveVerdict>>,
    pub tag_screen: Option<TagScreen>,
    pub jammed: BTreeSet<BandKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeaconSummary {
    pub emitter: String,
    pub verdict: String,
    pub registry_match: String,
    pub rfid: String,
}

/// Serializable evidence view carried in operator requests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSummary {
    pub beacons: Vec<BeaconSummary>,
    pub passive_label: Option<String>,
    pub tag_screen: Option<String>,
    pub jammed_bands: Vec<String>,
    pub reason: String,
}

impl EngagementEvidence {
    pub fn summarize(&self, reason: &str) -> EvidenceSummary {
        EvidenceSummary {
            beacons: self
                .beacons
                .values()
                .map(|b| BeaconSummary {
                    emitter: b.emitter.clone(),
                    verdict: match (&b.decode_error, b.verdict()) {
                        (Some(e), _) => codec_error_code(e).to_string(),
                        (None, Some(v)) => v.as_str().to_string(),
                        (None, None) => "none".into(),
                    },
                    registry_match: b.registry_match.map_or("-", RegistryMatch::as_str).to_string(),
                    rfid: match &b.rfid_confirm {
                        Some(Stage::Done(o)) => o.label().to_string(),
                        Some(Stage::Unavailable(_)) => "Unavailable".into(),
                        None => "-".into(),
                    },
                })
                .collect(),
            passive_label: self.passive.as_ref().map(|p| match p {
                Stage::Done(v) => v.label.as_str().to_string(),
                Stage::Unavailable(_) => "unavailable".to_string(),
            }),
            tag_screen: self.tag_screen.map(|t| t.as_str().to_string()),
            jammed_bands: self.jammed.iter().map(|b| b.to_string()).collect(),
            reason: reason.to_string(),
        }
    }
}
