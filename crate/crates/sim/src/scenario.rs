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

//! Scenario documents: JSON with a published schema and a canonical field
//! order, so load followed by save reproduces a canonical file byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use emblem_core::engine::{OperatorChoice, PassiveOracle, WeaponPolicy};
use emblem_core::model::{BandKind, BandProfile, EntityKind, Mobility, Position, WorldMode};
use emblem_core::rfid::Powered;
use emblem_core::trust::{Scheme, SubjectType, MAX_CHAIN_DEPTH};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub duration_s: f64,
    pub tick_s: f64,
    pub mode: WorldMode,
    /// Wall-clock seconds at simulation time zero, used for validity windows.
    pub epoch_s: i64,
    pub bands: Vec<BandOverride>,
    pub trust: TrustSpec,
    pub entities: Vec<EntitySpec>,
    pub certificates: Vec<CertificateSpec>,
    pub emitters: Vec<EmitterSpec>,
    pub jammers: Vec<JammerSpec>,
    pub satellites: Vec<SatelliteSpec>,
    pub tags: Vec<TagSpec>,
    pub registry: Vec<RegistrySpec>,
    pub policies: Vec<PolicySpec>,
    pub weapons: Vec<WeaponSpec>,
    pub sensors: SensorSpec,
    pub timeline: Vec<TimelineEvent>,
    pub hitl: Hitl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BandOverride {
    pub band: BandKind,
    pub nominal_range_m: f64,
}

/// Signing hierarchy. Keys derive from the labels and the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TrustSpec {
    pub scheme: Scheme,
    pub root: String,
    pub intermediates: Vec<String>,
}

impl TrustSpec {
    pub fn labels(&self) -> impl Iterator<Item = &String> {
        std::iter::once(&self.root).chain(&self.intermediates)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EntitySpec {
    pub id: String,
    pub kind: EntityKind,
    pub position: Position,
    /// Meters per second; positions advance linearly.
    pub velocity: Position,
    pub mobility: Mobility,
    pub ground_truth_protected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub id: String,
    pub subject: String,
    pub issuer: String,
    pub subject_type: SubjectType,
    pub valid_from: i64,
    pub valid_to: i64,
    pub zone_radius_m: u16,
    /// Signed with a key outside the chain while naming `issuer`.
    pub forged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EmitterSpec {
    pub id: String,
    pub owner: String,
    pub band: BandKind,
    pub certificate: String,
    pub period_s: f64,
    pub offset_s: f64,
    pub range_multiplier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum JamModeSpec {
    Block,
    BitFlip { rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct JammerSpec {
    pub id: String,
    pub band: BandKind,
    pub center: Position,
    pub radius_m: f64,
    pub mode: JamModeSpec,
    pub active_from_s: f64,
    pub active_to_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SatelliteSpec {
    pub id: u32,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TagKindSpec {
    Weapon,
    Emblem { certificate: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TagSpec {
    pub id: String,
    pub kind: TagKindSpec,
    pub powered: Powered,
    pub carrier: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RegistrySpec {
    pub certificate: String,
    pub declared_position: Position,
    pub zone_radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub name: String,
    pub policy: WeaponPolicy,
}

/// A weapon system and its assigned target; the engagement id is `entity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct WeaponSpec {
    pub entity: String,
    pub target: String,
    pub policy: String,
    pub detection_range_m: f64,
    pub clock_bias_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub bearing_noise_deg: f64,
    pub pseudorange_noise_m: f64,
    pub passive_oracle: PassiveOracle,
    /// Tags carried within this radius of a target are screened with it.
    pub tag_area_radius_m: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        SensorSpec {
            bearing_noise_deg: 0.1,
            pseudorange_noise_m: 0.0,
            passive_oracle: PassiveOracle::default(),
            tag_area_radius_m: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TimelineAction {
    RevokeEmblem { certificate: String },
    RevokeIssuer { issuer: String },
    RegistryOffline,
    RegistryOnline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TimelineEvent {
    pub at_s: f64,
    pub action: TimelineAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScriptedDecision {
    pub engagement_id: String,
    pub decision: OperatorChoice,
    /// Delay after the matching operator request.
    pub after_s: f64,
    pub operator_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Hitl {
    Off,
    Console,
    Scripted { decisions: Vec<ScriptedDecision> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationError {
    Schema(String),
    DanglingReference { field: String, id: String },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::Schema(m) => write!(f, "schema: {m}"),
            ValidationError::DanglingReference { field, id } => write!(f, "dangling reference: {field} -> {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} validation error(s)", .errors.len())]
pub struct LoadError {
    pub errors: Vec<ValidationError>,
}

impl LoadError {
    pub fn schema_errors(&self) -> Vec<&str> {
        self.errors
            .iter()
            .filter_map(|e| match e {
                ValidationError::Schema(m) => Some(m.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn dangling(&self) -> Vec<(&str, &str)> {
        self.errors
            .iter()
            .filter_map(|e| match e {
                ValidationError::DanglingReference { field, id } => Some((field.as_str(), id.as_str())),
                _ => None,
            })
            .collect()
    }
}

/// Parses and fully validates a scenario, reporting every problem found.
pub fn load_scenario(document: &str) -> Result<Scenario, LoadError> {
    let scenario: Scenario = serde_json::from_str(document)
        .map_err(|e| LoadError { errors: vec![ValidationError::Schema(e.to_string())] })?;
    let errors = validate(&scenario);
    if errors.is_empty() {
        Ok(scenario)
    } else {
        Err(LoadError { errors })
    }
}

/// Canonical serialization: pretty JSON in declaration order plus a newline.
pub fn to_canonical_json(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(s).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn schema_json() -> String {
    let schema = schemars::schema_for!(Scenario);
    let mut out = serde_json::to_string_pretty(&schema).expect("schema serializes");
    out.push('\n');
    out
}

struct Checker {
    errors: Vec<ValidationError>,
}

impl Checker {
    fn schema(&mut self, msg: String) {
        self.errors.push(ValidationError::Schema(msg));
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.schema(msg());
        }
    }

    fn reference(&mut self, known: &BTreeSet<&str>, field: String, id: &str) {
        if !known.contains(id) {
            self.errors.push(ValidationError::DanglingReference { field, id: id.to_string() });
        }
    }

    fn ids<'a>(&mut self, what: &str, ids: impl Iterator<Item = &'a str>) -> BTreeSet<&'a str> {
        let mut set = BTreeSet::new();
        for id in ids {
            if id.is_empty() || id.chars().any(char::is_whitespace) {
                self.schema(format!("{what} id {id:?} must be non-empty without whitespace"));
            }
            if !set.insert(id) {
                self.schema(format!("duplicate {what} id {id}"));
            }
        }
        set
    }

    fn finite_pos(&mut self, what: String, p: &Position) {
        self.require(p.is_finite(), || format!("{what}: position must be finite"));
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

pub fn validate(s: &Scenario) -> Vec<ValidationError> {
    let mut c = Checker { errors: Vec::new() };
    c.require(s.schema_version == SCHEMA_VERSION, || {
        format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", s.schema_version)
    });
    c.require(positive(s.duration_s), || "duration_s must be positive".into());
    c.require(positive(s.tick_s) && (s.tick_s * 1000.0).round() >= 1.0, || {
        "tick_s must be at least one millisecond".into()
    });
    for b in &s.bands {
        let mut p: BandProfile = b.band.default_profile();
        p.nominal_range = b.nominal_range_m;
        if let Err(e) = p.validate() {
            c.schema(format!("band {}: {e}", b.band));
        }
    }

    let labels = c.ids("issuer", s.trust.labels().map(String::as_str));
    c.require(s.trust.intermediates.len() < MAX_CHAIN_DEPTH, || {
        format!("trust chain deeper than {MAX_CHAIN_DEPTH} including the root")
    });

    let entities = c.ids("entity", s.entities.iter().map(|e| e.id.as_str()));
    let by_id: BTreeMap<&str, &EntitySpec> = s.entities.iter().map(|e| (e.id.as_str(), e)).collect();
    for e in &s.entities {
        c.finite_pos(format!("entity {}", e.id), &e.position);
        c.finite_pos(format!("entity {} velocity", e.id), &e.velocity);
        if e.kind == EntityKind::StationaryFacility && e.mobility != Mobility::Stationary {
            c.schema(format!("entity {}: stationary facility must not be mobile", e.id));
        }
        let ground = !matches!(e.kind, EntityKind::Satellite | EntityKind::WeaponSystem);
        if ground {
            if let Err(err) = s.mode.check_ground_position(&e.position) {
                c.schema(format!("entity {}: {err}", e.id));
            }
        }
    }

    let certs = c.ids("certificate", s.certificates.iter().map(|x| x.id.as_str()));
    for cert in &s.certificates {
        c.reference(&entities, format!("certificates[{}].subject", cert.id), &cert.subject);
        c.reference(&labels, format!("certificates[{}].issuer", cert.id), &cert.issuer);
        c.require(cert.valid_from < cert.valid_to, || format!("certificate {}: empty validity window", cert.id));
        c.require(cert.subject_type.is_mobile() || cert.zone_radius_m >= 1, || {
            format!("certificate {}: stationary subjects need a zone radius of at least 1 m", cert.id)
        });
    }

    let _ = c.ids("emitter", s.emitters.iter().map(|x| x.id.as_str()));
    for em in &s.emitters {
        c.reference(&entities, format!("emitters[{}].owner", em.id), &em.owner);
        c.reference(&certs, format!("emitters[{}].certificate", em.id), &em.certificate);
        c.require(positive(em.period_s), || format!("emitter {}: period_s must be positive", em.id));
        c.require(non_negative(em.offset_s), || format!("emitter {}: offset_s must be non-negative", em.id));
        c.require(em.range_multiplier > 0.0 && em.range_multiplier <= 1.0, || {
            format!("emitter {}: range_multiplier must be in (0, 1]", em.id)
        });
    }

    let _ = c.ids("jammer", s.jammers.iter().map(|x| x.id.as_str()));
    for j in &s.jammers {
        c.finite_pos(format!("jammer {}", j.id), &j.center);
        c.require(positive(j.radius_m), || format!("jammer {}: radius_m must be positive", j.id));
        if let JamModeSpec::BitFlip { rate } = j.mode {
            c.require(rate > 0.0 && rate <= 0.5, || format!("jammer {}: bit flip rate must be in (0, 0.5]", j.id));
        }
        c.require(non_negative(j.active_from_s), || format!("jammer {}: active_from_s must be non-negative", j.id));
        if let Some(to) = j.active_to_s {
            c.require(to.is_finite() && to > j.active_from_s, || format!("jammer {}: empty activity window", j.id));
        }
    }

    let mut sat_ids = BTreeSet::new();
    for sat in &s.satellites {
        c.require(sat_ids.insert(sat.id), || format!("duplicate satellite id {}", sat.id));
        c.finite_pos(format!("satellite {}", sat.id), &sat.position);
    }

    let _ = c.ids("tag", s.tags.iter().map(|x| x.id.as_str()));
    for t in &s.tags {
        c.reference(&entities, format!("tags[{}].carrier", t.id), &t.carrier);
        if let TagKindSpec::Emblem { certificate } = &t.kind {
            c.reference(&certs, format!("tags[{}].certificate", t.id), certificate);
        }
    }

    for (i, r) in s.registry.iter().enumerate() {
        c.reference(&certs, format!("registry[{i}].certificate"), &r.certificate);
        c.finite_pos(format!("registry[{i}]"), &r.declared_position);
        c.require(non_negative(r.zone_radius_m), || format!("registry[{i}]: zone_radius_m must be non-negative"));
    }

    let policies = c.ids("policy", s.policies.iter().map(|x| x.name.as_str()));
    for p in &s.policies {
        let pol = &p.policy;
        c.require(pol.registry_match_radius_m.is_finite() && pol.registry_match_radius_m >= 0.0, || {
            format!("policy {}: registry_match_radius_m must be non-negative", p.name)
        });
        for (name, v) in [
            ("operator_timeout_s", pol.operator_timeout_s),
            ("phase_dwell_s", pol.phase_dwell_s),
            ("listen_window_s", pol.listen_window_s),
            ("passive_sensor_range_m", pol.passive_sensor_range_m),
        ] {
            c.require(non_negative(v), || format!("policy {}: {name} must be non-negative", p.name));
        }
        c.require(pol.rfid_band.is_rfid(), || format!("policy {}: rfid_band must be an RFID band", p.name));
        if let emblem_core::rfid::InventoryProtocol::Aloha { frame_size, max_rounds } = pol.inventory {
            c.require(frame_size >= 1 && max_rounds >= 1, || {
                format!("policy {}: ALOHA frame size and round limit must be positive", p.name)
            });
        }
    }

    let weapons = c.ids("weapon", s.weapons.iter().map(|x| x.entity.as_str()));
    for w in &s.weapons {
        c.reference(&entities, format!("weapons[{}].entity", w.entity), &w.entity);
        c.reference(&entities, format!("weapons[{}].target", w.entity), &w.target);
        c.reference(&policies, format!("weapons[{}].policy", w.entity), &w.policy);
        if let Some(e) = by_id.get(w.entity.as_str()) {
            c.require(e.kind == EntityKind::WeaponSystem, || format!("weapon {}: entity is not a weapon system", w.entity));
        }
        c.require(positive(w.detection_range_m), || format!("weapon {}: detection_range_m must be positive", w.entity));
        c.require(w.clock_bias_s.is_finite(), || format!("weapon {}: clock_bias_s must be finite", w.entity));
    }

    c.require(non_negative(s.sensors.bearing_noise_deg), || "sensors.bearing_noise_deg must be non-negative".into());
    c.require(non_negative(s.sensors.pseudorange_noise_m), || "sensors.pseudorange_noise_m must be non-negative".into());
    c.require(non_negative(s.sensors.tag_area_radius_m), || "sensors.tag_area_radius_m must be non-negative".into());
    let o = &s.sensors.passive_oracle;
    for (name, v) in [("false_positive", o.false_positive), ("false_negative", o.false_negative)] {
        c.require((0.0..=1.0).contains(&v), || format!("sensors.passive_oracle.{name} must be within [0, 1]"));
    }
    c.require(
        (0.0..=1.0).contains(&o.confidence_min) && (0.0..=1.0).contains(&o.confidence_max) && o.confidence_min <= o.confidence_max,
        || "sensors.passive_oracle confidence bounds must satisfy 0 <= min <= max <= 1".into(),
    );

    for (i, ev) in s.timeline.iter().enumerate() {
        c.require(non_negative(ev.at_s), || format!("timeline[{i}]: at_s must be non-negative"));
        match &ev.action {
            TimelineAction::RevokeEmblem { certificate } => {
                c.reference(&certs, format!("timeline[{i}].certificate"), certificate)
            }
            TimelineAction::RevokeIssuer { issuer } => c.reference(&labels, format!("timeline[{i}].issuer"), issuer),
            TimelineAction::RegistryOffline | TimelineAction::RegistryOnline => {}
        }
    }

    if let Hitl::Scripted { decisions } = &s.hitl {
        for (i, d) in decisions.iter().enumerate() {
            c.reference(&weapons, format!("hitl.decisions[{i}].engagement_id"), &d.engagement_id);
            c.require(non_negative(d.after_s), || format!("hitl.decisions[{i}]: after_s must be non-negative"));
            c.require(!d.operator_id.chars().any(char::is_whitespace), || {
                format!("hitl.decisions[{i}]: operator_id must not contain whitespace")
            });
        }
    }
    c.errors
}
