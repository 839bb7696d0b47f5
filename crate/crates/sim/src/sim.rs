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

//! Fixed-tick simulation of one scenario.
//!
//! Each tick runs, in order: timeline events, entity motion, jammer
//! activation, emitter firing and channel delivery, bearing measurement,
//! one engine step per weapon, operator decisions, then log collection.
//! Every random draw comes from a stream keyed by (seed, purpose, weapon,
//! tick), so runs are reproducible regardless of iteration details.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use emblem_core::channel::{Channel, ChannelError, Delivery, Emitter, JamMode, JammerField};
use emblem_core::codec::encode_beacon;
use emblem_core::engine::{
    passive_recognize, resolve_operator, screen_mobile_tags, step, EngagementState, EventCode, LogEntry,
    OperatorChoice, OperatorInput, Outcome, PassiveLabel, PassiveVerdict, Phase, ReceivedFrame, Sensors,
    TagScreenReport, TickInputs, WeaponPolicy,
};
use emblem_core::error::{CodecError, GeoError, ModelError, RegistryError, TrustError};
use emblem_core::geo::{trilaterate, BearingObservation, GpsFix, SatelliteSignal};
use emblem_core::model::{distance, BandKind, BandTable, EmblemId, EntityId, Mobility, Position, WorldMode};
use emblem_core::rfid::{
    challenge_response, ChallengeOutcome, InventoryProtocol, RfidReader, Tag, TagId, TagKind,
};
use emblem_core::rng::keyed_rng;
use emblem_core::trust::{
    issue_certificate, verify_certificate, AuthoritySnapshot, CertificateRequest, EmblemCertificate, Registry,
    RegistryRecord, RevocationList, RevocationTarget, SigningKey, TrustAuthority, TrustChain, VerificationVerdict,
};
use rand_distr::{Distribution, Normal};

use crate::metrics::Counts;
use crate::scenario::{Hitl, JamModeSpec, Scenario, ScriptedDecision, TagKindSpec, TimelineAction};
use crate::wire::{Ack, ServerMessage};

#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("trust setup: {0}")]
    Trust(#[from] TrustError),
    #[error("band table: {0}")]
    Model(#[from] ModelError),
    #[error("channel: {0}")]
    Channel(#[from] ChannelError),
    #[error("beacon encoding: {0}")]
    Codec(#[from] CodecError),
}

/// An operator decision arriving from outside the simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorCommand {
    pub engagement_id: String,
    pub choice: OperatorChoice,
    pub operator_id: String,
    /// Opaque routing token echoed with the ack.
    pub token: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickOutput {
    pub messages: Vec<ServerMessage>,
    pub acks: Vec<(u64, Ack)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngagementOutcome {
    pub id: String,
    pub target: String,
    pub phase: Phase,
    pub ground_truth_protected: bool,
    pub decisions: Vec<(Outcome, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub name: String,
    pub seed: u64,
    pub ticks: u64,
    pub log: Vec<LogEntry>,
    pub engagements: Vec<EngagementOutcome>,
    pub counts: Counts,
    /// Engagements that reached Engage with fully verified emblem evidence.
    pub safety_violations: Vec<String>,
}

impl RunResult {
    pub fn log_text(&self) -> String {
        emblem_core::engine::render_log(&self.log)
    }

    pub fn engagement_log(&self, id: &str) -> Vec<LogEntry> {
        self.log.iter().filter(|e| e.engagement == id).cloned().collect()
    }
}

pub const SEED_ENV: &str = "EMBLEM_SIM_SEED";

/// Seed precedence: explicit flag, then the environment, then the scenario.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, scenario: &Scenario) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer")),
        None => Ok(scenario.seed),
    }
}

fn ms(seconds: f64) -> u64 {
    if seconds.is_finite() && seconds > 0.0 {
        (seconds * 1000.0).round() as u64
    } else {
        0
    }
}

struct LiveEmitter {
    id: String,
    owner: usize,
    emitter: Emitter,
}

struct LiveJammer {
    field: JammerField,
    from_ms: u64,
    to_ms: Option<u64>,
}

struct WeaponRun {
    entity: usize,
    target: usize,
    detection_range_m: f64,
    clock_bias_s: f64,
    policy: WeaponPolicy,
    state: EngagementState,
    collected: usize,
    entered_engage: bool,
    operator_abort: bool,
    safety_violation: bool,
    scripted: VecDeque<ScriptedDecision>,
    due: Vec<(u64, ScriptedDecision)>,
}

pub struct Simulation {
    name: String,
    seed: u64,
    mode: WorldMode,
    epoch_s: i64,
    tick_ms: u64,
    tick_limit: u64,
    next_tick: u64,
    channel: Channel,
    authority: TrustAuthority,
    root_key: SigningKey,
    issuer_keys: BTreeMap<String, SigningKey>,
    entity_ids: Vec<String>,
    start: Vec<Position>,
    velocity: Vec<Position>,
    mobility: Vec<Mobility>,
    protected: Vec<bool>,
    positions: Vec<Position>,
    emitters: Vec<LiveEmitter>,
    emitter_offsets: Vec<u64>,
    jammers: Vec<LiveJammer>,
    satellites: Vec<(u32, Position)>,
    tags: Vec<(Tag, usize)>,
    bearing_sigma_rad: f64,
    pseudorange_noise_m: f64,
    passive_oracle: emblem_core::engine::PassiveOracle,
    tag_area_radius_m: f64,
    timeline: Vec<(u64, TimelineAction)>,
    timeline_next: usize,
    weapons: Vec<WeaponRun>,
    log: Vec<LogEntry>,
}

fn lat_lon_e7(mode: WorldMode, p: &Position) -> (i32, i32) {
    if mode == WorldMode::Flat || p.norm() == 0.0 {
        return (0, 0);
    }
    let lat = (p.z / p.norm()).asin().to_degrees();
    let lon = p.y.atan2(p.x).to_degrees();
    ((lat * 1e7).round() as i32, (lon * 1e7).round() as i32)
}

impl Simulation {
    /// Builds the world for a validated scenario.
    pub fn new(s: &Scenario, seed: u64) -> Result<Self, SetupError> {
        let mut bands = BandTable::default();
        for b in &s.bands {
            bands.set_range(b.band, b.nominal_range_m)?;
        }
        let channel = Channel::new(bands, seed);

        let key = |label: &str| SigningKey::from_seed(s.trust.scheme, seed, label);
        let root_key = key(&s.trust.root);
        let mut chain = TrustChain::new(&root_key);
        let mut issuer_keys = BTreeMap::new();
        issuer_keys.insert(s.trust.root.clone(), root_key.clone());
        let mut parent = root_key.clone();
        for label in &s.trust.intermediates {
            let k = key(label);
            chain.extend(&parent, k.public_key())?;
            issuer_keys.insert(label.clone(), k.clone());
            parent = k;
        }

        let entity_index: BTreeMap<&str, usize> =
            s.entities.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();

        let mut certs = BTreeMap::new();
        for c in &s.certificates {
            let subject = &s.entities[entity_index[c.subject.as_str()]];
            let (lat_e7, lon_e7) = lat_lon_e7(s.mode, &subject.position);
            let request = CertificateRequest {
                emblem_id: EmblemId::from_label(&c.id),
                subject_type: c.subject_type,
                valid_from: c.valid_from,
                valid_to: c.valid_to,
                lat_e7,
                lon_e7,
                zone_radius_m: c.zone_radius_m,
                subject_pubkey: key(&format!("subject:{}", c.subject)).public_key(),
            };
            let mut cert = issue_certificate(&request, &issuer_keys[&c.issuer], &chain)?;
            if c.forged {
                cert.signature = key(&format!("rogue:{}", c.id)).sign(&cert.tbs_bytes());
            }
            certs.insert(c.id.clone(), cert);
        }

        let registry = Registry::from_records(s.registry.iter().map(|r| RegistryRecord {
            emblem_id: EmblemId::from_label(&r.certificate),
            declared_position: r.declared_position,
            zone_radius_m: r.zone_radius_m,
        }));
        let crl = RevocationList::empty(&root_key, s.epoch_s);
        let authority = TrustAuthority::new(chain, crl, registry);

        let mut emitters = Vec::new();
        for e in &s.emitters {
            let frame = encode_beacon(&certs[&e.certificate], e.band)?;
            let emitter = Emitter::new(EntityId::from_label(&e.owner), e.band, frame, e.period_s, e.range_multiplier)?;
            emitters.push(LiveEmitter { id: e.id.clone(), owner: entity_index[e.owner.as_str()], emitter });
        }

        let mut jammers = Vec::new();
        for j in &s.jammers {
            let mode = match j.mode {
                JamModeSpec::Block => JamMode::Block,
                JamModeSpec::BitFlip { rate } => JamMode::BitFlip(rate),
            };
            let field = JammerField::new(EntityId::from_label(&j.id), j.band, j.center, j.radius_m, mode)?;
            jammers.push(LiveJammer { field, from_ms: ms(j.active_from_s), to_ms: j.active_to_s.map(ms) });
        }

        let tags = s
            .tags
            .iter()
            .map(|t| {
                let kind = match &t.kind {
                    TagKindSpec::Weapon => TagKind::WeaponTag,
                    TagKindSpec::Emblem { certificate } => TagKind::EmblemTag(EmblemId::from_label(certificate)),
                };
                (Tag { tag_id: TagId::from_label(&t.id), kind, powered: t.powered }, entity_index[t.carrier.as_str()])
            })
            .collect();

        let policies: BTreeMap<&str, &WeaponPolicy> = s.policies.iter().map(|p| (p.name.as_str(), &p.policy)).collect();
        let mut scripted: BTreeMap<&str, VecDeque<ScriptedDecision>> = BTreeMap::new();
        if let Hitl::Scripted { decisions } = &s.hitl {
            for d in decisions {
                scripted.entry(d.engagement_id.as_str()).or_default().push_back(d.clone());
            }
        }
        let weapons: Vec<WeaponRun> = s
            .weapons
            .iter()
            .map(|w| WeaponRun {
                entity: entity_index[w.entity.as_str()],
                target: entity_index[w.target.as_str()],
                detection_range_m: w.detection_range_m,
                clock_bias_s: w.clock_bias_s,
                policy: policies[w.policy.as_str()].clone(),
                state: EngagementState::new(&w.entity, &w.target),
                collected: 0,
                entered_engage: false,
                operator_abort: false,
                safety_violation: false,
                scripted: scripted.remove(w.entity.as_str()).unwrap_or_default(),
                due: Vec::new(),
            })
            .collect();

        let mut timeline: Vec<(u64, TimelineAction)> = s.timeline.iter().map(|e| (ms(e.at_s), e.action.clone())).collect();
        timeline.sort_by_key(|(t, _)| *t);

        let tick_ms = ms(s.tick_s).max(1);
        let mut sim = Simulation {
            name: s.name.clone(),
            seed,
            mode: s.mode,
            epoch_s: s.epoch_s,
            tick_ms,
            tick_limit: ms(s.duration_s) / tick_ms + 1,
            next_tick: 0,
            channel,
            authority,
            root_key,
            issuer_keys,
            entity_ids: s.entities.iter().map(|e| e.id.clone()).collect(),
            start: s.entities.iter().map(|e| e.position).collect(),
            velocity: s.entities.iter().map(|e| e.velocity).collect(),
            mobility: s.entities.iter().map(|e| e.mobility).collect(),
            protected: s.entities.iter().map(|e| e.ground_truth_protected).collect(),
            positions: s.entities.iter().map(|e| e.position).collect(),
            emitters,
            emitter_offsets: s.emitters.iter().map(|e| ms(e.offset_s)).collect(),
            jammers,
            satellites: s.satellites.iter().map(|x| (x.id, x.position)).collect(),
            tags,
            bearing_sigma_rad: s.sensors.bearing_noise_deg.to_radians(),
            pseudorange_noise_m: s.sensors.pseudorange_noise_m,
            passive_oracle: s.sensors.passive_oracle,
            tag_area_radius_m: s.sensors.tag_area_radius_m,
            timeline,
            timeline_next: 0,
            weapons,
            log: Vec::new(),
        };
        for w in &mut sim.weapons {
            let truth = sim.protected[w.target];
            w.state.log.push(LogEntry {
                time_ms: 0,
                engagement: w.state.id.clone(),
                phase: w.state.phase,
                code: EventCode::GroundTruth,
                detail: format!("target={} protected={truth}", w.state.target),
            });
        }
        let mut out = TickOutput::default();
        sim.collect(&mut out);
        Ok(sim)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tick_ms(&self) -> u64 {
        self.tick_ms
    }

    /// Caps the total number of ticks run.
    pub fn limit_ticks(&mut self, ticks: u64) {
        self.tick_limit = self.tick_limit.min(ticks);
    }

    pub fn now_ms(&self) -> u64 {
        self.next_tick.saturating_sub(1) * self.tick_ms
    }

    pub fn is_finished(&self) -> bool {
        self.next_tick >= self.tick_limit || self.weapons.iter().all(|w| w.state.is_terminal())
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn phase_of(&self, engagement: &str) -> Option<Phase> {
        self.weapons.iter().find(|w| w.state.id == engagement).map(|w| w.state.phase)
    }

    fn fires(&self, idx: usize, now: u64) -> bool {
        let e = &self.emitters[idx];
        let period = ms(e.emitter.period).max(1);
        let offset = self.emitter_offsets[idx];
        let fired_by = |t: Option<u64>| match t {
            Some(t) if t >= offset => (t - offset) / period + 1,
            _ => 0,
        };
        fired_by(Some(now)) > fired_by(now.checked_sub(self.tick_ms))
    }

    fn apply_timeline(&mut self, now: u64) {
        while let Some((at, action)) = self.timeline.get(self.timeline_next).cloned() {
            if at > now {
                break;
            }
            self.timeline_next += 1;
            let wall = self.epoch_s + (at / 1000) as i64;
            let result = match action {
                TimelineAction::RevokeEmblem { certificate } => self.authority.revoke(
                    RevocationTarget::Emblem(EmblemId::from_label(&certificate)),
                    &self.root_key,
                    wall,
                ),
                TimelineAction::RevokeIssuer { issuer } => {
                    let id = self.issuer_keys[&issuer].issuer_id();
                    self.authority.revoke(RevocationTarget::Issuer(id), &self.root_key, wall)
                }
                TimelineAction::RegistryOffline => {
                    self.authority.set_registry_online(false);
                    Ok(())
                }
                TimelineAction::RegistryOnline => {
                    self.authority.set_registry_online(true);
                    Ok(())
                }
            };
            result.expect("the root signs every revocation list");
        }
    }

    /// Runs one tick. `commands` are operator decisions received since the
    /// previous tick; they are applied after the engines step.
    pub fn tick(&mut self, commands: Vec<OperatorCommand>) -> TickOutput {
        let mut out = TickOutput::default();
        if self.is_finished() {
            for c in commands {
                out.acks.push((c.token, Ack::rejected(&c.engagement_id, "SimulationFinished")));
            }
            return out;
        }
        let tick = self.next_tick;
        self.next_tick += 1;
        let now = tick * self.tick_ms;
        let t_s = now as f64 / 1000.0;

        self.apply_timeline(now);
        for i in 0..self.positions.len() {
            let (p, v) = (self.start[i], self.velocity[i]);
            self.positions[i] = p.offset(v.x * t_s, v.y * t_s, v.z * t_s);
        }
        let active: Vec<JammerField> = self
            .jammers
            .iter()
            .filter(|j| now >= j.from_ms && j.to_ms.is_none_or(|to| now < to))
            .map(|j| j.field.clone())
            .collect();
        let firing: Vec<usize> = (0..self.emitters.len()).filter(|&i| self.fires(i, now)).collect();
        let snapshot = self.authority.snapshot();
        let wall_now = self.epoch_s + (now / 1000) as i64;

        for wi in 0..self.weapons.len() {
            if self.weapons[wi].state.is_terminal() {
                continue;
            }
            let inputs = self.tick_inputs(wi, tick, now, &firing, &active);
            let policy = self.weapons[wi].policy.clone();
            let mut state = std::mem::replace(&mut self.weapons[wi].state, EngagementState::new("", ""));
            {
                let w = &self.weapons[wi];
                let mut sensors = LiveSensors {
                    sim: self,
                    weapon: wi,
                    id: state.id.clone(),
                    tick,
                    snapshot: Arc::clone(&snapshot),
                    wall_now,
                    jammers: &active,
                    weapon_pos: self.positions[w.entity],
                    target: w.target,
                };
                step(&mut state, &inputs, &mut sensors, &policy);
            }
            self.weapons[wi].state = state;
            self.check_safety(wi, now);
        }

        for wi in 0..self.weapons.len() {
            let w = &mut self.weapons[wi];
            let (ready, later): (Vec<_>, Vec<_>) = std::mem::take(&mut w.due).into_iter().partition(|(d, _)| *d <= now);
            w.due = later;
            for (_, d) in ready {
                self.apply_decision(wi, d.decision, &d.operator_id, now);
            }
        }
        for c in commands {
            let ack = match self.weapons.iter().position(|w| w.state.id == c.engagement_id) {
                None => Ack::rejected(&c.engagement_id, "UnknownEngagement"),
                Some(wi) => {
                    if self.apply_decision(wi, c.choice, &c.operator_id, now) {
                        Ack::applied(&c.engagement_id)
                    } else {
                        Ack::rejected(&c.engagement_id, "StaleDecision")
                    }
                }
            };
            out.acks.push((c.token, ack));
        }
        self.collect(&mut out);
        out
    }

    fn tick_inputs(&self, wi: usize, tick: u64, now: u64, firing: &[usize], jammers: &[JammerField]) -> TickInputs {
        let w = &self.weapons[wi];
        let pos = self.positions[w.entity];
        let target_position = self.positions[w.target];
        let listens = &w.policy.capabilities.beacon_bands;
        let slot = (tick << 16) | wi as u64;
        let mut frames = Vec::new();
        for &i in firing {
            let e = &self.emitters[i];
            if !listens.contains(&e.emitter.band) {
                continue;
            }
            match self.channel.deliver(&e.emitter, &self.positions[e.owner], &pos, jammers, slot) {
                Delivery::Received(bytes) | Delivery::Corrupted(bytes) => {
                    frames.push(ReceivedFrame { emitter: e.id.clone(), band: e.emitter.band, bytes })
                }
                Delivery::Blocked | Delivery::OutOfRange => {}
            }
        }
        let mut bearings = Vec::new();
        if w.policy.capabilities.radar {
            for e in &self.emitters {
                if !listens.contains(&e.emitter.band) {
                    continue;
                }
                let owner_pos = self.positions[e.owner];
                let blocked = jammers.iter().any(|j| j.mode == JamMode::Block && j.covers(e.emitter.band, &pos));
                if blocked || !self.channel.in_range(&e.emitter, &owner_pos, &pos) || distance(&owner_pos, &pos) == 0.0 {
                    continue;
                }
                let mut rng = keyed_rng(
                    self.seed,
                    "bearing",
                    &[w.state.id.as_bytes(), e.id.as_bytes(), &tick.to_be_bytes()],
                );
                bearings.push((e.id.clone(), BearingObservation::noisy(pos, &owner_pos, self.bearing_sigma_rad, &mut rng)));
            }
        }
        TickInputs {
            now_ms: now,
            target_detected: distance(&pos, &target_position) <= w.detection_range_m,
            target_position,
            target_mobility: self.mobility[w.target],
            frames,
            bearings,
            jammed_bands: emblem_core::channel::jammed_bands(jammers, &pos),
        }
    }

    fn push_entry(&mut self, wi: usize, now: u64, code: EventCode, detail: String) {
        let st = &mut self.weapons[wi].state;
        st.log.push(LogEntry { time_ms: now, engagement: st.id.clone(), phase: st.phase, code, detail });
    }

    fn check_safety(&mut self, wi: usize, now: u64) {
        let w = &mut self.weapons[wi];
        if w.entered_engage || !matches!(w.state.phase, Phase::Engage | Phase::Assess) {
            return;
        }
        w.entered_engage = true;
        let verified: Vec<String> =
            w.state.evidence.beacons.values().filter(|b| b.fully_verified()).map(|b| b.emitter.clone()).collect();
        if !verified.is_empty() {
            w.safety_violation = true;
            self.push_entry(wi, now, EventCode::SafetyViolation, format!("verified_emitters={}", verified.join(",")));
        }
    }

    /// Returns whether the decision was applied.
    fn apply_decision(&mut self, wi: usize, choice: OperatorChoice, operator_id: &str, now: u64) -> bool {
        let policy = self.weapons[wi].policy.clone();
        let input = OperatorInput::Decision { choice, operator_id: operator_id.to_string() };
        match resolve_operator(&mut self.weapons[wi].state, input, &policy, now) {
            Ok(()) => {
                if choice == OperatorChoice::Abort {
                    self.weapons[wi].operator_abort = true;
                }
                self.check_safety(wi, now);
                true
            }
            Err(_) => {
                let c = match choice {
                    OperatorChoice::Abort => "abort",
                    OperatorChoice::Proceed => "proceed",
                };
                self.push_entry(wi, now, EventCode::StaleDecision, format!("decision={c} operator={operator_id}"));
                false
            }
        }
    }

    /// Moves new engagement log entries into the run log and derives the
    /// console messages and scripted-decision schedule from them.
    fn collect(&mut self, out: &mut TickOutput) {
        for w in &mut self.weapons {
            for e in &w.state.log[w.collected..] {
                match e.code {
                    EventCode::Phase => {
                        if let Some((_, to)) = e.detail.split_once("->") {
                            out.messages.push(ServerMessage::StateUpdate {
                                engagement_id: e.engagement.clone(),
                                phase: to.to_string(),
                                sim_time: e.time_ms as f64 / 1000.0,
                            });
                        }
                    }
                    EventCode::OperatorRequest => {
                        let evidence = w.state.last_decision().map(|d| d.evidence.clone()).expect("request follows a decision");
                        out.messages.push(ServerMessage::AbortRequest {
                            engagement_id: e.engagement.clone(),
                            sim_time: e.time_ms as f64 / 1000.0,
                            evidence,
                            timeout_s: w.policy.operator_timeout_s,
                        });
                        if let Some(d) = w.scripted.pop_front() {
                            w.due.push((e.time_ms + ms(d.after_s), d));
                        }
                    }
                    _ => {}
                }
                self.log.push(e.clone());
            }
            w.collected = w.state.log.len();
        }
    }

    /// Counts computed from engagement state, independently of the log.
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for w in &self.weapons {
            let protected = self.protected[w.target];
            c.engagements_total += 1;
            if w.entered_engage && protected {
                c.false_engagements += 1;
            }
            if matches!(w.state.phase, Phase::Aborted | Phase::Disintegrated) && !protected && !w.operator_abort {
                c.missed_legitimate += 1;
            }
            c.escalations += w.state.decisions.iter().filter(|d| d.outcome == Outcome::Escalate).count() as u64;
            c.misuse_events += w.state.misuse_count() as u64;
            c.safety_violations += u64::from(w.safety_violation);
        }
        c
    }

    /// Current console view: the phase of every engagement, followed by
    /// the open operator requests.
    pub fn console_snapshot(&self) -> Vec<ServerMessage> {
        let now = self.now_ms() as f64 / 1000.0;
        let mut out: Vec<ServerMessage> = self
            .weapons
            .iter()
            .map(|w| ServerMessage::StateUpdate {
                engagement_id: w.state.id.clone(),
                phase: w.state.phase.to_string(),
                sim_time: now,
            })
            .collect();
        out.extend(self.pending_requests());
        out
    }

    pub fn pending_requests(&self) -> Vec<ServerMessage> {
        self.weapons
            .iter()
            .filter(|w| w.state.phase == Phase::AwaitingOperator)
            .filter_map(|w| {
                let d = w.state.last_decision()?;
                Some(ServerMessage::AbortRequest {
                    engagement_id: w.state.id.clone(),
                    sim_time: w.state.phase_entered_ms as f64 / 1000.0,
                    evidence: d.evidence.clone(),
                    timeout_s: w.policy.operator_timeout_s,
                })
            })
            .collect()
    }

    pub fn finish(self) -> RunResult {
        let counts = self.counts();
        RunResult {
            name: self.name,
            seed: self.seed,
            ticks: self.next_tick,
            engagements: self
                .weapons
                .iter()
                .map(|w| EngagementOutcome {
                    id: w.state.id.clone(),
                    target: w.state.target.clone(),
                    phase: w.state.phase,
                    ground_truth_protected: self.protected[w.target],
                    decisions: w.state.decisions.iter().map(|d| (d.outcome, d.reason.clone())).collect(),
                })
                .collect(),
            safety_violations: self.weapons.iter().filter(|w| w.safety_violation).map(|w| w.state.id.clone()).collect(),
            log: self.log,
            counts,
        }
    }

    pub fn mode(&self) -> WorldMode {
        self.mode
    }

    pub fn entity_position(&self, id: &str) -> Option<Position> {
        self.entity_ids.iter().position(|e| e == id).map(|i| self.positions[i])
    }
}

/// Runs a scenario to completion without an operator connection.
pub fn run_scenario(s: &Scenario, seed: u64, max_ticks: Option<u64>) -> Result<RunResult, SetupError> {
    let mut sim = Simulation::new(s, seed)?;
    if let Some(n) = max_ticks {
        sim.limit_ticks(n);
    }
    while !sim.is_finished() {
        sim.tick(Vec::new());
    }
    Ok(sim.finish())
}

/// Sensor products for one weapon during one tick.
struct LiveSensors<'a> {
    sim: &'a Simulation,
    weapon: usize,
    id: String,
    tick: u64,
    snapshot: Arc<AuthoritySnapshot>,
    wall_now: i64,
    jammers: &'a [JammerField],
    weapon_pos: Position,
    target: usize,
}

impl LiveSensors<'_> {
    fn rng(&self, purpose: &str) -> rand_chacha::ChaCha8Rng {
        keyed_rng(self.sim.seed, purpose, &[self.id.as_bytes(), &self.tick.to_be_bytes()])
    }

    fn policy(&self) -> &WeaponPolicy {
        &self.sim.weapons[self.weapon].policy
    }

    fn reader(&self) -> RfidReader {
        RfidReader { position: self.weapon_pos, band: self.policy().rfid_band }
    }
}

impl Sensors for LiveSensors<'_> {
    fn verify(&mut self, cert: &EmblemCertificate) -> VerificationVerdict {
        verify_certificate(cert, &self.snapshot.chain, &self.snapshot.crl, self.wall_now)
    }

    fn self_fix(&mut self) -> Result<GpsFix, GeoError> {
        let denied = self.jammers.iter().any(|j| j.covers(BandKind::LBand, &self.weapon_pos));
        if denied {
            return Err(GeoError::InsufficientSatellites);
        }
        let bias = self.sim.weapons[self.weapon].clock_bias_s;
        let mut rng = self.rng("gps");
        let noise = Normal::new(0.0, self.sim.pseudorange_noise_m).ok();
        let signals: Vec<SatelliteSignal> = self
            .sim
            .satellites
            .iter()
            .map(|(id, p)| {
                let n = match &noise {
                    Some(d) if self.sim.pseudorange_noise_m > 0.0 => d.sample(&mut rng),
                    _ => 0.0,
                };
                SatelliteSignal::observe(*id, *p, &self.weapon_pos, bias, n)
            })
            .collect();
        trilaterate(&signals, self.sim.mode)
    }

    fn registry_query(&mut self, at: &Position, radius: f64) -> Result<Vec<RegistryRecord>, RegistryError> {
        self.snapshot.registry.query(at, radius)
    }

    fn challenge(&mut self, emblem: EmblemId, emitter_position: &Position) -> ChallengeOutcome {
        let reader = self.reader();
        let reach = |t: &Tag| self.sim.channel.reach(reader.band, t.range_multiplier());
        let candidates: Vec<(&Tag, Position)> = self
            .sim
            .tags
            .iter()
            .map(|(t, carrier)| (t, self.sim.positions[*carrier]))
            .filter(|(t, p)| matches!(t.kind, TagKind::EmblemTag(_)) && distance(p, &reader.position) <= reach(t))
            .collect();
        let responder = candidates
            .iter()
            .find(|(t, _)| t.kind == TagKind::EmblemTag(emblem))
            .or_else(|| {
                candidates
                    .iter()
                    .min_by(|a, b| distance(&a.1, emitter_position).total_cmp(&distance(&b.1, emitter_position)))
            })
            .map(|(t, p)| (*t, *p));
        let slot = (self.tick << 16) | self.weapon as u64;
        challenge_response(&reader, emblem, responder, &self.sim.channel, self.jammers, slot)
    }

    fn passive(&mut self, sensor_range_m: f64) -> Option<PassiveVerdict> {
        let label = if self.sim.protected[self.target] { PassiveLabel::Protected } else { PassiveLabel::Combatant };
        let range = distance(&self.weapon_pos, &self.sim.positions[self.target]);
        let mut rng = self.rng("passive");
        passive_recognize(label, range, sensor_range_m, &self.sim.passive_oracle, &mut rng).ok()
    }

    fn screen_tags(&mut self, protocol: InventoryProtocol) -> TagScreenReport {
        let target_pos = self.sim.positions[self.target];
        let area: Vec<(Tag, Position)> = self
            .sim
            .tags
            .iter()
            .map(|(t, carrier)| (*t, self.sim.positions[*carrier]))
            .filter(|(_, p)| distance(p, &target_pos) <= self.sim.tag_area_radius_m)
            .collect();
        let mut rng = self.rng("screen");
        screen_mobile_tags(&self.reader(), &target_pos, &area, protocol, &self.sim.channel, self.jammers, &mut rng)
    }
}
