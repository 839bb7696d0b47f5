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

//! Range-gated, jammable multi-band channel.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{distance, BandKind, BandTable, EntityId, Position};
use crate::rng::keyed_rng;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ChannelError {
    #[error("emitter period must be positive")]
    InvalidPeriod,
    #[error("range multiplier must be in (0, 1]")]
    InvalidRangeMultiplier,
    #[error("jammer radius must be positive")]
    InvalidJammerRadius,
    #[error("bit flip rate must be in (0, 0.5]")]
    InvalidFlipRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Emitter {
    pub owner: EntityId,
    pub band: BandKind,
    pub frame: Vec<u8>,
    pub period: f64,
    pub range_multiplier: f64,
}

impl Emitter {
    pub fn new(
        owner: EntityId,
        band: BandKind,
        frame: Vec<u8>,
        period: f64,
        range_multiplier: f64,
    ) -> Result<Self, ChannelError> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(ChannelError::InvalidPeriod);
        }
        if !(range_multiplier > 0.0 && range_multiplier <= 1.0) {
            return Err(ChannelError::InvalidRangeMultiplier);
        }
        Ok(Self { owner, band, frame, period, range_multiplier })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JamMode {
    Block,
    BitFlip(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JammerField {
    pub owner: EntityId,
    pub band: BandKind,
    pub center: Position,
    pub radius: f64,
    pub mode: JamMode,
}

impl JammerField {
    pub fn new(owner: EntityId, band: BandKind, center: Position, radius: f64, mode: JamMode) -> Result<Self, ChannelError> {
        if !(radius > 0.0) {
            return Err(ChannelError::InvalidJammerRadius);
        }
        if let JamMode::BitFlip(rate) = mode {
            if !(rate > 0.0 && rate <= 0.5) {
                return Err(ChannelError::InvalidFlipRate);
            }
        }
        Ok(Self { owner, band, center, radius, mode })
    }

    pub fn covers(&self, band: BandKind, receiver: &Position) -> bool {
        self.band == band && distance(&self.center, receiver) <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delivery {
    Received(Vec<u8>),
    Corrupted(Vec<u8>),
    Blocked,
    OutOfRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotOutcome<T> {
    Idle,
    Singleton(T),
    Collision,
}

impl<T> SlotOutcome<T> {
    /// Classifies a slot by the number of transmissions heard. No capture.
    pub fn from_transmissions(mut heard: impl Iterator<Item = T>) -> Self {
        match (heard.next(), heard.next()) {
            (None, _) => SlotOutcome::Idle,
            (Some(t), None) => SlotOutcome::Singleton(t),
            (Some(_), Some(_)) => SlotOutcome::Collision,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SlotOutcome::Idle => "idle",
            SlotOutcome::Singleton(_) => "singleton",
            SlotOutcome::Collision => "collision",
        }
    }
}

/// Channel environment shared by one simulation.
#[derive(Debug, Clone)]
pub struct Channel {
    pub bands: BandTable,
    pub seed: u64,
}

impl Channel {
    pub fn new(bands: BandTable, seed: u64) -> Self {
        Self { bands, seed }
    }

    pub fn reach(&self, band: BandKind, range_multiplier: f64) -> f64 {
        self.bands.nominal_range(band) * range_multiplier
    }

    /// Closed boundary: exactly at range is in range.
    pub fn in_range(&self, emitter: &Emitter, emitter_pos: &Position, receiver_pos: &Position) -> bool {
        distance(emitter_pos, receiver_pos) <= self.reach(emitter.band, emitter.range_multiplier)
    }

    pub fn deliver(
        &self,
        emitter: &Emitter,
        emitter_pos: &Position,
        receiver_pos: &Position,
        jammers: &[JammerField],
        slot: u64,
    ) -> Delivery {
        if !self.in_range(emitter, emitter_pos, receiver_pos) {
            return Delivery::OutOfRange;
        }
        let applicable: Vec<&JammerField> = jammers.iter().filter(|j| j.covers(emitter.band, receiver_pos)).collect();
        if applicable.iter().any(|j| j.mode == JamMode::Block) {
            return Delivery::Blocked;
        }
        let mut bytes = emitter.frame.clone();
        let mut flipped = 0usize;
        let mut rng = keyed_rng(self.seed, "deliver", &[&emitter.owner.0, &slot.to_be_bytes()]);
        for j in applicable {
            if let JamMode::BitFlip(rate) = j.mode {
                for byte in bytes.iter_mut() {
                    for bit in 0..8 {
                        if rng.gen_bool(rate) {
                            *byte ^= 1 << bit;
                            flipped += 1;
                        }
                    }
                }
            }
        }
        if flipped > 0 {
            Delivery::Corrupted(bytes)
        } else {
            Delivery::Received(bytes)
        }
    }

    /// Outcome of one slot on a shared band at `receiver_pos`.
    pub fn collision_set<'a>(
        &self,
        transmissions: &'a [(Emitter, Position)],
        receiver_pos: &Position,
    ) -> SlotOutcome<&'a [u8]> {
        SlotOutcome::from_transmissions(
            transmissions
                .iter()
                .filter(|(e, p)| self.in_range(e, p, receiver_pos))
                .map(|(e, _)| e.frame.as_slice()),
        )
    }
}

/// Bands denied outright at `receiver_pos` by block-mode jammers.
pub fn jammed_bands(jammers: &[JammerField], receiver_pos: &Position) -> BTreeSet<BandKind> {
    jammers
        .iter()
        .filter(|j| j.mode == JamMode::Block && distance(&j.center, receiver_pos) <= j.radius)
        .map(|j| j.band)
        .collect()
}
