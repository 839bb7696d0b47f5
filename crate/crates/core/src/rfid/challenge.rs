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

use serde::{Deserialize, Serialize};

use super::tag::{Tag, TagKind};
use crate::channel::{Channel, Delivery, Emitter, JammerField};
use crate::codec::{decode_payload, encode_payload};
use crate::model::{BandKind, EmblemId, EntityId, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChallengeOutcome {
    Confirmed(EmblemId),
    NoResponse,
    Mismatch,
}

impl ChallengeOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ChallengeOutcome::Confirmed(_) => "Confirmed",
            ChallengeOutcome::NoResponse => "NoResponse",
            ChallengeOutcome::Mismatch => "Mismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfidReader {
    pub position: Position,
    pub band: BandKind,
}

/// Challenges the responding tag for `challenged` and checks its echo.
///
/// The echo is the tag's emblem id in a coded frame sent back over the
/// reader's band; passive tags reach half the band range.
pub fn challenge_response(
    reader: &RfidReader,
    challenged: EmblemId,
    responder: Option<(&Tag, Position)>,
    channel: &Channel,
    jammers: &[JammerField],
    slot: u64,
) -> ChallengeOutcome {
    let Some((tag, tag_pos)) = responder else {
        return ChallengeOutcome::NoResponse;
    };
    let TagKind::EmblemTag(echoed) = tag.kind else {
        return ChallengeOutcome::NoResponse;
    };
    let frame = encode_payload(&echoed.0, reader.band).expect("16-byte echo fits every band");
    let owner = EntityId::from_label(&tag.tag_id.to_string());
    let echo = Emitter::new(owner, reader.band, frame, 1.0, tag.range_multiplier()).expect("static emitter parameters");
    let bytes = match channel.deliver(&echo, &tag_pos, &reader.position, jammers, slot) {
        Delivery::Received(b) | Delivery::Corrupted(b) => b,
        Delivery::Blocked | Delivery::OutOfRange => return ChallengeOutcome::NoResponse,
    };
    let Ok(decoded) = decode_payload(&bytes) else {
        return ChallengeOutcome::NoResponse;
    };
    if decoded.frame.payload == challenged.0 {
        ChallengeOutcome::Confirmed(challenged)
    } else {
        ChallengeOutcome::Mismatch
    }
}
