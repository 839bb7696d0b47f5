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

//! Mobile-unit tag screening and the passive recognition oracle.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::evidence::{PassiveLabel, PassiveVerdict, TagScreen};
use super::pipeline::TagScreenReport;
use crate::channel::{Channel, JamMode, JammerField};
use crate::model::{distance, Position};
use crate::rfid::{run_inventory, InventoryProtocol, RfidReader, Tag, TagKind};

/// Inventories the tags a reader can hear around a mobile target.
///
/// A blocked reader band, or a target beyond the passive-tag read range,
/// yields `Unavailable` rather than a false `NoTags`.
pub fn screen_mobile_tags<R: Rng>(
    reader: &RfidReader,
    target: &Position,
    tags: &[(Tag, Position)],
    protocol: InventoryProtocol,
    channel: &Channel,
    jammers: &[JammerField],
    rng: &mut R,
) -> TagScreenReport {
    let blocked = jammers.iter().any(|j| j.mode == JamMode::Block && j.covers(reader.band, &reader.position));
    if blocked {
        return TagScreenReport { screen: TagScreen::Unavailable, detail: "reason=jammed".into() };
    }
    if distance(&reader.position, target) > channel.reach(reader.band, 0.5) {
        return TagScreenReport { screen: TagScreen::Unavailable, detail: "reason=out_of_range".into() };
    }
    let heard: BTreeMap<_, _> = tags
        .iter()
        .filter(|(t, p)| distance(&reader.position, p) <= channel.reach(reader.band, t.range_multiplier()))
        .map(|(t, _)| (t.tag_id, t.kind))
        .collect();
    let ids: Vec<_> = heard.keys().copied().collect();
    let result = run_inventory(&ids, protocol, rng);
    let weapons = result.identified.iter().filter(|id| heard[id] == TagKind::WeaponTag).count();
    let screen = if weapons > 0 { TagScreen::ArmedTagPresent } else { TagScreen::NoTags };
    TagScreenReport {
        screen,
        detail: format!(
            "identified={} weapon_tags={} slots={} queries={}",
            result.identified.len(),
            weapons,
            result.slots_used,
            result.queries_used
        ),
    }
}

/// Error model of the passive EO/IR classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct PassiveOracle {
    /// P(label protected | combatant).
    pub false_positive: f64,
    /// P(label combatant | protected).
    pub false_negative: f64,
    pub confidence_min: f64,
    pub confidence_max: f64,
}

impl Default for PassiveOracle {
    fn default() -> Self {
        PassiveOracle { false_positive: 0.0, false_negative: 0.0, confidence_min: 0.8, confidence_max: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PassiveError {
    #[error("target beyond passive sensor range")]
    SensorOutOfRange,
}

/// Flips the supplied reference label at the configured error rates.
pub fn passive_recognize<R: Rng>(
    reference_label: PassiveLabel,
    range_m: f64,
    sensor_range_m: f64,
    oracle: &PassiveOracle,
    rng: &mut R,
) -> Result<PassiveVerdict, PassiveError> {
    if range_m > sensor_range_m {
        return Err(PassiveError::SensorOutOfRange);
    }
    let flip_p = match reference_label {
        PassiveLabel::Protected => oracle.false_negative,
        PassiveLabel::Combatant => oracle.false_positive,
    };
    let flip = rng.gen::<f64>() < flip_p;
    let label = match (reference_label, flip) {
        (l, false) => l,
        (PassiveLabel::Protected, true) => PassiveLabel::Combatant,
        (PassiveLabel::Combatant, true) => PassiveLabel::Protected,
    };
    let (lo, hi) = (oracle.confidence_min.clamp(0.0, 1.0), oracle.confidence_max.clamp(0.0, 1.0));
    let confidence = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    Ok(PassiveVerdict { label, confidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BandKind, BandTable, EntityId};
    use crate::rfid::{Powered, TagId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weapon(i: u128) -> Tag {
        Tag { tag_id: TagId::new(i), kind: TagKind::WeaponTag, powered: Powered::Passive }
    }

    fn reader() -> RfidReader {
        RfidReader { position: Position::ORIGIN, band: BandKind::RfidUhf }
    }

    #[test]
    fn armed_and_unarmed_targets() {
        let ch = Channel::new(BandTable::default(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let at = Position::new(20.0, 0.0, 0.0);
        let r = screen_mobile_tags(&reader(), &at, &[(weapon(7), at)], InventoryProtocol::Tree, &ch, &[], &mut rng);
        assert_eq!(r.screen, TagScreen::ArmedTagPresent);
        let r = screen_mobile_tags(&reader(), &at, &[], InventoryProtocol::Tree, &ch, &[], &mut rng);
        assert_eq!(r.screen, TagScreen::NoTags);
    }

    #[test]
    fn out_of_range_or_jammed_is_unavailable() {
        let ch = Channel::new(BandTable::default(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let far = Position::new(80.0, 0.0, 0.0);
        let r = screen_mobile_tags(&reader(), &far, &[(weapon(1), far)], InventoryProtocol::Tree, &ch, &[], &mut rng);
        assert_eq!(r.screen, TagScreen::Unavailable);
        let near = Position::new(5.0, 0.0, 0.0);
        let j = JammerField::new(EntityId::from_label("j"), BandKind::RfidUhf, Position::ORIGIN, 10.0, JamMode::Block)
            .unwrap();
        let r = screen_mobile_tags(&reader(), &near, &[(weapon(1), near)], InventoryProtocol::Tree, &ch, &[j], &mut rng);
        assert_eq!(r.screen, TagScreen::Unavailable);
    }

    #[test]
    fn aloha_screen_agrees_with_truth() {
        let ch = Channel::new(BandTable::default(), 1);
        let at = Position::new(10.0, 0.0, 0.0);
        let mut agree = 0;
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tags: Vec<_> = (0..50).map(|_| (weapon(rng.gen()), at)).collect();
            let protocol = InventoryProtocol::Aloha { frame_size: 64, max_rounds: 32 };
            let r = screen_mobile_tags(&reader(), &at, &tags, protocol, &ch, &[], &mut rng);
            agree += usize::from(r.screen == TagScreen::ArmedTagPresent);
        }
        assert!(agree >= 990, "{agree}");
    }

    #[test]
    fn perfect_oracle_returns_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = PassiveOracle::default();
        for l in [PassiveLabel::Protected, PassiveLabel::Combatant] {
            for _ in 0..100 {
                let v = passive_recognize(l, 100.0, 2000.0, &o, &mut rng).unwrap();
                assert_eq!(v.label, l);
                assert!((0.8..=1.0).contains(&v.confidence));
            }
        }
    }

    #[test]
    fn beyond_range_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = passive_recognize(PassiveLabel::Protected, 2000.5, 2000.0, &PassiveOracle::default(), &mut rng);
        assert_eq!(r, Err(PassiveError::SensorOutOfRange));
    }

    #[test]
    fn false_negative_rate_matches_binomial() {
        let o = PassiveOracle { false_negative: 0.1, ..Default::default() };
        let mut misses = 0u32;
        for i in 0..10_000u64 {
            let mut rng = crate::rng::keyed_rng(9, "passive", &[&i.to_be_bytes()]);
            let v = passive_recognize(PassiveLabel::Protected, 10.0, 2000.0, &o, &mut rng).unwrap();
            misses += u32::from(v.label == PassiveLabel::Combatant);
        }
        // 99% normal interval for Binomial(10000, 0.1): 1000 +/- 2.576 * 30
        assert!((923..=1077).contains(&misses), "{misses}");
    }
}
