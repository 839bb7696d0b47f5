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

//! Tag inventory over a slotted channel without capture effect.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tag::{TagId, TAG_ID_BITS};
use crate::channel::SlotOutcome;

pub const DEFAULT_MAX_ROUNDS: u32 = 32;
pub const DEFAULT_FRAME_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case", tag = "kind")]
#[derive(Default)]
pub enum InventoryProtocol {
    Aloha { frame_size: usize, max_rounds: u32 },
    #[default]
    Tree,
    /// Same observable behaviour as the tree walk on this channel model.
    BitwiseArbitration,
}


/// A tag id prefix of `len` bits, stored right-aligned in `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prefix {
    pub bits: u128,
    pub len: u32,
}

impl Prefix {
    pub const ROOT: Prefix = Prefix { bits: 0, len: 0 };

    fn child(self, bit: u128) -> Prefix {
        Prefix { bits: (self.bits << 1) | bit, len: self.len + 1 }
    }

    /// Half-open id range covered by the prefix.
    fn range(self) -> (u128, u128) {
        let shift = TAG_ID_BITS - self.len;
        (self.bits << shift, (self.bits + 1) << shift)
    }

    pub fn matches(self, id: TagId) -> bool {
        let (lo, hi) = self.range();
        (lo..hi).contains(&id.value())
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.bits >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        f.write_str("*")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceLine {
    AlohaSlot { round: u32, slot: usize, outcome: SlotOutcome<TagId> },
    TreeQuery { prefix: Prefix, outcome: SlotOutcome<TagId> },
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, outcome) = match self {
            TraceLine::AlohaSlot { round, slot, outcome } => (format!("aloha round={round} slot={slot}"), outcome),
            TraceLine::TreeQuery { prefix, outcome } => (format!("tree prefix={prefix}"), outcome),
        };
        match outcome {
            SlotOutcome::Singleton(id) => write!(f, "{head} singleton tag={id}"),
            other => write!(f, "{head} {}", other.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoundStats {
    pub frame_size: usize,
    pub idle: usize,
    pub singletons: usize,
    pub collisions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InventoryResult {
    pub identified: BTreeSet<TagId>,
    pub slots_used: u64,
    pub queries_used: u64,
    pub rounds: Vec<RoundStats>,
    pub trace: Vec<TraceLine>,
}

impl InventoryResult {
    /// One line per slot or query.
    pub fn trace_log(&self) -> String {
        self.trace.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// Framed slotted ALOHA. Each round every unidentified tag picks a slot in
/// `[0, frame_size)`; singleton slots identify their tag.
pub fn inventory_aloha<R: Rng>(tags: &[TagId], frame_size: usize, max_rounds: u32, rng: &mut R) -> InventoryResult {
    assert!(frame_size >= 1 && max_rounds >= 1, "frame size and round limit must be positive");
    let mut pending: Vec<TagId> = tags.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut result = InventoryResult::default();
    for round in 1..=max_rounds {
        let mut slots: Vec<Vec<TagId>> = vec![Vec::new(); frame_size];
        for &t in &pending {
            slots[rng.gen_range(0..frame_size)].push(t);
        }
        let mut stats = RoundStats { frame_size, ..Default::default() };
        for (slot, responders) in slots.iter().enumerate() {
            let outcome = SlotOutcome::from_transmissions(responders.iter().copied());
            match outcome {
                SlotOutcome::Idle => stats.idle += 1,
                SlotOutcome::Singleton(id) => {
                    stats.singletons += 1;
                    result.identified.insert(id);
                }
                SlotOutcome::Collision => stats.collisions += 1,
            }
            result.trace.push(TraceLine::AlohaSlot { round, slot, outcome });
        }
        result.slots_used += frame_size as u64;
        result.queries_used += 1;
        result.rounds.push(stats);
        pending.retain(|t| !result.identified.contains(t));
        if pending.is_empty() {
            break;
        }
    }
    result
}

/// Binary tree walk on id prefixes, `0` branch first.
pub fn inventory_tree(tags: &[TagId]) -> InventoryResult {
    let mut sorted: Vec<u128> = tags.iter().map(|t| t.value()).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let mut result = InventoryResult::default();
    let mut stack = vec![Prefix::ROOT];
    while let Some(prefix) = stack.pop() {
        let (lo, hi) = prefix.range();
        let start = sorted.partition_point(|&v| v < lo);
        let end = sorted.partition_point(|&v| v < hi);
        let outcome = SlotOutcome::from_transmissions(sorted[start..end].iter().map(|&v| TagId::new(v)));
        result.queries_used += 1;
        result.slots_used += 1;
        match outcome {
            SlotOutcome::Singleton(id) => {
                result.identified.insert(id);
            }
            SlotOutcome::Collision => {
                stack.push(prefix.child(1));
                stack.push(prefix.child(0));
            }
            SlotOutcome::Idle => {}
        }
        result.trace.push(TraceLine::TreeQuery { prefix, outcome });
    }
    result
}

pub fn run_inventory<R: Rng>(tags: &[TagId], protocol: InventoryProtocol, rng: &mut R) -> InventoryResult {
    match protocol {
        InventoryProtocol::Aloha { frame_size, max_rounds } => inventory_aloha(tags, frame_size, max_rounds, rng),
        InventoryProtocol::Tree | InventoryProtocol::BitwiseArbitration => inventory_tree(tags),
    }
}
