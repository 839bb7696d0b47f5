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

//! RFID tags, anti-collision inventory and emblem challenge-response.

mod challenge;
mod inventory;
mod tag;

pub use challenge::{challenge_response, ChallengeOutcome, RfidReader};
pub use inventory::{
    inventory_aloha, inventory_tree, run_inventory, InventoryProtocol, InventoryResult, Prefix, RoundStats,
    TraceLine, DEFAULT_FRAME_SIZE, DEFAULT_MAX_ROUNDS,
};
pub use tag::{Powered, Tag, TagId, TagKind, TAG_ID_BITS};
