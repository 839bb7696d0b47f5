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

//! Protected-facility position registry.
//!
//! Records are kept in a map keyed by emblem id plus an index sorted by the
//! x coordinate; a query scans only the x-slab that can contain a match.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::RegistryError;
use crate::model::{distance, EmblemId, Position};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryRecord {
    pub emblem_id: EmblemId,
    pub declared_position: Position,
    pub zone_radius_m: f64,
}

/// Persisted form of a registry.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegistrySnapshot {
    pub records: Vec<RegistryRecord>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Registry {
    records: BTreeMap<EmblemId, RegistryRecord>,
    by_x: Vec<(f64, EmblemId)>,
    max_zone: f64,
    offline: bool,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: impl IntoIterator<Item = RegistryRecord>) -> Self {
        let mut r = Self::default();
        for rec in records {
            r.records.insert(rec.emblem_id, rec);
        }
        r.reindex();
        r
    }

    pub fn from_snapshot(s: &RegistrySnapshot) -> Self {
        Self::from_records(s.records.iter().cloned())
    }

    pub fn snapshot(&self) -> RegistrySnapshot {
        RegistrySnapshot {
            records: self.records.values().cloned().collect(),
        }
    }

    fn reindex(&mut self) {
        self.by_x = self
            .records
            .values()
            .map(|r| (r.declared_position.x, r.emblem_id))
            .collect();
        self.by_x.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.max_zone = self.records.values().map(|r| r.zone_radius_m).fold(0.0, f64::max);
    }

    /// Inserts or replaces the record for an emblem.
    pub fn upsert(&mut self, record: RegistryRecord) {
        self.records.insert(record.emblem_id, record);
        self.reindex();
    }

    pub fn remove(&mut self, id: &EmblemId) -> Option<RegistryRecord> {
        let r = self.records.remove(id);
        self.reindex();
        r
    }

    pub fn get(&self, id: &EmblemId) -> Option<&RegistryRecord> {
        self.records.get(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn set_online(&mut self, online: bool) {
        self.offline = !online;
    }

    pub fn is_online(&self) -> bool {
        !self.offline
    }

    /// Records whose declared position lies within `radius + zone_radius_m`
    /// of `position`, ordered by emblem id.
    pub fn query(&self, position: &Position, radius: f64) -> Result<Vec<RegistryRecord>, RegistryError> {
        if self.offline {
            return Err(RegistryError::RegistryUnavailable);
        }
        if !(radius >= 0.0) {
            return Err(RegistryError::NegativeRadius);
        }
        let reach = radius + self.max_zone;
        let lo = self.by_x.partition_point(|(x, _)| *x < position.x - reach);
        let mut hits: Vec<RegistryRecord> = self.by_x[lo..]
            .iter()
            .take_while(|(x, _)| *x <= position.x + reach)
            .filter_map(|(_, id)| self.records.get(id))
            .filter(|r| distance(&r.declared_position, position) <= radius + r.zone_radius_m)
            .cloned()
            .collect();
        hits.sort_by_key(|a| a.emblem_id);
        Ok(hits)
    }
}
