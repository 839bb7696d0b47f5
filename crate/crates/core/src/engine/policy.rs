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

use crate::model::BandKind;
use crate::rfid::InventoryProtocol;

/// Action taken on confirmed protective evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum ProtectedAction {
    Abort,
    Disintegrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum TimeoutAction {
    Abort,
    Proceed,
}

/// Response to a passive classifier labelling the target protected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum PassiveResponse {
    Bar,
    Escalate,
}

/// Sensors and pipeline stages fitted to a weapon system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Capabilities {
    pub beacon_bands: Vec<BandKind>,
    pub gps: bool,
    pub radar: bool,
    pub registry: bool,
    pub rfid: bool,
    pub passive: bool,
    pub mobile_screening: bool,
}

impl Default for Capabilities {
    fn default() -> Self {
        Capabilities {
            beacon_bands: vec![BandKind::XBand],
            gps: true,
            radar: true,
            registry: true,
            rfid: true,
            passive: true,
            mobile_screening: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct WeaponPolicy {
    pub on_protected: ProtectedAction,
    pub capabilities: Capabilities,
    pub inventory: InventoryProtocol,
    pub rfid_band: BandKind,
    pub registry_match_radius_m: f64,
    pub passive_sensor_range_m: f64,
    pub passive_response: PassiveResponse,
    pub operator_timeout_s: f64,
    pub timeout_action: TimeoutAction,
    /// Time spent in each of Fix and Track.
    pub phase_dwell_s: f64,
    /// Time spent listening for beacons in Target before deciding.
    pub listen_window_s: f64,
}

impl Default for WeaponPolicy {
    fn default() -> Self {
        WeaponPolicy {
            on_protected: ProtectedAction::Abort,
            capabilities: Capabilities::default(),
            inventory: InventoryProtocol::Tree,
            rfid_band: BandKind::RfidUhf,
            registry_match_radius_m: 500.0,
            passive_sensor_range_m: 2000.0,
            passive_response: PassiveResponse::Escalate,
            operator_timeout_s: 30.0,
            timeout_action: TimeoutAction::Abort,
            phase_dwell_s: 1.0,
            listen_window_s: 2.0,
        }
    }
}

pub(crate) fn seconds_to_ms(s: f64) -> u64 {
    if s.is_finite() && s > 0.0 {
        (s * 1000.0).round() as u64
    } else {
        0
    }
}

impl WeaponPolicy {
    /// Missile profile: destroys itself instead of breaking off.
    pub fn missile() -> Self {
        WeaponPolicy { on_protected: ProtectedAction::Disintegrate, ..Default::default() }
    }

    pub fn operator_timeout_ms(&self) -> u64 {
        seconds_to_ms(self.operator_timeout_s)
    }

    pub fn phase_dwell_ms(&self) -> u64 {
        seconds_to_ms(self.phase_dwell_s)
    }

    pub fn listen_window_ms(&self) -> u64 {
        seconds_to_ms(self.listen_window_s)
    }

    /// Bands whose jamming the weapon treats as a degraded picture.
    pub fn monitored_bands(&self) -> Vec<BandKind> {
        let mut bands = self.capabilities.beacon_bands.clone();
        if self.capabilities.gps {
            bands.push(BandKind::LBand);
        }
        if self.capabilities.rfid || self.capabilities.mobile_screening {
            bands.push(self.rfid_band);
        }
        bands.sort();
        bands.dedup();
        bands
    }
}
