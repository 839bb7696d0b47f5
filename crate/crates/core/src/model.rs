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

//! Domain vocabulary shared by every other module: identifiers, positions,
//! frequency bands and the active/passive x stationary/mobile protection
//! matrix.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ModelError;

macro_rules! hex_id {
    ($(#[$meta:meta])* $name:ident, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(pub [u8; $len]);

        impl $name {
            pub const LEN: usize = $len;

            /// Derives a stable identifier from a human-readable label.
            pub fn from_label(label: &str) -> Self {
                let digest = Sha256::digest(label.as_bytes());
                let mut out = [0u8; $len];
                out.copy_from_slice(&digest[..$len]);
                Self(out)
            }

            pub fn as_bytes(&self) -> &[u8; $len] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }

            pub fn from_hex(s: &str) -> Result<Self, ModelError> {
                let bytes = hex::decode(s).map_err(|_| ModelError::BadHex(s.to_string()))?;
                let arr: [u8; $len] = bytes
                    .try_into()
                    .map_err(|_| ModelError::BadHex(s.to_string()))?;
                Ok(Self(arr))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.to_hex())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                Self::from_hex(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

hex_id!(
    /// Opaque 16-byte entity identifier.
    EntityId,
    16
);
hex_id!(
    /// 16-byte emblem identifier carried in certificates and emblem tags.
    EmblemId,
    16
);
hex_id!(
    /// 8-byte issuer identifier, derived from the issuer public key.
    IssuerId,
    8
);

/// Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn offset(&self, dx: f64, dy: f64, dz: f64) -> Position {
        Position::new(self.x + dx, self.y + dy, self.z + dz)
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Euclidean distance between two positions.
pub fn distance(a: &Position, b: &Position) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Coordinate frame in which a scenario is expressed.
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldMode {
    #[default]
    Flat,
    Earth,
}

/// Mean Earth radius used for the spherical surface model.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Accepted norm window for ground entities in Earth-surface mode.
pub const EARTH_SURFACE_BAND_M: (f64, f64) = (6.2e6, 6.5e6);

impl WorldMode {
    pub fn check_ground_position(&self, p: &Position) -> Result<(), ModelError> {
        if !p.is_finite() {
            return Err(ModelError::NonFinitePosition);
        }
        if *self == WorldMode::Earth {
            let n = p.norm();
            if n < EARTH_SURFACE_BAND_M.0 || n > EARTH_SURFACE_BAND_M.1 {
                return Err(ModelError::OffSurface(n));
            }
        }
        Ok(())
    }
}

/// Frequency band identifiers. The ordinal is the `band_id` byte on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub enum BandKind {
    LBand,
    XBand,
    Microwave,
    Infrared,
    Optical,
    Thermal,
    #[serde(rename = "RFID-LF")]
    RfidLf,
    #[serde(rename = "RFID-HF")]
    RfidHf,
    #[serde(rename = "RFID-UHF")]
    RfidUhf,
    WiFi,
}

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

impl BandKind {
    pub const ALL: [BandKind; 10] = [
        BandKind::LBand,
        BandKind::XBand,
        BandKind::Microwave,
        BandKind::Infrared,
        BandKind::Optical,
        BandKind::Thermal,
        BandKind::RfidLf,
        BandKind::RfidHf,
        BandKind::RfidUhf,
        BandKind::WiFi,
    ];

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn from_ordinal(id: u8) -> Option<BandKind> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn is_rfid(self) -> bool {
        matches!(self, BandKind::RfidLf | BandKind::RfidHf | BandKind::RfidUhf)
    }

    /// Default profile for the band.
    pub fn default_profile(self) -> BandProfile {
        const GHZ: f64 = 1e9;
        const THZ: f64 = 1e12;
        let (lo, hi, range) = match self {
            BandKind::LBand => (1.0 * GHZ, 2.0 * GHZ, 1_000_000.0),
            BandKind::XBand => (8.0 * GHZ, 12.0 * GHZ, 100_000.0),
            BandKind::Microwave => (1.0 * GHZ, 100.0 * GHZ, 100_000.0),
            BandKind::Infrared => (1.0 * THZ, 100.0 * THZ, 100.0),
            BandKind::Optical => (430.0 * THZ, 750.0 * THZ, 2000.0),
            // 14 um .. 9 um
            BandKind::Thermal => (SPEED_OF_LIGHT / 14e-6, SPEED_OF_LIGHT / 9e-6, 2000.0),
            BandKind::RfidLf => (120e3, 135e3, 100.0),
            BandKind::RfidHf => (13.553e6, 13.567e6, 100.0),
            BandKind::RfidUhf => (860e6, 960e6, 100.0),
            BandKind::WiFi => (2.4 * GHZ, 5.9 * GHZ, 100.0),
        };
        BandProfile {
            kind: self,
            freq_low: lo,
            freq_high: hi,
            nominal_range: range,
        }
    }
}

impl fmt::Display for BandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BandKind::LBand => "LBand",
            BandKind::XBand => "XBand",
            BandKind::Microwave => "Microwave",
            BandKind::Infrared => "Infrared",
            BandKind::Optical => "Optical",
            BandKind::Thermal => "Thermal",
            BandKind::RfidLf => "RFID-LF",
            BandKind::RfidHf => "RFID-HF",
            BandKind::RfidUhf => "RFID-UHF",
            BandKind::WiFi => "WiFi",
        };
        f.write_str(s)
    }
}

/// Frequency range and nominal range of a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandProfile {
    pub kind: BandKind,
    pub freq_low: f64,
    pub freq_high: f64,
    pub nominal_range: f64,
}

impl BandProfile {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.freq_low < self.freq_high) {
            return Err(ModelError::BadBand(self.kind, "freq_low must be below freq_high"));
        }
        if !(self.nominal_range > 0.0) || !self.nominal_range.is_finite() {
            return Err(ModelError::BadBand(self.kind, "nominal_range must be positive"));
        }
        Ok(())
    }
}

/// Per-scenario band table: defaults with optional overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    profiles: [BandProfile; 10],
}

impl Default for BandTable {
    fn default() -> Self {
        Self {
            profiles: BandKind::ALL.map(BandKind::default_profile),
        }
    }
}

impl BandTable {
    pub fn get(&self, kind: BandKind) -> &BandProfile {
        &self.profiles[kind.ordinal() as usize]
    }

    pub fn nominal_range(&self, kind: BandKind) -> f64 {
        self.get(kind).nominal_range
    }

    pub fn set(&mut self, profile: BandProfile) -> Result<(), ModelError> {
        profile.validate()?;
        self.profiles[profile.kind.ordinal() as usize] = profile;
        Ok(())
    }

    pub fn set_range(&mut self, kind: BandKind, nominal_range: f64) -> Result<(), ModelError> {
        let mut p = *self.get(kind);
        p.nominal_range = nominal_range;
        self.set(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    StationaryFacility,
    MobileUnit,
    Personnel,
    WeaponSystem,
    Satellite,
    Jammer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum Mobility {
    Stationary,
    Mobile,
}

/// A simulated participant.
///
/// `ground_truth_protected` is oracle data for scoring a run. The engagement
/// engine never receives an `Entity`; it only sees sensor products.
#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub position: Position,
    pub mobility: Mobility,
    pub ground_truth_protected: bool,
    pub carried_tags: Vec<crate::rfid::TagId>,
}

impl Entity {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.kind == EntityKind::StationaryFacility && self.mobility != Mobility::Stationary {
            return Err(ModelError::MobileFacility);
        }
        if !self.position.is_finite() {
            return Err(ModelError::NonFinitePosition);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sensing {
    Active,
    Passive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProtectionMode {
    pub sensing: Sensing,
    pub mobility: Mobility,
}

impl ProtectionMode {
    pub const ALL: [ProtectionMode; 4] = [
        ProtectionMode { sensing: Sensing::Active, mobility: Mobility::Stationary },
        ProtectionMode { sensing: Sensing::Active, mobility: Mobility::Mobile },
        ProtectionMode { sensing: Sensing::Passive, mobility: Mobility::Stationary },
        ProtectionMode { sensing: Sensing::Passive, mobility: Mobility::Mobile },
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerificationStrategy {
    BeaconPipeline,
    BeaconPipelineMobile,
    PassiveRecognition,
    PassiveRecognitionMobile,
}

pub fn protection_matrix_lookup(mode: ProtectionMode) -> VerificationStrategy {
    match (mode.sensing, mode.mobility) {
        (Sensing::Active, Mobility::Stationary) => VerificationStrategy::BeaconPipeline,
        (Sensing::Active, Mobility::Mobile) => VerificationStrategy::BeaconPipelineMobile,
        (Sensing::Passive, Mobility::Stationary) => VerificationStrategy::PassiveRecognition,
        (Sensing::Passive, Mobility::Mobile) => VerificationStrategy::PassiveRecognitionMobile,
    }
}
