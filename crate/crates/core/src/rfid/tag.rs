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

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{BandKind, BandTable, EmblemId};

pub const TAG_ID_BITS: u32 = 96;
const TAG_ID_MASK: u128 = (1u128 << TAG_ID_BITS) - 1;

/// 96-bit tag identifier, compared and walked MSB-first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TagId(u128);

impl TagId {
    /// Keeps the low 96 bits.
    pub const fn new(raw: u128) -> Self {
        TagId(raw & TAG_ID_MASK)
    }

    pub const fn value(self) -> u128 {
        self.0
    }

    /// Bit `i` counted from the most significant of the 96.
    pub fn bit(self, i: u32) -> bool {
        debug_assert!(i < TAG_ID_BITS);
        (self.0 >> (TAG_ID_BITS - 1 - i)) & 1 == 1
    }

    pub fn to_bytes(self) -> [u8; 12] {
        let b = self.0.to_be_bytes();
        b[4..].try_into().unwrap()
    }

    pub fn from_label(label: &str) -> Self {
        let d = <sha2::Sha256 as sha2::Digest>::digest(label.as_bytes());
        let mut b = [0u8; 16];
        b[4..].copy_from_slice(&d[..12]);
        TagId(u128::from_be_bytes(b))
    }
}

impl fmt::Debug for TagId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TagId({self})")
    }
}

impl fmt::Display for TagId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:024x}", self.0)
    }
}

impl Serialize for TagId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TagId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 24 {
            return Err(serde::de::Error::custom("tag id must be 24 hex digits"));
        }
        u128::from_str_radix(&s, 16).map(TagId).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagKind {
    WeaponTag,
    EmblemTag(EmblemId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum Powered {
    Passive,
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tag {
    pub tag_id: TagId,
    pub kind: TagKind,
    pub powered: Powered,
}

impl Tag {
    /// Passive tags are reader-powered and get half the band's range.
    pub fn range_multiplier(&self) -> f64 {
        match self.powered {
            Powered::Passive => 0.5,
            Powered::Active => 1.0,
        }
    }

    pub fn read_range(&self, bands: &BandTable, band: BandKind) -> f64 {
        bands.nominal_range(band) * self.range_multiplier()
    }

    pub fn is_weapon(&self) -> bool {
        self.kind == TagKind::WeaponTag
    }
}
