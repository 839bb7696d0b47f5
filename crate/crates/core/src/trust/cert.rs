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

//! Compact emblem certificate and its 148-byte canonical encoding.
//!
//! Layout (big-endian, no padding):
//!
//! | offset | len | field          |
//! |--------|-----|----------------|
//! | 0      | 1   | version        |
//! | 1      | 16  | emblem_id      |
//! | 17     | 8   | issuer_id      |
//! | 25     | 1   | subject_type   |
//! | 26     | 8   | valid_from     |
//! | 34     | 8   | valid_to       |
//! | 42     | 4   | lat (1e-7 deg) |
//! | 46     | 4   | lon (1e-7 deg) |
//! | 50     | 2   | zone_radius_m  |
//! | 52     | 32  | subject_pubkey |
//! | 84     | 64  | signature      |

use serde::{Deserialize, Serialize};

use super::signer::{PublicKey, Signature};
use crate::error::TrustError;
use crate::model::{EmblemId, IssuerId};

pub const CERT_VERSION: u8 = 1;
pub const CERT_LEN: usize = 148;
pub const CERT_TBS_LEN: usize = 84;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum SubjectType {
    Stationary = 0,
    MobileUnit = 1,
    Personnel = 2,
    Transport = 3,
}

impl SubjectType {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(SubjectType::Stationary),
            1 => Some(SubjectType::MobileUnit),
            2 => Some(SubjectType::Personnel),
            3 => Some(SubjectType::Transport),
            _ => None,
        }
    }

    pub fn is_mobile(self) -> bool {
        self != SubjectType::Stationary
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmblemCertificate {
    pub version: u8,
    pub emblem_id: EmblemId,
    pub issuer_id: IssuerId,
    pub subject_type: SubjectType,
    pub valid_from: i64,
    pub valid_to: i64,
    pub lat_e7: i32,
    pub lon_e7: i32,
    pub zone_radius_m: u16,
    pub subject_pubkey: PublicKey,
    pub signature: Signature,
}

impl EmblemCertificate {
    /// The signed portion: every field before the signature.
    pub fn tbs_bytes(&self) -> [u8; CERT_TBS_LEN] {
        let mut out = [0u8; CERT_TBS_LEN];
        out[0] = self.version;
        out[1..17].copy_from_slice(&self.emblem_id.0);
        out[17..25].copy_from_slice(&self.issuer_id.0);
        out[25] = self.subject_type as u8;
        out[26..34].copy_from_slice(&self.valid_from.to_be_bytes());
        out[34..42].copy_from_slice(&self.valid_to.to_be_bytes());
        out[42..46].copy_from_slice(&self.lat_e7.to_be_bytes());
        out[46..50].copy_from_slice(&self.lon_e7.to_be_bytes());
        out[50..52].copy_from_slice(&self.zone_radius_m.to_be_bytes());
        out[52..84].copy_from_slice(&self.subject_pubkey.0);
        out
    }

    pub fn to_bytes(&self) -> [u8; CERT_LEN] {
        let mut out = [0u8; CERT_LEN];
        out[..CERT_TBS_LEN].copy_from_slice(&self.tbs_bytes());
        out[CERT_TBS_LEN..].copy_from_slice(&self.signature.0);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, TrustError> {
        if b.len() != CERT_LEN {
            return Err(TrustError::Malformed("certificate must be 148 bytes"));
        }
        if b[0] != CERT_VERSION {
            return Err(TrustError::Malformed("unsupported version"));
        }
        let subject_type =
            SubjectType::from_byte(b[25]).ok_or(TrustError::Malformed("unknown subject type"))?;
        let arr = |r: std::ops::Range<usize>| -> Vec<u8> { b[r].to_vec() };
        Ok(Self {
            version: b[0],
            emblem_id: EmblemId(arr(1..17).try_into().unwrap()),
            issuer_id: IssuerId(arr(17..25).try_into().unwrap()),
            subject_type,
            valid_from: i64::from_be_bytes(arr(26..34).try_into().unwrap()),
            valid_to: i64::from_be_bytes(arr(34..42).try_into().unwrap()),
            lat_e7: i32::from_be_bytes(arr(42..46).try_into().unwrap()),
            lon_e7: i32::from_be_bytes(arr(46..50).try_into().unwrap()),
            zone_radius_m: u16::from_be_bytes(arr(50..52).try_into().unwrap()),
            subject_pubkey: PublicKey(arr(52..84).try_into().unwrap()),
            signature: Signature(arr(84..148).try_into().unwrap()),
        })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_e7 as f64 * 1e-7
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_e7 as f64 * 1e-7
    }
}

/// Subject fields supplied to the issuer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRequest {
    pub emblem_id: EmblemId,
    pub subject_type: SubjectType,
    pub valid_from: i64,
    pub valid_to: i64,
    #[serde(default)]
    pub lat_e7: i32,
    #[serde(default)]
    pub lon_e7: i32,
    pub zone_radius_m: u16,
    pub subject_pubkey: PublicKey,
}
