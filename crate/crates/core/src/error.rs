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

use thiserror::Error;

use crate::model::BandKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("position has non-finite coordinates")]
    NonFinitePosition,
    #[error("position norm {0} m is outside the Earth-surface band")]
    OffSurface(f64),
    #[error("stationary facility must have stationary mobility")]
    MobileFacility,
    #[error("band {0}: {1}")]
    BadBand(BandKind, &'static str),
    #[error("invalid hex identifier {0:?}")]
    BadHex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrustError {
    #[error("validity window is empty or inverted")]
    InvalidValidityWindow,
    #[error("issuer is not part of the trust chain")]
    UnknownIssuer,
    #[error("issuer is not authorized for this revocation list")]
    UnauthorizedIssuer,
    #[error("stationary subjects need a zone radius of at least 1 m")]
    InvalidZoneRadius,
    #[error("trust chain depth {0} exceeds the cap of {max}", max = crate::trust::MAX_CHAIN_DEPTH)]
    ChainTooDeep(usize),
    #[error("trust chain link {0} does not verify")]
    BrokenLink(usize),
    #[error("certificate encoding is malformed: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("registry unavailable")]
    RegistryUnavailable,
    #[error("query radius must be non-negative")]
    NegativeRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("input is empty")]
    EmptyInput,
    #[error("coded length is not a whole number of blocks")]
    BlockLengthError,
    #[error("frame preamble mismatch")]
    BadPreamble,
    #[error("frame CRC mismatch")]
    CrcMismatch,
    #[error("frame is truncated")]
    Truncated,
    #[error("payload_len does not match frame length")]
    LengthMismatch,
    #[error("unknown band id {0}")]
    UnknownBand(u8),
    #[error("payload is not a well-formed certificate")]
    MalformedCertificate,
    #[error("coded frame of {coded} bytes exceeds the {budget}-byte budget of the band")]
    BudgetExceeded { coded: usize, budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeoError {
    #[error("at least four satellites are required")]
    InsufficientSatellites,
    #[error("satellite signal has a non-positive or non-finite pseudorange")]
    InvalidSignal,
    #[error("satellite geometry is degenerate")]
    DegenerateGeometry,
    #[error("least squares did not converge")]
    NoConvergence,
    #[error("at least two bearing observations are required")]
    InsufficientObservations,
    #[error("bearings are parallel")]
    ParallelBearings,
    #[error("bearing vector is zero or non-finite")]
    InvalidBearing,
}
