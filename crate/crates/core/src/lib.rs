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

//! Protocol library for a cross-frequency digital protective emblem.
//!
//! Emitters mark protected entities with signed certificates carried in
//! FEC-coded beacon frames. A weapon system verifies an emblem by decoding
//! the beacon, validating the certificate against a chain of trust and CRL,
//! fixing its own position by GPS, localizing the emitter from radar
//! bearings, checking the facility registry and finally challenging the
//! facility's RFID tag. The [`engine`] drives this inside the
//! find/fix/track/target/engage/assess cycle with operator escalation.

pub mod channel;
pub mod codec;
pub mod engine;
pub mod error;
pub mod geo;
pub mod model;
pub mod rfid;
pub mod rng;
pub mod trust;

pub use error::{CodecError, GeoError, ModelError, RegistryError, TrustError};
