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

//! Signature primitive behind every certificate, chain link and CRL.
//!
//! Two deterministic schemes share the 32-byte public key / 64-byte signature
//! shape. `Mock` is a transparent, seeded test double: anyone holding the
//! public key can produce a valid signature, so it only models integrity
//! against accidental or uninformed tampering. `Ed25519` is a real scheme.

use std::fmt;

use ed25519_dalek::{Signer as _, Verifier as _};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256, Sha512};

pub const PUBLIC_KEY_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PublicKey(pub [u8; PUBLIC_KEY_LEN]);

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature(pub [u8; SIGNATURE_LEN]);

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey(pub [u8; 32]);

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", hex::encode(self.0))
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({}..)", hex::encode(&self.0[..8]))
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

macro_rules! hex_serde {
    ($name:ident, $len:expr) => {
        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&hex::encode(self.0))
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
                let arr: [u8; $len] = bytes
                    .try_into()
                    .map_err(|_| serde::de::Error::custom(concat!(stringify!($name), " has wrong length")))?;
                Ok($name(arr))
            }
        }
    };
}

hex_serde!(PublicKey, PUBLIC_KEY_LEN);
hex_serde!(Signature, SIGNATURE_LEN);

impl Default for Signature {
    fn default() -> Self {
        Signature([0; SIGNATURE_LEN])
    }
}

/// Mock signature: SHA-512 over a domain tag, the derived public key and the
/// message.
pub fn mock_sign(message: &[u8], key: &SecretKey) -> Signature {
    let public = mock_public_key(key);
    mock_digest(message, &public)
}

pub fn mock_verify(message: &[u8], signature: &Signature, public: &PublicKey) -> bool {
    mock_digest(message, public) == *signature
}

pub fn mock_public_key(key: &SecretKey) -> PublicKey {
    let mut h = Sha256::new();
    h.update(b"emblem-mock-pub");
    h.update(key.0);
    PublicKey(h.finalize().into())
}

fn mock_digest(message: &[u8], public: &PublicKey) -> Signature {
    let mut h = Sha512::new();
    h.update(b"emblem-mock-sig");
    h.update(public.0);
    h.update(message);
    Signature(h.finalize().into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Mock,
    Ed25519,
}

impl Scheme {
    pub fn public_key(self, secret: &SecretKey) -> PublicKey {
        match self {
            Scheme::Mock => mock_public_key(secret),
            Scheme::Ed25519 => {
                let sk = ed25519_dalek::SigningKey::from_bytes(&secret.0);
                PublicKey(sk.verifying_key().to_bytes())
            }
        }
    }

    pub fn sign(self, secret: &SecretKey, message: &[u8]) -> Signature {
        match self {
            Scheme::Mock => mock_sign(message, secret),
            Scheme::Ed25519 => {
                let sk = ed25519_dalek::SigningKey::from_bytes(&secret.0);
                Signature(sk.sign(message).to_bytes())
            }
        }
    }

    pub fn verify(self, public: &PublicKey, message: &[u8], signature: &Signature) -> bool {
        match self {
            Scheme::Mock => mock_verify(message, signature, public),
            Scheme::Ed25519 => {
                let Ok(vk) = ed25519_dalek::VerifyingKey::from_bytes(&public.0) else {
                    return false;
                };
                let sig = ed25519_dalek::Signature::from_bytes(&signature.0);
                vk.verify(message, &sig).is_ok()
            }
        }
    }
}

/// A secret key paired with its scheme and public half.
#[derive(Clone, PartialEq, Eq)]
pub struct SigningKey {
    scheme: Scheme,
    secret: SecretKey,
    public: PublicKey,
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigningKey")
            .field("scheme", &self.scheme)
            .field("public", &self.public)
            .finish()
    }
}

impl SigningKey {
    pub fn from_secret(scheme: Scheme, secret: SecretKey) -> Self {
        let public = scheme.public_key(&secret);
        Self { scheme, secret, public }
    }

    /// Reproducible key from a seed and a label, so fixtures can name keys.
    pub fn from_seed(scheme: Scheme, seed: u64, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"emblem-key");
        h.update(seed.to_be_bytes());
        h.update(label.as_bytes());
        Self::from_secret(scheme, SecretKey(h.finalize().into()))
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn public_key(&self) -> PublicKey {
        self.public
    }

    pub fn issuer_id(&self) -> crate::model::IssuerId {
        issuer_id_for(&self.public)
    }

    pub fn sign(&self, message: &[u8]) -> Signature {
        self.scheme.sign(&self.secret, message)
    }
}

/// Issuer identifiers are the first eight bytes of SHA-256(public key).
pub fn issuer_id_for(public: &PublicKey) -> crate::model::IssuerId {
    let d = Sha256::digest(public.0);
    let mut id = [0u8; 8];
    id.copy_from_slice(&d[..8]);
    crate::model::IssuerId(id)
}
