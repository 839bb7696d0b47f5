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

//! Certificate issuance, chain validation, revocation and the facility
//! registry.

mod authority;
mod cert;
mod chain;
mod crl;
mod registry;
mod signer;
mod verify;

pub use authority::{AuthoritySnapshot, TrustAuthority};
pub use cert::{CertificateRequest, EmblemCertificate, SubjectType, CERT_LEN, CERT_TBS_LEN, CERT_VERSION};
pub use chain::{IssuerCertificate, TrustChain, MAX_CHAIN_DEPTH};
pub use crl::{revoke, RevocationList, RevocationTarget};
pub use registry::{Registry, RegistryRecord, RegistrySnapshot};
pub use signer::{
    issuer_id_for, mock_public_key, mock_sign, mock_verify, PublicKey, Scheme, SecretKey, Signature, SigningKey,
    PUBLIC_KEY_LEN, SIGNATURE_LEN,
};
pub use verify::{issue_certificate, verify_certificate, VerificationVerdict};
