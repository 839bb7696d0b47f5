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

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::signer::{Signature, SigningKey};
use crate::error::TrustError;
use crate::model::{EmblemId, IssuerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevocationTarget {
    Emblem(EmblemId),
    Issuer(IssuerId),
}

/// Signed statement listing revoked emblems and issuers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevocationList {
    pub issuer_id: IssuerId,
    pub revoked: BTreeSet<RevocationTarget>,
    pub issued_at: i64,
    pub signature: Signature,
}

impl RevocationList {
    /// A fresh, empty list signed by `issuer_key`.
    pub fn empty(issuer_key: &SigningKey, issued_at: i64) -> Self {
        let mut crl = Self {
            issuer_id: issuer_key.issuer_id(),
            revoked: BTreeSet::new(),
            issued_at,
            signature: Signature::default(),
        };
        crl.signature = issuer_key.sign(&crl.tbs_bytes());
        crl
    }

    /// issuer_id || issued_at || count || entries, entries in set order.
    pub fn tbs_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + self.revoked.len() * 17);
        out.extend_from_slice(&self.issuer_id.0);
        out.extend_from_slice(&self.issued_at.to_be_bytes());
        out.extend_from_slice(&(self.revoked.len() as u32).to_be_bytes());
        for t in &self.revoked {
            match t {
                RevocationTarget::Emblem(e) => {
                    out.push(0);
                    out.extend_from_slice(&e.0);
                }
                RevocationTarget::Issuer(i) => {
                    out.push(1);
                    out.extend_from_slice(&i.0);
                }
            }
        }
        out
    }

    pub fn is_emblem_revoked(&self, id: &EmblemId) -> bool {
        self.revoked.contains(&RevocationTarget::Emblem(*id))
    }

    pub fn is_issuer_revoked(&self, id: &IssuerId) -> bool {
        self.revoked.contains(&RevocationTarget::Issuer(*id))
    }

    pub fn is_superset_of(&self, earlier: &RevocationList) -> bool {
        self.issuer_id == earlier.issuer_id && self.revoked.is_superset(&earlier.revoked)
    }
}

/// Returns a new list containing `target` and every prior entry, re-signed.
///
/// `issued_at` becomes `max(now, previous + 1)` so it always increases.
pub fn revoke(
    target: RevocationTarget,
    crl: &RevocationList,
    issuer_key: &SigningKey,
    now: i64,
) -> Result<RevocationList, TrustError> {
    if issuer_key.issuer_id() != crl.issuer_id {
        return Err(TrustError::UnauthorizedIssuer);
    }
    let mut next = crl.clone();
    next.revoked.insert(target);
    next.issued_at = now.max(crl.issued_at.saturating_add(1));
    next.signature = issuer_key.sign(&next.tbs_bytes());
    Ok(next)
}
