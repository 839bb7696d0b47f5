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

//! Single neutral authority: chain, current CRL and registry behind one
//! snapshot pointer. Writers serialize on the lock and publish a new
//! snapshot; readers clone the `Arc` and never see a partial update.

use std::sync::{Arc, RwLock};

use super::cert::{CertificateRequest, EmblemCertificate};
use super::chain::TrustChain;
use super::crl::{revoke, RevocationList, RevocationTarget};
use super::registry::{Registry, RegistryRecord};
use super::signer::SigningKey;
use super::verify::issue_certificate;
use crate::error::TrustError;
use crate::model::Position;

#[derive(Debug, Clone)]
pub struct AuthoritySnapshot {
    pub chain: TrustChain,
    pub crl: RevocationList,
    pub registry: Registry,
}

#[derive(Debug)]
pub struct TrustAuthority {
    current: RwLock<Arc<AuthoritySnapshot>>,
}

impl TrustAuthority {
    pub fn new(chain: TrustChain, crl: RevocationList, registry: Registry) -> Self {
        Self {
            current: RwLock::new(Arc::new(AuthoritySnapshot { chain, crl, registry })),
        }
    }

    pub fn snapshot(&self) -> Arc<AuthoritySnapshot> {
        Arc::clone(&self.current.read().expect("authority lock poisoned"))
    }

    fn update<T>(
        &self,
        f: impl FnOnce(&mut AuthoritySnapshot) -> Result<T, TrustError>,
    ) -> Result<T, TrustError> {
        let mut guard = self.current.write().expect("authority lock poisoned");
        let mut next = AuthoritySnapshot::clone(&guard);
        let out = f(&mut next)?;
        *guard = Arc::new(next);
        Ok(out)
    }

    /// Issues a certificate and, for stationary subjects, registers its
    /// declared position with the certificate's zone radius.
    pub fn issue(
        &self,
        request: &CertificateRequest,
        issuer_key: &SigningKey,
        declared_position: Option<Position>,
    ) -> Result<EmblemCertificate, TrustError> {
        self.update(|s| {
            let cert = issue_certificate(request, issuer_key, &s.chain)?;
            if let Some(p) = declared_position {
                s.registry.upsert(RegistryRecord {
                    emblem_id: cert.emblem_id,
                    declared_position: p,
                    zone_radius_m: cert.zone_radius_m as f64,
                });
            }
            Ok(cert)
        })
    }

    pub fn revoke(&self, target: RevocationTarget, issuer_key: &SigningKey, now: i64) -> Result<(), TrustError> {
        self.update(|s| {
            s.crl = revoke(target, &s.crl, issuer_key, now)?;
            Ok(())
        })
    }

    /// Replaces the CRL with an empty list; only scenarios do this explicitly.
    pub fn reset_crl(&self, issuer_key: &SigningKey, now: i64) -> Result<(), TrustError> {
        self.update(|s| {
            if issuer_key.issuer_id() != s.crl.issuer_id {
                return Err(TrustError::UnauthorizedIssuer);
            }
            s.crl = RevocationList::empty(issuer_key, now.max(s.crl.issued_at + 1));
            Ok(())
        })
    }

    pub fn set_registry_online(&self, online: bool) {
        let _ = self.update(|s| {
            s.registry.set_online(online);
            Ok(())
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EmblemId;
    use crate::trust::cert::SubjectType;
    use crate::trust::signer::Scheme;
    use crate::trust::verify::{verify_certificate, VerificationVerdict};

    fn setup() -> (TrustAuthority, SigningKey) {
        let root = SigningKey::from_seed(Scheme::Mock, 3, "root");
        let chain = TrustChain::new(&root);
        let crl = RevocationList::empty(&root, 0);
        (TrustAuthority::new(chain, crl, Registry::new()), root)
    }

    fn req(label: &str) -> CertificateRequest {
        CertificateRequest {
            emblem_id: EmblemId::from_label(label),
            subject_type: SubjectType::Stationary,
            valid_from: 0,
            valid_to: 10_000,
            lat_e7: 0,
            lon_e7: 0,
            zone_radius_m: 300,
            subject_pubkey: SigningKey::from_seed(Scheme::Mock, 4, label).public_key(),
        }
    }

    #[test]
    fn issue_registers_zone_from_certificate() {
        let (auth, root) = setup();
        let cert = auth.issue(&req("h"), &root, Some(Position::new(10.0, 0.0, 0.0))).unwrap();
        let snap = auth.snapshot();
        let rec = snap.registry.get(&cert.emblem_id).unwrap();
        assert_eq!(rec.zone_radius_m, 300.0);
        assert_eq!(verify_certificate(&cert, &snap.chain, &snap.crl, 5), VerificationVerdict::Valid);
    }

    #[test]
    fn old_snapshots_are_unaffected_by_writes() {
        let (auth, root) = setup();
        let cert = auth.issue(&req("h"), &root, None).unwrap();
        let before = auth.snapshot();
        auth.revoke(RevocationTarget::Emblem(cert.emblem_id), &root, 100).unwrap();
        let after = auth.snapshot();
        assert_eq!(verify_certificate(&cert, &before.chain, &before.crl, 200), VerificationVerdict::Valid);
        assert_eq!(verify_certificate(&cert, &after.chain, &after.crl, 200), VerificationVerdict::Revoked);
        assert!(after.crl.is_superset_of(&before.crl));
    }

    #[test]
    fn concurrent_readers_never_see_torn_crls() {
        let (auth, root) = setup();
        let auth = Arc::new(auth);
        let writer = {
            let auth = Arc::clone(&auth);
            std::thread::spawn(move || {
                for i in 0..200 {
                    auth.revoke(RevocationTarget::Emblem(EmblemId::from_label(&i.to_string())), &root, i)
                        .unwrap();
                }
            })
        };
        let readers: Vec<_> = (0..4)
            .map(|_| {
                let auth = Arc::clone(&auth);
                std::thread::spawn(move || {
                    let mut last = 0;
                    for _ in 0..500 {
                        let s = auth.snapshot();
                        let key = s.chain.root_pubkey();
                        assert!(s.chain.scheme.verify(&key, &s.crl.tbs_bytes(), &s.crl.signature));
                        assert!(s.crl.revoked.len() >= last);
                        last = s.crl.revoked.len();
                    }
                })
            })
            .collect();
        writer.join().unwrap();
        for r in readers {
            r.join().unwrap();
        }
        assert_eq!(auth.snapshot().crl.revoked.len(), 200);
    }

    #[test]
    fn reset_requires_crl_issuer() {
        let (auth, root) = setup();
        let rogue = SigningKey::from_seed(Scheme::Mock, 3, "rogue");
        assert_eq!(auth.reset_crl(&rogue, 5), Err(TrustError::UnauthorizedIssuer));
        auth.reset_crl(&root, 5).unwrap();
    }
}
