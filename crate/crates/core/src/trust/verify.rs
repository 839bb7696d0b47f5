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

use super::cert::{CertificateRequest, EmblemCertificate, CERT_VERSION};
use super::chain::TrustChain;
use super::crl::RevocationList;
use super::signer::{Signature, SigningKey};
use crate::error::TrustError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VerificationVerdict {
    Valid,
    Expired,
    NotYetValid,
    Revoked,
    BadSignature,
    BrokenChain,
}

impl VerificationVerdict {
    pub const ALL: [VerificationVerdict; 6] = [
        VerificationVerdict::Valid,
        VerificationVerdict::Expired,
        VerificationVerdict::NotYetValid,
        VerificationVerdict::Revoked,
        VerificationVerdict::BadSignature,
        VerificationVerdict::BrokenChain,
    ];

    /// Verdicts that indicate a forged, tampered or revoked emblem.
    pub fn is_misuse(self) -> bool {
        matches!(
            self,
            VerificationVerdict::Revoked | VerificationVerdict::BadSignature | VerificationVerdict::BrokenChain
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerificationVerdict::Valid => "Valid",
            VerificationVerdict::Expired => "Expired",
            VerificationVerdict::NotYetValid => "NotYetValid",
            VerificationVerdict::Revoked => "Revoked",
            VerificationVerdict::BadSignature => "BadSignature",
            VerificationVerdict::BrokenChain => "BrokenChain",
        }
    }
}

impl std::fmt::Display for VerificationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn issue_certificate(
    request: &CertificateRequest,
    issuer_key: &SigningKey,
    chain: &TrustChain,
) -> Result<EmblemCertificate, TrustError> {
    if request.valid_from >= request.valid_to {
        return Err(TrustError::InvalidValidityWindow);
    }
    if !chain.contains_key(&issuer_key.public_key()) || issuer_key.scheme() != chain.scheme {
        return Err(TrustError::UnknownIssuer);
    }
    let mobile = request.subject_type.is_mobile();
    if !mobile && request.zone_radius_m < 1 {
        return Err(TrustError::InvalidZoneRadius);
    }
    let mut cert = EmblemCertificate {
        version: CERT_VERSION,
        emblem_id: request.emblem_id,
        issuer_id: issuer_key.issuer_id(),
        subject_type: request.subject_type,
        valid_from: request.valid_from,
        valid_to: request.valid_to,
        lat_e7: if mobile { 0 } else { request.lat_e7 },
        lon_e7: if mobile { 0 } else { request.lon_e7 },
        zone_radius_m: request.zone_radius_m,
        subject_pubkey: request.subject_pubkey,
        signature: Signature::default(),
    };
    cert.signature = issuer_key.sign(&cert.tbs_bytes());
    Ok(cert)
}

/// Checks run in a fixed order: chain and CRL integrity, certificate
/// signature, revocation, then the validity window.
pub fn verify_certificate(
    cert: &EmblemCertificate,
    chain: &TrustChain,
    crl: &RevocationList,
    now: i64,
) -> VerificationVerdict {
    if chain.validate().is_err() {
        return VerificationVerdict::BrokenChain;
    }
    let crl_ok = chain
        .key_of(&crl.issuer_id)
        .is_some_and(|k| chain.scheme.verify(&k, &crl.tbs_bytes(), &crl.signature));
    if !crl_ok {
        return VerificationVerdict::BrokenChain;
    }
    let Some(path) = chain.path_to(&cert.issuer_id) else {
        return VerificationVerdict::BrokenChain;
    };
    let issuer = path.last().expect("path is non-empty");
    if !chain.scheme.verify(&issuer.pubkey, &cert.tbs_bytes(), &cert.signature) {
        return VerificationVerdict::BadSignature;
    }
    if crl.is_emblem_revoked(&cert.emblem_id) || path.iter().any(|l| crl.is_issuer_revoked(&l.issuer_id)) {
        return VerificationVerdict::Revoked;
    }
    if now < cert.valid_from {
        return VerificationVerdict::NotYetValid;
    }
    if now > cert.valid_to {
        return VerificationVerdict::Expired;
    }
    VerificationVerdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EmblemId;
    use crate::trust::cert::SubjectType;
    use crate::trust::crl::{revoke, RevocationTarget};
    use crate::trust::signer::Scheme;
    use proptest::prelude::*;

    struct Fixture {
        root: SigningKey,
        faction: SigningKey,
        chain: TrustChain,
        crl: RevocationList,
    }

    fn fixture(scheme: Scheme) -> Fixture {
        let root = SigningKey::from_seed(scheme, 9, "root");
        let faction = SigningKey::from_seed(scheme, 9, "faction");
        let mut chain = TrustChain::new(&root);
        chain.extend(&root, faction.public_key()).unwrap();
        let crl = RevocationList::empty(&root, 0);
        Fixture { root, faction, chain, crl }
    }

    fn request(from: i64, to: i64) -> CertificateRequest {
        CertificateRequest {
            emblem_id: EmblemId::from_label("hospital"),
            subject_type: SubjectType::Stationary,
            valid_from: from,
            valid_to: to,
            lat_e7: 365_000_000,
            lon_e7: 689_000_000,
            zone_radius_m: 500,
            subject_pubkey: SigningKey::from_seed(Scheme::Mock, 1, "subject").public_key(),
        }
    }

    #[test]
    fn issued_certificate_verifies() {
        let f = fixture(Scheme::Mock);
        let cert = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
        assert_eq!(cert.to_bytes().len(), 148);
        assert_eq!(verify_certificate(&cert, &f.chain, &f.crl, 1500), VerificationVerdict::Valid);
        assert_eq!(verify_certificate(&cert, &f.chain, &f.crl, 1000), VerificationVerdict::Valid);
        assert_eq!(verify_certificate(&cert, &f.chain, &f.crl, 2000), VerificationVerdict::Valid);
        assert_eq!(verify_certificate(&cert, &f.chain, &f.crl, 999), VerificationVerdict::NotYetValid);
        assert_eq!(verify_certificate(&cert, &f.chain, &f.crl, 2001), VerificationVerdict::Expired);
    }

    #[test]
    fn issuance_errors() {
        let f = fixture(Scheme::Mock);
        assert_eq!(
            issue_certificate(&request(1000, 1000), &f.root, &f.chain),
            Err(TrustError::InvalidValidityWindow)
        );
        let rogue = SigningKey::from_seed(Scheme::Mock, 9, "rogue");
        assert_eq!(issue_certificate(&request(1, 2), &rogue, &f.chain), Err(TrustError::UnknownIssuer));
        let mut r = request(1, 2);
        r.zone_radius_m = 0;
        assert_eq!(issue_certificate(&r, &f.root, &f.chain), Err(TrustError::InvalidZoneRadius));
    }

    #[test]
    fn mobile_subjects_have_zeroed_position() {
        let f = fixture(Scheme::Mock);
        let mut r = request(1, 2);
        r.subject_type = SubjectType::MobileUnit;
        r.zone_radius_m = 0;
        let c = issue_certificate(&r, &f.root, &f.chain).unwrap();
        assert_eq!((c.lat_e7, c.lon_e7), (0, 0));
    }

    #[test]
    fn revoked_emblem() {
        let f = fixture(Scheme::Mock);
        let cert = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
        let crl = revoke(RevocationTarget::Emblem(cert.emblem_id), &f.crl, &f.root, 1200).unwrap();
        assert_eq!(verify_certificate(&cert, &f.chain, &crl, 1500), VerificationVerdict::Revoked);
    }

    #[test]
    fn revoking_an_issuer_revokes_its_emblems() {
        let f = fixture(Scheme::Mock);
        let a = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
        let mut r = request(1000, 2000);
        r.emblem_id = EmblemId::from_label("second");
        let b = issue_certificate(&r, &f.faction, &f.chain).unwrap();
        let by_root = issue_certificate(&request(1000, 2000), &f.root, &f.chain).unwrap();
        let crl = revoke(RevocationTarget::Issuer(f.faction.issuer_id()), &f.crl, &f.root, 1).unwrap();
        assert_eq!(verify_certificate(&a, &f.chain, &crl, 1500), VerificationVerdict::Revoked);
        assert_eq!(verify_certificate(&b, &f.chain, &crl, 1500), VerificationVerdict::Revoked);
        assert_eq!(verify_certificate(&by_root, &f.chain, &crl, 1500), VerificationVerdict::Valid);
    }

    #[test]
    fn every_signature_bit_flip_is_bad_signature() {
        for scheme in [Scheme::Mock, Scheme::Ed25519] {
            let f = fixture(scheme);
            let cert = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
            for i in 0..64 {
                let mut c = cert.clone();
                c.signature.0[i] ^= 0x01;
                assert_eq!(verify_certificate(&c, &f.chain, &f.crl, 1500), VerificationVerdict::BadSignature);
            }
        }
    }

    #[test]
    fn signature_checked_before_revocation_and_time() {
        let f = fixture(Scheme::Mock);
        let cert = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
        let crl = revoke(RevocationTarget::Emblem(cert.emblem_id), &f.crl, &f.root, 1).unwrap();
        let mut c = cert.clone();
        c.valid_to = 3000; // tampered field
        assert_eq!(verify_certificate(&c, &f.chain, &crl, 5000), VerificationVerdict::BadSignature);
        // revoked and expired: revocation wins
        assert_eq!(verify_certificate(&cert, &f.chain, &crl, 5000), VerificationVerdict::Revoked);
    }

    #[test]
    fn broken_chain_and_foreign_crl() {
        let f = fixture(Scheme::Mock);
        let cert = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
        let mut chain = f.chain.clone();
        chain.intermediates[0].signature.0[0] ^= 1;
        assert_eq!(verify_certificate(&cert, &chain, &f.crl, 1500), VerificationVerdict::BrokenChain);
        let rogue = SigningKey::from_seed(Scheme::Mock, 9, "rogue");
        let foreign = RevocationList::empty(&rogue, 0);
        assert_eq!(verify_certificate(&cert, &f.chain, &foreign, 1500), VerificationVerdict::BrokenChain);
        let mut forged = f.crl.clone();
        forged.issued_at += 1;
        assert_eq!(verify_certificate(&cert, &f.chain, &forged, 1500), VerificationVerdict::BrokenChain);
        // certificate issued by a key outside the chain
        let other_root = SigningKey::from_seed(Scheme::Mock, 9, "other");
        let other_chain = TrustChain::new(&other_root);
        let stray = issue_certificate(&request(1000, 2000), &other_root, &other_chain).unwrap();
        assert_eq!(verify_certificate(&stray, &f.chain, &f.crl, 1500), VerificationVerdict::BrokenChain);
    }

    proptest! {
        #[test]
        fn verify_after_issue_is_valid_inside_window(
            from in -1_000_000_000i64..1_000_000_000,
            len in 1i64..1_000_000,
            frac in 0.0f64..=1.0,
            radius in 1u16..,
            lat in any::<i32>(),
            lon in any::<i32>(),
            label in "[a-z]{1,12}",
        ) {
            let f = fixture(Scheme::Mock);
            let mut r = request(from, from + len);
            r.emblem_id = EmblemId::from_label(&label);
            r.zone_radius_m = radius;
            r.lat_e7 = lat;
            r.lon_e7 = lon;
            let cert = issue_certificate(&r, &f.faction, &f.chain).unwrap();
            let now = from + ((len as f64) * frac) as i64;
            prop_assert_eq!(verify_certificate(&cert, &f.chain, &f.crl, now), VerificationVerdict::Valid);
            prop_assert_eq!(EmblemCertificate::from_bytes(&cert.to_bytes()).unwrap(), cert);
        }

        #[test]
        fn revocation_is_permanent(t_revoke in 1000i64..2000, later in 0i64..5000) {
            let f = fixture(Scheme::Mock);
            let cert = issue_certificate(&request(1000, 2000), &f.faction, &f.chain).unwrap();
            let crl = revoke(RevocationTarget::Emblem(cert.emblem_id), &f.crl, &f.root, t_revoke).unwrap();
            let other = revoke(
                RevocationTarget::Emblem(EmblemId::from_label("unrelated")),
                &crl,
                &f.root,
                t_revoke + later,
            )
            .unwrap();
            for list in [&crl, &other] {
                prop_assert_ne!(verify_certificate(&cert, &f.chain, list, t_revoke + later), VerificationVerdict::Valid);
            }
        }
    }
}
