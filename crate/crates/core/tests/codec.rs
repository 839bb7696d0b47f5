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

use emblem_core::codec::{
    coded_frame_len, crc16, decode_beacon, decode_block, decode_payload, encode_beacon, encode_nibble, encode_payload,
    fec_decode, fec_encode, flip_bit, BeaconFrame, BLOCK_BITS,
};
use emblem_core::model::{BandKind, EmblemId, IssuerId};
use emblem_core::trust::{EmblemCertificate, PublicKey, Signature, SubjectType};
use emblem_core::CodecError;
use proptest::prelude::*;

/// Independently computed: `payload`, band, raw frame, coded frame.
const VECTORS: [(&str, BandKind, &str, &str); 2] = [
    (
        "313233343536373839",
        BandKind::XBand,
        "a55a0100093132333435363738399341",
        "b4952da01a400000661e986aa1c387321a5879a18f87c2199330e669",
    ),
    (
        "000102030405060708090a0b0c0d0e0f",
        BandKind::Infrared,
        "a55a030010000102030405060708090a0b0c0d0e0f8e5d",
        "b4952da010c000d20000001a402a010c04c0094066003c070006405a00cc03c015401601ff8164b540",
    ),
];

/// Codewords `p1 p2 d1 p3 d2 d3 d4` for nibbles 0..16.
const CODEWORDS: [u8; 16] = [0, 105, 42, 67, 76, 37, 102, 15, 112, 25, 90, 51, 60, 85, 22, 127];

#[test]
fn beacon_vectors_are_bit_exact() {
    for (payload, band, raw, coded) in VECTORS {
        let payload = hex::decode(payload).unwrap();
        let frame = BeaconFrame { band, payload: payload.clone() };
        assert_eq!(hex::encode(frame.to_bytes()), raw);
        assert_eq!(hex::encode(encode_payload(&payload, band).unwrap()), coded);
        let d = decode_payload(&hex::decode(coded).unwrap()).unwrap();
        assert_eq!(d.frame, frame);
        assert_eq!(d.corrected_bits, 0);
    }
}

#[test]
fn codeword_table() {
    for (n, cw) in CODEWORDS.iter().enumerate() {
        assert_eq!(encode_nibble(n as u8), *cw, "nibble {n}");
        assert_eq!(decode_block(*cw), (n as u8, false));
    }
    // Distinct codewords differ in at least three bits.
    for a in CODEWORDS {
        for b in CODEWORDS.iter().filter(|&&b| b != a) {
            assert!((a ^ b).count_ones() >= 3);
        }
    }
}

#[test]
fn crc_check_value_and_errors() {
    assert_eq!(crc16(b"123456789").unwrap(), 0x29B1);
    assert_eq!(crc16(&[]), Err(CodecError::EmptyInput));
    assert_eq!(fec_decode(&[0u8; 3]), Err(CodecError::BlockLengthError));
    assert_eq!(decode_payload(&fec_encode(&[0xA5, 0x5A])), Err(CodecError::Truncated));
}

#[test]
fn header_faults_are_named() {
    let raw = BeaconFrame { band: BandKind::XBand, payload: vec![1, 2, 3] }.to_bytes();
    let reframe = |edit: &dyn Fn(&mut Vec<u8>)| {
        let mut r = raw.clone();
        edit(&mut r);
        let n = r.len();
        let crc = crc16(&r[2..n - 2]).unwrap().to_be_bytes();
        r[n - 2..].copy_from_slice(&crc);
        decode_payload(&fec_encode(&r))
    };
    assert_eq!(reframe(&|r| r[0] = 0), Err(CodecError::BadPreamble));
    assert_eq!(reframe(&|r| r[2] = 200), Err(CodecError::UnknownBand(200)));
    assert_eq!(reframe(&|r| r[4] = 9), Err(CodecError::LengthMismatch));
}

#[test]
fn over_budget_payloads_are_rejected() {
    assert!(encode_payload(&[0; 500], BandKind::RfidUhf).is_ok());
    assert!(matches!(encode_payload(&[0; 600], BandKind::RfidUhf), Err(CodecError::BudgetExceeded { budget: 1024, .. })));
    assert!(matches!(encode_payload(&[0; 2049], BandKind::Optical), Err(CodecError::BudgetExceeded { .. })));
}

proptest! {
    #[test]
    fn fec_round_trips(data in proptest::collection::vec(any::<u8>(), 0..300)) {
        let (back, corrected) = fec_decode(&fec_encode(&data)).unwrap();
        prop_assert_eq!(back, data);
        prop_assert_eq!(corrected, 0);
    }

    #[test]
    fn one_flip_per_block_is_corrected(
        data in proptest::collection::vec(any::<u8>(), 1..200),
        picks in proptest::collection::vec(0..BLOCK_BITS, 400),
    ) {
        let mut coded = fec_encode(&data);
        let blocks = data.len() * 2;
        for (b, pick) in picks.iter().take(blocks).enumerate() {
            flip_bit(&mut coded, b * BLOCK_BITS + pick);
        }
        let (back, corrected) = fec_decode(&coded).unwrap();
        prop_assert_eq!(back, data);
        prop_assert_eq!(corrected, blocks);
    }

    #[test]
    fn framed_payload_round_trips(payload in proptest::collection::vec(any::<u8>(), 0..400), band in 0u8..10) {
        let band = BandKind::from_ordinal(band).unwrap();
        let coded = encode_payload(&payload, band).unwrap();
        let d = decode_payload(&coded).unwrap();
        prop_assert_eq!(d.frame.payload, payload);
        prop_assert_eq!(d.frame.band, band);
    }
}

fn certificate() -> impl Strategy<Value = EmblemCertificate> {
    (any::<[u8; 16]>(), any::<[u8; 8]>(), any::<bool>(), 0i64..1 << 40, 1i64..1 << 20, any::<(i32, i32, u16)>(), any::<[u8; 32]>(), any::<[u8; 32]>())
        .prop_map(|(id, issuer, mobile, from, span, (lat, lon, zone), key, sig)| EmblemCertificate {
            version: emblem_core::trust::CERT_VERSION,
            emblem_id: EmblemId(id),
            issuer_id: IssuerId(issuer),
            subject_type: if mobile { SubjectType::MobileUnit } else { SubjectType::Stationary },
            valid_from: from,
            valid_to: from + span,
            lat_e7: lat,
            lon_e7: lon,
            zone_radius_m: zone.max(1),
            subject_pubkey: PublicKey(key),
            signature: Signature([sig, key].concat().try_into().unwrap()),
        })
}

proptest! {
    #[test]
    fn beacon_round_trips_on_every_band(cert in certificate(), band in 0u8..10) {
        let band = BandKind::from_ordinal(band).unwrap();
        let d = decode_beacon(&encode_beacon(&cert, band).unwrap()).unwrap();
        prop_assert_eq!(d.certificate, cert);
        prop_assert_eq!(d.band, band);
        prop_assert_eq!(d.corrected_bits, 0);
    }

    #[test]
    fn decoded_frames_always_pass_their_crc(cert in certificate(), flips in proptest::collection::vec(0usize..272 * 8, 1..12)) {
        let mut coded = encode_beacon(&cert, BandKind::RfidUhf).unwrap();
        for f in flips {
            flip_bit(&mut coded, f);
        }
        if decode_beacon(&coded).is_ok() {
            let (raw, _) = fec_decode(&coded).unwrap();
            let n = raw.len();
            prop_assert_eq!(crc16(&raw[2..n - 2]).unwrap().to_be_bytes(), [raw[n - 2], raw[n - 1]]);
        }
    }

    #[test]
    fn coded_length_is_monotone(a in 0usize..5000, b in 0usize..5000) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(coded_frame_len(lo) <= coded_frame_len(hi));
    }
}
