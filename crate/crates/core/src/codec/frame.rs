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

//! Beacon frame: `[A5][5A][band_id][payload_len:2][payload][crc16:2]`,
//! Hamming-coded as a whole.

use super::crc::crc16_raw;
use super::hamming::{coded_len, fec_decode, fec_encode};
use crate::error::CodecError;
use crate::model::BandKind;
use crate::trust::{EmblemCertificate, CERT_LEN};

pub const PREAMBLE: [u8; 2] = [0xA5, 0x5A];
/// Preamble, band id, length and CRC.
pub const FRAME_OVERHEAD: usize = 7;

pub const RFID_BUDGET: usize = 1024;
pub const OPTICAL_BUDGET: usize = 2048;
pub const RADIO_BUDGET: usize = 4096;

/// Maximum coded frame size a band can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelBudget {
    pub band: BandKind,
    pub max_payload_bytes: usize,
}

impl ChannelBudget {
    pub fn for_band(band: BandKind) -> Self {
        let max_payload_bytes = match band {
            BandKind::RfidLf | BandKind::RfidHf | BandKind::RfidUhf => RFID_BUDGET,
            BandKind::Optical | BandKind::Infrared | BandKind::Thermal => OPTICAL_BUDGET,
            BandKind::LBand | BandKind::XBand | BandKind::Microwave | BandKind::WiFi => RADIO_BUDGET,
        };
        Self { band, max_payload_bytes }
    }
}

/// A parsed (pre-FEC) frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeaconFrame {
    pub band: BandKind,
    pub payload: Vec<u8>,
}

impl BeaconFrame {
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = u16::try_from(self.payload.len()).expect("payload length checked by caller");
        let mut out = Vec::with_capacity(self.payload.len() + FRAME_OVERHEAD);
        out.extend_from_slice(&PREAMBLE);
        out.push(self.band.ordinal());
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&self.payload);
        let crc = crc16_raw(&out[2..]);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    /// Parses raw frame bytes. The CRC is checked before anything else that
    /// it covers, so corruption inside the covered region always reports as
    /// `CrcMismatch`.
    pub fn parse(raw: &[u8]) -> Result<Self, CodecError> {
        if raw.len() < FRAME_OVERHEAD {
            return Err(CodecError::Truncated);
        }
        let body = &raw[2..raw.len() - 2];
        let got = u16::from_be_bytes([raw[raw.len() - 2], raw[raw.len() - 1]]);
        if crc16_raw(body) != got {
            return Err(CodecError::CrcMismatch);
        }
        if raw[..2] != PREAMBLE {
            return Err(CodecError::BadPreamble);
        }
        let band = BandKind::from_ordinal(raw[2]).ok_or(CodecError::UnknownBand(raw[2]))?;
        let len = u16::from_be_bytes([raw[3], raw[4]]) as usize;
        if len != raw.len() - FRAME_OVERHEAD {
            return Err(CodecError::LengthMismatch);
        }
        Ok(Self {
            band,
            payload: raw[5..5 + len].to_vec(),
        })
    }
}

/// Coded size of a frame carrying `payload_len` bytes.
pub fn coded_frame_len(payload_len: usize) -> usize {
    coded_len(payload_len + FRAME_OVERHEAD)
}

/// Frames and FEC-codes an arbitrary payload for `band`.
pub fn encode_payload(payload: &[u8], band: BandKind) -> Result<Vec<u8>, CodecError> {
    let budget = ChannelBudget::for_band(band).max_payload_bytes;
    let coded = coded_frame_len(payload.len());
    if payload.len() > budget || coded > budget || payload.len() > u16::MAX as usize {
        return Err(CodecError::BudgetExceeded { coded, budget });
    }
    let frame = BeaconFrame { band, payload: payload.to_vec() };
    Ok(fec_encode(&frame.to_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub frame: BeaconFrame,
    pub corrected_bits: usize,
}

pub fn decode_payload(coded: &[u8]) -> Result<DecodedFrame, CodecError> {
    let (raw, corrected_bits) = fec_decode(coded)?;
    let frame = BeaconFrame::parse(&raw)?;
    Ok(DecodedFrame { frame, corrected_bits })
}

pub fn encode_beacon(cert: &EmblemCertificate, band: BandKind) -> Result<Vec<u8>, CodecError> {
    encode_payload(&cert.to_bytes(), band)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedBeacon {
    pub certificate: EmblemCertificate,
    pub band: BandKind,
    pub corrected_bits: usize,
}

pub fn decode_beacon(coded: &[u8]) -> Result<DecodedBeacon, CodecError> {
    let d = decode_payload(coded)?;
    if d.frame.payload.len() != CERT_LEN {
        return Err(CodecError::MalformedCertificate);
    }
    let certificate = EmblemCertificate::from_bytes(&d.frame.payload).map_err(|_| CodecError::MalformedCertificate)?;
    Ok(DecodedBeacon {
        certificate,
        band: d.frame.band,
        corrected_bits: d.corrected_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::hamming::flip_bit;
    use crate::model::{EmblemId, IssuerId};
    use crate::trust::{PublicKey, Signature, SubjectType};
    use rand::{Rng, SeedableRng};

    fn cert() -> EmblemCertificate {
        EmblemCertificate {
            version: 1,
            emblem_id: EmblemId::from_label("h"),
            issuer_id: IssuerId([7; 8]),
            subject_type: SubjectType::Stationary,
            valid_from: 1000,
            valid_to: 2000,
            lat_e7: 1,
            lon_e7: 2,
            zone_radius_m: 500,
            subject_pubkey: PublicKey([9; 32]),
            signature: Signature([3; 64]),
        }
    }

    #[test]
    fn frame_layout() {
        let raw = BeaconFrame { band: BandKind::XBand, payload: vec![0xDE, 0xAD] }.to_bytes();
        assert_eq!(&raw[..7], &[0xA5, 0x5A, 1, 0, 2, 0xDE, 0xAD]);
        let crc = crate::codec::crc16(&[1, 0, 2, 0xDE, 0xAD]).unwrap();
        assert_eq!(&raw[7..], &crc.to_be_bytes());
    }

    #[test]
    fn certificate_fits_rfid_and_optical_budgets() {
        // (5 + 148 + 2) bytes * 2 nibbles * 7 bits / 8 = 271.25 -> 272
        assert_eq!(coded_frame_len(148), 272);
        let rfid = encode_beacon(&cert(), BandKind::RfidUhf).unwrap();
        assert_eq!(rfid.len(), 272);
        assert!(rfid.len() <= ChannelBudget::for_band(BandKind::RfidUhf).max_payload_bytes);
        let optical = encode_beacon(&cert(), BandKind::Optical).unwrap();
        assert!(optical.len() <= ChannelBudget::for_band(BandKind::Optical).max_payload_bytes);
    }

    #[test]
    fn oversized_payload_is_rejected() {
        let err = encode_payload(&vec![0u8; 2049], BandKind::Optical).unwrap_err();
        assert!(matches!(err, CodecError::BudgetExceeded { budget: 2048, .. }));
        // coded size counts against the budget too
        assert!(encode_payload(&vec![0u8; 1200], BandKind::Optical).is_err());
        assert!(encode_payload(&vec![0u8; 1100], BandKind::Optical).is_ok());
        for band in BandKind::ALL {
            assert!(encode_payload(&vec![0u8; 4097], band).is_err());
        }
    }

    #[test]
    fn coded_length_is_monotone() {
        let mut prev = 0;
        for n in 0..3000 {
            let l = coded_frame_len(n);
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn clean_round_trip() {
        for band in BandKind::ALL {
            let coded = encode_beacon(&cert(), band).unwrap();
            let d = decode_beacon(&coded).unwrap();
            assert_eq!(d.certificate, cert());
            assert_eq!(d.band, band);
            assert_eq!(d.corrected_bits, 0);
        }
    }

    #[test]
    fn single_flips_recovered() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let clean = encode_beacon(&cert(), BandKind::XBand).unwrap();
        let mut coded = clean.clone();
        for b in 0..155 * 2 {
            flip_bit(&mut coded, b * 7 + rng.gen_range(0..7));
        }
        let d = decode_beacon(&coded).unwrap();
        assert_eq!(d.certificate, cert());
        assert_eq!(d.corrected_bits, 310);
    }

    #[test]
    fn double_flip_in_covered_block_is_crc_mismatch() {
        let clean = encode_beacon(&cert(), BandKind::XBand).unwrap();
        // every block after the preamble, every pair of positions
        for block in 4..310 {
            for i in 0..7 {
                for j in (i + 1)..7 {
                    let mut c = clean.clone();
                    flip_bit(&mut c, block * 7 + i);
                    flip_bit(&mut c, block * 7 + j);
                    assert_eq!(decode_beacon(&c), Err(CodecError::CrcMismatch), "block {block} bits {i},{j}");
                }
            }
        }
    }

    #[test]
    fn double_flip_in_preamble_is_bad_preamble() {
        let clean = encode_beacon(&cert(), BandKind::XBand).unwrap();
        let mut c = clean.clone();
        flip_bit(&mut c, 0);
        flip_bit(&mut c, 1);
        assert_eq!(decode_beacon(&c), Err(CodecError::BadPreamble));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(BeaconFrame::parse(&[0xA5, 0x5A, 0]), Err(CodecError::Truncated));
        let good = BeaconFrame { band: BandKind::XBand, payload: vec![1, 2, 3] };
        let mut raw = good.to_bytes();
        raw[0] = 0;
        assert_eq!(BeaconFrame::parse(&raw), Err(CodecError::BadPreamble));

        let mut raw = good.to_bytes();
        raw[2] = 99;
        let crc = crc16_raw(&raw[2..raw.len() - 2]).to_be_bytes();
        let n = raw.len();
        raw[n - 2..].copy_from_slice(&crc);
        assert_eq!(BeaconFrame::parse(&raw), Err(CodecError::UnknownBand(99)));

        let mut raw = good.to_bytes();
        raw[4] = 9;
        let crc = crc16_raw(&raw[2..n - 2]).to_be_bytes();
        raw[n - 2..].copy_from_slice(&crc);
        assert_eq!(BeaconFrame::parse(&raw), Err(CodecError::LengthMismatch));

        let short = encode_payload(&[1, 2, 3], BandKind::XBand).unwrap();
        assert_eq!(decode_beacon(&short), Err(CodecError::MalformedCertificate));
        assert_eq!(decode_beacon(&[0u8; 3]), Err(CodecError::BlockLengthError));
    }
}
