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

//! CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.

use crate::error::CodecError;

const POLY: u16 = 0x1021;
const INIT: u16 = 0xFFFF;

const TABLE: [u16; 256] = build_table();

const fn build_table() -> [u16; 256] {
    let mut table = [0u16; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u16) << 8;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ POLY } else { crc << 1 };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

pub fn crc16(data: &[u8]) -> Result<u16, CodecError> {
    if data.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    Ok(crc16_raw(data))
}

pub(crate) fn crc16_raw(data: &[u8]) -> u16 {
    data.iter().fold(INIT, |crc, &b| {
        (crc << 8) ^ TABLE[((crc >> 8) as u8 ^ b) as usize]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Polynomial long division, one bit at a time.
    fn bitwise_oracle(data: &[u8]) -> u16 {
        let mut crc: u16 = 0xFFFF;
        for &byte in data {
            for i in (0..8).rev() {
                let in_bit = (byte >> i) & 1 == 1;
                let top = crc & 0x8000 != 0;
                crc <<= 1;
                if top ^ in_bit {
                    crc ^= 0x1021;
                }
            }
        }
        crc
    }

    #[test]
    fn check_value() {
        assert_eq!(bitwise_oracle(b"123456789"), 0x29B1);
        assert_eq!(crc16(b"123456789").unwrap(), 0x29B1);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(crc16(&[]), Err(CodecError::EmptyInput));
    }

    #[test]
    fn one_bit_difference_in_one_byte() {
        assert_ne!(crc16(&[0x00]).unwrap(), crc16(&[0x01]).unwrap());
    }

    #[test]
    fn table_matches_oracle_on_random_data() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for len in 1..300 {
            let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            assert_eq!(crc16(&data).unwrap(), bitwise_oracle(&data));
        }
    }

    #[test]
    fn every_single_bit_flip_changes_checksum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let data: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
            let base = crc16(&data).unwrap();
            for bit in 0..64 * 8 {
                let mut d = data.clone();
                d[bit / 8] ^= 0x80 >> (bit % 8);
                assert_ne!(crc16(&d).unwrap(), base, "flip at bit {bit}");
            }
        }
    }
}
