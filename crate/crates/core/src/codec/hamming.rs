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

//! Hamming(7,4) forward error correction.
//!
//! Each nibble (high nibble of a byte first) becomes a 7-bit codeword with
//! bit order `p1 p2 d1 p3 d2 d3 d4`. Codewords are packed MSB-first and the
//! stream is zero-padded to a byte boundary.

use crate::error::CodecError;

pub const BLOCK_BITS: usize = 7;

/// Encodes the low four bits of `nibble` (`d1` is bit 3).
pub fn encode_nibble(nibble: u8) -> u8 {
    let d1 = (nibble >> 3) & 1;
    let d2 = (nibble >> 2) & 1;
    let d3 = (nibble >> 1) & 1;
    let d4 = nibble & 1;
    let p1 = d1 ^ d2 ^ d4;
    let p2 = d1 ^ d3 ^ d4;
    let p3 = d2 ^ d3 ^ d4;
    (p1 << 6) | (p2 << 5) | (d1 << 4) | (p3 << 3) | (d2 << 2) | (d3 << 1) | d4
}

/// Decodes one 7-bit codeword, correcting at most one flipped bit.
/// Returns the nibble and whether a correction was applied.
pub fn decode_block(block: u8) -> (u8, bool) {
    // bit at 1-based position i lives at (6 - (i - 1))
    let bit = |i: u8| (block >> (7 - i)) & 1;
    let s1 = bit(1) ^ bit(3) ^ bit(5) ^ bit(7);
    let s2 = bit(2) ^ bit(3) ^ bit(6) ^ bit(7);
    let s3 = bit(4) ^ bit(5) ^ bit(6) ^ bit(7);
    let syndrome = s1 | (s2 << 1) | (s3 << 2);
    let fixed = if syndrome == 0 { block } else { block ^ (1 << (7 - syndrome)) };
    let fb = |i: u8| (fixed >> (7 - i)) & 1;
    let nibble = (fb(3) << 3) | (fb(5) << 2) | (fb(6) << 1) | fb(7);
    (nibble, syndrome != 0)
}

/// Coded length in bytes for `data_len` input bytes.
pub fn coded_len(data_len: usize) -> usize {
    (data_len * 2 * BLOCK_BITS).div_ceil(8)
}

pub fn fec_encode(data: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; coded_len(data.len())];
    let mut bitpos = 0usize;
    for &byte in data {
        for nibble in [byte >> 4, byte & 0x0F] {
            let cw = encode_nibble(nibble);
            for i in (0..BLOCK_BITS).rev() {
                if (cw >> i) & 1 == 1 {
                    out[bitpos / 8] |= 0x80 >> (bitpos % 8);
                }
                bitpos += 1;
            }
        }
    }
    out
}

/// Returns the decoded bytes and the number of corrected bits.
pub fn fec_decode(coded: &[u8]) -> Result<(Vec<u8>, usize), CodecError> {
    let data_len = coded.len() * 8 / (2 * BLOCK_BITS);
    if coded_len(data_len) != coded.len() {
        return Err(CodecError::BlockLengthError);
    }
    let mut out = Vec::with_capacity(data_len);
    let mut corrected = 0;
    let mut bitpos = 0usize;
    let mut read_block = || {
        let mut b = 0u8;
        for _ in 0..BLOCK_BITS {
            let bit = (coded[bitpos / 8] >> (7 - bitpos % 8)) & 1;
            b = (b << 1) | bit;
            bitpos += 1;
        }
        b
    };
    for _ in 0..data_len {
        let (hi, c1) = decode_block(read_block());
        let (lo, c2) = decode_block(read_block());
        corrected += c1 as usize + c2 as usize;
        out.push((hi << 4) | lo);
    }
    Ok((out, corrected))
}

/// Flips bit `bit` (MSB-first) of a coded buffer.
pub fn flip_bit(coded: &mut [u8], bit: usize) {
    coded[bit / 8] ^= 0x80 >> (bit % 8);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Generator matrix G (rows d1..d4, columns p1 p2 d1 p3 d2 d3 d4).
    const G: [[u8; 7]; 4] = [
        [1, 1, 1, 0, 0, 0, 0],
        [1, 0, 0, 1, 1, 0, 0],
        [0, 1, 0, 1, 0, 1, 0],
        [1, 1, 0, 1, 0, 0, 1],
    ];

    fn generator_oracle(nibble: u8) -> u8 {
        let d = [(nibble >> 3) & 1, (nibble >> 2) & 1, (nibble >> 1) & 1, nibble & 1];
        let mut cw = 0u8;
        for col in 0..7 {
            let bit = (0..4).fold(0, |acc, row| acc ^ (d[row] & G[row][col]));
            cw = (cw << 1) | bit;
        }
        cw
    }

    #[test]
    fn nibble_1011_codeword() {
        assert_eq!(generator_oracle(0b1011), 0b0110011);
        assert_eq!(encode_nibble(0b1011), 0b0110011);
    }

    #[test]
    fn all_nibbles_match_generator_matrix() {
        for n in 0..16 {
            assert_eq!(encode_nibble(n), generator_oracle(n));
            assert_eq!(decode_block(encode_nibble(n)), (n, false));
        }
    }

    #[test]
    fn every_single_bit_error_is_corrected() {
        for n in 0..16 {
            for i in 0..7 {
                assert_eq!(decode_block(encode_nibble(n) ^ (1 << i)), (n, true));
            }
        }
    }

    #[test]
    fn lengths() {
        assert_eq!(coded_len(155), 272);
        assert_eq!(coded_len(0), 0);
        assert_eq!(coded_len(1), 2);
        assert_eq!(coded_len(4), 7);
        assert_eq!(fec_encode(&[0xAB; 155]).len(), 272);
    }

    #[test]
    fn malformed_lengths_are_rejected() {
        // 14k/8 rounded up: 2, 4, 6, 7, 9, ...
        for bad in [1usize, 3, 5, 8] {
            assert_eq!(fec_decode(&vec![0; bad]), Err(CodecError::BlockLengthError), "{bad}");
        }
        for good in [0usize, 2, 4, 6, 7, 9] {
            assert!(fec_decode(&vec![0; good]).is_ok(), "{good}");
        }
    }

    #[test]
    fn clean_round_trip() {
        let data: Vec<u8> = (0..=255).collect();
        assert_eq!(fec_decode(&fec_encode(&data)).unwrap(), (data, 0));
    }

    #[test]
    fn one_flip_per_block_is_fully_corrected() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let data: Vec<u8> = (0..32).map(|_| rng.gen()).collect();
            let mut coded = fec_encode(&data);
            let blocks = data.len() * 2;
            for b in 0..blocks {
                flip_bit(&mut coded, b * 7 + rng.gen_range(0..7));
            }
            assert_eq!(fec_decode(&coded).unwrap(), (data, blocks));
        }
    }

    #[test]
    fn exhaustive_single_flip_per_block_position() {
        let data: Vec<u8> = (0..32u8).map(|i| i.wrapping_mul(37)).collect();
        for offset in 0..7 {
            let mut coded = fec_encode(&data);
            for b in 0..64 {
                flip_bit(&mut coded, b * 7 + offset);
            }
            assert_eq!(fec_decode(&coded).unwrap(), (data.clone(), 64));
        }
    }
}
