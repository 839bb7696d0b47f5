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

//! Beacon framing with CRC-16 detection and Hamming(7,4) correction.

mod crc;
mod frame;
mod hamming;

pub use crc::crc16;
pub use frame::{
    coded_frame_len, decode_beacon, decode_payload, encode_beacon, encode_payload, BeaconFrame, ChannelBudget,
    DecodedBeacon, DecodedFrame, FRAME_OVERHEAD, OPTICAL_BUDGET, PREAMBLE, RADIO_BUDGET, RFID_BUDGET,
};
pub use hamming::{coded_len, decode_block, encode_nibble, fec_decode, fec_encode, flip_bit, BLOCK_BITS};
