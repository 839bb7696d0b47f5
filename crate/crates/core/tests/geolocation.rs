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

use emblem_core::geo::{trilaterate, GpsFix, SatelliteSignal};
use emblem_core::model::{distance, Position, WorldMode, EARTH_RADIUS_M};
use emblem_core::GeoError;
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORBIT_M: f64 = 2.66e7;

fn unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Receiver near the surface and `n` satellites at least 10 degrees above its horizon.
fn fixture(seed: u64, n: usize) -> (Position, Vec<Position>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let up = unit(&mut rng);
    let rx = up * (EARTH_RADIUS_M + rng.gen_range(0.0..2000.0));
    let mut sats = Vec::new();
    while sats.len() < n {
        let s = unit(&mut rng) * ORBIT_M;
        let los = (s - rx).normalize();
        if los.dot(&up) > 10f64.to_radians().sin() {
            sats.push(Position::new(s.x, s.y, s.z));
        }
    }
    (Position::new(rx.x, rx.y, rx.z), sats)
}

fn observe(rx: &Position, bias: f64, sats: &[Position]) -> Vec<SatelliteSignal> {
    sats.iter().enumerate().map(|(i, s)| SatelliteSignal::observe(i as u32, *s, rx, bias, 0.0)).collect()
}

fn fix(signals: &[SatelliteSignal]) -> GpsFix {
    trilaterate(signals, WorldMode::Earth).expect("fixture geometry converges")
}

#[test]
fn six_satellite_fixtures_recover_truth() {
    for seed in 0..100 {
        let (rx, sats) = fixture(seed, 6);
        let f = fix(&observe(&rx, 1e-3, &sats));
        assert!(distance(&f.position, &rx) < 1e-3, "seed {seed}: {}", distance(&f.position, &rx));
        assert!((f.clock_bias - 1e-3).abs() < 1e-12, "seed {seed}: {}", f.clock_bias);
        assert!(f.residual_rms < 1e-3);
        assert_eq!(f.sats_used, 6);
    }
}

#[test]
fn three_satellites_always_insufficient() {
    for seed in 0..100 {
        let (rx, sats) = fixture(seed, 3);
        assert_eq!(trilaterate(&observe(&rx, 0.0, &sats), WorldMode::Earth), Err(GeoError::InsufficientSatellites));
    }
}

#[test]
fn noisy_fix_degrades_gracefully() {
    let (rx, sats) = fixture(7, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let signals: Vec<_> = sats
        .iter()
        .enumerate()
        .map(|(i, s)| SatelliteSignal::observe(i as u32, *s, &rx, 0.0, rng.gen_range(-3.0..3.0)))
        .collect();
    let f = fix(&signals);
    assert!(distance(&f.position, &rx) < 50.0);
    assert!(f.residual_rms > 0.0 && f.residual_rms < 3.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_equivariance(seed in 0u64..10_000, dx in -1e5f64..1e5, dy in -1e5f64..1e5, dz in -1e5f64..1e5) {
        let (rx, sats) = fixture(seed, 5);
        let base = fix(&observe(&rx, 2e-4, &sats));
        let rx2 = rx.offset(dx, dy, dz);
        let sats2: Vec<_> = sats.iter().map(|s| s.offset(dx, dy, dz)).collect();
        let moved = fix(&observe(&rx2, 2e-4, &sats2));
        prop_assert!((moved.position.x - base.position.x - dx).abs() < 1e-3);
        prop_assert!((moved.position.y - base.position.y - dy).abs() < 1e-3);
        prop_assert!((moved.position.z - base.position.z - dz).abs() < 1e-3);
        prop_assert!((moved.clock_bias - base.clock_bias).abs() < 1e-12);
    }

    #[test]
    fn fifth_consistent_satellite_does_not_hurt(seed in 0u64..10_000) {
        let (rx, sats) = fixture(seed, 5);
        let four = trilaterate(&observe(&rx, 0.0, &sats[..4]), WorldMode::Earth);
        let five = fix(&observe(&rx, 0.0, &sats));
        if let Ok(four) = four {
            prop_assert!(five.residual_rms <= four.residual_rms + 1e-6);
        }
        prop_assert!(five.residual_rms < 1e-3);
    }
}
