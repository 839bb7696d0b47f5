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

//! GPS self-fix and bearings-only emitter localization.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3, Vector4};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::GeoError;
use crate::model::{Position, WorldMode, EARTH_RADIUS_M};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const MIN_SATELLITES: usize = 4;
pub const MAX_ITERATIONS: usize = 20;
pub const STEP_TOLERANCE_M: f64 = 1e-6;
pub const GEOMETRY_RATIO: f64 = 1e-3;
const PARALLEL_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteSignal {
    pub sat_id: u32,
    pub sat_position: Position,
    /// True range plus `c * clock_bias` plus noise, in meters.
    pub pseudorange: f64,
}

impl SatelliteSignal {
    /// Forward model: the pseudorange a receiver at `receiver` with clock
    /// offset `clock_bias` seconds would measure.
    pub fn observe(sat_id: u32, sat_position: Position, receiver: &Position, clock_bias: f64, noise_m: f64) -> Self {
        let pseudorange = crate::model::distance(&sat_position, receiver) + SPEED_OF_LIGHT * clock_bias + noise_m;
        SatelliteSignal { sat_id, sat_position, pseudorange }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpsFix {
    pub position: Position,
    /// Receiver clock offset in seconds.
    pub clock_bias: f64,
    pub residual_rms: f64,
    pub sats_used: usize,
}

fn vec3(p: &Position) -> Vector3<f64> {
    Vector3::new(p.x, p.y, p.z)
}

fn pos(v: &Vector3<f64>) -> Position {
    Position::new(v.x, v.y, v.z)
}

/// Smallest-to-largest singular value ratio of the centered satellite positions.
fn geometry_ratio(signals: &[SatelliteSignal]) -> f64 {
    let n = signals.len();
    let centroid = signals.iter().map(|s| vec3(&s.sat_position)).sum::<Vector3<f64>>() / n as f64;
    let m = DMatrix::from_fn(n, 3, |i, j| vec3(&signals[i].sat_position)[j] - centroid[j]);
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0.0;
    }
    sv.min() / max
}

/// Satellite centroid projected onto the mode's nominal surface.
pub fn initial_guess(signals: &[SatelliteSignal], mode: WorldMode) -> Position {
    let n = signals.len().max(1) as f64;
    let c = signals.iter().map(|s| vec3(&s.sat_position)).sum::<Vector3<f64>>() / n;
    match mode {
        WorldMode::Flat => Position::new(c.x, c.y, 0.0),
        WorldMode::Earth => {
            let norm = c.norm();
            if norm == 0.0 {
                Position::new(EARTH_RADIUS_M, 0.0, 0.0)
            } else {
                pos(&(c * (EARTH_RADIUS_M / norm)))
            }
        }
    }
}

pub fn trilaterate(signals: &[SatelliteSignal], mode: WorldMode) -> Result<GpsFix, GeoError> {
    trilaterate_from(signals, initial_guess(signals, mode))
}

/// Gauss-Newton over `(p, c*b)` with identity weighting.
pub fn trilaterate_from(signals: &[SatelliteSignal], guess: Position) -> Result<GpsFix, GeoError> {
    if signals.len() < MIN_SATELLITES {
        return Err(GeoError::InsufficientSatellites);
    }
    if signals.iter().any(|s| !s.sat_position.is_finite() || !(s.pseudorange.is_finite() && s.pseudorange > 0.0)) {
        return Err(GeoError::InvalidSignal);
    }
    if geometry_ratio(signals) <= GEOMETRY_RATIO {
        return Err(GeoError::DegenerateGeometry);
    }
    let n = signals.len();
    let mut x = Vector4::new(guess.x, guess.y, guess.z, 0.0);
    let residuals = |x: &Vector4<f64>| {
        DVector::from_iterator(
            n,
            signals.iter().map(|s| (vec3(&s.sat_position) - x.xyz()).norm() + x.w - s.pseudorange),
        )
    };
    for _ in 0..MAX_ITERATIONS {
        let r = residuals(&x);
        let mut j = DMatrix::zeros(n, 4);
        for (i, s) in signals.iter().enumerate() {
            let d = x.xyz() - vec3(&s.sat_position);
            let u = d / d.norm();
            j[(i, 0)] = u.x;
            j[(i, 1)] = u.y;
            j[(i, 2)] = u.z;
            j[(i, 3)] = 1.0;
        }
        let step = j.svd(true, true).solve(&(-r), 1e-15).map_err(|_| GeoError::NoConvergence)?;
        let step = Vector4::new(step[0], step[1], step[2], step[3]);
        if !step.iter().all(|v| v.is_finite()) {
            return Err(GeoError::NoConvergence);
        }
        x += step;
        if step.norm() < STEP_TOLERANCE_M {
            let r = residuals(&x);
            return Ok(GpsFix {
                position: pos(&x.xyz()),
                clock_bias: x.w / SPEED_OF_LIGHT,
                residual_rms: (r.norm_squared() / n as f64).sqrt(),
                sats_used: n,
            });
        }
    }
    Err(GeoError::NoConvergence)
}

/// One radar observation: observer position and a direction toward the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BearingObservation {
    pub observer: Position,
    pub bearing: [f64; 3],
}

impl BearingObservation {
    pub fn toward(observer: Position, target: &Position) -> Self {
        let d = vec3(target) - vec3(&observer);
        BearingObservation { observer, bearing: (d / d.norm()).into() }
    }

    /// Bearing rotated by a Gaussian angular error of `sigma_rad` per axis
    /// perpendicular to the true direction.
    pub fn noisy<R: Rng>(observer: Position, target: &Position, sigma_rad: f64, rng: &mut R) -> Self {
        let u = vec3(target) - vec3(&observer);
        let u = u / u.norm();
        if sigma_rad <= 0.0 {
            return BearingObservation { observer, bearing: u.into() };
        }
        let helper = if u.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = u.cross(&helper).normalize();
        let e2 = u.cross(&e1);
        let normal = Normal::new(0.0, sigma_rad).expect("positive sigma");
        let (a, b) = (normal.sample(rng), normal.sample(rng));
        let v = (u + e1 * a.tan() + e2 * b.tan()).normalize();
        BearingObservation { observer, bearing: v.into() }
    }
}

/// Point minimizing the summed squared perpendicular distance to all rays.
pub fn localize_emitter(track: &[BearingObservation]) -> Result<Position, GeoError> {
    if track.len() < 2 {
        return Err(GeoError::InsufficientObservations);
    }
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for obs in track {
        let u = Vector3::from(obs.bearing);
        let norm = u.norm();
        if !(norm.is_finite() && norm > 0.0) || !obs.observer.is_finite() {
            return Err(GeoError::InvalidBearing);
        }
        let u = u / norm;
        let proj = Matrix3::identity() - u * u.transpose();
        a += proj;
        b += proj * vec3(&obs.observer);
    }
    let eig = SymmetricEigen::new(a).eigenvalues;
    if eig.min() <= PARALLEL_RATIO * eig.max() {
        return Err(GeoError::ParallelBearings);
    }
    let p = a.lu().solve(&b).ok_or(GeoError::ParallelBearings)?;
    Ok(pos(&p))
}
