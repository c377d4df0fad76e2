//! Seeded synthetic scenarios with planted labeling rules.
//!
//! Every feature of a record is drawn from its label's *typical* band with
//! probability `1 - noise` and otherwise from one of the other bands chosen
//! uniformly. Values are drawn uniformly inside a band and keep a margin from
//! the default thresholds, so at `noise = 0` the discretized frames of
//! distinct labels never coincide and a perfect classifier exists.
//!
//! Vehicle typical bands (lateral velocity, lateral acceleration, TTC with
//! P / LP / RP / LF / RF):
//!
//! | label | latVel   | latAcc | P      | LP  | RP  | LF   | RF     |
//! |-------|----------|--------|--------|-----|-----|------|--------|
//! | LLC   | left     | left   | medium | low | low | low  | low    |
//! | LK    | straight | zero   | low    | low | low | high | medium |
//! | RLC   | right    | right  | low    | low | low | low  | low    |
//!
//! A low-risk TTC is absent (no interacting vehicle) with probability 0.3.
//! Vehicle tracks hold four records sampled 1, 2, 3 and 4 s before crossing.
//!
//! Pedestrian typical values:
//!
//! | label       | activity | distCurb | distEgo | orientation | gaze |
//! |-------------|----------|----------|---------|-------------|------|
//! | crossRoad   | walk     | near     | near    | left (90°)  | 1    |
//! | noCrossRoad | stand    | far      | far     | veh (0°)    | 0    |
//!
//! Pedestrians hold ten frames each, two frames apart.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{NeighborTtc, PedestrianFrameRecord, VehicleFrameRecord, FRAME_RATE_HZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioCounts {
    Vehicle { llc: usize, lk: usize, rlc: usize },
    Pedestrian { cross: usize, no_cross: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub counts: ScenarioCounts,
    /// Probability in [0, 1] that a feature leaves its typical band.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticData {
    Vehicle(Vec<VehicleFrameRecord>),
    Pedestrian(Vec<PedestrianFrameRecord>),
}

const TRACK_HORIZONS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
const CROSSING_FRAME: u64 = 1000;
const PED_FRAMES: usize = 10;
const PED_FIRST_FRAME: u64 = 30;
const PED_STRIDE: u64 = 2;

// Bands as (low, high) value ranges, ordered lowest category first.
const LAT_VEL_BANDS: [(f64, f64); 3] = [(-1.2, -0.3), (-0.15, 0.15), (0.3, 1.2)];
const LAT_ACC_BANDS: [(f64, f64); 3] = [(-0.6, -0.15), (-0.08, 0.08), (0.15, 0.6)];
const TTC_BANDS: [(f64, f64); 3] = [(0.5, 2.8), (3.2, 5.8), (6.5, 20.0)];
const ABSENT_NEIGHBOR_P: f64 = 0.3;

const CURB_BANDS: [(f64, f64); 3] = [(0.0, 0.9), (1.1, 2.9), (3.1, 8.0)];
const EGO_BANDS: [(f64, f64); 5] = [(1.0, 4.5), (5.5, 9.5), (10.5, 19.5), (20.5, 34.0), (36.0, 60.0)];
const ORIENTATION_CENTERS: [f64; 4] = [0.0, 90.0, 180.0, 270.0];
const ACTIVITIES: [&str; 5] = ["stand", "walk", "wave", "run", "na"];

// Band indices: lateral bands [right, straight/zero, left]; TTC [high, medium, low].
const RIGHT: usize = 0;
const STRAIGHT: usize = 1;
const LEFT: usize = 2;
const HIGH: usize = 0;
const MEDIUM: usize = 1;
const LOW: usize = 2;

struct VehicleProfile {
    label: &'static str,
    lat_vel: usize,
    lat_acc: usize,
    // P, LP, RP, LF, RF
    ttc: [usize; 5],
}

const VEHICLE_PROFILES: [VehicleProfile; 3] = [
    VehicleProfile {
        label: "LLC",
        lat_vel: LEFT,
        lat_acc: LEFT,
        ttc: [MEDIUM, LOW, LOW, LOW, LOW],
    },
    VehicleProfile {
        label: "LK",
        lat_vel: STRAIGHT,
        lat_acc: STRAIGHT,
        ttc: [LOW, LOW, LOW, HIGH, MEDIUM],
    },
    VehicleProfile {
        label: "RLC",
        lat_vel: RIGHT,
        lat_acc: RIGHT,
        ttc: [LOW, LOW, LOW, LOW, LOW],
    },
];

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::InvalidInput(format!(
                "noise {} outside [0, 1]",
                self.noise
            )));
        }
        let total = match self.counts {
            ScenarioCounts::Vehicle { llc, lk, rlc } => llc + lk + rlc,
            ScenarioCounts::Pedestrian { cross, no_cross } => cross + no_cross,
        };
        if total == 0 {
            return Err(Error::InvalidInput(
                "scenario needs at least one label with a positive count".into(),
            ));
        }
        Ok(())
    }
}

/// Typical band with probability `1 - noise`, else another band uniformly.
fn pick_band(rng: &mut impl Rng, typical: usize, bands: usize, noise: f64) -> usize {
    if bands < 2 || rng.random::<f64>() >= noise {
        return typical;
    }
    let other = rng.random_range(0..bands - 1);
    if other >= typical {
        other + 1
    } else {
        other
    }
}

fn draw(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..hi)
}

fn draw_ttc(rng: &mut impl Rng, band: usize) -> Option<f64> {
    if band == LOW && rng.random::<f64>() < ABSENT_NEIGHBOR_P {
        return None;
    }
    Some(draw(rng, TTC_BANDS[band]))
}

pub fn generate_synthetic(spec: &ScenarioSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(match spec.counts {
        ScenarioCounts::Vehicle { llc, lk, rlc } => {
            SyntheticData::Vehicle(vehicles(&mut rng, [llc, lk, rlc], spec.noise))
        }
        ScenarioCounts::Pedestrian { cross, no_cross } => {
            SyntheticData::Pedestrian(pedestrians(&mut rng, [cross, no_cross], spec.noise))
        }
    })
}

fn vehicles(rng: &mut ChaCha8Rng, counts: [usize; 3], noise: f64) -> Vec<VehicleFrameRecord> {
    // Tracks of one label, interleaved across labels in random order.
    let mut tracks: Vec<(usize, usize)> = Vec::new();
    for (p, &n) in counts.iter().enumerate() {
        let per = TRACK_HORIZONS.len();
        for t in 0..n.div_ceil(per) {
            tracks.push((p, per.min(n - t * per)));
        }
    }
    tracks.shuffle(rng);
    let mut out = Vec::with_capacity(counts.iter().sum());
    for (track_no, &(p, len)) in tracks.iter().enumerate() {
        let profile = &VEHICLE_PROFILES[p];
        for &h in &TRACK_HORIZONS[..len] {
            let lat_vel = pick_band(rng, profile.lat_vel, 3, noise);
            let lat_acc = pick_band(rng, profile.lat_acc, 3, noise);
            let mut ttc = [None; 5];
            for (slot, &typical) in ttc.iter_mut().zip(&profile.ttc) {
                let band = pick_band(rng, typical, 3, noise);
                *slot = draw_ttc(rng, band);
            }
            out.push(VehicleFrameRecord {
                track_id: format!("{}", track_no + 1),
                frame: CROSSING_FRAME - (h * FRAME_RATE_HZ) as u64,
                lat_velocity: draw(rng, LAT_VEL_BANDS[lat_vel]),
                lat_acceleration: draw(rng, LAT_ACC_BANDS[lat_acc]),
                ttc: NeighborTtc {
                    preceding: ttc[0],
                    left_preceding: ttc[1],
                    right_preceding: ttc[2],
                    left_following: ttc[3],
                    right_following: ttc[4],
                },
                label: profile.label.to_string(),
                horizon_s: h,
            });
        }
    }
    out
}

fn pedestrians(rng: &mut ChaCha8Rng, counts: [usize; 2], noise: f64) -> Vec<PedestrianFrameRecord> {
    let mut peds: Vec<(bool, usize)> = Vec::new();
    for (i, &n) in counts.iter().enumerate() {
        for t in 0..n.div_ceil(PED_FRAMES) {
            peds.push((i == 0, PED_FRAMES.min(n - t * PED_FRAMES)));
        }
    }
    peds.shuffle(rng);
    let mut out = Vec::with_capacity(counts.iter().sum());
    for (ped_no, &(cross, len)) in peds.iter().enumerate() {
        // Index of the typical value within each band list.
        let (activity, curb, ego, orient, gaze) = if cross {
            (1, 0, 1, 1, 1)
        } else {
            (0, 2, 3, 0, 0)
        };
        for j in 0..len {
            let a = pick_band(rng, activity, ACTIVITIES.len(), noise);
            let c = pick_band(rng, curb, CURB_BANDS.len(), noise);
            let e = pick_band(rng, ego, EGO_BANDS.len(), noise);
            let o = pick_band(rng, orient, ORIENTATION_CENTERS.len(), noise);
            let g = pick_band(rng, gaze, 2, noise);
            let orientation = (ORIENTATION_CENTERS[o] + rng.random_range(-35.0..35.0)).rem_euclid(360.0);
            out.push(PedestrianFrameRecord {
                ped_id: format!("ped{:04}", ped_no + 1),
                frame: PED_FIRST_FRAME + PED_STRIDE * j as u64,
                activity: ACTIVITIES[a].to_string(),
                dist_ego: draw(rng, EGO_BANDS[e]),
                dist_curb: draw(rng, CURB_BANDS[c]),
                orientation_deg: orientation,
                gaze: g == 1,
                cross_label: cross,
            });
        }
    }
    out
}
