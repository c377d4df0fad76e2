//! Numeric per-frame records: HighD-shaped vehicle tables, JAAD/PSI-shaped
//! pedestrian feature tables, and a seeded synthetic scenario generator.

mod csvio;
mod synthetic;

use serde::{Deserialize, Serialize};

pub use csvio::{
    read_pedestrian_features, read_vehicle_rows, read_vehicle_tracks, write_pedestrian_csv,
    write_vehicle_csv, PEDESTRIAN_COLUMNS, VEHICLE_COLUMNS,
};
pub use synthetic::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};

/// HighD recordings are sampled at 25 Hz.
pub const FRAME_RATE_HZ: f64 = 25.0;

/// Time to collision for a longitudinal `gap` (m) closing at `closing_speed`
/// (m/s). `None` when the gap is not closing.
pub fn ttc(gap: f64, closing_speed: f64) -> Option<f64> {
    (closing_speed > 0.0 && gap.is_finite() && closing_speed.is_finite())
        .then(|| gap / closing_speed)
}

/// TTC to each neighbor, `None` when there is no interacting vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NeighborTtc {
    pub preceding: Option<f64>,
    pub left_preceding: Option<f64>,
    pub right_preceding: Option<f64>,
    pub left_following: Option<f64>,
    pub right_following: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleFrameRecord {
    pub track_id: String,
    pub frame: u64,
    /// m/s, left-positive.
    pub lat_velocity: f64,
    /// m/s², left-positive.
    pub lat_acceleration: f64,
    pub ttc: NeighborTtc,
    pub label: String,
    /// Seconds before the lane-marking crossing.
    pub horizon_s: f64,
}

impl VehicleFrameRecord {
    /// Value of a numeric feature by its CSV column name.
    pub fn feature(&self, name: &str) -> Option<Option<f64>> {
        Some(match name {
            "latVelocity" => Some(self.lat_velocity),
            "latAcceleration" => Some(self.lat_acceleration),
            "ttcP" => self.ttc.preceding,
            "ttcLP" => self.ttc.left_preceding,
            "ttcRP" => self.ttc.right_preceding,
            "ttcLF" => self.ttc.left_following,
            "ttcRF" => self.ttc.right_following,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PedestrianFrameRecord {
    pub ped_id: String,
    pub frame: u64,
    pub activity: String,
    /// Meters to the ego vehicle.
    pub dist_ego: f64,
    /// Meters to the curb.
    pub dist_curb: f64,
    /// Degrees in [0, 360).
    pub orientation_deg: f64,
    /// Looking at the ego vehicle.
    pub gaze: bool,
    /// Crosses within the next 30 frames.
    pub cross_label: bool,
}

impl PedestrianFrameRecord {
    pub fn feature(&self, name: &str) -> Option<f64> {
        Some(match name {
            "distEgo" => self.dist_ego,
            "distCurb" => self.dist_curb,
            "orientationDeg" => self.orientation_deg,
            "gaze" => f64::from(u8::from(self.gaze)),
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        if self.cross_label {
            "crossRoad"
        } else {
            "noCrossRoad"
        }
    }
}

/// Keeps every `stride`-th frame of each pedestrian counted from that
/// pedestrian's first frame.
pub fn sample_stride(records: &[PedestrianFrameRecord], stride: u64) -> Vec<PedestrianFrameRecord> {
    let stride = stride.max(1);
    let mut first: std::collections::HashMap<&str, u64> = std::collections::HashMap::new();
    for r in records {
        first
            .entry(&r.ped_id)
            .and_modify(|f| *f = (*f).min(r.frame))
            .or_insert(r.frame);
    }
    records
        .iter()
        .filter(|r| (r.frame - first[r.ped_id.as_str()]).is_multiple_of(stride))
        .cloned()
        .collect()
}
