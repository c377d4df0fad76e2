//! CSV adapters.
//!
//! Vehicle tables carry one row per (track, frame) with the columns in
//! [`VEHICLE_COLUMNS`]. An empty TTC cell means no interacting vehicle unless
//! the row also provides `egoSpeed` plus `gap{X}` and `speed{X}` for that
//! neighbor, in which case TTC is the gap over the closing speed. Rows of a
//! lane-change track are assumed to end at the lane-marking crossing; an
//! optional `horizon` column overrides that and tags rows that are already
//! sampled at a given number of seconds before crossing.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::ingest::{ttc, NeighborTtc, PedestrianFrameRecord, VehicleFrameRecord, FRAME_RATE_HZ};

pub const VEHICLE_COLUMNS: [&str; 10] = [
    "trackId",
    "frame",
    "latVelocity",
    "latAcceleration",
    "ttcP",
    "ttcLP",
    "ttcRP",
    "ttcLF",
    "ttcRF",
    "label",
];

pub const PEDESTRIAN_COLUMNS: [&str; 8] = [
    "pedId",
    "frame",
    "activity",
    "distEgo",
    "distCurb",
    "orientationDeg",
    "gaze",
    "crossLabel",
];

const NEIGHBORS: [&str; 5] = ["P", "LP", "RP", "LF", "RF"];

struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read<R: Read>(r: R, required: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let headers = reader
            .headers()
            .map_err(|e| Error::InvalidInput(format!("unreadable header: {e}")))?
            .clone();
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        for c in required {
            if !columns.contains_key(*c) {
                return Err(Error::MissingColumn(c.to_string()));
            }
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            rows.push(rec.map_err(|e| Error::Cell {
                row: i + 1,
                column: "*".into(),
                message: e.to_string(),
            })?);
        }
        Ok(Self { columns, rows })
    }

    fn has(&self, column: &str) -> bool {
        self.columns.contains_key(column)
    }

    fn cell<'a>(&self, row: &'a csv::StringRecord, column: &str) -> Option<&'a str> {
        self.columns
            .get(column)
            .and_then(|&i| row.get(i))
            .map(str::trim)
    }

    fn text(&self, row_no: usize, row: &csv::StringRecord, column: &str) -> Result<String> {
        match self.cell(row, column) {
            Some(s) if !s.is_empty() => Ok(s.to_string()),
            _ => Err(bad(row_no, column, "empty cell")),
        }
    }

    fn num(&self, row_no: usize, row: &csv::StringRecord, column: &str) -> Result<f64> {
        self.opt_num(row_no, row, column)?
            .ok_or_else(|| bad(row_no, column, "empty cell"))
    }

    fn opt_num(&self, row_no: usize, row: &csv::StringRecord, column: &str) -> Result<Option<f64>> {
        match self.cell(row, column) {
            None | Some("") => Ok(None),
            Some(s) => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| bad(row_no, column, &format!("`{s}` is not a number")))?;
                if v.is_nan() {
                    return Err(bad(row_no, column, "NaN"));
                }
                Ok(Some(v))
            }
        }
    }

    fn frame(&self, row_no: usize, row: &csv::StringRecord) -> Result<u64> {
        let s = self.text(row_no, row, "frame")?;
        s.parse()
            .map_err(|_| bad(row_no, "frame", &format!("`{s}` is not a frame number ≥ 0")))
    }
}

fn bad(row: usize, column: &str, message: &str) -> Error {
    Error::Cell {
        row,
        column: column.to_string(),
        message: message.to_string(),
    }
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn neighbor_ttc(table: &Table, row_no: usize, row: &csv::StringRecord, n: &str) -> Result<Option<f64>> {
    let column = format!("ttc{n}");
    if let Some(v) = table.opt_num(row_no, row, &column)? {
        if !v.is_finite() {
            return Ok(None);
        }
        if v <= 0.0 {
            return Err(bad(row_no, &column, "TTC must be positive"));
        }
        return Ok(Some(v));
    }
    let gap = table.opt_num(row_no, row, &format!("gap{n}"))?;
    let speed = table.opt_num(row_no, row, &format!("speed{n}"))?;
    let ego = table.opt_num(row_no, row, "egoSpeed")?;
    Ok(match (gap, speed, ego) {
        (Some(g), Some(v), Some(e)) => {
            let closing = if n.ends_with('P') { e - v } else { v - e };
            ttc(g, closing)
        }
        _ => None,
    })
}

/// Every row of a vehicle table. The horizon tag is taken from the `horizon`
/// column when present, else computed from the track's last frame.
pub fn read_vehicle_rows(path: impl AsRef<Path>) -> Result<Vec<VehicleFrameRecord>> {
    read_vehicle_rows_from(open(path.as_ref())?)
}

pub(crate) fn read_vehicle_rows_from<R: Read>(r: R) -> Result<Vec<VehicleFrameRecord>> {
    let table = Table::read(r, &VEHICLE_COLUMNS)?;
    let explicit_horizon = table.has("horizon");
    let mut out = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let row_no = i + 1;
        let ttc_of = |n| neighbor_ttc(&table, row_no, row, n);
        let horizon_s = if explicit_horizon {
            table.num(row_no, row, "horizon")?
        } else {
            f64::NAN
        };
        out.push(VehicleFrameRecord {
            track_id: table.text(row_no, row, "trackId")?,
            frame: table.frame(row_no, row)?,
            lat_velocity: finite(table.num(row_no, row, "latVelocity")?, row_no, "latVelocity")?,
            lat_acceleration: finite(
                table.num(row_no, row, "latAcceleration")?,
                row_no,
                "latAcceleration",
            )?,
            ttc: NeighborTtc {
                preceding: ttc_of(NEIGHBORS[0])?,
                left_preceding: ttc_of(NEIGHBORS[1])?,
                right_preceding: ttc_of(NEIGHBORS[2])?,
                left_following: ttc_of(NEIGHBORS[3])?,
                right_following: ttc_of(NEIGHBORS[4])?,
            },
            label: table.text(row_no, row, "label")?,
            horizon_s,
        });
    }
    if !explicit_horizon {
        let mut last: HashMap<String, u64> = HashMap::new();
        for r in &out {
            let e = last.entry(r.track_id.clone()).or_insert(r.frame);
            *e = (*e).max(r.frame);
        }
        for r in &mut out {
            r.horizon_s = (last[&r.track_id] - r.frame) as f64 / FRAME_RATE_HZ;
        }
    }
    Ok(out)
}

fn finite(v: f64, row: usize, column: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(row, column, "value must be finite"))
    }
}

/// One record per (track, horizon): the row sampled `h` seconds before the
/// crossing, or the closest earlier row. Tracks too short for a horizon are
/// skipped with a warning.
pub fn read_vehicle_tracks(path: impl AsRef<Path>, horizons: &[f64]) -> Result<Vec<VehicleFrameRecord>> {
    let rows = read_vehicle_rows(path)?;
    Ok(sample_horizons(&rows, horizons))
}

pub(crate) fn sample_horizons(rows: &[VehicleFrameRecord], horizons: &[f64]) -> Vec<VehicleFrameRecord> {
    let mut order: Vec<&str> = Vec::new();
    let mut tracks: HashMap<&str, Vec<&VehicleFrameRecord>> = HashMap::new();
    for r in rows {
        tracks
            .entry(&r.track_id)
            .or_insert_with(|| {
                order.push(&r.track_id);
                Vec::new()
            })
            .push(r);
    }
    let tolerance = 0.5 / FRAME_RATE_HZ;
    let mut out = Vec::new();
    for id in order {
        let track = &tracks[id];
        for &h in horizons {
            // Smallest horizon tag that is still at least `h` seconds out.
            let pick = track
                .iter()
                .filter(|r| r.horizon_s + tolerance >= h)
                .min_by(|a, b| a.horizon_s.total_cmp(&b.horizon_s));
            match pick {
                Some(r) if r.horizon_s - h <= 0.5 + tolerance => {
                    let mut rec = (*r).clone();
                    rec.horizon_s = h;
                    out.push(rec);
                }
                _ => warn!("track {id} is shorter than horizon {h}s; skipped"),
            }
        }
    }
    out
}

pub fn read_pedestrian_features(path: impl AsRef<Path>) -> Result<Vec<PedestrianFrameRecord>> {
    read_pedestrian_from(open(path.as_ref())?)
}

fn binary(table: &Table, row_no: usize, row: &csv::StringRecord, column: &str) -> Result<bool> {
    match table.text(row_no, row, column)?.as_str() {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        other => Err(bad(row_no, column, &format!("`{other}` is not binary"))),
    }
}

pub(crate) fn read_pedestrian_from<R: Read>(r: R) -> Result<Vec<PedestrianFrameRecord>> {
    let table = Table::read(r, &PEDESTRIAN_COLUMNS)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let row_no = i + 1;
        let orientation = table.num(row_no, row, "orientationDeg")?;
        if !(0.0..360.0).contains(&orientation) {
            return Err(bad(row_no, "orientationDeg", "orientation out of range"));
        }
        let dist = |column: &str| -> Result<f64> {
            let v = table.num(row_no, row, column)?;
            if v < 0.0 || !v.is_finite() {
                return Err(bad(row_no, column, "distance must be finite and ≥ 0"));
            }
            Ok(v)
        };
        out.push(PedestrianFrameRecord {
            ped_id: table.text(row_no, row, "pedId")?,
            frame: table.frame(row_no, row)?,
            activity: table.text(row_no, row, "activity")?,
            dist_ego: dist("distEgo")?,
            dist_curb: dist("distCurb")?,
            orientation_deg: orientation,
            gaze: binary(&table, row_no, row, "gaze")?,
            cross_label: binary(&table, row_no, row, "crossLabel")?,
        });
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records with an explicit `horizon` column so they round-trip.
pub fn write_vehicle_csv<W: Write>(w: W, records: &[VehicleFrameRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
    let mut header: Vec<&str> = VEHICLE_COLUMNS.to_vec();
    header.push("horizon");
    wr.write_record(&header).map_err(io)?;
    for r in records {
        wr.write_record([
            r.track_id.clone(),
            r.frame.to_string(),
            r.lat_velocity.to_string(),
            r.lat_acceleration.to_string(),
            fmt_opt(r.ttc.preceding),
            fmt_opt(r.ttc.left_preceding),
            fmt_opt(r.ttc.right_preceding),
            fmt_opt(r.ttc.left_following),
            fmt_opt(r.ttc.right_following),
            r.label.clone(),
            r.horizon_s.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn write_pedestrian_csv<W: Write>(w: W, records: &[PedestrianFrameRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
    wr.write_record(PEDESTRIAN_COLUMNS).map_err(io)?;
    for r in records {
        wr.write_record([
            r.ped_id.clone(),
            r.frame.to_string(),
            r.activity.clone(),
            r.dist_ego.to_string(),
            r.dist_curb.to_string(),
            r.orientation_deg.to_string(),
            u8::from(r.gaze).to_string(),
            u8::from(r.cross_label).to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "trackId,frame,latVelocity,latAcceleration,ttcP,ttcLP,ttcRP,ttcLF,ttcRF,label";

    fn two_tracks() -> String {
        let mut s = String::from(HEADER);
        s.push('\n');
        for (track, label) in [("1", "LLC"), ("2", "LK")] {
            for frame in 0..=110u64 {
                s.push_str(&format!("{track},{frame},0.1,0.0,4.0,,,8.0,,{label}\n"));
            }
        }
        s
    }

    #[test]
    fn samples_one_record_per_track_and_horizon() {
        let rows = read_vehicle_rows_from(two_tracks().as_bytes()).unwrap();
        let recs = sample_horizons(&rows, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(recs.len(), 8);
        let r = recs.iter().find(|r| r.track_id == "1" && r.horizon_s == 2.0).unwrap();
        assert_eq!(r.frame, 110 - 50);
        assert_eq!(r.ttc.left_preceding, None);
        assert_eq!(r.ttc.left_following, Some(8.0));
    }

    #[test]
    fn short_track_skips_horizon() {
        let rows = read_vehicle_rows_from(two_tracks().as_bytes()).unwrap();
        let recs = sample_horizons(&rows, &[10.0]);
        assert!(recs.is_empty());
    }

    #[test]
    fn ttc_from_gap_and_speeds() {
        let data = format!(
            "{HEADER},egoSpeed,gapP,speedP,gapLF,speedLF\n7,3,0,0,,,,,,LK,30,30,20,15,20\n"
        );
        let rows = read_vehicle_rows_from(data.as_bytes()).unwrap();
        assert_eq!(rows[0].ttc.preceding, Some(3.0));
        // Left-following vehicle is slower than ego: not closing.
        assert_eq!(rows[0].ttc.left_following, None);
    }

    #[test]
    fn missing_column_is_named() {
        let err = read_vehicle_rows_from("trackId,frame\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "latVelocity"));
    }

    #[test]
    fn non_numeric_cell_reports_row() {
        let data = format!("{HEADER}\n1,0,0.1,0,4,,,,,LK\n1,1,fast,0,4,,,,,LK\n");
        let err = read_vehicle_rows_from(data.as_bytes()).unwrap_err();
        match err {
            Error::Cell { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "latVelocity");
            }
            other => panic!("{other}"),
        }
    }

    const PED_HEADER: &str = "pedId,frame,activity,distEgo,distCurb,orientationDeg,gaze,crossLabel";

    #[test]
    fn orientation_out_of_range() {
        let data = format!("{PED_HEADER}\np1,30,walk,10,1,365,1,0\n");
        let err = read_pedestrian_from(data.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("orientation out of range"), "{err}");
    }

    #[test]
    fn gaze_one_is_looking() {
        let data = format!("{PED_HEADER}\np1,30,walk,10,1,90,1,0\np1,32,walk,10,1,90,0,1\n");
        let recs = read_pedestrian_from(data.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs[0].gaze);
        assert!(!recs[1].gaze);
        assert!(recs[1].cross_label);
    }

    #[test]
    fn negative_distance_rejected() {
        let data = format!("{PED_HEADER}\np1,30,walk,-1,1,90,1,0\n");
        assert!(read_pedestrian_from(data.as_bytes()).is_err());
    }
}
