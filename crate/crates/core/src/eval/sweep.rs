use std::fmt::Write as _;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classification_report, discretize_vehicles, fit_frames, labeled_predictions, split_groups, ClassReport, PipelineConfig};
use crate::discretize::ThresholdConfig;
use crate::error::Result;
use crate::ingest::VehicleFrameRecord;
use crate::kg::{GraphMode, Ontology};
use crate::kge::TrainReport;

/// Row order of the lane-change tables.
pub const VEHICLE_REPORT_LABELS: [&str; 3] = ["LK", "LLC", "RLC"];

const HORIZON_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonRow {
    pub horizon_s: f64,
    pub report: ClassReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonTable {
    pub rows: Vec<HorizonRow>,
    pub train_tracks: usize,
    pub test_tracks: usize,
}

impl HorizonTable {
    pub fn row(&self, horizon_s: f64) -> Option<&HorizonRow> {
        self.rows.iter().find(|r| (r.horizon_s - horizon_s).abs() < HORIZON_TOLERANCE)
    }

    /// One line per (horizon, class) plus a macro line per horizon; values
    /// to four decimals.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("horizon_s\tclass\tprecision\trecall\tf1\tsupport\n");
        for r in &self.rows {
            for c in &r.report.classes {
                let _ = writeln!(
                    s,
                    "{:.1}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}",
                    r.horizon_s, c.label, c.precision, c.recall, c.f1, c.support
                );
            }
            let m = &r.report;
            let _ = writeln!(
                s,
                "{:.1}\tmacro avg\t{:.4}\t{:.4}\t{:.4}\t{}",
                r.horizon_s, m.macro_precision, m.macro_recall, m.macro_f1, m.total
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("horizon table serializes")
    }

    /// Human-readable blocks, one per horizon, percentages to two decimals.
    pub fn to_formatted(&self) -> String {
        let mut s = String::new();
        if self.rows.is_empty() {
            return s;
        }
        let _ = writeln!(
            s,
            "{:<6} {:<10} {:>9} {:>9} {:>9} {:>8}",
            "time", "class", "precision", "recall", "f1-score", "support"
        );
        for r in &self.rows {
            let time = format!("{:.1}s", r.horizon_s);
            for (i, c) in r.report.classes.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{:<6} {:<10} {:>9.2} {:>9.2} {:>9.2} {:>8}",
                    if i == 0 { time.as_str() } else { "" },
                    c.label,
                    100.0 * c.precision,
                    100.0 * c.recall,
                    100.0 * c.f1,
                    c.support
                );
            }
            let m = &r.report;
            let _ = writeln!(
                s,
                "{:<6} {:<10} {:>9.2} {:>9.2} {:>9.2} {:>8}",
                "",
                "macro avg",
                100.0 * m.macro_precision,
                100.0 * m.macro_recall,
                100.0 * m.macro_f1,
                m.total
            );
        }
        s
    }
}

/// Result of a sweep plus the training run behind it.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub table: HorizonTable,
    pub train_report: Option<TrainReport>,
}

/// Trains once on the first `train_fraction` of tracks (all horizons) and
/// reports on the held-out tracks at each horizon. Horizons without test
/// records are skipped with a warning.
pub fn horizon_sweep(
    records: &[VehicleFrameRecord],
    horizons: &[f64],
    thresholds: &ThresholdConfig,
    cfg: &PipelineConfig,
) -> Result<SweepOutcome> {
    let empty = |train_tracks, test_tracks| HorizonTable {
        rows: Vec::new(),
        train_tracks,
        test_tracks,
    };
    if horizons.is_empty() {
        return Ok(SweepOutcome {
            table: empty(0, 0),
            train_report: None,
        });
    }
    cfg.validate()?;
    let ontology = Ontology::vehicle();
    let (train_recs, test_recs) = split_groups(records, |r| r.track_id.clone(), cfg.split.train_fraction);
    let count_tracks = |v: &[&VehicleFrameRecord]| {
        let mut ids: Vec<&str> = v.iter().map(|r| r.track_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    };
    let (n_train, n_test) = (count_tracks(&train_recs), count_tracks(&test_recs));
    let train_recs: Vec<VehicleFrameRecord> = train_recs.into_iter().cloned().collect();
    let frames = discretize_vehicles(&train_recs, thresholds)?;
    let model = fit_frames(&frames, &ontology, GraphMode::Vehicle, &[], cfg)?;

    let rows: Vec<Option<HorizonRow>> = horizons
        .par_iter()
        .map(|&h| {
            let at: Vec<VehicleFrameRecord> = test_recs
                .iter()
                .filter(|r| (r.horizon_s - h).abs() < HORIZON_TOLERANCE)
                .map(|r| (*r).clone())
                .collect();
            if at.is_empty() {
                warn!("no test records {h}s before the crossing; horizon skipped");
                return Ok(None);
            }
            let frames = discretize_vehicles(&at, thresholds)?;
            let (y_true, y_pred) = labeled_predictions(&model, &frames)?;
            let report = classification_report(&y_true, &y_pred, &VEHICLE_REPORT_LABELS.map(String::from))?;
            Ok(Some(HorizonRow { horizon_s: h, report }))
        })
        .collect::<Result<_>>()?;
    let mut table = empty(n_train, n_test);
    table.rows = rows.into_iter().flatten().collect();
    Ok(SweepOutcome {
        table,
        train_report: Some(model.report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_horizon_list_gives_empty_table() {
        let out = horizon_sweep(&[], &[], &ThresholdConfig::vehicle_default(), &PipelineConfig::desk()).unwrap();
        assert!(out.table.rows.is_empty());
        assert_eq!(out.table.to_formatted(), "");
        assert_eq!(out.table.to_tsv().lines().count(), 1);
    }

    #[test]
    fn tsv_and_table_layout() {
        let y = ["LK", "LLC", "RLC"];
        let report = classification_report(&y, &y, &VEHICLE_REPORT_LABELS).unwrap();
        let t = HorizonTable {
            rows: vec![HorizonRow { horizon_s: 3.0, report }],
            train_tracks: 4,
            test_tracks: 1,
        };
        let tsv = t.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[1], "3.0\tLK\t1.0000\t1.0000\t1.0000\t1");
        assert_eq!(lines[4], "3.0\tmacro avg\t1.0000\t1.0000\t1.0000\t3");
        let f = t.to_formatted();
        assert!(f.lines().nth(1).unwrap().starts_with("3.0s   LK"));
        let back: HorizonTable = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(t.row(3.0).is_some() && t.row(2.0).is_none());
    }
}
