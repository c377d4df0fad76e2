//! Horizon sweep on fixed synthetic scenarios against checked-in tables.
//! Set `ROADKG_BLESS=1` to rewrite the golden files.

use std::path::PathBuf;

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::{horizon_sweep, PipelineConfig};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn sweep_tsv(noise: f64, seed: u64) -> String {
    let spec = ScenarioSpec {
        seed,
        counts: ScenarioCounts::Vehicle { llc: 100, lk: 100, rlc: 100 },
        noise,
    };
    let SyntheticData::Vehicle(recs) = generate_synthetic(&spec).unwrap() else {
        unreachable!()
    };
    let mut cfg = PipelineConfig::desk();
    cfg.train.seed = seed;
    cfg.split.seed = seed;
    let out = horizon_sweep(&recs, &[1.0, 2.0, 3.0, 4.0], &ThresholdConfig::vehicle_default(), &cfg).unwrap();
    assert_eq!(out.table.rows.len(), 4);
    assert_eq!(out.table.train_tracks + out.table.test_tracks, 75);
    out.table.to_tsv()
}

fn check(name: &str, got: &str) {
    let path = golden(name);
    if std::env::var_os("ROADKG_BLESS").is_some() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "sweep differs from {}", path.display());
}

#[test]
fn clean_sweep_matches_golden() {
    check("sweep_noise0_seed7.tsv", &sweep_tsv(0.0, 7));
}

#[test]
fn noisy_sweep_matches_golden() {
    check("sweep_noise0.2_seed11.tsv", &sweep_tsv(0.2, 11));
}
