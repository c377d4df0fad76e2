//! Horizon sweep on synthetic lane-change tracks.
//!
//! `cargo run --release --example horizon_sweep -- [noise] [frames-per-label] [seed]`

use std::time::Instant;

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::{horizon_sweep, PipelineConfig};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};

fn main() -> roadkg::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let noise: f64 = args.first().map_or(0.1, |s| s.parse().expect("noise"));
    let n: usize = args.get(1).map_or(300, |s| s.parse().expect("frames per label"));
    let seed: u64 = args.get(2).map_or(7, |s| s.parse().expect("seed"));

    let spec = ScenarioSpec {
        seed,
        counts: ScenarioCounts::Vehicle { llc: n, lk: n, rlc: n },
        noise,
    };
    let SyntheticData::Vehicle(records) = generate_synthetic(&spec)? else {
        unreachable!("vehicle counts give vehicle records")
    };
    let start = Instant::now();
    let out = horizon_sweep(
        &records,
        &[1.0, 2.0, 3.0, 4.0],
        &ThresholdConfig::vehicle_default(),
        &PipelineConfig::desk(),
    )?;
    print!("{}", out.table.to_formatted());
    if let Some(r) = &out.train_report {
        println!(
            "epochs {} (best {:?}, metric {:?}), {:.1}s",
            r.epochs_run,
            r.best_epoch,
            r.best_metric,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
