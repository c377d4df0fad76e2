//! Train TransE on a synthetic vehicle graph and report filtered ranks on a
//! held-out split with no unseen symbols.
//!
//! `cargo run --release --example train_embeddings -- [transe|complex]`

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::{discretize_vehicles, split_no_unseen};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};
use roadkg::kg::{build_graph, GraphMode, Ontology};
use roadkg::kge::{evaluate_ranks, load_checkpoint, save_checkpoint, train, CorruptSide, Scorer, TrainConfig};

fn main() -> roadkg::Result<()> {
    env_logger::init();
    let scorer = match std::env::args().nth(1).as_deref() {
        Some("complex") => Scorer::ComplEx,
        _ => Scorer::TransE,
    };
    let spec = ScenarioSpec {
        seed: 2,
        counts: ScenarioCounts::Vehicle { llc: 60, lk: 60, rlc: 60 },
        noise: 0.05,
    };
    let SyntheticData::Vehicle(records) = generate_synthetic(&spec)? else {
        unreachable!()
    };
    let frames = discretize_vehicles(&records, &ThresholdConfig::vehicle_default())?;
    let store = build_graph(&frames, &Ontology::vehicle(), GraphMode::Vehicle)?;
    let (train_store, valid) = split_no_unseen(&store, 150, 0)?;
    println!("{} training triples, {} validation", train_store.len(), valid.len());

    let cfg = TrainConfig {
        scorer,
        k: 32,
        learning_rate: 0.01,
        batch_size: 256,
        max_epochs: 60,
        ..TrainConfig::vehicle_preset()
    };
    let (table, report) = train(&train_store, &valid, &cfg)?;
    println!(
        "{:?}: {} epochs, best validation MRR {:.4} at epoch {:?}",
        scorer,
        report.epochs_run,
        report.best_metric.unwrap_or(f64::NAN),
        report.best_epoch
    );

    let known: Vec<_> = store.triples().collect();
    let r = evaluate_ranks(&table, &valid, &known, CorruptSide::Both)?;
    println!("MRR {:.4}  MR {:.1}  H@1 {:.3}  H@3 {:.3}  H@10 {:.3}", r.mrr, r.mean_rank, r.hits_at_1, r.hits_at_3, r.hits_at_10);

    let dir = tempfile_dir();
    let path = dir.join("model.rkge");
    save_checkpoint(&table, &cfg, &path)?;
    let (back, _) = load_checkpoint(&path)?;
    println!("checkpoint round trip bit-identical: {}", back.bit_identical(&table));
    Ok(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("roadkg-example-{}", std::process::id()));
    std::fs::create_dir_all(&d).expect("temp dir");
    d
}
