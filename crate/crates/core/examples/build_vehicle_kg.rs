//! Discretize synthetic lane-change tracks and build the vehicle graph.
//!
//! `cargo run --example build_vehicle_kg -- [out.tsv]`

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::discretize_vehicles;
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};
use roadkg::kg::{build_graph, export_triples, GraphMode, Ontology};

fn main() -> roadkg::Result<()> {
    let spec = ScenarioSpec {
        seed: 1,
        counts: ScenarioCounts::Vehicle { llc: 40, lk: 40, rlc: 40 },
        noise: 0.0,
    };
    let SyntheticData::Vehicle(records) = generate_synthetic(&spec)? else {
        unreachable!()
    };
    let frames = discretize_vehicles(&records, &ThresholdConfig::vehicle_default())?;
    let ontology = Ontology::vehicle();
    let store = build_graph(&frames, &ontology, GraphMode::Vehicle)?;
    let s = store.stats();
    println!("{} frames -> {} triples, {} entities, {} relations", frames.len(), s.triples, s.entities, s.relations);

    let first = &records[0];
    println!("\ntriples of track {} at {}s:", first.track_id, first.horizon_s);
    let id = format!("{}-{}", first.track_id, first.frame);
    for t in store.with_head(&id) {
        println!("  {} {} {}", t.head, t.relation, t.tail);
    }
    if let Some(path) = std::env::args().nth(1) {
        export_triples(&store, &path)?;
        println!("\nwrote {path}");
    }
    Ok(())
}
