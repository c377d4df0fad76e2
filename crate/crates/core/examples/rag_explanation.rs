//! Template explanation plus retrieval over a corpus of past explanations,
//! answered by the offline stub backend.
//!
//! `cargo run --release --example rag_explanation -- [k]`

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::{discretize_pedestrians, fit_frames, PipelineConfig};
use roadkg::explain::{
    build_query, chunk_corpus, corpus_from_frames, generate, render_template, HashingEmbedder, PromptBundle,
    StubBackend, VectorStore,
};
use roadkg::fuzzy::{parse_rules_str, JAAD_RULES};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};
use roadkg::kg::{GraphMode, Ontology};

fn main() -> roadkg::Result<()> {
    let k: usize = std::env::args().nth(1).map_or(3, |s| s.parse().expect("k"));
    let spec = ScenarioSpec {
        seed: 4,
        counts: ScenarioCounts::Pedestrian { cross: 150, no_cross: 150 },
        noise: 0.1,
    };
    let SyntheticData::Pedestrian(records) = generate_synthetic(&spec)? else {
        unreachable!()
    };
    let ontology = Ontology::pedestrian();
    let rules = parse_rules_str(JAAD_RULES, &ontology)?;
    let frames = discretize_pedestrians(&records, &ThresholdConfig::pedestrian_default())?;
    let model = fit_frames(&frames, &ontology, GraphMode::PedFeatRules, &rules, &PipelineConfig::desk())?;

    let frame = &frames[0];
    let pred = model.predict(frame)?;
    println!("template: {}\n", render_template(&pred, frame, &ontology));

    let corpus = corpus_from_frames(&frames[1..], &ontology);
    let chunks = chunk_corpus(&corpus, 64)?;
    let embedder = HashingEmbedder::default();
    let index = VectorStore::build(&chunks, &embedder)?;
    println!("{} chunks indexed", index.len());

    let query = build_query(frame, &pred, &ontology);
    let bundle = PromptBundle::assemble(&index, &embedder, &query, k)?;
    for c in &bundle.chunks {
        println!("  {} sim {:.3}", c.id, c.similarity);
    }
    println!("\nanswer: {}", generate(&bundle, &StubBackend)?);
    Ok(())
}
