//! PedFeatKG against PedFeatRulesKG on held-out synthetic pedestrians.
//!
//! `cargo run --release --example pedestrian_pipeline -- [noise] [seed]`

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::{classification_report, discretize_pedestrians, fit_frames, labeled_predictions, split_groups, PipelineConfig};
use roadkg::fuzzy::{parse_rules_str, JAAD_RULES};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};
use roadkg::kg::{GraphMode, LinguisticFrame, Ontology};

fn main() -> roadkg::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let noise: f64 = args.first().map_or(0.3, |s| s.parse().expect("noise"));
    let seed: u64 = args.get(1).map_or(0, |s| s.parse().expect("seed"));
    let spec = ScenarioSpec {
        seed,
        counts: ScenarioCounts::Pedestrian { cross: 300, no_cross: 300 },
        noise,
    };
    let SyntheticData::Pedestrian(records) = generate_synthetic(&spec)? else {
        unreachable!()
    };
    let ontology = Ontology::pedestrian();
    let rules = parse_rules_str(JAAD_RULES, &ontology)?;
    let frames = discretize_pedestrians(&records, &ThresholdConfig::pedestrian_default())?;
    let (train, test) = split_groups(&frames, |f| f.user_id.clone(), 0.8);
    let train: Vec<LinguisticFrame> = train.into_iter().cloned().collect();
    let test: Vec<LinguisticFrame> = test.into_iter().cloned().collect();
    let labels = ontology.labels().to_vec();

    for mode in [GraphMode::PedFeat, GraphMode::PedFeatRules] {
        let cfg = PipelineConfig {
            train: roadkg::kge::TrainConfig { seed, ..PipelineConfig::desk().train },
            ..PipelineConfig::desk()
        };
        let model = fit_frames(&train, &ontology, mode, &rules, &cfg)?;
        let (y_true, y_pred) = labeled_predictions(&model, &test)?;
        let report = classification_report(&y_true, &y_pred, &labels)?;
        println!("{mode:?}: {} training triples, macro F1 {:.4}", model.stats.triples, report.macro_f1);
        print!("{}", report.to_table());
        println!();
    }
    Ok(())
}
