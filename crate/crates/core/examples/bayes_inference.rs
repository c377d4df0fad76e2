//! Posterior over crossing intention for one pedestrian frame, with the full
//! factor trace.
//!
//! `cargo run --release --example bayes_inference`

use roadkg::bayes::Factor;
use roadkg::discretize::ThresholdConfig;
use roadkg::eval::{discretize_pedestrians, fit_frames, PipelineConfig};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};
use roadkg::kg::{GraphMode, LinguisticFrame, Ontology};

fn main() -> roadkg::Result<()> {
    let spec = ScenarioSpec {
        seed: 5,
        counts: ScenarioCounts::Pedestrian { cross: 200, no_cross: 200 },
        noise: 0.1,
    };
    let SyntheticData::Pedestrian(records) = generate_synthetic(&spec)? else {
        unreachable!()
    };
    let ontology = Ontology::pedestrian();
    let frames = discretize_pedestrians(&records, &ThresholdConfig::pedestrian_default())?;
    let model = fit_frames(&frames, &ontology, GraphMode::PedFeat, &[], &PipelineConfig::desk())?;

    let frame = LinguisticFrame::new("example_ped", 42)
        .with("MOTION", "Walk")
        .with("LOCATION", "NearFromCurb")
        .with("EGO_DISTANCE", "NearToEgoVeh")
        .with("ORIENTATION", "LeftDirection")
        .with("ATTENTION", "Looking");
    let pred = model.predict(&frame)?;

    println!("predicted: {}\n", pred.label);
    println!("{:<12} {:>10} {:>14} {:>14}", "label", "log prior", "log likelihood", "log posterior");
    for p in &pred.posteriors {
        println!("{:<12} {:>10.4} {:>14.4} {:>14.4}", p.label, p.log_prior, p.log_likelihood, p.log_posterior);
    }
    println!("log P(e) = {:.4}\n", pred.log_marginal);
    for (label, p) in pred.normalized() {
        println!("P({label} | e) = {p:.6}");
    }
    println!("\ntrace:");
    for t in &pred.trace {
        let f = match &t.factor {
            Factor::Prior(l) => format!("prior[{l}]"),
            Factor::Likelihood(l) => format!("lik[{l}]"),
            Factor::Marginal => "marginal".to_string(),
        };
        println!("  {f:<18} <{}, {}, {}>  score {:.3}  p {:.4}", t.triple.head, t.triple.relation, t.triple.tail, t.score, t.probability);
    }
    Ok(())
}
