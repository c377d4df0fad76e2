//! Parse the bundled crossing rules and attach them to a pedestrian graph.
//!
//! `cargo run --example fuzzy_enrichment`

use roadkg::discretize::ThresholdConfig;
use roadkg::eval::discretize_pedestrians;
use roadkg::fuzzy::{attach_rules, matching_rules, parse_rules_str, rule_to_triples, JAAD_RULES};
use roadkg::ingest::{generate_synthetic, ScenarioCounts, ScenarioSpec, SyntheticData};
use roadkg::kg::{build_graph, GraphMode, Ontology};

fn main() -> roadkg::Result<()> {
    let ontology = Ontology::pedestrian();
    let rules = parse_rules_str(JAAD_RULES, &ontology)?;
    println!("{} rules parsed", rules.len());
    let first = &rules[0];
    println!("\n{} expands to:", first.id);
    for t in rule_to_triples(first).triples {
        println!("  {} {} {}", t.head, t.relation, t.tail);
    }

    let spec = ScenarioSpec {
        seed: 11,
        counts: ScenarioCounts::Pedestrian { cross: 100, no_cross: 100 },
        noise: 0.1,
    };
    let SyntheticData::Pedestrian(records) = generate_synthetic(&spec)? else {
        unreachable!()
    };
    let frames = discretize_pedestrians(&records, &ThresholdConfig::pedestrian_default())?;
    let plain = build_graph(&frames, &ontology, GraphMode::PedFeat)?;
    let before = plain.len();
    let enriched = attach_rules(plain, &rules, &frames, &ontology)?;
    println!("\nPedFeatKG {} triples, with rules {} triples", before, enriched.len());

    let active = frames.iter().filter(|f| !matching_rules(&rules, f).is_empty()).count();
    println!("{active} of {} frames activate at least one rule", frames.len());
    if let Some(f) = frames.iter().find(|f| !matching_rules(&rules, f).is_empty()) {
        let ids: Vec<&str> = matching_rules(&rules, f).iter().map(|r| r.id.as_str()).collect();
        println!("{}@{} activates {}", f.user_id, f.frame, ids.join(", "));
    }
    Ok(())
}
