use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{
    LinguisticFrame, Ontology, OntologyKind, Triple, TripleStore, HAS_CHILD, INSTANCE_OF, NEXT,
    PREVIOUS,
};

/// Ontology variant used when generating triples. PedFeatRules is PedFeat plus
/// the fuzzy-rule triples added by [`crate::fuzzy::attach_rules`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    Vehicle,
    PedFeat,
    PedFeatRules,
}

impl GraphMode {
    pub fn kind(self) -> OntologyKind {
        match self {
            GraphMode::Vehicle => OntologyKind::Vehicle,
            GraphMode::PedFeat | GraphMode::PedFeatRules => OntologyKind::Pedestrian,
        }
    }

    pub fn uses_rules(self) -> bool {
        self == GraphMode::PedFeatRules
    }
}

/// Entity carrying a frame's features: the per-frame child id for vehicles
/// (already `{trackId}-{frame}` when built by the discretizer), and
/// `{pedId}-{frame}` for pedestrians.
pub fn instance_id(frame: &LinguisticFrame, kind: OntologyKind) -> String {
    match kind {
        OntologyKind::Vehicle => frame.user_id.clone(),
        OntologyKind::Pedestrian => format!("{}-{}", frame.user_id, frame.frame),
    }
}

fn check_mode(ontology: &Ontology, mode: GraphMode) -> Result<()> {
    if ontology.kind() != mode.kind() {
        return Err(Error::Config(format!(
            "mode {mode:?} does not match {:?} ontology `{}`",
            ontology.kind(),
            ontology.name()
        )));
    }
    Ok(())
}

/// Per-frame triples. Pedestrian `PREVIOUS`/`NEXT` links need the whole
/// sequence and are added by [`build_graph`].
pub fn frame_to_triples(
    frame: &LinguisticFrame,
    ontology: &Ontology,
    mode: GraphMode,
) -> Result<Vec<Triple>> {
    check_mode(ontology, mode)?;
    frame.validate(ontology)?;
    let generic = ontology.generic_entity();
    let id = instance_id(frame, ontology.kind());
    let mut out = Vec::with_capacity(frame.assignments.len() + 3);
    match ontology.kind() {
        OntologyKind::Vehicle => {
            out.push(Triple::new(generic, HAS_CHILD, &id));
        }
        OntologyKind::Pedestrian => {
            out.push(Triple::new(generic, HAS_CHILD, &frame.user_id));
            out.push(Triple::new(&id, INSTANCE_OF, &frame.user_id));
        }
    }
    for (relation, instance) in frame.ordered_assignments(ontology) {
        out.push(Triple::new(&id, relation, instance));
    }
    if let Some(label) = &frame.label {
        out.push(Triple::new(&id, ontology.target_relation(), label));
    }
    for t in &out {
        ontology.validate_triple(t)?;
    }
    Ok(out)
}

/// Pedestrian temporal chain over each pedestrian's sorted, distinct frames.
fn temporal_links(frames: &[LinguisticFrame], kind: OntologyKind) -> Vec<Triple> {
    let mut by_user: BTreeMap<&str, BTreeSet<u64>> = BTreeMap::new();
    for f in frames {
        by_user.entry(&f.user_id).or_default().insert(f.frame);
    }
    let mut out = Vec::new();
    for (user, frame_numbers) in by_user {
        let ids: Vec<String> = frame_numbers
            .iter()
            .map(|&n| instance_id(&LinguisticFrame::new(user, n), kind))
            .collect();
        for pair in ids.windows(2) {
            out.push(Triple::new(&pair[0], NEXT, &pair[1]));
            out.push(Triple::new(&pair[1], PREVIOUS, &pair[0]));
        }
    }
    out
}

pub fn build_graph(
    frames: &[LinguisticFrame],
    ontology: &Ontology,
    mode: GraphMode,
) -> Result<TripleStore> {
    if frames.is_empty() {
        return Err(Error::InvalidInput("cannot build a graph from zero frames".into()));
    }
    let mut store = TripleStore::new();
    for f in frames {
        store.extend(&frame_to_triples(f, ontology, mode)?)?;
    }
    if ontology.kind() == OntologyKind::Pedestrian {
        store.extend(&temporal_links(frames, ontology.kind()))?;
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vehicle_741() -> LinguisticFrame {
        LinguisticFrame::new("741", 0)
            .with("LATERAL_ACCELERATION_IS", "zeroAcceleration")
            .with("TTC_WITH_PRECEDING_VEHICLE_IS", "mediumRiskPreceding")
            .with("TTC_WITH_LEFT_FOLLOWING_VEHICLE_IS", "highRiskLeftFollowing")
            .with_label("LK")
    }

    #[test]
    fn vehicle_frame_emits_reified_triples() {
        let o = Ontology::vehicle();
        let ts = frame_to_triples(&vehicle_741(), &o, GraphMode::Vehicle).unwrap();
        assert!(ts.contains(&Triple::new("vehicle", "HAS_CHILD", "741")));
        assert!(ts.contains(&Triple::new(
            "741",
            "TTC_WITH_LEFT_FOLLOWING_VEHICLE_IS",
            "highRiskLeftFollowing"
        )));
        assert!(ts.contains(&Triple::new("741", "INTENTION_IS", "LK")));
        assert_eq!(ts.len(), 5);
    }

    #[test]
    fn pedestrian_frame_links_instance() {
        let o = Ontology::pedestrian();
        let f = LinguisticFrame::new("0_12_57b", 40)
            .with("ATTENTION", "Looking")
            .with_label("crossRoad");
        let ts = frame_to_triples(&f, &o, GraphMode::PedFeat).unwrap();
        assert!(ts.contains(&Triple::new("0_12_57b-40", "INSTANCE_OF", "0_12_57b")));
        assert!(ts.contains(&Triple::new("Pedestrian", "HAS_CHILD", "0_12_57b")));
        assert!(ts.contains(&Triple::new("0_12_57b-40", "ACTION", "crossRoad")));
    }

    #[test]
    fn minimal_frame_is_only_has_child() {
        let o = Ontology::vehicle();
        let ts = frame_to_triples(&LinguisticFrame::new("9-1", 1), &o, GraphMode::Vehicle).unwrap();
        assert_eq!(ts, vec![Triple::new("vehicle", "HAS_CHILD", "9-1")]);
    }

    #[test]
    fn out_of_range_instance_fails() {
        let o = Ontology::vehicle();
        let f = LinguisticFrame::new("1", 0).with("LATERAL_VELOCITY_IS", "Looking");
        assert!(frame_to_triples(&f, &o, GraphMode::Vehicle).is_err());
    }

    #[test]
    fn missing_required_feature_fails() {
        let text = crate::kg::VEHICLE_ONTOLOGY.replacen(
            "role = \"feature\"\ninstances = [\"movingLeft\"",
            "role = \"feature\"\nrequired = true\ninstances = [\"movingLeft\"",
            1,
        );
        let o = Ontology::from_toml_str(&text).unwrap();
        let err = frame_to_triples(&vehicle_741(), &o, GraphMode::Vehicle).unwrap_err();
        assert!(err.to_string().contains("missing mandatory feature"), "{err}");
    }

    #[test]
    fn mode_must_match_ontology() {
        let o = Ontology::vehicle();
        assert!(frame_to_triples(&vehicle_741(), &o, GraphMode::PedFeat).is_err());
    }

    #[test]
    fn identical_frames_deduplicate() {
        let o = Ontology::vehicle();
        let one = build_graph(&[vehicle_741()], &o, GraphMode::Vehicle).unwrap();
        let two = build_graph(&[vehicle_741(), vehicle_741()], &o, GraphMode::Vehicle).unwrap();
        let oracle: BTreeSet<Triple> = frame_to_triples(&vehicle_741(), &o, GraphMode::Vehicle)
            .unwrap()
            .into_iter()
            .chain(frame_to_triples(&vehicle_741(), &o, GraphMode::Vehicle).unwrap())
            .collect();
        assert_eq!(one.triple_set(), two.triple_set());
        assert_eq!(two.len(), oracle.len());
    }

    #[test]
    fn temporal_chain_counts() {
        let o = Ontology::pedestrian();
        let frames: Vec<_> = [34u64, 30, 32, 36]
            .iter()
            .map(|&n| LinguisticFrame::new("ped1", n).with("ATTENTION", "Looking"))
            .collect();
        let s = build_graph(&frames, &o, GraphMode::PedFeat).unwrap();
        assert_eq!(s.with_relation(NEXT).len(), 3);
        assert_eq!(s.with_relation(PREVIOUS).len(), 3);
        assert!(s.contains(&Triple::new("ped1-30", NEXT, "ped1-32")));
        assert!(s.contains(&Triple::new("ped1-32", PREVIOUS, "ped1-30")));
    }

    #[test]
    fn empty_frames_rejected() {
        assert!(build_graph(&[], &Ontology::vehicle(), GraphMode::Vehicle).is_err());
    }
}
