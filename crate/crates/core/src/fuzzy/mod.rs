//! Fuzzy rule bases and their reification into the graph.
//!
//! Rule file grammar, one rule per line:
//!
//! ```text
//! R7: IF ATTENTION=Looking AND LOCATION=NearFromCurb THEN ACTION=crossRoad WITH 0.9
//! ```
//!
//! Keys are relation names, or class names that contain no whitespace. Blank
//! lines and `#` comments are ignored. Matching against frames is crisp
//! category equality.

pub mod names;

use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{check_symbol, instance_id, LinguisticFrame, Ontology, Triple, TripleStore};

pub const JAAD_RULES: &str = include_str!("../../data/jaad_rules.txt");

/// Rule weight in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RuleWeight(f64);

impl RuleWeight {
    pub fn new(w: f64) -> Result<Self> {
        if w > 0.0 && w <= 1.0 {
            Ok(Self(w))
        } else {
            Err(Error::InvalidInput(format!("weight must be in (0,1], got {w}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn band(self) -> &'static str {
        names::weight_band(self.0)
    }
}

impl TryFrom<f64> for RuleWeight {
    type Error = Error;
    fn try_from(w: f64) -> Result<Self> {
        Self::new(w)
    }
}

impl From<RuleWeight> for f64 {
    fn from(w: RuleWeight) -> f64 {
        w.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyRule {
    pub id: String,
    /// `(feature relation, instance)` in file order.
    pub antecedents: Vec<(String, String)>,
    pub target_relation: String,
    pub consequent: String,
    pub weight: RuleWeight,
}

impl FuzzyRule {
    pub fn matches(&self, frame: &LinguisticFrame) -> bool {
        self.antecedents
            .iter()
            .all(|(rel, inst)| frame.get(rel) == Some(inst.as_str()))
    }

    pub fn antecedent_entity(&self) -> String {
        names::antecedent_entity(&self.id)
    }

    pub fn consequent_entity(&self) -> String {
        names::consequent_entity(&self.id)
    }
}

impl std::fmt::Display for FuzzyRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: IF ", self.id)?;
        for (i, (rel, inst)) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{rel}={inst}")?;
        }
        write!(
            f,
            " THEN {}={} WITH {}",
            self.target_relation,
            self.consequent,
            self.weight.get()
        )
    }
}

/// The two entities a rule becomes plus the triples connecting them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTripleBundle {
    pub antecedent_entity: String,
    pub consequent_entity: String,
    pub triples: Vec<Triple>,
}

fn resolve_key<'a>(ontology: &'a Ontology, key: &'a str) -> Option<&'a str> {
    if ontology.relation(key).is_some() {
        return Some(key);
    }
    ontology
        .class(key)
        .and_then(|c| c.relations.first())
        .map(String::as_str)
}

fn parse_line(line: &str, ontology: &Ontology) -> std::result::Result<FuzzyRule, String> {
    let (id, body) = line.split_once(':').ok_or("expected `<id>: IF ...`")?;
    let id = id.trim();
    check_symbol(id).map_err(|e| e.to_string())?;
    let body = body.trim();
    let body = body.strip_prefix("IF ").ok_or("expected `IF` after the rule id")?;
    let (ante, rest) = body.split_once(" THEN ").ok_or("missing `THEN`")?;
    let (cons, weight) = rest.split_once(" WITH ").ok_or("missing `WITH`")?;

    let feature_relations = ontology.feature_relations();
    let mut antecedents: Vec<(String, String)> = Vec::new();
    for clause in ante.split(" AND ") {
        let clause = clause.trim();
        if clause.is_empty() {
            continue;
        }
        let (key, value) = clause
            .split_once('=')
            .ok_or_else(|| format!("expected `feature=value`, got `{clause}`"))?;
        let (key, value) = (key.trim(), value.trim());
        let rel = resolve_key(ontology, key)
            .filter(|r| feature_relations.contains(r))
            .ok_or_else(|| format!("unknown feature `{key}`"))?;
        if !ontology.range_instances(rel).contains(&value) {
            return Err(format!("unknown instance name `{value}` for `{rel}`"));
        }
        if antecedents.iter().any(|(r, _)| r == rel) {
            return Err(format!("feature `{rel}` appears twice"));
        }
        antecedents.push((rel.to_string(), value.to_string()));
    }
    if antecedents.is_empty() {
        return Err("rule has no antecedents".into());
    }

    let (key, label) = cons
        .split_once('=')
        .ok_or_else(|| format!("expected `class=value` consequent, got `{cons}`"))?;
    let (key, label) = (key.trim(), label.trim());
    let target_relation = ontology.target_relation();
    if resolve_key(ontology, key) != Some(target_relation) {
        return Err(format!("consequent `{key}` is not the prediction target"));
    }
    if ontology.label_rank(label).is_none() {
        return Err(format!("unknown instance name `{label}` for `{target_relation}`"));
    }
    let weight: f64 = weight
        .trim()
        .parse()
        .map_err(|_| format!("weight `{}` is not a number", weight.trim()))?;
    let weight = RuleWeight::new(weight).map_err(|_| "weight must be in (0,1]".to_string())?;
    Ok(FuzzyRule {
        id: id.to_string(),
        antecedents,
        target_relation: target_relation.to_string(),
        consequent: label.to_string(),
        weight,
    })
}

pub fn parse_rules_str(text: &str, ontology: &Ontology) -> Result<Vec<FuzzyRule>> {
    let mut rules = Vec::new();
    let mut ids = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = parse_line(line, ontology).map_err(|message| Error::Rule {
            line: i + 1,
            message,
        })?;
        if !ids.insert(rule.id.clone()) {
            return Err(Error::Rule {
                line: i + 1,
                message: format!("duplicate rule id `{}`", rule.id),
            });
        }
        rules.push(rule);
    }
    Ok(rules)
}

pub fn parse_rules(path: impl AsRef<Path>, ontology: &Ontology) -> Result<Vec<FuzzyRule>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rules_str(&text, ontology)
}

/// Antecedent instances point at `{id}-ante`, which implies `{id}-cons`,
/// which carries the consequent label and the weight band.
pub fn rule_to_triples(rule: &FuzzyRule) -> RuleTripleBundle {
    let ante = rule.antecedent_entity();
    let cons = rule.consequent_entity();
    let mut triples: Vec<Triple> = rule
        .antecedents
        .iter()
        .map(|(_, inst)| Triple::new(inst, names::ANTECEDENT_OF, &ante))
        .collect();
    triples.push(Triple::new(&ante, names::IMPLIES, &cons));
    triples.push(Triple::new(&cons, names::CONSEQUENT_LABEL, &rule.consequent));
    triples.push(Triple::new(&cons, names::RULE_WEIGHT, rule.weight.band()));
    RuleTripleBundle {
        antecedent_entity: ante,
        consequent_entity: cons,
        triples,
    }
}

/// Rules whose antecedents all hold in `frame`, in rule order.
pub fn matching_rules<'a>(rules: &'a [FuzzyRule], frame: &LinguisticFrame) -> Vec<&'a FuzzyRule> {
    rules.iter().filter(|r| r.matches(frame)).collect()
}

/// Links each frame's instance id to the antecedent entity of every rule it
/// satisfies, and adds the bundle of every rule that matched at least once.
/// Triples are validated against the rule-extended ontology.
pub fn attach_rules(
    mut store: TripleStore,
    rules: &[FuzzyRule],
    frames: &[LinguisticFrame],
    ontology: &Ontology,
) -> Result<TripleStore> {
    let extended = ontology.with_rule_extension()?;
    let matched: Vec<Vec<usize>> = frames
        .par_iter()
        .map(|f| {
            rules
                .iter()
                .enumerate()
                .filter(|(_, r)| r.matches(f))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut used = vec![false; rules.len()];
    let mut links = Vec::new();
    for (frame, hits) in frames.iter().zip(&matched) {
        let id = instance_id(frame, ontology.kind());
        for &i in hits {
            used[i] = true;
            links.push(Triple::new(
                &id,
                names::ACTIVATES_RULE,
                rules[i].antecedent_entity(),
            ));
        }
    }
    let mut added: Vec<Triple> = Vec::new();
    for (rule, _) in rules.iter().zip(&used).filter(|(_, u)| **u) {
        added.extend(rule_to_triples(rule).triples);
    }
    added.extend(links);
    for t in &added {
        extended.validate_triple(t)?;
    }
    store.extend(&added)?;
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{build_graph, GraphMode};

    fn onto() -> Ontology {
        Ontology::pedestrian()
    }

    fn video_044() -> LinguisticFrame {
        LinguisticFrame::new("video_0044_ped1", 120)
            .with("MOTION", "Run")
            .with("LOCATION", "NearFromCurb")
            .with("EGO_DISTANCE", "NearToEgoVeh")
            .with("ORIENTATION", "LeftDirection")
            .with("ATTENTION", "Looking")
            .with_label("crossRoad")
    }

    fn video_262() -> LinguisticFrame {
        LinguisticFrame::new("video_0262_ped1", 60)
            .with("MOTION", "Stand")
            .with("LOCATION", "FarFromCurb")
            .with("EGO_DISTANCE", "FarToEgoVeh")
            .with("ORIENTATION", "VehDirection")
            .with("ATTENTION", "NotLooking")
            .with_label("noCrossRoad")
    }

    fn r7() -> FuzzyRule {
        parse_rules_str(
            "R7: IF ATTENTION=Looking AND LOCATION=NearFromCurb THEN ACTION=crossRoad WITH 0.9",
            &onto(),
        )
        .unwrap()
        .remove(0)
    }

    #[test]
    fn fixture_has_51_rules() {
        let rules = parse_rules_str(JAAD_RULES, &onto()).unwrap();
        assert_eq!(rules.len(), 51);
    }

    #[test]
    fn fixture_frames_activate_expected_rules() {
        let rules = parse_rules_str(JAAD_RULES, &onto()).unwrap();
        let hit: Vec<&str> = matching_rules(&rules, &video_044())
            .iter()
            .map(|r| r.id.as_str())
            .collect();
        assert_eq!(hit, ["R1", "R2"]);
        let hit: Vec<&str> = matching_rules(&rules, &video_262())
            .iter()
            .map(|r| r.id.as_str())
            .collect();
        assert_eq!(hit, ["R3"]);
    }

    #[test]
    fn display_round_trips() {
        let r = r7();
        let again = parse_rules_str(&r.to_string(), &onto()).unwrap();
        assert_eq!(again, [r]);
    }

    #[test]
    fn class_names_are_accepted_as_keys() {
        let r = parse_rules_str("Q: IF Gaze=Looking THEN ACTION=crossRoad WITH 1", &onto()).unwrap();
        assert_eq!(r[0].antecedents, [("ATTENTION".to_string(), "Looking".to_string())]);
    }

    #[test]
    fn parse_errors() {
        let o = onto();
        let err = |text: &str| parse_rules_str(text, &o).unwrap_err().to_string();
        assert!(err("R1: IF ATTENTION=Looking THEN ACTION=crossRoad WITH 0").contains("weight must be in (0,1]"));
        assert!(err("R1: IF ATTENTION=Looking THEN ACTION=crossRoad WITH 1.5").contains("(0,1]"));
        assert!(err("R1: IF  THEN ACTION=crossRoad WITH 0.5").contains("no antecedents"));
        assert!(err("R1: IF ATTENTION=Staring THEN ACTION=crossRoad WITH 0.5").contains("unknown instance name"));
        assert!(err("R1: IF ATTENTION=Looking THEN ACTION=jump WITH 0.5").contains("unknown instance name"));
        assert!(err("R1: IF ATTENTION=Looking THEN LOCATION=NearFromCurb WITH 0.5").contains("target"));
        let dup = "R1: IF ATTENTION=Looking THEN ACTION=crossRoad WITH 0.5\n\
                   # comment\n\
                   R1: IF ATTENTION=NotLooking THEN ACTION=noCrossRoad WITH 0.5\n";
        let e = err(dup);
        assert!(e.contains("duplicate rule id") && e.contains("line 3"), "{e}");
    }

    #[test]
    fn bundle_structure() {
        let b = rule_to_triples(&r7());
        assert_eq!(b.antecedent_entity, "R7-ante");
        assert_eq!(b.consequent_entity, "R7-cons");
        let expected = vec![
            Triple::new("Looking", "ANTECEDENT_OF", "R7-ante"),
            Triple::new("NearFromCurb", "ANTECEDENT_OF", "R7-ante"),
            Triple::new("R7-ante", "IMPLIES", "R7-cons"),
            Triple::new("R7-cons", "CONSEQUENT_LABEL", "crossRoad"),
            Triple::new("R7-cons", "RULE_WEIGHT", "highRW"),
        ];
        assert_eq!(b.triples, expected);
        // New entities are exactly the two rule classes.
        let o = onto();
        let mut fresh: HashSet<&str> = HashSet::new();
        for t in &b.triples {
            for e in [&t.head, &t.tail] {
                if o.class_of_instance(e).is_none() && !names::WEIGHT_BANDS.contains(&e.as_str()) {
                    fresh.insert(e);
                }
            }
        }
        assert_eq!(fresh, HashSet::from(["R7-ante", "R7-cons"]));
        assert_eq!(rule_to_triples(&r7()), b);
    }

    #[test]
    fn distinct_rules_have_disjoint_entities() {
        let rules = parse_rules_str(JAAD_RULES, &onto()).unwrap();
        let mut seen = HashSet::new();
        for r in &rules {
            let b = rule_to_triples(r);
            assert!(seen.insert(b.antecedent_entity));
            assert!(seen.insert(b.consequent_entity));
        }
    }

    #[test]
    fn weight_bands() {
        assert_eq!(names::weight_band(0.1), "lowRW");
        assert_eq!(names::weight_band(0.33), "midRW");
        assert_eq!(names::weight_band(0.66), "highRW");
        assert_eq!(names::weight_band(1.0), "highRW");
    }

    #[test]
    fn no_match_leaves_store_unchanged() {
        let o = onto();
        let frames = [video_262()];
        let store = build_graph(&frames, &o, GraphMode::PedFeat).unwrap();
        let before = store.triple_set();
        let rules = parse_rules_str(
            "R1: IF ATTENTION=Looking THEN ACTION=crossRoad WITH 0.5",
            &o,
        )
        .unwrap();
        let after = attach_rules(store, &rules, &frames, &o).unwrap();
        assert_eq!(after.triple_set(), before);
    }

    #[test]
    fn link_count_matches_brute_force() {
        let o = onto();
        let rules = parse_rules_str(JAAD_RULES, &o).unwrap();
        let frames = [video_044(), video_262()];
        let store = build_graph(&frames, &o, GraphMode::PedFeat).unwrap();
        let before = store.len();
        let after = attach_rules(store, &rules, &frames, &o).unwrap();
        let links = after.with_relation(names::ACTIVATES_RULE);
        let mut oracle = 0;
        for f in &frames {
            for r in &rules {
                if r.antecedents.iter().all(|(k, v)| f.assignments.get(k) == Some(v)) {
                    oracle += 1;
                }
            }
        }
        assert_eq!(links.len(), oracle);
        assert_eq!(oracle, 3);
        assert!(after.len() > before);
        assert!(links.contains(&Triple::new(
            "video_0044_ped1-120",
            "ACTIVATES_RULE",
            "R2-ante"
        )));
    }

    proptest::proptest! {
        #[test]
        fn attaching_a_rule_never_removes_triples(k in 0usize..51) {
            let o = onto();
            let rules = parse_rules_str(JAAD_RULES, &o).unwrap();
            let frames = [video_044(), video_262()];
            let base = build_graph(&frames, &o, GraphMode::PedFeat).unwrap();
            let fewer = attach_rules(base.clone(), &rules[..k], &frames, &o).unwrap();
            let more = attach_rules(base, &rules[..k + 1], &frames, &o).unwrap();
            proptest::prop_assert!(fewer.triple_set().is_subset(&more.triple_set()));
        }
    }
}
