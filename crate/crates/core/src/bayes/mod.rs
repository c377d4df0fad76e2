//! Bayesian prediction over reified triples.
//!
//! For hypothesis `h = <generic, target, label>` and evidence items `eᵢ`
//! (feature relation, instance):
//!
//! ```text
//! P(h)     = P(<generic, target, label>)
//! P(e|h)   = Πᵢ P(<instanceᵢ, target, label>)
//! P(e)     = Πᵢ P(<generic, relationᵢ, instanceᵢ>)
//! P(h|e)   = P(h) · P(e|h) / P(e)
//! ```
//!
//! Every probability is a calibrated sigmoid of an embedding score, and all
//! products are accumulated as sums of logs. Posteriors are not normalized
//! across labels; [`Prediction::normalized`] gives the normalized view.

mod calibration;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

pub use calibration::Calibration;

use crate::error::{Error, Result};
use crate::fuzzy::{matching_rules, names, FuzzyRule};
use crate::kg::{LinguisticFrame, Ontology, Triple, TripleStore};
use crate::kge::EmbeddingTable;

pub fn triple_probability(table: &EmbeddingTable, t: &Triple, cal: &Calibration) -> Result<f64> {
    Ok(cal.probability(table.score(t)?))
}

fn scored(table: &EmbeddingTable, t: Triple, cal: &Calibration, factor: Factor) -> Result<TraceEntry> {
    let score = table.score(&t)?;
    Ok(TraceEntry {
        triple: t,
        score,
        probability: cal.probability(score),
        log_probability: cal.log_probability(score),
        factor,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub subject: String,
    pub relation: String,
    pub label: String,
}

impl Hypothesis {
    /// Hypothesis over the ontology's generic entity and target relation.
    pub fn new(ontology: &Ontology, label: &str) -> Result<Self> {
        if ontology.label_rank(label).is_none() {
            return Err(Error::InvalidInput(format!(
                "`{label}` is not a `{}` instance",
                ontology.target_class().name
            )));
        }
        Ok(Self {
            subject: ontology.generic_entity().to_string(),
            relation: ontology.target_relation().to_string(),
            label: label.to_string(),
        })
    }

    pub fn triple(&self) -> Triple {
        Triple::new(&self.subject, &self.relation, &self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EvidenceItem {
    pub instance: String,
    pub relation: String,
    pub frame: u64,
}

impl EvidenceItem {
    pub fn new(instance: impl Into<String>, relation: impl Into<String>, frame: u64) -> Self {
        Self {
            instance: instance.into(),
            relation: relation.into(),
            frame,
        }
    }
}

/// Feature evidence in ontology order, then one item per activated rule.
pub fn frame_evidence(frame: &LinguisticFrame, ontology: &Ontology, rules: &[FuzzyRule]) -> Result<Vec<EvidenceItem>> {
    let mut out = Vec::new();
    for (rel, inst) in frame.ordered_assignments(ontology) {
        if ontology.class_of_instance(inst).is_none() {
            return Err(Error::InvalidInput(format!("evidence `{inst}` is not an ontology instance")));
        }
        out.push(EvidenceItem::new(inst, rel, frame.frame));
    }
    for rule in matching_rules(rules, frame) {
        out.push(EvidenceItem::new(rule.antecedent_entity(), names::ACTIVATES_RULE, frame.frame));
    }
    Ok(out)
}

pub fn prior(h: &Hypothesis, table: &EmbeddingTable, cal: &Calibration) -> Result<f64> {
    triple_probability(table, &h.triple(), cal)
}

fn require_evidence(e: &[EvidenceItem]) -> Result<()> {
    if e.is_empty() {
        return Err(Error::InvalidInput("at least one evidence item is required".into()));
    }
    Ok(())
}

pub fn log_evidence_marginal(e: &[EvidenceItem], subject: &str, table: &EmbeddingTable, cal: &Calibration) -> Result<f64> {
    require_evidence(e)?;
    e.iter()
        .map(|i| Ok(cal.log_probability(table.score(&Triple::new(subject, &i.relation, &i.instance))?)))
        .sum()
}

pub fn evidence_marginal(e: &[EvidenceItem], subject: &str, table: &EmbeddingTable, cal: &Calibration) -> Result<f64> {
    Ok(log_evidence_marginal(e, subject, table, cal)?.exp())
}

pub fn log_likelihood(e: &[EvidenceItem], h: &Hypothesis, table: &EmbeddingTable, cal: &Calibration) -> Result<f64> {
    require_evidence(e)?;
    e.iter()
        .map(|i| Ok(cal.log_probability(table.score(&Triple::new(&i.instance, &h.relation, &h.label))?)))
        .sum()
}

pub fn likelihood(e: &[EvidenceItem], h: &Hypothesis, table: &EmbeddingTable, cal: &Calibration) -> Result<f64> {
    Ok(log_likelihood(e, h, table, cal)?.exp())
}

/// Which term of the Bayes rule a scored triple fed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "factor", content = "label", rename_all = "lowercase")]
pub enum Factor {
    Prior(String),
    Likelihood(String),
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub triple: Triple,
    pub score: f64,
    pub probability: f64,
    pub log_probability: f64,
    #[serde(flatten)]
    pub factor: Factor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelPosterior {
    pub label: String,
    pub log_prior: f64,
    pub log_likelihood: f64,
    pub log_posterior: f64,
    pub posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub subject: String,
    pub frame: u64,
    pub label: String,
    pub log_marginal: f64,
    /// In ontology label order.
    pub posteriors: Vec<LabelPosterior>,
    pub evidence: Vec<EvidenceItem>,
    pub trace: Vec<TraceEntry>,
}

impl Prediction {
    pub fn posterior(&self, label: &str) -> Option<f64> {
        self.posteriors.iter().find(|p| p.label == label).map(|p| p.posterior)
    }

    /// Posteriors rescaled to sum to one.
    pub fn normalized(&self) -> Vec<(String, f64)> {
        let max = self
            .posteriors
            .iter()
            .map(|p| p.log_posterior)
            .fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = self.posteriors.iter().map(|p| (p.log_posterior - max).exp()).sum();
        self.posteriors
            .iter()
            .map(|p| (p.label.clone(), (p.log_posterior - max).exp() / z))
            .collect()
    }

    pub fn activated_rules(&self) -> Vec<&str> {
        self.evidence
            .iter()
            .filter(|e| e.relation == names::ACTIVATES_RULE)
            .filter_map(|e| e.instance.strip_suffix("-ante"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("prediction serializes")
    }
}

/// Bayes rule over the given evidence for every label of the ontology. Ties
/// go to the first label in ontology order.
pub fn predict_evidence(
    evidence: &[EvidenceItem],
    frame: u64,
    ontology: &Ontology,
    table: &EmbeddingTable,
    cal: &Calibration,
) -> Result<Prediction> {
    require_evidence(evidence)?;
    let subject = ontology.generic_entity();
    let target = ontology.target_relation();
    let mut trace = Vec::with_capacity(ontology.labels().len() * (1 + evidence.len()) + evidence.len());

    let mut log_marginal = 0.0;
    for e in evidence {
        let entry = scored(table, Triple::new(subject, &e.relation, &e.instance), cal, Factor::Marginal)?;
        log_marginal += entry.log_probability;
        trace.push(entry);
    }

    let mut posteriors = Vec::with_capacity(ontology.labels().len());
    let mut best: Option<(usize, f64)> = None;
    for (i, label) in ontology.labels().iter().enumerate() {
        let p = scored(table, Triple::new(subject, target, label), cal, Factor::Prior(label.clone()))?;
        let log_prior = p.log_probability;
        trace.push(p);
        let mut log_lik = 0.0;
        for e in evidence {
            let entry = scored(
                table,
                Triple::new(&e.instance, target, label),
                cal,
                Factor::Likelihood(label.clone()),
            )?;
            log_lik += entry.log_probability;
            trace.push(entry);
        }
        let log_posterior = log_prior + log_lik - log_marginal;
        if best.is_none_or(|(_, b)| log_posterior > b) {
            best = Some((i, log_posterior));
        }
        posteriors.push(LabelPosterior {
            label: label.clone(),
            log_prior,
            log_likelihood: log_lik,
            log_posterior,
            posterior: log_posterior.exp(),
        });
    }
    let (best, _) = best.ok_or_else(|| Error::InvalidInput("ontology has no labels".into()))?;
    Ok(Prediction {
        subject: subject.to_string(),
        frame,
        label: ontology.labels()[best].clone(),
        log_marginal,
        posteriors,
        evidence: evidence.to_vec(),
        trace,
    })
}

/// Predicts the frame's label from its features and, when `rules` is
/// non-empty, the rules it activates.
pub fn predict(
    frame: &LinguisticFrame,
    ontology: &Ontology,
    table: &EmbeddingTable,
    cal: &Calibration,
    rules: &[FuzzyRule],
) -> Result<Prediction> {
    let evidence = frame_evidence(frame, ontology, rules)?;
    predict_evidence(&evidence, frame.frame, ontology, table, cal)
}

/// Triples linking the generic entity, feature instances and labels of
/// labeled training frames, so the inference triples have trained
/// neighbourhoods:
/// `<generic, relᵢ, instᵢ>`, `<instᵢ, target, label>`, `<generic, target, label>`,
/// and for activated rules `<generic, ACTIVATES_RULE, R-ante>`, `<R-ante, target, label>`.
///
/// A triple set cannot carry frequencies, so `<instᵢ, target, label>` is only
/// emitted when `label` accounts for at least `min_share` of the labeled
/// frames showing that evidence. With `min_share = 0` every observed pair is
/// emitted.
pub fn generic_triples(
    frames: &[LinguisticFrame],
    ontology: &Ontology,
    rules: &[FuzzyRule],
    min_share: f64,
) -> Result<Vec<Triple>> {
    if !(0.0..=1.0).contains(&min_share) {
        return Err(Error::InvalidInput(format!("label share {min_share} outside [0, 1]")));
    }
    let generic = ontology.generic_entity();
    let target = ontology.target_relation();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |t: Triple, out: &mut Vec<Triple>| {
        if seen.insert(t.clone()) {
            out.push(t);
        }
    };
    // Evidence key -> per-label counts, both in first-seen order.
    let mut keys: Vec<EvidenceItem> = Vec::new();
    let mut counts: HashMap<(String, String), Vec<(String, usize)>> = HashMap::new();
    for f in frames {
        let Some(label) = &f.label else { continue };
        for e in frame_evidence(f, ontology, rules)? {
            push(Triple::new(generic, &e.relation, &e.instance), &mut out);
            let per = counts
                .entry((e.relation.clone(), e.instance.clone()))
                .or_insert_with(|| {
                    keys.push(e.clone());
                    Vec::new()
                });
            match per.iter_mut().find(|(l, _)| l == label) {
                Some((_, n)) => *n += 1,
                None => per.push((label.clone(), 1)),
            }
        }
        push(Triple::new(generic, target, label), &mut out);
    }
    for e in &keys {
        let per = &counts[&(e.relation.clone(), e.instance.clone())];
        let total: usize = per.iter().map(|(_, n)| n).sum();
        for (label, n) in per {
            if *n as f64 >= min_share * total as f64 {
                push(Triple::new(&e.instance, target, label), &mut out);
            }
        }
    }
    let check = if rules.is_empty() {
        ontology.clone()
    } else {
        ontology.with_rule_extension()?
    };
    for t in &out {
        check.validate_triple(t)?;
    }
    Ok(out)
}

/// Adds [`generic_triples`] to `store`; returns how many were new.
pub fn inject_generic_triples(
    store: &mut TripleStore,
    frames: &[LinguisticFrame],
    ontology: &Ontology,
    rules: &[FuzzyRule],
    min_share: f64,
) -> Result<usize> {
    store.extend(&generic_triples(frames, ontology, rules, min_share)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::TripleStore;
    use crate::kge::{sigmoid, Scorer};
    use approx::assert_relative_eq;

    /// Vehicle ontology entities with TransE vectors set by hand in 1-D.
    fn toy_table() -> EmbeddingTable {
        let o = Ontology::vehicle();
        let mut store = TripleStore::new();
        let ents = [
            ("vehicle", 0.0),
            ("mediumRiskPreceding", 0.4),
            ("highRiskLeftFollowing", -0.7),
            ("LK", 1.0),
            ("LLC", -0.5),
            ("RLC", 2.5),
        ];
        for (e, _) in ents {
            store.intern_entity(e).unwrap();
        }
        let rels = [
            (o.target_relation(), 0.2),
            ("TTC_WITH_PRECEDING_VEHICLE_IS", 0.1),
            ("TTC_WITH_LEFT_FOLLOWING_VEHICLE_IS", -0.3),
        ];
        for (r, _) in rels {
            store.intern_relation(r).unwrap();
        }
        let mut table = EmbeddingTable::random(&store, Scorer::TransE, 1, 0);
        for (e, v) in ents {
            table.entity_vec_mut(store.entity_id(e).unwrap())[0] = v;
        }
        for (r, v) in rels {
            table.relation_vec_mut(store.relation_id(r).unwrap())[0] = v;
        }
        table
    }

    fn evidence() -> Vec<EvidenceItem> {
        vec![
            EvidenceItem::new("mediumRiskPreceding", "TTC_WITH_PRECEDING_VEHICLE_IS", 741),
            EvidenceItem::new("highRiskLeftFollowing", "TTC_WITH_LEFT_FOLLOWING_VEHICLE_IS", 741),
        ]
    }

    /// Hand-evaluated TransE score in 1-D.
    fn s(h: f64, r: f64, t: f64) -> f64 {
        -(h + r - t).abs()
    }

    #[test]
    fn prior_is_hypothesis_triple_probability() {
        let t = toy_table();
        let h = Hypothesis::new(&Ontology::vehicle(), "LK").unwrap();
        assert_eq!(h.triple(), Triple::new("vehicle", "INTENTION_IS", "LK"));
        let p = prior(&h, &t, &Calibration::default()).unwrap();
        assert_relative_eq!(p, sigmoid(s(0.0, 0.2, 1.0)), epsilon = 1e-15);
        assert_eq!(p, prior(&h, &t, &Calibration::default()).unwrap());
        assert!(Hypothesis::new(&Ontology::vehicle(), "movingLeft").is_err());
    }

    #[test]
    fn likelihood_is_product_of_instance_triples() {
        let t = toy_table();
        let h = Hypothesis::new(&Ontology::vehicle(), "LK").unwrap();
        let cal = Calibration::default();
        let l = likelihood(&evidence(), &h, &t, &cal).unwrap();
        let p1 = triple_probability(&t, &Triple::new("mediumRiskPreceding", "INTENTION_IS", "LK"), &cal).unwrap();
        let p2 = triple_probability(&t, &Triple::new("highRiskLeftFollowing", "INTENTION_IS", "LK"), &cal).unwrap();
        assert_relative_eq!(l, p1 * p2, epsilon = 1e-15);
        let mut rev = evidence();
        rev.reverse();
        assert_relative_eq!(likelihood(&rev, &h, &t, &cal).unwrap(), l, epsilon = 1e-15);
        assert!(likelihood(&[], &h, &t, &cal).is_err());
    }

    #[test]
    fn marginal_is_product_and_bounded() {
        let t = toy_table();
        let cal = Calibration::default();
        let e = evidence();
        let m = evidence_marginal(&e, "vehicle", &t, &cal).unwrap();
        let factors: Vec<f64> = e
            .iter()
            .map(|i| triple_probability(&t, &Triple::new("vehicle", &i.relation, &i.instance), &cal).unwrap())
            .collect();
        assert_relative_eq!(m, factors.iter().product::<f64>(), epsilon = 1e-15);
        assert!(factors.iter().all(|f| m <= *f));
        let one = evidence_marginal(&e[..1], "vehicle", &t, &cal).unwrap();
        assert_relative_eq!(one, factors[0], epsilon = 1e-15);
    }

    #[test]
    fn posterior_matches_hand_computation() {
        let t = toy_table();
        let o = Ontology::vehicle();
        let p = predict_evidence(&evidence(), 741, &o, &t, &Calibration::default()).unwrap();
        let (veh, int, ttc_p, ttc_lf) = (0.0, 0.2, 0.1, -0.3);
        let (mrp, hrlf) = (0.4, -0.7);
        let marginal = sigmoid(s(veh, ttc_p, mrp)) * sigmoid(s(veh, ttc_lf, hrlf));
        for (label, v) in [("LLC", -0.5), ("LK", 1.0), ("RLC", 2.5)] {
            let expected = sigmoid(s(veh, int, v)) * sigmoid(s(mrp, int, v)) * sigmoid(s(hrlf, int, v)) / marginal;
            assert_relative_eq!(p.posterior(label).unwrap(), expected, max_relative = 1e-12);
        }
        // Argmax of posterior equals argmax of prior times likelihood.
        let best = p
            .posteriors
            .iter()
            .max_by(|a, b| (a.log_prior + a.log_likelihood).total_cmp(&(b.log_prior + b.log_likelihood)))
            .unwrap();
        assert_eq!(p.label, best.label);
        assert_eq!(p.trace.len(), 3 * (1 + 2) + 2);
        let norm: f64 = p.normalized().iter().map(|x| x.1).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ties_go_to_first_label() {
        let mut t = toy_table();
        // Collapse every label onto the same point.
        for l in ["LLC", "LK", "RLC"] {
            let id = t.entity_id(l).unwrap();
            t.entity_vec_mut(id)[0] = 0.3;
        }
        let p = predict_evidence(&evidence(), 0, &Ontology::vehicle(), &t, &Calibration::default()).unwrap();
        assert_eq!(p.label, "LLC");
    }

    #[test]
    fn literal_pedestrian_hypothesis_triple() {
        // The hypothesis triple is whatever subject/relation/label names are given.
        let store = TripleStore::from_triples(&[Triple::new("pedestrian", "INTENTION_IS", "crossRoad")]).unwrap();
        let table = EmbeddingTable::random(&store, Scorer::ComplEx, 4, 2);
        let h = Hypothesis {
            subject: "pedestrian".into(),
            relation: "INTENTION_IS".into(),
            label: "crossRoad".into(),
        };
        let cal = Calibration::default();
        assert_eq!(
            prior(&h, &table, &cal).unwrap(),
            triple_probability(&table, &Triple::new("pedestrian", "INTENTION_IS", "crossRoad"), &cal).unwrap()
        );
        let pedestrian = Hypothesis::new(&Ontology::pedestrian(), "crossRoad").unwrap();
        assert_eq!(pedestrian.triple(), Triple::new("Pedestrian", "ACTION", "crossRoad"));
    }

    #[test]
    fn unknown_entity_is_an_error() {
        let t = toy_table();
        let e = [EvidenceItem::new("lowRiskPreceding", "TTC_WITH_PRECEDING_VEHICLE_IS", 0)];
        assert!(matches!(
            predict_evidence(&e, 0, &Ontology::vehicle(), &t, &Calibration::default()),
            Err(Error::UnknownEntity(_))
        ));
    }

    #[test]
    fn many_items_do_not_underflow() {
        let t = toy_table();
        let cal = Calibration { a: 50.0, b: -20.0 };
        let e: Vec<EvidenceItem> = (0..400).flat_map(|_| evidence()).collect();
        let h = Hypothesis::new(&Ontology::vehicle(), "RLC").unwrap();
        let ll = log_likelihood(&e, &h, &t, &cal).unwrap();
        assert!(ll.is_finite() && ll < -700.0);
        // Direct product underflows to zero here, log space does not.
        assert_eq!(likelihood(&e, &h, &t, &cal).unwrap(), 0.0);
    }

    #[test]
    fn injection_triples_are_valid() {
        let o = Ontology::vehicle();
        let frames = [
            LinguisticFrame::new("1-10", 10)
                .with("LATERAL_VELOCITY_IS", "movingLeft")
                .with_label("LLC"),
            LinguisticFrame::new("1-11", 11)
                .with("LATERAL_VELOCITY_IS", "movingLeft")
                .with_label("LLC"),
            LinguisticFrame::new("2-10", 10).with("LATERAL_VELOCITY_IS", "movingLeft"),
        ];
        let t = generic_triples(&frames, &o, &[], 0.0).unwrap();
        assert_eq!(
            t,
            [
                Triple::new("vehicle", "LATERAL_VELOCITY_IS", "movingLeft"),
                Triple::new("vehicle", "INTENTION_IS", "LLC"),
                Triple::new("movingLeft", "INTENTION_IS", "LLC"),
            ]
        );
    }

    #[test]
    fn label_share_drops_rare_pairs() {
        let o = Ontology::vehicle();
        let frame = |i: u64, label: &str| {
            LinguisticFrame::new(format!("1-{i}"), i)
                .with("LATERAL_VELOCITY_IS", "movingLeft")
                .with_label(label)
        };
        let mut frames: Vec<LinguisticFrame> = (0..9).map(|i| frame(i, "LLC")).collect();
        frames.push(frame(9, "LK"));
        let rare = Triple::new("movingLeft", "INTENTION_IS", "LK");
        assert!(generic_triples(&frames, &o, &[], 0.0).unwrap().contains(&rare));
        assert!(generic_triples(&frames, &o, &[], 0.1).unwrap().contains(&rare));
        let kept = generic_triples(&frames, &o, &[], 0.2).unwrap();
        assert!(!kept.contains(&rare));
        assert!(kept.contains(&Triple::new("movingLeft", "INTENTION_IS", "LLC")));
        // The prior triple survives regardless of evidence shares.
        assert!(kept.contains(&Triple::new("vehicle", "INTENTION_IS", "LK")));
        assert!(generic_triples(&frames, &o, &[], 1.5).is_err());
    }

    #[test]
    fn rule_evidence_and_trace_json() {
        let o = Ontology::pedestrian();
        let rules = crate::fuzzy::parse_rules_str(crate::fuzzy::JAAD_RULES, &o).unwrap();
        let frame = LinguisticFrame::new("p", 3)
            .with("MOTION", "Run")
            .with("LOCATION", "NearFromCurb")
            .with("EGO_DISTANCE", "NearToEgoVeh")
            .with("ORIENTATION", "LeftDirection")
            .with("ATTENTION", "Looking")
            .with_label("crossRoad");
        let ev = frame_evidence(&frame, &o, &rules).unwrap();
        assert_eq!(ev.len(), 5 + 2);
        let injected = generic_triples(std::slice::from_ref(&frame), &o, &rules, 0.0).unwrap();
        assert!(injected.contains(&Triple::new("Pedestrian", "ACTIVATES_RULE", "R1-ante")));
        assert!(injected.contains(&Triple::new("R2-ante", "ACTION", "crossRoad")));
        let mut store = TripleStore::from_triples(&injected).unwrap();
        store.intern_entity("noCrossRoad").unwrap();
        let table = EmbeddingTable::random(&store, Scorer::ComplEx, 3, 1);
        let p = predict(&frame, &o, &table, &Calibration::default(), &rules).unwrap();
        assert_eq!(p.activated_rules(), ["R1", "R2"]);
        assert_eq!(p.trace.len(), 2 * (1 + 7) + 7);
        let json: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(json["trace"].as_array().unwrap().len(), 23);
        assert_eq!(json["trace"][0]["factor"], "marginal");
    }

    proptest::proptest! {
        #[test]
        fn evidence_order_and_log_space(seed in 0u64..1000, rot in 0usize..2) {
            let mut t = toy_table();
            let fresh = EmbeddingTable::random(&TripleStore::from_triples(&[Triple::new("x", "R", "y")]).unwrap(), Scorer::TransE, 1, seed);
            let shift = fresh.entity_vec(crate::kg::EntityId(0))[0];
            for name in ["LK", "LLC", "RLC", "mediumRiskPreceding"] {
                let id = t.entity_id(name).unwrap();
                t.entity_vec_mut(id)[0] += shift;
            }
            let o = Ontology::vehicle();
            let cal = Calibration::default();
            let mut e = evidence();
            let a = predict_evidence(&e, 0, &o, &t, &cal).unwrap();
            e.rotate_left(rot);
            let b = predict_evidence(&e, 0, &o, &t, &cal).unwrap();
            for (x, y) in a.posteriors.iter().zip(&b.posteriors) {
                proptest::prop_assert!((x.log_posterior - y.log_posterior).abs() < 1e-12);
            }
            proptest::prop_assert_eq!(&a.label, &b.label);
            for lp in &a.posteriors {
                let h = Hypothesis::new(&o, &lp.label).unwrap();
                let direct = prior(&h, &t, &cal).unwrap() * likelihood(&e, &h, &t, &cal).unwrap()
                    / evidence_marginal(&e, "vehicle", &t, &cal).unwrap();
                proptest::prop_assert!((lp.posterior - direct).abs() <= 1e-10 * direct.max(1.0));
            }
        }
    }
}
