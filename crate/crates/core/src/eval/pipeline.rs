use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_no_unseen, SplitSpec};
use crate::bayes::{generic_triples, predict, Calibration, Prediction};
use crate::discretize::{discretize_pedestrian, discretize_vehicle, ThresholdConfig};
use crate::error::{Error, Result};
use crate::fuzzy::{attach_rules, FuzzyRule};
use crate::ingest::{PedestrianFrameRecord, VehicleFrameRecord};
use crate::kg::{build_graph, GraphMode, LinguisticFrame, Ontology, StoreStats, Triple, TripleStore};
use crate::kge::{corrupt, train, EmbeddingTable, TrainConfig, TrainReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub train: TrainConfig,
    /// Track share for training and the validation triple count.
    pub split: SplitSpec,
    /// Add the generic-entity triples used by inference to the training store.
    pub inject_generic: bool,
    /// See [`generic_triples`].
    pub min_label_share: f64,
    /// Fit a Platt calibration on validation triples and their corruptions.
    pub calibrate: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            split: SplitSpec::default(),
            inject_generic: true,
            min_label_share: 0.2,
            calibrate: false,
        }
    }
}

impl PipelineConfig {
    /// Small-graph setting used for the synthetic benchmark.
    pub fn desk() -> Self {
        Self {
            train: TrainConfig {
                k: 64,
                learning_rate: 0.01,
                batch_size: 256,
                max_epochs: 200,
                margin: 6.0,
                ..TrainConfig::vehicle_preset()
            },
            split: SplitSpec {
                n_valid: 200,
                ..SplitSpec::default()
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.split.validate()?;
        if !(0.0..=1.0).contains(&self.min_label_share) {
            return Err(Error::Config("min_label_share outside [0, 1]".into()));
        }
        Ok(())
    }
}

/// A trained model ready for inference.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub ontology: Ontology,
    pub rules: Vec<FuzzyRule>,
    pub table: EmbeddingTable,
    pub calibration: Calibration,
    pub report: TrainReport,
    /// Training store after injection.
    pub stats: StoreStats,
    pub valid: Vec<Triple>,
}

impl FittedModel {
    pub fn predict(&self, frame: &LinguisticFrame) -> Result<Prediction> {
        predict(frame, &self.ontology, &self.table, &self.calibration, &self.rules)
    }

    pub fn predict_all(&self, frames: &[LinguisticFrame]) -> Result<Vec<Prediction>> {
        frames.par_iter().map(|f| self.predict(f)).collect()
    }
}

/// Every closed-class instance and the generic entity, so any frame's
/// evidence has an embedding.
pub fn intern_ontology(store: &mut TripleStore, ontology: &Ontology) -> Result<()> {
    store.intern_entity(ontology.generic_entity())?;
    for instances in ontology.instance_table().values() {
        for i in instances.iter() {
            store.intern_entity(i)?;
        }
    }
    store.intern_relation(ontology.target_relation())?;
    Ok(())
}

/// Graph store, split, injection and training store, without training.
pub fn training_store(
    frames: &[LinguisticFrame],
    ontology: &Ontology,
    mode: GraphMode,
    rules: &[FuzzyRule],
    cfg: &PipelineConfig,
) -> Result<(TripleStore, Vec<Triple>)> {
    cfg.validate()?;
    let mut store = build_graph(frames, ontology, mode)?;
    let rules: &[FuzzyRule] = if mode.uses_rules() { rules } else { &[] };
    if !rules.is_empty() {
        store = attach_rules(store, rules, frames, ontology)?;
    }
    let (mut train_store, valid) = split_no_unseen(&store, cfg.split.n_valid, cfg.split.seed)?;
    intern_ontology(&mut train_store, ontology)?;
    if cfg.inject_generic {
        let held: HashSet<&Triple> = valid.iter().collect();
        let extra: Vec<Triple> = generic_triples(frames, ontology, rules, cfg.min_label_share)?
            .into_iter()
            .filter(|t| !held.contains(t))
            .collect();
        let added = train_store.extend(&extra)?;
        info!("injected {added} generic triples");
    }
    Ok((train_store, valid))
}

pub fn fit_frames(
    frames: &[LinguisticFrame],
    ontology: &Ontology,
    mode: GraphMode,
    rules: &[FuzzyRule],
    cfg: &PipelineConfig,
) -> Result<FittedModel> {
    let (store, valid) = training_store(frames, ontology, mode, rules, cfg)?;
    info!("training on {} triples, {} held out", store.len(), valid.len());
    let (table, report) = train(&store, &valid, &cfg.train)?;
    let calibration = if cfg.calibrate {
        fit_calibration(&table, &store, &valid, cfg.train.seed)?
    } else {
        Calibration::default()
    };
    Ok(FittedModel {
        ontology: ontology.clone(),
        rules: if mode.uses_rules() { embedded_rules(rules, &table) } else { Vec::new() },
        table,
        calibration,
        report,
        stats: store.stats(),
        valid,
    })
}

/// Rules whose antecedent entity has an embedding. A rule no training frame
/// activated has none and is dropped from inference.
pub fn embedded_rules(rules: &[FuzzyRule], table: &EmbeddingTable) -> Vec<FuzzyRule> {
    let (kept, dropped): (Vec<&FuzzyRule>, Vec<&FuzzyRule>) = rules
        .iter()
        .partition(|r| table.entity_id(&r.antecedent_entity()).is_some());
    if !dropped.is_empty() {
        let ids: Vec<&str> = dropped.iter().map(|r| r.id.as_str()).collect();
        warn!("rules never activated in training are ignored: {}", ids.join(", "));
    }
    kept.into_iter().cloned().collect()
}

/// Platt scaling with validation triples as positives and one filtered
/// corruption of each as negative.
fn fit_calibration(table: &EmbeddingTable, store: &TripleStore, valid: &[Triple], seed: u64) -> Result<Calibration> {
    let mut known = store.clone();
    known.extend(valid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xca1b);
    let mut scores = Vec::with_capacity(2 * valid.len());
    let mut labels = Vec::with_capacity(2 * valid.len());
    for t in valid {
        scores.push(table.score(t)?);
        labels.push(true);
        for c in corrupt(t, &known, 1, &mut rng)? {
            scores.push(table.score(&c)?);
            labels.push(false);
        }
    }
    Calibration::fit_platt(&scores, &labels)
}

pub fn discretize_vehicles(records: &[VehicleFrameRecord], thresholds: &ThresholdConfig) -> Result<Vec<LinguisticFrame>> {
    records.iter().map(|r| discretize_vehicle(r, thresholds)).collect()
}

pub fn discretize_pedestrians(
    records: &[PedestrianFrameRecord],
    thresholds: &ThresholdConfig,
) -> Result<Vec<LinguisticFrame>> {
    records.iter().map(|r| discretize_pedestrian(r, thresholds)).collect()
}

/// Splits items into groups by `key` and sends the first `train_fraction` of
/// groups, in order of first appearance, to training. Both sides keep at least
/// one group when there are two or more.
pub fn split_groups<T, K: Hash + Eq>(
    items: &[T],
    key: impl Fn(&T) -> K,
    train_fraction: f64,
) -> (Vec<&T>, Vec<&T>) {
    let mut rank: HashMap<K, usize> = HashMap::new();
    for it in items {
        let next = rank.len();
        rank.entry(key(it)).or_insert(next);
    }
    let n = rank.len();
    let n_train = if n < 2 {
        n
    } else {
        ((train_fraction * n as f64).round() as usize).clamp(1, n - 1)
    };
    items.iter().partition(|it| rank[&key(it)] < n_train)
}

/// True labels of labeled frames and the labels predicted for them.
pub fn labeled_predictions(model: &FittedModel, frames: &[LinguisticFrame]) -> Result<(Vec<String>, Vec<String>)> {
    let labeled: Vec<LinguisticFrame> = frames.iter().filter(|f| f.label.is_some()).cloned().collect();
    let preds = model.predict_all(&labeled)?;
    let y_true = labeled.into_iter().filter_map(|f| f.label).collect();
    let y_pred = preds.into_iter().map(|p| p.label).collect();
    Ok((y_true, y_pred))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_split_by_first_appearance() {
        let v: Vec<(u32, u32)> = (0..10).map(|i| (i % 5, i)).collect();
        let (a, b) = split_groups(&v, |x| x.0, 0.8);
        // Groups 0..4 appear in order; the first four go to training.
        assert_eq!(a.len(), 8);
        assert!(b.iter().all(|x| x.0 == 4));
        let one = [(1, 0)];
        let (a, b) = split_groups(&one, |x| x.0, 0.5);
        assert_eq!((a.len(), b.len()), (1, 0));
    }

    #[test]
    fn sixty_tracks_give_forty_eight() {
        let v: Vec<u32> = (0..60).collect();
        let (a, b) = split_groups(&v, |x| *x, 0.8);
        assert_eq!((a.len(), b.len()), (48, 12));
    }

    #[test]
    fn interned_ontology_covers_all_instances() {
        let o = Ontology::vehicle();
        let mut s = TripleStore::new();
        intern_ontology(&mut s, &o).unwrap();
        for instances in o.instance_table().values() {
            for i in instances.iter() {
                assert!(s.entity_id(i).is_some(), "{i}");
            }
        }
        assert!(s.is_empty());
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        assert!(PipelineConfig::desk().validate().is_ok());
        let mut bad = PipelineConfig::default();
        bad.split.train_fraction = 0.0;
        assert!(bad.validate().is_err());
    }
}
