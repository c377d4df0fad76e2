use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    corrupt_ids, evaluate_ranks_ids, score_grad, self_adversarial_loss, CorruptSide,
    EmbeddingTable, Scorer,
};
use crate::error::{Error, Result};
use crate::kg::{IdTriple, Triple, TripleStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub scorer: Scorer,
    pub k: usize,
    /// Corruptions per positive triple.
    pub negatives: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Consecutive non-improving validations before stopping.
    pub patience: usize,
    pub burn_in: usize,
    pub validation_frequency: usize,
    /// Triples per evaluation chunk.
    pub validation_chunk: usize,
    pub margin: f64,
    pub adversarial_temperature: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::vehicle_preset()
    }
}

impl TrainConfig {
    /// Lane-change setting: k = 100, five corruptions per positive.
    pub fn vehicle_preset() -> Self {
        Self {
            scorer: Scorer::TransE,
            k: 100,
            negatives: 5,
            learning_rate: 0.0005,
            batch_size: 10_000,
            max_epochs: 100,
            patience: 5,
            burn_in: 5,
            validation_frequency: 5,
            validation_chunk: 100,
            margin: 5.0,
            adversarial_temperature: 1.0,
            seed: 0,
        }
    }

    /// Pedestrian setting: ComplEx with k = 150.
    pub fn pedestrian_preset() -> Self {
        Self {
            scorer: Scorer::ComplEx,
            k: 150,
            ..Self::vehicle_preset()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k", self.k),
            ("negatives", self.negatives),
            ("batch_size", self.batch_size),
            ("max_epochs", self.max_epochs),
            ("patience", self.patience),
            ("validation_frequency", self.validation_frequency),
            ("validation_chunk", self.validation_chunk),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(self.margin.is_finite() && self.margin > 0.0) {
            return Err(Error::Config("margin must be positive".into()));
        }
        if !(self.adversarial_temperature.is_finite() && self.adversarial_temperature >= 0.0) {
            return Err(Error::Config("adversarial_temperature must be non-negative".into()));
        }
        Ok(())
    }

    fn validates_at(&self, epoch: usize) -> bool {
        epoch >= self.burn_in && (epoch - self.burn_in).is_multiple_of(self.validation_frequency)
    }
}

/// Dense Adam over both parameter buffers.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: [Vec<f64>; 2],
    v: [Vec<f64>; 2],
}

impl Adam {
    pub fn new(lr: f64, entity_params: usize, relation_params: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: [vec![0.0; entity_params], vec![0.0; relation_params]],
            v: [vec![0.0; entity_params], vec![0.0; relation_params]],
        }
    }

    pub fn step(&mut self, params: [&mut [f64]; 2], grads: [&[f64]; 2]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (b, (p, g)) in params.into_iter().zip(grads).enumerate() {
            let (m, v) = (&mut self.m[b], &mut self.v[b]);
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                p[i] -= self.lr * (m[i] / c1) / ((v[i] / c2).sqrt() + self.eps);
            }
        }
    }
}

/// Metric maximized by early stopping.
pub trait ValidationMetric {
    fn evaluate(&mut self, table: &EmbeddingTable) -> Result<f64>;
}

/// Filtered MRR over validation triples, corrupting both sides.
pub struct FilteredMrr {
    valid: Vec<IdTriple>,
    filter: HashSet<IdTriple>,
    chunk: usize,
}

impl FilteredMrr {
    pub fn new(valid: Vec<IdTriple>, filter: HashSet<IdTriple>, chunk: usize) -> Self {
        Self {
            valid,
            filter,
            chunk,
        }
    }
}

impl ValidationMetric for FilteredMrr {
    fn evaluate(&mut self, table: &EmbeddingTable) -> Result<f64> {
        Ok(evaluate_ranks_ids(table, &self.valid, &self.filter, CorruptSide::Both, self.chunk).mrr)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub epoch_losses: Vec<f64>,
    /// `(epoch, metric)` for every validation, the first being the baseline.
    pub validations: Vec<(usize, f64)>,
    pub best_epoch: Option<usize>,
    pub best_metric: Option<f64>,
    pub stopped_early: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    Entity(u32),
    Relation(u32),
}

/// Mean self-adversarial loss of a batch and its gradient contributions.
pub(crate) fn batch_loss_and_grads(
    table: &EmbeddingTable,
    batch: &[(IdTriple, Vec<IdTriple>)],
    margin: f64,
    temperature: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let w = table.width();
    let scorer = table.scorer();
    let scale = 1.0 / batch.len() as f64;
    let chunks: Vec<(f64, HashMap<Slot, Vec<f64>>)> = batch
        .par_chunks(64)
        .map(|chunk| {
            let mut acc: HashMap<Slot, Vec<f64>> = HashMap::new();
            let mut loss = 0.0;
            let mut buf = [vec![0.0; w], vec![0.0; w], vec![0.0; w]];
            let add = |acc: &mut HashMap<Slot, Vec<f64>>, t: &IdTriple, coeff: f64, buf: &mut [Vec<f64>; 3]| {
                buf.iter_mut().for_each(|b| b.iter_mut().for_each(|x| *x = 0.0));
                let [gh, gr, gt] = buf;
                score_grad(
                    scorer,
                    table.entity_vec(t.head),
                    table.relation_vec(t.relation),
                    table.entity_vec(t.tail),
                    coeff,
                    gh,
                    gr,
                    gt,
                );
                for (slot, g) in [
                    (Slot::Entity(t.head.0), &*gh),
                    (Slot::Relation(t.relation.0), &*gr),
                    (Slot::Entity(t.tail.0), &*gt),
                ] {
                    let e = acc.entry(slot).or_insert_with(|| vec![0.0; w]);
                    e.iter_mut().zip(g).for_each(|(a, b)| *a += b);
                }
            };
            for (pos, negs) in chunk {
                let sp = table.score_ids(pos);
                let sn: Vec<f64> = negs.iter().map(|n| table.score_ids(n)).collect();
                let out = self_adversarial_loss(sp, &sn, margin, temperature);
                loss += out.value;
                add(&mut acc, pos, out.d_pos * scale, &mut buf);
                for (n, d) in negs.iter().zip(&out.d_neg) {
                    add(&mut acc, n, d * scale, &mut buf);
                }
            }
            (loss, acc)
        })
        .collect();
    let mut ge = vec![0.0; table.entities.len()];
    let mut gr = vec![0.0; table.relations.len()];
    let mut loss = 0.0;
    for (l, acc) in chunks {
        loss += l;
        for (slot, g) in acc {
            let dst = match slot {
                Slot::Entity(i) => &mut ge[i as usize * w..(i as usize + 1) * w],
                Slot::Relation(i) => &mut gr[i as usize * w..(i as usize + 1) * w],
            };
            dst.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
    }
    (loss * scale, ge, gr)
}

/// Trains on every triple of `store`, early-stopping on filtered MRR over
/// `valid`. With no validation triples all `max_epochs` are run.
pub fn train(store: &TripleStore, valid: &[Triple], cfg: &TrainConfig) -> Result<(EmbeddingTable, TrainReport)> {
    if valid.is_empty() {
        return train_with_metric(store, cfg, None);
    }
    let mut ids = Vec::with_capacity(valid.len());
    for t in valid {
        let id = store.to_ids(t)?;
        if store.contains_ids(&id) {
            return Err(Error::InvalidInput(format!(
                "validation triple {t} is also a training triple"
            )));
        }
        ids.push(id);
    }
    let mut filter: HashSet<IdTriple> = store.id_triples().iter().copied().collect();
    filter.extend(ids.iter().copied());
    let mut metric = FilteredMrr::new(ids, filter, cfg.validation_chunk);
    train_with_metric(store, cfg, Some(&mut metric))
}

pub fn train_with_metric(
    store: &TripleStore,
    cfg: &TrainConfig,
    mut metric: Option<&mut dyn ValidationMetric>,
) -> Result<(EmbeddingTable, TrainReport)> {
    cfg.validate()?;
    if store.is_empty() {
        return Err(Error::Training("cannot train on an empty store".into()));
    }
    let mut table = EmbeddingTable::random(store, cfg.scorer, cfg.k, cfg.seed);
    let mut adam = Adam::new(cfg.learning_rate, table.entities.len(), table.relations.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let num_entities = store.entity_names().len();
    let mut order: Vec<IdTriple> = store.id_triples().to_vec();

    let mut report = TrainReport {
        epochs_run: 0,
        epoch_losses: Vec::new(),
        validations: Vec::new(),
        best_epoch: None,
        best_metric: None,
        stopped_early: false,
    };
    let mut best_table: Option<EmbeddingTable> = None;
    let mut bad = 0;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let batches = order.len().div_ceil(cfg.batch_size);
        for (b, positives) in order.chunks(cfg.batch_size).enumerate() {
            let mut batch = Vec::with_capacity(positives.len());
            for pos in positives {
                let negs = corrupt_ids(
                    pos,
                    cfg.negatives,
                    num_entities,
                    CorruptSide::Both,
                    |c| store.contains_ids(c),
                    &mut rng,
                )?;
                batch.push((*pos, negs));
            }
            let (loss, ge, gr) =
                batch_loss_and_grads(&table, &batch, cfg.margin, cfg.adversarial_temperature);
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite loss {loss} at epoch {epoch}, batch {}",
                    b + 1
                )));
            }
            adam.step([&mut table.entities, &mut table.relations], [&ge, &gr]);
            epoch_loss += loss / batches as f64;
        }
        if cfg.scorer == Scorer::TransE {
            table.project_entities_to_unit_ball();
        }
        if !table.is_finite() {
            return Err(Error::Training(format!("non-finite embedding after epoch {epoch}")));
        }
        report.epochs_run = epoch;
        report.epoch_losses.push(epoch_loss);
        log::debug!("epoch {epoch}: loss {epoch_loss:.6}");

        let Some(m) = metric.as_deref_mut() else { continue };
        if !cfg.validates_at(epoch) {
            continue;
        }
        let value = m.evaluate(&table)?;
        log::info!("epoch {epoch}: validation {value:.6}");
        report.validations.push((epoch, value));
        if report.best_metric.is_none_or(|best| value > best) {
            report.best_metric = Some(value);
            report.best_epoch = Some(epoch);
            best_table = Some(table.clone());
            bad = 0;
        } else {
            bad += 1;
            if bad >= cfg.patience {
                report.stopped_early = true;
                break;
            }
        }
    }
    if let Some(best) = best_table {
        table = best;
    }
    Ok((table, report))
}
