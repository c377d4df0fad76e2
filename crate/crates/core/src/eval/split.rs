use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{IdTriple, Triple, TripleStore};

/// Track-level train fraction plus the size of the validation triple set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub n_valid: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            n_valid: 2000,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.n_valid == 0 {
            return Err(Error::Config("validation triple count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Stores up to this size fall back to exhaustive search when the greedy
/// pass comes up short.
const EXACT_LIMIT: usize = 24;

struct Counts {
    entity: Vec<usize>,
    relation: Vec<usize>,
}

impl Counts {
    fn of(store: &TripleStore) -> Self {
        let mut c = Counts {
            entity: vec![0; store.entity_names().len()],
            relation: vec![0; store.relation_names().len()],
        };
        for t in store.id_triples() {
            c.add(t, 1);
        }
        c
    }

    fn removable(&self, t: &IdTriple) -> bool {
        self.entity[t.head.0 as usize] > 1
            && self.entity[t.tail.0 as usize] > 1
            && self.relation[t.relation.0 as usize] > 1
    }

    fn add(&mut self, t: &IdTriple, delta: isize) {
        let bump = |x: &mut usize| *x = x.checked_add_signed(delta).expect("count underflow");
        bump(&mut self.entity[t.head.0 as usize]);
        if t.tail != t.head {
            bump(&mut self.entity[t.tail.0 as usize]);
        }
        bump(&mut self.relation[t.relation.0 as usize]);
    }
}

fn exact(
    order: &[usize],
    triples: &[IdTriple],
    counts: &mut Counts,
    need: usize,
    start: usize,
    picked: &mut Vec<usize>,
) -> bool {
    if picked.len() == need {
        return true;
    }
    for pos in start..order.len() {
        if order.len() - pos < need - picked.len() {
            break;
        }
        let i = order[pos];
        if !counts.removable(&triples[i]) {
            continue;
        }
        counts.add(&triples[i], -1);
        picked.push(i);
        if exact(order, triples, counts, need, pos + 1, picked) {
            return true;
        }
        picked.pop();
        counts.add(&triples[i], 1);
    }
    false
}

/// Symbols of `valid` that never occur in a triple of `train`.
pub fn unseen_symbols(train: &TripleStore, valid: &[Triple]) -> Vec<String> {
    let mut ents: HashSet<&str> = HashSet::new();
    let mut rels: HashSet<&str> = HashSet::new();
    for t in train.id_triples() {
        ents.insert(train.entity_name(t.head));
        ents.insert(train.entity_name(t.tail));
        rels.insert(train.relation_name(t.relation));
    }
    let mut out = Vec::new();
    for t in valid {
        for e in [&t.head, &t.tail] {
            if !ents.contains(e.as_str()) && !out.contains(e) {
                out.push(e.clone());
            }
        }
        if !rels.contains(t.relation.as_str()) && !out.contains(&t.relation) {
            out.push(t.relation.clone());
        }
    }
    out
}

/// Moves `n_valid` triples out of the store so that every entity and
/// relation of the moved triples still occurs in the remaining training
/// triples. The training store keeps the original symbol tables, so ids are
/// unchanged. Validation triples come back in store order.
pub fn split_no_unseen(store: &TripleStore, n_valid: usize, seed: u64) -> Result<(TripleStore, Vec<Triple>)> {
    if n_valid == 0 || n_valid >= store.len() {
        return Err(Error::Split(format!(
            "need 1 <= n_valid < {} triples, got {n_valid}",
            store.len()
        )));
    }
    let triples = store.id_triples();
    let mut order: Vec<usize> = (0..triples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut counts = Counts::of(store);
    let mut picked = Vec::with_capacity(n_valid);
    for &i in &order {
        if picked.len() == n_valid {
            break;
        }
        if counts.removable(&triples[i]) {
            counts.add(&triples[i], -1);
            picked.push(i);
        }
    }
    if picked.len() < n_valid {
        let found = picked.len();
        let feasible = store.len() <= EXACT_LIMIT && {
            picked.clear();
            let mut fresh = Counts::of(store);
            exact(&order, triples, &mut fresh, n_valid, 0, &mut picked)
        };
        if !feasible {
            return Err(Error::Split(format!(
                "infeasible: cannot hold out {n_valid} triples without unseen ids (found {found})"
            )));
        }
    }

    let held: HashSet<usize> = picked.iter().copied().collect();
    let mut train = TripleStore::new();
    for name in store.entity_names() {
        train.intern_entity(name)?;
    }
    for name in store.relation_names() {
        train.intern_relation(name)?;
    }
    let mut valid = Vec::with_capacity(n_valid);
    for (i, t) in triples.iter().enumerate() {
        if held.contains(&i) {
            valid.push(store.resolve(t));
        } else {
            train.insert_ids(*t);
        }
    }
    let unseen = unseen_symbols(&train, &valid);
    if !unseen.is_empty() {
        return Err(Error::Split(format!("validation symbols unseen in training: {unseen:?}")));
    }
    Ok((train, valid))
}
