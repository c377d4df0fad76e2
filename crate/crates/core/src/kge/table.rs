use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{score_slices, Scorer};
use crate::error::{Error, Result};
use crate::kg::{EntityId, IdTriple, RelationId, Triple, TripleStore};

/// Entity and relation vectors, row-major in two flat buffers. Row `i` of the
/// entity buffer belongs to `EntityId(i)` of the store the table was built
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    scorer: Scorer,
    k: usize,
    entity_names: Vec<String>,
    relation_names: Vec<String>,
    entity_index: HashMap<String, EntityId>,
    relation_index: HashMap<String, RelationId>,
    pub(crate) entities: Vec<f64>,
    pub(crate) relations: Vec<f64>,
}

impl EmbeddingTable {
    /// Uniform init in `[-6/√k, 6/√k]`.
    pub fn random(store: &TripleStore, scorer: Scorer, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 6.0 / (k as f64).sqrt();
        let w = scorer.width(k);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n * w).map(|_| rng.random_range(-bound..=bound)).collect()
        };
        let entities = draw(store.entity_names().len());
        let relations = draw(store.relation_names().len());
        Self::from_parts(
            scorer,
            k,
            store.entity_names().to_vec(),
            store.relation_names().to_vec(),
            entities,
            relations,
        )
        .expect("consistent shapes")
    }

    pub fn from_parts(
        scorer: Scorer,
        k: usize,
        entity_names: Vec<String>,
        relation_names: Vec<String>,
        entities: Vec<f64>,
        relations: Vec<f64>,
    ) -> Result<Self> {
        let w = scorer.width(k);
        if k == 0 || entities.len() != entity_names.len() * w || relations.len() != relation_names.len() * w {
            return Err(Error::InvalidInput(format!(
                "embedding shapes do not match k = {k} for {} entities, {} relations",
                entity_names.len(),
                relation_names.len()
            )));
        }
        let entity_index = entity_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), EntityId(i as u32)))
            .collect();
        let relation_index = relation_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), RelationId(i as u32)))
            .collect();
        Ok(Self {
            scorer,
            k,
            entity_names,
            relation_names,
            entity_index,
            relation_index,
            entities,
            relations,
        })
    }

    pub fn scorer(&self) -> Scorer {
        self.scorer
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn width(&self) -> usize {
        self.scorer.width(self.k)
    }

    pub fn num_entities(&self) -> usize {
        self.entity_names.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relation_names.len()
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entity_names
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relation_names
    }

    pub fn entity_vec(&self, id: EntityId) -> &[f64] {
        let w = self.width();
        &self.entities[id.0 as usize * w..(id.0 as usize + 1) * w]
    }

    pub fn relation_vec(&self, id: RelationId) -> &[f64] {
        let w = self.width();
        &self.relations[id.0 as usize * w..(id.0 as usize + 1) * w]
    }

    pub fn entity_vec_mut(&mut self, id: EntityId) -> &mut [f64] {
        let w = self.width();
        &mut self.entities[id.0 as usize * w..(id.0 as usize + 1) * w]
    }

    pub fn relation_vec_mut(&mut self, id: RelationId) -> &mut [f64] {
        let w = self.width();
        &mut self.relations[id.0 as usize * w..(id.0 as usize + 1) * w]
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_index.get(name).copied()
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relation_index.get(name).copied()
    }

    pub fn to_ids(&self, t: &Triple) -> Result<IdTriple> {
        Ok(IdTriple {
            head: self
                .entity_id(&t.head)
                .ok_or_else(|| Error::UnknownEntity(t.head.clone()))?,
            relation: self
                .relation_id(&t.relation)
                .ok_or_else(|| Error::UnknownRelation(t.relation.clone()))?,
            tail: self
                .entity_id(&t.tail)
                .ok_or_else(|| Error::UnknownEntity(t.tail.clone()))?,
        })
    }

    pub fn score_ids(&self, t: &IdTriple) -> f64 {
        score_slices(
            self.scorer,
            self.entity_vec(t.head),
            self.relation_vec(t.relation),
            self.entity_vec(t.tail),
        )
    }

    /// Scores any triple over known symbols, whether or not it was trained on.
    pub fn score(&self, t: &Triple) -> Result<f64> {
        Ok(self.score_ids(&self.to_ids(t)?))
    }

    pub fn is_finite(&self) -> bool {
        self.entities.iter().chain(&self.relations).all(|x| x.is_finite())
    }

    /// Scales entity vectors with L2 norm above 1 back onto the unit sphere.
    pub fn project_entities_to_unit_ball(&mut self) {
        let w = self.width();
        for row in self.entities.chunks_mut(w) {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }

    /// Bitwise equality of every stored float.
    pub fn bit_identical(&self, other: &Self) -> bool {
        self.scorer == other.scorer
            && self.k == other.k
            && self.entity_names == other.entity_names
            && self.relation_names == other.relation_names
            && self.entities.len() == other.entities.len()
            && self.relations.len() == other.relations.len()
            && self
                .entities
                .iter()
                .chain(&self.relations)
                .zip(other.entities.iter().chain(&other.relations))
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> TripleStore {
        TripleStore::from_triples(&[Triple::new("a", "R", "b"), Triple::new("b", "R", "c")]).unwrap()
    }

    #[test]
    fn init_bounds_and_shape() {
        let t = EmbeddingTable::random(&store(), Scorer::ComplEx, 16, 1);
        assert_eq!(t.entities.len(), 3 * 32);
        assert_eq!(t.relations.len(), 32);
        let bound = 6.0 / 4.0;
        assert!(t.entities.iter().all(|x| x.abs() <= bound));
        assert!(t.is_finite());
    }

    #[test]
    fn unknown_symbol() {
        let t = EmbeddingTable::random(&store(), Scorer::TransE, 4, 1);
        assert!(matches!(
            t.score(&Triple::new("a", "R", "zz")),
            Err(Error::UnknownEntity(_))
        ));
        assert!(t.score(&Triple::new("c", "R", "a")).is_ok());
    }

    #[test]
    fn projection() {
        let mut t = EmbeddingTable::random(&store(), Scorer::TransE, 4, 1);
        t.entities.iter_mut().for_each(|x| *x *= 10.0);
        t.project_entities_to_unit_ball();
        for row in t.entities.chunks(4) {
            let n: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(n <= 1.0 + 1e-12);
        }
    }
}
