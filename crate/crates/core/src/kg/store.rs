use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kg::{check_symbol, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdTriple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StoreStats {
    pub triples: usize,
    pub entities: usize,
    pub relations: usize,
}

/// Append-only set of triples with interned symbols and head / relation /
/// (head, relation) indexes.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    entities: Vec<String>,
    entity_index: HashMap<String, EntityId>,
    relations: Vec<String>,
    relation_index: HashMap<String, RelationId>,
    triples: Vec<IdTriple>,
    set: HashSet<IdTriple>,
    by_head: HashMap<EntityId, Vec<usize>>,
    by_relation: HashMap<RelationId, Vec<usize>>,
    by_head_relation: HashMap<(EntityId, RelationId), Vec<usize>>,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Result<Self> {
        let mut store = Self::new();
        for t in triples {
            store.insert(t)?;
        }
        Ok(store)
    }

    /// Interns an entity without adding any triple.
    pub fn intern_entity(&mut self, name: &str) -> Result<EntityId> {
        if let Some(&id) = self.entity_index.get(name) {
            return Ok(id);
        }
        check_symbol(name)?;
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(name.to_string());
        self.entity_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn intern_relation(&mut self, name: &str) -> Result<RelationId> {
        if let Some(&id) = self.relation_index.get(name) {
            return Ok(id);
        }
        check_symbol(name)?;
        let id = RelationId(self.relations.len() as u32);
        self.relations.push(name.to_string());
        self.relation_index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Inserts a triple; returns `false` if it was already present.
    pub fn insert(&mut self, t: &Triple) -> Result<bool> {
        let head = self.intern_entity(&t.head)?;
        let relation = self.intern_relation(&t.relation)?;
        let tail = self.intern_entity(&t.tail)?;
        Ok(self.insert_ids(IdTriple {
            head,
            relation,
            tail,
        }))
    }

    pub fn insert_ids(&mut self, t: IdTriple) -> bool {
        if !self.set.insert(t) {
            return false;
        }
        let idx = self.triples.len();
        self.triples.push(t);
        self.by_head.entry(t.head).or_default().push(idx);
        self.by_relation.entry(t.relation).or_default().push(idx);
        self.by_head_relation
            .entry((t.head, t.relation))
            .or_default()
            .push(idx);
        true
    }

    pub fn extend<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) -> Result<usize> {
        let mut added = 0;
        for t in triples {
            added += usize::from(self.insert(t)?);
        }
        Ok(added)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            triples: self.triples.len(),
            entities: self.entities.len(),
            relations: self.relations.len(),
        }
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entities
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relations
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_index.get(name).copied()
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relation_index.get(name).copied()
    }

    pub fn entity_name(&self, id: EntityId) -> &str {
        &self.entities[id.0 as usize]
    }

    pub fn relation_name(&self, id: RelationId) -> &str {
        &self.relations[id.0 as usize]
    }

    pub fn id_triples(&self) -> &[IdTriple] {
        &self.triples
    }

    pub fn contains_ids(&self, t: &IdTriple) -> bool {
        self.set.contains(t)
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.to_ids(t).is_ok_and(|ids| self.set.contains(&ids))
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

    pub fn resolve(&self, t: &IdTriple) -> Triple {
        Triple::new(
            self.entity_name(t.head),
            self.relation_name(t.relation),
            self.entity_name(t.tail),
        )
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().map(|t| self.resolve(t))
    }

    /// All triples, sorted lexicographically by (head, relation, tail).
    pub fn sorted_triples(&self) -> Vec<Triple> {
        let mut out: Vec<Triple> = self.triples().collect();
        out.sort();
        out
    }

    pub fn triple_set(&self) -> HashSet<Triple> {
        self.triples().collect()
    }

    pub fn with_head(&self, head: &str) -> Vec<Triple> {
        self.entity_id(head)
            .and_then(|h| self.by_head.get(&h))
            .map(|idx| idx.iter().map(|&i| self.resolve(&self.triples[i])).collect())
            .unwrap_or_default()
    }

    pub fn with_relation(&self, relation: &str) -> Vec<Triple> {
        self.relation_id(relation)
            .and_then(|r| self.by_relation.get(&r))
            .map(|idx| idx.iter().map(|&i| self.resolve(&self.triples[i])).collect())
            .unwrap_or_default()
    }

    pub fn tails(&self, head: &str, relation: &str) -> Vec<&str> {
        let (Some(h), Some(r)) = (self.entity_id(head), self.relation_id(relation)) else {
            return Vec::new();
        };
        self.by_head_relation
            .get(&(h, r))
            .map(|idx| {
                idx.iter()
                    .map(|&i| self.entity_name(self.triples[i].tail))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Debug check that every index agrees with the triple list.
    pub fn indexes_consistent(&self) -> bool {
        let mut heads = 0;
        for (h, idx) in &self.by_head {
            heads += idx.len();
            if idx.iter().any(|&i| self.triples[i].head != *h) {
                return false;
            }
        }
        let mut rels = 0;
        for (r, idx) in &self.by_relation {
            rels += idx.len();
            if idx.iter().any(|&i| self.triples[i].relation != *r) {
                return false;
            }
        }
        let mut pairs = 0;
        for ((h, r), idx) in &self.by_head_relation {
            pairs += idx.len();
            if idx
                .iter()
                .any(|&i| self.triples[i].head != *h || self.triples[i].relation != *r)
            {
                return false;
            }
        }
        let n = self.triples.len();
        heads == n && rels == n && pairs == n && self.set.len() == n
    }
}
