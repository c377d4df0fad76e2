use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{check_symbol, ClassRole, Ontology};

/// One road user at one frame, every feature already mapped to a linguistic
/// instance. `assignments` is keyed by feature relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinguisticFrame {
    pub user_id: String,
    pub frame: u64,
    pub assignments: BTreeMap<String, String>,
    pub label: Option<String>,
}

impl LinguisticFrame {
    pub fn new(user_id: impl Into<String>, frame: u64) -> Self {
        Self {
            user_id: user_id.into(),
            frame,
            assignments: BTreeMap::new(),
            label: None,
        }
    }

    pub fn with(mut self, relation: impl Into<String>, instance: impl Into<String>) -> Self {
        self.assignments.insert(relation.into(), instance.into());
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn get(&self, relation: &str) -> Option<&str> {
        self.assignments.get(relation).map(String::as_str)
    }

    /// Evidence pairs `(relation, instance)` ordered by the ontology's feature
    /// declaration; relations the ontology does not list as features follow in
    /// key order.
    pub fn ordered_assignments<'a>(&'a self, ontology: &'a Ontology) -> Vec<(&'a str, &'a str)> {
        let order = ontology.feature_relations();
        let mut out: Vec<(&str, &str)> = order
            .iter()
            .filter_map(|r| self.assignments.get_key_value(*r))
            .map(|(r, i)| (r.as_str(), i.as_str()))
            .collect();
        for (r, i) in &self.assignments {
            if !order.contains(&r.as_str()) {
                out.push((r, i));
            }
        }
        out
    }

    pub fn validate(&self, ontology: &Ontology) -> Result<()> {
        let invalid = |reason: String| Error::InvalidFrame {
            frame: format!("{}@{}", self.user_id, self.frame),
            reason,
        };
        check_symbol(&self.user_id).map_err(|e| invalid(e.to_string()))?;
        for (relation, instance) in &self.assignments {
            let rel = ontology
                .relation(relation)
                .ok_or_else(|| invalid(format!("relation `{relation}` not in ontology")))?;
            let range: Vec<_> = rel.range.iter().filter_map(|c| ontology.class(c)).collect();
            if !range.iter().any(|c| c.role == ClassRole::Feature) {
                return Err(invalid(format!("`{relation}` is not a feature relation")));
            }
            if !range.iter().any(|c| ontology.is_member(instance, c)) {
                return Err(invalid(format!(
                    "instance `{instance}` outside the range of `{relation}`"
                )));
            }
        }
        for class in ontology.feature_classes().filter(|c| c.required) {
            let present = class
                .relations
                .iter()
                .any(|r| self.assignments.contains_key(r));
            if !present {
                return Err(invalid(format!("missing mandatory feature `{}`", class.name)));
            }
        }
        if let Some(label) = &self.label {
            if ontology.label_rank(label).is_none() {
                return Err(invalid(format!("label `{label}` is not a prediction target")));
            }
        }
        Ok(())
    }
}
