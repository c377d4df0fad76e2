//! Class / instance / relation schema that every generated triple must satisfy.
//!
//! An ontology file is TOML with a list of `[[class]]` tables and a list of
//! `[[relation]]` tables. Closed classes enumerate their instances; open
//! classes (per-frame identifiers) accept any id that is not an instance of a
//! closed class.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::Triple;

/// Which road-user family an ontology describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OntologyKind {
    Vehicle,
    Pedestrian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassRole {
    /// Root entity linked to every road user (`vehicle`, `Pedestrian`).
    Generic,
    /// Identifier of one road user. For vehicles this is the per-frame child id.
    Identifier,
    /// Identifier of one pedestrian at one frame.
    Instance,
    /// A linguistic feature; exactly one instance per frame.
    Feature,
    /// The class being predicted.
    Target,
    /// Entities introduced by fuzzy-rule conversion.
    Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologyClass {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub role: ClassRole,
    /// Empty for open classes.
    #[serde(default)]
    pub instances: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    /// Feature classes only: a frame lacking this feature is rejected.
    #[serde(default)]
    pub required: bool,
}

impl OntologyClass {
    pub fn is_open(&self) -> bool {
        self.instances.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub name: String,
    pub domain: Vec<String>,
    pub range: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OntologyFile {
    name: String,
    kind: OntologyKind,
    #[serde(default, rename = "class")]
    classes: Vec<OntologyClass>,
    #[serde(default, rename = "relation")]
    relations: Vec<RelationSpec>,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    name: String,
    kind: OntologyKind,
    classes: Vec<OntologyClass>,
    relations: Vec<RelationSpec>,
    relation_index: HashMap<String, usize>,
    class_index: HashMap<String, usize>,
    instance_class: HashMap<String, usize>,
    generic: usize,
    target: usize,
}

pub const VEHICLE_ONTOLOGY: &str = include_str!("../../data/vehicle_ontology.toml");
pub const PEDESTRIAN_ONTOLOGY: &str = include_str!("../../data/pedestrian_ontology.toml");

impl Ontology {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// The bundled DriverKG ontology.
    pub fn vehicle() -> Self {
        Self::from_toml_str(VEHICLE_ONTOLOGY).expect("bundled vehicle ontology is valid")
    }

    /// The bundled PedFeatKG ontology.
    pub fn pedestrian() -> Self {
        Self::from_toml_str(PEDESTRIAN_ONTOLOGY).expect("bundled pedestrian ontology is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: OntologyFile = toml::from_str(text).map_err(|e| Error::Parse {
            context: "ontology".into(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        Self::from_parts(file.name, file.kind, file.classes, file.relations)
    }

    pub fn from_parts(
        name: String,
        kind: OntologyKind,
        classes: Vec<OntologyClass>,
        relations: Vec<RelationSpec>,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Ontology(
                "ontology must declare at least one class".into(),
            ));
        }
        let mut class_index = HashMap::new();
        let mut instance_class = HashMap::new();
        for (i, class) in classes.iter().enumerate() {
            if class_index.insert(class.name.clone(), i).is_some() {
                return Err(Error::Ontology(format!("duplicate class `{}`", class.name)));
            }
            for inst in &class.instances {
                check_symbol(inst)?;
                if let Some(prev) = instance_class.insert(inst.clone(), i) {
                    return Err(Error::Ontology(format!(
                        "instance `{inst}` declared in both `{}` and `{}`",
                        classes[prev].name, class.name
                    )));
                }
            }
        }
        let mut relation_index = HashMap::new();
        for (i, rel) in relations.iter().enumerate() {
            check_symbol(&rel.name)?;
            if rel.domain.is_empty() || rel.range.is_empty() {
                return Err(Error::Ontology(format!(
                    "relation `{}` needs a non-empty domain and range",
                    rel.name
                )));
            }
            for c in rel.domain.iter().chain(&rel.range) {
                if !class_index.contains_key(c) {
                    return Err(Error::Ontology(format!(
                        "relation `{}` refers to undeclared class `{c}`",
                        rel.name
                    )));
                }
            }
            if relation_index.insert(rel.name.clone(), i).is_some() {
                return Err(Error::Ontology(format!("duplicate relation `{}`", rel.name)));
            }
        }
        for class in &classes {
            for r in &class.relations {
                if !relation_index.contains_key(r) {
                    return Err(Error::Ontology(format!(
                        "class `{}` lists undeclared relation `{r}`",
                        class.name
                    )));
                }
            }
        }
        let only = |role: ClassRole| -> Result<usize> {
            let found: Vec<usize> = classes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.role == role)
                .map(|(i, _)| i)
                .collect();
            match found.as_slice() {
                [one] => Ok(*one),
                _ => Err(Error::Ontology(format!(
                    "expected exactly one {role:?} class, found {}",
                    found.len()
                ))),
            }
        };
        let generic = only(ClassRole::Generic)?;
        let target = only(ClassRole::Target)?;
        if classes[generic].instances.len() != 1 {
            return Err(Error::Ontology(
                "the generic class must have exactly one instance".into(),
            ));
        }
        if classes[target].is_open() {
            return Err(Error::Ontology("the target class must list its labels".into()));
        }
        Ok(Self {
            name,
            kind,
            classes,
            relations,
            relation_index,
            class_index,
            instance_class,
            generic,
            target,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> OntologyKind {
        self.kind
    }

    pub fn classes(&self) -> &[OntologyClass] {
        &self.classes
    }

    pub fn relations(&self) -> &[RelationSpec] {
        &self.relations
    }

    pub fn class(&self, name: &str) -> Option<&OntologyClass> {
        self.class_index.get(name).map(|&i| &self.classes[i])
    }

    pub fn relation(&self, name: &str) -> Option<&RelationSpec> {
        self.relation_index.get(name).map(|&i| &self.relations[i])
    }

    /// The single instance of the generic class.
    pub fn generic_entity(&self) -> &str {
        &self.classes[self.generic].instances[0]
    }

    pub fn target_class(&self) -> &OntologyClass {
        &self.classes[self.target]
    }

    /// Relation pointing at the target class (`INTENTION_IS`, `ACTION`).
    pub fn target_relation(&self) -> &str {
        let target = &self.classes[self.target];
        target
            .relations
            .first()
            .map(String::as_str)
            .or_else(|| {
                self.relations
                    .iter()
                    .find(|r| r.range.contains(&target.name))
                    .map(|r| r.name.as_str())
            })
            .expect("target class has a relation")
    }

    /// Prediction labels in declaration order.
    pub fn labels(&self) -> &[String] {
        &self.classes[self.target].instances
    }

    pub fn feature_classes(&self) -> impl Iterator<Item = &OntologyClass> {
        self.classes.iter().filter(|c| c.role == ClassRole::Feature)
    }

    /// Feature relations in class declaration order.
    pub fn feature_relations(&self) -> Vec<&str> {
        self.feature_classes()
            .filter_map(|c| c.relations.first().map(String::as_str))
            .collect()
    }

    pub fn first_class_with_role(&self, role: ClassRole) -> Option<&OntologyClass> {
        self.classes.iter().find(|c| c.role == role)
    }

    pub fn class_of_instance(&self, instance: &str) -> Option<&OntologyClass> {
        self.instance_class.get(instance).map(|&i| &self.classes[i])
    }

    pub fn is_member(&self, entity: &str, class: &OntologyClass) -> bool {
        if class.is_open() {
            !self.instance_class.contains_key(entity)
        } else {
            class.instances.iter().any(|i| i == entity)
        }
    }

    /// Closed instances allowed as tail of `relation`.
    pub fn range_instances(&self, relation: &str) -> Vec<&str> {
        let Some(rel) = self.relation(relation) else {
            return Vec::new();
        };
        rel.range
            .iter()
            .filter_map(|c| self.class(c))
            .flat_map(|c| c.instances.iter().map(String::as_str))
            .collect()
    }

    /// Index of a label in declaration order, used for tie-breaking.
    pub fn label_rank(&self, label: &str) -> Option<usize> {
        self.labels().iter().position(|l| l == label)
    }

    /// Checks relation declaration and domain/range membership. The generic
    /// entity may head any relation.
    pub fn validate_triple(&self, t: &Triple) -> Result<()> {
        let invalid = |reason: String| Error::InvalidTriple {
            triple: t.to_string(),
            reason,
        };
        let rel = self
            .relation(&t.relation)
            .ok_or_else(|| invalid(format!("relation `{}` not in ontology", t.relation)))?;
        let head_ok = t.head == self.generic_entity()
            || rel
                .domain
                .iter()
                .filter_map(|c| self.class(c))
                .any(|c| self.is_member(&t.head, c));
        if !head_ok {
            return Err(invalid(format!(
                "head `{}` outside domain {:?}",
                t.head, rel.domain
            )));
        }
        let tail_ok = rel
            .range
            .iter()
            .filter_map(|c| self.class(c))
            .any(|c| self.is_member(&t.tail, c));
        if !tail_ok {
            return Err(invalid(format!(
                "tail `{}` outside range {:?}",
                t.tail, rel.range
            )));
        }
        Ok(())
    }

    /// Adds classes and relations introduced by fuzzy rules (PedFeatRulesKG).
    /// Idempotent.
    pub fn with_rule_extension(&self) -> Result<Self> {
        use crate::fuzzy::names;
        if self.class(names::ANTECEDENT_CLASS).is_some() {
            return Ok(self.clone());
        }
        let mut classes = self.classes.clone();
        let mut relations = self.relations.clone();
        let rule_class = |name: &str, description: &str, instances: Vec<String>, rel: &str| {
            OntologyClass {
                name: name.into(),
                description: description.into(),
                role: ClassRole::Rule,
                instances,
                relations: vec![rel.into()],
                required: false,
            }
        };
        classes.push(rule_class(
            names::ANTECEDENT_CLASS,
            "Combination of all antecedent feature values of one rule",
            Vec::new(),
            names::ANTECEDENT_OF,
        ));
        classes.push(rule_class(
            names::CONSEQUENT_CLASS,
            "Crossing action and weight of one rule",
            Vec::new(),
            names::IMPLIES,
        ));
        classes.push(rule_class(
            names::WEIGHT_CLASS,
            "Banded rule weight",
            names::WEIGHT_BANDS.iter().map(|s| s.to_string()).collect(),
            names::RULE_WEIGHT,
        ));
        let features: Vec<String> = self.feature_classes().map(|c| c.name.clone()).collect();
        let target = self.target_class().name.clone();
        let instance_class = self
            .first_class_with_role(ClassRole::Instance)
            .or_else(|| self.first_class_with_role(ClassRole::Identifier))
            .map(|c| c.name.clone())
            .ok_or_else(|| Error::Ontology("no identifier class to attach rules to".into()))?;
        let rel = |name: &str, domain: Vec<String>, range: Vec<String>| RelationSpec {
            name: name.into(),
            domain,
            range,
        };
        relations.push(rel(
            names::ANTECEDENT_OF,
            features,
            vec![names::ANTECEDENT_CLASS.into()],
        ));
        relations.push(rel(
            names::IMPLIES,
            vec![names::ANTECEDENT_CLASS.into()],
            vec![names::CONSEQUENT_CLASS.into()],
        ));
        relations.push(rel(
            names::CONSEQUENT_LABEL,
            vec![names::CONSEQUENT_CLASS.into()],
            vec![target],
        ));
        relations.push(rel(
            names::RULE_WEIGHT,
            vec![names::CONSEQUENT_CLASS.into()],
            vec![names::WEIGHT_CLASS.into()],
        ));
        relations.push(rel(
            names::ACTIVATES_RULE,
            vec![instance_class],
            vec![names::ANTECEDENT_CLASS.into()],
        ));
        // Rule antecedents are evidence in rule-aware inference.
        let target_rel = self.target_relation().to_string();
        if let Some(r) = relations.iter_mut().find(|r| r.name == target_rel) {
            r.domain.push(names::ANTECEDENT_CLASS.into());
        }
        Self::from_parts(
            format!("{}+rules", self.name),
            self.kind,
            classes,
            relations,
        )
    }

    /// Instances of every closed class, grouped by class name.
    pub fn instance_table(&self) -> BTreeMap<&str, &[String]> {
        self.classes
            .iter()
            .map(|c| (c.name.as_str(), c.instances.as_slice()))
            .collect()
    }
}

/// Entity and relation names: non-empty, no whitespace.
pub fn check_symbol(s: &str) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty symbol".into()));
    }
    if s.chars().any(char::is_whitespace) {
        return Err(Error::InvalidInput(format!("symbol `{s}` contains whitespace")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vehicle_ontology_matches_table() {
        let o = Ontology::vehicle();
        assert_eq!(o.classes().len(), 10);
        assert_eq!(o.labels(), ["LLC", "LK", "RLC"]);
        assert_eq!(o.target_relation(), "INTENTION_IS");
        assert_eq!(o.generic_entity(), "vehicle");
        assert_eq!(
            o.range_instances("TTC_WITH_LEFT_FOLLOWING_VEHICLE_IS"),
            [
                "highRiskLeftFollowing",
                "mediumRiskLeftFollowing",
                "lowRiskLeftFollowing"
            ]
        );
        assert_eq!(o.feature_classes().count(), 7);
    }

    #[test]
    fn pedestrian_ontology_matches_table() {
        let o = Ontology::pedestrian();
        assert_eq!(o.classes().len(), 9);
        assert_eq!(o.range_instances("ATTENTION"), ["Looking", "NotLooking"]);
        assert_eq!(o.labels(), ["crossRoad", "noCrossRoad"]);
        assert_eq!(o.generic_entity(), "Pedestrian");
        assert_eq!(
            o.range_instances("MOTION"),
            ["Stand", "Walk", "Wave", "Run", "Na"]
        );
        assert_eq!(o.range_instances("EGO_DISTANCE").len(), 5);
    }

    #[test]
    fn empty_class_list_is_rejected() {
        let err = Ontology::from_toml_str("name = \"x\"\nkind = \"vehicle\"\n").unwrap_err();
        assert!(err
            .to_string()
            .contains("ontology must declare at least one class"));
    }

    #[test]
    fn duplicate_instance_is_rejected() {
        let text = r#"
name = "dup"
kind = "vehicle"
[[class]]
name = "g"
role = "generic"
instances = ["g"]
[[class]]
name = "a"
role = "target"
instances = ["x"]
relations = ["R"]
[[class]]
name = "b"
role = "feature"
instances = ["x"]
[[relation]]
name = "R"
domain = ["g"]
range = ["a"]
"#;
        let err = Ontology::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("declared in both"), "{err}");
    }

    #[test]
    fn relation_with_undeclared_class_is_rejected() {
        let text = r#"
name = "bad"
kind = "vehicle"
[[class]]
name = "g"
role = "generic"
instances = ["g"]
[[class]]
name = "t"
role = "target"
instances = ["y"]
[[relation]]
name = "R"
domain = ["nope"]
range = ["t"]
"#;
        let err = Ontology::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("undeclared class `nope`"), "{err}");
    }

    #[test]
    fn validates_domain_and_range() {
        let o = Ontology::vehicle();
        let ok = Triple::new("741", "INTENTION_IS", "LK");
        o.validate_triple(&ok).unwrap();
        let generic = Triple::new("vehicle", "INTENTION_IS", "LK");
        o.validate_triple(&generic).unwrap();
        let bad_tail = Triple::new("741", "INTENTION_IS", "movingLeft");
        assert!(o.validate_triple(&bad_tail).is_err());
        let bad_rel = Triple::new("741", "FLIES", "LK");
        assert!(o.validate_triple(&bad_rel).is_err());
    }

    #[test]
    fn rule_extension_is_idempotent() {
        let o = Ontology::pedestrian().with_rule_extension().unwrap();
        let again = o.with_rule_extension().unwrap();
        assert_eq!(o.classes().len(), again.classes().len());
        assert!(o.relation(crate::fuzzy::names::ACTIVATES_RULE).is_some());
    }
}
