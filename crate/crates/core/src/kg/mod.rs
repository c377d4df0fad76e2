//! Typed triple store and the conversion of linguistic frames into the
//! DriverKG / PedFeatKG graphs.

mod build;
mod frame;
mod io;
mod ontology;
mod store;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use build::{build_graph, frame_to_triples, instance_id, GraphMode};
pub use frame::LinguisticFrame;
pub use io::{export_triples, import_triples, read_triples, write_triples};
pub use ontology::{
    check_symbol, ClassRole, Ontology, OntologyClass, OntologyKind, RelationSpec,
    PEDESTRIAN_ONTOLOGY, VEHICLE_ONTOLOGY,
};
pub use store::{EntityId, IdTriple, RelationId, StoreStats, TripleStore};

/// Relation linking a generic entity to its children.
pub const HAS_CHILD: &str = "HAS_CHILD";
pub const INSTANCE_OF: &str = "INSTANCE_OF";
pub const PREVIOUS: &str = "PREVIOUS";
pub const NEXT: &str = "NEXT";

/// A `(head, relation, tail)` fact with owned symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl Triple {
    pub fn new(head: impl Into<String>, relation: impl Into<String>, tail: impl Into<String>) -> Self {
        Self {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.head, self.relation, self.tail)
    }
}
