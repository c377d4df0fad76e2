//! Road-user behavior prediction over a knowledge graph.
//!
//! Scene features are discretized into ontology instances ([`discretize`]),
//! stored as triples ([`kg`]), optionally enriched with fuzzy rules ([`fuzzy`]),
//! embedded ([`kge`]) and scored as Bayesian posteriors ([`bayes`]).
//! [`eval`] wires the stages together and [`explain`] turns predictions into text.

pub mod bayes;
pub mod cli;
pub mod discretize;
pub mod eval;
pub mod error;
pub mod explain;
pub mod fuzzy;
pub mod ingest;
pub mod kg;
pub mod kge;

pub use error::{Error, Result};
