//! Knowledge-graph embeddings: TransE and ComplEx scorers, self-adversarial
//! loss over corrupted triples, Adam training with filtered-MRR early stopping,
//! rank evaluation and binary checkpoints.

mod checkpoint;
mod loss;
mod rank;
mod sample;
mod score;
mod table;
mod train;

use serde::{Deserialize, Serialize};

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use loss::{log_sigmoid, self_adversarial_loss, sigmoid, LossOutput};
pub use rank::{evaluate_ranks, evaluate_ranks_ids, RankReport};
pub use sample::{corrupt, corrupt_ids};
pub use score::{score_grad, score_slices};
pub use table::EmbeddingTable;
pub use train::{
    train, train_with_metric, Adam, FilteredMrr, TrainConfig, TrainReport,
    ValidationMetric,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    TransE,
    ComplEx,
}

impl Scorer {
    /// Reals stored per vector for embedding size `k`.
    pub fn width(self, k: usize) -> usize {
        match self {
            Scorer::TransE => k,
            Scorer::ComplEx => 2 * k,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Scorer::TransE => 0,
            Scorer::ComplEx => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Scorer::TransE),
            1 => Some(Scorer::ComplEx),
            _ => None,
        }
    }
}

impl std::str::FromStr for Scorer {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "transe" => Ok(Scorer::TransE),
            "complex" => Ok(Scorer::ComplEx),
            _ => Err(crate::Error::Config(format!("unknown scorer `{s}`"))),
        }
    }
}

/// Which side of a triple is replaced when corrupting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorruptSide {
    Head,
    Tail,
    Both,
}
