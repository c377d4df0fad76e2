use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::discretize::ThresholdConfig;
use crate::error::{Error, Result};
use crate::eval::PipelineConfig;
use crate::explain::{DEFAULT_CHUNK_TOKENS, DEFAULT_TOKEN_ENV};
use crate::fuzzy::{parse_rules, FuzzyRule};
use crate::kg::{Ontology, OntologyKind};
use crate::kge::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Vehicle,
    Pedestrian,
}

impl Mode {
    pub fn kind(self) -> OntologyKind {
        match self {
            Mode::Vehicle => OntologyKind::Vehicle,
            Mode::Pedestrian => OntologyKind::Pedestrian,
        }
    }
}

/// Named training settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// k 100 TransE (vehicles) or k 150 ComplEx (pedestrians), lr 5e-4, batch 10000.
    Published,
    /// Small graphs: k 64 TransE, lr 0.01, batch 256, margin 6.
    Desk,
}

impl Preset {
    pub fn pipeline(self, mode: Mode) -> PipelineConfig {
        match (self, mode) {
            (Preset::Desk, _) => PipelineConfig::desk(),
            (Preset::Published, Mode::Vehicle) => PipelineConfig::default(),
            (Preset::Published, Mode::Pedestrian) => PipelineConfig {
                train: TrainConfig::pedestrian_preset(),
                ..PipelineConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    /// Chat endpoint; the stub backend is used when unset.
    pub endpoint: Option<String>,
    pub model: String,
    pub token_env: String,
    /// Embeddings endpoint; the hashing embedder is used when unset.
    pub embed_endpoint: Option<String>,
    pub embed_model: String,
    pub embed_dim: usize,
    pub chunk_tokens: usize,
    pub top_k: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            endpoint: None,
            model: "gpt-4".into(),
            token_env: DEFAULT_TOKEN_ENV.into(),
            embed_endpoint: None,
            embed_model: "all-MiniLM-L6-v2".into(),
            embed_dim: 384,
            chunk_tokens: DEFAULT_CHUNK_TOKENS,
            top_k: 5,
        }
    }
}

/// Everything a command needs. Loaded from TOML, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub data: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub thresholds: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub horizons: Vec<f64>,
    pub out: PathBuf,
    pub seed: u64,
    /// Unset means the published preset for the mode.
    pub pipeline: Option<PipelineConfig>,
    pub llm: LlmConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Vehicle,
            data: None,
            ontology: None,
            thresholds: None,
            rules: None,
            checkpoint: None,
            corpus: None,
            horizons: vec![1.0, 2.0, 3.0, 4.0],
            out: PathBuf::from("runs"),
            seed: 0,
            pipeline: None,
            llm: LlmConfig::default(),
        }
    }
}

fn require_file(label: &str, p: &Option<PathBuf>) -> Result<()> {
    match p {
        Some(p) if !p.is_file() => Err(Error::Config(format!("{label} file {} does not exist", p.display()))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    /// Referenced files exist and the ontology matches the mode.
    pub fn validate(&self) -> Result<()> {
        require_file("data", &self.data)?;
        require_file("ontology", &self.ontology)?;
        require_file("thresholds", &self.thresholds)?;
        require_file("rules", &self.rules)?;
        require_file("checkpoint", &self.checkpoint)?;
        require_file("corpus", &self.corpus)?;
        if self.horizons.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::Config("horizons must be positive seconds".into()));
        }
        let o = self.ontology()?;
        if o.kind() != self.mode.kind() {
            return Err(Error::Config(format!(
                "ontology `{}` is a {:?} ontology but mode is {:?}",
                o.name(),
                o.kind(),
                self.mode
            )));
        }
        self.pipeline().validate()
    }

    pub fn ontology(&self) -> Result<Ontology> {
        match &self.ontology {
            Some(p) => Ontology::load(p).map_err(|e| Error::Config(e.to_string())),
            None => Ok(match self.mode {
                Mode::Vehicle => Ontology::vehicle(),
                Mode::Pedestrian => Ontology::pedestrian(),
            }),
        }
    }

    pub fn thresholds(&self) -> Result<ThresholdConfig> {
        match &self.thresholds {
            Some(p) => ThresholdConfig::load(p),
            None => Ok(match self.mode {
                Mode::Vehicle => ThresholdConfig::vehicle_default(),
                Mode::Pedestrian => ThresholdConfig::pedestrian_default(),
            }),
        }
    }

    pub fn rules(&self, ontology: &Ontology) -> Result<Vec<FuzzyRule>> {
        match &self.rules {
            Some(p) => parse_rules(p, ontology),
            None => Ok(Vec::new()),
        }
    }

    /// Pipeline settings with the run seed applied.
    pub fn pipeline(&self) -> PipelineConfig {
        let mut p = self
            .pipeline
            .clone()
            .unwrap_or_else(|| Preset::Published.pipeline(self.mode));
        p.train.seed = self.seed;
        p.split.seed = self.seed;
        p
    }

    pub fn data(&self) -> Result<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| Error::Config("no data file given (--data or `data` in the config)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            seed: 9,
            pipeline: Some(PipelineConfig::desk()),
            ..RunConfig::default()
        };
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c: RunConfig = toml::from_str("mode = \"pedestrian\"\nseed = 3\n").unwrap();
        assert_eq!(c.mode, Mode::Pedestrian);
        assert_eq!(c.horizons, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c.pipeline().train.seed, 3);
        assert_eq!(c.pipeline().train.k, 150);
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }

    #[test]
    fn missing_ontology_file_is_a_config_error() {
        let c = RunConfig {
            ontology: Some("/nonexistent/onto.toml".into()),
            ..RunConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn mode_must_match_ontology() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("o.toml");
        std::fs::write(&p, crate::kg::PEDESTRIAN_ONTOLOGY).unwrap();
        let c = RunConfig {
            ontology: Some(p),
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        let ok = RunConfig {
            mode: Mode::Pedestrian,
            ..c
        };
        ok.validate().unwrap();
    }
}
