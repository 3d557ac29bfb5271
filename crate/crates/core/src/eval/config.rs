use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Dimension, EvalError, Result};
use crate::metrics::{Approach, Baseline, FixedWeights, TrainParams};
use crate::semantics::{load_store, EmbeddingProvider, RemoteConfig, RemoteEncoder};

fn default_hashed_dim() -> usize {
    512
}

fn default_hashed_n() -> usize {
    3
}

fn default_timeout() -> u64 {
    30
}

fn default_retries() -> u32 {
    2
}

fn default_batch() -> usize {
    64
}

/// Where sentence embeddings come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
pub enum ProviderConfig {
    Hashed {
        #[serde(default = "default_hashed_dim")]
        dim: usize,
        #[serde(default = "default_hashed_n")]
        n: usize,
    },
    Store {
        path: PathBuf,
    },
    Remote {
        endpoint: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default = "default_retries")]
        retries: u32,
        #[serde(default = "default_batch")]
        batch_size: usize,
    },
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig::Hashed {
            dim: default_hashed_dim(),
            n: default_hashed_n(),
        }
    }
}

impl ProviderConfig {
    /// Builds the provider; a relative store path is taken from `base`.
    pub fn build(&self, base: &Path) -> Result<EmbeddingProvider> {
        Ok(match self {
            ProviderConfig::Hashed { dim, n } => EmbeddingProvider::hashed(*dim, *n)?,
            ProviderConfig::Store { path } => EmbeddingProvider::Store(load_store(&base.join(path))?),
            ProviderConfig::Remote {
                endpoint,
                timeout_secs,
                retries,
                batch_size,
            } => EmbeddingProvider::Remote(RemoteEncoder::new(RemoteConfig {
                endpoint: endpoint.clone(),
                timeout: Duration::from_secs(*timeout_secs),
                retries: *retries,
                batch_size: (*batch_size).max(1),
            })),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageConfig {
    pub name: String,
    pub dev: PathBuf,
    pub test: Option<PathBuf>,
}

/// Replacement weights for the fixed approaches.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightOverrides {
    pub approach1: Option<FixedWeights>,
    pub approach2: Option<FixedWeights>,
    pub approach3: Option<FixedWeights>,
}

impl WeightOverrides {
    pub fn get(&self, approach: Approach) -> Option<FixedWeights> {
        match approach {
            Approach::JaccardPhonetic => self.approach1,
            Approach::LexicalPhoneticSemantic => self.approach2,
            Approach::FixedFourFeature => self.approach3,
            _ => None,
        }
    }
}

fn all_approaches() -> Vec<Approach> {
    Approach::ALL.to_vec()
}

fn default_dimensions() -> Vec<Dimension> {
    vec![Dimension::Overall]
}

/// Pipeline configuration, read from TOML. Relative paths are resolved
/// against the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    #[serde(default = "all_approaches")]
    pub approaches: Vec<Approach>,
    #[serde(default)]
    pub baselines: Vec<Baseline>,
    #[serde(default = "default_dimensions")]
    pub dimensions: Vec<Dimension>,
    /// Train one model on all dev sets instead of one per language.
    #[serde(default)]
    pub pooled: bool,
    #[serde(default)]
    pub provider: ProviderConfig,
    #[serde(default)]
    pub training: TrainParams,
    #[serde(default)]
    pub weights: WeightOverrides,
    pub languages: Vec<LanguageConfig>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn parse(content: &str, origin: &Path) -> Result<Self> {
        let err = |message: String| EvalError::Config {
            path: origin.display().to_string(),
            message,
        };
        let mut config: PipelineConfig = toml::from_str(content).map_err(|e| err(e.message().to_owned()))?;
        config.base_dir = origin.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate().map_err(err)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&content, path)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.base_dir.join(path)
    }

    fn validate(&self) -> Result<(), String> {
        if self.languages.is_empty() {
            return Err("at least one [[languages]] entry is required".into());
        }
        if self.approaches.is_empty() && self.baselines.is_empty() {
            return Err("nothing to run: no approaches and no baselines".into());
        }
        if self.dimensions.is_empty() {
            return Err("dimensions must not be empty".into());
        }
        let mut names: Vec<&str> = self.languages.iter().map(|l| l.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(format!("language `{}` is listed twice", w[0]));
        }
        let safe = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_');
        if let Some(l) = self.languages.iter().find(|l| !safe(&l.name)) {
            return Err(format!("language name `{}` must be alphanumeric, `-` or `_`", l.name));
        }
        if self.pooled && self.languages.iter().any(|l| l.name == "pooled") {
            return Err("`pooled` is reserved as a language name in pooled mode".into());
        }
        for a in [Approach::JaccardPhonetic, Approach::LexicalPhoneticSemantic, Approach::FixedFourFeature] {
            if let Some(w) = self.weights.get(a) {
                w.validate().map_err(|e| format!("approach {a} weights: {e}"))?;
            }
        }
        Ok(())
    }
}
