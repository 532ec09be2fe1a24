//! Run configuration: system choice, weights, model registry, generation
//! parameters, endpoints and file locations.
//!
//! ```toml
//! system = "tr-def"          # tr | tr-def | langspec | gen | gen-def | seg | seg-def
//! seed = 0
//! max_input_chars = 300
//!
//! [weights]
//! ic = 1.0
//! ig = 0.0
//! cg = 0.0
//!
//! [gen]
//! count = 15
//! aggregation = "mean"       # mean | max
//!
//! [endpoints]
//! embed = "http://127.0.0.1:8080"
//!
//! [paths]
//! cache_dir = "cache"
//! inventory = "senses.json"
//!
//! [models.it]
//! vl = "clip-italian"
//! l = "bert-base-italian-xxl-uncased"
//! ```
//!
//! Relative paths resolve against the directory of the config file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::augment::DEFAULT_BATCH_SIZE as DEFAULT_AUGMENT_BATCH;
use crate::error::{Error, Result};
use crate::types::{Language, Weights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Translate to English, then weighted scoring with English models.
    Tr,
    /// Weighted scoring with per-language models.
    LangSpec,
    /// Similarity to generated images.
    Gen,
    /// Mean segmentation mask value.
    Seg,
}

/// A strategy plus the definition-augmentation flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemId {
    pub strategy: Strategy,
    pub def: bool,
}

impl SystemId {
    pub const ALL: [SystemId; 7] = [
        SystemId::new(Strategy::Tr, false),
        SystemId::new(Strategy::Tr, true),
        SystemId::new(Strategy::LangSpec, false),
        SystemId::new(Strategy::Gen, false),
        SystemId::new(Strategy::Gen, true),
        SystemId::new(Strategy::Seg, false),
        SystemId::new(Strategy::Seg, true),
    ];

    pub const fn new(strategy: Strategy, def: bool) -> Self {
        SystemId { strategy, def }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.strategy {
            Strategy::Tr => "tr",
            Strategy::LangSpec => "langspec",
            Strategy::Gen => "gen",
            Strategy::Seg => "seg",
        };
        if self.def {
            write!(f, "{base}-def")
        } else {
            f.write_str(base)
        }
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('+', "-");
        let (base, def) = match lower.strip_suffix("-def") {
            Some(b) => (b, true),
            None => (lower.as_str(), false),
        };
        let strategy = match base {
            "tr" => Strategy::Tr,
            "langspec" => Strategy::LangSpec,
            "gen" => Strategy::Gen,
            "seg" => Strategy::Seg,
            _ => {
                return Err(Error::Config(format!(
                    "unknown system {s:?} (tr|tr-def|langspec|gen|gen-def|seg|seg-def)"
                )))
            }
        };
        Ok(SystemId { strategy, def })
    }
}

impl Serialize for SystemId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SystemId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Vision-language and text model ids used for one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelPair {
    pub vl: String,
    pub l: String,
}

impl ModelPair {
    pub fn new(vl: impl Into<String>, l: impl Into<String>) -> Self {
        ModelPair { vl: vl.into(), l: l.into() }
    }
}

pub fn default_registry() -> BTreeMap<Language, ModelPair> {
    BTreeMap::from([
        (Language::En, ModelPair::new("clip-vit-large-patch14", "bert-base-uncased")),
        (Language::It, ModelPair::new("clip-italian", "bert-base-italian-xxl-uncased")),
        (Language::Fa, ModelPair::new("clipfa", "parsbert")),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GenAggregation {
    #[default]
    Mean,
    Max,
}

impl FromStr for GenAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(GenAggregation::Mean),
            "max" => Ok(GenAggregation::Max),
            _ => Err(Error::Config(format!("unknown aggregation {s:?} (mean|max)"))),
        }
    }
}

/// Generation settings. Only `count` and `aggregation` affect scoring here;
/// `steps` and `guidance` are passed through to whatever produces the
/// generated images and echoed in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub count: usize,
    pub steps: u32,
    pub guidance: f64,
    pub aggregation: GenAggregation,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            count: 15,
            steps: 20,
            guidance: 7.5,
            aggregation: GenAggregation::Mean,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Endpoints {
    pub embed: Option<String>,
    pub generate: Option<String>,
    pub translate: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Directory of embedding store files (write-through cache).
    pub cache_dir: Option<PathBuf>,
    /// Sense inventory JSON.
    pub inventory: Option<PathBuf>,
    /// Definition cache TSV.
    pub definitions: Option<PathBuf>,
    /// Translation cache TSV.
    pub translations: Option<PathBuf>,
    /// Mean mask values TSV for the segmentation strategy.
    pub masks: Option<PathBuf>,
    /// Embedding store holding the generated-image vectors.
    pub generated: Option<PathBuf>,
    /// Directory holding the candidate image files.
    pub images: Option<PathBuf>,
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.cache_dir,
            &mut self.inventory,
            &mut self.definitions,
            &mut self.translations,
            &mut self.masks,
            &mut self.generated,
            &mut self.images,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub system: SystemId,
    /// Explicit weights; presets supply defaults when absent.
    pub weights: Option<Weights>,
    pub seed: u64,
    /// Text inputs longer than this many characters are truncated before
    /// embedding.
    pub max_input_chars: Option<usize>,
    pub augment_batch_size: usize,
    /// Vector dimension of the in-process mock encoder.
    pub mock_dim: usize,
    pub gen: GenParams,
    pub endpoints: Endpoints,
    pub paths: Paths,
    pub models: BTreeMap<Language, ModelPair>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            system: SystemId::new(Strategy::Tr, false),
            weights: None,
            seed: 0,
            max_input_chars: None,
            augment_batch_size: DEFAULT_AUGMENT_BATCH,
            mock_dim: 64,
            gen: GenParams::default(),
            endpoints: Endpoints::default(),
            paths: Paths::default(),
            models: default_registry(),
        }
    }
}

impl SystemConfig {
    /// Parses TOML. Languages missing from `[models]` keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut cfg: SystemConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut models = default_registry();
        models.append(&mut cfg.models);
        cfg.models = models;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.paths.resolve(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = &self.weights {
            w.validate()?;
        }
        if self.gen.count == 0 {
            return Err(Error::Config("gen.count must be >= 1".into()));
        }
        if !(self.gen.guidance.is_finite()) {
            return Err(Error::Config("gen.guidance must be finite".into()));
        }
        if self.augment_batch_size == 0 {
            return Err(Error::Config("augment_batch_size must be >= 1".into()));
        }
        if self.mock_dim == 0 {
            return Err(Error::Config("mock_dim must be >= 1".into()));
        }
        if self.max_input_chars == Some(0) {
            return Err(Error::Config("max_input_chars must be >= 1".into()));
        }
        for (lang, pair) in &self.models {
            if pair.vl.is_empty() || pair.l.is_empty() {
                return Err(Error::Config(format!("empty model id for language {lang}")));
            }
        }
        Ok(())
    }
}
