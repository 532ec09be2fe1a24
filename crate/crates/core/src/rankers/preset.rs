//! System presets: which strategy, weights, models and context
//! preprocessing apply to a dataset language.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::{ModelPair, Strategy, SystemConfig, SystemId};
use crate::error::{Error, Result};
use crate::types::{Language, Weights};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedPreset {
    pub system: String,
    pub strategy: Strategy,
    /// Translate contexts to English before scoring.
    pub translate: bool,
    /// Append generated definitions to contexts.
    pub augment: bool,
    /// Absent for strategies that do not use weights.
    pub weights: Option<Weights>,
    pub models: ModelPair,
}

fn models_for<'a>(registry: &'a BTreeMap<Language, ModelPair>, language: &Language) -> Result<&'a ModelPair> {
    registry
        .get(language)
        .ok_or_else(|| Error::Config(format!("no models registered for language {language}")))
}

pub fn preset(system: SystemId, language: &Language, registry: &BTreeMap<Language, ModelPair>) -> Result<ResolvedPreset> {
    let needs_translation = !language.is_english();
    let (translate, weights, models) = match system.strategy {
        Strategy::Tr => {
            let w = if system.def { Weights::CONTEXT_ONLY } else { Weights::ALL_ONES };
            (needs_translation, Some(w), models_for(registry, &Language::En)?)
        }
        Strategy::LangSpec => {
            if system.def {
                return Err(Error::Config(
                    "definition augmentation cannot be combined with language-specific models (langspec-def)".into(),
                ));
            }
            (false, Some(Weights::ALL_ONES), models_for(registry, language)?)
        }
        Strategy::Gen | Strategy::Seg => (needs_translation, None, models_for(registry, &Language::En)?),
    };
    Ok(ResolvedPreset {
        system: system.to_string(),
        strategy: system.strategy,
        translate,
        augment: system.def,
        weights,
        models: models.clone(),
    })
}

/// The preset for `config.system`, with explicit config weights applied.
/// Under tr-def only `w_ic` is taken from the config; the gloss weights stay 0.
pub fn resolve(config: &SystemConfig, language: &Language) -> Result<ResolvedPreset> {
    let mut p = preset(config.system, language, &config.models)?;
    if let Some(w) = config.weights {
        w.validate()?;
        p.weights = match (config.system.strategy, config.system.def) {
            (Strategy::Gen | Strategy::Seg, _) => {
                log::warn!("weights are ignored by the {} system", config.system);
                None
            }
            (Strategy::Tr, true) => {
                if w.ig != 0.0 || w.cg != 0.0 {
                    log::warn!("{}: gloss weights forced to 0", config.system);
                }
                Some(Weights::new(w.ic, 0.0, 0.0)?)
            }
            _ => Some(w),
        };
    }
    Ok(p)
}
