//! End-to-end ranking of a dataset: context preparation (translation,
//! definitions), embedding prefetch, then parallel scoring.
//!
//! All embeddings are fetched serially in instance order before scoring
//! starts, so cache files and outputs do not depend on the worker count.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::algorithm::{Prediction, SimilarityTable};
use super::gen::{gen_score, generated_keys};
use super::preset::{resolve, ResolvedPreset};
use super::seg::{seg_select, MaskValues};
use crate::augment::{Augmenter, ContextTranslator};
use crate::config::{ModelPair, Strategy, SystemConfig};
use crate::error::{Error, Result};
use crate::knowledge::{select_glosses, SenseInventory};
use crate::providers::{CachedProvider, EmbeddingVector, Modality, Similarity};
use crate::types::{Dataset, Instance, Weights};

/// Things worth knowing about a run that do not change its predictions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// Instances scored without glosses because the focus word had none.
    pub gloss_fallbacks: usize,
    /// Distinct texts cut to `max_input_chars` before embedding.
    pub truncations: usize,
    pub focus_not_in_context: usize,
    pub translated: usize,
    pub augmented: usize,
}

impl Counters {
    pub fn add(&mut self, other: &Counters) {
        self.gloss_fallbacks += other.gloss_fallbacks;
        self.truncations += other.truncations;
        self.focus_not_in_context += other.focus_not_in_context;
        self.translated += other.translated;
        self.augmented += other.augmented;
    }
}

#[derive(Debug, Clone)]
pub struct DatasetRun {
    pub preset: ResolvedPreset,
    /// Instances as scored (translated and/or augmented).
    pub instances: Vec<Instance>,
    pub predictions: Vec<Prediction>,
    pub counters: Counters,
}

/// Candidate and generated-image vectors for one instance.
pub struct GenInputs {
    pub candidates: Vec<(String, EmbeddingVector)>,
    pub generated: Vec<EmbeddingVector>,
}

pub struct Engine {
    pub config: SystemConfig,
    pub embeddings: Arc<CachedProvider>,
    pub inventory: Option<Arc<SenseInventory>>,
    pub augmenter: Option<Arc<Augmenter>>,
    pub translator: Option<Arc<ContextTranslator>>,
    /// Mask values per dataset name.
    pub masks: BTreeMap<String, Arc<MaskValues>>,
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(config: SystemConfig, embeddings: Arc<CachedProvider>, jobs: usize) -> Result<Self> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Engine {
            config,
            embeddings,
            inventory: None,
            augmenter: None,
            translator: None,
            masks: BTreeMap::new(),
            pool,
        })
    }

    pub fn with_inventory(mut self, inventory: Arc<SenseInventory>) -> Self {
        self.inventory = Some(inventory);
        self
    }

    pub fn with_augmenter(mut self, augmenter: Arc<Augmenter>) -> Self {
        self.augmenter = Some(augmenter);
        self
    }

    pub fn with_translator(mut self, translator: Arc<ContextTranslator>) -> Self {
        self.translator = Some(translator);
        self
    }

    pub fn with_masks(mut self, dataset: impl Into<String>, masks: Arc<MaskValues>) -> Self {
        self.masks.insert(dataset.into(), masks);
        self
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn similarity(&self, models: &ModelPair) -> Similarity {
        let mut sim = Similarity::new(Arc::clone(&self.embeddings), models.vl.clone(), models.l.clone());
        sim.max_input_chars = self.config.max_input_chars;
        sim
    }

    pub fn glosses(&self, instance: &Instance) -> Vec<String> {
        self.inventory
            .as_ref()
            .map(|inv| select_glosses(&instance.focus_word, inv))
            .unwrap_or_default()
    }

    /// Applies translation and augmentation as the preset asks.
    pub fn prepare(&self, dataset: &Dataset, preset: &ResolvedPreset) -> Result<(Vec<Instance>, Counters)> {
        let mut counters = Counters::default();
        let mut instances = dataset.instances.clone();
        if preset.translate {
            instances = match &self.translator {
                Some(t) => t.translate_batch(&instances)?,
                None => return Err(Error::TranslationUnavailable(instances[0].context.clone())),
            };
            counters.translated = instances.iter().filter(|i| i.original_context.is_some()).count();
        }
        if preset.augment {
            instances = match &self.augmenter {
                Some(a) => a.augment_batch(&instances)?,
                None => return Err(Error::AugmentationUnavailable(instances[0].context.clone())),
            };
            counters.augmented = instances.len();
        }
        counters.focus_not_in_context = instances.iter().filter(|i| i.focus_not_in_context).count();
        Ok((instances, counters))
    }

    /// Similarity tables for weighted scoring. With `with_glosses` false the
    /// gloss set is left empty.
    pub fn tables(
        &self,
        instances: &[Instance],
        models: &ModelPair,
        with_glosses: bool,
    ) -> Result<(Vec<SimilarityTable>, Counters)> {
        let sim = self.similarity(models);
        let glosses: Vec<Vec<String>> = instances
            .iter()
            .map(|i| if with_glosses { self.glosses(i) } else { Vec::new() })
            .collect();
        let mut counters = Counters {
            gloss_fallbacks: if with_glosses { glosses.iter().filter(|g| g.is_empty()).count() } else { 0 },
            ..Counters::default()
        };

        let mut images = Vec::new();
        let mut vl_texts = Vec::new();
        let mut l_texts = Vec::new();
        let mut seen = HashSet::new();
        for (inst, gs) in instances.iter().zip(&glosses) {
            images.extend(inst.candidates.iter().cloned());
            let ctx = inst.scoring_context().to_string();
            vl_texts.push(ctx.clone());
            vl_texts.extend(gs.iter().cloned());
            if !gs.is_empty() {
                l_texts.push(ctx);
                l_texts.extend(gs.iter().cloned());
            }
        }
        for t in vl_texts.iter().chain(&l_texts) {
            if seen.insert(t.as_str()) && sim.is_truncated(t) {
                counters.truncations += 1;
            }
        }
        sim.prefetch(&dedup(images), &dedup(vl_texts), &dedup(l_texts))?;

        let tables = self.pool.install(|| {
            instances
                .par_iter()
                .zip(glosses.par_iter())
                .map(|(inst, gs)| {
                    SimilarityTable::compute(
                        inst,
                        inst.scoring_context(),
                        gs,
                        |i, t| sim.sim_vl(i, t),
                        |a, b| sim.sim_l(a, b),
                    )
                })
                .collect::<Result<Vec<_>>>()
        })?;
        Ok((tables, counters))
    }

    /// Candidate vectors and the first `count` generated vectors per instance.
    pub fn gen_inputs(&self, instances: &[Instance], models: &ModelPair, count: usize) -> Result<Vec<GenInputs>> {
        let mut keys = Vec::new();
        for inst in instances {
            keys.extend(inst.candidates.iter().cloned());
            keys.extend(generated_keys(inst.scoring_context(), count));
        }
        self.embeddings.fetch(&models.vl, Modality::Image, &dedup(keys))?;
        instances
            .iter()
            .map(|inst| {
                let candidates = inst
                    .candidates
                    .iter()
                    .map(|c| Ok((c.clone(), self.image_vector(&models.vl, c)?)))
                    .collect::<Result<Vec<_>>>()?;
                let generated = generated_keys(inst.scoring_context(), count)
                    .iter()
                    .map(|k| self.image_vector(&models.vl, k))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GenInputs { candidates, generated })
            })
            .collect()
    }

    fn image_vector(&self, model: &str, key: &str) -> Result<EmbeddingVector> {
        self.embeddings
            .lookup(model, Modality::Image, key)
            .ok_or_else(|| Error::MissingEmbedding {
                model_id: model.to_string(),
                modality: Modality::Image.as_str().to_string(),
                key: key.to_string(),
            })
    }

    /// Ranks every instance of `dataset` under the configured system.
    pub fn run(&self, dataset: &Dataset) -> Result<DatasetRun> {
        let preset = resolve(&self.config, &dataset.language)?;
        let (instances, mut counters) = self.prepare(dataset, &preset)?;
        let predictions = match preset.strategy {
            Strategy::Tr | Strategy::LangSpec => {
                let weights = preset.weights.expect("weighted strategies carry weights");
                let (tables, c) = self.tables(&instances, &preset.models, needs_glosses(&weights))?;
                counters.add(&c);
                predictions_from_tables(&tables, &instances, &weights)?
            }
            Strategy::Gen => {
                let inputs = self.gen_inputs(&instances, &preset.models, self.config.gen.count)?;
                inputs
                    .iter()
                    .zip(&instances)
                    .enumerate()
                    .map(|(k, (g, inst))| {
                        let b = gen_score(&g.candidates, &g.generated, self.config.gen.aggregation)?;
                        Prediction::from_totals(k, inst, &b.totals())
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Strategy::Seg => {
                let masks = self.masks.get(&dataset.name).ok_or_else(|| {
                    Error::Config(format!("the seg system needs mask values for dataset {:?}", dataset.name))
                })?;
                let empty = Default::default();
                instances
                    .iter()
                    .enumerate()
                    .map(|(k, inst)| seg_select(k, inst, masks.get(&k).unwrap_or(&empty)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(DatasetRun {
            preset,
            instances,
            predictions,
            counters,
        })
    }
}

pub fn needs_glosses(weights: &Weights) -> bool {
    weights.ig != 0.0 || weights.cg != 0.0
}

pub fn predictions_from_tables(
    tables: &[SimilarityTable],
    instances: &[Instance],
    weights: &Weights,
) -> Result<Vec<Prediction>> {
    tables
        .iter()
        .zip(instances)
        .enumerate()
        .map(|(k, (t, inst))| Prediction::from_totals(k, inst, &t.score(weights).totals()))
        .collect()
}

fn dedup(items: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|s| seen.insert(s.clone())).collect()
}
