//! Write-through embedding cache over a directory of store files.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::providers::store::EmbeddingStore;
use crate::providers::vector::{cosine, EmbeddingVector, Modality};
use crate::providers::EmbeddingProvider;

pub const STORE_EXTENSION: &str = "vwse";
pub const DEFAULT_BATCH_SIZE: usize = 64;

#[derive(Default)]
struct State {
    stores: Vec<EmbeddingStore>,
    /// model id -> index of the store receiving its new vectors
    writable: HashMap<String, usize>,
}

/// Serves embeddings from local stores, falling back to an upstream provider
/// for misses. Every upstream result is persisted before it is returned.
///
/// New vectors for model `m` go to `<dir>/<m>.vwse` (model id sanitized).
/// All `*.vwse` files in the directory are readable.
pub struct CachedProvider {
    dir: Option<PathBuf>,
    state: RwLock<State>,
    upstream: Option<Arc<dyn EmbeddingProvider>>,
    batch_size: usize,
    upstream_calls: AtomicUsize,
}

impl CachedProvider {
    /// A cache with no backing directory; nothing is persisted.
    pub fn in_memory(upstream: Option<Arc<dyn EmbeddingProvider>>) -> Self {
        CachedProvider {
            dir: None,
            state: RwLock::new(State::default()),
            upstream,
            batch_size: DEFAULT_BATCH_SIZE,
            upstream_calls: AtomicUsize::new(0),
        }
    }

    pub fn open(dir: &Path, upstream: Option<Arc<dyn EmbeddingProvider>>) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == STORE_EXTENSION))
            .collect();
        paths.sort();
        let cache = CachedProvider {
            dir: Some(dir.to_path_buf()),
            ..CachedProvider::in_memory(upstream)
        };
        for path in paths {
            cache.add_store(EmbeddingStore::open(path)?)?;
        }
        Ok(cache)
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self
    }

    /// Adds a read-only (or file-backed) store. Keys must not collide with
    /// keys already loaded.
    pub fn add_store(&self, store: EmbeddingStore) -> Result<()> {
        let mut state = self.state.write().expect("store lock");
        for r in store.records() {
            if state.stores.iter().any(|s| s.contains(&r.model_id, r.modality, &r.key)) {
                return Err(Error::Integrity(format!(
                    "key {}/{}/{:?} present in more than one store",
                    r.model_id, r.modality, r.key
                )));
            }
        }
        state.stores.push(store);
        Ok(())
    }

    /// Number of requests sent upstream so far.
    pub fn upstream_calls(&self) -> usize {
        self.upstream_calls.load(Ordering::SeqCst)
    }

    pub fn len(&self) -> usize {
        self.state.read().expect("store lock").stores.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, model_id: &str, modality: Modality, key: &str) -> Option<EmbeddingVector> {
        let state = self.state.read().expect("store lock");
        state
            .stores
            .iter()
            .find_map(|s| s.get(model_id, modality, key))
            .cloned()
    }

    fn store_path(&self, model_id: &str) -> Option<PathBuf> {
        let name: String = model_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect();
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{name}.{STORE_EXTENSION}")))
    }

    fn persist(&self, model_id: &str, vectors: Vec<EmbeddingVector>) -> Result<()> {
        let mut state = self.state.write().expect("store lock");
        let idx = match state.writable.get(model_id) {
            Some(&i) => i,
            None => {
                let target = self.store_path(model_id);
                let existing = target
                    .as_deref()
                    .and_then(|p| state.stores.iter().position(|s| s.path() == Some(p)));
                let i = match (existing, target) {
                    (Some(i), _) => i,
                    (None, Some(p)) => {
                        state.stores.push(EmbeddingStore::open(p)?);
                        state.stores.len() - 1
                    }
                    (None, None) => {
                        state.stores.push(EmbeddingStore::in_memory());
                        state.stores.len() - 1
                    }
                };
                state.writable.insert(model_id.to_string(), i);
                i
            }
        };
        for v in vectors {
            if state.stores.iter().any(|s| s.contains(&v.model_id, v.modality, &v.key)) {
                continue;
            }
            if let Some(d) = state.stores[idx].dim() {
                if d != v.dim() {
                    return Err(Error::Integrity(format!(
                        "service returned dim {} for {:?} but the {model_id} store has dim {d}",
                        v.dim(),
                        v.key
                    )));
                }
            }
            state.stores[idx].insert(v)?;
        }
        Ok(())
    }

    /// Returns one vector per input in input order, fetching misses upstream
    /// in batches and persisting them first.
    pub fn fetch(&self, model_id: &str, modality: Modality, inputs: &[String]) -> Result<Vec<EmbeddingVector>> {
        let mut seen = HashSet::new();
        let misses: Vec<String> = inputs
            .iter()
            .filter(|k| self.lookup(model_id, modality, k).is_none())
            .filter(|k| seen.insert(k.as_str()))
            .cloned()
            .collect();

        if !misses.is_empty() {
            let upstream = self.upstream.as_ref().ok_or_else(|| Error::MissingEmbedding {
                model_id: model_id.to_string(),
                modality: modality.to_string(),
                key: misses[0].clone(),
            })?;
            for chunk in misses.chunks(self.batch_size) {
                self.upstream_calls.fetch_add(1, Ordering::SeqCst);
                let got = upstream.embed(model_id, modality, chunk)?;
                if got.len() != chunk.len() {
                    return Err(Error::Integrity(format!(
                        "service returned {} vectors for {} inputs",
                        got.len(),
                        chunk.len()
                    )));
                }
                if let Some(first) = got.first() {
                    if got.iter().any(|v| v.dim() != first.dim()) {
                        return Err(Error::Integrity("service returned vectors of mixed dim".into()));
                    }
                }
                let vectors = got
                    .into_iter()
                    .zip(chunk)
                    .map(|(mut v, key)| {
                        v.model_id = model_id.to_string();
                        v.modality = modality;
                        v.key = key.clone();
                        v.validate().map(|_| v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.persist(model_id, vectors)?;
            }
        }

        inputs
            .iter()
            .map(|k| {
                self.lookup(model_id, modality, k).ok_or_else(|| Error::MissingEmbedding {
                    model_id: model_id.to_string(),
                    modality: modality.to_string(),
                    key: k.clone(),
                })
            })
            .collect()
    }

    /// Mixed-modality fetch; output order follows `items`.
    pub fn fetch_items(&self, model_id: &str, items: &[(Modality, String)]) -> Result<Vec<EmbeddingVector>> {
        for modality in [Modality::Text, Modality::Image] {
            let keys: Vec<String> = items
                .iter()
                .filter(|(m, _)| *m == modality)
                .map(|(_, k)| k.clone())
                .collect();
            if !keys.is_empty() {
                self.fetch(model_id, modality, &keys)?;
            }
        }
        items
            .iter()
            .map(|(m, k)| {
                self.lookup(model_id, *m, k).ok_or_else(|| Error::MissingEmbedding {
                    model_id: model_id.to_string(),
                    modality: m.to_string(),
                    key: k.clone(),
                })
            })
            .collect()
    }

    fn one(&self, model_id: &str, modality: Modality, key: &str) -> Result<EmbeddingVector> {
        if let Some(v) = self.lookup(model_id, modality, key) {
            return Ok(v);
        }
        let mut v = self.fetch(model_id, modality, &[key.to_string()])?;
        Ok(v.remove(0))
    }

    /// Vision-language similarity between an image and a text.
    pub fn sim_vl(&self, image_key: &str, text: &str, model_id: &str) -> Result<f64> {
        let image = self.one(model_id, Modality::Image, image_key)?;
        let text = self.one(model_id, Modality::Text, text)?;
        cosine(&image, &text)
    }

    /// Text-text similarity under a language model.
    pub fn sim_l(&self, text_a: &str, text_b: &str, model_id: &str) -> Result<f64> {
        let a = self.one(model_id, Modality::Text, text_a)?;
        let b = self.one(model_id, Modality::Text, text_b)?;
        cosine(&a, &b)
    }
}

impl EmbeddingProvider for CachedProvider {
    fn embed(&self, model_id: &str, modality: Modality, inputs: &[String]) -> Result<Vec<EmbeddingVector>> {
        self.fetch(model_id, modality, inputs)
    }
}
