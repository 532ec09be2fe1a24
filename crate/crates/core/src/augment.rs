//! Context augmentation with generated definitions, and context translation.
//!
//! Both go through a two-column TSV cache first and only call a service on
//! a miss. Cache files are appended to as results arrive.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::types::{Instance, Language};
use crate::wire::{GenerateRequest, HttpClient, TextResponse, TranslateRequest, GENERATE_PATH, TRANSLATE_PATH};

pub const PROMPT_HEADER: &str = "For each line, define the phrase:";
pub const DEFAULT_BATCH_SIZE: usize = 20;

/// Prompt for a batch of contexts: the header line, then one context per line.
pub fn build_prompt(contexts: &[String]) -> Result<String> {
    if contexts.is_empty() {
        return Err(Error::Validation("no contexts to define".into()));
    }
    let mut prompt = String::from(PROMPT_HEADER);
    for c in contexts {
        if c.contains(['\n', '\r']) {
            return Err(Error::Validation(format!("context {c:?} contains a newline")));
        }
        prompt.push('\n');
        prompt.push_str(c);
    }
    Ok(prompt)
}

/// Splits each response line at the first `": "` whose prefix matches one of
/// `contexts` (case-insensitively). Lines matching nothing are dropped; the
/// first definition seen for a context wins.
pub fn parse_definitions(response: &str, contexts: &[String]) -> Result<BTreeMap<String, String>> {
    let wanted: HashMap<String, &String> = contexts
        .iter()
        .rev()
        .map(|c| (c.trim().to_lowercase(), c))
        .collect();
    let mut out = BTreeMap::new();
    for line in response.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        for (i, _) in line.match_indices(": ") {
            let prefix = line[..i].trim().to_lowercase();
            if let Some(&ctx) = wanted.get(&prefix) {
                let def = normalize_definition(&line[i + 2..]);
                if !def.is_empty() && !out.contains_key(ctx) {
                    out.insert(ctx.clone(), def);
                }
                break;
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoDefinitions {
            raw: response.to_string(),
        });
    }
    Ok(out)
}

fn normalize_definition(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `"context: definition"`.
pub fn augmented_text(context: &str, definition: &str) -> String {
    format!("{context}: {definition}")
}

/// Two-column TSV map, optionally backed by a file that is appended to.
#[derive(Debug, Default)]
pub struct TextCache {
    entries: BTreeMap<String, String>,
    path: Option<PathBuf>,
}

impl TextCache {
    pub fn in_memory() -> Self {
        TextCache::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("cache", idx + 1, "expected two tab-separated columns"))?;
            if v.contains('\t') {
                return Err(Error::parse("cache", idx + 1, "more than two columns"));
            }
            if k.is_empty() || v.is_empty() {
                return Err(Error::parse("cache", idx + 1, "empty key or value"));
            }
            // first entry wins, matching append order
            entries.entry(k.to_string()).or_insert_with(|| v.to_string());
        }
        Ok(TextCache { entries, path: None })
    }

    /// Opens a cache file, creating nothing until the first insert.
    pub fn open(path: &Path) -> Result<Self> {
        let mut cache = if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            TextCache::parse(&text).map_err(|e| match e {
                Error::Parse { line, message, .. } => Error::parse(path.display().to_string(), line, message),
                other => other,
            })?
        } else {
            TextCache::in_memory()
        };
        cache.path = Some(path.to_path_buf());
        Ok(cache)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.entries.iter()
    }

    /// Inserts and appends to the backing file. Existing keys are kept.
    pub fn insert(&mut self, key: &str, value: &str) -> Result<bool> {
        if self.entries.contains_key(key) {
            return Ok(false);
        }
        let value = normalize_definition(value);
        if key.is_empty() || key.contains(['\t', '\n', '\r']) || value.is_empty() {
            return Err(Error::Validation(format!("cannot cache {key:?} -> {value:?}")));
        }
        if let Some(path) = &self.path {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::io(path, e))?;
            writeln!(f, "{key}\t{value}").map_err(|e| Error::io(path, e))?;
        }
        self.entries.insert(key.to_string(), value);
        Ok(true)
    }

    pub fn to_tsv(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
    }
}

pub trait TextGenerator: Send + Sync {
    fn generate(&self, prompt: &str) -> Result<String>;
}

pub trait Translator: Send + Sync {
    fn translate(&self, text: &str, source: &Language, target: &Language) -> Result<String>;
}

pub struct HttpTextGenerator(pub HttpClient);

impl TextGenerator for HttpTextGenerator {
    fn generate(&self, prompt: &str) -> Result<String> {
        let resp: TextResponse = self.0.post_json(
            GENERATE_PATH,
            &GenerateRequest {
                prompt: prompt.to_string(),
            },
        )?;
        Ok(resp.text)
    }
}

pub struct HttpTranslator(pub HttpClient);

impl Translator for HttpTranslator {
    fn translate(&self, text: &str, source: &Language, target: &Language) -> Result<String> {
        let resp: TextResponse = self.0.post_json(
            TRANSLATE_PATH,
            &TranslateRequest {
                text: text.to_string(),
                source: source.code().to_string(),
                target: target.code().to_string(),
            },
        )?;
        Ok(resp.text)
    }
}

/// Definition-based context augmentation.
pub struct Augmenter {
    cache: RwLock<TextCache>,
    service: Option<Arc<dyn TextGenerator>>,
    batch_size: usize,
    service_calls: AtomicUsize,
}

impl Augmenter {
    pub fn new(cache: TextCache, service: Option<Arc<dyn TextGenerator>>) -> Self {
        Augmenter {
            cache: RwLock::new(cache),
            service,
            batch_size: DEFAULT_BATCH_SIZE,
            service_calls: AtomicUsize::new(0),
        }
    }

    pub fn with_batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    pub fn service_calls(&self) -> usize {
        self.service_calls.load(Ordering::SeqCst)
    }

    pub fn cached(&self, context: &str) -> Option<String> {
        self.cache.read().expect("cache lock").get(context).map(str::to_string)
    }

    fn fill(&self, contexts: &[String]) -> Result<()> {
        let mut missing: Vec<String> = Vec::new();
        for c in contexts {
            if self.cached(c).is_none() && !missing.contains(c) {
                missing.push(c.clone());
            }
        }
        if missing.is_empty() {
            return Ok(());
        }
        let service = self
            .service
            .as_ref()
            .ok_or_else(|| Error::AugmentationUnavailable(missing[0].clone()))?;
        for chunk in missing.chunks(self.batch_size) {
            let prompt = build_prompt(chunk)?;
            self.service_calls.fetch_add(1, Ordering::SeqCst);
            let response = service.generate(&prompt)?;
            let defs = parse_definitions(&response, chunk)?;
            let mut cache = self.cache.write().expect("cache lock");
            // insert in request order so cache files are reproducible
            for c in chunk {
                if let Some(d) = defs.get(c) {
                    cache.insert(c, d)?;
                }
            }
        }
        Ok(())
    }

    /// Sets `augmented_context` to `"context: definition"`. Instances that
    /// are already augmented come back unchanged.
    pub fn augment_context(&self, instance: &Instance) -> Result<Instance> {
        if instance.augmented_context.is_some() {
            return Ok(instance.clone());
        }
        self.fill(std::slice::from_ref(&instance.context))?;
        self.apply(instance)
    }

    fn apply(&self, instance: &Instance) -> Result<Instance> {
        if instance.augmented_context.is_some() {
            return Ok(instance.clone());
        }
        let def = self
            .cached(&instance.context)
            .ok_or_else(|| Error::AugmentationUnavailable(instance.context.clone()))?;
        let mut out = instance.clone();
        out.augmented_context = Some(augmented_text(&instance.context, &def));
        Ok(out)
    }

    /// Batched augmentation; output order follows input order.
    pub fn augment_batch(&self, instances: &[Instance]) -> Result<Vec<Instance>> {
        let contexts: Vec<String> = instances
            .iter()
            .filter(|i| i.augmented_context.is_none())
            .map(|i| i.context.clone())
            .collect();
        self.fill(&contexts)?;
        instances.iter().map(|i| self.apply(i)).collect()
    }
}

/// Translation of non-English contexts into the target language.
pub struct ContextTranslator {
    cache: RwLock<TextCache>,
    service: Option<Arc<dyn Translator>>,
    target: Language,
    service_calls: AtomicUsize,
}

impl ContextTranslator {
    pub fn new(cache: TextCache, service: Option<Arc<dyn Translator>>) -> Self {
        ContextTranslator {
            cache: RwLock::new(cache),
            service,
            target: Language::En,
            service_calls: AtomicUsize::new(0),
        }
    }

    pub fn service_calls(&self) -> usize {
        self.service_calls.load(Ordering::SeqCst)
    }

    /// Target-language instances pass through. Otherwise the context is
    /// replaced and the original kept in `original_context`.
    pub fn translate_context(&self, instance: &Instance) -> Result<Instance> {
        if instance.language == self.target || instance.original_context.is_some() {
            return Ok(instance.clone());
        }
        let cached = self
            .cache
            .read()
            .expect("cache lock")
            .get(&instance.context)
            .map(str::to_string);
        let translated = match cached {
            Some(t) => t,
            None => {
                let service = self
                    .service
                    .as_ref()
                    .ok_or_else(|| Error::TranslationUnavailable(instance.context.clone()))?;
                self.service_calls.fetch_add(1, Ordering::SeqCst);
                let t = service.translate(&instance.context, &instance.language, &self.target)?;
                let mut cache = self.cache.write().expect("cache lock");
                cache.insert(&instance.context, &t)?;
                cache.get(&instance.context).unwrap_or(&t).to_string()
            }
        };
        let mut out = instance.clone();
        out.original_context = Some(std::mem::replace(&mut out.context, translated));
        out.focus_not_in_context = !out.context.to_lowercase().contains(&out.focus_word.to_lowercase());
        Ok(out)
    }

    pub fn translate_batch(&self, instances: &[Instance]) -> Result<Vec<Instance>> {
        instances.iter().map(|i| self.translate_context(i)).collect()
    }
}
