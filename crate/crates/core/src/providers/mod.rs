//! Embedding acquisition and the two similarity functions.
//!
//! Both similarities are plain cosine over embeddings: `sim_vl` pairs an
//! image with a text under a vision-language model, `sim_l` pairs two texts
//! under a text encoder.

mod cache;
mod store;
mod vector;

use std::borrow::Cow;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use base64::Engine;

pub use cache::{CachedProvider, DEFAULT_BATCH_SIZE, STORE_EXTENSION};
pub use store::{decode as decode_store, EmbeddingStore, StoreKey, FORMAT_VERSION, HEADER_LEN, MAGIC};
pub use vector::{cosine, cosine_slices, EmbeddingVector, Modality};

use crate::error::{Error, Result};
use crate::testkit::mock_embed;
use crate::wire::{EmbedRequest, EmbedResponse, HttpClient, EMBED_PATH};

pub trait EmbeddingProvider: Send + Sync {
    /// One vector per input, in input order. Text inputs are the texts
    /// themselves; image inputs are image ids.
    fn embed(&self, model_id: &str, modality: Modality, inputs: &[String]) -> Result<Vec<EmbeddingVector>>;
}

/// How an image id turns into the bytes sent to an encoder.
#[derive(Debug, Clone, PartialEq)]
pub enum ImageSource {
    /// `<dir>/<image id>`
    Directory(PathBuf),
    /// The id's own UTF-8 bytes; used when no image files exist (mock runs).
    IdBytes,
}

impl ImageSource {
    pub fn bytes(&self, image_id: &str) -> Result<Vec<u8>> {
        match self {
            ImageSource::IdBytes => Ok(image_id.as_bytes().to_vec()),
            ImageSource::Directory(dir) => {
                if image_id.contains("..") || image_id.starts_with('/') {
                    return Err(Error::Validation(format!("refusing image id {image_id:?}")));
                }
                let path = dir.join(image_id);
                fs::read(&path).map_err(|e| Error::io(path, e))
            }
        }
    }
}

/// Deterministic in-process encoder built on [`mock_embed`].
#[derive(Debug, Clone)]
pub struct MockProvider {
    pub seed: u64,
    pub dim: usize,
    pub images: ImageSource,
    /// Embed images and texts in one space, so an image whose bytes equal a
    /// text's bytes gets the same vector.
    pub align_modalities: bool,
}

impl MockProvider {
    pub fn new(seed: u64, dim: usize) -> Self {
        MockProvider {
            seed,
            dim,
            images: ImageSource::IdBytes,
            align_modalities: false,
        }
    }
}

impl EmbeddingProvider for MockProvider {
    fn embed(&self, model_id: &str, modality: Modality, inputs: &[String]) -> Result<Vec<EmbeddingVector>> {
        let tag = if self.align_modalities { Modality::Text } else { modality };
        inputs
            .iter()
            .map(|input| {
                let bytes = match modality {
                    Modality::Text => input.as_bytes().to_vec(),
                    Modality::Image => self.images.bytes(input)?,
                };
                let mut v = mock_embed(model_id, tag, &bytes, self.seed, self.dim);
                v.modality = modality;
                v.key = input.clone();
                Ok(v)
            })
            .collect()
    }
}

/// Remote encoder speaking the `/v1/embed` protocol.
#[derive(Debug, Clone)]
pub struct HttpEmbedClient {
    client: HttpClient,
    images: ImageSource,
}

impl HttpEmbedClient {
    pub fn new(client: HttpClient, images: ImageSource) -> Self {
        HttpEmbedClient { client, images }
    }
}

impl EmbeddingProvider for HttpEmbedClient {
    fn embed(&self, model_id: &str, modality: Modality, inputs: &[String]) -> Result<Vec<EmbeddingVector>> {
        let wire_inputs = match modality {
            Modality::Text => inputs.to_vec(),
            Modality::Image => inputs
                .iter()
                .map(|id| {
                    self.images
                        .bytes(id)
                        .map(|b| base64::engine::general_purpose::STANDARD.encode(b))
                })
                .collect::<Result<_>>()?,
        };
        let req = EmbedRequest {
            model: model_id.to_string(),
            modality,
            inputs: wire_inputs,
        };
        let resp: EmbedResponse = self.client.post_json(EMBED_PATH, &req)?;
        if resp.vectors.len() != inputs.len() {
            return Err(Error::Integrity(format!(
                "{}: {} vectors for {} inputs",
                self.client.base_url(),
                resp.vectors.len(),
                inputs.len()
            )));
        }
        resp.vectors
            .into_iter()
            .zip(inputs)
            .map(|(values, key)| {
                if values.len() != resp.dim {
                    return Err(Error::Integrity(format!(
                        "vector for {key:?} has length {} but response dim is {}",
                        values.len(),
                        resp.dim
                    )));
                }
                EmbeddingVector::new(model_id, modality, key.clone(), values)
                    .map_err(|e| Error::Integrity(e.to_string()))
            })
            .collect()
    }
}

/// Similarity functions bound to a model pair, with optional truncation of
/// text inputs.
#[derive(Clone)]
pub struct Similarity {
    pub provider: Arc<CachedProvider>,
    pub vl_model: String,
    pub l_model: String,
    pub max_input_chars: Option<usize>,
}

impl Similarity {
    pub fn new(provider: Arc<CachedProvider>, vl_model: impl Into<String>, l_model: impl Into<String>) -> Self {
        Similarity {
            provider,
            vl_model: vl_model.into(),
            l_model: l_model.into(),
            max_input_chars: None,
        }
    }

    pub fn text<'a>(&self, text: &'a str) -> Cow<'a, str> {
        match self.max_input_chars {
            Some(max) if text.chars().count() > max => Cow::Owned(text.chars().take(max).collect()),
            _ => Cow::Borrowed(text),
        }
    }

    pub fn is_truncated(&self, text: &str) -> bool {
        matches!(self.text(text), Cow::Owned(_))
    }

    pub fn sim_vl(&self, image: &str, text: &str) -> Result<f64> {
        self.provider.sim_vl(image, &self.text(text), &self.vl_model)
    }

    pub fn sim_l(&self, a: &str, b: &str) -> Result<f64> {
        self.provider.sim_l(&self.text(a), &self.text(b), &self.l_model)
    }

    /// Batch-fetches everything the scorer will ask for.
    pub fn prefetch(&self, images: &[String], vl_texts: &[String], l_texts: &[String]) -> Result<()> {
        let vl: Vec<String> = vl_texts.iter().map(|t| self.text(t).into_owned()).collect();
        let l: Vec<String> = l_texts.iter().map(|t| self.text(t).into_owned()).collect();
        if !images.is_empty() {
            self.provider.fetch(&self.vl_model, Modality::Image, images)?;
        }
        if !vl.is_empty() {
            self.provider.fetch(&self.vl_model, Modality::Text, &vl)?;
        }
        if !l.is_empty() {
            self.provider.fetch(&self.l_model, Modality::Text, &l)?;
        }
        Ok(())
    }
}
