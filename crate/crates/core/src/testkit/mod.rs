//! Deterministic stand-ins for the external models, used by `--mock` runs
//! and by the test suites.
//!
//! Mock embeddings are pinned so they are identical across processes and
//! platforms:
//!
//! 1. SHA-256 over `len_u64_le(field) || field` for the model id, the
//!    modality name (`"text"`/`"image"`) and the input bytes, followed by
//!    the seed as a little-endian u64;
//! 2. the first 8 digest bytes (little-endian) seed a SplitMix64 generator;
//! 3. each component is `(next_u64() >> 11) * 2^-53 * 2 - 1`;
//! 4. the vector is L2-normalized in f64 and stored as f32.
//!
//! Fixtures, splits and the synthetic builders use ChaCha8.

mod fixture;
mod server;

use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use sha2::{Digest, Sha256};

pub use fixture::{make_fixture_dataset, Fixture, PlantedSignal, FIXTURE_DIM, FIXTURE_L_MODEL, FIXTURE_VL_MODEL};
pub use server::{MockServer, MockServerConfig};

use crate::augment::{TextGenerator, Translator, PROMPT_HEADER};
use crate::error::Result;
use crate::providers::{EmbeddingVector, Modality};
use crate::types::Language;

fn hash_fields(fields: &[&[u8]], seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    for f in fields {
        h.update((f.len() as u64).to_le_bytes());
        h.update(f);
    }
    h.update(seed.to_le_bytes());
    let digest = h.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    out
}

fn seed_of(digest: &[u8; 32]) -> u64 {
    let mut b = [0u8; 8];
    b.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(b)
}

fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unit-norm pseudo-random vector determined by all of its arguments.
pub fn mock_embed(model_id: &str, modality: Modality, input: &[u8], seed: u64, dim: usize) -> EmbeddingVector {
    assert!(dim > 0, "mock_embed needs dim > 0");
    let digest = hash_fields(&[model_id.as_bytes(), modality.as_str().as_bytes(), input], seed);
    let mut rng = SplitMix64::seed_from_u64(seed_of(&digest));
    let mut raw: Vec<f64> = (0..dim).map(|_| unit_interval(rng.next_u64()) * 2.0 - 1.0).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        raw[0] = 1.0;
    } else {
        raw.iter_mut().for_each(|x| *x /= norm);
    }
    EmbeddingVector {
        model_id: model_id.to_string(),
        modality,
        key: String::from_utf8_lossy(input).into_owned(),
        values: raw.into_iter().map(|x| x as f32).collect(),
    }
}

/// Deterministic definition for a context.
pub fn mock_definition(context: &str) -> String {
    let digest = hash_fields(&[b"definition", context.as_bytes()], 0);
    format!("a mock sense of {context} (#{:02x}{:02x})", digest[0], digest[1])
}

/// Answers a definition prompt with one `"<context>: <definition>"` line per
/// context line.
pub fn mock_generate(prompt: &str) -> String {
    prompt
        .lines()
        .filter(|l| !l.trim().is_empty() && l.trim() != PROMPT_HEADER)
        .map(|c| format!("{c}: {}", mock_definition(c)))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn mock_translate(text: &str, source: &str, target: &str) -> String {
    format!("{text} [{source}>{target}]")
}

/// Mean mask value in `[0, 1)` for an (image, context) pair.
pub fn mock_mask_value(context: &str, image: &str, seed: u64) -> f64 {
    unit_interval(seed_of(&hash_fields(&[b"mask", context.as_bytes(), image.as_bytes()], seed)))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MockTextGenerator;

impl TextGenerator for MockTextGenerator {
    fn generate(&self, prompt: &str) -> Result<String> {
        Ok(mock_generate(prompt))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MockTranslator;

impl Translator for MockTranslator {
    fn translate(&self, text: &str, source: &Language, target: &Language) -> Result<String> {
        Ok(mock_translate(text, source.code(), target.code()))
    }
}
