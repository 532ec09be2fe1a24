//! Ranking by similarity to images generated from the context.
//!
//! Generated-image embeddings live in an ordinary embedding store under the
//! vision-language model id with modality `image`, keyed by
//! [`generated_key`].

use sha2::{Digest, Sha256};

use super::algorithm::{CandidateScore, ScoreBreakdown};
use crate::config::GenAggregation;
use crate::error::{Error, Result};
use crate::providers::{cosine, EmbeddingVector};

/// Store key of the `k`-th generated image for `context`:
/// `gen:<first 16 hex digits of sha256(context)>:<k>`.
pub fn generated_key(context: &str, k: usize) -> String {
    let digest = Sha256::digest(context.as_bytes());
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("gen:{hex}:{k}")
}

pub fn generated_keys(context: &str, count: usize) -> Vec<String> {
    (0..count).map(|k| generated_key(context, k)).collect()
}

/// Scores each candidate by the mean (or max) cosine to the generated
/// vectors. `candidates` pairs each image id with its embedding.
pub fn gen_score(
    candidates: &[(String, EmbeddingVector)],
    generated: &[EmbeddingVector],
    aggregation: GenAggregation,
) -> Result<ScoreBreakdown> {
    if generated.is_empty() {
        return Err(Error::Config("no generated images to compare against".into()));
    }
    let candidates = candidates
        .iter()
        .map(|(image, v)| {
            let sims = generated.iter().map(|g| cosine(v, g)).collect::<Result<Vec<_>>>()?;
            let total = match aggregation {
                GenAggregation::Mean => sims.iter().sum::<f64>() / sims.len() as f64,
                GenAggregation::Max => sims.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            };
            Ok(CandidateScore {
                image: image.clone(),
                total,
                s_ic: None,
                s_ig: None,
                s_cg: None,
                best_gloss: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreBreakdown { candidates })
}
