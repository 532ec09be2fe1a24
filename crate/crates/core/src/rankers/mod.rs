//! Candidate ranking strategies and system presets.

mod algorithm;
mod gen;
mod pipeline;
mod preset;
mod seg;

pub use algorithm::{rank_order, score_instance, CandidateScore, Prediction, ScoreBreakdown, SimilarityTable};
pub use gen::{gen_score, generated_key, generated_keys};
pub use pipeline::{needs_glosses, predictions_from_tables, Counters, DatasetRun, Engine, GenInputs};
pub use preset::{preset, resolve, ResolvedPreset};
pub use seg::{load_mask_values, parse_mask_values, seg_select, MaskValues};
