//! Visual word sense disambiguation: rank candidate images for a focus word
//! in a short context.
//!
//! The main scorer combines three cosine similarities (image-context,
//! image-gloss, context-gloss) under non-negative weights; alternatives rank
//! by similarity to generated images or by segmentation mask values.
//! Embeddings come from a write-through file cache in front of an HTTP
//! inference service or a deterministic in-process mock.

pub mod augment;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod knowledge;
pub mod providers;
pub mod rankers;
pub mod testkit;
pub mod types;
pub mod wire;

pub use config::{SystemConfig, SystemId};
pub use error::{Error, ErrorClass, Result};
pub use types::{Dataset, Instance, Language, Split, Weights, CANDIDATES_PER_INSTANCE};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
