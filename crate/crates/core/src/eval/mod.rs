//! Metrics, weight grid search, dataset statistics and reports.

mod grid;
mod metrics;
mod report;
mod stats;

pub use grid::{binary_weight_grid, gen_sweep, grid_search, GridRow, SweepPoint};
pub use metrics::{hit_rate, macro_average, mrr, pearson, round1};
pub use report::{predictions_tsv, ConfigEcho, EvalReport, LanguageBlock};
pub use stats::{dataset_stats, DatasetStats};

/// Generated-image counts evaluated by the generation sweep.
pub const GEN_SWEEP_COUNTS: [usize; 4] = [1, 5, 10, 15];
