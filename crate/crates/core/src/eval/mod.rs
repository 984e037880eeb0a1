//! End-to-end pipeline, scoring and hyper-parameter sweeps.

mod metrics;
mod pipeline;
pub mod plot;
mod sweep;

pub use metrics::{evaluate, summarize, InvalidPolicy, Metrics};
pub use pipeline::{complete, Completion, Intermediates, PipelineConfig};
pub use plot::plot_relative_accuracy;
pub use sweep::{
    format_g6, patch_grid, relative_accuracy, run_samples, sweep_baseline, sweep_patches, PatchCell,
    SweepReport, SweepRow,
};
