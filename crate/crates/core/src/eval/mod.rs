//! Splitting, classification metrics and the time-horizon harness.

mod metrics;
mod pipeline;
mod split;
mod sweep;

pub use metrics::{classification_report, ClassMetrics, ClassReport};
pub use pipeline::{
    discretize_pedestrians, discretize_vehicles, embedded_rules, fit_frames, intern_ontology, labeled_predictions,
    split_groups, training_store, FittedModel, PipelineConfig,
};
pub use split::{split_no_unseen, unseen_symbols, SplitSpec};
pub use sweep::{horizon_sweep, HorizonRow, HorizonTable, SweepOutcome, VEHICLE_REPORT_LABELS};
