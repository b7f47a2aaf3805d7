//! Monte Carlo experiments over random circuit codes, finite-size scaling
//! fits with jackknife errors, and the hashing-bound reference.

pub mod config;
pub mod experiments;
pub mod fit;
pub mod hashing;
pub mod record;

pub use config::{ExperimentConfig, RunConfig};
pub use experiments::{run_experiment, worker_count, Decoder};
pub use fit::{fit_points, fit_scaling_ansatz, fit_with_errors, jackknife_pc, truncate_window, DataPoint, FitOptions, ScalingFit};
pub use hashing::{hashing_bound, hashing_rate};
pub use record::{ExperimentKind, ExperimentRecord, Point, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Core(#[from] rcqec_core::Error),
    #[error(transparent)]
    Statmech(#[from] rcqec_statmech::StatmechError),
    #[error(transparent)]
    Ft(#[from] rcqec_ft::FtError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("record schema: {0}")]
    Schema(String),
    #[error("degenerate fit data: {0}")]
    Degenerate(String),
    #[error("hashing bound has no root for rate {0}")]
    NoRoot(f64),
}
