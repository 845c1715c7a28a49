//! Dataset bundles, ticket-search pipelines, sweeps and reporting for
//! early-bird GCN tickets, on top of `gebt-core`.

pub mod bundle;
pub mod cli;
pub mod config;
pub mod error;
pub mod maskio;
pub mod output;
pub mod pipeline;

pub use bundle::{load_bundle, save_bundle};
pub use config::RunConfig;
pub use error::{GebtError, Result};
pub use pipeline::{
    run, run_baseline, run_geb, run_geb_drawn_at, run_joint_eb, run_random_prune, sweep, train_gcn, Pipeline,
    RunRecord, TraceEntry,
};
