//! Command-line front end for `kg-bohm-core`: wave-function configs, CSV
//! and JSON writers, run manifests and rayon drivers for the bulk analyses.

pub mod cli;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod parallel;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("config is not valid JSON for a wave function: {0}")]
    ConfigSyntax(#[source] serde_json::Error),
    #[error("invalid wave function config: {0}")]
    InvalidConfig(#[source] kg_bohm_core::Error),
    #[error("invalid value for {flag}: {reason}")]
    InvalidArgument { flag: &'static str, reason: String },
    #[error("{0}")]
    Compute(#[source] kg_bohm_core::Error),
    #[error("velocity is not defined at the starting point (verdict {0})")]
    IllDefinedStart(kg_bohm_core::Verdict),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing JSON: {0}")]
    Json(#[source] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}
