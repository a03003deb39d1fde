//! Seeded, parallel experiment drivers.
//!
//! Every run is a function of its [`ExperimentConfig`]. Samples are addressed by
//! `(model, n, index)`; the cell seed is `derive_seed(root, [model, n])` and sample `i` uses
//! `derive_seed(cell, [i])`, so results never depend on the worker count or on which other
//! models and orders share the run. Rows come back in `(model, n, panel / index)` order.

mod config;
mod fig1;
mod fig2;
mod fig3;
mod regression;

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::attack::AttackError;
use crate::ec::EcError;
use crate::generators::GraphModel;
use crate::graph::GraphError;
use crate::sampling::derive_seed;

pub use config::{
    default_workers, parse_key_values, ExperimentConfig, ExperimentKind, Fig1Panel, ModelOverrides,
    NGrid, PenaltyRule, DEFAULT_SEED, WORKERS_ENV,
};
pub use fig1::{run_fig1, Fig1Output, Fig1Row};
pub use fig2::{attack_sample, run_fig2, AttackSample, Fig2Output, Fig2Row};
pub use fig3::{fig3_from_rows, run_fig3, Fig3Output, Fig3Row, Fig3Variant};
pub use regression::{fit_power_law, linear_fit, RegressionResult};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("regression: {0}")]
    Regression(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ec(#[from] EcError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Stable index of a model inside the seed path.
fn model_index(model: GraphModel) -> u64 {
    GraphModel::ALL
        .iter()
        .position(|&m| m == model)
        .expect("every model is listed") as u64
}

/// Seed shared by all samples of one `(model, n)` cell.
pub fn cell_seed(root: u64, model: GraphModel, n: usize) -> u64 {
    derive_seed(root, &[model_index(model), n as u64])
}

pub fn sample_seed(cell: u64, index: usize) -> u64 {
    derive_seed(cell, &[index as u64])
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))
}

/// Serializes rows with a header into CSV bytes.
pub fn to_csv_bytes<R: serde::Serialize>(rows: &[R]) -> Result<Vec<u8>, ExperimentError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .into_inner()
        .map_err(|e| ExperimentError::Io(e.into_error()))
}

pub fn write_csv<R: serde::Serialize>(path: &Path, rows: &[R]) -> Result<(), ExperimentError> {
    std::fs::write(path, to_csv_bytes(rows)?)?;
    Ok(())
}

pub fn read_csv<R: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<R>, ExperimentError> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

/// `key=value` lines describing how a dataset was produced.
pub fn metadata_text(config: &ExperimentConfig, counts: &[(&str, usize)]) -> String {
    let models: Vec<_> = config.models.iter().map(|m| m.tag()).collect();
    let mut lines = vec![
        format!("seed={}", config.root_seed),
        format!("models={}", models.join(",")),
        format!("n-grid={}", config.n_grid),
        format!("samples={}", config.samples_per_n),
        format!("t-pen={}", config.t_pen),
        format!("reflection={}", config.reflection),
        "seed-derivation=cell=splitmix(root,[model_index,n]); sample=splitmix(cell,[i])".into(),
        "disconnected-policy=redraw graph from the sample stream, counted".into(),
    ];
    if config.experiment == ExperimentKind::Fig1 {
        let panels: Vec<_> = config.panels.iter().map(|p| p.name.as_str()).collect();
        lines.push(format!("panels={}", panels.join(",")));
    }
    if config.experiment != ExperimentKind::Fig1 {
        lines.push(
            "anchor-policy=uniform vertex then uniform 2-vertex configuration; \
             up to n vertex redraws, then a fresh graph"
                .into(),
        );
    }
    lines.extend(counts.iter().map(|(k, v)| format!("{k}={v}")));
    lines.push(String::new());
    lines.join("\n")
}
