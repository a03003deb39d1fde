use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ec::{find_ec_within_distance, formation_sample, FormationEstimate};
use crate::generators::GraphModel;

use super::{cell_seed, pool, sample_seed, ExperimentConfig, ExperimentError, ExperimentKind};

/// One formation-probability estimate. `seed` is the cell seed: passing it to
/// [`crate::ec::ec_formation_probability`] with the panel's orders and distance reproduces the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub model: GraphModel,
    pub n: usize,
    pub panel: String,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Output {
    pub rows: Vec<Fig1Row>,
    /// Disconnected draws replaced across the whole run.
    pub regenerations: usize,
}

/// Each `(graph, vertex)` draw is scored against every panel, so panels of one cell are
/// estimated on the same sample.
pub fn run_fig1(config: &ExperimentConfig) -> Result<Fig1Output, ExperimentError> {
    config.validate()?;
    if config.experiment != ExperimentKind::Fig1 {
        return Err(ExperimentError::Config(
            "run_fig1 needs a fig1 configuration".into(),
        ));
    }
    let root = config.root_seed;
    let cells: Vec<(GraphModel, usize, u64)> = config
        .models
        .iter()
        .flat_map(|&m| {
            let ns = config.n_grid.values();
            ns.into_iter().map(move |n| (m, n, cell_seed(root, m, n)))
        })
        .collect();
    let samples = config.samples_per_n;
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..samples).map(move |i| (c, i)))
        .collect();

    let outcomes = pool(config.workers)?.install(|| {
        tasks
            .par_iter()
            .map(|&(c, i)| {
                let (model, n, seed) = cells[c];
                let params = config.model_params(model);
                let (graph, v, regen) = formation_sample(&params, n, sample_seed(seed, i))?;
                let hits: Vec<bool> = config
                    .panels
                    .iter()
                    .map(|p| !find_ec_within_distance(&graph, v, p.distance, &p.orders).is_empty())
                    .collect();
                Ok((regen, hits))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;

    let mut rows = Vec::with_capacity(cells.len() * config.panels.len());
    let mut regenerations = 0;
    for (c, chunk) in outcomes.chunks(samples).enumerate() {
        let (model, n, seed) = cells[c];
        let cell_regen: usize = chunk.iter().map(|(r, _)| r).sum();
        regenerations += cell_regen;
        for (k, panel) in config.panels.iter().enumerate() {
            let hits = chunk.iter().filter(|(_, h)| h[k]).count();
            let est = FormationEstimate::from_counts(hits, samples, cell_regen);
            rows.push(Fig1Row {
                model,
                n,
                panel: panel.name.clone(),
                probability: est.probability,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
                samples,
                seed,
            });
        }
    }
    Ok(Fig1Output {
        rows,
        regenerations,
    })
}
