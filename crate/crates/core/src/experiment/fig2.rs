use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{run_attack, AttackReport};
use crate::ec::{find_2ec, EcKind};
use crate::generators::{GraphModel, ModelParams};
use crate::graph::Graph;
use crate::sampling::sample_connected;
use crate::stochastic::StochasticMatrix;
use crate::walk::MarkedReflection;

use super::{cell_seed, pool, sample_seed, ExperimentConfig, ExperimentError, ExperimentKind};

/// One attack on a random single-vertex search. `seed` is the sample seed; see
/// [`attack_sample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub model: GraphModel,
    pub n: usize,
    pub seed: u64,
    pub anchor: usize,
    /// Added marked vertices separated by `;`.
    pub added_vertices: String,
    pub kind: EcKind,
    pub t_base: usize,
    pub p_base: f64,
    #[serde(rename = "T_base")]
    pub runtime_base: f64,
    pub p_attacked: f64,
    #[serde(rename = "T_attacked")]
    pub runtime_attacked: f64,
    pub eff: f64,
    pub t_opt: usize,
    #[serde(rename = "T_opt")]
    pub runtime_opt: f64,
    pub strong_eff: f64,
    pub t_pen: usize,
}

impl Fig2Row {
    pub fn from_report(model: GraphModel, n: usize, seed: u64, r: &AttackReport) -> Self {
        let added: Vec<_> = r.added.iter().map(|v| v.to_string()).collect();
        Self {
            model,
            n,
            seed,
            anchor: r.anchor,
            added_vertices: added.join(";"),
            kind: r.kind,
            t_base: r.t_base,
            p_base: r.p_base,
            runtime_base: r.runtime_base,
            p_attacked: r.p_attacked,
            runtime_attacked: r.runtime_attacked,
            eff: r.efficiency,
            t_opt: r.t_opt,
            runtime_opt: r.runtime_opt,
            strong_eff: r.strong_efficiency,
            t_pen: r.t_pen,
        }
    }
}

/// A sampled attack together with the redraws it took.
#[derive(Debug, Clone)]
pub struct AttackSample {
    pub graph: Graph,
    pub report: AttackReport,
    /// Disconnected graphs replaced.
    pub regenerations: usize,
    /// Anchor vertices redrawn because no 2-vertex configuration contained them.
    pub anchor_redraws: usize,
    /// Connected graphs abandoned after `n` fruitless anchor draws.
    pub graph_redraws: usize,
}

/// Draws a connected graph and a uniform vertex, then a uniform 2-vertex configuration
/// containing it, and runs the attack. Without a configuration the vertex is redrawn up to `n`
/// times, then the whole graph is redrawn from the same stream.
pub fn attack_sample(
    params: &ModelParams,
    n: usize,
    seed: u64,
    t_pen: usize,
    reflection: MarkedReflection,
) -> Result<AttackSample, ExperimentError> {
    let mut sample = sample_connected(params, n, seed)?;
    let mut regenerations = sample.regenerations;
    let mut anchor_redraws = 0;
    let mut graph_redraws = 0;
    loop {
        for attempt in 0..=n {
            let v = sample.rng.gen_range(0..n);
            let ecs = find_2ec(&sample.graph, v);
            if ecs.is_empty() {
                if attempt < n {
                    anchor_redraws += 1;
                }
                continue;
            }
            let ec = &ecs[sample.rng.gen_range(0..ecs.len())];
            let graph = Arc::new(sample.graph);
            let p = StochasticMatrix::uniform(&graph).map_err(crate::attack::AttackError::from)?;
            let report = run_attack(&graph, &p, ec, t_pen, reflection)?;
            return Ok(AttackSample {
                graph: Arc::try_unwrap(graph).unwrap_or_else(|g| (*g).clone()),
                report,
                regenerations,
                anchor_redraws,
                graph_redraws,
            });
        }
        graph_redraws += 1;
        if graph_redraws > crate::sampling::MAX_REGENERATIONS {
            return Err(ExperimentError::Config(format!(
                "no 2-vertex configuration found in {graph_redraws} {} graphs on {n} vertices",
                params.model
            )));
        }
        let next = sample.rng.gen();
        sample = sample_connected(params, n, next)?;
        regenerations += sample.regenerations;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Output {
    pub rows: Vec<Fig2Row>,
    pub regenerations: usize,
    pub anchor_redraws: usize,
    pub graph_redraws: usize,
}

pub fn run_fig2(config: &ExperimentConfig) -> Result<Fig2Output, ExperimentError> {
    config.validate()?;
    if config.experiment == ExperimentKind::Fig1 {
        return Err(ExperimentError::Config(
            "run_fig2 needs a fig2 or fig3 configuration".into(),
        ));
    }
    let root = config.root_seed;
    let tasks: Vec<(GraphModel, usize, u64)> = config
        .models
        .iter()
        .flat_map(|&m| {
            let ns = config.n_grid.values();
            ns.into_iter().flat_map(move |n| {
                let cell = cell_seed(root, m, n);
                (0..config.samples_per_n).map(move |i| (m, n, sample_seed(cell, i)))
            })
        })
        .collect();

    let samples = pool(config.workers)?.install(|| {
        tasks
            .par_iter()
            .map(|&(model, n, seed)| {
                let s = attack_sample(
                    &config.model_params(model),
                    n,
                    seed,
                    config.t_pen.for_n(n),
                    config.reflection,
                )?;
                Ok((Fig2Row::from_report(model, n, seed, &s.report), s))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;

    let mut out = Fig2Output {
        rows: Vec::with_capacity(samples.len()),
        regenerations: 0,
        anchor_redraws: 0,
        graph_redraws: 0,
    };
    for (row, s) in samples {
        out.rows.push(row);
        out.regenerations += s.regenerations;
        out.anchor_redraws += s.anchor_redraws;
        out.graph_redraws += s.graph_redraws;
    }
    Ok(out)
}
