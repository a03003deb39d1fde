use serde::{Deserialize, Serialize};

use crate::generators::GraphModel;

use super::fig2::{run_fig2, Fig2Output, Fig2Row};
use super::regression::fit_power_law;
use super::{ExperimentConfig, ExperimentError};

/// Which runtime of a fig2 row is regressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fig3Variant {
    /// Clean search at its own optimal time.
    #[serde(rename = "reference")]
    Reference,
    /// Attacked search at the clean optimal time.
    #[serde(rename = "attacked")]
    Attacked,
    /// Attacked search at its re-tuned optimal time.
    #[serde(rename = "defended")]
    Defended,
}

impl Fig3Variant {
    pub const ALL: [Fig3Variant; 3] = [Self::Reference, Self::Attacked, Self::Defended];

    fn runtime(self, row: &Fig2Row) -> f64 {
        match self {
            Self::Reference => row.runtime_base,
            Self::Attacked => row.runtime_attacked,
            Self::Defended => row.runtime_opt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub model: GraphModel,
    pub variant: Fig3Variant,
    pub alpha: f64,
    pub intercept: f64,
    pub rse: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Output {
    pub rows: Vec<Fig3Row>,
    /// The attack dataset the fits were made from.
    pub attacks: Fig2Output,
}

/// Fits `ln T` against `ln n` per model and variant, in the order models first appear.
pub fn fig3_from_rows(rows: &[Fig2Row]) -> Result<Vec<Fig3Row>, ExperimentError> {
    let mut models: Vec<GraphModel> = Vec::new();
    for row in rows {
        if !models.contains(&row.model) {
            models.push(row.model);
        }
    }
    let mut out = Vec::new();
    for model in models {
        for variant in Fig3Variant::ALL {
            let points: Vec<(usize, f64)> = rows
                .iter()
                .filter(|r| r.model == model)
                .map(|r| (r.n, variant.runtime(r)))
                .collect();
            let fit = fit_power_law(&points).map_err(|e| match e {
                ExperimentError::Regression(m) => {
                    ExperimentError::Regression(format!("{model} {variant:?}: {m}"))
                }
                other => other,
            })?;
            out.push(Fig3Row {
                model,
                variant,
                alpha: fit.alpha,
                intercept: fit.intercept,
                rse: fit.rse,
                points: fit.points,
            });
        }
    }
    Ok(out)
}

/// Runs the attack experiment and regresses it.
pub fn run_fig3(config: &ExperimentConfig) -> Result<Fig3Output, ExperimentError> {
    let attacks = run_fig2(config)?;
    let rows = fig3_from_rows(&attacks.rows)?;
    Ok(Fig3Output { rows, attacks })
}
