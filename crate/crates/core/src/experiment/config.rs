//! Experiment configuration and its `key=value` text form.
//!
//! Keys mirror the CLI flags (`models`, `n-grid`, `samples`, `seed`, `t-pen`, `out`,
//! `workers`, `reflection`, `er-p`, `ws-k`, `ws-beta`, `ba-m0`, `panels`). The CLI applies a
//! config file first and its flags afterwards, so flags win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::ec::EcOrder;
use crate::generators::{GraphModel, ModelParams};
use crate::walk::MarkedReflection;

use super::ExperimentError;

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "QSS_WORKERS";

pub const DEFAULT_SEED: u64 = 20_190_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            other => Err(ExperimentError::Config(format!(
                "unknown experiment {other:?}"
            ))),
        }
    }
}

/// Inclusive arithmetic sequence `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NGrid {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl NGrid {
    pub fn single(n: usize) -> Self {
        Self {
            start: n,
            stop: n,
            step: 1,
        }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step.max(1)).collect()
    }
}

impl FromStr for NGrid {
    type Err = ExperimentError;

    /// `start:stop:step`, `start:stop` (step 1) or a single `n`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::Config(format!("bad n grid {s:?}, expected start:stop:step"));
        let parts: Vec<usize> = s
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let grid = match parts[..] {
            [n] => Self::single(n),
            [start, stop] => Self {
                start,
                stop,
                step: 1,
            },
            [start, stop, step] => Self { start, stop, step },
            _ => return Err(bad()),
        };
        if grid.step == 0 || grid.stop < grid.start {
            return Err(bad());
        }
        Ok(grid)
    }
}

impl fmt::Display for NGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Penalty added to every measurement time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyRule {
    Fixed(usize),
    /// `ceil(ln n)`.
    CeilLogN,
}

impl PenaltyRule {
    pub fn for_n(self, n: usize) -> usize {
        match self {
            PenaltyRule::Fixed(t) => t,
            PenaltyRule::CeilLogN => (n as f64).ln().ceil() as usize,
        }
    }
}

impl FromStr for PenaltyRule {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" | "ceil-log" | "ceil-log-n" => Ok(Self::CeilLogN),
            other => other
                .parse()
                .map(Self::Fixed)
                .map_err(|_| ExperimentError::Config(format!("bad penalty {other:?}"))),
        }
    }
}

impl fmt::Display for PenaltyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltyRule::Fixed(t) => write!(f, "{t}"),
            PenaltyRule::CeilLogN => f.write_str("ceil-log-n"),
        }
    }
}

/// One formation-probability panel: which orders count and how far added vertices may lie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fig1Panel {
    pub name: String,
    pub orders: Vec<EcOrder>,
    pub distance: usize,
}

impl Fig1Panel {
    pub fn new(orders: &[EcOrder], distance: usize) -> Self {
        let digits: String = orders
            .iter()
            .map(|o| match o {
                EcOrder::Two => '2',
                EcOrder::Three => '3',
            })
            .collect();
        Self {
            name: format!("order{digits}_d{distance}"),
            orders: orders.to_vec(),
            distance,
        }
    }

    /// Order 2; orders 2 or 3; orders 2 or 3 restricted to neighbours of the anchor.
    pub fn standard() -> Vec<Self> {
        vec![
            Self::new(&[EcOrder::Two], 2),
            Self::new(&[EcOrder::Two, EcOrder::Three], 2),
            Self::new(&[EcOrder::Two, EcOrder::Three], 1),
        ]
    }
}

impl FromStr for Fig1Panel {
    type Err = ExperimentError;

    /// `<orders>:<distance>`, e.g. `23:1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::Config(format!("bad panel {s:?}, expected e.g. 23:1"));
        let (orders, distance) = s.split_once(':').ok_or_else(bad)?;
        let mut parsed = Vec::new();
        for c in orders.chars() {
            let order = match c {
                '2' => EcOrder::Two,
                '3' => EcOrder::Three,
                _ => return Err(bad()),
            };
            if !parsed.contains(&order) {
                parsed.push(order);
            }
        }
        if parsed.is_empty() {
            return Err(bad());
        }
        Ok(Self::new(&parsed, distance.parse().map_err(|_| bad())?))
    }
}

/// Optional overrides of the model parameter rules.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModelOverrides {
    pub er_p: Option<f64>,
    pub ws_k: Option<usize>,
    pub ws_beta: Option<f64>,
    pub ba_m0: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub models: Vec<GraphModel>,
    pub overrides: ModelOverrides,
    pub n_grid: NGrid,
    pub samples_per_n: usize,
    pub t_pen: PenaltyRule,
    pub panels: Vec<Fig1Panel>,
    pub root_seed: u64,
    pub output: Option<PathBuf>,
    pub workers: usize,
    pub reflection: MarkedReflection,
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

impl ExperimentConfig {
    /// Desk-scale defaults: fig1 on `100:1000:100` with 50 samples, fig2/fig3 on
    /// `100:800:100` with 20 samples.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let (n_grid, samples_per_n) = match experiment {
            ExperimentKind::Fig1 => (
                NGrid {
                    start: 100,
                    stop: 1000,
                    step: 100,
                },
                50,
            ),
            ExperimentKind::Fig2 | ExperimentKind::Fig3 => (
                NGrid {
                    start: 100,
                    stop: 800,
                    step: 100,
                },
                20,
            ),
        };
        Self {
            experiment,
            models: GraphModel::ALL.to_vec(),
            overrides: ModelOverrides::default(),
            n_grid,
            samples_per_n,
            t_pen: PenaltyRule::CeilLogN,
            panels: Fig1Panel::standard(),
            root_seed: DEFAULT_SEED,
            output: None,
            workers: default_workers(),
            reflection: MarkedReflection::default(),
        }
    }

    /// Full grids: fig1 `100:4000:50` with 100 graphs, fig2/fig3 `100:2400:50` with 50.
    pub fn full_scale(experiment: ExperimentKind) -> Self {
        let mut cfg = Self::defaults(experiment);
        match experiment {
            ExperimentKind::Fig1 => {
                cfg.n_grid = NGrid {
                    start: 100,
                    stop: 4000,
                    step: 50,
                };
                cfg.samples_per_n = 100;
            }
            ExperimentKind::Fig2 | ExperimentKind::Fig3 => {
                cfg.n_grid = NGrid {
                    start: 100,
                    stop: 2400,
                    step: 50,
                };
                cfg.samples_per_n = 50;
            }
        }
        cfg
    }

    pub fn model_params(&self, model: GraphModel) -> ModelParams {
        let mut params = ModelParams::defaults(model);
        params.er_p = self.overrides.er_p.or(params.er_p);
        params.ws_k = self.overrides.ws_k.or(params.ws_k);
        params.ws_beta = self.overrides.ws_beta.unwrap_or(params.ws_beta);
        params.ba_m0 = self.overrides.ba_m0.unwrap_or(params.ba_m0);
        params
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.models.is_empty() {
            return bad("no models selected".into());
        }
        let ns = self.n_grid.values();
        if ns.is_empty() || ns[0] < 4 {
            return bad(format!(
                "n grid {} must be non-empty with n >= 4",
                self.n_grid
            ));
        }
        if self.samples_per_n == 0 {
            return bad("samples per n must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.experiment == ExperimentKind::Fig1 && self.panels.is_empty() {
            return bad("fig1 needs at least one panel".into());
        }
        if let Some(p) = self.overrides.er_p {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("er-p {p} outside [0, 1]"));
            }
        }
        if let Some(b) = self.overrides.ws_beta {
            if !(0.0..=1.0).contains(&b) {
                return bad(format!("ws-beta {b} outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let value = value.trim();
        let parse_err = |what: &str| ExperimentError::Config(format!("bad {what} {value:?}"));
        match key.trim() {
            "experiment" => self.experiment = value.parse()?,
            "model" | "models" => {
                self.models = value
                    .split(',')
                    .map(|m| m.trim().parse::<GraphModel>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| ExperimentError::Config(e.to_string()))?;
            }
            "n" => self.n_grid = NGrid::single(value.parse().map_err(|_| parse_err("n"))?),
            "n-grid" | "n_grid" => self.n_grid = value.parse()?,
            "samples" => self.samples_per_n = value.parse().map_err(|_| parse_err("samples"))?,
            "seed" => self.root_seed = value.parse().map_err(|_| parse_err("seed"))?,
            "t-pen" | "t_pen" => self.t_pen = value.parse()?,
            "out" | "output" => self.output = Some(PathBuf::from(value)),
            "workers" => self.workers = value.parse().map_err(|_| parse_err("workers"))?,
            "reflection" => {
                self.reflection = value.parse().map_err(ExperimentError::Config)?;
            }
            "er-p" | "er_p" => {
                self.overrides.er_p = Some(value.parse().map_err(|_| parse_err("er-p"))?)
            }
            "ws-k" | "ws_k" => {
                self.overrides.ws_k = Some(value.parse().map_err(|_| parse_err("ws-k"))?)
            }
            "ws-beta" | "ws_beta" => {
                self.overrides.ws_beta = Some(value.parse().map_err(|_| parse_err("ws-beta"))?)
            }
            "ba-m0" | "ba_m0" => {
                self.overrides.ba_m0 = Some(value.parse().map_err(|_| parse_err("ba-m0"))?)
            }
            "panels" => {
                self.panels = value
                    .split(',')
                    .map(|p| p.trim().parse())
                    .collect::<Result<_, _>>()?;
            }
            other => return Err(ExperimentError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every setting of a `key=value` document in order.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (key, value) in parse_key_values(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, ExperimentError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(i, line)| {
            line.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| ExperimentError::Config(format!("line {i}: expected key=value")))
        })
        .collect()
}
