//! Search instances, expected runtime, attacks on the marked set and their efficiency.

use std::sync::Arc;

use thiserror::Error;

use crate::ec::{EcKind, ExceptionalConfiguration};
use crate::graph::Graph;
use crate::stats::quantile_sorted;
use crate::stochastic::StochasticMatrix;
use crate::walk::{normalize_marked, MarkedReflection, SearchRun, WalkError};

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("configuration anchor {0} is not a marked vertex")]
    UnanchoredConfiguration(usize),
    #[error("configuration adds no new marked vertex")]
    NothingAdded,
    #[error("instances differ in measurement time ({base} vs {attacked})")]
    MeasurementTimeMismatch { base: usize, attacked: usize },
    #[error("attacked instance changed a non-hackable element: {0:?}")]
    NotComparable(Vec<Element>),
    #[error("base success probability is zero at t = {0}")]
    ZeroBaseProbability(usize),
    #[error("success probability is zero at every scanned time")]
    UnboundedRuntime,
    #[error("no samples")]
    EmptySample,
}

/// Parts of a search instance an attacker might alter. Only the marked set has a
/// constructor here ([`apply_attack`]); the algorithm and measurement time never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Algorithm,
    MeasurementTime,
    Graph,
    Marked,
    Parameters,
}

/// A Szegedy spatial search: graph, marked set, measurement time and stochastic matrix, with the
/// marked-reflection construction standing for the algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchInstance {
    pub graph: Arc<Graph>,
    pub marked: Vec<usize>,
    pub t: usize,
    pub params: Arc<StochasticMatrix>,
    pub reflection: MarkedReflection,
}

impl SearchInstance {
    pub fn new(
        graph: Arc<Graph>,
        marked: &[usize],
        t: usize,
        params: Arc<StochasticMatrix>,
        reflection: MarkedReflection,
    ) -> Result<Self, AttackError> {
        let marked = normalize_marked(graph.vertex_count(), marked)?;
        params.check_support(&graph)?;
        Ok(Self {
            graph,
            marked,
            t,
            params,
            reflection,
        })
    }

    /// Instance with the uniform walk `P_u` and the default construction.
    pub fn uniform(graph: Arc<Graph>, marked: &[usize], t: usize) -> Result<Self, AttackError> {
        let params = Arc::new(StochasticMatrix::uniform(&graph)?);
        Self::new(graph, marked, t, params, MarkedReflection::default())
    }

    pub fn with_time(&self, t: usize) -> Self {
        Self { t, ..self.clone() }
    }

    fn run(&self) -> Result<SearchRun, WalkError> {
        SearchRun::new(&self.graph, &self.params, &self.marked, self.reflection)
    }

    /// Probability of measuring a marked vertex after `t` steps.
    pub fn success_probability(&self) -> Result<f64, AttackError> {
        let mut run = self.run()?;
        for _ in 0..self.t {
            run.advance()?;
        }
        Ok(run.success_probability())
    }

    pub fn expected_runtime(&self, t_pen: usize) -> Result<f64, AttackError> {
        Ok(expected_runtime(self.t, self.success_probability()?, t_pen))
    }

    /// Elements in which `other` differs from `self`.
    pub fn differences(&self, other: &SearchInstance) -> Vec<Element> {
        let mut out = Vec::new();
        if self.reflection != other.reflection {
            out.push(Element::Algorithm);
        }
        if self.t != other.t {
            out.push(Element::MeasurementTime);
        }
        if !Arc::ptr_eq(&self.graph, &other.graph) && self.graph != other.graph {
            out.push(Element::Graph);
        }
        if self.marked != other.marked {
            out.push(Element::Marked);
        }
        if !Arc::ptr_eq(&self.params, &other.params) && self.params != other.params {
            out.push(Element::Parameters);
        }
        out
    }
}

/// `(t + t_pen) / p`, the mean number of steps of a repeat-until-success loop that measures
/// after `t` steps and pays `t_pen` per attempt. Infinite when `p == 0`.
pub fn expected_runtime(t: usize, p: f64, t_pen: usize) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-9).contains(&p), "probability {p}");
    if p <= 0.0 {
        f64::INFINITY
    } else {
        (t + t_pen) as f64 / p
    }
}

/// Marks every vertex of `ec` in addition to the current marked set.
pub fn apply_attack(
    inst: &SearchInstance,
    ec: &ExceptionalConfiguration,
) -> Result<SearchInstance, AttackError> {
    if inst.marked.binary_search(&ec.anchor).is_err() {
        return Err(AttackError::UnanchoredConfiguration(ec.anchor));
    }
    let mut marked = inst.marked.clone();
    marked.extend(&ec.vertices);
    let marked = normalize_marked(inst.graph.vertex_count(), &marked)?;
    if marked.len() == inst.marked.len() {
        return Err(AttackError::NothingAdded);
    }
    Ok(SearchInstance {
        marked,
        ..inst.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOptimum {
    pub t: usize,
    pub runtime: f64,
    pub probability: f64,
}

/// Scans `t = 0, 1, ...` keeping the best `(t + t_pen) / p(t)` and stops once `t + t_pen`
/// reaches it: since `p <= 1`, no later time can do better. If `probe` is given, the
/// probability at that time is also returned, running past the stopping point if needed.
fn scan_optimum(
    run: &mut SearchRun,
    t_pen: usize,
    probe: Option<usize>,
) -> Result<(MeasurementOptimum, Option<f64>), AttackError> {
    let p0 = run.success_probability();
    if p0 <= 0.0 {
        return Err(AttackError::UnboundedRuntime);
    }
    let mut best = MeasurementOptimum {
        t: 0,
        runtime: expected_runtime(0, p0, t_pen),
        probability: p0,
    };
    let mut probed = (probe == Some(0)).then_some(p0);
    loop {
        let t = run.steps();
        let optimum_settled = (t + t_pen) as f64 >= best.runtime;
        let probe_done = probe.is_none_or(|tp| t >= tp);
        if optimum_settled && probe_done {
            break;
        }
        run.advance()?;
        let t = run.steps();
        let p = run.success_probability();
        if probe == Some(t) {
            probed = Some(p);
        }
        if !optimum_settled {
            let runtime = expected_runtime(t, p, t_pen);
            if runtime < best.runtime {
                best = MeasurementOptimum {
                    t,
                    runtime,
                    probability: p,
                };
            }
        }
    }
    Ok((best, probed))
}

/// Globally optimal integer measurement time for the search on `marked`.
pub fn optimize_measurement_time(
    graph: &Arc<Graph>,
    marked: &[usize],
    p: &StochasticMatrix,
    t_pen: usize,
    reflection: MarkedReflection,
) -> Result<MeasurementOptimum, AttackError> {
    let mut run = SearchRun::new(graph, p, marked, reflection)?;
    Ok(scan_optimum(&mut run, t_pen, None)?.0)
}

fn check_comparable(base: &SearchInstance, attacked: &SearchInstance) -> Result<(), AttackError> {
    if base.t != attacked.t {
        return Err(AttackError::MeasurementTimeMismatch {
            base: base.t,
            attacked: attacked.t,
        });
    }
    let changed: Vec<_> = base
        .differences(attacked)
        .into_iter()
        .filter(|e| *e != Element::Marked)
        .collect();
    if changed.is_empty() {
        Ok(())
    } else {
        Err(AttackError::NotComparable(changed))
    }
}

/// `1 - p_attacked / p_base` at the common measurement time, equal to
/// `1 - T_base / T_attacked` for any common penalty.
pub fn attack_efficiency(
    base: &SearchInstance,
    attacked: &SearchInstance,
) -> Result<f64, AttackError> {
    check_comparable(base, attacked)?;
    let p_base = base.success_probability()?;
    if p_base <= 0.0 {
        return Err(AttackError::ZeroBaseProbability(base.t));
    }
    Ok(1.0 - attacked.success_probability()? / p_base)
}

/// `1 - T_base(t) / min_tau T_attacked(tau)`: efficiency against a defender who re-tunes the
/// measurement time for the attacked marked set.
pub fn strong_attack_efficiency(
    inst: &SearchInstance,
    attacked_marked: &[usize],
    t_pen: usize,
) -> Result<f64, AttackError> {
    let base_runtime = inst.expected_runtime(t_pen)?;
    let best = optimize_measurement_time(
        &inst.graph,
        attacked_marked,
        &inst.params,
        t_pen,
        inst.reflection,
    )?;
    Ok(1.0 - base_runtime / best.runtime)
}

/// Outcome of attacking a single-vertex search with one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub anchor: usize,
    pub added: Vec<usize>,
    pub kind: EcKind,
    pub t_pen: usize,
    /// Measurement time of the clean search, tuned on the clean instance.
    pub t_base: usize,
    pub p_base: f64,
    pub runtime_base: f64,
    /// Attacked instance measured at `t_base`.
    pub p_attacked: f64,
    pub runtime_attacked: f64,
    pub efficiency: f64,
    /// Defender's re-tuned time on the attacked instance.
    pub t_opt: usize,
    pub runtime_opt: f64,
    pub strong_efficiency: f64,
}

/// Runs the three searches of one attack: the clean search at its optimal time, the attacked
/// search at that same time, and the attacked search at its own optimal time.
pub fn run_attack(
    graph: &Arc<Graph>,
    p: &StochasticMatrix,
    ec: &ExceptionalConfiguration,
    t_pen: usize,
    reflection: MarkedReflection,
) -> Result<AttackReport, AttackError> {
    let base = optimize_measurement_time(graph, &[ec.anchor], p, t_pen, reflection)?;
    let mut attacked = SearchRun::new(graph, p, &ec.vertices, reflection)?;
    if attacked.marked().len() < 2 {
        return Err(AttackError::NothingAdded);
    }
    let (best, probed) = scan_optimum(&mut attacked, t_pen, Some(base.t))?;
    let p_attacked = probed.expect("probe time is always reached");
    Ok(AttackReport {
        anchor: ec.anchor,
        added: ec.added().collect(),
        kind: ec.kind,
        t_pen,
        t_base: base.t,
        p_base: base.probability,
        runtime_base: base.runtime,
        p_attacked,
        runtime_attacked: expected_runtime(base.t, p_attacked, t_pen),
        efficiency: 1.0 - p_attacked / base.probability,
        t_opt: best.t,
        runtime_opt: best.runtime,
        strong_efficiency: 1.0 - base.runtime / best.runtime,
    })
}

/// Summary of a sample of efficiencies, including the empirical probability of reaching each
/// threshold (the finite-sample estimate of an almost-sure level).
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyStatistics {
    pub count: usize,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// `(E, P(eff >= E))` per requested threshold.
    pub exceedance: Vec<(f64, f64)>,
}

impl EfficiencyStatistics {
    pub fn from_values(values: &[f64], thresholds: &[f64]) -> Result<Self, AttackError> {
        if values.is_empty() {
            return Err(AttackError::EmptySample);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let count = sorted.len();
        let exceedance = thresholds
            .iter()
            .map(|&e| {
                let hits = sorted.iter().filter(|&&x| x >= e).count();
                (e, hits as f64 / count as f64)
            })
            .collect();
        Ok(Self {
            count,
            max: sorted[count - 1],
            min: sorted[0],
            mean: sorted.iter().sum::<f64>() / count as f64,
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            exceedance,
        })
    }

    pub fn interquartile_range(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportStatistics {
    pub efficiency: EfficiencyStatistics,
    pub strong_efficiency: EfficiencyStatistics,
}

pub fn efficiency_statistics(
    reports: &[AttackReport],
    thresholds: &[f64],
) -> Result<ReportStatistics, AttackError> {
    let eff: Vec<_> = reports.iter().map(|r| r.efficiency).collect();
    let strong: Vec<_> = reports.iter().map(|r| r.strong_efficiency).collect();
    Ok(ReportStatistics {
        efficiency: EfficiencyStatistics::from_values(&eff, thresholds)?,
        strong_efficiency: EfficiencyStatistics::from_values(&strong, thresholds)?,
    })
}
