//! Szegedy search walk on the space of ordered vertex pairs.
//!
//! A state assigns a real amplitude to each pair `(v, w)`. Pairs with `w` adjacent to `v` or
//! `w == v` form a subspace that both reflections and the register swap leave invariant. Every
//! search state starts and stays inside it, so only those `2|E| + n` pairs are stored. The first
//! `2|E|` slots follow the graph's arc order and the last `n` slots hold the diagonal pairs.
//!
//! The first reflection acts block-wise on the pairs sharing a first register `v`:
//!
//! ```text
//! R1 = sum_v s_v (2 |psi_v><psi_v| - I_v),   psi_v = |v> (x) sum_w sqrt(P(w, v)) |w>
//! ```
//!
//! and the second is `R2 = Swap R1 Swap`. One search step is `R2 R1`. The marked set enters
//! through the per-block sign `s_v` and the column used for `psi_v`; see [`MarkedReflection`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::Graph;
use crate::stochastic::StochasticMatrix;

/// Allowed deviation of the state norm from 1 before evolution is aborted.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),
    #[error("marked set is empty")]
    EmptyMarkedSet,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("invalid stochastic matrix: {0}")]
    InvalidStochastic(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state norm drifted to {norm} after {step} steps")]
    NormDrift { step: usize, norm: f64 },
}

/// How marked vertices modify the first reflection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum MarkedReflection {
    /// Reflections use the unmodified `P` and marked blocks get sign `-1`, i.e. the query
    /// oracle `-1` on every pair whose first register is marked is folded into `R1` (and by
    /// symmetry into `R2`). This is the flip-flop coined search with Grover coin, squared.
    #[default]
    PhaseFlip,
    /// Reflections use the absorbing matrix `P'` whose marked columns are unit self-columns.
    Absorbing,
}

impl MarkedReflection {
    pub fn tag(self) -> &'static str {
        match self {
            MarkedReflection::PhaseFlip => "phase-flip",
            MarkedReflection::Absorbing => "absorbing",
        }
    }
}

impl fmt::Display for MarkedReflection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MarkedReflection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phase-flip" | "phase_flip" | "oracle" => Ok(MarkedReflection::PhaseFlip),
            "absorbing" => Ok(MarkedReflection::Absorbing),
            other => Err(format!(
                "unknown reflection {other:?}, expected `phase-flip` or `absorbing`"
            )),
        }
    }
}

/// Sorted, duplicate-free, non-empty marked set within `0..n`.
pub fn normalize_marked(n: usize, marked: &[usize]) -> Result<Vec<usize>, WalkError> {
    if marked.is_empty() {
        return Err(WalkError::EmptyMarkedSet);
    }
    let mut out = marked.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&v) = out.iter().find(|&&v| v >= n) {
        return Err(WalkError::VertexOutOfRange(v));
    }
    Ok(out)
}

/// Slot indexing for the stored pairs of one graph.
#[derive(Debug, PartialEq)]
pub struct PairLayout {
    graph: Arc<Graph>,
    /// Slot of the swapped pair; an involution.
    swapped: Vec<usize>,
    /// First register of each arc slot.
    source: Vec<usize>,
}

impl PairLayout {
    pub fn new(graph: Arc<Graph>) -> Arc<Self> {
        let arcs = graph.arc_count();
        let n = graph.vertex_count();
        let mut swapped = Vec::with_capacity(arcs + n);
        let mut source = Vec::with_capacity(arcs);
        for v in 0..n {
            for &w in graph.neighbors(v) {
                swapped.push(graph.arc_index(w, v).expect("adjacency is symmetric"));
                source.push(v);
            }
        }
        swapped.extend(arcs..arcs + n);
        Arc::new(Self {
            graph,
            swapped,
            source,
        })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn slot_count(&self) -> usize {
        self.swapped.len()
    }

    pub fn diagonal_slot(&self, v: usize) -> usize {
        self.graph.arc_count() + v
    }

    /// Slot of pair `(v, w)`, or `None` when the pair lies outside the stored subspace.
    pub fn slot(&self, v: usize, w: usize) -> Option<usize> {
        if v == w {
            Some(self.diagonal_slot(v))
        } else {
            self.graph.arc_index(v, w)
        }
    }

    pub fn pair(&self, slot: usize) -> (usize, usize) {
        let arcs = self.graph.arc_count();
        if slot < arcs {
            let v = self.source[slot];
            let k = slot - self.graph.arc_range(v).start;
            (v, self.graph.neighbors(v)[k])
        } else {
            (slot - arcs, slot - arcs)
        }
    }

    fn arc_slots(&self, v: usize) -> std::ops::Range<usize> {
        self.graph.arc_range(v)
    }

    fn same_as(&self, other: &PairLayout) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

/// Real amplitudes over the stored pairs.
#[derive(Debug, Clone)]
pub struct WalkState {
    layout: Arc<PairLayout>,
    amplitudes: Vec<f64>,
}

impl WalkState {
    /// `(1/sqrt(n)) sum_v |v> (x) sum_w sqrt(P(w, v)) |w>`: every first register carries
    /// probability exactly `1/n`.
    pub fn initial(layout: &Arc<PairLayout>, p: &StochasticMatrix) -> Result<Self, WalkError> {
        p.check_support(layout.graph())?;
        let n = layout.vertex_count();
        let scale = 1.0 / (n as f64).sqrt();
        let mut amplitudes = vec![0.0; layout.slot_count()];
        for v in 0..n {
            for &(w, weight) in p.column(v) {
                let slot = layout.slot(v, w).expect("support checked");
                amplitudes[slot] = weight.sqrt() * scale;
            }
        }
        Ok(Self {
            layout: Arc::clone(layout),
            amplitudes,
        })
    }

    pub fn from_amplitudes(
        layout: &Arc<PairLayout>,
        amplitudes: Vec<f64>,
    ) -> Result<Self, WalkError> {
        if amplitudes.len() != layout.slot_count() {
            return Err(WalkError::DimensionMismatch {
                expected: layout.slot_count(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            layout: Arc::clone(layout),
            amplitudes,
        })
    }

    pub fn layout(&self) -> &Arc<PairLayout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Amplitude of `(v, w)`; zero outside the stored subspace.
    pub fn amplitude(&self, v: usize, w: usize) -> f64 {
        self.layout
            .slot(v, w)
            .map_or(0.0, |slot| self.amplitudes[slot])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Probability that measuring the first register yields `v`.
    pub fn first_register_probability(&self, v: usize) -> f64 {
        let block = &self.amplitudes[self.layout.arc_slots(v)];
        let diag = self.amplitudes[self.layout.diagonal_slot(v)];
        block.iter().map(|a| a * a).sum::<f64>() + diag * diag
    }

    /// Probability that measuring the first register yields any vertex of `marked`.
    pub fn success_probability(&self, marked: &[usize]) -> f64 {
        marked
            .iter()
            .map(|&v| self.first_register_probability(v))
            .sum()
    }

    /// Full `n^2` amplitude vector indexed by `v * n + w`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.layout.vertex_count();
        let mut dense = vec![0.0; n * n];
        for (slot, &a) in self.amplitudes.iter().enumerate() {
            let (v, w) = self.layout.pair(slot);
            dense[v * n + w] = a;
        }
        dense
    }

    fn swap_registers(&mut self) {
        for (slot, &other) in self.layout.swapped.iter().enumerate() {
            if slot < other {
                self.amplitudes.swap(slot, other);
            }
        }
    }
}

/// The two-reflection search operator for one graph, stochastic matrix and marked set.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    layout: Arc<PairLayout>,
    /// `sqrt(P(w, v))` at the slot of `(v, w)`, for the column actually reflected about.
    coefficients: Vec<f64>,
    block_sign: Vec<f64>,
}

impl WalkOperator {
    /// Walk with no marked vertices: both reflections built from `p`.
    pub fn unmarked(layout: &Arc<PairLayout>, p: &StochasticMatrix) -> Result<Self, WalkError> {
        Self::build(layout, p, vec![1.0; layout.vertex_count()])
    }

    /// Search walk for `marked` under the chosen construction.
    pub fn search(
        layout: &Arc<PairLayout>,
        p: &StochasticMatrix,
        marked: &[usize],
        reflection: MarkedReflection,
    ) -> Result<Self, WalkError> {
        let n = layout.vertex_count();
        let marked = normalize_marked(n, marked)?;
        match reflection {
            MarkedReflection::PhaseFlip => {
                let mut sign = vec![1.0; n];
                for &v in &marked {
                    sign[v] = -1.0;
                }
                Self::build(layout, p, sign)
            }
            MarkedReflection::Absorbing => {
                Self::build(layout, &p.absorb_marked(&marked)?, vec![1.0; n])
            }
        }
    }

    fn build(
        layout: &Arc<PairLayout>,
        p: &StochasticMatrix,
        block_sign: Vec<f64>,
    ) -> Result<Self, WalkError> {
        p.check_support(layout.graph())?;
        let mut coefficients = vec![0.0; layout.slot_count()];
        for v in 0..layout.vertex_count() {
            for &(w, weight) in p.column(v) {
                coefficients[layout.slot(v, w).expect("support checked")] = weight.sqrt();
            }
        }
        Ok(Self {
            layout: Arc::clone(layout),
            coefficients,
            block_sign,
        })
    }

    pub fn layout(&self) -> &Arc<PairLayout> {
        &self.layout
    }

    fn check(&self, state: &WalkState) -> Result<(), WalkError> {
        if self.layout.same_as(&state.layout) {
            Ok(())
        } else {
            Err(WalkError::DimensionMismatch {
                expected: self.layout.slot_count(),
                found: state.layout.slot_count(),
            })
        }
    }

    fn reflect_blocks(&self, amplitudes: &mut [f64]) {
        let diag_base = self.layout.graph.arc_count();
        for (v, &sign) in self.block_sign.iter().enumerate() {
            let arcs = self.layout.arc_slots(v);
            let diag = diag_base + v;
            let coef = &self.coefficients[arcs.clone()];
            let diag_amp = amplitudes[diag];
            let block = &mut amplitudes[arcs];
            let overlap = coef
                .iter()
                .zip(block.iter())
                .map(|(c, a)| c * a)
                .sum::<f64>()
                + self.coefficients[diag] * diag_amp;
            let twice = 2.0 * overlap;
            for (a, c) in block.iter_mut().zip(coef) {
                *a = sign * (twice * c - *a);
            }
            amplitudes[diag] = sign * (twice * self.coefficients[diag] - amplitudes[diag]);
        }
    }

    pub fn reflect_first(&self, state: &mut WalkState) -> Result<(), WalkError> {
        self.check(state)?;
        self.reflect_blocks(&mut state.amplitudes);
        Ok(())
    }

    /// `Swap R1 Swap`.
    pub fn reflect_second(&self, state: &mut WalkState) -> Result<(), WalkError> {
        self.check(state)?;
        state.swap_registers();
        self.reflect_blocks(&mut state.amplitudes);
        state.swap_registers();
        Ok(())
    }

    /// One search step `R2 R1`, in place.
    pub fn step(&self, state: &mut WalkState) -> Result<(), WalkError> {
        self.reflect_first(state)?;
        self.reflect_second(state)
    }

    pub fn apply(&self, state: &WalkState) -> Result<WalkState, WalkError> {
        let mut next = state.clone();
        self.step(&mut next)?;
        Ok(next)
    }
}

/// A search in progress: operator, current state and step counter.
#[derive(Debug, Clone)]
pub struct SearchRun {
    operator: WalkOperator,
    state: WalkState,
    marked: Vec<usize>,
    steps: usize,
}

impl SearchRun {
    /// Starts from the initial state of the unmodified `p` with the search operator for
    /// `marked`.
    pub fn new(
        graph: &Arc<Graph>,
        p: &StochasticMatrix,
        marked: &[usize],
        reflection: MarkedReflection,
    ) -> Result<Self, WalkError> {
        let marked = normalize_marked(graph.vertex_count(), marked)?;
        let layout = PairLayout::new(Arc::clone(graph));
        let operator = WalkOperator::search(&layout, p, &marked, reflection)?;
        let state = WalkState::initial(&layout, p)?;
        Ok(Self {
            operator,
            state,
            marked,
            steps: 0,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn state(&self) -> &WalkState {
        &self.state
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn success_probability(&self) -> f64 {
        self.state.success_probability(&self.marked)
    }

    /// Applies one step and fails if the norm left `1 +- NORM_DRIFT_LIMIT`.
    pub fn advance(&mut self) -> Result<(), WalkError> {
        self.operator.step(&mut self.state)?;
        self.steps += 1;
        let norm = self.state.norm();
        if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
            return Err(WalkError::NormDrift {
                step: self.steps,
                norm,
            });
        }
        Ok(())
    }
}

/// Success probabilities `p(0), ..., p(t_max)`.
pub fn probability_trace(
    graph: &Arc<Graph>,
    marked: &[usize],
    p: &StochasticMatrix,
    t_max: usize,
    reflection: MarkedReflection,
) -> Result<Vec<f64>, WalkError> {
    let mut run = SearchRun::new(graph, p, marked, reflection)?;
    let mut trace = Vec::with_capacity(t_max + 1);
    trace.push(run.success_probability());
    for _ in 0..t_max {
        run.advance()?;
        trace.push(run.success_probability());
    }
    Ok(trace)
}
