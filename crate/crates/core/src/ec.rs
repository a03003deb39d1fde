//! Exceptional configurations: connected marked subgraphs that admit a stationary state of
//! the search walk.
//!
//! A connected induced subgraph `H` qualifies when it is not bipartite, or when it is bipartite
//! with parts `(A, B)` such that the sum of the full-graph degrees over `A` equals the sum over
//! `B`. On two vertices this is an adjacent pair of equal degree; on three vertices a triangle,
//! or an induced path whose middle degree equals the sum of the end degrees.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::ModelParams;
use crate::graph::{Graph, GraphError};
use crate::sampling::{derive_seed, sample_connected};
use crate::stats::{wilson_interval, Z_95};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EcError {
    #[error("vertex set is empty")]
    Empty,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex set {0:?} does not induce a connected subgraph")]
    Disconnected(Vec<usize>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EcKind {
    #[serde(rename = "2ec-path")]
    Ec2Path,
    #[serde(rename = "3ec-triangle")]
    Ec3Triangle,
    #[serde(rename = "3ec-path")]
    Ec3Path,
}

impl EcKind {
    pub fn order(self) -> EcOrder {
        match self {
            EcKind::Ec2Path => EcOrder::Two,
            EcKind::Ec3Triangle | EcKind::Ec3Path => EcOrder::Three,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            EcKind::Ec2Path => "2ec-path",
            EcKind::Ec3Triangle => "3ec-triangle",
            EcKind::Ec3Path => "3ec-path",
        }
    }
}

impl fmt::Display for EcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Number of marked vertices in a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EcOrder {
    Two,
    Three,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExceptionalConfiguration {
    /// Ascending.
    pub vertices: Vec<usize>,
    pub kind: EcKind,
    pub anchor: usize,
}

impl ExceptionalConfiguration {
    pub fn order(&self) -> EcOrder {
        self.kind.order()
    }

    /// Vertices other than the anchor.
    pub fn added(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices
            .iter()
            .copied()
            .filter(move |&v| v != self.anchor)
    }
}

fn normalized(graph: &Graph, vertices: &[usize]) -> Result<Vec<usize>, EcError> {
    if vertices.is_empty() {
        return Err(EcError::Empty);
    }
    let mut h = vertices.to_vec();
    h.sort_unstable();
    h.dedup();
    if let Some(&v) = h.iter().find(|&&v| v >= graph.vertex_count()) {
        return Err(EcError::VertexOutOfRange(v));
    }
    Ok(h)
}

/// Two-colours the subgraph induced by the sorted set `h`.
///
/// Returns `Err` when the induced subgraph is disconnected, `Ok(None)` when it has an odd cycle,
/// and `Ok(Some(colour))` with `colour[i]` the side of `h[i]` otherwise.
fn two_colour(graph: &Graph, h: &[usize]) -> Result<Option<Vec<bool>>, EcError> {
    let index = |v: usize| h.binary_search(&v).ok();
    let mut colour: Vec<Option<bool>> = vec![None; h.len()];
    let mut stack = vec![0];
    colour[0] = Some(false);
    let mut bipartite = true;
    while let Some(i) = stack.pop() {
        let c = colour[i].expect("pushed vertices are coloured");
        for j in graph.neighbors(h[i]).iter().filter_map(|&w| index(w)) {
            match colour[j] {
                None => {
                    colour[j] = Some(!c);
                    stack.push(j);
                }
                Some(cj) if cj == c => bipartite = false,
                Some(_) => {}
            }
        }
    }
    if colour.iter().any(Option::is_none) {
        return Err(EcError::Disconnected(h.to_vec()));
    }
    Ok(bipartite.then(|| colour.into_iter().map(|c| c.unwrap_or_default()).collect()))
}

/// Whether the connected subgraph induced by `vertices` carries a stationary state: it is
/// non-bipartite, or its two sides have equal sums of degrees taken in the whole graph.
pub fn is_exceptional(graph: &Graph, vertices: &[usize]) -> Result<bool, EcError> {
    let h = normalized(graph, vertices)?;
    match two_colour(graph, &h)? {
        None => Ok(true),
        Some(side) => {
            let (mut a, mut b) = (0usize, 0usize);
            for (&v, &s) in h.iter().zip(&side) {
                if s {
                    a += graph.degree(v);
                } else {
                    b += graph.degree(v);
                }
            }
            Ok(a == b)
        }
    }
}

fn certify(graph: &Graph, anchor: usize, vertices: Vec<usize>) -> Option<ExceptionalConfiguration> {
    let exceptional = is_exceptional(graph, &vertices).expect("candidates are connected");
    exceptional.then(|| {
        let kind = match vertices.len() {
            2 => EcKind::Ec2Path,
            3 => {
                let edges = [(0, 1), (0, 2), (1, 2)]
                    .iter()
                    .filter(|&&(i, j)| graph.has_edge(vertices[i], vertices[j]))
                    .count();
                if edges == 3 {
                    EcKind::Ec3Triangle
                } else {
                    EcKind::Ec3Path
                }
            }
            k => unreachable!("no configuration kind of order {k}"),
        };
        ExceptionalConfiguration {
            vertices,
            kind,
            anchor,
        }
    })
}

fn sorted3(a: usize, b: usize, c: usize) -> Vec<usize> {
    let mut v = vec![a, b, c];
    v.sort_unstable();
    v
}

/// Order-2 configurations containing `v`: neighbors of equal degree, ascending.
pub fn find_2ec(graph: &Graph, v: usize) -> Vec<ExceptionalConfiguration> {
    graph
        .neighbors(v)
        .iter()
        .filter_map(|&w| certify(graph, v, vec![v.min(w), v.max(w)]))
        .collect()
}

/// Order-3 configurations containing `v`: triangles, and induced paths with the middle degree
/// equal to the sum of the end degrees. Sorted by vertex set.
pub fn find_3ec(graph: &Graph, v: usize) -> Vec<ExceptionalConfiguration> {
    let nbrs = graph.neighbors(v);
    let mut candidates = Vec::new();
    // v in the middle, or a triangle through v.
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            candidates.push(sorted3(v, a, b));
        }
    }
    // v at an end: v - b - c with c not adjacent to v.
    for &b in nbrs {
        for &c in graph.neighbors(b) {
            if c != v && !graph.has_edge(v, c) {
                candidates.push(sorted3(v, b, c));
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    candidates
        .into_iter()
        .filter_map(|h| certify(graph, v, h))
        .collect()
}

fn within(graph: &Graph, v: usize, u: usize, distance: usize) -> bool {
    match distance {
        _ if u == v => true,
        0 => false,
        1 => graph.has_edge(v, u),
        _ => graph.has_edge(v, u) || graph.neighbors(v).iter().any(|&w| graph.has_edge(w, u)),
    }
}

/// Configurations of the requested orders that contain `v` and keep every other vertex within
/// `distance` hops of `v`. Configurations have at most three vertices, so any `distance >= 2`
/// admits all of them. Order-2 results come first, each group sorted by vertex set.
pub fn find_ec_within_distance(
    graph: &Graph,
    v: usize,
    distance: usize,
    orders: &[EcOrder],
) -> Vec<ExceptionalConfiguration> {
    let mut out = Vec::new();
    if orders.contains(&EcOrder::Two) {
        out.extend(find_2ec(graph, v));
    }
    if orders.contains(&EcOrder::Three) {
        out.extend(find_3ec(graph, v));
    }
    out.retain(|ec| ec.vertices.iter().all(|&u| within(graph, v, u, distance)));
    out
}

/// Empirical probability that a uniformly random vertex of a random graph admits a
/// configuration, with a Wilson 95% interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationEstimate {
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: usize,
    pub samples: usize,
    /// Disconnected draws that were replaced.
    pub regenerations: usize,
}

impl FormationEstimate {
    pub fn from_counts(hits: usize, samples: usize, regenerations: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, samples, Z_95);
        Self {
            probability: if samples == 0 {
                0.0
            } else {
                hits as f64 / samples as f64
            },
            ci_low,
            ci_high,
            hits,
            samples,
            regenerations,
        }
    }
}

/// One (graph, vertex) draw for formation statistics. The sample seed determines both.
pub fn formation_sample(
    params: &ModelParams,
    n: usize,
    sample_seed: u64,
) -> Result<(Graph, usize, usize), EcError> {
    let mut sample = sample_connected(params, n, sample_seed)?;
    let v = sample.rng.gen_range(0..n);
    Ok((sample.graph, v, sample.regenerations))
}

/// Sample `i` uses the stream `derive_seed(seed, [i])`.
pub fn ec_formation_probability(
    params: &ModelParams,
    n: usize,
    orders: &[EcOrder],
    distance: usize,
    samples: usize,
    seed: u64,
) -> Result<FormationEstimate, EcError> {
    let mut hits = 0;
    let mut regenerations = 0;
    for i in 0..samples {
        let (graph, v, regen) = formation_sample(params, n, derive_seed(seed, &[i as u64]))?;
        regenerations += regen;
        if !find_ec_within_distance(&graph, v, distance, orders).is_empty() {
            hits += 1;
        }
    }
    Ok(FormationEstimate::from_counts(hits, samples, regenerations))
}
