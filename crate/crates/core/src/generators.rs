//! Erdős–Rényi, Watts–Strogatz and Barabási–Albert generators.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed. The seed feeds a
//! ChaCha8 stream, so output is identical across platforms and thread counts.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError};

pub type ModelRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ModelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `2 ln(n) / n`, capped at 1.
pub fn default_er_probability(n: usize) -> f64 {
    (2.0 * (n as f64).ln() / n as f64).min(1.0)
}

/// `ceil(2 ln n)` rounded up to even, then capped to the largest even degree below `n`.
pub fn default_ws_degree(n: usize) -> usize {
    let k = (2.0 * (n as f64).ln()).ceil() as usize;
    let k = k + k % 2;
    let cap = if n.is_multiple_of(2) {
        n.saturating_sub(2)
    } else {
        n - 1
    };
    k.min(cap).max(2)
}

pub const DEFAULT_WS_BETA: f64 = 0.5;
pub const DEFAULT_BA_M0: usize = 3;

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParameter(msg.into())
}

/// G(n, p): each of the `n(n-1)/2` edges independently with probability `p`.
///
/// Uses geometric skipping over the lower-triangular edge enumeration, so the cost is
/// proportional to the number of edges produced rather than `n^2`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(invalid(format!("Erdős–Rényi needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut adjacency = vec![Vec::new(); n];
    if p > 0.0 {
        let mut rng = rng_from_seed(seed);
        let log_q = (1.0 - p).ln();
        // (v, w) walks the pairs w < v in row-major order.
        let mut v = 1usize;
        let mut w: isize = -1;
        while v < n {
            let r: f64 = rng.gen();
            let skip = ((1.0 - r).ln() / log_q).floor();
            w += 1 + skip.min(isize::MAX as f64 / 2.0) as isize;
            while v < n && w >= v as isize {
                w -= v as isize;
                v += 1;
            }
            if v < n {
                let u = w as usize;
                adjacency[v].push(u);
                adjacency[u].push(v);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
    }
    Ok(Graph::from_sorted_adjacency(adjacency))
}

/// Ring lattice with `k/2` neighbors per side, then each lattice edge `(u, u+j)` is rewired
/// with probability `beta` to `(u, w)` for a uniform `w` that avoids loops and duplicates.
/// Rewiring is skipped for a vertex that is already adjacent to every other vertex.
pub fn gen_watts_strogatz(n: usize, k: usize, beta: f64, seed: u64) -> Result<Graph, GraphError> {
    if !k.is_multiple_of(2) || k < 2 || k >= n {
        return Err(invalid(format!(
            "Watts–Strogatz degree must be even with 2 <= K < n, got K = {k}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(invalid(format!(
            "rewiring probability {beta} outside [0, 1]"
        )));
    }
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
    }
    let mut rng = rng_from_seed(seed);
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.gen::<f64>() >= beta {
                continue;
            }
            if adjacency[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adjacency[u].contains(&w) {
                    break w;
                }
            };
            adjacency[u].remove(&v);
            adjacency[v].remove(&u);
            adjacency[u].insert(w);
            adjacency[w].insert(u);
        }
    }
    Ok(Graph::from_sorted_adjacency(
        adjacency
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    ))
}

/// Preferential attachment grown from the complete graph on `m0 + 1` vertices. Each new vertex
/// picks `m0` distinct targets, each draw proportional to current degree among those not yet
/// picked.
pub fn gen_barabasi_albert(n: usize, m0: usize, seed: u64) -> Result<Graph, GraphError> {
    if m0 < 1 || m0 >= n {
        return Err(invalid(format!(
            "Barabási–Albert needs 1 <= m0 < n, got m0 = {m0}, n = {n}"
        )));
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Each vertex appears once per incident edge.
    let mut endpoints = Vec::with_capacity(2 * (m0 * (m0 + 1) / 2 + m0 * n));
    for u in 0..=m0 {
        for v in u + 1..=m0 {
            adjacency[u].push(v);
            adjacency[v].push(u);
            endpoints.extend([u, v]);
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut targets = BTreeSet::new();
    for v in m0 + 1..n {
        targets.clear();
        while targets.len() < m0 {
            targets.insert(endpoints[rng.gen_range(0..endpoints.len())]);
        }
        for &t in &targets {
            adjacency[v].push(t);
            adjacency[t].push(v);
            endpoints.extend([v, t]);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(Graph::from_sorted_adjacency(adjacency))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphModel {
    #[serde(rename = "er")]
    ErdosRenyi,
    #[serde(rename = "ws")]
    WattsStrogatz,
    #[serde(rename = "ba")]
    BarabasiAlbert,
}

impl GraphModel {
    pub const ALL: [GraphModel; 3] = [
        GraphModel::ErdosRenyi,
        GraphModel::WattsStrogatz,
        GraphModel::BarabasiAlbert,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi => "er",
            GraphModel::WattsStrogatz => "ws",
            GraphModel::BarabasiAlbert => "ba",
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for GraphModel {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "er" | "erdos-renyi" | "erdos_renyi" => Ok(GraphModel::ErdosRenyi),
            "ws" | "watts-strogatz" | "watts_strogatz" => Ok(GraphModel::WattsStrogatz),
            "ba" | "barabasi-albert" | "barabasi_albert" => Ok(GraphModel::BarabasiAlbert),
            other => Err(invalid(format!("unknown graph model {other:?}"))),
        }
    }
}

/// Random-model parameters. `None` fields follow the `n`-dependent default rules
/// ([`default_er_probability`], [`default_ws_degree`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub model: GraphModel,
    pub er_p: Option<f64>,
    pub ws_k: Option<usize>,
    pub ws_beta: f64,
    pub ba_m0: usize,
}

impl ModelParams {
    pub fn defaults(model: GraphModel) -> Self {
        Self {
            model,
            er_p: None,
            ws_k: None,
            ws_beta: DEFAULT_WS_BETA,
            ba_m0: DEFAULT_BA_M0,
        }
    }

    pub fn er_p_for(&self, n: usize) -> f64 {
        self.er_p.unwrap_or_else(|| default_er_probability(n))
    }

    pub fn ws_k_for(&self, n: usize) -> usize {
        self.ws_k.unwrap_or_else(|| default_ws_degree(n))
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Graph, GraphError> {
        match self.model {
            GraphModel::ErdosRenyi => gen_erdos_renyi(n, self.er_p_for(n), seed),
            GraphModel::WattsStrogatz => {
                gen_watts_strogatz(n, self.ws_k_for(n), self.ws_beta, seed)
            }
            GraphModel::BarabasiAlbert => gen_barabasi_albert(n, self.ba_m0, seed),
        }
    }
}
