//! Simple undirected graphs in compressed adjacency form, plus the edge-list
//! file format used by the CLI.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Neighbors of each vertex are stored sorted in one flat array; `offsets[v]..offsets[v + 1]`
/// is the neighbor range of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicates (in either
    /// orientation) and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    /// Caller guarantees each list is sorted, duplicate-free, symmetric and loop-free.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adjacency.iter().map(Vec::len).sum());
        for list in adjacency {
            targets.extend(list);
            offsets.push(targets.len());
        }
        let g = Self { offsets, targets };
        debug_assert!(g.validate().is_ok());
        g
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|v| (0..n).filter(|&w| w != v).collect())
            .collect();
        Self::from_sorted_adjacency(adjacency)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle edges are simple")
    }

    /// Star with center 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Number of ordered adjacent pairs, i.e. twice the edge count.
    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Position of the arc `(v, w)` in the flat neighbor array, if `w` is adjacent to `v`.
    pub fn arc_index(&self, v: usize, w: usize) -> Option<usize> {
        self.neighbors(v)
            .binary_search(&w)
            .ok()
            .map(|k| self.offsets[v] + k)
    }

    pub(crate) fn arc_range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// Edges with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Checks every structural invariant: sorted, loop-free, duplicate-free, symmetric, in range.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertex_count();
        for v in 0..n {
            let nbrs = self.neighbors(v);
            for (k, &w) in nbrs.iter().enumerate() {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
                if w == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if k > 0 && nbrs[k - 1] >= w {
                    return Err(GraphError::DuplicateEdge(v.min(w), v.max(w)));
                }
                if !self.has_edge(w, v) {
                    return Err(GraphError::InvalidParameter(format!(
                        "asymmetric adjacency {v}->{w}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Hop distances from `source`, `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or_default();
            for &w in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        match self.vertex_count() {
            0 => true,
            _ => self.bfs_distances(0).iter().all(Option::is_some),
        }
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = format!("n {}\n", self.vertex_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list format: a header `n <count>` followed by one `u v` pair per line.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self, EdgeListError> {
        let parse_err = |line: usize, message: String| EdgeListError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header `n <count>`".into()))?;
        let mut fields = header.split_whitespace();
        let n = match (fields.next(), fields.next(), fields.next()) {
            (Some("n"), Some(count), None) => count
                .parse::<usize>()
                .map_err(|e| parse_err(header_line, format!("bad vertex count: {e}")))?,
            _ => return Err(parse_err(header_line, "expected header `n <count>`".into())),
        };

        let mut adjacency = vec![Vec::new(); n];
        for (line, content) in lines {
            let mut fields = content.split_whitespace();
            let (u, v) = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => {
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|e| parse_err(line, format!("bad vertex id {s:?}: {e}")))
                    };
                    (parse(a)?, parse(b)?)
                }
                _ => return Err(parse_err(line, format!("expected `u v`, got {content:?}"))),
            };
            for x in [u, v] {
                if x >= n {
                    return Err(parse_err(
                        line,
                        format!("vertex {x} out of range for n = {n}"),
                    ));
                }
            }
            if u == v {
                return Err(parse_err(line, format!("self-loop at vertex {u}")));
            }
            if adjacency[u].contains(&v) {
                return Err(parse_err(line, format!("duplicate edge {u}-{v}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self, EdgeListError> {
        Self::parse_edge_list(&fs::read_to_string(path)?)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<(), EdgeListError> {
        fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }
}
