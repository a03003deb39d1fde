//! Column-stochastic transition matrices stored as sparse columns.

use crate::graph::Graph;
use crate::walk::WalkError;

const COLUMN_SUM_TOLERANCE: f64 = 1e-12;

/// Column `v` holds the distribution of the next vertex given the walker sits at `v`, as
/// `(target, weight)` pairs sorted by target.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    columns: Vec<Vec<(usize, f64)>>,
}

impl StochasticMatrix {
    /// Validates non-negativity, unit column sums, sorted unique supports and range.
    pub fn from_columns(columns: Vec<Vec<(usize, f64)>>) -> Result<Self, WalkError> {
        let n = columns.len();
        for (v, col) in columns.iter().enumerate() {
            let mut sum = 0.0;
            for (k, &(w, weight)) in col.iter().enumerate() {
                if w >= n {
                    return Err(WalkError::InvalidStochastic(format!(
                        "column {v} has target {w} outside 0..{n}"
                    )));
                }
                if k > 0 && col[k - 1].0 >= w {
                    return Err(WalkError::InvalidStochastic(format!(
                        "column {v} support is not strictly increasing"
                    )));
                }
                if weight.is_nan() || weight < 0.0 {
                    return Err(WalkError::InvalidStochastic(format!(
                        "column {v} has weight {weight} at {w}"
                    )));
                }
                sum += weight;
            }
            if (sum - 1.0).abs() > COLUMN_SUM_TOLERANCE {
                return Err(WalkError::InvalidStochastic(format!(
                    "column {v} sums to {sum}"
                )));
            }
        }
        Ok(Self { columns })
    }

    /// `P(w, v) = 1 / deg(v)` for every neighbor `w` of `v`.
    pub fn uniform(graph: &Graph) -> Result<Self, WalkError> {
        let columns = (0..graph.vertex_count())
            .map(|v| {
                let deg = graph.degree(v);
                if deg == 0 {
                    return Err(WalkError::IsolatedVertex(v));
                }
                let weight = 1.0 / deg as f64;
                Ok(graph.neighbors(v).iter().map(|&w| (w, weight)).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { columns })
    }

    /// Replaces the columns of `marked` vertices by the unit self-column.
    pub fn absorb_marked(&self, marked: &[usize]) -> Result<Self, WalkError> {
        if marked.is_empty() {
            return Err(WalkError::EmptyMarkedSet);
        }
        let mut columns = self.columns.clone();
        for &v in marked {
            if v >= columns.len() {
                return Err(WalkError::VertexOutOfRange(v));
            }
            columns[v] = vec![(v, 1.0)];
        }
        Ok(Self { columns })
    }

    pub fn vertex_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, v: usize) -> &[(usize, f64)] {
        &self.columns[v]
    }

    pub fn entry(&self, to: usize, from: usize) -> f64 {
        let col = &self.columns[from];
        col.binary_search_by_key(&to, |&(w, _)| w)
            .map(|k| col[k].1)
            .unwrap_or(0.0)
    }

    /// Every column must be supported on the closed neighborhood of its vertex, which is what the
    /// walk's pair layout can represent.
    pub fn check_support(&self, graph: &Graph) -> Result<(), WalkError> {
        if self.vertex_count() != graph.vertex_count() {
            return Err(WalkError::DimensionMismatch {
                expected: graph.vertex_count(),
                found: self.vertex_count(),
            });
        }
        for (v, col) in self.columns.iter().enumerate() {
            if let Some(&(w, _)) = col.iter().find(|&&(w, _)| w != v && !graph.has_edge(v, w)) {
                return Err(WalkError::InvalidStochastic(format!(
                    "column {v} puts weight on non-neighbor {w}"
                )));
            }
        }
        Ok(())
    }
}
