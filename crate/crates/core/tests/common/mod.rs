//! Shared test support: a dense reference walk, a small-graph corpus and brute-force
//! configuration filters. Nothing here calls the walk or enumeration code under test.

#![allow(dead_code)]

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use qss_core::{Graph, MarkedReflection};

/// Adjacency matrix as booleans, read once from the graph's edge list.
pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

/// `P[(w, v)]` of the uniform walk, with marked columns replaced by unit self-columns when
/// `absorb` is given.
pub fn dense_stochastic(adj: &[Vec<bool>], absorb: &[usize]) -> DMatrix<f64> {
    let n = adj.len();
    let mut p = DMatrix::zeros(n, n);
    for v in 0..n {
        if absorb.contains(&v) {
            p[(v, v)] = 1.0;
            continue;
        }
        let deg = adj[v].iter().filter(|&&b| b).count() as f64;
        for w in 0..n {
            if adj[v][w] {
                p[(w, v)] = 1.0 / deg;
            }
        }
    }
    p
}

pub fn swap_matrix(n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n * n, n * n);
    for v in 0..n {
        for w in 0..n {
            s[(w * n + v, v * n + w)] = 1.0;
        }
    }
    s
}

/// `sum_v s_v (2 |psi_v><psi_v| - I_v)` with `psi_v = |v> (x) sum_w sqrt(P(w, v)) |w>`.
pub fn dense_first_reflection(p: &DMatrix<f64>, signs: &[f64]) -> DMatrix<f64> {
    let n = p.nrows();
    let mut r = DMatrix::zeros(n * n, n * n);
    for v in 0..n {
        let mut psi = DVector::zeros(n * n);
        for w in 0..n {
            psi[v * n + w] = p[(w, v)].sqrt();
        }
        let mut block = &psi * psi.transpose() * 2.0;
        for w in 0..n {
            block[(v * n + w, v * n + w)] -= 1.0;
        }
        r += block * signs[v];
    }
    r
}

/// Dense `R2 R1` with `R2 = Swap R1 Swap`.
pub fn dense_operator(g: &Graph, marked: &[usize], reflection: MarkedReflection) -> DMatrix<f64> {
    let adj = adjacency(g);
    let n = adj.len();
    let (p, signs) = match reflection {
        MarkedReflection::PhaseFlip => {
            let signs = (0..n)
                .map(|v| if marked.contains(&v) { -1.0 } else { 1.0 })
                .collect::<Vec<_>>();
            (dense_stochastic(&adj, &[]), signs)
        }
        MarkedReflection::Absorbing => (dense_stochastic(&adj, marked), vec![1.0; n]),
    };
    let r1 = dense_first_reflection(&p, &signs);
    let s = swap_matrix(n);
    let r2 = &s * &r1 * &s;
    r2 * r1
}

/// Initial state of the unmodified uniform walk.
pub fn dense_initial(g: &Graph) -> DVector<f64> {
    let adj = adjacency(g);
    let n = adj.len();
    let p = dense_stochastic(&adj, &[]);
    let mut psi = DVector::zeros(n * n);
    for v in 0..n {
        for w in 0..n {
            psi[v * n + w] = (p[(w, v)] / n as f64).sqrt();
        }
    }
    psi
}

pub fn dense_success(state: &DVector<f64>, n: usize, marked: &[usize]) -> f64 {
    marked
        .iter()
        .map(|&v| (0..n).map(|w| state[v * n + w].powi(2)).sum::<f64>())
        .sum()
}

pub fn dense_trace(
    g: &Graph,
    marked: &[usize],
    reflection: MarkedReflection,
    steps: usize,
) -> Vec<f64> {
    let n = g.vertex_count();
    let u = dense_operator(g, marked, reflection);
    let mut state = dense_initial(g);
    let mut trace = vec![dense_success(&state, n, marked)];
    for _ in 0..steps {
        state = &u * state;
        trace.push(dense_success(&state, n, marked));
    }
    trace
}

/// Largest fraction of squared norm that a `+1` eigenvector of the search operator, inside the
/// subspace reachable from its own reflections, can put on pairs whose first register is
/// marked.
///
/// The subspace is spanned by the ordered adjacent pairs plus the self-pairs `(v, v)` that a
/// reflected column actually touches. Self-pairs outside every column are fixed by both
/// reflections and would make any marked set look localised, so they are excluded.
pub fn max_marked_localisation(g: &Graph, marked: &[usize], reflection: MarkedReflection) -> f64 {
    let adj = adjacency(g);
    let n = adj.len();
    let absorbed = reflection == MarkedReflection::Absorbing;
    let basis: Vec<usize> = (0..n * n)
        .filter(|&k| {
            let (v, w) = (k / n, k % n);
            adj[v][w] || (v == w && absorbed && marked.contains(&v))
        })
        .collect();
    let u = dense_operator(g, marked, reflection);
    let k = basis.len();
    let restricted = DMatrix::from_fn(k, k, |i, j| u[(basis[i], basis[j])]);
    // The subspace is invariant: columns restricted to it keep their full norm.
    for j in 0..k {
        let inside: f64 = (0..k).map(|i| restricted[(i, j)].powi(2)).sum();
        assert!((inside - 1.0).abs() < 1e-10, "subspace not invariant");
    }

    // +1 eigenspace = null space of (U - I), from the SVD.
    let shifted = restricted - DMatrix::identity(k, k);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let null: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 1e-9)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if null.is_empty() {
        return 0.0;
    }
    let b = DMatrix::from_columns(&null);
    let weights = DVector::from_iterator(
        k,
        basis.iter().map(|&idx| {
            if marked.contains(&(idx / n)) {
                1.0
            } else {
                0.0
            }
        }),
    );
    let m = b.transpose() * DMatrix::from_diagonal(&weights) * &b;
    SymmetricEigen::new(m).eigenvalues.max()
}

/// Bitmask graphs on at most 8 vertices: `rows[v]` has bit `w` set for each edge `vw`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    pub rows: Vec<u8>,
}

impl SmallGraph {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn to_graph(&self) -> Graph {
        let n = self.n();
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.rows[u] >> v & 1 == 1)
            .collect();
        Graph::from_edges(n, &edges).expect("valid small graph")
    }

    /// Adds vertex `n` adjacent to the vertices in `mask`.
    fn extend(&self, mask: u8) -> SmallGraph {
        let n = self.n();
        let mut rows = self.rows.clone();
        for (u, row) in rows.iter_mut().enumerate() {
            if mask >> u & 1 == 1 {
                *row |= 1 << n;
            }
        }
        rows.push(mask);
        SmallGraph { rows }
    }

    /// Largest edge code over all relabellings.
    fn canonical_code(&self) -> u64 {
        let n = self.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = 0;
        permutations(&mut perm, n, &mut |p| {
            let mut code = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    code = code << 1 | (self.rows[p[i]] >> p[j] & 1) as u64;
                }
            }
            best = best.max(code);
        });
        best
    }
}

fn permutations(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(perm);
        return;
    }
    for i in 0..k {
        permutations(perm, k - 1, visit);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        perm.swap(j, k - 1);
    }
}

/// One representative per isomorphism class on `1..=max_n` vertices, `max_n <= 7`, listed by
/// order.
pub fn nonisomorphic_graphs(max_n: usize) -> Vec<Vec<SmallGraph>> {
    assert!((1..=7).contains(&max_n));
    let mut levels = vec![vec![SmallGraph { rows: vec![0] }]];
    while levels.len() < max_n {
        let prev = levels.last().unwrap();
        let n = prev[0].n();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in prev {
            for mask in 0..(1u16 << n) {
                let h = g.extend(mask as u8);
                if seen.insert(h.canonical_code()) {
                    next.push(h);
                }
            }
        }
        levels.push(next);
    }
    levels
}

/// Every graph on 8 vertices up to isomorphism, with repeats: each one minus its last vertex
/// is isomorphic to some 7-vertex representative.
pub fn eight_vertex_cover(seven: &[SmallGraph]) -> impl Iterator<Item = SmallGraph> + '_ {
    seven
        .iter()
        .flat_map(|g| (0..=u8::MAX >> 1).map(move |mask| g.extend(mask)))
}

/// Connected induced subgraph check by flood fill.
pub fn induced_connected(adj: &[Vec<bool>], set: &[usize]) -> bool {
    let mut seen = vec![set[0]];
    let mut stack = vec![set[0]];
    while let Some(u) = stack.pop() {
        for &w in set {
            if adj[u][w] && !seen.contains(&w) {
                seen.push(w);
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Exceptional by definition, trying every two-colouring of the set.
pub fn exceptional_by_colourings(adj: &[Vec<bool>], set: &[usize]) -> bool {
    let k = set.len();
    let deg = |v: usize| adj[v].iter().filter(|&&b| b).count();
    let mut bipartitions = (0..1u32 << k).filter(|&mask| {
        (0..k)
            .all(|i| (i + 1..k).all(|j| !adj[set[i]][set[j]] || (mask >> i & 1) != (mask >> j & 1)))
    });
    match bipartitions.next() {
        None => true,
        Some(mask) => {
            let (mut a, mut b) = (0, 0);
            for (i, &v) in set.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a += deg(v);
                } else {
                    b += deg(v);
                }
            }
            a == b
        }
    }
}
