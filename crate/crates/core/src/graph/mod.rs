//! Undirected simple graphs and their linear-algebraic views.
//!
//! Edges are stored in canonical form: each pair `(i, j)` has `i < j`, and the
//! list is sorted lexicographically. Edge `e` in every matrix and in the
//! gossip engine refers to position `e` of that list.

mod io;
mod spectral;

pub use io::{format_edge_list, parse_edge_list, read_edge_list, write_edge_list};
pub use spectral::{
    algebraic_connectivity, jacobi_eigenvalues, SpectralReport, MAX_DENSE_VERTICES,
};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Endpoints are reordered so
    /// that `i < j` and the list is sorted. Self-loops, duplicates and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!(
                "graph needs at least 2 vertices, got {n}"
            )));
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut degrees = vec![0; n];
        for &(i, j) in &canon {
            degrees[i] += 1;
            degrees[j] += 1;
        }
        Ok(Graph {
            n,
            edges: canon,
            degrees,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut components = self.n;
        for &(i, j) in &self.edges {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
                components -= 1;
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Dense signed incidence matrix, one row per canonical edge.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let mut data = vec![0i8; self.m() * self.n];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            data[e * self.n + i] = 1;
            data[e * self.n + j] = -1;
        }
        IncidenceMatrix {
            rows: self.m(),
            cols: self.n,
            data,
        }
    }

    /// Combinatorial Laplacian `D - Adj`, built from degrees and adjacency.
    pub fn laplacian(&self) -> Vec<Vec<i64>> {
        let mut l = vec![vec![0i64; self.n]; self.n];
        for (i, row) in l.iter_mut().enumerate() {
            row[i] = self.degrees[i] as i64;
        }
        for &(i, j) in &self.edges {
            l[i][j] -= 1;
            l[j][i] -= 1;
        }
        l
    }
}

/// Dense edge-vertex incidence matrix with entries in {-1, 0, +1}.
///
/// Row `e = (i, j)` holds `+1` at column `i` (the smaller endpoint) and `-1`
/// at column `j`. `A x = 0` iff `x` is constant on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// `A x` for a vertex vector `x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(&a, &v)| a as f64 * v).sum())
            .collect()
    }

    /// `Aᵀ A`, computed exactly in integers.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let mut g = vec![vec![0i64; self.cols]; self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            for (p, &a) in row.iter().enumerate().filter(|(_, &a)| a != 0) {
                for (q, &b) in row.iter().enumerate().filter(|(_, &b)| b != 0) {
                    g[p][q] += a as i64 * b as i64;
                }
            }
        }
        g
    }
}

/// Ring `0 - 1 - ... - (n-1) - 0`.
pub fn build_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::invalid(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn build_path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("path needs n >= 2, got {n}")));
    }
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)))
}

pub fn build_complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// The connectivity radius `sqrt(ln n / n)` commonly used for geometric graphs.
pub fn default_rgg_radius(n: usize) -> f64 {
    ((n as f64).ln() / n as f64).sqrt()
}

/// Random geometric graph: `n` points uniform in the unit square, an edge
/// wherever two points are within distance `r`.
///
/// Returns [`Error::Disconnected`] if the sample is not connected.
pub fn build_random_geometric(n: usize, r: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "geometric graph needs n >= 2, got {n}"
        )));
    }
    if !(r > 0.0 && r <= std::f64::consts::SQRT_2) {
        return Err(Error::invalid(format!(
            "radius must lie in (0, sqrt 2], got {r}"
        )));
    }
    let points = sample_unit_square(n, seed);
    let r2 = r * r;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    match g.component_count() {
        1 => Ok(g),
        components => Err(Error::Disconnected { components }),
    }
}

fn sample_unit_square(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut stream = RandomStream::new(seed).derive(crate::rng::Purpose::Geometry, 0);
    (0..n)
        .map(|_| (stream.next_f64(), stream.next_f64()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_shapes() {
        let g = build_cycle(10).unwrap();
        assert_eq!((g.n(), g.m()), (10, 10));
        assert!(g.degrees().iter().all(|&d| d == 2));

        let g = build_cycle(3).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);

        let g = build_cycle(4).unwrap();
        assert_eq!(g.degrees(), &[2, 2, 2, 2]);
        assert_eq!(g.m(), 4);

        assert!(matches!(build_cycle(2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn complete_and_path() {
        assert_eq!(build_complete(3).unwrap(), build_cycle(3).unwrap());
        let k5 = build_complete(5).unwrap();
        assert_eq!(k5.m(), 10);
        assert!(k5.degrees().iter().all(|&d| d == 4));
        assert_eq!(build_path(2).unwrap().edges(), &[(0, 1)]);
        assert_eq!(build_path(7).unwrap().m(), 6);
        assert!(build_path(1).is_err());
        assert!(build_complete(1).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        let g = Graph::from_edges(3, [(2, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn incidence_single_edge() {
        let a = build_path(2).unwrap().incidence_matrix();
        assert_eq!(a.row(0), &[1, -1]);
    }

    #[test]
    fn incidence_rows_sum_to_zero() {
        let a = build_cycle(3).unwrap().incidence_matrix();
        assert_eq!((a.rows(), a.cols()), (3, 3));
        for r in 0..3 {
            assert_eq!(a.row(r).iter().map(|&v| v as i32).sum::<i32>(), 0);
        }
        assert!(a.apply(&[1.5; 3]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gram_equals_laplacian() {
        for g in [
            build_cycle(7).unwrap(),
            build_complete(6).unwrap(),
            build_path(5).unwrap(),
        ] {
            assert_eq!(g.incidence_matrix().gram(), g.laplacian());
        }
    }

    #[test]
    fn rgg_tiny_and_deterministic() {
        let g = build_random_geometric(2, std::f64::consts::SQRT_2, 3).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);

        let a = build_random_geometric(50, 0.3, 7).unwrap();
        let b = build_random_geometric(50, 0.3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.degrees().iter().sum::<usize>(), 2 * a.m());
    }

    #[test]
    fn rgg_disconnection_reports_components() {
        match build_random_geometric(30, 0.01, 1) {
            Err(Error::Disconnected { components }) => assert!(components > 1),
            other => panic!("expected disconnection, got {other:?}"),
        }
        assert!(build_random_geometric(10, 0.0, 1).is_err());
        assert!(build_random_geometric(10, 1.5, 1).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.component_count(), 2);
        assert!(build_cycle(5).unwrap().is_connected());
    }
}
