use super::Graph;
use crate::error::{Error, Result};

/// Upper bound on `n` for the dense eigensolver.
pub const MAX_DENSE_VERTICES: usize = 5000;

/// Eigenvalues at or below this are treated as zero when testing connectivity.
const CONNECTIVITY_EPS: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Second-smallest Laplacian eigenvalue.
    pub algebraic_connectivity: f64,
    /// All Laplacian eigenvalues, ascending.
    pub laplacian_eigenvalues: Vec<f64>,
}

/// Computes the Laplacian spectrum of a connected graph and its algebraic
/// connectivity.
pub fn algebraic_connectivity(g: &Graph) -> Result<SpectralReport> {
    let n = g.n();
    if n > MAX_DENSE_VERTICES {
        return Err(Error::Capacity {
            n,
            limit: MAX_DENSE_VERTICES,
        });
    }
    let mut dense = vec![0.0; n * n];
    for (i, row) in g.laplacian().iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            dense[i * n + j] = v as f64;
        }
    }
    let eigenvalues = jacobi_eigenvalues(dense, n);
    let alpha = eigenvalues[1];
    if alpha <= CONNECTIVITY_EPS {
        return Err(Error::Disconnected {
            components: g.component_count(),
        });
    }
    Ok(SpectralReport {
        algebraic_connectivity: alpha,
        laplacian_eigenvalues: eigenvalues,
    })
}

/// Eigenvalues of a dense symmetric `n x n` matrix (row-major) by cyclic
/// Jacobi rotations, returned in ascending order.
///
/// Sweeps stop once the off-diagonal Frobenius norm is at most
/// `1e-12 * ||A||_F`.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-12 * norm;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }

    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    diag.sort_by(f64::total_cmp);
    diag
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

// Zeroes a[p][q] with a similarity rotation in the (p, q) plane.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_complete, build_cycle, build_path};
    use std::f64::consts::PI;

    #[test]
    fn cycle_ten() {
        let r = algebraic_connectivity(&build_cycle(10).unwrap()).unwrap();
        let exact = 2.0 * (1.0 - (2.0 * PI / 10.0).cos());
        assert!((r.algebraic_connectivity - exact).abs() < 1e-12);
        assert!((r.algebraic_connectivity - 0.3819660).abs() < 1e-7);
        assert!(r.laplacian_eigenvalues[0].abs() < 1e-9 * 10.0);
    }

    #[test]
    fn complete_and_path() {
        let r = algebraic_connectivity(&build_complete(4).unwrap()).unwrap();
        assert!((r.algebraic_connectivity - 4.0).abs() < 1e-12);
        for &ev in &r.laplacian_eigenvalues[1..] {
            assert!((ev - 4.0).abs() < 1e-12);
        }
        let r = algebraic_connectivity(&build_path(2).unwrap()).unwrap();
        assert!((r.algebraic_connectivity - 2.0).abs() < 1e-14);
    }

    #[test]
    fn path_spectrum_matches_closed_form() {
        // Path P_n Laplacian eigenvalues: 2 - 2 cos(k pi / n), k = 0..n-1.
        let n = 9;
        let r = algebraic_connectivity(&build_path(n).unwrap()).unwrap();
        for (k, &ev) in r.laplacian_eigenvalues.iter().enumerate() {
            let exact = 2.0 - 2.0 * (k as f64 * PI / n as f64).cos();
            assert!((ev - exact).abs() < 1e-11, "k={k}: {ev} vs {exact}");
        }
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        match algebraic_connectivity(&g) {
            Err(Error::Disconnected { components }) => assert_eq!(components, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generic_symmetric_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let ev = jacobi_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2);
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }
}
