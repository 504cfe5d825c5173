//! Piecewise-linear finite elements on a metric graph.
//!
//! Each edge is subdivided into uniform cells; element functions are
//! continuous across vertices (continuity is built into the shared vertex
//! degree of freedom) and the coupling strength alpha(v) is added once to
//! the stiffness diagonal at the vertex dof — the weak form of the vertex
//! coupling condition. The discrete problem is the generalized symmetric
//! eigenproblem `K x = lambda M x` with M positive definite.
//!
//! Two solution paths are provided:
//!
//! - a dense path (`fem_eigen`) that reduces by Cholesky and runs the Jacobi
//!   eigensolver — used for convergence studies on small meshes;
//! - spectrum slicing (`count_below`, `eigenvalue`) through the inertia of
//!   `K - sigma M`, computed by eliminating edge-interior unknowns chain by
//!   chain (each edge is a tridiagonal run whose pivots can be counted in
//!   O(cells)) and then factoring the small vertex block. Counts are exact,
//!   so bisection locates any eigenvalue to near machine precision.

use thiserror::Error;

use crate::graph::{Diagnostic, MetricGraph};
use crate::linalg::{sym_eigen, DenseMatrix};

/// Cap on total degrees of freedom.
pub const DOF_CAP: usize = 20_000;
/// Above this the dense path refuses and slicing must be used.
pub const DENSE_DOF_CAP: usize = 3_000;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("graph failed validation: {0:?}")]
    Unvalidated(Vec<Diagnostic>),
    #[error("mesh size must be positive")]
    BadMeshSize,
    #[error("mesh has {0} dof, exceeding the cap {DOF_CAP}")]
    MeshTooLarge(usize),
    #[error("dense eigensolve limited to {DENSE_DOF_CAP} dof, mesh has {0}")]
    DenseTooLarge(usize),
    #[error("requested {got} eigenvalues from a mesh with {want} dof")]
    CountExceedsDof { got: usize, want: usize },
}

/// One meshed edge: `cells` uniform cells of width `delta` joining the two
/// vertex dofs.
#[derive(Debug, Clone)]
struct Chain {
    tail: usize,
    head: usize,
    cells: usize,
    delta: f64,
}

/// A mesh over a metric graph.
#[derive(Debug, Clone)]
pub struct FemDiscretization {
    nv: usize,
    ndof: usize,
    alpha: Vec<f64>,
    chains: Vec<Chain>,
}

/// Mesh every edge with cells of width at most `h`.
pub fn fem_discretize(g: &MetricGraph, h: f64) -> Result<FemDiscretization, FemError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(FemError::BadMeshSize);
    }
    g.require_valid()
        .map_err(|_| FemError::Unvalidated(g.validate()))?;
    let nv = g.vertex_count();
    let mut chains = Vec::with_capacity(g.edge_count());
    let mut ndof = nv;
    for e in g.edges() {
        let cells = (e.length / h).ceil() as usize;
        let cells = cells.max(1);
        ndof += cells - 1;
        chains.push(Chain {
            tail: e.tail,
            head: e.head,
            cells,
            delta: e.length / cells as f64,
        });
    }
    if ndof > DOF_CAP {
        return Err(FemError::MeshTooLarge(ndof));
    }
    Ok(FemDiscretization {
        nv,
        ndof,
        alpha: g.alpha().to_vec(),
        chains,
    })
}

impl FemDiscretization {
    pub fn dof(&self) -> usize {
        self.ndof
    }

    pub fn vertex_count(&self) -> usize {
        self.nv
    }

    /// Number of eigenvalues of the pencil strictly below `sigma`
    /// (inertia of `K - sigma M`).
    ///
    /// Interior unknowns of each edge are eliminated first; the elimination
    /// pivots carry their signs, and the accumulated Schur complement lands
    /// on the vertex block, whose inertia is read off a dense eigensolve.
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut block = DenseMatrix::zeros(self.nv);
        for (v, &a) in self.alpha.iter().enumerate() {
            block.add(v, v, a);
        }
        let mut negative = 0usize;
        for ch in &self.chains {
            let delta = ch.delta;
            let diag_end = 1.0 / delta - sigma * delta / 3.0;
            let diag_int = 2.0 / delta - sigma * 2.0 * delta / 3.0;
            let off = -1.0 / delta - sigma * delta / 6.0;
            block.add(ch.tail, ch.tail, diag_end);
            block.add(ch.head, ch.head, diag_end);
            if ch.cells == 1 {
                block.add(ch.tail, ch.head, off);
                block.add(ch.head, ch.tail, off);
                continue;
            }
            // Eliminate the interior run u_1..u_{cells-1}; track the running
            // pivot and the fill-in coupling from the tail vertex.
            let pivmin = f64::MIN_POSITIVE.sqrt() * (2.0 / delta + sigma.abs() * delta);
            let mut d = diag_int;
            let mut coupling_tail = off;
            let mut schur_tail_tail = 0.0;
            for step in 1..ch.cells {
                let mut p = d;
                if p.abs() < pivmin {
                    p = -pivmin;
                }
                if p < 0.0 {
                    negative += 1;
                }
                let last = step == ch.cells - 1;
                schur_tail_tail += -coupling_tail * coupling_tail / p;
                if last {
                    // Neighbors of the last interior node: tail fill-in and head.
                    block.add(ch.tail, ch.head, -coupling_tail * off / p);
                    block.add(ch.head, ch.tail, -coupling_tail * off / p);
                    block.add(ch.head, ch.head, -off * off / p);
                } else {
                    coupling_tail = -coupling_tail * off / p;
                    d = diag_int - off * off / p;
                }
            }
            block.add(ch.tail, ch.tail, schur_tail_tail);
        }
        let eig = sym_eigen(&block);
        let tol = 1e-12 * eig.spectral_norm().max(1.0);
        negative + eig.values.iter().filter(|&&v| v < -tol).count()
    }

    /// Negative-eigenvalue count of the pencil.
    pub fn kappa_minus(&self) -> usize {
        self.count_below(0.0)
    }

    /// The j-th eigenvalue (0-based, ascending) by bisection on the exact
    /// count function. Accurate to `rel_tol` relative (floored near zero).
    pub fn eigenvalue(&self, j: usize, rel_tol: f64) -> Result<f64, FemError> {
        if j >= self.ndof {
            return Err(FemError::CountExceedsDof {
                got: j + 1,
                want: self.ndof,
            });
        }
        let mut lo = -1.0;
        while self.count_below(lo) > j {
            lo *= 4.0;
            assert!(lo > -1e150, "runaway lower bound");
        }
        let mut hi = 1.0;
        while self.count_below(hi) <= j {
            hi *= 4.0;
            assert!(hi < 1e150, "runaway upper bound");
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) <= j {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= rel_tol * mid.abs().max(1e-12) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Lowest eigenvalue, the quantum-side ground energy at this mesh.
    pub fn lowest_eigenvalue(&self) -> Result<f64, FemError> {
        self.eigenvalue(0, 1e-12)
    }

    /// Assemble dense stiffness and mass matrices (small meshes only).
    pub fn assemble_dense(&self) -> Result<(DenseMatrix, DenseMatrix), FemError> {
        if self.ndof > DENSE_DOF_CAP {
            return Err(FemError::DenseTooLarge(self.ndof));
        }
        let mut k = DenseMatrix::zeros(self.ndof);
        let mut m = DenseMatrix::zeros(self.ndof);
        let mut next_interior = self.nv;
        for ch in &self.chains {
            let delta = ch.delta;
            let mut prev = ch.tail;
            for cell in 0..ch.cells {
                let cur = if cell == ch.cells - 1 {
                    ch.head
                } else {
                    let idx = next_interior;
                    next_interior += 1;
                    idx
                };
                k.add(prev, prev, 1.0 / delta);
                k.add(cur, cur, 1.0 / delta);
                k.add(prev, cur, -1.0 / delta);
                k.add(cur, prev, -1.0 / delta);
                m.add(prev, prev, delta / 3.0);
                m.add(cur, cur, delta / 3.0);
                m.add(prev, cur, delta / 6.0);
                m.add(cur, prev, delta / 6.0);
                prev = cur;
            }
        }
        for (v, &a) in self.alpha.iter().enumerate() {
            k.add(v, v, a);
        }
        Ok((k, m))
    }
}

/// Result of a dense generalized eigensolve: ascending eigenvalues and the
/// matching eigenvectors (including interior dofs; the first
/// `vertex_count()` components are the vertex traces).
#[derive(Debug, Clone)]
pub struct FemEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Dense generalized symmetric eigensolve via Cholesky reduction.
pub fn fem_eigen(disc: &FemDiscretization, count: usize) -> Result<FemEigen, FemError> {
    if count > disc.ndof {
        return Err(FemError::CountExceedsDof {
            got: count,
            want: disc.ndof,
        });
    }
    let (k, m) = disc.assemble_dense()?;
    let n = disc.ndof;
    // Cholesky M = L L^T.
    let mut l = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.get(i, j);
            for p in 0..j {
                s -= l.get(i, p) * l.get(j, p);
            }
            if i == j {
                assert!(s > 0.0, "mass matrix must be positive definite");
                l.set(i, i, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    // W = L^{-1} K L^{-T}, assembled column by column.
    let mut w = DenseMatrix::zeros(n);
    for col in 0..n {
        // Solve L y = K e_col-ish: first form K column, then forward solve.
        let mut y: Vec<f64> = (0..n).map(|r| k.get(r, col)).collect();
        for r in 0..n {
            let mut s = y[r];
            for p in 0..r {
                s -= l.get(r, p) * y[p];
            }
            y[r] = s / l.get(r, r);
        }
        for r in 0..n {
            w.set(r, col, y[r]);
        }
    }
    // Right factor: (L^{-1} (L^{-1} K)^T)^T applied the same way.
    let mut wt = DenseMatrix::zeros(n);
    for col in 0..n {
        let mut y: Vec<f64> = (0..n).map(|r| w.get(col, r)).collect();
        for r in 0..n {
            let mut s = y[r];
            for p in 0..r {
                s -= l.get(r, p) * y[p];
            }
            y[r] = s / l.get(r, r);
        }
        for r in 0..n {
            wt.set(col, r, y[r]);
        }
    }
    let eig = sym_eigen(&wt);
    // Back-substitute eigenvectors: x = L^{-T} y.
    let mut vectors = Vec::with_capacity(count);
    for j in 0..count {
        let mut x = eig.vectors[j].clone();
        for r in (0..n).rev() {
            let mut s = x[r];
            for p in (r + 1)..n {
                s -= l.get(p, r) * x[p];
            }
            x[r] = s / l.get(r, r);
        }
        vectors.push(x);
    }
    Ok(FemEigen {
        values: eig.values[..count].to_vec(),
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_indices;

    fn interval(l: f64, a0: f64, a1: f64) -> MetricGraph {
        graph_from_indices(&[a0, a1], &[(0, 1, l)]).unwrap()
    }

    #[test]
    fn neumann_interval_eigenvalues_converge_quadratically() {
        let g = interval(std::f64::consts::PI, 0.0, 0.0);
        let exact = [0.0, 1.0, 4.0, 9.0];
        let disc = fem_discretize(&g, std::f64::consts::PI / 64.0).unwrap();
        let eig = fem_eigen(&disc, 4).unwrap();
        for (got, want) in eig.values.iter().zip(&exact) {
            assert!(
                (got - want).abs() <= 0.01 * want.max(1e-9) + 1e-9,
                "lambda {got} vs {want}"
            );
        }
        // Error shrinks by about 4 per halving.
        let disc2 = fem_discretize(&g, std::f64::consts::PI / 128.0).unwrap();
        let eig2 = fem_eigen(&disc2, 4).unwrap();
        for j in 1..4 {
            let e1 = eig.values[j] - exact[j];
            let e2 = eig2.values[j] - exact[j];
            let ratio = e1 / e2;
            assert!(ratio > 2.5 && ratio < 6.0, "refinement ratio {ratio}");
        }
    }

    #[test]
    fn refinement_is_monotone_from_above() {
        let g = graph_from_indices(
            &[0.0, -1.5, 0.3],
            &[(0, 1, 0.8), (1, 2, 1.3)],
        )
        .unwrap();
        let coarse = fem_eigen(&fem_discretize(&g, 0.2).unwrap(), 5).unwrap();
        let fine = fem_eigen(&fem_discretize(&g, 0.1).unwrap(), 5).unwrap();
        for (c, f) in coarse.values.iter().zip(&fine.values) {
            assert!(f <= &(c + 1e-12));
        }
    }

    #[test]
    fn ground_state_of_symmetric_well_is_symmetric() {
        let g = interval(1.0, -1.0, -1.0);
        let disc = fem_discretize(&g, 1.0 / 64.0).unwrap();
        let eig = fem_eigen(&disc, 1).unwrap();
        let v = &eig.vectors[0];
        assert!((v[0] - v[1]).abs() < 1e-8 * v[0].abs().max(1e-3));
        assert!(eig.values[0] < 0.0);
    }

    #[test]
    fn slicing_matches_dense_counts_and_values() {
        let g = graph_from_indices(
            &[-2.0, 0.5, -1.0, 0.0],
            &[(0, 1, 0.7), (1, 2, 1.1), (2, 3, 0.5), (3, 0, 0.9)],
        )
        .unwrap();
        let disc = fem_discretize(&g, 0.05).unwrap();
        let dense = fem_eigen(&disc, 6).unwrap();
        assert_eq!(
            disc.kappa_minus(),
            dense.values.iter().filter(|&&v| v < -1e-10).count()
        );
        for j in 0..6 {
            let sliced = disc.eigenvalue(j, 1e-11).unwrap();
            assert!(
                (sliced - dense.values[j]).abs() < 1e-7 * (1.0 + dense.values[j].abs()),
                "j={j}: {sliced} vs {}",
                dense.values[j]
            );
        }
        // Counting function is consistent with the located eigenvalues.
        let mid = 0.5 * (dense.values[2] + dense.values[3]);
        assert_eq!(disc.count_below(mid), 3);
    }

    #[test]
    fn kappa_is_mesh_independent() {
        let g = graph_from_indices(
            &[-3.0, 1.0, -0.5],
            &[(0, 1, 1.4), (1, 2, 0.6), (2, 0, 1.0)],
        )
        .unwrap();
        let k1 = fem_discretize(&g, 0.3).unwrap().kappa_minus();
        let k2 = fem_discretize(&g, 0.15).unwrap().kappa_minus();
        let k3 = fem_discretize(&g, 0.02).unwrap().kappa_minus();
        assert_eq!(k1, k2);
        assert_eq!(k2, k3);
    }

    #[test]
    fn caps_and_errors() {
        let g = interval(1.0, 0.0, 0.0);
        assert!(matches!(
            fem_discretize(&g, 0.0),
            Err(FemError::BadMeshSize)
        ));
        assert!(matches!(
            fem_discretize(&g, 1.0 / 30000.0),
            Err(FemError::MeshTooLarge(_))
        ));
        let disc = fem_discretize(&g, 0.5).unwrap();
        assert!(matches!(
            fem_eigen(&disc, 100),
            Err(FemError::CountExceedsDof { .. })
        ));
    }
}
