//! Weighted discrete Laplacians attached to a metric graph.
//!
//! The operator acts in the weighted space with vertex measure `m` as
//!
//! ```text
//! (H f)(v) = ( sum_u b(u,v) (f(v) - f(u)) + alpha(v) f(v) ) / m(v)
//! ```
//!
//! with `m(v)` the sum of incident edge lengths and `b(u,v)` the inverse
//! length of the connecting edge. The unitarily equivalent symmetrized form
//! (conjugation by multiplication with sqrt(m)) is what the eigensolver
//! consumes. Couplings are kept as adjacency rows (compressed sparse form);
//! dense matrices are materialized only for eigensolving, capped at
//! [`crate::linalg::BASIS_CAP`].

use thiserror::Error;

use crate::graph::{Diagnostic, MetricGraph};
use crate::linalg::{sym_eigen, DenseMatrix, SymEigen};

/// Relative factor defining the zero band of an eigensolve:
/// `tol_zero = ZERO_BAND_REL * ||Hـsym||`.
pub const ZERO_BAND_REL: f64 = 1e-10;

/// Instances with any |eigenvalue| below `NEAR_DEGENERATE_FACTOR * tol_zero`
/// are flagged and excluded from count-equality assertions.
pub const NEAR_DEGENERATE_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("graph failed validation: {0:?}")]
    Unvalidated(Vec<Diagnostic>),
    #[error("vector length {got} does not match basis size {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("interaction points must be strictly increasing")]
    NonMonotonePoints,
    #[error("point sequence must start at 0 with zero coupling there")]
    BadOrigin,
    #[error("operator has a non-finite entry")]
    NonFiniteEntry,
}

/// A self-adjoint operator in the weighted vertex space, stored as measure,
/// couplings and diagonal. Immutable; eigensolves on it can run in parallel.
#[derive(Debug, Clone)]
pub struct WeightedOperator {
    basis: Vec<String>,
    measure: Vec<f64>,
    alpha: Vec<f64>,
    /// Diagonal of both representations (conjugation preserves it).
    diag: Vec<f64>,
    /// rows[v] = (u, c) with coupling c > 0; the weighted entry is
    /// `-c / m(v)` and the symmetrized entry `-c / sqrt(m(u) m(v))`.
    rows: Vec<Vec<(usize, f64)>>,
}

/// Eigensolve output plus the zero-band bookkeeping used by negative counts.
#[derive(Debug, Clone)]
pub struct OperatorEigen {
    pub eigen: SymEigen,
    /// Absolute zero band: eigenvalues in (-tol_zero, tol_zero) count as 0.
    pub tol_zero: f64,
    /// Some eigenvalue lies within ten zero bands of 0.
    pub near_degenerate: bool,
}

impl OperatorEigen {
    pub fn kappa_minus(&self) -> usize {
        self.eigen.count_below(self.tol_zero)
    }
}

/// Jacobi (tridiagonal) specialization for interaction points on a half-line:
/// the operator together with its raw coefficient sequences.
#[derive(Debug, Clone)]
pub struct JacobiSpecialization {
    pub operator: WeightedOperator,
    /// Diagonal coefficients `a_k` for k = 1.. (interior convention).
    pub a: Vec<f64>,
    /// Off-diagonal coefficients `b_k` for k = 1..
    pub b: Vec<f64>,
}

impl WeightedOperator {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn coupling_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Entry of the weighted-space representation.
    pub fn h_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        for &(u, c) in &self.rows[i] {
            if u == j {
                return -c / self.measure[i];
            }
        }
        0.0
    }

    /// Entry of the symmetrized representation.
    pub fn sym_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        for &(u, c) in &self.rows[i] {
            if u == j {
                return -c / (self.measure[i] * self.measure[j]).sqrt();
            }
        }
        0.0
    }

    /// Apply the weighted-space representation.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, OperatorError> {
        if f.len() != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                got: f.len(),
                want: self.dim(),
            });
        }
        let mut out = vec![0.0; self.dim()];
        for v in 0..self.dim() {
            let mut acc = self.diag[v] * f[v];
            for &(u, c) in &self.rows[v] {
                acc -= c / self.measure[v] * f[u];
            }
            out[v] = acc;
        }
        Ok(out)
    }

    /// Materialize the symmetrized matrix (dense).
    pub fn symmetrized_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n);
        for v in 0..n {
            m.set(v, v, self.diag[v]);
            for &(u, c) in &self.rows[v] {
                m.set(v, u, -c / (self.measure[v] * self.measure[u]).sqrt());
            }
        }
        m
    }

    /// Materialize the weighted-space matrix (dense).
    pub fn weighted_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n);
        for v in 0..n {
            m.set(v, v, self.diag[v]);
            for &(u, c) in &self.rows[v] {
                m.set(v, u, -c / self.measure[v]);
            }
        }
        m
    }

    /// The quadratic form
    /// `1/2 sum_{u,v} b(u,v) |f(v) - f(u)|^2 + sum_v alpha(v) |f(v)|^2`,
    /// evaluated as the sum over couplings — never through the matrix.
    pub fn quadratic_form(&self, f: &[f64]) -> Result<f64, OperatorError> {
        if f.len() != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                got: f.len(),
                want: self.dim(),
            });
        }
        let mut acc = 0.0;
        for v in 0..self.dim() {
            for &(u, c) in &self.rows[v] {
                if u > v {
                    let d = f[v] - f[u];
                    acc += c * d * d;
                }
            }
            acc += self.alpha[v] * f[v] * f[v];
        }
        Ok(acc)
    }

    /// Dense symmetric eigensolve of the symmetrized representation.
    pub fn eigen(&self) -> Result<OperatorEigen, OperatorError> {
        let m = self.symmetrized_dense();
        if m.max_abs().is_nan() || !m.max_abs().is_finite() {
            return Err(OperatorError::NonFiniteEntry);
        }
        let eigen = sym_eigen(&m);
        let tol_zero = ZERO_BAND_REL * eigen.spectral_norm();
        let near_degenerate = eigen
            .values
            .iter()
            .any(|v| v.abs() < NEAR_DEGENERATE_FACTOR * tol_zero);
        Ok(OperatorEigen {
            eigen,
            tol_zero,
            near_degenerate,
        })
    }

    /// Total multiplicity of the negative spectrum.
    pub fn kappa_minus(&self) -> Result<usize, OperatorError> {
        Ok(self.eigen()?.kappa_minus())
    }

    fn from_graph_with_measure(
        g: &MetricGraph,
        measure: Vec<f64>,
    ) -> Result<WeightedOperator, OperatorError> {
        let (_, ew) = g
            .weights()
            .map_err(|_| OperatorError::Unvalidated(g.validate()))?;
        let n = g.vertex_count();
        let mut rows = vec![Vec::new(); n];
        let mut diag = vec![0.0f64; n];
        for v in 0..n {
            let mut b_sum = 0.0;
            for &(u, _) in g.neighbors(v) {
                let c = ew.b(u, v);
                rows[v].push((u, c));
                b_sum += c;
            }
            diag[v] = (g.alpha()[v] + b_sum) / measure[v];
        }
        Ok(WeightedOperator {
            basis: g.vertex_ids().to_vec(),
            measure,
            alpha: g.alpha().to_vec(),
            diag,
            rows,
        })
    }
}

/// Assemble the weighted Laplacian of a validated metric graph, with the
/// incident-length measure.
pub fn assemble(g: &MetricGraph) -> Result<WeightedOperator, OperatorError> {
    let (vw, _) = g
        .weights()
        .map_err(|_| OperatorError::Unvalidated(g.validate()))?;
    WeightedOperator::from_graph_with_measure(g, vw.m)
}

/// Contrast operator: identical couplings but the combinatorial degree as
/// vertex measure. On equilateral unit-length graphs it coincides with
/// [`assemble`]; with shrinking edges its spectrum decouples from the
/// metric-graph Hamiltonian, which is the point of the comparison.
pub fn degree_weighted_variant(g: &MetricGraph) -> Result<WeightedOperator, OperatorError> {
    let (vw, _) = g
        .weights()
        .map_err(|_| OperatorError::Unvalidated(g.validate()))?;
    let measure: Vec<f64> = vw.degree.iter().map(|&d| d as f64).collect();
    WeightedOperator::from_graph_with_measure(g, measure)
}

fn jacobi_checked(points: &[f64], alphas: &[f64]) -> Result<Vec<f64>, OperatorError> {
    if points.len() < 2 || alphas.len() != points.len() {
        return Err(OperatorError::DimensionMismatch {
            got: alphas.len(),
            want: points.len(),
        });
    }
    if points[0] != 0.0 || alphas[0] != 0.0 {
        return Err(OperatorError::BadOrigin);
    }
    let lengths: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
    if lengths.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return Err(OperatorError::NonMonotonePoints);
    }
    Ok(lengths)
}

fn jacobi_build(
    points: &[f64],
    alphas: &[f64],
    measure: Vec<f64>,
) -> Result<JacobiSpecialization, OperatorError> {
    let lengths = jacobi_checked(points, alphas)?;
    let n = lengths.len(); // vertices 0..=n
    let width = (n + 1).to_string().len();
    let basis: Vec<String> = (0..=n).map(|k| format!("x{k:0width$}")).collect();

    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 1..=n {
        let inv_prev = 1.0 / lengths[k - 1];
        let inv_next = if k < n { 1.0 / lengths[k] } else { 0.0 };
        a.push((alphas[k] + inv_prev + inv_next) / measure[k]);
        b.push(inv_prev / (measure[k - 1] * measure[k]).sqrt());
    }

    // Matrix layout: corner entry b_1, then a_k on the diagonal and -b_k on
    // the two off-diagonals, exactly the three-term recurrence written as a
    // tridiagonal matrix.
    let mut diag = vec![0.0; n + 1];
    diag[0] = b[0];
    for k in 1..=n {
        diag[k] = a[k - 1];
    }
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + 1];
    for k in 1..=n {
        // Store the coupling c with symmetrized entry -c/sqrt(m_{k-1} m_k):
        // c = b_k * sqrt(m_{k-1} m_k).
        let c = b[k - 1] * (measure[k - 1] * measure[k]).sqrt();
        rows[k - 1].push((k, c));
        rows[k].push((k - 1, c));
    }
    Ok(JacobiSpecialization {
        operator: WeightedOperator {
            basis,
            measure,
            alpha: alphas.to_vec(),
            diag,
            rows,
        },
        a,
        b,
    })
}

/// Tridiagonal specialization for a half-line of interaction points
/// `0 = x_0 < x_1 < ...` with couplings `alphas` (the coupling at the origin
/// must be zero). Measure is the incident-length sum.
pub fn jacobi_from_points(
    points: &[f64],
    alphas: &[f64],
) -> Result<JacobiSpecialization, OperatorError> {
    let lengths = jacobi_checked(points, alphas)?;
    let n = lengths.len();
    let mut m = Vec::with_capacity(n + 1);
    m.push(lengths[0]);
    for k in 1..n {
        m.push(lengths[k - 1] + lengths[k]);
    }
    m.push(lengths[n - 1]);
    jacobi_build(points, alphas, m)
}

/// Same layout with the combinatorial degree as measure; used purely as the
/// contrast matrix in the comparison study.
pub fn jacobi_from_points_degree_weighted(
    points: &[f64],
    alphas: &[f64],
) -> Result<JacobiSpecialization, OperatorError> {
    let lengths = jacobi_checked(points, alphas)?;
    let n = lengths.len();
    let mut m = vec![2.0f64; n + 1];
    m[0] = 1.0;
    m[n] = 1.0;
    jacobi_build(points, alphas, m)
}
