//! Isoperimetric constants, spectral-gap bound checks, volume growth,
//! heat-kernel decay and coupling-strength sweeps.
//!
//! On a finite graph the plain isoperimetric ratio over the full vertex set
//! degenerates (the full set has empty boundary), so all bound checks here
//! run on Dirichlet restrictions to proper subsets: the submatrix of the
//! symmetrized Kirchhoff operator indexed by the domain, with couplings to
//! the outside retained in the diagonal. That is the finite analogue of the
//! ratio-versus-gap estimates this module verifies.

use serde::Serialize;
use thiserror::Error;

use crate::family::{FamilyError, GraphFamily};
use crate::graph::{GraphError, MetricGraph};
use crate::linalg::{line_fit, sym_eigen, DenseMatrix};
use crate::metrics::{path_metric, MetricError, MetricRule};
use crate::operator::{assemble, OperatorError};
use crate::secular::{kappa_minus_quantum, SecularError};

/// Exhaustive subset enumeration is capped at this domain size.
pub const EXACT_DOMAIN_CAP: usize = 22;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("exact enumeration limited to {EXACT_DOMAIN_CAP} vertices, domain has {0}")]
    DomainTooLarge(usize),
    #[error("domain must be a proper subset of the host vertex set")]
    DomainNotProper,
    #[error("coupling sweep requires nonnegative weights")]
    NegativeAlpha,
    #[error("dimension parameter must exceed 2")]
    BadDimension,
    #[error("fit window contains fewer than two samples")]
    EmptyFitWindow,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Secular(#[from] SecularError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoMethod {
    Exact,
    Greedy,
}

/// Infimum of boundary-edge count (optionally plus interior coupling mass)
/// over vertex mass, across nonempty subsets of the domain.
#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricResult {
    pub constant: f64,
    pub argmin: Vec<String>,
    pub method: IsoMethod,
    pub alpha_modified: bool,
}

fn domain_indices(g: &MetricGraph, domain: &[String]) -> Result<Vec<usize>, EstimateError> {
    if domain.is_empty() {
        return Err(EstimateError::EmptyDomain);
    }
    domain
        .iter()
        .map(|id| {
            g.vertex_index(id)
                .ok_or_else(|| GraphError::NoSuchVertex(id.clone()).into())
        })
        .collect()
}

/// Ratio of a concrete subset: boundary edges counted in the host graph,
/// interior coupling mass added for the modified constant.
fn subset_ratio(
    g: &MetricGraph,
    m: &[f64],
    members: &[usize],
    in_x: &[bool],
    alpha_modified: bool,
) -> f64 {
    let mut boundary = 0usize;
    let mut mass = 0.0;
    let mut coupling = 0.0;
    for &v in members {
        mass += m[v];
        coupling += g.alpha()[v];
        for &(u, _) in g.neighbors(v) {
            if !in_x[u] {
                boundary += 1;
            }
        }
    }
    let numer = boundary as f64 + if alpha_modified { coupling } else { 0.0 };
    numer / mass
}

/// Exact or greedy isoperimetric constant of a domain inside a host graph.
///
/// Exact mode walks subsets in Gray-code order, updating the boundary count
/// and masses incrementally. Greedy mode sweeps prefix cuts along the
/// second-eigenvector ordering of the Dirichlet restriction; its value is an
/// upper bound for the exact constant.
pub fn isoperimetric(
    g: &MetricGraph,
    domain: &[String],
    alpha_modified: bool,
    method: IsoMethod,
) -> Result<IsoperimetricResult, EstimateError> {
    let (vw, _) = g.weights()?;
    let idx = domain_indices(g, domain)?;
    match method {
        IsoMethod::Exact => {
            let n = idx.len();
            if n > EXACT_DOMAIN_CAP {
                return Err(EstimateError::DomainTooLarge(n));
            }
            let mut in_x = vec![false; g.vertex_count()];
            let mut boundary = 0i64;
            let mut mass = 0.0f64;
            let mut coupling = 0.0f64;
            let mut best = f64::INFINITY;
            let mut best_mask = 0u64;
            let mut gray_prev = 0u64;
            for s in 1u64..(1u64 << n) {
                let gray = s ^ (s >> 1);
                let flipped = (gray ^ gray_prev).trailing_zeros() as usize;
                gray_prev = gray;
                let v = idx[flipped];
                let adding = gray & (1 << flipped) != 0;
                if adding {
                    let inside = g.neighbors(v).iter().filter(|&&(u, _)| in_x[u]).count();
                    boundary += g.degree(v) as i64 - 2 * inside as i64;
                    in_x[v] = true;
                    mass += vw.m[v];
                    coupling += g.alpha()[v];
                } else {
                    in_x[v] = false;
                    let inside = g.neighbors(v).iter().filter(|&&(u, _)| in_x[u]).count();
                    boundary -= g.degree(v) as i64 - 2 * inside as i64;
                    mass -= vw.m[v];
                    coupling -= g.alpha()[v];
                }
                let numer = boundary as f64 + if alpha_modified { coupling } else { 0.0 };
                let ratio = numer / mass;
                if ratio < best {
                    best = ratio;
                    best_mask = gray;
                }
            }
            // Recompute the winner from scratch so the reported pair is
            // exactly self-consistent.
            let members: Vec<usize> = (0..n)
                .filter(|j| best_mask & (1 << j) != 0)
                .map(|j| idx[j])
                .collect();
            let mut in_best = vec![false; g.vertex_count()];
            for &v in &members {
                in_best[v] = true;
            }
            let constant = subset_ratio(g, &vw.m, &members, &in_best, alpha_modified);
            let mut argmin: Vec<String> =
                members.iter().map(|&v| g.vertex_ids()[v].clone()).collect();
            argmin.sort();
            Ok(IsoperimetricResult {
                constant,
                argmin,
                method: IsoMethod::Exact,
                alpha_modified,
            })
        }
        IsoMethod::Greedy => {
            let order = fiedler_order(g, &idx)?;
            let mut in_x = vec![false; g.vertex_count()];
            let mut members = Vec::new();
            let mut best = f64::INFINITY;
            let mut best_len = 1;
            for (count, &v) in order.iter().enumerate() {
                in_x[v] = true;
                members.push(v);
                let ratio = subset_ratio(g, &vw.m, &members, &in_x, alpha_modified);
                if ratio < best {
                    best = ratio;
                    best_len = count + 1;
                }
            }
            let winners = &order[..best_len];
            let mut argmin: Vec<String> =
                winners.iter().map(|&v| g.vertex_ids()[v].clone()).collect();
            argmin.sort();
            Ok(IsoperimetricResult {
                constant: best,
                argmin,
                method: IsoMethod::Greedy,
                alpha_modified,
            })
        }
    }
}

/// Dirichlet restriction of the symmetrized Kirchhoff operator to a domain.
fn dirichlet_restriction(g: &MetricGraph, idx: &[usize]) -> Result<DenseMatrix, EstimateError> {
    let zero_alpha = g.with_alpha(vec![0.0; g.vertex_count()]);
    let op = assemble(&zero_alpha)?;
    let mut sub = DenseMatrix::zeros(idx.len());
    for (i, &v) in idx.iter().enumerate() {
        for (j, &u) in idx.iter().enumerate() {
            sub.set(i, j, op.sym_entry(v, u));
        }
    }
    Ok(sub)
}

fn fiedler_order(g: &MetricGraph, idx: &[usize]) -> Result<Vec<usize>, EstimateError> {
    let sub = dirichlet_restriction(g, idx)?;
    let eig = sym_eigen(&sub);
    let component = if idx.len() >= 2 { 1 } else { 0 };
    let fiedler = &eig.vectors[component];
    let mut order: Vec<(f64, usize)> = fiedler
        .iter()
        .zip(idx)
        .map(|(&x, &v)| (x, v))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    Ok(order.into_iter().map(|(_, v)| v).collect())
}

/// Spectral gap of a Dirichlet restriction against half the squared
/// isoperimetric constant of the same domain.
#[derive(Debug, Clone, Serialize)]
pub struct CheegerCheck {
    pub lambda_min_dirichlet: f64,
    pub constant: f64,
    pub half_c_squared: f64,
    pub holds: bool,
}

pub fn cheeger_bound_check(
    g: &MetricGraph,
    domain: &[String],
) -> Result<CheegerCheck, EstimateError> {
    let idx = domain_indices(g, domain)?;
    if idx.len() >= g.vertex_count() {
        return Err(EstimateError::DomainNotProper);
    }
    let iso = isoperimetric(g, domain, false, IsoMethod::Exact)?;
    let sub = dirichlet_restriction(g, &idx)?;
    let lambda_min = sym_eigen(&sub).values[0];
    let half_c_squared = 0.5 * iso.constant * iso.constant;
    Ok(CheegerCheck {
        lambda_min_dirichlet: lambda_min,
        constant: iso.constant,
        half_c_squared,
        holds: lambda_min + 1e-10 >= half_c_squared,
    })
}

/// Finite-radius exponential volume growth data of a family prefix.
///
/// Slopes are `(1/r) log m(B_r(root))` on a radius grid; the reported
/// numbers are estimates from a finite prefix, never a claimed limit.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeGrowth {
    pub radii: Vec<f64>,
    pub slopes: Vec<f64>,
    pub mu_estimate: f64,
    pub mu_lower_estimate: f64,
}

pub fn volume_growth(
    family: &GraphFamily,
    depth: usize,
    n_radii: usize,
) -> Result<VolumeGrowth, EstimateError> {
    let g = family.generate(depth)?;
    let (vw, _) = g.weights()?;
    let metric = path_metric(&g, &MetricRule::Natural)?;
    let root = 0usize;
    let dist = metric.distances_from(root);
    let r_max = dist.iter().cloned().fold(0.0f64, f64::max);
    let mut radii = Vec::with_capacity(n_radii);
    let mut slopes = Vec::with_capacity(n_radii);
    for j in 1..=n_radii {
        let r = r_max * j as f64 / n_radii as f64;
        let mass: f64 = (0..g.vertex_count())
            .filter(|&v| dist[v] <= r)
            .map(|v| vw.m[v])
            .sum();
        radii.push(r);
        slopes.push(mass.ln() / r);
    }
    let mu_estimate = *slopes.last().unwrap();
    // Normalized variant: worst vertex of log(m(B_r(v)) / m(B_1(v))) at the
    // largest radius.
    let mut mu_lower = f64::INFINITY;
    for v in 0..g.vertex_count() {
        let dv = metric.distances_from(v);
        let mass_r: f64 = (0..g.vertex_count())
            .filter(|&u| dv[u] <= r_max)
            .map(|u| vw.m[u])
            .sum();
        let mass_1: f64 = (0..g.vertex_count())
            .filter(|&u| dv[u] <= 1.0)
            .map(|u| vw.m[u])
            .sum();
        mu_lower = mu_lower.min((mass_r / mass_1).ln() / r_max);
    }
    Ok(VolumeGrowth {
        radii,
        slopes,
        mu_estimate,
        mu_lower_estimate: mu_lower,
    })
}

/// Heat-kernel sup decay `g(t) = sup over u, v of |P(t; u, v)|` with a
/// fitted power-law exponent over a log-log window.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub t: Vec<f64>,
    pub g: Vec<f64>,
    /// Large-time limit of g: the constant-mode mass when the kernel has a
    /// zero mode, zero otherwise.
    pub stationary: f64,
    pub exponent: f64,
    pub residual: f64,
    /// Which samples entered the fit.
    pub fitted: Vec<bool>,
}

/// Evaluate the decay profile of the semigroup kernel of the weighted
/// operator. `exclude_factor` drops late-time samples within that factor of
/// the stationary value before fitting (boundary saturation).
pub fn heat_decay(
    g: &MetricGraph,
    t_grid: &[f64],
    exclude_factor: Option<f64>,
) -> Result<DecayFit, EstimateError> {
    let op = assemble(g)?;
    let eig = op.eigen()?;
    let n = op.dim();
    let m = op.measure();
    // Orthonormal kernel modes with respect to the vertex measure.
    let phi: Vec<Vec<f64>> = eig
        .eigen
        .vectors
        .iter()
        .map(|vec| {
            vec.iter()
                .zip(m)
                .map(|(x, mm)| x / mm.sqrt())
                .collect::<Vec<f64>>()
        })
        .collect();
    let stationary = if eig.eigen.values[0].abs() <= eig.tol_zero {
        1.0 / m.iter().sum::<f64>()
    } else {
        0.0
    };
    let mut gs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        // The kernel is positive semidefinite, so the sup over all pairs is
        // attained on the diagonal.
        let mut sup = 0.0f64;
        for u in 0..n {
            let mut acc = 0.0;
            for (j, lam) in eig.eigen.values.iter().enumerate() {
                let w = (-t * lam).exp();
                acc += w * phi[j][u] * phi[j][u];
            }
            sup = sup.max(acc);
        }
        gs.push(sup);
    }
    let mut fitted = vec![true; t_grid.len()];
    if let Some(factor) = exclude_factor {
        for (flag, &gv) in fitted.iter_mut().zip(&gs) {
            if gv <= factor * stationary {
                *flag = false;
            }
        }
    }
    let xs: Vec<f64> = t_grid
        .iter()
        .zip(&fitted)
        .filter(|(_, &f)| f)
        .map(|(t, _)| t.ln())
        .collect();
    let ys: Vec<f64> = gs
        .iter()
        .zip(&fitted)
        .filter(|(_, &f)| f)
        .map(|(g, _)| g.ln())
        .collect();
    if xs.len() < 2 {
        return Err(EstimateError::EmptyFitWindow);
    }
    let (exponent, _, residual) = line_fit(&xs, &ys);
    Ok(DecayFit {
        t: t_grid.to_vec(),
        g: gs,
        stationary,
        exponent,
        residual,
        fitted,
    })
}

/// Weak sequence norm `sup_n n^(1/q) a~_n` over the decreasing
/// rearrangement of the values.
pub fn weak_lq_norm(values: &[f64], q: f64) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64).powf(1.0 / q) * v)
        .fold(0.0, f64::max)
}

/// One row of a coupling sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ClrRow {
    pub lambda: f64,
    pub kappa_discrete: usize,
    pub kappa_quantum: usize,
    /// `sum_v (lambda alpha(v) / m(v))^(D/2) m(v)` — the computable side of
    /// the negative-eigenvalue bound of dimension D.
    pub rhs: f64,
    /// Weak norm of `lambda alpha` with exponent q = D/2.
    pub weak_norm: f64,
    pub flagged: bool,
}

/// Sweep coupling strength: attach `-lambda alpha` as vertex couplings and
/// count negative eigenvalues on both sides of the correspondence.
pub fn clr_sweep(
    g: &MetricGraph,
    alpha: &[f64],
    dim: f64,
    lambdas: &[f64],
) -> Result<Vec<ClrRow>, EstimateError> {
    if alpha.iter().any(|&a| a < 0.0) {
        return Err(EstimateError::NegativeAlpha);
    }
    if !(dim > 2.0) {
        return Err(EstimateError::BadDimension);
    }
    let (vw, _) = g.weights()?;
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let coupled: Vec<f64> = alpha.iter().map(|&a| -lam * a).collect();
        let gl = g.with_alpha(coupled);
        let op = assemble(&gl)?;
        let deig = op.eigen()?;
        let kappa_discrete = deig.kappa_minus();
        let qk = kappa_minus_quantum(&gl)?;
        let rhs: f64 = alpha
            .iter()
            .zip(&vw.m)
            .map(|(&a, &mv)| (lam * a / mv).powf(dim / 2.0) * mv)
            .sum();
        let scaled: Vec<f64> = alpha.iter().map(|&a| lam * a).collect();
        rows.push(ClrRow {
            lambda: lam,
            kappa_discrete,
            kappa_quantum: qk.value,
            rhs,
            weak_norm: weak_lq_norm(&scaled, dim / 2.0),
            flagged: deig.near_degenerate || !qk.routes_agree,
        });
    }
    Ok(rows)
}
