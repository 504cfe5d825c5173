//! Eigenvalues of the quantum Hamiltonian on a finite metric graph through
//! the vertex characteristic matrix.
//!
//! For spectral parameter `lambda = k^2 > 0`, a solution of `-f'' = lambda f`
//! on an edge of length `l` with endpoint values `f(u)`, `f(v)` has inward
//! derivative at `u` equal to `-k cot(k l) f(u) + k csc(k l) f(v)`. Summing
//! inward derivatives over the edges at each vertex and imposing the
//! coupling condition `sum of inward derivatives = alpha(v) f(v)` gives the
//! homogeneous system `S(lambda) f = 0` with
//!
//! ```text
//! S_vv = alpha(v) + sum over incident edges of k cot(k l),
//! S_uv = -k csc(k l)          (u adjacent to v).
//! ```
//!
//! On the negative axis (`lambda = -kappa^2`) the trigonometric pair turns
//! into `kappa coth(kappa l)` and `-kappa csch(kappa l)`; at `lambda = 0`
//! the analytic limits are `1/l` on both, which makes `S(0)` exactly
//! `diag(m) * H` for the assembled discrete operator `H` — the identity the
//! whole discrete-continuous correspondence rests on. Both branches share
//! one entry builder so that identity holds to the last bit that scaling
//! allows.
//!
//! Away from the Dirichlet poles `k l` in `pi Z`, `lambda` is an eigenvalue
//! exactly when `det S(lambda) = 0`, and the pole-cleared function
//! `F(k) = det S(k^2) * prod over edges of sin(k l)` is analytic, so roots
//! are located by a sign-change scan plus bisection. Roots that collide
//! with a pole (Neumann-type eigenvalues) are polished by fitting a local
//! polynomial to `F` just outside the pole guard. A finite-element count
//! cross-checks every scan; missed roots (even multiplicity, eigenfunctions
//! vanishing on every vertex) are appended from the element side and
//! flagged rather than silently dropped.

use serde::Serialize;
use thiserror::Error;

use crate::fem::{fem_discretize, FemError};
use crate::graph::{Diagnostic, MetricGraph};
use crate::linalg::{poly_fit_scaled, poly_roots_in, sym_eigen, DenseMatrix};
use crate::operator::{assemble, OperatorError, NEAR_DEGENERATE_FACTOR};

/// Exclusion radius around Dirichlet poles, in units of k.
pub const POLE_GUARD: f64 = 1e-6;
/// Relative bisection tolerance in the spectral parameter.
pub const BISECT_REL: f64 = 1e-10;
/// Grid resolution: this many sample points per period of the fastest
/// oscillation of the pole-cleared determinant.
pub const SCAN_POINTS_PER_PERIOD: f64 = 40.0;

#[derive(Debug, Error)]
pub enum SecularError {
    #[error("graph failed validation: {0:?}")]
    Unvalidated(Vec<Diagnostic>),
    #[error("spectral parameter {lambda} is within the pole guard of edge `{edge}`")]
    PoleProximity { lambda: f64, edge: String },
    #[error("scan resolution insufficient: secular count {secular} vs element count {fem}")]
    ScanResolutionInsufficient { secular: usize, fem: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// How an eigenvalue was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Secular,
    Fem,
}

/// One located eigenvalue with its bracket.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueHit {
    pub lambda: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub method: Method,
    pub near_pole: bool,
}

/// Instance-level flags.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SpectrumFlags {
    pub near_pole: bool,
    pub near_degenerate: bool,
    pub count_mismatch: bool,
    /// Two edges share a length; pole collisions are then likely and the
    /// determinant scan may be blind to vertex-vanishing eigenfunctions.
    pub commensurate_lengths: bool,
}

/// Ascending eigenvalues with negative count and flags.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<EigenvalueHit>,
    pub kappa_minus: usize,
    pub method: Method,
    pub flags: SpectrumFlags,
}

/// Positivity classification of a self-adjoint operator by its lowest
/// eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    Indefinite,
    Nonnegative,
    PositiveDefinite,
}

/// The two negative-count routes and their agreement.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumKappa {
    /// The accepted value (element route).
    pub value: usize,
    /// Count of negative eigenvalues of S(0); same mechanism as the
    /// correspondence itself, recorded but never used as the oracle.
    pub route_a: usize,
    pub route_b_coarse: usize,
    pub route_b_fine: usize,
    pub routes_agree: bool,
}

/// Side-by-side negative counts and positivity of the quantum and discrete
/// operators.
#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceReport {
    pub kappa_minus_quantum: usize,
    pub kappa_minus_discrete: usize,
    pub route_a_secular: usize,
    pub positivity_quantum: Positivity,
    pub positivity_discrete: Positivity,
    pub lambda_min_discrete: f64,
    /// Element ground energy extrapolated from two meshes.
    pub lambda_min_quantum: f64,
    pub agree: bool,
    pub near_degenerate: bool,
    pub commensurate_lengths: bool,
    pub routes_agree: bool,
}

/// The vertex characteristic system of a validated graph.
pub struct SecularSystem<'g> {
    graph: &'g MetricGraph,
    lengths: Vec<f64>,
    total_length: f64,
}

impl<'g> SecularSystem<'g> {
    pub fn new(graph: &'g MetricGraph) -> Result<Self, SecularError> {
        graph
            .require_valid()
            .map_err(|_| SecularError::Unvalidated(graph.validate()))?;
        let lengths: Vec<f64> = graph.edges().iter().map(|e| e.length).collect();
        Ok(SecularSystem {
            graph,
            total_length: lengths.iter().sum(),
            lengths,
        })
    }

    /// Smallest |k - pole| over all Dirichlet poles of all edges, for k > 0.
    fn pole_distance(&self, k: f64) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut edge = 0;
        for (ei, &l) in self.lengths.iter().enumerate() {
            let n = (k * l / std::f64::consts::PI).round();
            if n >= 1.0 {
                let d = (k - n * std::f64::consts::PI / l).abs();
                if d < best {
                    best = d;
                    edge = ei;
                }
            }
        }
        (best, edge)
    }

    /// All poles inside the open k-interval (a, b).
    fn poles_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &l in &self.lengths {
            let mut n = (a * l / std::f64::consts::PI).floor().max(1.0);
            loop {
                let p = n * std::f64::consts::PI / l;
                if p >= b {
                    break;
                }
                if p > a {
                    out.push(p);
                }
                n += 1.0;
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        out
    }

    /// Entry pair (diagonal term, off-diagonal magnitude) for one edge.
    #[inline]
    fn edge_terms(lambda: f64, l: f64) -> (f64, f64) {
        if lambda > 0.0 {
            let k = lambda.sqrt();
            let kl = k * l;
            (k * kl.cos() / kl.sin(), k / kl.sin())
        } else if lambda < 0.0 {
            let kappa = (-lambda).sqrt();
            let kl = kappa * l;
            (kappa * kl.cosh() / kl.sinh(), kappa / kl.sinh())
        } else {
            // Analytic limit at lambda = 0, hard-coded.
            (1.0 / l, 1.0 / l)
        }
    }

    /// Assemble S(lambda) without a pole check (internal scans keep their
    /// own distance from poles).
    fn matrix_unchecked(&self, lambda: f64) -> DenseMatrix {
        let n = self.graph.vertex_count();
        let mut s = DenseMatrix::zeros(n);
        for (v, &a) in self.graph.alpha().iter().enumerate() {
            s.add(v, v, a);
        }
        for e in self.graph.edges() {
            let (diag, off) = Self::edge_terms(lambda, e.length);
            s.add(e.tail, e.tail, diag);
            s.add(e.head, e.head, diag);
            s.add(e.tail, e.head, -off);
            s.add(e.head, e.tail, -off);
        }
        s
    }

    /// Assemble S(lambda), rejecting spectral parameters inside the pole
    /// guard of some edge.
    pub fn matrix(&self, lambda: f64) -> Result<DenseMatrix, SecularError> {
        if lambda > 0.0 {
            let k = lambda.sqrt();
            let (d, ei) = self.pole_distance(k);
            if d < POLE_GUARD {
                return Err(SecularError::PoleProximity {
                    lambda,
                    edge: self.graph.edges()[ei].id.clone(),
                });
            }
        }
        Ok(self.matrix_unchecked(lambda))
    }

    /// The pole-cleared secular function
    /// `F(k) = det S(k^2) * prod_e sin(k |e|)`, analytic in k.
    pub fn pole_cleared(&self, k: f64) -> f64 {
        let s = self.matrix_unchecked(k * k);
        let det = s.det();
        let prod: f64 = self.lengths.iter().map(|&l| (k * l).sin()).product();
        det * prod
    }

    /// j-th smallest eigenvalue of S(lambda).
    fn branch(&self, j: usize, lambda: f64) -> f64 {
        sym_eigen(&self.matrix_unchecked(lambda)).values[j]
    }

    /// Locate roots of the pole-cleared function on (0, k_max].
    fn scan_positive(&self, k_max: f64, step: f64) -> PositiveScan {
        let mut hits = Vec::new();
        let mut any_near_pole = false;
        let nudge = |k: f64| -> f64 {
            let (d, _) = self.pole_distance(k);
            if d < POLE_GUARD {
                k + POLE_GUARD
            } else {
                k
            }
        };
        let mut prev_k = nudge(step * 0.5);
        let mut prev_f = self.pole_cleared(prev_k);
        let mut i = 1usize;
        loop {
            let raw = step * 0.5 + step * i as f64;
            if raw > k_max + step * 0.5 {
                break;
            }
            let k = nudge(raw.min(k_max.max(step)));
            let f = self.pole_cleared(k);
            if prev_f == 0.0 {
                hits.push(EigenvalueHit {
                    lambda: prev_k * prev_k,
                    bracket_lo: prev_k * prev_k,
                    bracket_hi: prev_k * prev_k,
                    method: Method::Secular,
                    near_pole: false,
                });
            } else if prev_f * f < 0.0 {
                let (roots, saw_pole) = self.refine_bracket(prev_k, k);
                any_near_pole |= saw_pole;
                hits.extend(roots);
            }
            prev_k = k;
            prev_f = f;
            i += 1;
        }
        PositiveScan {
            hits,
            any_near_pole,
        }
    }

    /// Resolve a sign-change bracket that may contain Dirichlet poles:
    /// subdivide at guarded shells around each pole, bisect pole-free
    /// subintervals, polish pole-touching ones by local polynomial fit.
    fn refine_bracket(&self, a: f64, b: f64) -> (Vec<EigenvalueHit>, bool) {
        let poles = self.poles_in(a, b);
        let mut saw_pole = false;
        if poles.is_empty() {
            return (vec![self.bisect_root(a, b)], false);
        }
        let mut points = vec![a];
        for &p in &poles {
            for mult in [32.0, 16.0, 8.0, 4.0, 2.0, 1.0] {
                let lo = p - POLE_GUARD * mult;
                if lo > *points.last().unwrap() && lo < b {
                    points.push(lo);
                }
            }
            for mult in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
                let hi = p + POLE_GUARD * mult;
                if hi > *points.last().unwrap() && hi < b {
                    points.push(hi);
                }
            }
        }
        points.push(b);
        let values: Vec<f64> = points.iter().map(|&k| self.pole_cleared(k)).collect();
        let mut out = Vec::new();
        for w in 0..points.len() - 1 {
            if values[w] * values[w + 1] < 0.0 {
                let lo = points[w];
                let hi = points[w + 1];
                let pole_inside = poles.iter().any(|&p| p > lo && p < hi);
                if pole_inside {
                    saw_pole = true;
                    out.extend(self.polish_near_pole(lo, hi));
                } else {
                    out.push(self.bisect_root(lo, hi));
                }
            }
        }
        if out.is_empty() {
            // Sign change across the bracket but not across any sub-pair:
            // the root hides inside a guard shell.
            saw_pole = true;
            out.extend(self.polish_near_pole(a, b));
        }
        (out, saw_pole)
    }

    /// Plain bisection on a pole-free sign-change bracket.
    fn bisect_root(&self, mut a: f64, mut b: f64) -> EigenvalueHit {
        let mut fa = self.pole_cleared(a);
        let (lo0, hi0) = (a, b);
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            let fm = self.pole_cleared(mid);
            if fa * fm <= 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
            if (b - a) <= 0.5 * BISECT_REL * mid.max(1e-6) {
                break;
            }
        }
        let k = 0.5 * (a + b);
        EigenvalueHit {
            lambda: k * k,
            bracket_lo: lo0 * lo0,
            bracket_hi: hi0 * hi0,
            method: Method::Secular,
            near_pole: false,
        }
    }

    /// Root inside a bracket that touches a pole: fit a polynomial to the
    /// analytic pole-cleared function on shells outside the guard and read
    /// the root off the fit.
    fn polish_near_pole(&self, a: f64, b: f64) -> Vec<EigenvalueHit> {
        let center = 0.5 * (a + b);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let shells = [
            -32.0, -22.0, -15.0, -10.0, -7.0, -4.5, -3.0, -2.0, -1.4, -1.0, 1.0, 1.4, 2.0, 3.0,
            4.5, 7.0, 10.0, 15.0, 22.0, 32.0,
        ];
        for t in shells {
            let k = center + t * POLE_GUARD;
            if k > a && k < b {
                xs.push(k - center);
                ys.push(self.pole_cleared(k));
            }
        }
        if xs.len() < 8 {
            return vec![EigenvalueHit {
                lambda: center * center,
                bracket_lo: a * a,
                bracket_hi: b * b,
                method: Method::Secular,
                near_pole: true,
            }];
        }
        let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let coeffs = poly_fit_scaled(&xs, &ys, 6, scale);
        let roots = poly_roots_in(&coeffs, -1.0, 1.0, 4000);
        let mut out: Vec<EigenvalueHit> = roots
            .into_iter()
            .map(|r| r * scale + center)
            .filter(|&k| k > a && k < b)
            .map(|k| EigenvalueHit {
                lambda: k * k,
                bracket_lo: a * a,
                bracket_hi: b * b,
                method: Method::Secular,
                near_pole: true,
            })
            .collect();
        if out.is_empty() {
            out.push(EigenvalueHit {
                lambda: center * center,
                bracket_lo: a * a,
                bracket_hi: b * b,
                method: Method::Secular,
                near_pole: true,
            });
        }
        out
    }

    /// Negative eigenvalues through the monotone branches of S: each branch
    /// decreases strictly in lambda on the negative axis, so the j-th branch
    /// crosses zero exactly once if it is negative at 0.
    fn negative_hits(&self) -> Vec<EigenvalueHit> {
        let s0 = sym_eigen(&self.matrix_unchecked(0.0));
        let tol = 1e-12 * s0.spectral_norm().max(1.0);
        let n_neg = s0.count_below(tol);
        let mut hits = Vec::new();
        for j in 0..n_neg {
            let mut lo = -1.0;
            while self.branch(j, lo) <= 0.0 {
                lo *= 4.0;
                assert!(lo > -1e200, "runaway negative bracket");
            }
            let mut hi = 0.0;
            let (b_lo, b_hi) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.branch(j, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= BISECT_REL * mid.abs().max(1e-12) {
                    break;
                }
            }
            hits.push(EigenvalueHit {
                lambda: 0.5 * (lo + hi),
                bracket_lo: b_lo,
                bracket_hi: b_hi,
                method: Method::Secular,
                near_pole: false,
            });
        }
        hits
    }
}

struct PositiveScan {
    hits: Vec<EigenvalueHit>,
    any_near_pole: bool,
}

fn commensurate(lengths: &[f64]) -> bool {
    for (i, a) in lengths.iter().enumerate() {
        for b in &lengths[i + 1..] {
            if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
                return true;
            }
        }
    }
    false
}

/// Default element mesh width for a graph: fine enough to resolve every
/// edge, clamped for runtime.
pub fn default_mesh(g: &MetricGraph) -> f64 {
    let min_len = g
        .edges()
        .iter()
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min);
    (min_len / 4.0).min(0.2)
}

/// Negative count of the quantum Hamiltonian by both routes.
///
/// Route A reads the inertia of S(0); route B counts negative element
/// eigenvalues at two meshes and demands agreement. Route B is the value
/// reported: it is assembled cell by cell with no reference to the vertex
/// weights, which keeps it an independent witness.
pub fn kappa_minus_quantum(g: &MetricGraph) -> Result<QuantumKappa, SecularError> {
    let sys = SecularSystem::new(g)?;
    let s0 = sys.matrix_unchecked(0.0);
    let eig = sym_eigen(&s0);
    let tol = 1e-12 * eig.spectral_norm().max(1.0);
    let route_a = eig.count_below(tol);
    let h = default_mesh(g);
    let coarse = fem_discretize(g, h)?.kappa_minus();
    let fine = fem_discretize(g, h / 2.0)?.kappa_minus();
    let routes_agree = coarse == fine && coarse == route_a;
    Ok(QuantumKappa {
        value: fine,
        route_a,
        route_b_coarse: coarse,
        route_b_fine: fine,
        routes_agree,
    })
}

/// All eigenvalues of the quantum Hamiltonian up to `lambda_max`.
///
/// Negative eigenvalues come from monotone-branch bisection, the value 0
/// from the kernel of S(0), positive ones from the pole-cleared scan. An
/// element count at two meshes audits the total; missing roots are filled
/// in from the element side (flagged, never silent).
pub fn eigenvalues_below(
    g: &MetricGraph,
    lambda_max: f64,
) -> Result<SpectrumResult, SecularError> {
    let sys = SecularSystem::new(g)?;
    let mut flags = SpectrumFlags {
        commensurate_lengths: commensurate(&sys.lengths),
        ..Default::default()
    };

    let mut hits = sys.negative_hits();
    let kappa_minus = hits.len();

    let s0 = sym_eigen(&sys.matrix_unchecked(0.0));
    let tol0 = 1e-12 * s0.spectral_norm().max(1.0);
    if lambda_max >= 0.0 {
        for _ in 0..s0.values.iter().filter(|v| v.abs() <= tol0).count() {
            hits.push(EigenvalueHit {
                lambda: 0.0,
                bracket_lo: 0.0,
                bracket_hi: 0.0,
                method: Method::Secular,
                near_pole: false,
            });
        }
    }

    if lambda_max > 0.0 {
        let k_max = lambda_max.sqrt();
        let step = std::f64::consts::PI / (SCAN_POINTS_PER_PERIOD * sys.total_length);
        let scan = sys.scan_positive(k_max, step);
        flags.near_pole = scan.any_near_pole;
        // Multiplicity from the nullity of S at each interior root.
        let mut expanded = Vec::new();
        for hit in scan.hits {
            let mult = if hit.near_pole {
                1
            } else {
                let e = sym_eigen(&sys.matrix_unchecked(hit.lambda));
                let t = 1e-9 * e.spectral_norm().max(1.0);
                e.values.iter().filter(|v| v.abs() <= t).count().max(1)
            };
            for _ in 0..mult {
                expanded.push(hit.clone());
            }
        }
        hits.extend(expanded);
    }

    hits.retain(|h| h.lambda <= lambda_max);
    hits.sort_by(|x, y| x.lambda.partial_cmp(&y.lambda).unwrap());

    // Element audit at two meshes. For a positive cutoff the strict inertia
    // already counts the kernel eigenvalue 0; exactly at cutoff 0 it does
    // not, so the kernel dimension is added back there.
    let h = default_mesh(g).min(std::f64::consts::PI / (4.0 * (lambda_max.max(1.0)).sqrt()));
    let coarse = fem_discretize(g, h)?;
    let fine = fem_discretize(g, h / 2.0)?;
    let n_coarse = coarse.count_below(lambda_max);
    let n_fine = fine.count_below(lambda_max);
    let kernel_at_cutoff = if lambda_max == 0.0 {
        hits.iter().filter(|hit| hit.lambda == 0.0).count()
    } else {
        0
    };
    let fem_total = n_fine + kernel_at_cutoff;
    if n_coarse == n_fine && fem_total == hits.len() {
        return Ok(SpectrumResult {
            eigenvalues: hits,
            kappa_minus,
            method: Method::Secular,
            flags,
        });
    }

    // Reconcile: append element eigenvalues that have no secular partner.
    flags.count_mismatch = fem_total != hits.len();
    if fem_total > hits.len() {
        let mut claimed = vec![false; hits.len()];
        // The kernel hits claim the leading near-zero element values.
        for (i, hit) in hits.iter().enumerate() {
            if hit.lambda == 0.0 {
                claimed[i] = true;
            }
        }
        let zero_hits = hits.iter().filter(|h| h.lambda == 0.0).count();
        let mut extras = Vec::new();
        for j in zero_hits..n_fine {
            let fv = fine.eigenvalue(j, 1e-10)?;
            let tol = 5e-2 * (1.0 + fv.abs());
            let matched = hits.iter().enumerate().find(|(i, hit)| {
                !claimed[*i] && hit.lambda > 0.0 && (hit.lambda - fv).abs() <= tol
            });
            match matched {
                Some((i, _)) => claimed[i] = true,
                None => {
                    if fv > tol0 {
                        extras.push(EigenvalueHit {
                            lambda: fv,
                            bracket_lo: fv,
                            bracket_hi: fv,
                            method: Method::Fem,
                            near_pole: true,
                        });
                    }
                }
            }
        }
        hits.extend(extras);
        hits.sort_by(|x, y| x.lambda.partial_cmp(&y.lambda).unwrap());
    }
    if hits.len() != fem_total {
        // Eigenvalues straddling the cutoff drift with the mesh; tolerate a
        // discrepancy fully explained by hits inside the boundary band.
        let band = 0.05 * (1.0 + lambda_max.abs());
        let near_boundary = hits
            .iter()
            .filter(|hit| (hit.lambda - lambda_max).abs() <= band)
            .count();
        let gap = (hits.len() as i64 - fem_total as i64).unsigned_abs() as usize;
        if gap > near_boundary {
            return Err(SecularError::ScanResolutionInsufficient {
                secular: hits.len(),
                fem: fem_total,
            });
        }
    }
    Ok(SpectrumResult {
        eigenvalues: hits,
        kappa_minus,
        method: Method::Secular,
        flags,
    })
}

fn classify(lambda_min: f64, band: f64) -> Positivity {
    if lambda_min < -band {
        Positivity::Indefinite
    } else if lambda_min <= band {
        Positivity::Nonnegative
    } else {
        Positivity::PositiveDefinite
    }
}

/// Band inside which an extrapolated element ground energy counts as zero.
pub const QUANTUM_ZERO_BAND: f64 = 1e-6;

/// Cross-check of the discrete and quantum sides on one graph: negative
/// counts must match, and the sign of the ground energy must not contradict.
pub fn correspondence_report(g: &MetricGraph) -> Result<CorrespondenceReport, SecularError> {
    let op = assemble(g)?;
    let deig = op.eigen()?;
    let kappa_discrete = deig.kappa_minus();
    let lambda_min_discrete = deig.eigen.values[0];
    let qk = kappa_minus_quantum(g)?;

    let h = default_mesh(g);
    let lam_h = fem_discretize(g, h)?.lowest_eigenvalue()?;
    let lam_h2 = fem_discretize(g, h / 2.0)?.lowest_eigenvalue()?;
    // Linear elements converge at second order from above.
    let lambda_min_quantum = (4.0 * lam_h2 - lam_h) / 3.0;

    let positivity_discrete =
        classify(lambda_min_discrete, NEAR_DEGENERATE_FACTOR * deig.tol_zero);
    let positivity_quantum = classify(lambda_min_quantum, QUANTUM_ZERO_BAND);
    let signs_compatible = !matches!(
        (positivity_discrete, positivity_quantum),
        (Positivity::Indefinite, Positivity::PositiveDefinite)
            | (Positivity::PositiveDefinite, Positivity::Indefinite)
    );
    let agree = qk.value == kappa_discrete && signs_compatible;
    Ok(CorrespondenceReport {
        kappa_minus_quantum: qk.value,
        kappa_minus_discrete: kappa_discrete,
        route_a_secular: qk.route_a,
        positivity_quantum,
        positivity_discrete,
        lambda_min_discrete,
        lambda_min_quantum,
        agree,
        near_degenerate: deig.near_degenerate,
        commensurate_lengths: commensurate(
            &g.edges().iter().map(|e| e.length).collect::<Vec<_>>(),
        ),
        routes_agree: qk.routes_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_indices;

    #[test]
    fn zero_parameter_matrix_is_the_analytic_limit() {
        let l = 0.8;
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, l)]).unwrap();
        let sys = SecularSystem::new(&g).unwrap();
        let s = sys.matrix(0.0).unwrap();
        assert_eq!(s.get(0, 0), 1.0 / l);
        assert_eq!(s.get(0, 1), -1.0 / l);
    }

    #[test]
    fn negative_parameter_matrix_is_positive_definite() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap();
        let sys = SecularSystem::new(&g).unwrap();
        let s = sys.matrix(-1.0).unwrap();
        let coth1 = 1.0f64.cosh() / 1.0f64.sinh();
        let csch1 = 1.0 / 1.0f64.sinh();
        assert!((s.get(0, 0) - coth1).abs() < 1e-15);
        assert!((s.get(0, 1) + csch1).abs() < 1e-15);
        assert!(s.get(0, 0) > 0.0);
        assert!(s.det() > 0.0);
    }

    #[test]
    fn zero_matrix_equals_weighted_form_matrix() {
        let g = graph_from_indices(
            &[0.5, -2.0, 1.0, 0.0],
            &[(0, 1, 0.37), (1, 2, 1.21), (2, 3, 0.64), (3, 0, 1.93), (0, 2, 0.88)],
        )
        .unwrap();
        let sys = SecularSystem::new(&g).unwrap();
        let s0 = sys.matrix(0.0).unwrap();
        let op = assemble(&g).unwrap();
        let scale = s0.max_abs();
        for i in 0..4 {
            for j in 0..4 {
                let lhs = s0.get(i, j);
                let rhs = op.measure()[i] * op.h_entry(i, j);
                assert!(
                    (lhs - rhs).abs() <= 1e-14 * scale,
                    "entry ({i},{j}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn pole_proximity_rejected() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap();
        let sys = SecularSystem::new(&g).unwrap();
        let k = std::f64::consts::PI + 1e-8;
        assert!(matches!(
            sys.matrix(k * k),
            Err(SecularError::PoleProximity { .. })
        ));
    }

    #[test]
    fn neumann_interval_spectrum() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, std::f64::consts::PI)]).unwrap();
        let res = eigenvalues_below(&g, 17.0).unwrap();
        let got: Vec<f64> = res.eigenvalues.iter().map(|h| h.lambda).collect();
        let want = [0.0, 1.0, 4.0, 9.0, 16.0];
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (g_, w) in got.iter().zip(&want) {
            assert!((g_ - w).abs() < 1e-8, "{g_} vs {w}");
        }
        assert_eq!(res.kappa_minus, 0);
    }

    #[test]
    fn midpoint_well_matches_scalar_root() {
        // Two unit edges, coupling -2 at the midpoint: the unique negative
        // eigenvalue solves kappa tanh kappa = 1.
        let g = graph_from_indices(&[0.0, -2.0, 0.0], &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let res = eigenvalues_below(&g, 0.5).unwrap();
        assert_eq!(res.kappa_minus, 1);
        let lam = res.eigenvalues[0].lambda;
        let f = |k: f64| k * k.tanh() - 1.0;
        let (mut a, mut b) = (0.5, 2.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let kappa_oracle = 0.5 * (a + b);
        assert!(
            ((-lam).sqrt() - kappa_oracle).abs() < 1e-10,
            "kappa {} vs {kappa_oracle}",
            (-lam).sqrt()
        );
    }

    #[test]
    fn incommensurate_star_matches_element_oracle() {
        let g = graph_from_indices(&[0.0; 4], &[(0, 1, 0.7), (0, 2, 1.1), (0, 3, 1.3)]).unwrap();
        let res = eigenvalues_below(&g, 16.0).unwrap();
        assert!(!res.flags.count_mismatch);
        let disc = fem_discretize(&g, 0.004).unwrap();
        for (j, hit) in res.eigenvalues.iter().enumerate() {
            let fv = disc.eigenvalue(j, 1e-10).unwrap();
            assert!(
                (hit.lambda - fv).abs() < 2e-3 * (1.0 + fv.abs()),
                "j={j}: {} vs {fv}",
                hit.lambda
            );
        }
    }

    #[test]
    fn equilateral_star_recovers_hidden_multiplicity() {
        // Equilateral 3-star: eigenfunctions vanishing at every vertex are
        // invisible to the determinant scan; the element audit restores them.
        let g = graph_from_indices(&[0.0; 4], &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let res = eigenvalues_below(&g, 12.0).unwrap();
        assert!(res.flags.commensurate_lengths);
        // True spectrum below 12: {0, (pi/2)^2 double, pi^2}. The double
        // eigenvalue gives no sign change and must come from the audit.
        let disc = fem_discretize(&g, 0.005).unwrap();
        assert_eq!(res.eigenvalues.len(), disc.count_below(12.0));
        let quarter = std::f64::consts::PI * std::f64::consts::PI / 4.0;
        // Audit-restored values carry element accuracy, not bisection
        // accuracy; they arrive flagged.
        let doubles = res
            .eigenvalues
            .iter()
            .filter(|h| (h.lambda - quarter).abs() < 2e-2 && h.method == Method::Fem)
            .count();
        assert_eq!(doubles, 2);
        assert!(res
            .eigenvalues
            .iter()
            .any(|h| (h.lambda - 4.0 * quarter).abs() < 1e-9));
    }

    #[test]
    fn kappa_routes_agree_on_star() {
        let g = graph_from_indices(
            &[-5.0, 0.0, 0.0, 0.0],
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
        )
        .unwrap();
        let qk = kappa_minus_quantum(&g).unwrap();
        assert!(qk.routes_agree);
        assert_eq!(qk.value, 1);
        let disc_kappa = assemble(&g).unwrap().kappa_minus().unwrap();
        assert_eq!(qk.value, disc_kappa);
    }

    #[test]
    fn correspondence_on_kirchhoff_graph() {
        let g = graph_from_indices(
            &[0.0; 4],
            &[(0, 1, 0.9), (1, 2, 1.4), (2, 3, 0.55), (3, 0, 1.23)],
        )
        .unwrap();
        let rep = correspondence_report(&g).unwrap();
        assert_eq!(rep.kappa_minus_quantum, 0);
        assert_eq!(rep.kappa_minus_discrete, 0);
        assert_eq!(rep.positivity_discrete, Positivity::Nonnegative);
        assert_eq!(rep.positivity_quantum, Positivity::Nonnegative);
        assert!(rep.agree);
    }

    #[test]
    fn correspondence_on_attractive_edge() {
        let g = graph_from_indices(&[-1.0, -1.0], &[(0, 1, 1.0)]).unwrap();
        let rep = correspondence_report(&g).unwrap();
        assert_eq!(rep.kappa_minus_quantum, 1);
        assert_eq!(rep.kappa_minus_discrete, 1);
        assert_eq!(rep.positivity_quantum, Positivity::Indefinite);
        assert_eq!(rep.positivity_discrete, Positivity::Indefinite);
        assert!(rep.agree);
    }

    #[test]
    fn weyl_monotone_on_negative_axis() {
        let g = graph_from_indices(
            &[1.0, -0.5, 0.3],
            &[(0, 1, 0.6), (1, 2, 1.7), (2, 0, 0.95)],
        )
        .unwrap();
        let sys = SecularSystem::new(&g).unwrap();
        for (l1, l2) in [(-4.0, -1.0), (-9.0, -4.0), (-0.8, -0.2)] {
            let s1 = sys.matrix(l1).unwrap();
            let s2 = sys.matrix(l2).unwrap();
            let mut diff = DenseMatrix::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    diff.set(i, j, s1.get(i, j) - s2.get(i, j));
                }
            }
            let min = sym_eigen(&diff).values[0];
            assert!(min > 0.0, "difference not positive definite: {min}");
        }
    }
}
