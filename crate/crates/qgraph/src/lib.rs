//! Spectral toolkit for metric graphs.
//!
//! A metric graph carries a quantum Hamiltonian (second derivative on edges
//! with coupling conditions at vertices) whose spectral data is mirrored by
//! a weighted discrete Laplacian on the underlying combinatorial graph. This
//! crate computes both sides at desk scale and cross-checks them:
//!
//! - [`graph`]: metric graphs, validation, vertex/edge weights;
//! - [`family`]: deterministic generators for infinite families plus
//!   symbolic tail descriptors;
//! - [`operator`]: the weighted discrete Laplacian in both representations,
//!   its quadratic form, dense eigensolving, tridiagonal specializations;
//! - [`metrics`]: path pseudo metrics, the intrinsic-metric inequality,
//!   distance balls;
//! - [`criteria`]: verdict engine for self-adjointness, semiboundedness and
//!   spectral-type rules over graph families;
//! - [`secular`]: eigenvalues of the quantum Hamiltonian through the vertex
//!   characteristic matrix, with negative-count routes and correspondence
//!   reports;
//! - [`fem`]: piecewise-linear finite elements on the metric graph, the
//!   independent oracle for the quantum side;
//! - [`estimates`]: isoperimetric constants, spectral-gap bound checks,
//!   volume growth, heat-kernel decay and coupling sweeps;
//! - [`corpus`]: seeded random instances;
//! - [`io`]: the JSON graph schema and report/CSV emission.

pub mod corpus;
pub mod criteria;
pub mod estimates;
pub mod family;
pub mod fem;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod operator;
pub mod secular;

pub use family::{FamilyKind, GraphFamily, SeqRule, TailClass};
pub use graph::{Diagnostic, GraphError, MetricGraph};
pub use operator::{assemble, degree_weighted_variant, jacobi_from_points, WeightedOperator};
